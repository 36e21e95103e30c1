"""
Table output for the management commands: CSV with a provenance comment.
"""
import io
import logging
from typing import Optional

import pandas as pd

from toricvol import __version__
from toricvol.config import ComputationConfig

logger = logging.getLogger(__name__)


def provenance_line(digest: str) -> str:
    return f"# toricvol {__version__} config={digest}"


def render_csv(frame: pd.DataFrame, digest: str) -> str:
    buffer = io.StringIO()
    buffer.write(provenance_line(digest) + '\n')
    frame.to_csv(
        buffer,
        index=False,
        float_format=ComputationConfig.get('OUTPUT.float_format', '%.10g'),
        lineterminator='\n',
    )
    return buffer.getvalue()


def write_text(text: str, out: Optional[str], stream) -> None:
    """Write to the --out file when given, else to the command's stdout."""
    if out:
        with open(out, 'w', encoding='utf-8', newline='\n') as handle:
            handle.write(text)
        logger.info("Wrote %s", out)
    else:
        stream.write(text, ending='')
