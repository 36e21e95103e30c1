"""
Legendre-Fenchel conjugate of a metric model:

    g_check(x) = min over u of <x, u> - g(u),   x in the reference polytope.

Interior points are solved by damped Newton on the convex objective.
Boundary points are solved exactly on the face: terms of the model that do
not touch the face drop out, and the remaining objective is invariant along
the normal directions, so Newton runs in coordinates on the face's span.
"""
import logging
import math
from dataclasses import dataclass, field
from fractions import Fraction
from numbers import Rational
from typing import Dict, Optional, Sequence, Tuple

import numpy as np
import pandas as pd
from scipy.linalg import LinAlgError, cho_factor, cho_solve, orth
from scipy.optimize import minimize

from lattice_core.linalg import rational_point
from metric_models.metrics import CanonicalSplit, MetricModel
from toricvol.exceptions import NoConvergence, NotInDomain, NotSmooth

from .options import ConjugateOptions

logger = logging.getLogger(__name__)


@dataclass
class ConjugateValue:
    x: Tuple
    value: float
    minimizer: Optional[np.ndarray]
    converged: bool
    residual: float
    iterations: int = 0
    method: str = 'newton'
    diagnostics: Dict = field(default_factory=dict)

    @property
    def at_infinity(self) -> bool:
        return self.minimizer is None


def _is_exact(x: Sequence) -> bool:
    return all(isinstance(c, Rational) and not isinstance(c, bool) for c in x)


def _tight_direction(m: MetricModel, x: Sequence, opts: ConjugateOptions):
    """Check x against the polytope and return the sum of the active normals."""
    polytope = m.reference_polytope
    if len(x) != m.dimension:
        raise NotInDomain(f"Point {tuple(x)} does not live in dimension {m.dimension}")
    if _is_exact(x):
        point = rational_point(x)
        if not polytope.contains(point):
            raise NotInDomain(f"{tuple(str(c) for c in point)} lies outside the polytope {polytope}")
        tight = polytope.tight_inequalities(point)
    else:
        if not polytope.contains_float(x, opts.boundary_tolerance):
            raise NotInDomain(f"{tuple(x)} lies outside the polytope {polytope}")
        tight = polytope.tight_inequalities(x, opts.boundary_tolerance)
    direction = [0] * m.dimension
    for index in tight:
        normal = polytope.inequalities[index][0]
        direction = [a + b for a, b in zip(direction, normal)]
    return tuple(direction)


def _face_basis(face: MetricModel) -> np.ndarray:
    """Orthonormal basis (d x k) of the linear span of the face's edge directions."""
    vertices = np.array(face.reference_polytope.vertices, dtype=float)
    diffs = vertices[1:] - vertices[0]
    if not len(diffs) or not np.any(diffs):
        return np.zeros((face.dimension, 0))
    if face.reference_polytope.is_full_dimensional:
        return np.eye(face.dimension)
    return orth(diffs.T)


def _newton_direction(hess, grad, opts: ConjugateOptions):
    """Newton step, or steepest descent if the Hessian is ill-conditioned."""
    try:
        if np.linalg.cond(hess) > opts.max_condition:
            raise LinAlgError("ill-conditioned")
        return -cho_solve(cho_factor(hess), grad), 'newton'
    except LinAlgError:
        return -grad, 'gradient'


def _minimize_on_face(face: MetricModel, x: np.ndarray, basis: np.ndarray, opts: ConjugateOptions):
    """Damped Newton on t -> <x, Vt> - g(Vt)."""
    xv = basis.T @ x

    def objective(t):
        return float(xv @ t - face.evaluate(basis @ t))

    t = np.zeros(basis.shape[1])
    f = objective(t)
    residual = math.inf
    fallbacks = 0
    for iteration in range(1, opts.max_iterations + 1):
        u = basis @ t
        grad = xv - basis.T @ face.gradient(u)
        residual = float(np.linalg.norm(grad))
        if residual <= opts.residual_tolerance:
            return f, u, residual, iteration, True

        hess = -basis.T @ face.hessian(u) @ basis
        direction, kind = _newton_direction(hess, grad, opts)
        if kind == 'gradient':
            fallbacks += 1

        slope = float(grad @ direction)
        slack = 1e-13 * (1.0 + abs(f))
        step = 1.0
        for _ in range(opts.max_backtracks):
            candidate = t + step * direction
            value = objective(candidate)
            if value <= f + opts.armijo_c1 * step * slope + slack:
                break
            step *= 0.5
        else:
            raise NoConvergence(
                "Line search failed to decrease the conjugate objective",
                {'iterations': iteration, 'residual': residual, 'value': f, 'x': x.tolist()},
            )
        t, f = candidate, value

        if np.linalg.norm(basis @ t) > opts.divergence_radius:
            logger.warning("Conjugate minimizer escaped radius %s at x=%s; value is a limit estimate",
                           opts.divergence_radius, x.tolist())
            return f, None, residual, iteration, False

    raise NoConvergence(
        f"Newton did not reach residual {opts.residual_tolerance} in {opts.max_iterations} iterations",
        {'iterations': opts.max_iterations, 'residual': residual, 'value': f,
         'x': x.tolist(), 'gradient_fallbacks': fallbacks},
    )


def _minimize_with_support(split: CanonicalSplit, x: np.ndarray, basis: np.ndarray, opts: ConjugateOptions):
    """
    min over t of <x, Vt> - g(Vt) for g = g_s + psi_Q - shift, as the
    smooth program in (t, s): <x, Vt> - g_s(Vt) + s with s >= -<w, Vt> for
    every vertex w of Q.
    """
    smooth = split.smooth
    k = basis.shape[1]
    xv = basis.T @ x
    W = np.array(split.polytope.vertices, dtype=float) @ basis
    A = np.hstack([W, np.ones((len(W), 1))])

    def objective(z):
        u = basis @ z[:k]
        value = float(xv @ z[:k] - smooth.evaluate(u) + z[k])
        return value, np.append(xv - basis.T @ smooth.gradient(u), 1.0)

    result = minimize(
        objective,
        np.zeros(k + 1),
        jac=True,
        method='SLSQP',
        constraints=[{'type': 'ineq', 'fun': lambda z: A @ z, 'jac': lambda z: A}],
        options={'ftol': opts.value_tolerance * 1e-2, 'maxiter': opts.max_iterations},
    )
    t = result.x[:k]
    u = basis @ t
    value = float(xv @ t - smooth.evaluate(u) - np.min(W @ t)) + split.shift
    # constraint violation of the returned iterate
    residual = float(max(0.0, -np.min(A @ result.x)))

    if np.linalg.norm(u) > opts.divergence_radius:
        logger.warning("Conjugate minimizer escaped radius %s at x=%s; value is a limit estimate",
                       opts.divergence_radius, x.tolist())
        return value, None, residual, int(result.nit), False
    # status 8: the line search cannot improve a feasible iterate any further
    stalled_at_optimum = result.status == 8 and residual <= opts.residual_tolerance
    if not (result.success or stalled_at_optimum):
        raise NoConvergence(
            f"Constrained conjugate solve failed: {result.message}",
            {'iterations': int(result.nit), 'residual': residual, 'value': value, 'x': x.tolist()},
        )
    return value, u, residual, int(result.nit), True


def conjugate_eval(m: MetricModel, x: Sequence, opts: Optional[ConjugateOptions] = None) -> ConjugateValue:
    opts = opts or ConjugateOptions.from_config()
    x = tuple(x)
    direction = _tight_direction(m, x, opts)
    xf = np.array([float(c) for c in x])

    constant = m.constant_conjugate()
    if constant is not None:
        return ConjugateValue(x=x, value=constant, minimizer=np.zeros(m.dimension),
                              converged=True, residual=0.0, method='exact')
    if not m.smooth and m.canonical_split() is None:
        raise NotSmooth(f"No conjugate oracle for the non-smooth metric {m.describe()}")

    face = m.restrict_to_face(direction) if any(direction) else m
    basis = _face_basis(face)
    on_boundary = face is not m

    if basis.shape[1] == 0:
        value = float(-face.evaluate(np.zeros(m.dimension)))
        return ConjugateValue(x=x, value=value, minimizer=None if on_boundary else np.zeros(m.dimension),
                              converged=True, residual=0.0, method='vertex')

    if face.smooth:
        value, minimizer, residual, iterations, converged = _minimize_on_face(face, xf, basis, opts)
        method = 'face' if on_boundary else 'newton'
    else:
        split = face.canonical_split()
        value, minimizer, residual, iterations, converged = _minimize_with_support(split, xf, basis, opts)
        method = 'constrained'
    if minimizer is None:
        method = 'diverged'
    return ConjugateValue(
        x=x,
        value=value,
        minimizer=None if on_boundary else minimizer,
        converged=converged,
        residual=residual,
        iterations=iterations,
        method=method,
    )


def conjugate_batch(m: MetricModel, points, opts: Optional[ConjugateOptions] = None,
                    return_status: bool = False):
    """
    Conjugate values at many float points. Interior points share one
    vectorized Newton iteration; boundary and stubborn points go through
    conjugate_eval one by one.

    With return_status the result is (values, converged). A point whose
    scalar solve fails is then recorded with its last iterate and a False
    flag instead of raising NoConvergence.
    """
    opts = opts or ConjugateOptions.from_config()
    X = np.atleast_2d(np.asarray(points, dtype=float))
    n = X.shape[0]
    polytope = m.reference_polytope
    normals = np.array([u for u, _ in polytope.inequalities], dtype=float)
    offsets = np.array([float(b) for _, b in polytope.inequalities])
    slack = X @ normals.T - offsets

    if np.any(slack < -opts.boundary_tolerance):
        bad = X[np.argmin(slack.min(axis=1))]
        raise NotInDomain(f"{tuple(bad)} lies outside the polytope {polytope}")

    converged = np.ones(n, dtype=bool)
    constant = m.constant_conjugate()
    if constant is not None:
        values = np.full(n, constant)
        return (values, converged) if return_status else values

    values = np.full(n, np.nan)
    interior = np.all(slack > opts.boundary_tolerance, axis=1)
    if m.smooth and m.strictly_positive and np.any(interior):
        values[interior] = _batched_newton(m, X[interior], opts)

    for i in np.flatnonzero(np.isnan(values)):
        try:
            result = conjugate_eval(m, tuple(X[i]), opts)
        except NoConvergence as exc:
            if not return_status:
                raise
            values[i] = exc.diagnostics.get('value', np.nan)
            converged[i] = False
            continue
        values[i] = result.value
        converged[i] = result.converged

    if not converged.all():
        logger.warning("%s of %s conjugate values did not converge", int(np.sum(~converged)), n)
    return (values, converged) if return_status else values


def _batched_newton(m: MetricModel, X: np.ndarray, opts: ConjugateOptions) -> np.ndarray:
    n, d = X.shape
    U = np.zeros((n, d))
    F = np.einsum('ij,ij->i', X, U) - m.evaluate(U)
    result = np.full(n, np.nan)
    active = np.ones(n, dtype=bool)

    for _ in range(opts.max_iterations):
        idx = np.flatnonzero(active)
        if not idx.size:
            break
        G = X[idx] - m.gradient(U[idx])
        residual = np.linalg.norm(G, axis=1)
        done = residual <= opts.residual_tolerance
        result[idx[done]] = F[idx[done]]
        active[idx[done]] = False
        idx, G = idx[~done], G[~done]
        if not idx.size:
            break

        H = -m.hessian(U[idx])
        D = -G.copy()
        well = np.linalg.cond(H) <= opts.max_condition
        if np.any(well):
            D[well] = np.linalg.solve(H[well], -G[well][:, :, None])[:, :, 0]

        slope = np.einsum('ij,ij->i', G, D)
        step = np.ones(idx.size)
        pending = np.ones(idx.size, dtype=bool)
        for _ in range(opts.max_backtracks):
            if not np.any(pending):
                break
            rows = np.flatnonzero(pending)
            cand = U[idx[rows]] + step[rows, None] * D[rows]
            value = np.einsum('ij,ij->i', X[idx[rows]], cand) - m.evaluate(cand)
            ok = value <= F[idx[rows]] + opts.armijo_c1 * step[rows] * slope[rows] \
                + 1e-13 * (1.0 + np.abs(F[idx[rows]]))
            accepted = rows[ok]
            U[idx[accepted]] = cand[ok]
            F[idx[accepted]] = value[ok]
            pending[accepted] = False
            step[rows[~ok]] *= 0.5
        # points whose line search stalled are handed to the scalar solver
        active[idx[pending]] = False
        escaped = np.linalg.norm(U[idx], axis=1) > opts.divergence_radius
        active[idx[escaped]] = False

    stalled = int(np.sum(np.isnan(result)))
    if stalled:
        logger.debug("%s of %s batched conjugates fall back to the scalar solver", stalled, n)
    return result


def conjugate_max(m: MetricModel) -> Tuple[float, np.ndarray]:
    """
    max of g_check over the polytope: g_check(x) <= -g(0) for every x
    (take u = 0), with equality at any supergradient of g at 0.
    """
    origin = np.zeros(m.dimension)
    if m.smooth:
        return float(-m.evaluate(origin)), np.asarray(m.gradient(origin), dtype=float)
    split = m.canonical_split()
    if split is None or split.smooth is None:
        raise NotSmooth("conjugate_max needs a gradient oracle")
    # every point of Q is a supergradient of psi_Q at 0
    point = np.asarray(split.smooth.gradient(origin), dtype=float) + np.array(split.polytope.vertices[0], dtype=float)
    return float(-m.evaluate(origin)), point


def _monomial_point(e: Sequence[int], l: int) -> Tuple[Fraction, ...]:
    if int(l) != l or l < 1:
        raise ValueError("Level l must be a positive integer")
    return tuple(Fraction(int(c), int(l)) for c in e)


def log_sup_norm_monomial(m: MetricModel, e: Sequence[int], l: int,
                          opts: Optional[ConjugateOptions] = None) -> float:
    """log ||chi^e||_sup for the l-th power metric: -l * g_check(e/l)."""
    return -l * conjugate_eval(m, _monomial_point(e, l), opts).value


def sup_norm_monomial(m: MetricModel, e: Sequence[int], l: int,
                      opts: Optional[ConjugateOptions] = None) -> float:
    return math.exp(log_sup_norm_monomial(m, e, l, opts))


def fenchel_young_residual(m: MetricModel, x: Sequence, u: Sequence,
                           opts: Optional[ConjugateOptions] = None) -> float:
    """<x, u> - g(u) - g_check(x); nonnegative up to solver tolerance."""
    xf = np.array([float(c) for c in x])
    uf = np.asarray(u, dtype=float)
    return float(xf @ uf - m.evaluate(uf) - conjugate_eval(m, x, opts).value)


def conjugate_grid(m: MetricModel, resolution: int = 20,
                   opts: Optional[ConjugateOptions] = None) -> pd.DataFrame:
    """
    Conjugate values on the points of the bounding-box grid with the given
    number of steps per axis that lie in the polytope.
    """
    if resolution < 1:
        raise ValueError("Grid resolution must be positive")
    polytope = m.reference_polytope
    axes = []
    for axis in range(m.dimension):
        lo = min(v[axis] for v in polytope.vertices)
        hi = max(v[axis] for v in polytope.vertices)
        axes.append([lo + (hi - lo) * Fraction(k, resolution) for k in range(resolution + 1)])
    mesh = np.meshgrid(*[np.arange(len(a)) for a in axes], indexing='ij')
    indices = np.stack([g.ravel() for g in mesh], axis=1)
    points = [tuple(axes[a][i] for a, i in enumerate(row)) for row in indices]
    points = sorted(p for p in dict.fromkeys(points) if polytope.contains(p))

    values, converged = conjugate_batch(m, np.array(points, dtype=float), opts, return_status=True)
    frame = pd.DataFrame(np.array(points, dtype=float), columns=[f'x{i + 1}' for i in range(m.dimension)])
    frame['conjugate'] = values
    frame['converged'] = converged
    frame['in_theta'] = values >= 0
    return frame
