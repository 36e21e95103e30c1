from django.apps import AppConfig


class LatticeCoreConfig(AppConfig):
    default_auto_field = 'django.db.models.BigAutoField'
    name = 'lattice_core'
    verbose_name = 'Lattice polytopes and fans'
