from django.apps import AppConfig


class ConjugateConfig(AppConfig):
    default_auto_field = 'django.db.models.BigAutoField'
    name = 'conjugate'
    verbose_name = 'Legendre-Fenchel conjugates'
