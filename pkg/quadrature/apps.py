from django.apps import AppConfig


class QuadratureConfig(AppConfig):
    default_auto_field = 'django.db.models.BigAutoField'
    name = 'quadrature'
    verbose_name = 'Quadrature'
