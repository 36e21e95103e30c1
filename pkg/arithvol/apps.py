from django.apps import AppConfig


class ArithvolConfig(AppConfig):
    default_auto_field = 'django.db.models.BigAutoField'
    name = 'arithvol'
    verbose_name = 'Arithmetic Volumes'
