from django.apps import AppConfig


class SectionsCountingConfig(AppConfig):
    default_auto_field = 'django.db.models.BigAutoField'
    name = 'sections_counting'
    verbose_name = 'Sections and Counting'
