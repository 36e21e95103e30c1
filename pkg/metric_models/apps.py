from django.apps import AppConfig


class MetricModelsConfig(AppConfig):
    default_auto_field = 'django.db.models.BigAutoField'
    name = 'metric_models'
    verbose_name = 'Metric Models'
