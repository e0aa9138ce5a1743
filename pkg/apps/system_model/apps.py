from django.apps import AppConfig


class SystemModelConfig(AppConfig):
    default_auto_field = 'django.db.models.BigAutoField'
    name = 'apps.system_model'
    verbose_name = 'System Model'
