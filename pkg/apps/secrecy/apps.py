from django.apps import AppConfig


class SecrecyConfig(AppConfig):
    default_auto_field = 'django.db.models.BigAutoField'
    name = 'apps.secrecy'
    verbose_name = 'Secrecy Analysis'
