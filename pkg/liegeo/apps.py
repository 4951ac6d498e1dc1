from django.apps import AppConfig


class LiegeoConfig(AppConfig):
    default_auto_field = 'django.db.models.BigAutoField'
    name = 'liegeo'
    verbose_name = "Lie sphere geometry"
