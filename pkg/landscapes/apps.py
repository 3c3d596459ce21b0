from django.apps import AppConfig


class LandscapesConfig(AppConfig):
    default_auto_field = 'django.db.models.BigAutoField'
    name = 'landscapes'
    verbose_name = 'Fitness landscapes'
