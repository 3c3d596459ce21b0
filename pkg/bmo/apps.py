from django.apps import AppConfig


class BmoConfig(AppConfig):
    default_auto_field = 'django.db.models.BigAutoField'
    name = 'bmo'
    verbose_name = 'Butterfly Mating Optimization'
