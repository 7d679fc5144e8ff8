from django.apps import AppConfig


class NNConfig(AppConfig):
    default_auto_field = 'django.db.models.BigAutoField'
    name = 'nn'
    verbose_name = 'Layer toolkit'
