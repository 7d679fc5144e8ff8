from django.apps import AppConfig


class TreeCutConfig(AppConfig):
    default_auto_field = 'django.db.models.BigAutoField'
    name = 'treecut'
