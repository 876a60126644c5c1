from django.apps import AppConfig


class ForestConfig(AppConfig):
    default_auto_field = "django.db.models.BigAutoField"
    name = "forest"
