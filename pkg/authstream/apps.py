from django.apps import AppConfig


class AuthstreamConfig(AppConfig):
    default_auto_field = "django.db.models.BigAutoField"
    name = "authstream"
