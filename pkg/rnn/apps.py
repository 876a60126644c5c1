from django.apps import AppConfig


class RnnAppConfig(AppConfig):
    default_auto_field = "django.db.models.BigAutoField"
    name = "rnn"
