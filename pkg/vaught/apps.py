from django.apps import AppConfig


class VaughtConfig(AppConfig):
    name = 'vaught'
    verbose_name = 'Vaught transforms'
