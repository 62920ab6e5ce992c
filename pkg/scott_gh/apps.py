from django.apps import AppConfig


class ScottGhConfig(AppConfig):
    name = 'scott_gh'
    verbose_name = 'Back-and-forth ranks and Gromov-Hausdorff distance'
