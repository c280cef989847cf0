from django.apps import AppConfig


class BathModesConfig(AppConfig):
    name = 'bath_modes'
    verbose_name = 'Bath mode discretization'
