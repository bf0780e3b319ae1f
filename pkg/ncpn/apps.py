from django.apps import AppConfig


class NcpnConfig(AppConfig):
    default_auto_field = 'django.db.models.BigAutoField'
    name = 'ncpn'
    verbose_name = 'Noncommutative Poisson-Nijenhuis engine'
