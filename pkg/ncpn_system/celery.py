import os
from celery import Celery

os.environ.setdefault('DJANGO_SETTINGS_MODULE', 'ncpn_system.settings')

app = Celery('ncpn_system')
app.config_from_object('django.conf:settings', namespace='CELERY')
app.autodiscover_tasks()
