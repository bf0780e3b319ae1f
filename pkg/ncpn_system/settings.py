import os
from pathlib import Path
from dotenv import load_dotenv

load_dotenv()

# Base Directory
BASE_DIR = Path(__file__).resolve().parent.parent

# Security
SECRET_KEY = os.getenv('SECRET_KEY', 'ncpn-local-secret-key')
DEBUG = int(os.getenv('DEBUG', default=0))
ALLOWED_HOSTS = os.getenv('DJANGO_ALLOWED_HOSTS', 'localhost').split(' ')

# Applications
INSTALLED_APPS = [
    # Django apps
    'django.contrib.contenttypes',
    # Third-party apps
    'rest_framework',
    # Local apps
    'ncpn',
]

# No model layer
DATABASES = {}

# Internationalization
LANGUAGE_CODE = 'en-us'
TIME_ZONE = 'UTC'
USE_I18N = False
USE_TZ = True

DEFAULT_AUTO_FIELD = 'django.db.models.BigAutoField'

# REST Framework (serializers and renderers only)
REST_FRAMEWORK = {
    'DEFAULT_RENDERER_CLASSES': [
        'rest_framework.renderers.JSONRenderer',
    ],
    'UNAUTHENTICATED_USER': None,
}

# Engine
NCPN = {
    'BOUND': int(os.getenv('NCPN_BOUND', 3)),
    'DEPTH': int(os.getenv('NCPN_DEPTH', 4)),
    'SEED': int(os.getenv('NCPN_SEED', 0)),
    'FORMAT': os.getenv('NCPN_FORMAT', 'text'),
    'POINTS': int(os.getenv('NCPN_POINTS', 20)),
    'CONJUGATIONS': int(os.getenv('NCPN_CONJUGATIONS', 5)),
    'CHUNK_SIZE': int(os.getenv('NCPN_CHUNK_SIZE', 64)),
    'LINKS': int(os.getenv('NCPN_LINKS', 4)),
}

# Celery Configuration
CELERY_BROKER_URL = os.getenv('CELERY_BROKER_URL', 'redis://redis:6379/0')
CELERY_RESULT_BACKEND = os.getenv('CELERY_RESULT_BACKEND', 'redis://redis:6379/0')
CELERY_ACCEPT_CONTENT = ['json']
CELERY_TASK_SERIALIZER = 'json'
CELERY_RESULT_SERIALIZER = 'json'
CELERY_TIMEZONE = 'UTC'
CELERY_TASK_TRACK_STARTED = True
CELERY_TASK_TIME_LIMIT = 30 * 60  # 30 minutes
# Sweeps run in-process unless a worker pool is configured
CELERY_TASK_ALWAYS_EAGER = bool(int(os.getenv('CELERY_TASK_ALWAYS_EAGER', 1)))
CELERY_TASK_EAGER_PROPAGATES = True

# Logging Configuration
LOGGING = {
    'version': 1,
    'disable_existing_loggers': False,
    'formatters': {
        'verbose': {
            'format': '{levelname} {asctime} {module} {message}',
            'style': '{',
        },
        'simple': {
            'format': '{levelname} {message}',
            'style': '{',
        },
    },
    'handlers': {
        'console': {
            'class': 'logging.StreamHandler',
            'formatter': 'simple',
        },
        'file': {
            'class': 'logging.FileHandler',
            'filename': BASE_DIR / 'ncpn.log',
            'formatter': 'verbose',
        },
    },
    'loggers': {
        'django': {
            'handlers': ['console'],
            'level': 'INFO',
        },
        'ncpn': {
            'handlers': ['console', 'file'],
            'level': 'DEBUG' if DEBUG else os.getenv('NCPN_LOG_LEVEL', 'INFO'),
            'propagate': False,
        },
    },
}
