"""
Django settings for bathfit project.

The project hosts a single app, bath_modes, which turns a bosonic bath
spectral density into a small set of discrete modes. There is no web
surface and no database: Django provides settings, logging and the
management-command CLI.

For the full list of settings and their values, see
https://docs.djangoproject.com/en/5.2/ref/settings/
"""

from pathlib import Path
from dotenv import load_dotenv
import os
# Build paths inside the project like this: BASE_DIR / 'subdir'.
BASE_DIR = Path(__file__).resolve().parent.parent

load_dotenv(os.path.join(BASE_DIR, '.env'))

# Only used by Django internals (signing); nothing here is served.
SECRET_KEY = os.environ.get('SECRET_KEY', 'bathfit-local-only-key')

DEBUG = os.environ.get('BATHFIT_DEBUG', '0') == '1'

ALLOWED_HOSTS = []

# Application definition

INSTALLED_APPS = [
    'django.contrib.contenttypes',

    #My installed apps
    'rest_framework',
    'bath_modes',
]

# No persistence beyond flat files
DATABASES = {}

REST_FRAMEWORK = {
    'DEFAULT_RENDERER_CLASSES': [
        'rest_framework.renderers.JSONRenderer',
    ],
    'DEFAULT_PARSER_CLASSES': [
        'rest_framework.parsers.JSONParser',
    ],
    # Mode tables must round-trip floats exactly
    'COERCE_DECIMAL_TO_STRING': False,
}

# Internationalization
LANGUAGE_CODE = 'en-us'

TIME_ZONE = 'UTC'

USE_I18N = False

USE_TZ = True


# Bath discretization defaults (cm^-1 / fs / K throughout)
BATH_MODES = {
    'ORACLE_TOL': float(os.environ.get('BATHFIT_ORACLE_TOL', 1e-10)),
    'WORKERS': int(os.environ.get('BATHFIT_WORKERS', 1)),
    'OUTPUT_DIR': os.environ.get('BATHFIT_OUTPUT_DIR', str(BASE_DIR / 'bath_output')),
    'VERIFICATION_POINTS': int(os.environ.get('BATHFIT_VERIFICATION_POINTS', 2000)),
    'LOG_LEVEL': os.environ.get('BATHFIT_LOG_LEVEL', 'INFO'),
}

LOGGING = {
    'version': 1,
    'disable_existing_loggers': False,
    'formatters': {
        'plain': {
            'format': '{levelname} {name}: {message}',
            'style': '{',
        },
    },
    'handlers': {
        'console': {
            'class': 'logging.StreamHandler',
            'formatter': 'plain',
        },
    },
    'loggers': {
        'bath_modes': {
            'handlers': ['console'],
            'level': BATH_MODES['LOG_LEVEL'],
            'propagate': False,
        },
    },
}
