"""
Django settings for the mousetrust project.

The project has no web surface: Django provides the settings layer, the logging
configuration and the management-command CLI (see cli/management/commands/).
"""

from dotenv import load_dotenv
import os
from pathlib import Path

# .env sits in gitignored/ at the project root
dotenv_path = os.path.join(os.path.dirname(os.path.dirname(__file__)), 'gitignored', '.env')
load_dotenv(dotenv_path)


# Build paths inside the project like this: BASE_DIR / 'subdir'.
BASE_DIR = Path(__file__).resolve().parent.parent


# Use .env file to set project environment, with 'development' as the fallback
SECRET_KEY = os.getenv('SECRET_KEY', 'mousetrust-local-only-key')
PROJECT_ENV = os.getenv('ENVIRONMENT', 'development')

# Set app mode according to setting in .env above
if PROJECT_ENV == 'testing':
    from .configs_project.config_testing import *
elif PROJECT_ENV == 'production':
    from .configs_project.config_prod import *
else:
    from .configs_project.config_dev import *


# Application definition
INSTALLED_APPS = [
    # Apps created for this project
    'utils', # Shared errors, seed derivation, JSON helpers
    'ingest', # Mouse event files: parsing, cleaning
    'features', # Kinematics, 9-feature frames, normalization
    'windows', # Sequencing, labeling, cross-validation folds
    'rnn', # GRU / LSTM sequence classifiers
    'forest', # CART decision tree and random forest
    'metrics', # ROC, AUC, F1, evaluation reports
    'synthgen', # Synthetic per-user traces
    'authstream', # Streaming trust decisions
    'cli', # Management commands and the experiment runner
]

# No database is used; everything lives in files.
DATABASES = {}

USE_TZ = True
TIME_ZONE = 'UTC'

DEFAULT_AUTO_FIELD = "django.db.models.BigAutoField"


# Run defaults. Values from .env win over the per-environment config.
MOUSETRUST = {
    'SEED': int(os.getenv('MOUSETRUST_SEED', DEFAULT_SEED)),
    'WORKERS': int(os.getenv('MOUSETRUST_WORKERS', DEFAULT_WORKERS)),
    'OUTPUT_DIR': os.getenv('MOUSETRUST_OUTPUT_DIR', str(BASE_DIR / 'runs')),
}


# Logging configuration
# Ensure the logs directory exists
LOGS_DIR = BASE_DIR / 'logs'
if log_to_file:
    os.makedirs(LOGS_DIR, exist_ok=True)

# Define the log file path
LOG_FILE_PATH = LOGS_DIR / 'mousetrust.log'
LOG_LEVEL = os.getenv('MOUSETRUST_LOG_LEVEL', log_level)

LOGGING = {
    'version': 1,
    'disable_existing_loggers': False,
    'formatters': {
        'verbose': {
            'format': '{levelname} {asctime} {module} {pathname}:{lineno} {message}',
            'style': '{',
        },
    },
    'handlers': {},
    'loggers': {
        'mousetrust': {
            'handlers': [],
            'level': LOG_LEVEL,
            'propagate': False,
        },
        # Decision transitions of the streaming engine, tuned independently of the mousetrust logger
        'auth_decisions': {
            'handlers': [],
            'level': 'INFO',
            'propagate': False,
        },
    },
}

# Add file handler if logging to file is enabled
if log_to_file:
    LOGGING['handlers']['file'] = {
        'level': 'DEBUG',
        'class': 'logging.handlers.RotatingFileHandler',
        'filename': str(LOG_FILE_PATH),
        'maxBytes': 10 * 1024 * 1024,  # 10 MB
        'backupCount': 5,
        'formatter': 'verbose',
    }
    LOGGING['loggers']['mousetrust']['handlers'].append('file')
    LOGGING['loggers']['auth_decisions']['handlers'].append('file')

# Add console handler if logging to the terminal is enabled. StreamHandler writes to stderr,
# which keeps stdout free for command payloads.
if log_to_terminal:
    LOGGING['handlers']['console'] = {
        'level': 'DEBUG',
        'class': 'logging.StreamHandler',
        'formatter': 'verbose',
    }
    LOGGING['loggers']['mousetrust']['handlers'].append('console')
    LOGGING['loggers']['auth_decisions']['handlers'].append('console')
