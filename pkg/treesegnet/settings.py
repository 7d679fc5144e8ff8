"""
Django settings for the treesegnet project.
"""

import os
from pathlib import Path
from dotenv import load_dotenv

# Load environment variables
load_dotenv()

# Build paths inside the project like this: BASE_DIR / 'subdir'.
BASE_DIR = Path(__file__).resolve().parent.parent

# SECURITY WARNING: keep the secret key used in production secret!
SECRET_KEY = os.getenv('SECRET_KEY', 'treesegnet-insecure-default-key-change-me')

DEBUG = os.getenv('DEBUG', 'False') == 'True'

ALLOWED_HOSTS = os.getenv('ALLOWED_HOSTS', 'localhost,127.0.0.1').split(',')

# Application definition
INSTALLED_APPS = [
    # Local apps
    'metrics',
    'treecut',
    'geometry',
    'dataset',
    'nn',
    'network',
    'trainer',
    'pipeline',
]

# Database
DATABASES = {
    'default': {
        'ENGINE': os.getenv('DB_ENGINE', 'django.db.backends.sqlite3'),
        'NAME': os.getenv('DB_NAME', BASE_DIR / 'db.sqlite3'),
        'USER': os.getenv('DB_USER', ''),
        'PASSWORD': os.getenv('DB_PASSWORD', ''),
        'HOST': os.getenv('DB_HOST', ''),
        'PORT': os.getenv('DB_PORT', ''),
    }
}

# Internationalization
LANGUAGE_CODE = 'en-us'
TIME_ZONE = 'UTC'
USE_I18N = True
USE_TZ = True

# Default primary key field type
DEFAULT_AUTO_FIELD = 'django.db.models.BigAutoField'


def _int_list(value):
    return tuple(int(part) for part in value.split(','))


# Pipeline defaults. Every value can be overridden from the environment here,
# from a JSON run config, or from command flags (flags win).
TREESEGNET = {
    'TILE_SIZE': int(os.getenv('TREESEGNET_TILE_SIZE', '64')),
    'MARGIN': int(os.getenv('TREESEGNET_MARGIN')) if os.getenv('TREESEGNET_MARGIN') else None,  # None = tile // 8
    'SIGMA': float(os.getenv('TREESEGNET_SIGMA', '0.5')),
    'K': int(os.getenv('TREESEGNET_K', '64')),
    'DEPTH': int(os.getenv('TREESEGNET_DEPTH', '3')),
    'BASE_CHANNELS': _int_list(os.getenv('TREESEGNET_BASE_CHANNELS', '16,32,64')),
    'CARDINALITY': int(os.getenv('TREESEGNET_CARDINALITY', '8')),
    'BOTTLENECK': int(os.getenv('TREESEGNET_BOTTLENECK', '32')),
    'UNIT_CHANNELS': int(os.getenv('TREESEGNET_UNIT_CHANNELS', '32')),
    'NUM_CLASSES': 6,
    'EPOCHS': int(os.getenv('TREESEGNET_EPOCHS', '8')),
    'BATCH_SIZE': int(os.getenv('TREESEGNET_BATCH_SIZE', '4')),
    'PASSES': int(os.getenv('TREESEGNET_PASSES', '10')),
    'MOMENTUM': float(os.getenv('TREESEGNET_MOMENTUM', '0.9')),
    'LEARNING_RATE': float(os.getenv('TREESEGNET_LEARNING_RATE', '0.01')),
    'SEED': int(os.getenv('TREESEGNET_SEED', '0')),
    'WORKERS': int(os.getenv('TREESEGNET_WORKERS', '0')),  # 0 = available CPUs
    'DSM_SCALE': float(os.getenv('TREESEGNET_DSM_SCALE', '10.0')),
    'TRAIN_SCENES': int(os.getenv('TREESEGNET_TRAIN_SCENES', '10')),
    'TRAIN_TILES': int(os.getenv('TREESEGNET_TRAIN_TILES', '200')),
    'VAL_SCENES': int(os.getenv('TREESEGNET_VAL_SCENES', '4')),
    'SCENE_SIZE': int(os.getenv('TREESEGNET_SCENE_SIZE', '160')),
    'ROTATE_AUGMENT': os.getenv('TREESEGNET_ROTATE_AUGMENT', 'False') == 'True',
    'RUN_ROOT': Path(os.getenv('TREESEGNET_RUN_ROOT', BASE_DIR / 'runs')),
}

# Logging
LOG_DIR = Path(os.getenv('TREESEGNET_LOG_DIR', BASE_DIR / 'logs'))
LOG_DIR.mkdir(parents=True, exist_ok=True)

LOGGING = {
    'version': 1,
    'disable_existing_loggers': False,
    'formatters': {
        'verbose': {
            'format': '{levelname} {asctime} {module} {process:d} {thread:d} {message}',
            'style': '{',
        },
        'simple': {
            'format': '{levelname} {message}',
            'style': '{',
        },
    },
    'handlers': {
        'file': {
            'level': 'INFO',
            'class': 'logging.FileHandler',
            'filename': LOG_DIR / 'treesegnet.log',
            'formatter': 'verbose',
        },
        'console': {
            'level': os.getenv('TREESEGNET_CONSOLE_LOG_LEVEL', 'WARNING'),
            'class': 'logging.StreamHandler',
            'formatter': 'simple',
        },
    },
    'loggers': {
        'django': {
            'handlers': ['file', 'console'],
            'level': 'INFO',
            'propagate': True,
        },
        'metrics': {
            'handlers': ['file', 'console'],
            'level': 'INFO',
            'propagate': False,
        },
        'treecut': {
            'handlers': ['file', 'console'],
            'level': 'INFO',
            'propagate': False,
        },
        'geometry': {
            'handlers': ['file', 'console'],
            'level': 'INFO',
            'propagate': False,
        },
        'dataset': {
            'handlers': ['file', 'console'],
            'level': 'INFO',
            'propagate': False,
        },
        'nn': {
            'handlers': ['file', 'console'],
            'level': 'INFO',
            'propagate': False,
        },
        'network': {
            'handlers': ['file', 'console'],
            'level': 'INFO',
            'propagate': False,
        },
        'trainer': {
            'handlers': ['file', 'console'],
            'level': 'INFO',
            'propagate': False,
        },
        'pipeline': {
            'handlers': ['file', 'console'],
            'level': 'INFO',
            'propagate': False,
        },
    },
}
