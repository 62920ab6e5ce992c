"""
Django settings for vaught_forge project.

Vaught Forge - a workbench for continuous infinitary logic over finite
coded metric structures.
"""

import os
from pathlib import Path

from dotenv import load_dotenv

# Build paths inside the project like this: BASE_DIR / 'subdir'.
BASE_DIR = Path(__file__).resolve().parent.parent

# Optional local overrides (budgets, log level) live in .env
load_dotenv(BASE_DIR / '.env')


# No web surface is served; the key only satisfies Django's checks.
SECRET_KEY = os.environ.get('DJANGO_SECRET_KEY', 'vaught-forge-batch-only')

DEBUG = os.environ.get('DJANGO_DEBUG', 'False').lower() == 'true'

ALLOWED_HOSTS = []


# Application definition

INSTALLED_APPS = [
    # Local apps
    'structures',
    'formulas',
    'vaught',
    'synthesis',
    'scott_gh',
    'cli',
]


# Database
# Everything is computed from files; nothing is persisted.

DATABASES = {}


# Internationalization

LANGUAGE_CODE = 'en-us'

TIME_ZONE = 'UTC'

USE_I18N = False

USE_TZ = True


# Logging
# One console handler; each module logs through logging.getLogger(__name__).

LOGGING = {
    'version': 1,
    'disable_existing_loggers': False,
    'formatters': {
        'plain': {
            'format': '%(levelname)s %(name)s: %(message)s',
        },
    },
    'handlers': {
        'console': {
            'class': 'logging.StreamHandler',
            'formatter': 'plain',
        },
    },
    'root': {
        'handlers': ['console'],
        'level': os.environ.get('CLW_LOG_LEVEL', 'WARNING'),
    },
}


# =============================================================================
# Workbench specific settings
# =============================================================================

# Enumeration and search budgets. Exceeding one is always an explicit error.
WORKBENCH = {
    # Max tuples enumerated by the Vaught oracle (points ** length)
    'TUPLE_BUDGET': int(os.environ.get('CLW_BUDGET', 10 ** 7)),
    # Highest back-and-forth stage computed before giving up on stabilization
    'ALPHA_CEILING': 16,
    # Max pair-sets (2 ** (|X| * |Y|)) held in a rank table
    'RANK_SUBSET_BUDGET': 2 ** 20,
    # Max search nodes visited by the correspondence search
    'CORRESPONDENCE_BUDGET': 2 * 10 ** 6,
    # Uncertified prefix length for negation joins
    'NEG_PREFIX': 6,
    # Exhaustive Lipschitz audits
    'AUDIT_MAX_FREE_VARIABLES': 3,
    'AUDIT_MAX_POINTS': 6,
}
