"""
Django settings for the SecureV2V project.
"""

from decouple import config

DEBUG = config('DEBUG', default=False, cast=bool)

# Application definition
INSTALLED_APPS = [
    # Third party apps
    'rest_framework',

    # Local apps
    'apps.system_model',
    'apps.fading',
    'apps.sinr',
    'apps.numerics',
    'apps.secrecy',
    'apps.montecarlo',
    'apps.optimizer',
    'apps.experiments',
]

# No persistence: every result is written to CSV
DATABASES = {}

# Internationalization
LANGUAGE_CODE = 'en-us'
TIME_ZONE = 'UTC'
USE_I18N = False
USE_TZ = True

# Numerical integration
QUADRATURE_REL_TOL = config('QUADRATURE_REL_TOL', default=1e-8, cast=float)
QUADRATURE_LIMIT = config('QUADRATURE_LIMIT', default=200, cast=int)

# Relative gap below which two rates are treated as equal (removable singularities)
DEGENERATE_REL_TOL = config('DEGENERATE_REL_TOL', default=1e-6, cast=float)

# Monte Carlo
MC_ANALYSIS_REALIZATIONS = config('MC_ANALYSIS_REALIZATIONS', default=1_000_000, cast=int)
MC_OPTIMIZER_REALIZATIONS = config('MC_OPTIMIZER_REALIZATIONS', default=10_000, cast=int)
MC_CHUNK_SIZE = config('MC_CHUNK_SIZE', default=65_536, cast=int)
MC_WORKERS = config('MC_WORKERS', default=1, cast=int)
DEFAULT_SEED = config('DEFAULT_SEED', default=20201, cast=int)

# Secrecy sum rate optimizer
SCA_EPS = config('SCA_EPS', default=1e-4, cast=float)
SCA_MAX_ITER = config('SCA_MAX_ITER', default=50, cast=int)
SCA_RANDOM_STARTS = config('SCA_RANDOM_STARTS', default=4, cast=int)
SUBPROBLEM_COARSE_STEP = config('SUBPROBLEM_COARSE_STEP', default=0.02, cast=float)
SUBPROBLEM_TOL = config('SUBPROBLEM_TOL', default=1e-7, cast=float)

# CSV output
CSV_SIGNIFICANT_DIGITS = config('CSV_SIGNIFICANT_DIGITS', default=12, cast=int)

# Celery: sweep points run in-process unless a broker is configured
CELERY_BROKER_URL = config('CELERY_BROKER_URL', default='memory://')
CELERY_RESULT_BACKEND = config('CELERY_RESULT_BACKEND', default='cache+memory://')
CELERY_TASK_ALWAYS_EAGER = config('CELERY_TASK_ALWAYS_EAGER', default=True, cast=bool)
CELERY_TASK_EAGER_PROPAGATES = True
CELERY_ACCEPT_CONTENT = ['json']
CELERY_TASK_SERIALIZER = 'json'
CELERY_RESULT_SERIALIZER = 'json'
CELERY_TIMEZONE = TIME_ZONE

# Logging
LOG_LEVEL = config('LOG_LEVEL', default='INFO')

LOGGING = {
    'version': 1,
    'disable_existing_loggers': False,
    'formatters': {
        'verbose': {
            'format': '{asctime} {levelname} {name} {message}',
            'style': '{',
        },
    },
    'handlers': {
        'console': {
            'class': 'logging.StreamHandler',
            'formatter': 'verbose',
        },
    },
    'loggers': {
        'apps': {
            'handlers': ['console'],
            'level': LOG_LEVEL,
            'propagate': False,
        },
    },
}
