__version__ = '1.0.0'

# Import the Celery app whenever Django starts so sweep tasks bind to it.
try:
    from .celery import app as celery_app
    __all__ = ('celery_app', '__version__')
except ImportError:
    celery_app = None
    __all__ = ('__version__',)
