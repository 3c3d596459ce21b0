from pathlib import Path
import environ

# Load environment variables
env = environ.Env()
environ.Env.read_env()

BASE_DIR = Path(__file__).resolve().parent.parent

# Security & Debug
SECRET_KEY = env("DJANGO_SECRET_KEY", default="bflyflow-dev-only-insecure-key")
DEBUG = env.bool("DEBUG", default=True)

ALLOWED_HOSTS = ['localhost', '127.0.0.1']

INSTALLED_APPS = [
    'django.contrib.admin',
    'django.contrib.auth',
    'django.contrib.contenttypes',
    'django.contrib.sessions',
    'django.contrib.messages',
    'bmo',
    'landscapes',
    'scenarios',
    'simulation',
    'harness',
    'django_tasks',
]

MIDDLEWARE = [
    'django.middleware.security.SecurityMiddleware',
    'django.contrib.sessions.middleware.SessionMiddleware',
    'django.middleware.common.CommonMiddleware',
    'django.middleware.csrf.CsrfViewMiddleware',
    'django.contrib.auth.middleware.AuthenticationMiddleware',
    'django.contrib.messages.middleware.MessageMiddleware',
]

ROOT_URLCONF = 'core.urls'

TEMPLATES = [
    {
        'BACKEND': 'django.template.backends.django.DjangoTemplates',
        'DIRS': [],
        'APP_DIRS': True,
        'OPTIONS': {
            'context_processors': [
                'django.template.context_processors.request',
                'django.contrib.auth.context_processors.auth',
                'django.contrib.messages.context_processors.messages',
            ],
        },
    },
]

# Database: recorded experiment runs only. Plain `bmo run` never touches it.
DATABASES = {
    'default': env.db_url("DATABASE_URL", default=f"sqlite:///{BASE_DIR / 'db.sqlite3'}"),
}

LANGUAGE_CODE = 'en-us'
TIME_ZONE = 'UTC'
USE_I18N = True
USE_TZ = True

DEFAULT_AUTO_FIELD = 'django.db.models.BigAutoField'

# Experiment harness
BMO_MAX_THREADS = max(1, env.int("BMO_MAX_THREADS", default=4))
BMO_OUTPUT_DIR = Path(env("BMO_OUTPUT_DIR", default=str(BASE_DIR / "runs")))
BMO_SCENARIO_DIR = BASE_DIR / "harness" / "scenarios"
BMO_LOG_LEVEL = env("BMO_LOG_LEVEL", default="INFO")

LOGGING = {
    'version': 1,
    'disable_existing_loggers': False,  # allows Django default logs
    'formatters': {
        'simple': {
            'format': '{asctime} {levelname} {name} {message}',
            'style': '{',
        },
    },
    'handlers': {
        'console': {
            'class': 'logging.StreamHandler',
            'stream': 'ext://sys.stdout',
            'formatter': 'simple',
        },
    },
    'root': {
        'handlers': ['console'],
        'level': 'WARNING',
    },
    'loggers': {
        'django': {
            'handlers': ['console'],
            'level': 'INFO',
            'propagate': False,
        },
        'bflyflow': {
            'handlers': ['console'],
            'level': BMO_LOG_LEVEL,
            'propagate': False,
        },
    },
}

# Background tasks: immediate backend, so a run_scenario_batch task runs
# synchronously when enqueued. `bmo batch` calls run_batch directly.
TASKS = {
    "default": {
        "BACKEND": "django_tasks.backends.immediate.ImmediateBackend",
    }
}
