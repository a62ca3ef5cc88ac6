from pathlib import Path
import os
from dotenv import load_dotenv

load_dotenv()

# Build paths inside the project like this: BASE_DIR / 'subdir'.
BASE_DIR = Path(__file__).resolve().parent.parent

# Quick-start development settings - unsuitable for production
# See https://docs.djangoproject.com/en/5.0/howto/deployment/checklist/

# SECURITY WARNING: keep the secret key used in production secret!
SECRET_KEY = os.getenv(
    "DJANGO_SECRET_KEY", "django-insecure-trends-batch-engine-no-web-surface"
)

# SECURITY WARNING: don't run with debug turned on in production!
DEBUG = os.getenv("DEBUG", "False") == "True"

ALLOWED_HOSTS = []

# Application definition

INSTALLED_APPS = [
    "trends",
]

# The engine is a batch tool: inputs and outputs are CSV/JSON files,
# nothing is persisted in a database.
DATABASES = {}


# Internationalization
# https://docs.djangoproject.com/en/5.0/topics/i18n/

LANGUAGE_CODE = "en-us"

TIME_ZONE = "UTC"

USE_I18N = False

USE_TZ = True


# Logging
# https://docs.djangoproject.com/en/5.0/topics/logging/

TRENDS_LOG_LEVEL = os.getenv("TRENDS_LOG_LEVEL", "INFO")

LOGGING = {
    "version": 1,
    "disable_existing_loggers": False,
    "formatters": {
        "plain": {
            "format": "{asctime} {levelname} {name}: {message}",
            "style": "{",
        },
    },
    "handlers": {
        "console": {
            "class": "logging.StreamHandler",
            "formatter": "plain",
            # stderr carries the JSON error records of the commands
            "stream": "ext://sys.stdout",
        },
    },
    "loggers": {
        "trends": {
            "handlers": ["console"],
            "level": TRENDS_LOG_LEVEL,
            "propagate": False,
        },
    },
}


# trends engine defaults (override in .env)
TRENDS = {
    "COST_BPS": float(os.getenv("TRENDS_COST_BPS", "2")),
    "THREADS": int(os.getenv("TRENDS_THREADS", "1")),
    "OUTPUT_DIR": os.getenv("TRENDS_OUTPUT_DIR", os.path.join(BASE_DIR, "output")),
    "KEYWORD_DIR": os.path.join(BASE_DIR, "trends", "keywords"),
}
