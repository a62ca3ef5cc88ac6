import os

import django

os.environ.setdefault("DJANGO_SETTINGS_MODULE", "trendsite.settings")
django.setup()
