INSTALLED_APPS = [
    "rest_framework",
]

USE_I18N = True
