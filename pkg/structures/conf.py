"""Access to the WORKBENCH budgets in settings."""

from django.conf import settings


def workbench_setting(name: str, override=None):
    """``override`` when given, otherwise settings.WORKBENCH[name]."""
    if override is not None:
        return override
    return settings.WORKBENCH[name]
