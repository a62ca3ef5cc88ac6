from .k_scan import Command  # noqa: F401
