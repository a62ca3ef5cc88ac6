from .null_calibrate import Command  # noqa: F401
