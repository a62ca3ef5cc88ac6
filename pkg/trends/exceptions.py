"""
Error catalogue for the trends engine.

Every error carries a stable code (machine readable, emitted on the command
line as JSON lines) and a message that tells the user what went wrong and,
where it helps, how to resolve it.
"""


class TrendsError(Exception):
    """
    Base class of every error raised by the engine.

    Attributes:
    code (str): Stable identifier of the error kind.
    message (str): Human readable description.
    context (dict): Extra fields describing the offending input.
    exit_code (int): Process exit status used by the management commands.
    """

    code = "trends_error"
    exit_code = 1

    def __init__(self, message, **context):
        super().__init__(message)
        self.message = message
        self.context = context

    def records(self):
        """Returns the error as a list of JSON-serialisable records."""
        return [{"code": self.code, "message": self.message, **self.context}]


class SeriesError(TrendsError):
    code = "series_error"


class IngestError(TrendsError):
    code = "ingest_error"


class StrategyError(TrendsError):
    code = "strategy_error"


class FeatureError(TrendsError):
    code = "feature_error"


class LearnerError(TrendsError):
    code = "learner_error"


class LedgerError(TrendsError):
    code = "ledger_error"


class StatsError(TrendsError):
    code = "stats_error"


class _ErrorListMixin:
    """Carries a list of error records so that validation reports everything at once."""

    def __init__(self, message, errors=None, **context):
        super().__init__(message, **context)
        self.errors = list(errors or [])

    def records(self):
        if not self.errors:
            return super().records()
        return [{"code": self.code, **error} for error in self.errors]


class ConfigError(_ErrorListMixin, TrendsError):
    code = "config_error"
    exit_code = 2


class InputError(_ErrorListMixin, TrendsError):
    code = "input_error"
    exit_code = 2
