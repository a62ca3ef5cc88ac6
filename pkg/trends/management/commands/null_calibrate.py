from trends.pipeline import run_null_calibration

from ._base import PipelineCommand


class Command(PipelineCommand):
    help = (
        "Backtest the moving-average rule on every keyword of the configured sets "
        "and report how often |t| exceeds the threshold."
    )

    def run(self, cfg):
        return run_null_calibration(cfg)
