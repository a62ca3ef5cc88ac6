from trends.pipeline import run_ensemble

from ._base import PipelineCommand


class Command(PipelineCommand):
    help = (
        "Backtest the equal-weight ensemble of moving-average rules "
        "over every keyword and k of each set."
    )

    def run(self, cfg):
        return run_ensemble(cfg)
