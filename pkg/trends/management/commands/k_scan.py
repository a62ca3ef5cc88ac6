from trends.pipeline import run_k_scan

from ._base import PipelineCommand


class Command(PipelineCommand):
    help = "Report the t-stat of the moving-average rule for every k in k_range, per keyword."

    def run(self, cfg):
        return run_k_scan(cfg)
