from trends.pipeline import run_stitch

from ._base import PipelineCommand


class Command(PipelineCommand):
    help = "Stitch overlapping SVI export windows into one series per keyword."

    def run(self, cfg):
        return run_stitch(cfg)
