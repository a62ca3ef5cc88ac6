from trends.pipeline import run_learner

from ._base import PipelineCommand


class Command(PipelineCommand):
    help = "Run the walk-forward learner over the universe for every configured feature mode."

    def run(self, cfg):
        return run_learner(cfg)
