from trends.pipeline import PIPELINES

from ._base import PipelineCommand


class Command(PipelineCommand):
    help = (
        "Run the experiment selected by the configuration's mode "
        "(preis_single, preis_ensemble or learner)."
    )

    def run(self, cfg):
        return PIPELINES[cfg.mode](cfg)
