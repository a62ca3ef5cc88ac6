import json
import logging

from django.core.management.base import BaseCommand
from django.core.serializers.json import DjangoJSONEncoder

from trends.config import load_run_config
from trends.exceptions import TrendsError

logger = logging.getLogger(__name__)


class PipelineCommand(BaseCommand):
    """
    Shared surface of the batch commands.

    Subclasses implement run(cfg) and return the written report paths. Errors
    are written to stderr as JSON lines, one record per line, and the
    process exits with the error's exit code (2 for configuration and input
    errors, 1 for computation errors). Log records go to stdout, so stderr
    holds nothing but the error records.
    """

    requires_system_checks = []

    def add_arguments(self, parser):
        parser.add_argument("--config", required=True, help="YAML run configuration.")
        parser.add_argument("--seed", type=int, help="Overrides walk_forward.seed.")
        parser.add_argument(
            "--threads", type=int, help="Worker threads (results do not depend on it)."
        )
        parser.add_argument("--output", help="Overrides output_dir.")

    def run(self, cfg):
        raise NotImplementedError

    def handle(self, *args, **options):
        try:
            cfg = load_run_config(
                options["config"],
                seed=options["seed"],
                threads=options["threads"],
                output=options["output"],
            )
            written = self.run(cfg)
        except TrendsError as exc:
            logger.error("%s failed: %s", self.__module__.rsplit(".", 1)[-1], exc.message)
            for record in exc.records():
                self.stderr.write(
                    json.dumps(record, cls=DjangoJSONEncoder, sort_keys=True),
                    style_func=lambda message: message,
                )
            raise SystemExit(exc.exit_code)

        self.stdout.write(
            self.style.SUCCESS(f"{len(written)} report file(s) written to {cfg.output_dir}")
        )
