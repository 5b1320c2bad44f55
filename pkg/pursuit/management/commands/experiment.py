from django.core.management.base import CommandError

from pursuit.experiments import run_sweep, write_reports
from pursuit.management.base import EXIT_VALIDATION, PursuitCommand
from pursuit.serializers import ExperimentSweepSerializer, RecoveryReportSerializer


class Command(PursuitCommand):
    help = "Run gen -> sketch -> decode sweeps and write one CSV row per run"

    def add_arguments(self, parser):
        parser.add_argument(
            "--d", type=int, nargs="+", required=True, dest="dimensions"
        )
        parser.add_argument(
            "--m", type=int, nargs="+", required=True, dest="sparsities"
        )
        parser.add_argument(
            "--noise",
            nargs="+",
            dest="noises",
            help="none, l1:EPS, l1-rel:EPS or weak1:R",
        )
        parser.add_argument(
            "--meas-noise",
            type=float,
            nargs="+",
            dest="meas_noises",
            help="sketch perturbation l1 budget as a fraction of ||f||_1",
        )
        parser.add_argument("--runs", type=int, default=1)
        parser.add_argument("--workers", type=int, default=1)
        parser.add_argument("--integer", action="store_true")
        self.add_option_arguments(parser)
        parser.add_argument("--k-rep", type=int, dest="k_rep")
        parser.add_argument("--out", required=True, help="CSV file to write")

    def handle(self, *args, **options):
        serializer = ExperimentSweepSerializer(
            data=self.given(
                options,
                "dimensions",
                "sparsities",
                "noises",
                "meas_noises",
                "runs",
                "workers",
                "integer",
                "a",
                "c_trials",
                "c_buckets",
                "retention",
                "mode",
                "seed",
                "k_rep",
            )
        )
        serializer.is_valid(raise_exception=True)
        cells = serializer.save()

        try:
            stream = open(options["out"], "w", encoding="utf-8", newline="")
        except OSError as error:
            raise CommandError(
                f"cannot write {options['out']}: {error}", returncode=EXIT_VALIDATION
            )
        with stream:
            results = run_sweep(cells, serializer.validated_data["workers"])
            rows = [
                row
                for _, reports in results
                for row in RecoveryReportSerializer(reports, many=True).data
            ]
            write_reports(rows, stream)
        self.stdout.write(
            f"{len(rows)} runs over {len(cells)} cells written to {options['out']}"
        )
