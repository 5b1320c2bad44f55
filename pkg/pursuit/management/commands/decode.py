import time

from pursuit.core import SparseSignal
from pursuit.decoder import chaining_pursuit_proper, recover
from pursuit.management.base import PursuitCommand
from pursuit.metrics import recovery_report
from pursuit.serializers import RecoveryReportSerializer
from pursuit.signals import read_signal, write_signal
from pursuit.sketcher import load_sketch


class Command(PursuitCommand):
    help = "Recover a signal from a sketch file with Chaining Pursuit"

    def add_arguments(self, parser):
        parser.add_argument("sketch", help="sketch file to decode")
        parser.add_argument("matrix", help="matrix file the sketch was built with")
        parser.add_argument(
            "--m", type=int, help="output terms (default: the matrix's m)"
        )
        parser.add_argument("--out", help="signal file to write (default: stdout)")
        parser.add_argument("--truth", help="signal file to compare against")
        parser.add_argument(
            "--proper",
            action="store_true",
            help="return every spike the passes found, without pruning to m terms",
        )

    def handle(self, *args, **options):
        matrix = self.read_matrix(options["matrix"])
        with open(options["sketch"], "rb") as stream:
            sketch = load_sketch(stream.read(), matrix)
        m = options["m"] if options["m"] is not None else matrix.params.m

        started = time.perf_counter()
        if options["proper"]:
            spikes = chaining_pursuit_proper(sketch, matrix)
            estimate = SparseSignal(matrix.dimension, dict(spikes))
        else:
            estimate = recover(sketch, matrix, m)
        decode_ms = (time.perf_counter() - started) * 1000

        if options["out"]:
            with open(options["out"], "w", encoding="utf-8") as stream:
                write_signal(estimate, stream)
        else:
            write_signal(estimate, self.stdout)

        if options["truth"]:
            with open(options["truth"], encoding="utf-8") as stream:
                truth = read_signal(stream)
            report = recovery_report(
                truth,
                estimate,
                m,
                {"decode_ms": decode_ms},
                a=matrix.params.a,
                seed=matrix.params.seed,
                sketch_bytes=sketch.nbytes,
            )
            for name, value in RecoveryReportSerializer(report).data.items():
                self.stderr.write(f"{name}\t{value}")
