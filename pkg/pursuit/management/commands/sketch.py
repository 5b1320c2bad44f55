from pathlib import Path

from pursuit.isolation import build, dump_matrix
from pursuit.management.base import PursuitCommand
from pursuit.signals import read_signal
from pursuit.sketcher import dump_sketch, sketch_signal


class Command(PursuitCommand):
    help = "Build an isolation matrix and sketch a signal file with it"

    def add_arguments(self, parser):
        parser.add_argument("signal", help="signal file to sketch")
        self.add_sketch_arguments(parser, require_dimension=False)
        parser.add_argument("--out", required=True, help="sketch file to write")
        parser.add_argument("--matrix", required=True, help="matrix file to write")

    def handle(self, *args, **options):
        with open(options["signal"], encoding="utf-8") as stream:
            signal = read_signal(stream)
        params = self.sketch_params(options, d=options["d"] or signal.dimension)

        matrix = build(params)
        sketch = sketch_signal(signal, matrix)
        Path(options["matrix"]).write_bytes(dump_matrix(matrix))
        Path(options["out"]).write_bytes(dump_sketch(sketch, matrix))
        self.stdout.write(
            f"sketched {signal.support_size} entries "
            f"into {sketch.scalar_count} scalars "
            f"({sketch.schedule.passes} passes, {sketch.schedule.total_trials} trials)"
        )
