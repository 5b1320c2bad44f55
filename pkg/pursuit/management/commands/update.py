from pathlib import Path

from pursuit.management.base import PursuitCommand
from pursuit.sketcher import dump_sketch, load_sketch, update


class Command(PursuitCommand):
    help = "Apply the streaming update f(position) += delta to a sketch file in place"

    def add_arguments(self, parser):
        parser.add_argument("sketch", help="sketch file to update")
        parser.add_argument("matrix", help="matrix file the sketch was built with")
        parser.add_argument("--position", type=int, required=True)
        parser.add_argument("--delta", type=float, required=True)

    def handle(self, *args, **options):
        matrix = self.read_matrix(options["matrix"])
        path = Path(options["sketch"])
        sketch = load_sketch(path.read_bytes(), matrix)
        update(sketch, matrix, options["position"], options["delta"])
        path.write_bytes(dump_sketch(sketch, matrix))
