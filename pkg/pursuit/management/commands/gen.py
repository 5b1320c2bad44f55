from rest_framework.exceptions import ValidationError

from pursuit.management.base import PursuitCommand
from pursuit.serializers import NoiseModelField
from pursuit.signals import generate_signal, write_signal


class Command(PursuitCommand):
    help = "Generate a random m-sparse signal, optionally with noise, as a signal file"

    def add_arguments(self, parser):
        parser.add_argument("--d", type=int, required=True)
        parser.add_argument("--m", type=int, required=True)
        parser.add_argument(
            "--noise", default="none", help="none, l1:EPS, l1-rel:EPS or weak1:R"
        )
        parser.add_argument("--seed", type=int, default=0)
        parser.add_argument(
            "--integer", action="store_true", help="integer spike values in +-{1..10}"
        )
        parser.add_argument("--out", help="signal file to write (default: stdout)")

    def handle(self, *args, **options):
        noise = NoiseModelField().run_validation(options["noise"])
        if options["seed"] < 0:
            raise ValidationError({"seed": "seed must be non-negative"})

        signal = generate_signal(
            options["d"], options["m"], noise, options["seed"], options["integer"]
        )
        if options["out"]:
            with open(options["out"], "w", encoding="utf-8") as stream:
                write_signal(signal, stream)
        else:
            write_signal(signal, self.stdout)
