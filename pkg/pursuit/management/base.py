from pathlib import Path

from django.core.exceptions import ValidationError as DjangoValidationError
from django.core.management.base import BaseCommand, CommandError
from rest_framework.exceptions import ValidationError

from prf.exceptions import HashFailure
from pursuit.core import IsolationMode
from pursuit.exceptions import (
    FormatMismatch,
    IsolationHashFailure,
    ScheduleMismatch,
)
from pursuit.isolation import IsolationMatrix, load_matrix
from pursuit.serializers import SketchParamsSerializer


EXIT_VALIDATION = 2
EXIT_HASH_FAILURE = 3
EXIT_FORMAT_MISMATCH = 4


class PursuitCommand(BaseCommand):
    """Maps domain failures onto the exit codes shared by every command."""

    def execute(self, *args, **options):
        try:
            return super().execute(*args, **options)
        except ValidationError as error:
            raise CommandError(
                f"invalid input: {error.detail}", returncode=EXIT_VALIDATION
            )
        except DjangoValidationError as error:
            raise CommandError(
                f"invalid input: {'; '.join(error.messages)}",
                returncode=EXIT_VALIDATION,
            )
        except (IsolationHashFailure, HashFailure) as error:
            raise CommandError(f"hash failure: {error}", returncode=EXIT_HASH_FAILURE)
        except (FormatMismatch, ScheduleMismatch) as error:
            raise CommandError(
                f"format mismatch: {error}", returncode=EXIT_FORMAT_MISMATCH
            )

    def add_sketch_arguments(self, parser, require_dimension=True):
        parser.add_argument("--d", type=int, required=require_dimension)
        parser.add_argument("--m", type=int, required=True)
        self.add_option_arguments(parser)
        parser.add_argument("--k-rep", type=int, dest="k_rep")

    def add_option_arguments(self, parser):
        parser.add_argument("--a", type=float)
        parser.add_argument("--c-trials", type=float, dest="c_trials")
        parser.add_argument("--c-buckets", type=float, dest="c_buckets")
        parser.add_argument("--retention", type=float)
        parser.add_argument("--mode", choices=IsolationMode.values)
        parser.add_argument("--seed", type=int)

    @staticmethod
    def given(options, *names) -> dict:
        """Options the user passed; the rest fall back to serializer defaults."""
        return {name: options[name] for name in names if options.get(name) is not None}

    def sketch_params(self, options, **overrides):
        data = self.given(
            options,
            "d",
            "m",
            "a",
            "c_trials",
            "c_buckets",
            "retention",
            "mode",
            "seed",
            "k_rep",
        )
        data.update(overrides)
        serializer = SketchParamsSerializer(data=data)
        serializer.is_valid(raise_exception=True)
        return serializer.save()

    @staticmethod
    def read_matrix(path) -> IsolationMatrix:
        return load_matrix(Path(path).read_bytes())
