import numpy as np

from pursuit.isolation import build
from pursuit.management.base import PursuitCommand
from pursuit.metrics import distortion_sample
from pursuit.signals import sample_spikes


class Command(PursuitCommand):
    help = "Estimate the l1 distortion of the measurement operator on m-sparse pairs"

    def add_arguments(self, parser):
        self.add_sketch_arguments(parser)
        parser.add_argument("--pairs", type=int, default=100)

    def handle(self, *args, **options):
        params = self.sketch_params(options)
        matrix = build(params)
        rng = np.random.default_rng([params.seed, options["pairs"]])

        pairs = []
        while len(pairs) < max(options["pairs"], 1):
            f = sample_spikes(params.d, params.m, rng)
            g = sample_spikes(params.d, params.m, rng)
            if f != g:
                pairs.append((f, g))

        sample = distortion_sample(matrix, pairs)
        self.stdout.write(f"pairs\t{len(pairs)}")
        self.stdout.write(f"a_emp\t{sample.a_emp!r}")
        self.stdout.write(f"b_emp\t{sample.b_emp!r}")
        self.stdout.write(f"analytic_bound\t{sample.analytic_bound}")
        self.stdout.write(f"distortion\t{sample.distortion!r}")
