import numpy as np
from django.core.exceptions import ValidationError
from django.test import SimpleTestCase
from scipy.stats import chisquare

from prf.hashing import HashSeed
from prf.polynomials import horner
from prf.primes import FieldParams
from pursuit.core import IsolationMode, SketchParams
from pursuit.exceptions import FormatMismatch, IsolationHashFailure
from pursuit.isolation import (
    build,
    dump_matrix,
    header_digest,
    load_matrix,
    seeded_degree,
)


def sample_matrix(**params):
    verify = params.pop("verify", None)
    defaults = {"d": 256, "m": 4, "seed": 7}
    defaults.update(params)
    return build(SketchParams(**defaults), verify=verify)


def rejecting_seed(seed: HashSeed) -> HashSeed:
    """A seed whose every round evaluates to p - 1, outside the cutoff."""
    polys = np.zeros_like(seed.polys)
    polys[:, 0] = seed.field.p - 1
    return HashSeed(seed.field, seed.degree, polys)


class ExplicitMatrixTests(SimpleTestCase):
    def test_single_bucket_holds_every_position(self):
        matrix = sample_matrix(d=4, m=1, c_buckets=0.5, c_trials=0.5)
        self.assertEqual(matrix.schedule.bucket_counts, (1,))
        np.testing.assert_array_equal(matrix.table(0, 0), [0, 0, 0, 0])

    def test_same_seed_same_matrix(self):
        first = sample_matrix()
        second = sample_matrix()
        for k, t in first.schedule.trial_index():
            np.testing.assert_array_equal(first.table(k, t), second.table(k, t))

    def test_different_trials_differ(self):
        matrix = sample_matrix()
        self.assertFalse(np.array_equal(matrix.table(0, 0), matrix.table(0, 1)))
        other = sample_matrix(seed=8)
        self.assertFalse(np.array_equal(matrix.table(0, 0), other.table(0, 0)))

    def test_partition(self):
        matrix = sample_matrix(d=1024, m=8)
        for k in range(matrix.schedule.passes):
            buckets = matrix.table(k, 0)
            counts = np.bincount(buckets, minlength=matrix.schedule.bucket_counts[k])
            self.assertEqual(buckets.shape, (1024,))
            self.assertEqual(counts.sum(), 1024)
            self.assertEqual(counts.size, matrix.schedule.bucket_counts[k])

    def test_bucket_of_matches_batch(self):
        matrix = sample_matrix()
        positions = [0, 17, 255, 3]
        batch = matrix.buckets_batch(1, 2, positions)
        self.assertEqual(batch.tolist(), [matrix.bucket_of(1, 2, i) for i in positions])
        self.assertEqual(matrix.buckets_batch(0, 0, []).shape, (0,))

    def test_bucket_occupancy_is_uniform(self):
        matrix = sample_matrix(d=1 << 16, m=4, seed=2024)
        for t in range(3):
            counts = np.bincount(matrix.table(0, t), minlength=64)
            self.assertEqual(counts.size, 64)
            self.assertGreater(chisquare(counts).pvalue, 1e-6)

    def test_bucket_rows_are_global_offsets(self):
        matrix = sample_matrix()
        schedule = matrix.schedule
        positions = np.array([5, 100, 200])
        rows = matrix.bucket_rows(positions)
        self.assertEqual(rows.shape, (schedule.total_trials, 3))
        for row, (k, t) in enumerate(schedule.trial_index()):
            np.testing.assert_array_equal(
                rows[row],
                schedule.block_offset(k, t) + matrix.buckets_batch(k, t, positions),
            )
        later = matrix.bucket_rows(positions, passes=range(1, schedule.passes))
        np.testing.assert_array_equal(later, rows[schedule.trial_counts[0]:])

    def test_out_of_range_lookups(self):
        matrix = sample_matrix()
        with self.assertRaises(ValidationError):
            matrix.bucket_of(0, 0, 256)
        with self.assertRaises(ValidationError):
            matrix.buckets_batch(0, 0, [3, -1])
        with self.assertRaises(ValidationError):
            matrix.bucket_of(matrix.schedule.passes, 0, 1)


class SeededMatrixTests(SimpleTestCase):
    def test_degree_floor(self):
        self.assertEqual(seeded_degree(1), 8)
        self.assertEqual(seeded_degree(16), 64)

    def test_seeds_per_trial(self):
        matrix = sample_matrix(d=16, m=1, mode=IsolationMode.SEEDED)
        schedule = matrix.schedule
        self.assertEqual(len(matrix.seeds), schedule.total_trials)
        seed = matrix.seed_for(0, 0)
        self.assertEqual(seed.degree, 8)
        self.assertEqual(seed.field.r, schedule.bucket_counts[0])
        self.assertEqual(seed.rounds, matrix.params.rejection_rounds)

    def test_bucket_of_matches_horner_oracle(self):
        matrix = sample_matrix(d=16, m=1, mode=IsolationMode.SEEDED)
        for t in range(3):
            seed = matrix.seed_for(0, t)
            field = seed.field
            for position in range(16):
                for round_index in range(seed.rounds):
                    value = horner(seed.polynomial(round_index), position, field.p)
                    if value < field.cutoff:
                        break
                self.assertEqual(matrix.bucket_of(0, t, position), field.fold(value))

    def test_batch_matches_singletons_over_whole_domain(self):
        matrix = sample_matrix(d=256, m=2, mode=IsolationMode.SEEDED)
        for k in range(matrix.schedule.passes):
            table = matrix.table(k, 0)
            self.assertEqual(
                table.tolist(), [matrix.bucket_of(k, 0, i) for i in range(256)]
            )

    def test_deterministic_build(self):
        first = sample_matrix(d=64, m=2, mode=IsolationMode.SEEDED)
        second = sample_matrix(d=64, m=2, mode=IsolationMode.SEEDED)
        self.assertEqual(first.seeds, second.seeds)

    def test_failure_names_pass_and_trial(self):
        matrix = sample_matrix(d=64, m=2, mode=IsolationMode.SEEDED)
        matrix.seeds[(1, 3)] = rejecting_seed(matrix.seeds[(1, 3)])

        with self.assertRaises(IsolationHashFailure) as context:
            matrix.bucket_of(1, 3, 10)
        failure = context.exception
        self.assertEqual((failure.pass_index, failure.trial), (1, 3))
        self.assertEqual(failure.positions, (10,))
        with self.assertRaises(IsolationHashFailure):
            matrix.verify()


class MatrixSerializationTests(SimpleTestCase):
    def test_explicit_round_trip(self):
        matrix = sample_matrix(k_rep=5, retention_fraction=0.8)
        payload = dump_matrix(matrix)
        loaded = load_matrix(payload)

        self.assertEqual(loaded.params, matrix.params)
        self.assertEqual(loaded.schedule, matrix.schedule)
        self.assertEqual(header_digest(loaded), header_digest(matrix))
        self.assertEqual(dump_matrix(loaded), payload)
        np.testing.assert_array_equal(loaded.table(1, 4), matrix.table(1, 4))

    def test_seeded_round_trip(self):
        matrix = sample_matrix(d=64, m=2, mode=IsolationMode.SEEDED)
        loaded = load_matrix(dump_matrix(matrix))
        self.assertEqual(loaded.seeds, matrix.seeds)
        np.testing.assert_array_equal(loaded.table(0, 0), matrix.table(0, 0))

    def test_explicit_matrix_stores_no_table(self):
        explicit = dump_matrix(sample_matrix())
        seeded = dump_matrix(sample_matrix(mode=IsolationMode.SEEDED, verify=False))
        self.assertLess(len(explicit), 200)
        self.assertGreater(len(seeded), len(explicit))

    def test_corrupted_payloads(self):
        payload = dump_matrix(sample_matrix(d=64, m=2, mode=IsolationMode.SEEDED))
        for corrupted in (
            b"XXXX" + payload[4:],
            payload[:20],
            payload[:-3],
            payload + b"\x00",
        ):
            with self.assertRaises(FormatMismatch):
                load_matrix(corrupted)

    def test_seed_records_must_match_the_schedule(self):
        matrix = sample_matrix(d=64, m=2, mode=IsolationMode.SEEDED)
        seed = matrix.seeds[(0, 0)]
        field, degree, polys = seed.field, seed.degree, seed.polys
        tampered = (
            HashSeed(FieldParams(field.p + 1, field.r), degree, polys),
            HashSeed(FieldParams(field.p, field.r + 1), degree, polys),
            HashSeed(field, degree + 1, np.pad(polys, ((0, 0), (0, 1)))),
            HashSeed(field, degree, polys[:1]),
        )
        for index, record in enumerate(tampered):
            matrix.seeds[(0, 0)] = record
            with self.subTest(index=index), self.assertRaises(FormatMismatch):
                load_matrix(dump_matrix(matrix))

    def test_different_params_different_digest(self):
        self.assertNotEqual(
            header_digest(sample_matrix(seed=1)), header_digest(sample_matrix(seed=2))
        )
