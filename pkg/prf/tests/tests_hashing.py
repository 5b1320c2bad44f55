from collections import Counter
from itertools import product

import numpy as np
from django.test import SimpleTestCase, tag

from prf.exceptions import HashFailure
from prf.hashing import HashSeed, draw_seed, hash_batch
from prf.polynomials import horner
from prf.primes import FieldParams, find_prime


def sample_seed(field, degree=2, rounds=3, seed=0):
    return draw_seed(field, degree, rounds, np.random.default_rng(seed))


def oracle_buckets(seed, positions):
    """First accepted round of every position, by direct Horner evaluation."""
    field = seed.field
    buckets = []
    for position in positions:
        for round_index in range(seed.rounds):
            value = horner(seed.polynomial(round_index), position, field.p)
            if value < field.cutoff:
                buckets.append(field.fold(value))
                break
        else:
            buckets.append(None)
    return buckets


class HashSeedTests(SimpleTestCase):
    def test_draw_seed_is_deterministic(self):
        field = find_prime(16, 4)
        self.assertEqual(sample_seed(field, seed=5), sample_seed(field, seed=5))
        self.assertNotEqual(sample_seed(field, seed=5), sample_seed(field, seed=6))

    def test_seed_shape_and_range(self):
        field = FieldParams(17, 4)
        seed = sample_seed(field, degree=6, rounds=4)
        self.assertEqual(seed.polys.shape, (4, 6))
        self.assertEqual(seed.rounds, 4)
        self.assertTrue((seed.polys < field.p).all())
        self.assertFalse(seed.polys.flags.writeable)

    def test_invalid_seeds(self):
        field = FieldParams(5, 2)
        with self.assertRaises(ValueError):
            HashSeed(field, 2, np.array([[1, 5]], dtype=np.uint64))
        with self.assertRaises(ValueError):
            HashSeed(field, 3, np.array([[1, 2]], dtype=np.uint64))
        with self.assertRaises(ValueError):
            HashSeed(field, 2, np.zeros((0, 2), dtype=np.uint64))


class HashBatchTests(SimpleTestCase):
    def test_matches_horner_oracle(self):
        field = find_prime(16, 4)
        for seed_value in range(20):
            seed = sample_seed(field, degree=2, rounds=4, seed=seed_value)
            positions = list(range(16))
            expected = oracle_buckets(seed, positions)
            if None in expected:
                with self.assertRaises(HashFailure):
                    hash_batch(seed, positions)
            else:
                self.assertEqual(hash_batch(seed, positions).tolist(), expected)

    def test_batch_equals_singletons(self):
        field = find_prime(64, 8)
        seed = sample_seed(field, degree=8, rounds=10, seed=3)
        positions = list(range(64))
        batch = hash_batch(seed, positions)
        for position in positions:
            self.assertEqual(hash_batch(seed, [position])[0], batch[position])

    def test_values_in_range(self):
        field = find_prime(1024, 32)
        seed = sample_seed(field, degree=16, rounds=12, seed=1)
        buckets = hash_batch(seed, range(1024))
        self.assertTrue(((buckets >= 0) & (buckets < 32)).all())

    def test_empty_batch(self):
        seed = sample_seed(FieldParams(5, 2))
        self.assertEqual(hash_batch(seed, []).shape, (0,))

    def test_duplicate_positions_rejected(self):
        seed = sample_seed(FieldParams(5, 2))
        with self.assertRaises(ValueError):
            hash_batch(seed, [1, 1])

    def test_rejected_in_every_round_fails(self):
        field = FieldParams(5, 2)
        seed = HashSeed(field, 2, np.array([[4, 0], [4, 0], [4, 0]], dtype=np.uint64))
        with self.assertRaises(HashFailure) as context:
            hash_batch(seed, [0, 1, 2])
        self.assertEqual(context.exception.positions, (0, 1, 2))
        self.assertEqual(context.exception.rounds, 3)

    def test_later_round_rescues_rejected_position(self):
        field = FieldParams(5, 2)
        # round 0 rejects everything, round 1 is the identity
        seed = HashSeed(field, 2, np.array([[4, 0], [0, 1]], dtype=np.uint64))
        self.assertEqual(hash_batch(seed, [0, 1, 2, 3]).tolist(), [0, 0, 1, 1])
        with self.assertRaises(HashFailure):
            hash_batch(seed, [4])

    def test_pairwise_uniform_over_every_seed(self):
        field = FieldParams(5, 2)
        linear = [np.array(c, dtype=np.uint64) for c in product(range(5), repeat=2)]
        for pair in ((0, 1), (1, 3), (2, 4)):
            outcomes = Counter()
            failures = 0
            for rounds in product(linear, repeat=3):
                seed = HashSeed(field, 2, np.stack(rounds))
                try:
                    outcomes[tuple(hash_batch(seed, pair).tolist())] += 1
                except HashFailure:
                    failures += 1

            successes = 25**3 - failures
            self.assertEqual(sum(outcomes.values()), successes)
            self.assertEqual(successes % 4, 0)
            self.assertEqual(
                dict(outcomes),
                {outcome: successes // 4 for outcome in product(range(2), repeat=2)},
            )

    @tag("slow")
    def test_failure_is_rare_at_desk_scale(self):
        field = find_prime(1024, 256)
        failures = 0
        for seed_value in range(10):
            seed = sample_seed(field, degree=32, rounds=40, seed=seed_value)
            try:
                hash_batch(seed, range(1024))
            except HashFailure:
                failures += 1
        self.assertEqual(failures, 0)
