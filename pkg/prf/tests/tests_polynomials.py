import random
import threading
from concurrent.futures import ThreadPoolExecutor

from django.test import SimpleTestCase
from hypothesis import given, settings, strategies as st

from prf.polynomials import (
    SCHOOLBOOK_THRESHOLD,
    Polynomial,
    ReductionTable,
    horner,
    poly_add,
    poly_mod,
    poly_mul,
    shift,
)


MERSENNE_61 = (1 << 61) - 1
SMALL_PRIME = 1031


def sample_polynomial(coefficients, p):
    return Polynomial.from_coefficients(coefficients, p)


def schoolbook_oracle(u, v, p):
    if not u or not v:
        return []
    product = [0] * (len(u) + len(v) - 1)
    for i, a in enumerate(u):
        for j, b in enumerate(v):
            product[i + j] = (product[i + j] + a * b) % p
    return product


def long_division_oracle(h, q, p):
    """Remainder of h by the monic q, by textbook long division."""
    remainder = list(h)
    n = len(q) - 1
    for top in range(len(remainder) - 1, n - 1, -1):
        factor = remainder[top]
        if factor:
            for i, c in enumerate(q):
                position = top - n + i
                remainder[position] = (remainder[position] - factor * c) % p
    return remainder[:n]


def coefficient_lists(p, max_size):
    return st.lists(st.integers(min_value=0, max_value=p - 1), max_size=max_size)


@st.composite
def monic_moduli(draw, p, max_degree):
    low = draw(
        st.lists(
            st.integers(min_value=0, max_value=p - 1),
            min_size=1,
            max_size=max_degree,
        )
    )
    return Polynomial(tuple(low) + (1,))


class PolynomialTests(SimpleTestCase):
    def test_from_coefficients_reduces_and_strips(self):
        poly = Polynomial.from_coefficients([7, 12, 5, 0], 5)
        self.assertEqual(poly.coefficients, (2, 2))
        self.assertEqual(poly.degree, 1)
        self.assertEqual(Polynomial.from_coefficients([5, 10], 5), Polynomial())
        self.assertEqual(Polynomial().degree, -1)

    def test_leading_zero_rejected(self):
        with self.assertRaises(ValueError):
            Polynomial((1, 0))

    def test_linear_factor_vanishes_at_root(self):
        poly = Polynomial.linear_factor(3, 7)
        self.assertTrue(poly.is_monic)
        self.assertEqual(poly(3, 7), 0)

    def test_horner(self):
        poly = Polynomial((1, 2, 3))
        self.assertEqual(horner(poly, 2, 1000), 1 + 4 + 12)
        self.assertEqual(horner(Polynomial(), 5, 7), 0)

    def test_add_and_shift(self):
        u = Polynomial((1, 2))
        v = Polynomial((4, 5, 6))
        self.assertEqual(poly_add(u, v, 7).coefficients, (5, 0, 6))
        cancelled = poly_add(Polynomial((1, 6)), Polynomial((6, 1)), 7)
        self.assertEqual(cancelled, Polynomial())
        self.assertEqual(shift(u, 2).coefficients, (0, 0, 1, 2))
        self.assertEqual(shift(Polynomial(), 3), Polynomial())

    def test_ntt_product_of_long_operands(self):
        size = 4 * SCHOOLBOOK_THRESHOLD
        u = [(i * 7919 + 3) % MERSENNE_61 for i in range(size)]
        v = [MERSENNE_61 - 1 - i for i in range(size + 17)]
        product = poly_mul(
            sample_polynomial(u, MERSENNE_61),
            sample_polynomial(v, MERSENNE_61),
            MERSENNE_61,
        )
        self.assertEqual(
            list(product.coefficients), schoolbook_oracle(u, v, MERSENNE_61)
        )

    @settings(deadline=None, max_examples=60)
    @given(
        coefficient_lists(MERSENNE_61, 160),
        coefficient_lists(MERSENNE_61, 160),
    )
    def test_poly_mul_matches_schoolbook(self, u, v):
        u_poly = sample_polynomial(u, MERSENNE_61)
        v_poly = sample_polynomial(v, MERSENNE_61)
        expected = sample_polynomial(
            schoolbook_oracle(u_poly.coefficients, v_poly.coefficients, MERSENNE_61),
            MERSENNE_61,
        )
        self.assertEqual(poly_mul(u_poly, v_poly, MERSENNE_61), expected)

    @settings(deadline=None, max_examples=200)
    @given(coefficient_lists(SMALL_PRIME, 40), coefficient_lists(SMALL_PRIME, 40))
    def test_poly_mul_small_field(self, u, v):
        u_poly = sample_polynomial(u, SMALL_PRIME)
        v_poly = sample_polynomial(v, SMALL_PRIME)
        expected = sample_polynomial(
            schoolbook_oracle(u_poly.coefficients, v_poly.coefficients, SMALL_PRIME),
            SMALL_PRIME,
        )
        self.assertEqual(poly_mul(u_poly, v_poly, SMALL_PRIME), expected)

    def test_poly_mul_is_commutative_and_degree_adds(self):
        u = sample_polynomial(range(1, 60), SMALL_PRIME)
        v = sample_polynomial(range(2, 80), SMALL_PRIME)
        product = poly_mul(u, v, SMALL_PRIME)
        self.assertEqual(product, poly_mul(v, u, SMALL_PRIME))
        self.assertEqual(product.degree, u.degree + v.degree)


class PolyModTests(SimpleTestCase):
    @settings(deadline=None, max_examples=150)
    @given(coefficient_lists(MERSENNE_61, 200), monic_moduli(MERSENNE_61, 70))
    def test_poly_mod_matches_long_division(self, h, q):
        h_poly = sample_polynomial(h, MERSENNE_61)
        expected = sample_polynomial(
            long_division_oracle(h_poly.coefficients, q.coefficients, MERSENNE_61),
            MERSENNE_61,
        )
        self.assertEqual(poly_mod(h_poly, q, MERSENNE_61), expected)

    @settings(deadline=None, max_examples=150)
    @given(coefficient_lists(SMALL_PRIME, 120), monic_moduli(SMALL_PRIME, 20))
    def test_poly_mod_small_field(self, h, q):
        h_poly = sample_polynomial(h, SMALL_PRIME)
        remainder = poly_mod(h_poly, q, SMALL_PRIME)
        self.assertLess(remainder.degree, q.degree)
        self.assertEqual(
            remainder,
            sample_polynomial(
                long_division_oracle(h_poly.coefficients, q.coefficients, SMALL_PRIME),
                SMALL_PRIME,
            ),
        )

    def test_short_dividend_returned_unchanged(self):
        q = Polynomial((1, 2, 1))
        h = Polynomial((3, 4))
        self.assertIs(poly_mod(h, q, 7), h)

    def test_non_monic_modulus_rejected(self):
        with self.assertRaises(ValueError):
            poly_mod(Polynomial((1, 1, 1)), Polynomial((1, 2)), 7)
        with self.assertRaises(ValueError):
            ReductionTable(Polynomial((1,)), 7)

    def test_reduction_table_entries_are_powers_of_x(self):
        p = 10007
        q = Polynomial((5, 0, 3, 1))
        table = ReductionTable(q, p)
        for k in range(6):
            power = [0] * (q.degree - 1 + (1 << k)) + [1]
            remainder = long_division_oracle(power, q.coefficients, p)
            expected = sample_polynomial(remainder, p)
            self.assertEqual(table[k], expected)

    def test_table_reused_across_calls(self):
        p = 97
        q = Polynomial((1, 1, 0, 1))
        table = ReductionTable(q, p)
        for h in ([1] * 30, list(range(1, 50)), [0] * 9 + [1]):
            h_poly = sample_polynomial(h, p)
            remainder = long_division_oracle(h_poly.coefficients, q.coefficients, p)
            expected = sample_polynomial(remainder, p)
            self.assertEqual(poly_mod(h_poly, q, p, table), expected)


class SharedReductionTableTests(SimpleTestCase):
    threads = 6

    def build_concurrently(self, table, k):
        barrier = threading.Barrier(self.threads)

        def build(_):
            barrier.wait()
            return table[k]

        with ThreadPoolExecutor(max_workers=self.threads) as executor:
            return list(executor.map(build, range(self.threads)))

    def test_concurrent_builds_match_a_fresh_table(self):
        rng = random.Random(0)
        for _ in range(50):
            low = [rng.randrange(MERSENNE_61) for _ in range(64)]
            q = Polynomial(tuple(low) + (1,))
            shared = ReductionTable(q, MERSENNE_61)
            fresh = ReductionTable(q, MERSENNE_61)

            results = self.build_concurrently(shared, 7)
            self.assertEqual(results, [fresh[7]] * self.threads)
            self.assertEqual(
                [shared[k] for k in range(8)], [fresh[k] for k in range(8)]
            )

            h = sample_polynomial(
                [rng.randrange(MERSENNE_61) for _ in range(250)], MERSENNE_61
            )
            expected = poly_mod(h, q, MERSENNE_61, fresh)
            self.assertEqual(poly_mod(h, q, MERSENNE_61, shared), expected)
