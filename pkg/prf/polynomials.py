"""
Exact polynomial arithmetic over GF(p), p < 2^61.

Products use schoolbook convolution on short operands and a
number-theoretic transform over auxiliary NTT-friendly primes, recombined
with Garner's CRT, on long ones. No floating point touches a coefficient.
"""

import threading
from dataclasses import dataclass
from functools import lru_cache
from typing import Iterable, Sequence

import numpy as np


SCHOOLBOOK_THRESHOLD = 48

# (prime, largest power of two dividing prime - 1)
_NTT_PRIMES = (
    (998244353, 23),
    (167772161, 25),
    (469762049, 26),
    (754974721, 24),
    (2013265921, 27),
)


@dataclass(frozen=True)
class Polynomial:
    """Coefficients low-order first, no trailing zeros; () is the zero polynomial."""

    coefficients: tuple[int, ...] = ()

    def __post_init__(self):
        if self.coefficients and self.coefficients[-1] == 0:
            raise ValueError("leading coefficient of a polynomial must be nonzero")

    @classmethod
    def from_coefficients(cls, coefficients: Iterable[int], p: int) -> "Polynomial":
        reduced = [int(c) % p for c in coefficients]
        while reduced and reduced[-1] == 0:
            reduced.pop()
        return cls(tuple(reduced))

    @classmethod
    def linear_factor(cls, root: int, p: int) -> "Polynomial":
        """The monic polynomial x - root."""
        return cls(((-root) % p, 1))

    @property
    def degree(self) -> int:
        return len(self.coefficients) - 1

    @property
    def is_monic(self) -> bool:
        return bool(self.coefficients) and self.coefficients[-1] == 1

    def __len__(self):
        return len(self.coefficients)

    def __call__(self, x: int, p: int) -> int:
        return horner(self, x, p)


def horner(poly: Polynomial, x: int, p: int) -> int:
    result = 0
    for coefficient in reversed(poly.coefficients):
        result = (result * x + coefficient) % p
    return result


def poly_add(u: Polynomial, v: Polynomial, p: int) -> Polynomial:
    if len(u) < len(v):
        u, v = v, u
    summed = list(u.coefficients)
    for i, coefficient in enumerate(v.coefficients):
        summed[i] += coefficient
    return Polynomial.from_coefficients(summed, p)


def shift(u: Polynomial, power: int) -> Polynomial:
    """u(x) * x^power."""
    if not u.coefficients:
        return u
    return Polynomial((0,) * power + u.coefficients)


def _schoolbook(u: Sequence[int], v: Sequence[int]) -> list[int]:
    product = [0] * (len(u) + len(v) - 1)
    for i, a in enumerate(u):
        if a:
            for j, b in enumerate(v):
                product[i + j] += a * b
    return product


@lru_cache(maxsize=None)
def _primitive_root(prime: int, two_adicity: int) -> int:
    cofactor = (prime - 1) >> two_adicity
    factors = {2}
    divisor = 3
    while divisor * divisor <= cofactor:
        while cofactor % divisor == 0:
            factors.add(divisor)
            cofactor //= divisor
        divisor += 2
    if cofactor > 1:
        factors.add(cofactor)

    for candidate in range(2, prime):
        if all(pow(candidate, (prime - 1) // q, prime) != 1 for q in factors):
            return candidate
    raise ArithmeticError(f"no primitive root modulo {prime}")


@lru_cache(maxsize=64)
def _bit_reversal(size: int) -> np.ndarray:
    bits = size.bit_length() - 1
    index = np.arange(size, dtype=np.int64)
    reversed_index = np.zeros(size, dtype=np.int64)
    for b in range(bits):
        reversed_index |= ((index >> b) & 1) << (bits - 1 - b)
    return reversed_index


def _powers(base: int, count: int, prime: int) -> np.ndarray:
    modulus = np.uint64(prime)
    powers = np.empty(count, dtype=np.uint64)
    powers[0] = 1
    filled = 1
    while filled < count:
        take = min(filled, count - filled)
        step = np.uint64(pow(base, filled, prime))
        powers[filled:filled + take] = powers[:take] * step % modulus
        filled += take
    return powers


def _ntt(values: np.ndarray, prime: int, two_adicity: int, invert: bool) -> np.ndarray:
    size = values.shape[0]
    modulus = np.uint64(prime)
    root = _primitive_root(prime, two_adicity)
    transformed = values[_bit_reversal(size)]

    length = 2
    while length <= size:
        half = length // 2
        w = pow(root, (prime - 1) // length, prime)
        if invert:
            w = pow(w, prime - 2, prime)
        twiddles = _powers(w, half, prime)
        blocks = transformed.reshape(-1, length)
        low = blocks[:, :half].copy()
        high = blocks[:, half:] * twiddles % modulus
        blocks[:, :half] = (low + high) % modulus
        blocks[:, half:] = (low + modulus - high) % modulus
        length *= 2

    if invert:
        transformed = transformed * np.uint64(pow(size, prime - 2, prime)) % modulus
    return transformed


def _ntt_convolution(u: Sequence[int], v: Sequence[int], p: int) -> list[int]:
    result_length = len(u) + len(v) - 1
    size = 1 << (result_length - 1).bit_length()
    bound = min(len(u), len(v)) * (p - 1) ** 2

    moduli = []
    product = 1
    for prime, two_adicity in _NTT_PRIMES:
        if product > bound:
            break
        if size > 1 << two_adicity:
            raise ValueError(f"transform length {size} too long for prime {prime}")
        moduli.append((prime, two_adicity))
        product *= prime
    if product <= bound:
        raise ValueError("coefficient bound exceeds the auxiliary NTT primes")

    residues = []
    for prime, two_adicity in moduli:
        left = np.zeros(size, dtype=np.uint64)
        right = np.zeros(size, dtype=np.uint64)
        left[:len(u)] = [c % prime for c in u]
        right[:len(v)] = [c % prime for c in v]
        spectrum = (
            _ntt(left, prime, two_adicity, invert=False)
            * _ntt(right, prime, two_adicity, invert=False)
            % np.uint64(prime)
        )
        residues.append(_ntt(spectrum, prime, two_adicity, invert=True)[:result_length])

    return _garner(residues, [prime for prime, _ in moduli], p)


def _garner(residues: list[np.ndarray], primes: list[int], p: int) -> list[int]:
    """CRT-combine per-prime residues into exact integers reduced mod p."""
    digits = []
    for i, prime in enumerate(primes):
        modulus = np.uint64(prime)
        partial = np.zeros_like(residues[i])
        radix = 1
        for j in range(i):
            partial = (partial + digits[j] * np.uint64(radix % prime)) % modulus
            radix *= primes[j]
        inverse = np.uint64(pow(radix % prime, prime - 2, prime))
        digit = (residues[i] + modulus - partial) % modulus * inverse % modulus
        digits.append(digit)

    combined = np.zeros(residues[0].shape[0], dtype=object)
    radix = 1
    for digit, prime in zip(digits, primes):
        combined = combined + digit.astype(object) * radix
        radix *= prime
    return [int(value) % p for value in combined]


def poly_mul(u: Polynomial, v: Polynomial, p: int) -> Polynomial:
    """Exact product mod p."""
    if not u.coefficients or not v.coefficients:
        return Polynomial()
    if min(len(u), len(v)) <= SCHOOLBOOK_THRESHOLD:
        product = _schoolbook(u.coefficients, v.coefficients)
    else:
        product = _ntt_convolution(u.coefficients, v.coefficients, p)
    return Polynomial.from_coefficients(product, p)


class ReductionTable:
    """
    Residues x^(n - 1 + 2^k) mod q for a monic q of degree n, built on demand.

    Entry 0 is x^n mod q; entry k is obtained by shifting entry k - 1 by
    2^(k - 1) and folding the result back with the lower entries. Entries are
    appended under a lock.
    """

    def __init__(self, q: Polynomial, p: int):
        if q.degree < 1 or not q.is_monic:
            raise ValueError("modulus must be monic with degree at least 1")
        self.q = q
        self.p = p
        self.n = q.degree
        self._entries = [
            Polynomial.from_coefficients((-c for c in q.coefficients[:-1]), p)
        ]
        self._lock = threading.RLock()

    def __getitem__(self, k: int) -> Polynomial:
        if k < len(self._entries):
            return self._entries[k]
        with self._lock:
            while len(self._entries) <= k:
                j = len(self._entries)
                shifted = shift(self._entries[j - 1], 1 << (j - 1))
                # reduce() only reads entries below j
                self._entries.append(self.reduce(shifted))
        return self._entries[k]

    def reduce(self, h: Polynomial) -> Polynomial:
        n, p = self.n, self.p
        while h.degree >= n:
            excess = h.degree - (n - 1)
            k = excess.bit_length() - 1
            split = n - 1 + (1 << k)
            low = Polynomial.from_coefficients(h.coefficients[:split], p)
            high = Polynomial(h.coefficients[split:])
            h = poly_add(low, poly_mul(self[k], high, p), p)
        return h


def poly_mod(
    h: Polynomial,
    q: Polynomial,
    p: int,
    table: ReductionTable | None = None,
) -> Polynomial:
    """Remainder of h modulo the monic polynomial q."""
    if q.degree < 1 or not q.is_monic:
        raise ValueError("modulus must be monic with degree at least 1")
    if h.degree < q.degree:
        return h
    if table is None:
        table = ReductionTable(q, p)
    return table.reduce(h)
