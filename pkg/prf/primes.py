from dataclasses import dataclass

from django.core.exceptions import ValidationError


MAX_FIELD_PRIME = 1 << 61

_SMALL_PRIMES = (2, 3, 5, 7, 11, 13, 17, 19, 23, 29, 31, 37)

# witness set deciding every n < 2^64 (Jim Sinclair's bases)
_WITNESSES_64 = (2, 325, 9375, 28178, 450775, 9780504, 1795265022)


def _is_composite_witness(n: int, s: int, d: int, a: int) -> bool:
    """Check compositeness of n with witness a, where d * 2^s = n - 1, d odd."""
    a %= n
    if a == 0:
        return False
    x = pow(a, d, n)
    if x == 1 or x == n - 1:
        return False
    for _ in range(1, s):
        x = x * x % n
        if x == n - 1:
            return False
        if x == 1:
            return True
    return True


def is_prime(n: int) -> bool:
    """Deterministic Miller-Rabin, exact for every n < 2^64."""
    if n < 2:
        return False
    for prime in _SMALL_PRIMES:
        if n % prime == 0:
            return n == prime
    if n >= 1 << 64:
        raise ValueError(f"primality of {n} is only decided below 2^64")

    d, s = n - 1, 0
    while not d & 1:
        d >>= 1
        s += 1
    return not any(_is_composite_witness(n, s, d, a) for a in _WITNESSES_64)


def next_prime(n: int) -> int:
    candidate = max(n, 2)
    while not is_prime(candidate):
        candidate += 1
    return candidate


@dataclass(frozen=True)
class FieldParams:
    """Prime field of the hash polynomials and the bucket range they fold to."""

    p: int
    r: int

    def __post_init__(self):
        if self.r < 1:
            raise ValidationError({"r": f"range must be positive, not {self.r}"})
        if self.p < 2 * self.r:
            raise ValidationError(
                {"p": f"p must be at least 2r = {2 * self.r}, not {self.p}"}
            )
        if self.p > MAX_FIELD_PRIME:
            raise ValidationError({"p": f"p must not exceed 2^61, not {self.p}"})

    @property
    def cutoff(self) -> int:
        """Largest multiple of r that is at most p."""
        return self.r * (self.p // self.r)

    @property
    def fold_width(self) -> int:
        return self.p // self.r

    def fold(self, value: int) -> int:
        """Exactly (p // r)-to-1 map from [0, cutoff) onto [0, r)."""
        return value // self.fold_width


def find_prime(d: int, r: int) -> FieldParams:
    """Smallest prime p >= max(d, 2r), searched upward from the bound."""
    if d < 1:
        raise ValidationError({"d": f"dimension must be positive, not {d}"})
    if r < 1:
        raise ValidationError({"r": f"range must be positive, not {r}"})

    bound = max(d, 2 * r)
    if bound > MAX_FIELD_PRIME:
        raise ValidationError({"d": f"no supported prime field above {bound}"})
    return FieldParams(p=next_prime(bound), r=r)
