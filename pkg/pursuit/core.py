import math
from dataclasses import dataclass, field
from fractions import Fraction
from types import MappingProxyType
from typing import Iterable, Mapping

import numpy as np
from django.core.exceptions import ValidationError
from django.db import models


DEFAULT_PASS_BASE = 8.0
DEFAULT_C_TRIALS = 4.0
DEFAULT_C_BUCKETS = 16.0
DEFAULT_RETENTION_FRACTION = 0.9


class IsolationMode(models.TextChoices):
    EXPLICIT = "explicit", "Explicit"
    SEEDED = "seeded", "Seeded"


def validate_position(value: int, max_value: int, field_name: str, error_class):
    if not (0 <= value < max_value):
        raise error_class(
            {field_name: f"{field_name} must be in range [0, {max_value}), not {value}"}
        )


def rank_by_magnitude(items: Iterable[tuple[int, float]], limit: int) -> list:
    """The `limit` (position, value) pairs of largest |value|, ties by position."""
    ranked = sorted(items, key=lambda item: (-abs(item[1]), item[0]))
    return ranked[:max(limit, 0)]


@dataclass(frozen=True, eq=False)
class SparseSignal:
    """A d-dimensional real signal stored as a position -> value map."""

    dimension: int
    entries: Mapping[int, float] = field(default_factory=dict)

    def __post_init__(self):
        if self.dimension < 1:
            raise ValidationError(
                {"dimension": f"dimension must be positive, not {self.dimension}"}
            )
        cleaned = {}
        for position, value in sorted(self.entries.items()):
            position = int(position)
            validate_position(position, self.dimension, "position", ValidationError)
            value = float(value)
            if value != 0.0:
                cleaned[position] = value
        object.__setattr__(self, "entries", MappingProxyType(cleaned))

    @classmethod
    def from_arrays(cls, dimension: int, positions, values) -> "SparseSignal":
        return cls(dimension, dict(zip((int(i) for i in positions), values)))

    @property
    def positions(self) -> np.ndarray:
        return np.fromiter(self.entries.keys(), dtype=np.int64, count=len(self.entries))

    @property
    def values(self) -> np.ndarray:
        return np.fromiter(
            self.entries.values(), dtype=np.float64, count=len(self.entries)
        )

    @property
    def support_size(self) -> int:
        return len(self.entries)

    def __len__(self):
        return len(self.entries)

    def __getitem__(self, position: int) -> float:
        return self.entries.get(position, 0.0)

    def items(self):
        return self.entries.items()

    def _check_dimension(self, other: "SparseSignal"):
        if self.dimension != other.dimension:
            raise ValidationError(
                {
                    "dimension": f"signals of dimension {self.dimension} and "
                    f"{other.dimension} cannot be combined"
                }
            )

    def __add__(self, other: "SparseSignal") -> "SparseSignal":
        self._check_dimension(other)
        summed = dict(self.entries)
        for position, value in other.items():
            summed[position] = summed.get(position, 0.0) + value
        return SparseSignal(self.dimension, summed)

    def __sub__(self, other: "SparseSignal") -> "SparseSignal":
        return self + other.scaled(-1.0)

    def __eq__(self, other):
        if not isinstance(other, SparseSignal):
            return NotImplemented
        return self.dimension == other.dimension and dict(self.entries) == dict(
            other.entries
        )

    def scaled(self, alpha: float) -> "SparseSignal":
        return SparseSignal(
            self.dimension, {i: alpha * v for i, v in self.entries.items()}
        )

    def restricted(self, positions: Iterable[int]) -> "SparseSignal":
        return SparseSignal(
            self.dimension,
            {i: self.entries[i] for i in positions if i in self.entries},
        )

    def to_dense(self) -> np.ndarray:
        dense = np.zeros(self.dimension, dtype=np.float64)
        dense[self.positions] = self.values
        return dense

    def __str__(self):
        return f"SparseSignal(d={self.dimension}, support={self.support_size})"


@dataclass(eq=False)
class Measurement:
    """One bucket's total c and bit-test vector b(0..L-1), most significant first."""

    bits: np.ndarray
    total: float = 0.0

    def __post_init__(self):
        self.bits = np.array(self.bits, dtype=np.float64)

    @classmethod
    def empty(cls, bit_rows: int) -> "Measurement":
        return cls(np.zeros(bit_rows, dtype=np.float64), 0.0)

    @classmethod
    def from_row(cls, row: np.ndarray) -> "Measurement":
        """Read a sketch row laid out as (c, b(0), ..., b(L-1))."""
        return cls(row[1:], float(row[0]))

    @property
    def bit_rows(self) -> int:
        return self.bits.shape[0]

    def as_row(self) -> np.ndarray:
        return np.concatenate(([self.total], self.bits))

    def __eq__(self, other):
        if not isinstance(other, Measurement):
            return NotImplemented
        return self.total == other.total and np.array_equal(self.bits, other.bits)


@dataclass(frozen=True)
class SketchParams:
    d: int
    m: int
    a: float = DEFAULT_PASS_BASE
    c_trials: float = DEFAULT_C_TRIALS
    c_buckets: float = DEFAULT_C_BUCKETS
    retention_fraction: float = DEFAULT_RETENTION_FRACTION
    mode: IsolationMode = IsolationMode.EXPLICIT
    seed: int = 0
    k_rep: int | None = None

    def __post_init__(self):
        object.__setattr__(self, "mode", IsolationMode(self.mode))
        self.clean()

    def clean(self):
        if self.d < 2:
            raise ValidationError({"d": f"d must be at least 2, not {self.d}"})
        if not (1 <= self.m <= self.d):
            raise ValidationError(
                {"m": f"m must be in range [1, {self.d}], not {self.m}"}
            )
        if self.a <= 2:
            raise ValidationError(
                {
                    "a": "pass base must exceed 2 so bucket counts outrun "
                    f"spike budgets, not {self.a}"
                }
            )
        if self.c_trials <= 0 or self.c_buckets <= 0:
            raise ValidationError(
                {"c_trials": "trial and bucket constants must be positive"}
            )
        if not (0 < self.retention_fraction <= 1):
            raise ValidationError(
                {
                    "retention_fraction": "retention fraction must be in (0, 1], "
                    f"not {self.retention_fraction}"
                }
            )
        if not (0 <= self.seed < 1 << 64):
            raise ValidationError({"seed": "seed must be a 64-bit unsigned value"})
        if self.k_rep is not None and self.k_rep < 1:
            raise ValidationError(
                {"k_rep": f"k_rep must be positive, not {self.k_rep}"}
            )

    @property
    def rejection_rounds(self) -> int:
        if self.k_rep is not None:
            return self.k_rep
        return math.ceil(4 * math.log2(self.d))


@dataclass(frozen=True)
class Schedule:
    """
    Pass/trial/bucket layout. Pass k has spike budget m_k, T_k trials and
    N_k buckets per trial; every measurement has L bit rows plus a total.
    """

    d: int
    m: int
    bit_rows: int
    spike_budgets: tuple[int, ...]
    trial_counts: tuple[int, ...]
    bucket_counts: tuple[int, ...]

    @property
    def passes(self) -> int:
        return len(self.spike_budgets)

    @property
    def measurement_width(self) -> int:
        return self.bit_rows + 1

    @property
    def total_trials(self) -> int:
        return sum(self.trial_counts)

    @property
    def measurement_count(self) -> int:
        return sum(t * n for t, n in zip(self.trial_counts, self.bucket_counts))

    @property
    def scalar_count(self) -> int:
        return self.measurement_count * self.measurement_width

    def pass_offset(self, k: int) -> int:
        """First measurement row of pass k."""
        return sum(
            t * n for t, n in zip(self.trial_counts[:k], self.bucket_counts[:k])
        )

    def block_offset(self, k: int, t: int) -> int:
        """First measurement row of trial t in pass k."""
        return self.pass_offset(k) + t * self.bucket_counts[k]

    def trial_index(self):
        """(pass, trial) for every trial, in canonical order."""
        return [(k, t) for k in range(self.passes) for t in range(self.trial_counts[k])]

    def support_bound(self, retention_fraction: float) -> int:
        """Most spikes Chaining Pursuit Proper can return."""
        return sum(math.ceil(mk / retention_fraction) for mk in self.spike_budgets)

    def validate_trial(self, k: int, t: int):
        validate_position(k, self.passes, "pass", ValidationError)
        validate_position(t, self.trial_counts[k], "trial", ValidationError)


def derive_schedule(params: SketchParams) -> Schedule:
    base = Fraction(params.a)
    m = params.m

    # K = 1 + ceil(log_a m), computed exactly
    passes, power = 1, Fraction(1)
    while power < m:
        power *= base
        passes += 1

    log_d = math.log2(params.d)
    spike_budgets, trial_counts, bucket_counts = [], [], []
    for k in range(passes):
        spike_budgets.append(math.ceil(Fraction(m) / base**k))
        trial_counts.append(math.ceil(params.c_trials * (k + 1) * log_d))
        bucket_counts.append(max(1, math.ceil(Fraction(params.c_buckets) * m / 2**k)))

    return Schedule(
        d=params.d,
        m=m,
        bit_rows=(params.d - 1).bit_length(),
        spike_budgets=tuple(spike_budgets),
        trial_counts=tuple(trial_counts),
        bucket_counts=tuple(bucket_counts),
    )


def schedule_constant(c_trials: float, c_buckets: float) -> float:
    """c with sum_k T_k * N_k <= c * m * (log2 d)^2 for every d >= 2, 1 <= m <= d."""
    return 4 * c_trials * c_buckets + 3 * c_trials + 2 * c_buckets + 2


def best_m_approx(f: SparseSignal, m: int) -> SparseSignal:
    """f restricted to its m largest-magnitude positions, ties by smaller position."""
    if not (0 <= m <= f.dimension):
        raise ValidationError({"m": f"m must be in range [0, {f.dimension}], not {m}"})
    kept = rank_by_magnitude(f.items(), m)
    return SparseSignal(f.dimension, dict(kept))
