"""
Random test signals and the line-oriented signal file format:

    #dim 4096
    17<TAB>-3.0
    1022<TAB>8.25
"""

import math
from dataclasses import dataclass
from typing import IO

import numpy as np
from django.core.exceptions import ValidationError
from django.db import models

from pursuit.core import SparseSignal
from pursuit.exceptions import FormatMismatch


DIMENSION_HEADER = "#dim"
SPIKE_RANGE = (1, 10)
NOISE_SPREAD = 10


class NoiseKind(models.TextChoices):
    NONE = "none", "No noise"
    L1 = "l1", "Absolute l1 budget"
    L1_RELATIVE = "l1-rel", "l1 budget relative to the spikes"
    WEAK1 = "weak1", "Weak-l1 tail"


@dataclass(frozen=True)
class NoiseModel:
    kind: NoiseKind = NoiseKind.NONE
    level: float = 0.0

    def __post_init__(self):
        object.__setattr__(self, "kind", NoiseKind(self.kind))
        if self.level < 0 or not math.isfinite(self.level):
            raise ValidationError(
                {"noise": f"noise level must be finite and >= 0, not {self.level}"}
            )

    @classmethod
    def parse(cls, text: str) -> "NoiseModel":
        """'none', 'l1:EPS', 'l1-rel:EPS' or 'weak1:R'."""
        kind, _, level = text.strip().partition(":")
        if kind not in NoiseKind.values:
            raise ValidationError(
                {
                    "noise": f"unknown noise model {kind!r}, "
                    f"expected one of {NoiseKind.values}"
                }
            )
        if kind == NoiseKind.NONE:
            return cls()
        try:
            return cls(kind, float(level))
        except ValueError:
            raise ValidationError({"noise": f"noise level {level!r} is not a number"})

    def __str__(self):
        if self.kind == NoiseKind.NONE:
            return "none"
        return f"{self.kind.value}:{self.level:g}"


def sample_spikes(
    d: int, m: int, rng: np.random.Generator, integer: bool = False
) -> SparseSignal:
    """m spikes at distinct uniform positions, magnitudes in [1, 10], random signs."""
    if not (0 <= m <= d):
        raise ValidationError({"m": f"m must be in range [0, {d}], not {m}"})
    low, high = SPIKE_RANGE
    positions = rng.choice(d, size=m, replace=False)
    if integer:
        magnitudes = rng.integers(low, high + 1, size=m).astype(np.float64)
    else:
        magnitudes = rng.uniform(low, high, size=m)
    signs = rng.choice([-1.0, 1.0], size=m)
    return SparseSignal.from_arrays(d, positions, signs * magnitudes)


def sample_noise(
    spikes: SparseSignal,
    noise: NoiseModel,
    rng: np.random.Generator,
) -> SparseSignal:
    """Noise on positions off the spikes' support."""
    d = spikes.dimension
    free = np.setdiff1d(np.arange(d, dtype=np.int64), spikes.positions)
    if noise.kind == NoiseKind.NONE or noise.level == 0 or not free.size:
        return SparseSignal(d)

    if noise.kind == NoiseKind.WEAK1:
        positions = rng.permutation(free)
        magnitudes = noise.level / np.arange(1, positions.size + 1, dtype=np.float64)
    else:
        budget = noise.level
        if noise.kind == NoiseKind.L1_RELATIVE:
            budget *= float(np.sum(np.abs(spikes.values)))
        count = min(NOISE_SPREAD * max(spikes.support_size, 1), free.size)
        positions = rng.choice(free, size=count, replace=False)
        magnitudes = np.full(count, budget / count)
    signs = rng.choice([-1.0, 1.0], size=positions.size)
    return SparseSignal.from_arrays(d, positions, signs * magnitudes)


def generate_parts(
    d: int,
    m: int,
    noise: NoiseModel | None = None,
    seed: int = 0,
    integer: bool = False,
) -> tuple[SparseSignal, SparseSignal]:
    rng = np.random.default_rng(seed)
    spikes = sample_spikes(d, m, rng, integer=integer)
    return spikes, sample_noise(spikes, noise or NoiseModel(), rng)


def generate_signal(
    d: int,
    m: int,
    noise: NoiseModel | None = None,
    seed: int = 0,
    integer: bool = False,
) -> SparseSignal:
    spikes, tail = generate_parts(d, m, noise, seed, integer)
    return spikes + tail


def write_signal(f: SparseSignal, stream: IO[str]):
    stream.write(f"{DIMENSION_HEADER} {f.dimension}\n")
    for position, value in f.items():
        stream.write(f"{position}\t{value!r}\n")


def read_signal(stream: IO[str]) -> SparseSignal:
    lines = [line.rstrip("\n") for line in stream if line.strip()]
    if not lines:
        raise FormatMismatch("empty signal file")
    marker, _, dimension = lines[0].partition(" ")
    if marker != DIMENSION_HEADER or not dimension.strip().isdigit():
        raise FormatMismatch(f"signal file must start with '{DIMENSION_HEADER} d'")
    d = int(dimension)

    entries = {}
    previous = -1
    for number, line in enumerate(lines[1:], start=2):
        try:
            position_text, value_text = line.split("\t")
            position, value = int(position_text), float(value_text)
        except ValueError:
            raise FormatMismatch(f"line {number}: expected 'position<TAB>value'")
        if not (previous < position < d):
            raise FormatMismatch(
                f"line {number}: positions must increase strictly inside [0, {d})"
            )
        if not math.isfinite(value):
            raise FormatMismatch(f"line {number}: value {value_text!r} is not finite")
        entries[position] = value
        previous = position
    try:
        return SparseSignal(d, entries)
    except ValidationError as error:
        raise FormatMismatch(f"invalid signal file: {error}") from error
