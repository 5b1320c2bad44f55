"""
Bit tests: an all-ones row plus L rows whose column i is the binary
expansion of i, most significant bit first.
"""

from dataclasses import dataclass
from typing import NamedTuple

import numpy as np
from django.core.exceptions import ValidationError

from pursuit.core import Measurement, validate_position


@dataclass(frozen=True)
class BitTestLayout:
    bit_rows: int

    @classmethod
    def for_dimension(cls, d: int) -> "BitTestLayout":
        return cls((d - 1).bit_length())

    def bits(self, positions) -> np.ndarray:
        """(n, L) 0/1 matrix: row r is the MSB-first expansion of positions[r]."""
        positions = np.asarray(positions, dtype=np.int64).reshape(-1, 1)
        shifts = np.arange(self.bit_rows - 1, -1, -1, dtype=np.int64)
        return (positions >> shifts) & 1

    def columns(self, positions) -> np.ndarray:
        """(n, L + 1) float rows (1, bits...) of the full bit-test matrix B."""
        bits = self.bits(positions)
        ones = np.ones((bits.shape[0], 1), dtype=np.float64)
        return np.hstack([ones, bits.astype(np.float64)])

    def assemble(self, bits: np.ndarray) -> np.ndarray:
        """Positions from (n, L) MSB-first bit rows."""
        weights = np.left_shift(1, np.arange(self.bit_rows - 1, -1, -1, dtype=np.int64))
        return bits.astype(np.int64) @ weights


class DecodedSpike(NamedTuple):
    position: int
    value: float
    valid: bool


def accumulate(
    meas: Measurement,
    position: int,
    value: float,
    dimension: int | None = None,
) -> Measurement:
    """Add value at position into the measurement, in place."""
    limit = dimension if dimension is not None else 1 << meas.bit_rows
    validate_position(position, limit, "position", ValidationError)
    layout = BitTestLayout(meas.bit_rows)
    meas.total += value
    meas.bits += value * layout.bits([position])[0]
    return meas


def decode_block(block: np.ndarray, dimension: int):
    """
    Decode every (c, b(0), ..., b(L-1)) row of a block.

    Bit j is one iff |b(j)| > |c - b(j)|; ties decode to zero. Returns
    positions, values and a mask of rows whose position lies inside [0, d).
    """
    block = np.atleast_2d(block)
    totals = block[:, 0]
    bit_mass = block[:, 1:]
    bits = np.abs(bit_mass) > np.abs(totals[:, None] - bit_mass)
    positions = BitTestLayout(bit_mass.shape[1]).assemble(bits)
    return positions, totals.copy(), positions < dimension


def decode_measurement(meas: Measurement, dimension: int | None = None) -> DecodedSpike:
    limit = dimension if dimension is not None else 1 << meas.bit_rows
    positions, values, valid = decode_block(meas.as_row(), limit)
    return DecodedSpike(int(positions[0]), float(values[0]), bool(valid[0]))
