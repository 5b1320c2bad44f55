"""
The measurement operator: the bit-test matrix row-tensored with the
isolation matrix. A sketch stores one (c, b(0), ..., b(L-1)) row per
measurement, trials laid out pass by pass, buckets in order within a trial.
"""

import struct
from typing import Iterable

import numpy as np
from django.core.exceptions import ValidationError

from pursuit.bittest import BitTestLayout
from pursuit.core import Measurement, Schedule, SparseSignal, validate_position
from pursuit.exceptions import FormatMismatch, ScheduleMismatch
from pursuit.isolation import IsolationMatrix, header_digest


SKETCH_MAGIC = b"CPSK"
SKETCH_VERSION = 1

# magic, version, matrix header digest, d, L, K
_HEADER = struct.Struct("<4sH32sQII")
_PASS = struct.Struct("<QQQ")


class Sketch:
    def __init__(self, schedule: Schedule, data: np.ndarray):
        shape = (schedule.measurement_count, schedule.measurement_width)
        data = np.asarray(data, dtype=np.float64)
        if data.shape != shape:
            raise ScheduleMismatch(
                f"sketch payload has shape {data.shape}, schedule needs {shape}"
            )
        self.schedule = schedule
        self.data = data

    @classmethod
    def zeros(cls, schedule: Schedule) -> "Sketch":
        return cls(
            schedule,
            np.zeros((schedule.measurement_count, schedule.measurement_width)),
        )

    def block(self, k: int, t: int) -> np.ndarray:
        """The N_k measurements of trial t in pass k, as a view."""
        self.schedule.validate_trial(k, t)
        start = self.schedule.block_offset(k, t)
        return self.data[start:start + self.schedule.bucket_counts[k]]

    def measurement(self, k: int, t: int, bucket: int) -> Measurement:
        block = self.block(k, t)
        validate_position(bucket, block.shape[0], "bucket", ValidationError)
        return Measurement.from_row(block[bucket])

    @property
    def scalar_count(self) -> int:
        return self.data.size

    @property
    def nbytes(self) -> int:
        return self.data.nbytes

    def l1_norm(self) -> float:
        return float(np.abs(self.data).sum())

    def is_zero(self) -> bool:
        return not self.data.any()

    def copy(self) -> "Sketch":
        return Sketch(self.schedule, self.data.copy())

    def _check_schedule(self, other: "Sketch"):
        if self.schedule != other.schedule:
            raise ScheduleMismatch("sketches were built on different schedules")

    def __add__(self, other: "Sketch") -> "Sketch":
        self._check_schedule(other)
        return Sketch(self.schedule, self.data + other.data)

    def __sub__(self, other: "Sketch") -> "Sketch":
        self._check_schedule(other)
        return Sketch(self.schedule, self.data - other.data)

    def __isub__(self, other: "Sketch") -> "Sketch":
        self._check_schedule(other)
        self.data -= other.data
        return self

    def __eq__(self, other):
        if not isinstance(other, Sketch):
            return NotImplemented
        return self.schedule == other.schedule and np.array_equal(self.data, other.data)


def check_matrix(sketch: Sketch, matrix: IsolationMatrix):
    if sketch.schedule != matrix.schedule:
        raise ScheduleMismatch("sketch and isolation matrix use different schedules")


def add_spikes(
    sketch: Sketch,
    matrix: IsolationMatrix,
    positions,
    values,
    passes: Iterable[int] | None = None,
) -> Sketch:
    """Accumulate value * (column of position) into the sketch, in place."""
    check_matrix(sketch, matrix)
    positions = np.asarray(positions, dtype=np.int64).reshape(-1)
    values = np.asarray(values, dtype=np.float64).reshape(-1)
    if not positions.size:
        return sketch

    rows = matrix.bucket_rows(positions, passes)
    layout = BitTestLayout(sketch.schedule.bit_rows)
    columns = layout.columns(positions) * values[:, None]
    contributions = np.broadcast_to(columns, rows.shape + columns.shape[1:])
    np.add.at(
        sketch.data,
        rows.reshape(-1),
        contributions.reshape(-1, sketch.schedule.measurement_width),
    )
    return sketch


def sketch_signal(f: SparseSignal, matrix: IsolationMatrix) -> Sketch:
    if f.dimension != matrix.dimension:
        raise ValidationError(
            {
                "dimension": f"signal dimension {f.dimension} does not match "
                f"matrix dimension {matrix.dimension}"
            }
        )
    sketch = Sketch.zeros(matrix.schedule)
    return add_spikes(sketch, matrix, f.positions, f.values)


def update(
    sketch: Sketch, matrix: IsolationMatrix, position: int, delta: float
) -> Sketch:
    """Turn the sketch of f into the sketch of f + delta * e_position, in place."""
    validate_position(position, matrix.dimension, "position", ValidationError)
    return add_spikes(sketch, matrix, [position], [delta])


def spike_arrays(spikes) -> tuple[np.ndarray, np.ndarray]:
    items = list(spikes.items()) if isinstance(spikes, SparseSignal) else list(spikes)
    positions = np.array([int(position) for position, _ in items], dtype=np.int64)
    values = np.array([float(value) for _, value in items], dtype=np.float64)
    if np.unique(positions).size != positions.size:
        raise ValidationError({"position": "spike positions must be distinct"})
    return positions, values


def encode_spikes(spikes, matrix: IsolationMatrix, passes=None) -> Sketch:
    positions, values = spike_arrays(spikes)
    return add_spikes(Sketch.zeros(matrix.schedule), matrix, positions, values, passes)


def subtract(sketch: Sketch, other: Sketch) -> Sketch:
    return sketch - other


def perturb_sketch(
    sketch: Sketch,
    budget: float,
    slots: int,
    rng: np.random.Generator,
) -> Sketch:
    """
    A copy of the sketch plus a perturbation y with ||y||_1 = budget, spread
    evenly over `slots` distinct scalars with random signs.
    """
    perturbed = sketch.copy()
    if budget <= 0:
        return perturbed
    slots = max(1, min(slots, sketch.scalar_count))
    chosen = rng.choice(sketch.scalar_count, size=slots, replace=False)
    signs = rng.choice([-1.0, 1.0], size=slots)
    perturbed.data.reshape(-1)[chosen] += signs * (budget / slots)
    return perturbed


def dump_sketch(sketch: Sketch, matrix: IsolationMatrix) -> bytes:
    check_matrix(sketch, matrix)
    schedule = sketch.schedule
    head = _HEADER.pack(
        SKETCH_MAGIC,
        SKETCH_VERSION,
        header_digest(matrix),
        schedule.d,
        schedule.bit_rows,
        schedule.passes,
    )
    passes = b"".join(
        _PASS.pack(mk, tk, nk)
        for mk, tk, nk in zip(
            schedule.spike_budgets, schedule.trial_counts, schedule.bucket_counts
        )
    )
    return head + passes + sketch.data.astype("<f8").tobytes()


def load_sketch(payload: bytes, matrix: IsolationMatrix) -> Sketch:
    try:
        magic, version, digest, d, bit_rows, passes = _HEADER.unpack_from(payload, 0)
    except struct.error as error:
        raise FormatMismatch(f"truncated sketch header: {error}") from error
    if magic != SKETCH_MAGIC:
        raise FormatMismatch(f"not a sketch file (magic {magic!r})")
    if version != SKETCH_VERSION:
        raise FormatMismatch(f"unsupported sketch version {version}")
    if digest != header_digest(matrix):
        raise FormatMismatch("sketch was produced with a different isolation matrix")

    schedule = matrix.schedule
    offset = _HEADER.size
    try:
        stored = [
            _PASS.unpack_from(payload, offset + k * _PASS.size) for k in range(passes)
        ]
    except struct.error as error:
        raise FormatMismatch(f"truncated sketch pass table: {error}") from error
    expected = list(
        zip(schedule.spike_budgets, schedule.trial_counts, schedule.bucket_counts)
    )
    if d != schedule.d or bit_rows != schedule.bit_rows or stored != expected:
        raise FormatMismatch("sketch schedule does not match the isolation matrix")
    offset += passes * _PASS.size

    expected_size = schedule.scalar_count * 8
    if len(payload) - offset != expected_size:
        raise FormatMismatch(
            f"sketch payload has {len(payload) - offset} bytes, "
            f"expected {expected_size}"
        )
    data = np.frombuffer(payload, dtype="<f8", offset=offset).astype(np.float64)
    return Sketch(schedule, data.reshape(schedule.measurement_count, -1))
