"""
The isolation matrix: for every (pass, trial), a partition of the d signal
positions into N_k buckets.

Explicit matrices draw bucket k of position i from a counter-based
splitmix64 stream keyed by (seed, pass, trial); nothing is stored beyond the
seed. Seeded matrices hold one small HashSeed per (pass, trial) and map
positions through batched polynomial hashing.
"""

import hashlib
import logging
import struct

import numpy as np
from django.core.exceptions import ValidationError

from prf.exceptions import HashFailure
from prf.hashing import HashSeed, draw_seed, hash_batch
from prf.primes import FieldParams, find_prime
from pursuit.conf import pursuit_setting
from pursuit.core import (
    IsolationMode,
    Schedule,
    SketchParams,
    derive_schedule,
    validate_position,
)
from pursuit.exceptions import FormatMismatch, IsolationHashFailure


logger = logging.getLogger(__name__)

MATRIX_MAGIC = b"CPIM"
MATRIX_VERSION = 1

_MASK = (1 << 64) - 1
_GOLDEN = 0x9E3779B97F4A7C15

# magic, version, mode, d, m, a, c_trials, c_buckets, retention, seed, k_rep, L, K
_HEADER = struct.Struct("<4sHBxQQddddQIII")
_PASS = struct.Struct("<QQQ")
_SEED_RECORD = struct.Struct("<QQII")

_MODE_CODES = {IsolationMode.EXPLICIT: 0, IsolationMode.SEEDED: 1}


def _splitmix(value: int) -> int:
    z = (value + _GOLDEN) & _MASK
    z = ((z ^ (z >> 30)) * 0xBF58476D1CE4E5B9) & _MASK
    z = ((z ^ (z >> 27)) * 0x94D049BB133111EB) & _MASK
    return z ^ (z >> 31)


def _mix(z: np.ndarray) -> np.ndarray:
    z = (z ^ (z >> np.uint64(30))) * np.uint64(0xBF58476D1CE4E5B9)
    z = (z ^ (z >> np.uint64(27))) * np.uint64(0x94D049BB133111EB)
    return z ^ (z >> np.uint64(31))


def seeded_degree(spike_budget: int) -> int:
    """Independence degree of pass hashes: max(4 * m_k, 8)."""
    return max(4 * spike_budget, 8)


class IsolationMatrix:
    def __init__(
        self,
        params: SketchParams,
        schedule: Schedule,
        seeds: dict[tuple[int, int], HashSeed] | None = None,
    ):
        self.params = params
        self.schedule = schedule
        self.seeds = seeds or {}
        expected = schedule.total_trials
        if self.mode == IsolationMode.SEEDED and len(self.seeds) != expected:
            raise FormatMismatch(
                f"seeded matrix needs {expected} seeds, got {len(self.seeds)}"
            )

    @property
    def mode(self) -> IsolationMode:
        return self.params.mode

    @property
    def dimension(self) -> int:
        return self.schedule.d

    def _trial_key(self, k: int, t: int) -> int:
        return _splitmix(self.params.seed ^ _splitmix((k << 32) | t))

    def _check_positions(self, positions: np.ndarray):
        outside = (positions < 0) | (positions >= self.dimension)
        if outside.any():
            bad = int(positions[outside][0])
            validate_position(bad, self.dimension, "position", ValidationError)

    def seed_for(self, k: int, t: int) -> HashSeed:
        self.schedule.validate_trial(k, t)
        return self.seeds[(k, t)]

    def buckets_batch(self, k: int, t: int, positions) -> np.ndarray:
        self.schedule.validate_trial(k, t)
        positions = np.asarray(positions, dtype=np.int64).reshape(-1)
        if not positions.size:
            return np.empty(0, dtype=np.int64)
        self._check_positions(positions)

        if self.mode == IsolationMode.EXPLICIT:
            key = np.array([self._trial_key(k, t)], dtype=np.uint64)
            mixed = _mix(key + positions.astype(np.uint64) * np.uint64(_GOLDEN))
            return (mixed % np.uint64(self.schedule.bucket_counts[k])).astype(np.int64)

        try:
            return hash_batch(self.seeds[(k, t)], positions.tolist())
        except HashFailure as failure:
            raise IsolationHashFailure(k, t, failure) from failure

    def bucket_of(self, k: int, t: int, position: int) -> int:
        validate_position(position, self.dimension, "position", ValidationError)
        return int(self.buckets_batch(k, t, [position])[0])

    def table(self, k: int, t: int) -> np.ndarray:
        """Buckets of all d positions in trial t of pass k."""
        return self.buckets_batch(k, t, np.arange(self.dimension, dtype=np.int64))

    def bucket_rows(self, positions, passes=None) -> np.ndarray:
        """
        Global measurement row of every position in every trial of the given
        passes, shape (trials, len(positions)), trials in canonical order.
        """
        positions = np.asarray(positions, dtype=np.int64).reshape(-1)
        passes = range(self.schedule.passes) if passes is None else passes
        trials = [
            (k, t) for k in passes for t in range(self.schedule.trial_counts[k])
        ]
        rows = np.empty((len(trials), positions.size), dtype=np.int64)
        if not positions.size:
            return rows
        self._check_positions(positions)

        if self.mode == IsolationMode.EXPLICIT:
            keys = np.array(
                [self._trial_key(k, t) for k, t in trials], dtype=np.uint64
            ).reshape(-1, 1)
            counts = np.array(
                [self.schedule.bucket_counts[k] for k, _ in trials], dtype=np.uint64
            ).reshape(-1, 1)
            offsets = np.array(
                [self.schedule.block_offset(k, t) for k, t in trials], dtype=np.int64
            ).reshape(-1, 1)
            mixed = _mix(keys + positions.astype(np.uint64) * np.uint64(_GOLDEN))
            return (mixed % counts).astype(np.int64) + offsets

        for row, (k, t) in enumerate(trials):
            rows[row] = self.schedule.block_offset(k, t) + self.buckets_batch(
                k, t, positions
            )
        return rows

    def verify(self):
        """Hash the full domain under every seed so a FAIL surfaces now."""
        for k, t in self.schedule.trial_index():
            self.table(k, t)
        logger.info(
            "verified %d seeded trials over d=%d",
            self.schedule.total_trials,
            self.dimension,
        )


def build(
    params: SketchParams,
    schedule: Schedule | None = None,
    verify: bool | None = None,
) -> IsolationMatrix:
    schedule = schedule or derive_schedule(params)
    if params.mode == IsolationMode.EXPLICIT:
        logger.info(
            "explicit matrix: d=%d m=%d passes=%d trials=%d",
            params.d,
            params.m,
            schedule.passes,
            schedule.total_trials,
        )
        return IsolationMatrix(params, schedule)

    seeds = {}
    for k in range(schedule.passes):
        field = find_prime(params.d, schedule.bucket_counts[k])
        degree = seeded_degree(schedule.spike_budgets[k])
        for t in range(schedule.trial_counts[k]):
            rng = np.random.default_rng([params.seed, k, t])
            seeds[(k, t)] = draw_seed(field, degree, params.rejection_rounds, rng)

    matrix = IsolationMatrix(params, schedule, seeds)
    logger.info(
        "seeded matrix: d=%d m=%d passes=%d trials=%d rounds=%d",
        params.d,
        params.m,
        schedule.passes,
        schedule.total_trials,
        params.rejection_rounds,
    )
    if verify is None:
        verify = params.d <= pursuit_setting("SEEDED_VERIFY_MAX_DIMENSION")
    if verify:
        matrix.verify()
    return matrix


def _header_bytes(params: SketchParams, schedule: Schedule) -> bytes:
    head = _HEADER.pack(
        MATRIX_MAGIC,
        MATRIX_VERSION,
        _MODE_CODES[params.mode],
        params.d,
        params.m,
        params.a,
        params.c_trials,
        params.c_buckets,
        params.retention_fraction,
        params.seed,
        params.k_rep or 0,
        schedule.bit_rows,
        schedule.passes,
    )
    passes = b"".join(
        _PASS.pack(mk, tk, nk)
        for mk, tk, nk in zip(
            schedule.spike_budgets, schedule.trial_counts, schedule.bucket_counts
        )
    )
    return head + passes


def header_digest(matrix: IsolationMatrix) -> bytes:
    return hashlib.sha256(_header_bytes(matrix.params, matrix.schedule)).digest()


def dump_matrix(matrix: IsolationMatrix) -> bytes:
    chunks = [_header_bytes(matrix.params, matrix.schedule)]
    if matrix.mode == IsolationMode.SEEDED:
        for key in matrix.schedule.trial_index():
            seed = matrix.seeds[key]
            chunks.append(
                _SEED_RECORD.pack(seed.field.p, seed.field.r, seed.rounds, seed.degree)
            )
            chunks.append(seed.polys.astype("<u8").tobytes())
    return b"".join(chunks)


def load_matrix(payload: bytes) -> IsolationMatrix:
    try:
        (
            magic,
            version,
            mode_code,
            d,
            m,
            a,
            c_trials,
            c_buckets,
            retention,
            seed,
            k_rep,
            bit_rows,
            passes,
        ) = _HEADER.unpack_from(payload, 0)
    except struct.error as error:
        raise FormatMismatch(f"truncated matrix header: {error}") from error
    if magic != MATRIX_MAGIC:
        raise FormatMismatch(f"not a matrix file (magic {magic!r})")
    if version != MATRIX_VERSION:
        raise FormatMismatch(f"unsupported matrix version {version}")
    modes = {code: mode for mode, code in _MODE_CODES.items()}
    if mode_code not in modes:
        raise FormatMismatch(f"unknown isolation mode code {mode_code}")

    try:
        params = SketchParams(
            d=d,
            m=m,
            a=a,
            c_trials=c_trials,
            c_buckets=c_buckets,
            retention_fraction=retention,
            mode=modes[mode_code],
            seed=seed,
            k_rep=k_rep or None,
        )
    except ValidationError as error:
        raise FormatMismatch(f"invalid matrix parameters: {error}") from error
    schedule = derive_schedule(params)
    offset = _HEADER.size
    try:
        stored = [
            _PASS.unpack_from(payload, offset + k * _PASS.size) for k in range(passes)
        ]
    except struct.error as error:
        raise FormatMismatch(f"truncated pass table: {error}") from error
    expected = list(
        zip(schedule.spike_budgets, schedule.trial_counts, schedule.bucket_counts)
    )
    if bit_rows != schedule.bit_rows or stored != expected:
        raise FormatMismatch("stored schedule does not match its parameters")
    offset += passes * _PASS.size

    seeds = {}
    if params.mode == IsolationMode.SEEDED:
        try:
            fields = [
                find_prime(params.d, schedule.bucket_counts[k])
                for k in range(schedule.passes)
            ]
        except ValidationError as error:
            raise FormatMismatch(
                f"no field for the stored schedule: {error}"
            ) from error
        for k, t in schedule.trial_index():
            try:
                p, r, rounds, degree = _SEED_RECORD.unpack_from(payload, offset)
            except struct.error as error:
                raise FormatMismatch(f"truncated seed record ({k}, {t})") from error
            offset += _SEED_RECORD.size
            expected = (
                fields[k].p,
                fields[k].r,
                params.rejection_rounds,
                seeded_degree(schedule.spike_budgets[k]),
            )
            if (p, r, rounds, degree) != expected:
                raise FormatMismatch(
                    f"seed record ({k}, {t}) has field ({p}, {r}), {rounds} rounds "
                    f"and degree {degree}; the schedule needs {expected}"
                )
            size = rounds * degree * 8
            if len(payload) < offset + size:
                raise FormatMismatch(f"truncated seed coefficients ({k}, {t})")
            polys = np.frombuffer(
                payload, dtype="<u8", count=rounds * degree, offset=offset
            )
            offset += size
            try:
                seeds[(k, t)] = HashSeed(
                    field=FieldParams(p, r),
                    degree=degree,
                    polys=polys.astype(np.uint64).reshape(rounds, degree),
                )
            except (ValueError, ValidationError) as error:
                raise FormatMismatch(
                    f"invalid seed record ({k}, {t}): {error}"
                ) from error
    if offset != len(payload):
        raise FormatMismatch(f"{len(payload) - offset} trailing bytes after matrix")
    return IsolationMatrix(params, schedule, seeds)
