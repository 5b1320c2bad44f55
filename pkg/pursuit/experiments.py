"""Sweeps of generate -> sketch -> (perturb) -> decode -> report runs."""

import csv
import logging
import time
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass, field
from itertools import product
from typing import IO, Iterable, Sequence

import numpy as np

from pursuit.core import (
    DEFAULT_C_BUCKETS,
    DEFAULT_C_TRIALS,
    DEFAULT_PASS_BASE,
    DEFAULT_RETENTION_FRACTION,
    IsolationMode,
    SketchParams,
    SparseSignal,
    derive_schedule,
)
from pursuit.decoder import recover
from pursuit.exceptions import IsolationHashFailure
from pursuit.isolation import build
from pursuit.metrics import RecoveryReport, l1_norm, recovery_report, stability_constant
from pursuit.signals import NoiseModel, generate_parts
from pursuit.sketcher import perturb_sketch, sketch_signal


logger = logging.getLogger(__name__)

REPORT_FIELDS = (
    "d",
    "m",
    "a",
    "seed",
    "noise_l1",
    "meas_noise_l1",
    "l1_error",
    "opt_error",
    "ratio",
    "weak1_error",
    "support_out",
    "sketch_bytes",
    "encode_ms",
    "decode_ms",
)


@dataclass(frozen=True)
class ExperimentCell:
    d: int
    m: int
    noise: NoiseModel = field(default_factory=NoiseModel)
    meas_noise: float = 0.0
    runs: int = 1
    seed: int = 0
    a: float = DEFAULT_PASS_BASE
    c_trials: float = DEFAULT_C_TRIALS
    c_buckets: float = DEFAULT_C_BUCKETS
    retention_fraction: float = DEFAULT_RETENTION_FRACTION
    mode: IsolationMode = IsolationMode.EXPLICIT
    k_rep: int | None = None
    integer: bool = False

    def run_seed(self, run: int) -> int:
        entropy = np.random.SeedSequence([self.seed, self.d, self.m, run])
        return int(entropy.generate_state(1, dtype=np.uint64)[0])

    def params(self, seed: int) -> SketchParams:
        return SketchParams(
            d=self.d,
            m=self.m,
            a=self.a,
            c_trials=self.c_trials,
            c_buckets=self.c_buckets,
            retention_fraction=self.retention_fraction,
            mode=self.mode,
            seed=seed,
            k_rep=self.k_rep,
        )

    def __str__(self):
        return (
            f"d={self.d} m={self.m} noise={self.noise} "
            f"meas_noise={self.meas_noise:g} mode={self.mode.value}"
        )


def sweep_cells(
    dimensions: Sequence[int],
    sparsities: Sequence[int],
    noises: Sequence[NoiseModel] = (NoiseModel(),),
    meas_noises: Sequence[float] = (0.0,),
    **options,
) -> list[ExperimentCell]:
    grid = product(dimensions, sparsities, noises, meas_noises)
    return [
        ExperimentCell(d=d, m=m, noise=noise, meas_noise=meas_noise, **options)
        for d, m, noise, meas_noise in grid
        if m <= d
    ]


def run_once(cell: ExperimentCell, run: int) -> RecoveryReport:
    """
    One run of the cell. A hash FAIL while building, sketching or decoding
    counts as a failed run with a zero estimate.
    """
    seed = cell.run_seed(run)
    spikes, tail = generate_parts(cell.d, cell.m, cell.noise, seed, cell.integer)
    f = spikes + tail
    params = cell.params(seed)
    schedule = derive_schedule(params)
    meas_noise_l1 = cell.meas_noise * l1_norm(f)
    encode_ms = decode_ms = 0.0

    try:
        matrix = build(params, schedule)

        started = time.perf_counter()
        sketch = sketch_signal(f, matrix)
        encode_ms = (time.perf_counter() - started) * 1000

        if meas_noise_l1 > 0:
            rng = np.random.default_rng([seed, 1])
            sketch = perturb_sketch(sketch, meas_noise_l1, cell.m, rng)

        started = time.perf_counter()
        estimate = recover(sketch, matrix, cell.m)
        decode_ms = (time.perf_counter() - started) * 1000
    except IsolationHashFailure as failure:
        logger.warning("%s run %d: %s", cell, run, failure)
        estimate = SparseSignal(cell.d)

    return recovery_report(
        f,
        estimate,
        cell.m,
        {"encode_ms": encode_ms, "decode_ms": decode_ms},
        a=cell.a,
        seed=seed,
        noise_l1=l1_norm(tail),
        meas_noise_l1=meas_noise_l1,
        sketch_bytes=schedule.scalar_count * 8,
    )


def run_cell(cell: ExperimentCell, workers: int = 1) -> list[RecoveryReport]:
    if workers <= 1:
        return [run_once(cell, run) for run in range(cell.runs)]
    with ThreadPoolExecutor(max_workers=workers) as executor:
        return list(executor.map(lambda run: run_once(cell, run), range(cell.runs)))


@dataclass(frozen=True)
class CellSummary:
    runs: int
    exact: int
    median_ratio: float
    median_weak1_ratio: float
    median_stability: float


def summarize(reports: Sequence[RecoveryReport]) -> CellSummary:
    if not reports:
        return CellSummary(0, 0, float("nan"), float("nan"), float("nan"))
    return CellSummary(
        runs=len(reports),
        exact=sum(report.exact for report in reports),
        median_ratio=float(np.median([report.ratio for report in reports])),
        median_weak1_ratio=float(np.median([report.weak1_ratio for report in reports])),
        median_stability=float(np.median([stability_constant(r) for r in reports])),
    )


def run_sweep(
    cells: Iterable[ExperimentCell], workers: int = 1
) -> list[tuple[ExperimentCell, list[RecoveryReport]]]:
    results = []
    for cell in cells:
        reports = run_cell(cell, workers)
        summary = summarize(reports)
        logger.info(
            "%s: exact %d/%d, median ratio %.4g, median weak-1 ratio %.4g, "
            "median stability constant %.4g",
            cell,
            summary.exact,
            summary.runs,
            summary.median_ratio,
            summary.median_weak1_ratio,
            summary.median_stability,
        )
        results.append((cell, reports))
    return results


def write_reports(rows: Iterable[dict], stream: IO[str]):
    writer = csv.DictWriter(
        stream, fieldnames=REPORT_FIELDS, extrasaction="ignore", lineterminator="\n"
    )
    writer.writeheader()
    for row in rows:
        writer.writerow(row)
