import math
from dataclasses import dataclass, field
from typing import Iterable

import numpy as np
from django.core.exceptions import ValidationError

from pursuit.core import Schedule, SparseSignal, best_m_approx
from pursuit.isolation import IsolationMatrix
from pursuit.sketcher import sketch_signal


def l1_norm(f: SparseSignal) -> float:
    # entries are kept in ascending position order
    return float(np.sum(np.abs(f.values)))


def weak1_norm(f: SparseSignal) -> float:
    """max over i of i * |f|_(i), magnitudes sorted descending, i from 1."""
    if not f.support_size:
        return 0.0
    magnitudes = np.sort(np.abs(f.values))[::-1]
    ranks = np.arange(1, magnitudes.size + 1, dtype=np.float64)
    return float(np.max(ranks * magnitudes))


def error_ratio(error: float, reference: float) -> float:
    """error / reference, with 0/0 = 1 and x/0 = inf."""
    if reference == 0:
        return 1.0 if error == 0 else math.inf
    return error / reference


@dataclass(frozen=True)
class RecoveryReport:
    d: int
    m: int
    l1_error: float
    opt_error: float
    ratio: float
    weak1_error: float
    support_out: int
    a: float = 0.0
    seed: int = 0
    noise_l1: float = 0.0
    meas_noise_l1: float = 0.0
    sketch_bytes: int = 0
    encode_ms: float = 0.0
    decode_ms: float = 0.0

    @property
    def exact(self) -> bool:
        return self.l1_error == 0

    @property
    def weak1_ratio(self) -> float:
        return error_ratio(self.weak1_error, self.opt_error)


def recovery_report(
    f: SparseSignal,
    estimate: SparseSignal,
    m: int,
    timings: dict | None = None,
    **context,
) -> RecoveryReport:
    residual = f - estimate
    l1_error = l1_norm(residual)
    opt_error = l1_norm(f - best_m_approx(f, m))
    timings = timings or {}
    return RecoveryReport(
        d=f.dimension,
        m=m,
        l1_error=l1_error,
        opt_error=opt_error,
        ratio=error_ratio(l1_error, opt_error),
        weak1_error=weak1_norm(residual),
        support_out=estimate.support_size,
        encode_ms=timings.get("encode_ms", 0.0),
        decode_ms=timings.get("decode_ms", 0.0),
        **context,
    )


def stability_constant(report: RecoveryReport) -> float:
    """l1_error / ((1 + ln m) * (noise_l1 + meas_noise_l1))."""
    noise = (1 + math.log(report.m)) * (report.noise_l1 + report.meas_noise_l1)
    return error_ratio(report.l1_error, noise)


def basis_image_norm(schedule: Schedule, position: int) -> int:
    """||Phi e_i||_1: each trial adds the total row plus one row per set bit of i."""
    return (1 + int(position).bit_count()) * schedule.total_trials


def analytic_distortion_bound(schedule: Schedule) -> int:
    return (1 + schedule.bit_rows) * schedule.total_trials


@dataclass(frozen=True)
class DistortionSample:
    a_emp: float
    b_emp: float
    analytic_bound: int
    ratios: tuple[float, ...] = field(default=(), repr=False)

    @property
    def distortion(self) -> float:
        return error_ratio(self.b_emp, self.a_emp)


def distortion_sample(
    matrix: IsolationMatrix,
    pairs: Iterable[tuple[SparseSignal, SparseSignal]],
) -> DistortionSample:
    """Smallest and largest ||Phi(f - g)||_1 / ||f - g||_1 over the pairs."""
    ratios = []
    for f, g in pairs:
        difference = f - g
        distance = l1_norm(difference)
        if distance == 0:
            raise ValidationError({"pairs": "distortion pairs must be distinct"})
        ratios.append(sketch_signal(difference, matrix).l1_norm() / distance)
    if not ratios:
        raise ValidationError({"pairs": "at least one signal pair is required"})
    return DistortionSample(
        a_emp=min(ratios),
        b_emp=max(ratios),
        analytic_bound=analytic_distortion_bound(matrix.schedule),
        ratios=tuple(ratios),
    )
