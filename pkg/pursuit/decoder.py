"""
Chaining Pursuit: recover spikes pass by pass from a sketch, vote across
trials, estimate values by medians, subtract the encoded spikes from the
remaining passes and finally prune to m terms.
"""

import logging
import math
from collections import defaultdict
from typing import NamedTuple, Sequence

import numpy as np
from django.core.exceptions import ValidationError

from pursuit.bittest import decode_block
from pursuit.core import SparseSignal, rank_by_magnitude
from pursuit.isolation import IsolationMatrix
from pursuit.sketcher import Sketch, add_spikes, check_matrix


logger = logging.getLogger(__name__)


class Spike(NamedTuple):
    position: int
    value: float


SpikeList = list[Spike]


def run_trial(sketch: Sketch, k: int, t: int) -> SpikeList:
    """The at most m_k largest distinct spikes read off trial t of pass k."""
    positions, values, valid = decode_block(sketch.block(k, t), sketch.schedule.d)
    keep = valid & (values != 0.0)
    positions, values = positions[keep], values[keep]

    # largest |value| first, so the first hit of every position is its best estimate
    order = np.lexsort((-values, positions, -np.abs(values)))
    positions, values = positions[order], values[order]
    _, first = np.unique(positions, return_index=True)
    first = np.sort(first)[:sketch.schedule.spike_budgets[k]]
    return [Spike(int(positions[i]), float(values[i])) for i in first]


def combine_trials(
    trial_lists: Sequence[SpikeList],
    trial_count: int,
    retention_fraction: float,
    spike_budget: int,
) -> SpikeList:
    estimates = defaultdict(list)
    for spikes in trial_lists:
        for position, value in spikes:
            estimates[position].append(value)

    threshold = retention_fraction * trial_count
    kept = [
        (position, float(np.median(values)))
        for position, values in estimates.items()
        if len(values) > threshold
    ]
    cap = math.ceil(spike_budget / retention_fraction)
    return [Spike(*item) for item in rank_by_magnitude(kept, cap)]


def chaining_pursuit_proper(sketch: Sketch, matrix: IsolationMatrix) -> SpikeList:
    check_matrix(sketch, matrix)
    schedule = sketch.schedule
    retention_fraction = matrix.params.retention_fraction
    residual = sketch.copy()
    estimate = defaultdict(float)

    for k in range(schedule.passes):
        trial_lists = [
            run_trial(residual, k, t) for t in range(schedule.trial_counts[k])
        ]
        spikes = combine_trials(
            trial_lists,
            schedule.trial_counts[k],
            retention_fraction,
            schedule.spike_budgets[k],
        )
        for position, value in spikes:
            estimate[position] += value

        later = range(k + 1, schedule.passes)
        if spikes and later:
            positions = [spike.position for spike in spikes]
            values = [-spike.value for spike in spikes]
            add_spikes(residual, matrix, positions, values, passes=later)
        logger.debug(
            "pass %d: %d candidates over %d trials, %d spikes kept",
            k,
            sum(len(trial) for trial in trial_lists),
            schedule.trial_counts[k],
            len(spikes),
        )

    return [
        Spike(position, value)
        for position, value in sorted(estimate.items())
        if value != 0.0
    ]


def prune(spikes: SpikeList, m: int) -> SpikeList:
    """The m spikes of largest |value|, ties by smaller position."""
    return [Spike(*item) for item in rank_by_magnitude(spikes, m)]


def recover(sketch: Sketch, matrix: IsolationMatrix, m: int) -> SparseSignal:
    if not (0 <= m <= matrix.dimension):
        raise ValidationError(
            {"m": f"m must be in range [0, {matrix.dimension}], not {m}"}
        )
    spikes = prune(chaining_pursuit_proper(sketch, matrix), m)
    return SparseSignal(matrix.dimension, dict(spikes))
