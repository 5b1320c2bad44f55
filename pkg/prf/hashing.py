"""
Seeded m-wise independent hashing of positions into r buckets.

A seed holds K_rep random polynomials of `degree` coefficients over GF(p).
Position j takes the first round k whose value g_k(j) lands below the
cutoff r * (p // r) and folds it into [0, r); if every round rejects, the
batch fails.
"""

import logging
from dataclasses import dataclass
from typing import Sequence

import numpy as np

from prf.evaluation import cached_product_tree, mpe
from prf.exceptions import HashFailure
from prf.polynomials import Polynomial
from prf.primes import FieldParams


logger = logging.getLogger(__name__)


@dataclass(frozen=True, eq=False)
class HashSeed:
    field: FieldParams
    degree: int
    polys: np.ndarray

    def __post_init__(self):
        polys = np.asarray(self.polys, dtype=np.uint64)
        if polys.ndim != 2 or polys.shape[0] < 1 or polys.shape[1] != self.degree:
            raise ValueError(
                f"seed needs at least one round of {self.degree} coefficients, "
                f"got shape {polys.shape}"
            )
        if polys.size and int(polys.max()) >= self.field.p:
            raise ValueError(f"seed coefficients must lie in [0, {self.field.p})")
        polys.setflags(write=False)
        object.__setattr__(self, "polys", polys)

    @property
    def rounds(self) -> int:
        return self.polys.shape[0]

    def polynomial(self, round_index: int) -> Polynomial:
        return Polynomial.from_coefficients(
            (int(c) for c in self.polys[round_index]), self.field.p
        )

    def __eq__(self, other):
        if not isinstance(other, HashSeed):
            return NotImplemented
        return (
            self.field == other.field
            and self.degree == other.degree
            and np.array_equal(self.polys, other.polys)
        )


def draw_seed(
    field: FieldParams,
    degree: int,
    rounds: int,
    rng: np.random.Generator,
) -> HashSeed:
    polys = rng.integers(0, field.p, size=(rounds, degree), dtype=np.uint64)
    return HashSeed(field=field, degree=degree, polys=polys)


def hash_batch(seed: HashSeed, positions: Sequence[int]) -> np.ndarray:
    """
    Bucket of every position under the seed, evaluating each round's
    polynomial over the whole batch by multipoint evaluation.

    Raises HashFailure when some position is rejected in all rounds.
    """
    positions = tuple(int(position) for position in positions)
    if not positions:
        return np.empty(0, dtype=np.int64)
    if len(set(positions)) != len(positions):
        raise ValueError("hashed positions must be distinct")

    field = seed.field
    tree = cached_product_tree(positions, field.p)
    buckets = np.full(len(positions), -1, dtype=np.int64)
    pending = np.ones(len(positions), dtype=bool)

    for round_index in range(seed.rounds):
        values = np.array(
            mpe(seed.polynomial(round_index), positions, field.p, tree=tree),
            dtype=np.int64,
        )
        accepted = pending & (values < field.cutoff)
        buckets[accepted] = values[accepted] // field.fold_width
        pending &= ~accepted
        if not pending.any():
            return buckets

    failed = [positions[i] for i in np.flatnonzero(pending)]
    logger.warning(
        "hash seed rejected %d of %d positions in all %d rounds",
        len(failed),
        len(positions),
        seed.rounds,
    )
    raise HashFailure(failed, seed.rounds)
