"""Multipoint evaluation through a product tree and a remainder tree."""

from functools import lru_cache
from typing import Sequence

from prf.polynomials import (
    Polynomial,
    ReductionTable,
    horner,
    poly_mod,
    poly_mul,
)


# below this many points a subtree's remainder is evaluated directly
DIRECT_EVALUATION_SIZE = 8

PADDING_POINT = 0


class ProductTree:
    """
    Level j holds 2^j nodes; node (j, k) is the product of (x - a_i) over
    the k-th block of points at that depth. Level 0 is the root, the last
    level holds the linear factors.
    """

    def __init__(self, points: Sequence[int], p: int):
        if not points:
            raise ValueError("a product tree needs at least one point")
        self.p = p
        self.count = len(points)
        size = 1 << (self.count - 1).bit_length()
        self.points = tuple(int(a) % p for a in points) + (PADDING_POINT,) * (
            size - self.count
        )

        level = [Polynomial.linear_factor(a, p) for a in self.points]
        levels = [level]
        while len(level) > 1:
            level = [
                poly_mul(level[i], level[i + 1], p) for i in range(0, len(level), 2)
            ]
            levels.append(level)
        self.levels = levels[::-1]
        self._tables = {}

    @property
    def depth(self) -> int:
        return len(self.levels) - 1

    @property
    def root(self) -> Polynomial:
        return self.levels[0][0]

    def node(self, j: int, k: int) -> Polynomial:
        return self.levels[j][k]

    def block(self, j: int, k: int) -> tuple[int, ...]:
        width = len(self.points) >> j
        return self.points[k * width:(k + 1) * width]

    def table(self, j: int, k: int) -> ReductionTable:
        table = self._tables.get((j, k))
        if table is None:
            # concurrent callers all get whichever table was stored first
            table = self._tables.setdefault(
                (j, k), ReductionTable(self.levels[j][k], self.p)
            )
        return table


def product_tree(points: Sequence[int], p: int) -> ProductTree:
    return ProductTree(points, p)


@lru_cache(maxsize=64)
def cached_product_tree(points: tuple[int, ...], p: int) -> ProductTree:
    """Trees depend only on (points, p); hashing reuses them across rounds."""
    return ProductTree(points, p)


def mpe(
    g: Polynomial,
    points: Sequence[int],
    p: int,
    tree: ProductTree | None = None,
) -> list[int]:
    """g(a) for every point a, by descending the product tree with poly_mod."""
    if not points:
        return []
    if tree is None:
        tree = product_tree(points, p)

    remainders = [poly_mod(g, tree.root, p, tree.table(0, 0))]
    values = []
    for j in range(tree.depth + 1):
        width = len(tree.points) >> j
        if width <= DIRECT_EVALUATION_SIZE:
            for k, remainder in enumerate(remainders):
                values.extend(horner(remainder, a, p) for a in tree.block(j, k))
            break
        remainders = [
            poly_mod(remainder, tree.node(j + 1, child), p, tree.table(j + 1, child))
            for k, remainder in enumerate(remainders)
            for child in (2 * k, 2 * k + 1)
        ]
    return values[:tree.count]
