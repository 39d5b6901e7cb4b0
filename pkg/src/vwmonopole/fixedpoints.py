"""Partitions and streaming enumeration of torus-fixed points.

A fixed point of Hilb^{n_0}(S) x ... x Hilb^{n_s}(S) assigns to every
factor i and every chart sigma a partition, with the per-factor sizes
summing to n_i.  The enumeration order is lexicographic in
(factor, chart-size composition, per-chart partition) and is stable, so
runs are reproducible and the index space can be sliced for parallel
consumption.
"""

from __future__ import annotations

from functools import lru_cache

Partition = tuple[int, ...]


@lru_cache(maxsize=None)
def partitions_of(n: int) -> tuple[Partition, ...]:
    """All partitions of n as weakly decreasing tuples, lexicographic order."""
    if n < 0:
        raise ValueError("n must be non-negative")

    def gen(remaining, cap):
        if remaining == 0:
            yield ()
            return
        for first in range(1, min(cap, remaining) + 1):
            for rest in gen(remaining - first, first):
                yield (first,) + rest

    return tuple(sorted(gen(n, n)))


@lru_cache(maxsize=None)
def partition_count(n: int) -> int:
    """p(n) by Euler's pentagonal recurrence (independent of partitions_of)."""
    if n < 0:
        return 0
    if n == 0:
        return 1
    total = 0
    k = 1
    while True:
        g1 = k * (3 * k - 1) // 2
        g2 = k * (3 * k + 1) // 2
        if g1 > n and g2 > n:
            break
        sign = -1 if k % 2 == 0 else 1
        if g1 <= n:
            total += sign * partition_count(n - g1)
        if g2 <= n:
            total += sign * partition_count(n - g2)
        k += 1
    return total


def _compositions(total: int, parts: int):
    """All tuples of `parts` non-negative ints summing to total, lex order."""
    if parts == 1:
        yield (total,)
        return
    for first in range(total + 1):
        for rest in _compositions(total - first, parts - 1):
            yield (first,) + rest


@lru_cache(maxsize=None)
def factor_assignments(charts: int, n: int):
    """All ways to place n points on `charts` charts: per-chart partitions."""
    out = []
    for comp in _compositions(n, charts):
        pools = [partitions_of(k) for k in comp]
        idx = [0] * charts
        while True:
            out.append(tuple(pools[c][idx[c]] for c in range(charts)))
            for c in range(charts - 1, -1, -1):
                idx[c] += 1
                if idx[c] < len(pools[c]):
                    break
                idx[c] = 0
            else:
                break
    return tuple(out)


FixedPoint = tuple[tuple[Partition, ...], ...]  # [factor][chart] -> partition


def count_fixed_points(surface, n) -> int:
    total = 1
    for ni in n:
        total *= len(factor_assignments(surface.euler, ni))
    return total


def fixed_points(surface, n, start: int = 0, stop: int | None = None):
    """Stream fixed points for the factor sizes n, optionally an index slice.

    The stream is the row-major product of the per-factor assignment lists,
    so disjoint [start, stop) ranges partition the full enumeration.
    """
    lists = [factor_assignments(surface.euler, ni) for ni in n]
    sizes = [len(x) for x in lists]
    total = 1
    for s in sizes:
        total *= s
    if stop is None or stop > total:
        stop = total
    for index in range(start, stop):
        rem = index
        coords = []
        for s in reversed(sizes):
            rem, c = divmod(rem, s)
            coords.append(c)
        coords.reverse()
        yield tuple(lists[f][coords[f]] for f in range(len(lists)))


def fixed_point_to_lists(fp: FixedPoint):
    return [[list(p) for p in factor] for factor in fp]


def euler_hilb_series_coeffs(euler_characteristic: int, n_max: int) -> list[int]:
    """Coefficients of prod_k (1 - x^k)^(-e) up to x^n_max (Goettsche count)."""
    coeffs = [0] * (n_max + 1)
    coeffs[0] = 1
    for k in range(1, n_max + 1):
        for _ in range(euler_characteristic):
            for i in range(k, n_max + 1):
                coeffs[i] += coeffs[i - k]
    return coeffs
