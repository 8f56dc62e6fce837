"""Shared fixtures: brute-force oracles used to cross-check the solvers."""

from fractions import Fraction
from functools import cache
from itertools import product
from typing import Callable, Mapping, Sequence

import pytest

from src.vector_packing import Vec2


def _set_partitions(n: int):
    """Restricted growth strings: labels[i] <= max(labels[:i]) + 1."""
    if n == 0:
        yield []
        return
    labels = [0] * n

    def extend(pos: int, highest: int):
        if pos == n:
            yield list(labels)
            return
        for label in range(highest + 2):
            labels[pos] = label
            yield from extend(pos + 1, max(highest, label))

    labels[0] = 0
    yield from extend(1, 0)


def brute_force_opt(sigma: Sequence[Vec2]) -> int:
    """Minimum bin count over every set partition; only for tiny instances."""
    if not sigma:
        return 0
    best = len(sigma)
    for labels in _set_partitions(len(sigma)):
        count = max(labels) + 1
        if count >= best:
            continue
        sums = [[Fraction(0), Fraction(0)] for _ in range(count)]
        for v, label in zip(sigma, labels):
            sums[label][0] += v.x
            sums[label][1] += v.y
        if all(x <= 1 and y <= 1 for x, y in sums):
            best = count
    return best


def brute_force_scaled_opt(counts: Mapping[tuple[int, int], int], k: int) -> int:
    """Minimum bins for scaled box counts, trying every feasible sub-multiset."""
    boxes = sorted(box for box, count in counts.items() if count)

    @cache
    def solve(state: tuple[int, ...]) -> int:
        if not any(state):
            return 0
        first = next(pos for pos, count in enumerate(state) if count)
        best = None
        for take in product(*(range(count + 1) for count in state)):
            if take[first] == 0:
                continue
            if sum(m * i for m, (i, _) in zip(take, boxes)) > k:
                continue
            if sum(m * j for m, (_, j) in zip(take, boxes)) > k:
                continue
            rest = tuple(a - b for a, b in zip(state, take))
            value = solve(rest) + 1
            if best is None or value < best:
                best = value
        return best

    return solve(tuple(counts[box] for box in boxes))


@pytest.fixture
def opt_oracle() -> Callable[[Sequence[Vec2]], int]:
    return brute_force_opt


@pytest.fixture
def scaled_oracle() -> Callable[[Mapping[tuple[int, int], int], int], int]:
    return brute_force_scaled_opt
