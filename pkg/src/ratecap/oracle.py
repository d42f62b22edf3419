"""Exhaustive reference computations for small instances.

Nothing here reuses the sorting/majorization shortcuts of the main modules:
adequacy is decided by searching binary allocation matrices, purchases by
enumerating purchase vectors, and the market optimum by a grid over integer
decisions.
"""
from __future__ import annotations

import itertools
from dataclasses import dataclass
from functools import lru_cache
from math import comb
from typing import Sequence

from .errors import BoundsExceeded
from .market import Caps, MarketModel
from .portfolio import durations_from_demand
from .realtime import ScenarioSet


@dataclass(frozen=True)
class SmallInstanceBounds:
    T_max: int = 4
    N_max: int = 3
    duration_max: int = 4
    supply_max: int = 4
    budget: int = 10**7

    def __post_init__(self):
        if min(self.T_max, self.N_max, self.duration_max, self.supply_max) < 0:
            raise BoundsExceeded("bounds must be nonnegative")
        if self.T_max < 1:
            raise BoundsExceeded("T_max must be at least 1")
        size = (self.supply_max + 1) ** self.T_max * 2 ** self.T_max
        if size > self.budget:
            raise BoundsExceeded(
                f"enumeration size {size} exceeds budget {self.budget}"
            )

    def check(self, durations: Sequence[int], p: Sequence[int]) -> None:
        if (
            len(p) > self.T_max
            or len(durations) > self.N_max
            or any(e > self.duration_max for e in durations)
            or any(x > self.supply_max for x in p)
        ):
            raise BoundsExceeded(
                f"instance durations={tuple(durations)} p={tuple(p)} outside {self}"
            )


DEFAULT_BOUNDS = SmallInstanceBounds()


def _search(durations: tuple[int, ...], caps: tuple[int, ...], exact: bool) -> bool:
    T = len(caps)
    rows = tuple(sorted(durations, reverse=True))
    if any(e > T for e in rows):
        return False
    if exact and sum(rows) != sum(caps):
        return False
    if sum(rows) > sum(caps):
        return False
    subsets = {
        e: [frozenset(c) for c in itertools.combinations(range(T), e)]
        for e in set(rows)
    }

    @lru_cache(maxsize=None)
    def place(j: int, remaining: tuple[int, ...]) -> bool:
        if j == len(rows):
            return not exact or not any(remaining)
        # laxity cut: a row needing e slots has to find e slots with capacity
        if sum(1 for c in remaining if c > 0) < rows[j]:
            return False
        for S in subsets[rows[j]]:
            if all(remaining[t] > 0 for t in S):
                nxt = tuple(c - 1 if t in S else c for t, c in enumerate(remaining))
                if place(j + 1, nxt):
                    return True
        return False

    return place(0, tuple(caps))


def bf_adequate(
    durations: Sequence[int],
    p: Sequence[int],
    exact: bool = False,
    bounds: SmallInstanceBounds = DEFAULT_BOUNDS,
) -> bool:
    """Does a binary allocation with row sums ``durations`` fit under ``p``?

    With ``exact=True`` the column sums must equal ``p``.
    """
    bounds.check(durations, p)
    return _search(tuple(durations), tuple(p), exact)


def bf_F(d: Sequence[int], x: Sequence[int]) -> int:
    """Worst subset shortfall by listing every subset of slots."""
    T = len(d)
    best = 0
    for k in range(1, T + 1):
        need = sum(d[T - k:])
        for S in itertools.combinations(range(T), k):
            best = max(best, need - sum(x[i] for i in S))
    return best


def _compositions(total: int, parts: int):
    for cut in itertools.combinations(range(total + parts - 1), parts - 1):
        prev = -1
        out = []
        for c in cut:
            out.append(c - prev - 1)
            prev = c
        out.append(total + parts - 1 - prev - 1)
        yield tuple(out)


def bf_min_purchase(
    d: Sequence[int],
    y: Sequence[int],
    r: Sequence[int],
    bounds: SmallInstanceBounds = DEFAULT_BOUNDS,
) -> int:
    """Smallest total purchase making ``y + r + a`` adequate, by enumeration."""
    durations = durations_from_demand(d)
    p = tuple(a + b for a, b in zip(y, r))
    if len(p) > bounds.T_max or len(durations) > bounds.N_max:
        raise BoundsExceeded(f"instance d={tuple(d)} outside {bounds}")
    T = len(p)
    for total in range(sum(durations) + 1):
        for a in _compositions(total, T):
            if _search(tuple(durations), tuple(x + da for x, da in zip(p, a)), False):
                return total
    raise AssertionError("supplying total demand must be adequate")


def _nonincreasing(T: int, top: int):
    for combo in itertools.combinations_with_replacement(range(top, -1, -1), T):
        yield combo


def bf_optimal_integer_market(
    mm: MarketModel, scenarios: ScenarioSet, caps: Caps, grid_limit: int = 10**6
):
    """Best integer ``(d, y)`` by grid search; returns ``(d, y, J)``.

    Revenue is summed over the realised unit-rate services and the gap comes
    from subset enumeration.  Ties keep the lexicographically smallest
    ``(d, y)``.
    """
    T = mm.horizon
    n_d = comb(caps.d_max + T, T)
    n_y = (caps.y_max + 1) ** T
    if n_d * n_y > grid_limit:
        raise BoundsExceeded(f"grid of {n_d * n_y} points exceeds {grid_limit}")
    probs = scenarios.probabilities()
    best = None
    for d in sorted(_nonincreasing(T, caps.d_max)):
        revenue = sum(mm.unit_price(e) for e in durations_from_demand(d))
        for y in itertools.product(range(caps.y_max + 1), repeat=T):
            shortfall = 0.0
            for w, r in zip(probs, scenarios.scenarios):
                shortfall += w * bf_F(d, [a + b for a, b in zip(y, r)])
            J = revenue - mm.c_da * sum(y) - mm.c_rt * shortfall
            if best is None or J > best[2]:
                best = (d, y, J)
    return best
