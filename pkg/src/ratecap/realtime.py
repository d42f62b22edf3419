"""Real-time purchasing and delivery simulation.

The purchase rule buys, in each slot, the least energy that keeps the supply
seen so far weakly adequate for the matching tail of the demand-duration
vector.  Summed over the horizon this equals the energy gap of ``y + r``,
which no causal (or even clairvoyant) policy can beat.
"""
from __future__ import annotations

from dataclasses import dataclass
from typing import Sequence

from .adequacy import (
    AllocationMatrix,
    LaxityState,
    energy_gap,
    llf_allocate_step,
)
from .errors import InputError, InvariantViolation
from .majorization import _check_lengths, as_vector, weakly_majorizes
from .portfolio import Portfolio, decompose_portfolio, demand_duration


@dataclass(frozen=True)
class SupplyProfile:
    y: tuple[int, ...]
    r: tuple[int, ...]
    a: tuple[int, ...]
    q: tuple[int, ...]

    @property
    def total_purchase(self) -> int:
        return sum(self.a)


@dataclass(frozen=True)
class PolicyTrace:
    profile: SupplyProfile
    allocations: AllocationMatrix
    merged: tuple[tuple[int, ...], ...]  # one row per consumer
    total_purchase: int


@dataclass(frozen=True)
class ScenarioSet:
    scenarios: tuple[tuple[int, ...], ...]
    weights: tuple[float, ...] | None = None

    def __post_init__(self):
        object.__setattr__(self, "scenarios", tuple(as_vector(s) for s in self.scenarios))
        if self.scenarios:
            T = len(self.scenarios[0])
            if any(len(s) != T for s in self.scenarios):
                raise InputError("scenarios have differing lengths")
        if self.weights is not None:
            w = tuple(float(x) for x in self.weights)
            if len(w) != len(self.scenarios):
                raise InputError("one weight per scenario required")
            if any(x < 0 for x in w) or abs(sum(w) - 1.0) > 1e-9:
                raise InputError("weights must be nonnegative and sum to 1")
            object.__setattr__(self, "weights", w)

    def __len__(self):
        return len(self.scenarios)

    @property
    def horizon(self) -> int | None:
        return len(self.scenarios[0]) if self.scenarios else None

    def probabilities(self) -> tuple[float, ...]:
        if self.weights is not None:
            return self.weights
        n = len(self.scenarios)
        return (1.0 / n,) * n if n else ()

    def expectation(self, values: Sequence[float]) -> float:
        """Weighted mean, accumulated in scenario order."""
        if not self.scenarios:
            return 0.0
        if self.weights is None:
            total = 0
            for v in values:
                total += v
            return total / len(self.scenarios)
        total = 0.0
        for w, v in zip(self.weights, values):
            total += w * v
        return total


def gstar_step(d: Sequence[int], fixed_q: Sequence[int], y_t: int, r_t: int) -> int:
    """Minimal purchase in slot ``len(fixed_q) + 1``.

    The binding constraints pair the current slot with the k smallest
    earlier totals against the last k+1 demand-duration entries.
    """
    T = len(d)
    t = len(fixed_q) + 1
    if t > T:
        raise InputError("slot beyond horizon")
    base = y_t + r_t
    smallest = sorted(fixed_q)
    need = 0
    demand_tail = 0
    prefix = 0
    for k in range(t):
        demand_tail += d[T - 1 - k]
        if k:
            prefix += smallest[k - 1]
        need = max(need, demand_tail - prefix - base)
    return need


def _check_prefix(d, q_prefix):
    t = len(q_prefix)
    if not weakly_majorizes(d[len(d) - t:], q_prefix):
        raise InvariantViolation(
            f"prefix {q_prefix} does not cover demand tail {d[len(d) - t:]}"
        )


def run_gstar(
    d: Sequence[int], y: Sequence[int], r: Sequence[int], check: bool = True
) -> SupplyProfile:
    d, y, r = as_vector(d), as_vector(y), as_vector(r)
    _check_lengths(d, y)
    _check_lengths(d, r)
    a: list[int] = []
    q: list[int] = []
    for t in range(len(d)):
        a_t = gstar_step(d, q, y[t], r[t])
        a.append(a_t)
        q.append(y[t] + r[t] + a_t)
        if check:
            _check_prefix(d, q)
    profile = SupplyProfile(y, r, tuple(a), tuple(q))
    if check:
        gap = energy_gap(d, [yy + rr for yy, rr in zip(y, r)])
        if profile.total_purchase != gap:
            raise InvariantViolation(
                f"purchased {profile.total_purchase}, energy gap is {gap}"
            )
    return profile


def simulate_delivery(
    c: Portfolio, y: Sequence[int], r: Sequence[int], check: bool = True
) -> PolicyTrace:
    """Purchase and allocate slot by slot, then regroup rows per consumer."""
    T = c.horizon
    y, r = as_vector(y, T), as_vector(r, T)
    unit = decompose_portfolio(c)
    d = demand_duration(unit)
    state = LaxityState.initial(len(unit), T)
    a: list[int] = []
    q: list[int] = []
    columns = []
    for t in range(T):
        a_t = gstar_step(d, q, y[t], r[t])
        a.append(a_t)
        q.append(y[t] + r[t] + a_t)
        if check:
            _check_prefix(d, q)
        state, col = llf_allocate_step(state, unit.durations, q[t])
        columns.append(col)
    nu = tuple(tuple(col[j] for col in columns) for j in range(len(unit)))
    alloc = AllocationMatrix(nu, unit.durations)
    merged = [[0] * T for _ in c.services]
    for row, (parent, _) in zip(nu, unit.origin):
        for t, v in enumerate(row):
            merged[parent][t] += v
    merged = tuple(tuple(m) for m in merged)
    profile = SupplyProfile(y, r, tuple(a), tuple(q))
    if check:
        gap = energy_gap(d, [yy + rr for yy, rr in zip(y, r)])
        if profile.total_purchase != gap:
            raise InvariantViolation(
                f"purchased {profile.total_purchase}, energy gap is {gap}"
            )
        if alloc.row_sums() != unit.durations:
            raise InvariantViolation("unit-rate rows left unserved")
        if any(cs > qt for cs, qt in zip(alloc.column_sums(T), q)):
            raise InvariantViolation("allocation exceeds supply")
        for s, u in zip(c.services, merged):
            if sum(u) != s.E or max(u, default=0) > s.m:
                raise InvariantViolation(f"consumer allocation {u} violates {s}")
    return PolicyTrace(profile, alloc, merged, profile.total_purchase)


def diag_F(d: Sequence[int], x: Sequence[int]) -> int:
    """Largest shortfall of any slot subset against the matching demand tail.

    A subset of size k must cover the last k demand-duration entries; the
    worst subset of each size is the k smallest entries of ``x``.
    """
    _check_lengths(d, x)
    T = len(d)
    xs = sorted(x)
    best = 0
    need = have = 0
    for k in range(1, T + 1):
        need += d[T - k]
        have += xs[k - 1]
        best = max(best, need - have)
    return best


def estimate_V(
    c: Portfolio, y: Sequence[int], s: ScenarioSet, c_rt: float
) -> float:
    """Expected real-time purchase cost over the scenario set."""
    d = demand_duration(decompose_portfolio(c))
    y = as_vector(y, c.horizon)
    gaps = []
    for r in s.scenarios:
        if len(r) != c.horizon:
            raise InputError(f"scenario length {len(r)} != horizon {c.horizon}")
        gaps.append(energy_gap(d, [a + b for a, b in zip(y, r)]))
    return c_rt * s.expectation(gaps)
