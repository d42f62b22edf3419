"""Adequacy tests, the energy gap, and the least-laxity-first allocator."""
from __future__ import annotations

from dataclasses import dataclass
from typing import Sequence

from .errors import InadequateSupplyError, InputError
from .majorization import (
    _check_lengths,
    majorizes,
    sort_nonincreasing,
    weakly_majorizes,
)
from .portfolio import demand_duration


def is_exactly_adequate(d: Sequence[int], p: Sequence[int]) -> bool:
    return majorizes(d, p)


def is_adequate(d: Sequence[int], p: Sequence[int]) -> bool:
    return weakly_majorizes(d, p)


def _worst_tail(d: Sequence[int], p: Sequence[int]) -> tuple[int, int]:
    """(max tail deficit, first 0-based tail index attaining it)."""
    _check_lengths(d, p)
    ds = sort_nonincreasing(d)
    ps = sort_nonincreasing(p)
    best, best_t, acc = None, 0, 0
    for t in range(len(ds) - 1, -1, -1):
        acc += ds[t] - ps[t]
        if best is None or acc >= best:
            best, best_t = acc, t
    return (best if best is not None else 0), best_t


def energy_gap(d: Sequence[int], p: Sequence[int]) -> int:
    """Least extra energy that makes ``p`` adequate for ``d``."""
    return max(_worst_tail(d, p)[0], 0)


@dataclass(frozen=True)
class AllocationMatrix:
    nu: tuple[tuple[int, ...], ...]
    durations: tuple[int, ...]

    def row_sums(self):
        return tuple(sum(r) for r in self.nu)

    def column_sums(self, horizon: int):
        if not self.nu:
            return (0,) * horizon
        return tuple(sum(c) for c in zip(*self.nu))


@dataclass(frozen=True)
class LaxityState:
    served: tuple[int, ...]
    t: int  # 1-based slot about to be allocated
    horizon: int

    @classmethod
    def initial(cls, n_rows: int, horizon: int) -> "LaxityState":
        return cls((0,) * n_rows, 1, horizon)

    def laxity(self, durations: Sequence[int]) -> list[int]:
        return [
            self.horizon - self.t + 1 - (e - s)
            for e, s in zip(durations, self.served)
        ]


def llf_allocate_step(
    state: LaxityState, durations: Sequence[int], p_t: int
) -> tuple[LaxityState, tuple[int, ...]]:
    """Serve up to ``p_t`` unfinished rows, smallest laxity first.

    Ties go to the lower row index.
    """
    if p_t < 0:
        raise InputError(f"negative supply {p_t}")
    if state.t > state.horizon:
        raise InputError("allocation already past the horizon")
    lax = state.laxity(durations)
    open_rows = [j for j, (e, s) in enumerate(zip(durations, state.served)) if s < e]
    open_rows.sort(key=lambda j: (lax[j], j))
    column = [0] * len(durations)
    for j in open_rows[:p_t]:
        column[j] = 1
    served = tuple(s + c for s, c in zip(state.served, column))
    return LaxityState(served, state.t + 1, state.horizon), tuple(column)


def llf_allocate(durations: Sequence[int], p: Sequence[int]) -> AllocationMatrix:
    """Causal least-laxity-first allocation of unit-rate services.

    Column t depends only on ``p[:t+1]``.  When ``p`` turns out to be
    inadequate, raises ``InadequateSupplyError`` carrying the partial
    allocation and the unmet rows.
    """
    durations = tuple(durations)
    T = len(p)
    if any(e > T for e in durations):
        raise InputError(f"duration exceeds horizon {T}")
    state = LaxityState.initial(len(durations), T)
    columns = []
    for p_t in p:
        state, col = llf_allocate_step(state, durations, p_t)
        columns.append(col)
    nu = tuple(tuple(col[j] for col in columns) for j in range(len(durations)))
    result = AllocationMatrix(nu, durations)
    unmet = [j for j, (e, s) in enumerate(zip(durations, state.served)) if s < e]
    if unmet:
        d = demand_duration(durations, T)
        gap, tail = _worst_tail(d, p)
        raise InadequateSupplyError(
            f"supply inadequate: tail from slot {tail + 1} short by {gap}; "
            f"unmet rows {unmet}",
            tail_index=tail,
            unmet=unmet,
            partial=result,
        )
    return result
