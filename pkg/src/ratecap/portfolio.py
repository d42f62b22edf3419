"""Rate-constrained services and their unit-rate decomposition.

A service ``(E, m)`` delivers ``E`` units over the horizon with at most
``m`` units per slot.  It splits into ``m`` unit-rate services whose
durations differ by at most one, and any feasible allocation of the parent
is a slot-wise sum of binary allocations of the pieces.
"""
from __future__ import annotations

from dataclasses import dataclass, field
from typing import Sequence

from .errors import InfeasibleServiceError, InputError
from .majorization import as_vector


@dataclass(frozen=True)
class Service:
    E: int
    m: int

    def __post_init__(self):
        if int(self.E) != self.E or int(self.m) != self.m:
            raise InfeasibleServiceError(f"non-integer service {self}")
        if self.E < 0 or self.m < 1:
            raise InfeasibleServiceError(f"service needs E >= 0 and m >= 1, got {self}")

    def is_feasible(self, horizon: int) -> bool:
        return self.E <= self.m * horizon


@dataclass(frozen=True)
class Portfolio:
    """Services sold, one per consumer, identified by position."""

    services: tuple[Service, ...]
    horizon: int
    caps: tuple[int, int] | None = None  # optional (E_max, m_max)

    def __post_init__(self):
        object.__setattr__(self, "services", tuple(self.services))
        if self.horizon < 1:
            raise InputError(f"horizon must be >= 1, got {self.horizon}")
        for i, s in enumerate(self.services):
            if not s.is_feasible(self.horizon):
                raise InfeasibleServiceError(
                    f"service {i} ({s.E}, {s.m}) infeasible: "
                    f"E > m*T = {s.m * self.horizon}",
                    index=i,
                )
            if self.caps is not None and (s.E > self.caps[0] or s.m > self.caps[1]):
                raise InfeasibleServiceError(
                    f"service {i} ({s.E}, {s.m}) outside caps {self.caps}", index=i
                )

    @classmethod
    def from_pairs(cls, pairs, horizon: int) -> "Portfolio":
        return cls(tuple(Service(E, m) for E, m in pairs), horizon)

    def __len__(self):
        return len(self.services)


@dataclass(frozen=True)
class UnitRatePortfolio:
    """Unit-rate services; ``origin[j] = (parent index, slot within parent)``."""

    durations: tuple[int, ...]
    horizon: int
    origin: tuple[tuple[int, int], ...] = field(default=())

    def __post_init__(self):
        object.__setattr__(self, "durations", tuple(self.durations))
        if not self.origin:
            object.__setattr__(
                self, "origin", tuple((j, 0) for j in range(len(self.durations)))
            )
        if len(self.origin) != len(self.durations):
            raise InputError("origin map length differs from durations")
        for e in self.durations:
            if e < 0 or e > self.horizon:
                raise InputError(f"duration {e} outside [0, {self.horizon}]")

    def __len__(self):
        return len(self.durations)


def decompose_service(s: Service) -> list[int]:
    k, ell = divmod(s.E, s.m)
    return [k + 1] * ell + [k] * (s.m - ell)


def decompose_portfolio(c: Portfolio) -> UnitRatePortfolio:
    durations: list[int] = []
    origin: list[tuple[int, int]] = []
    for i, s in enumerate(c.services):
        for k, e in enumerate(decompose_service(s)):
            durations.append(e)
            origin.append((i, k))
    return UnitRatePortfolio(tuple(durations), c.horizon, tuple(origin))


def demand_duration(u: UnitRatePortfolio | Sequence[int], horizon: int | None = None) -> tuple[int, ...]:
    """``d[t-1]`` = number of unit-rate services with duration >= t."""
    if isinstance(u, UnitRatePortfolio):
        durations, horizon = u.durations, u.horizon
    else:
        durations = tuple(u)
        if horizon is None:
            raise InputError("horizon required with a bare duration list")
    d = [0] * horizon
    for e in durations:
        for t in range(min(e, horizon)):
            d[t] += 1
    return tuple(d)


def durations_from_demand(d: Sequence[int]) -> list[int]:
    """Inverse of ``demand_duration``: ``d_t - d_{t+1}`` services of duration t."""
    d = as_vector(d)
    out = []
    for t in range(len(d)):
        nxt = d[t + 1] if t + 1 < len(d) else 0
        if d[t] < nxt:
            raise InputError(f"demand-duration vector not nonincreasing: {d}")
        out.extend([t + 1] * (d[t] - nxt))
    return out


def split_allocation(s: Service, u: Sequence[int]) -> list[tuple[int, ...]]:
    """Split a parent allocation into binary unit-rate rows.

    Layer by layer, the row for piece j is switched on in the slots with the
    largest remaining allocation (earliest slot wins ties).  Row j sums to
    ``decompose_service(s)[j]``.
    """
    u = as_vector(u)
    if sum(u) != s.E or any(x > s.m for x in u):
        raise InputError(f"allocation {u} infeasible for service ({s.E}, {s.m})")
    residual = list(u)
    rows = []
    for need in decompose_service(s):
        order = sorted(range(len(residual)), key=lambda t: (-residual[t], t))
        chosen = order[:need]
        if any(residual[t] == 0 for t in chosen):
            raise InputError(f"allocation {u} cannot be split for ({s.E}, {s.m})")
        row = [0] * len(u)
        for t in chosen:
            row[t] = 1
            residual[t] -= 1
        rows.append(tuple(row))
    return rows


def merge_allocation(rows: Sequence[Sequence[int]], horizon: int | None = None) -> tuple[int, ...]:
    if not rows:
        if horizon is None:
            raise InputError("horizon required to merge zero rows")
        return (0,) * horizon
    return tuple(sum(col) for col in zip(*rows))
