"""Forward-market profit, its concave relaxation, and integer rounding.

Decisions are a demand-duration vector ``d`` (which unit-rate services to
sell) and day-ahead purchases ``y``.  Expected real-time cost is taken over a
finite scenario set.  The relaxed problem is maximised by projected
supergradient ascent; an optional cutting-plane pass, fed by the same
supergradient pieces, then closes the remaining gap exactly.
"""
from __future__ import annotations

import logging
import math
from dataclasses import dataclass, field
from typing import Sequence

import numpy as np
from scipy.optimize import isotonic_regression, linprog

from .errors import InputError
from .portfolio import Service, UnitRatePortfolio, decompose_service, durations_from_demand
from .realtime import ScenarioSet

log = logging.getLogger(__name__)

_EPS = 1e-9


@dataclass(frozen=True)
class MarketModel:
    pi_unit: tuple[float, ...]  # price of a unit-rate service lasting t = 1..T slots
    c_da: float
    c_rt: float

    def __post_init__(self):
        object.__setattr__(self, "pi_unit", tuple(float(p) for p in self.pi_unit))
        object.__setattr__(self, "c_da", float(self.c_da))
        object.__setattr__(self, "c_rt", float(self.c_rt))
        if not self.pi_unit:
            raise InputError("pi_unit must have one entry per slot")
        if min(self.pi_unit) < 0 or self.c_da < 0 or self.c_rt < 0:
            raise InputError("prices must be nonnegative")

    @property
    def horizon(self) -> int:
        return len(self.pi_unit)

    def unit_price(self, duration: int) -> float:
        return 0.0 if duration == 0 else self.pi_unit[duration - 1]


@dataclass(frozen=True)
class Caps:
    d_max: int
    y_max: int


@dataclass(frozen=True)
class DecisionPoint:
    d: tuple[float, ...]
    y: tuple[float, ...]


@dataclass(frozen=True)
class SolverConfig:
    iterations: int = 5000
    step: float = 1.0
    tol: float = 1e-6
    patience: int = 500
    polish: bool = True
    max_cut_rounds: int = 500


@dataclass(frozen=True)
class RelaxationResult:
    point: DecisionPoint
    objective: float
    iterations: int
    final_step_size: float
    converged: bool
    polished: bool = False
    cuts: int = 0


@dataclass(frozen=True)
class SolveReport:
    relaxed: DecisionPoint
    rounded: DecisionPoint
    objective_relaxed: float
    objective_rounded: float
    gap_bound: float
    iterations: int
    final_step_size: float
    warning: bool
    polished: bool
    unit_portfolio: UnitRatePortfolio = field(repr=False, default=None)


def price_service(mm: MarketModel, s: Service) -> float:
    if not s.is_feasible(mm.horizon):
        raise InputError(f"service ({s.E}, {s.m}) infeasible for horizon {mm.horizon}")
    return sum(mm.unit_price(e) for e in decompose_service(s))


def _revenue_coefficients(mm: MarketModel) -> np.ndarray:
    # sum_t pi_t (d_t - d_{t+1}) = sum_t d_t (pi_t - pi_{t-1}), pi_0 = 0
    pi = np.asarray(mm.pi_unit)
    return pi - np.concatenate(([0.0], pi[:-1]))


def _check_d(d, horizon) -> np.ndarray:
    d = np.asarray(d, dtype=float)
    if d.shape != (horizon,):
        raise InputError(f"d must have length {horizon}")
    if np.any(d < -_EPS) or np.any(np.diff(d) > _EPS):
        raise InputError(f"d must be nonincreasing and nonnegative: {d.tolist()}")
    return d


def revenue_from_d(mm: MarketModel, d: Sequence[float]) -> float:
    d = _check_d(d, mm.horizon)
    nxt = np.concatenate((d[1:], [0.0]))
    return float(np.dot(mm.pi_unit, d - nxt))


def relaxed_gap(d: Sequence[float], x: Sequence[float]) -> float:
    """Energy gap with real entries: worst tail of ``d`` against sorted ``x``."""
    d = np.asarray(d, dtype=float)
    xs = np.sort(np.asarray(x, dtype=float))[::-1]
    tails = np.cumsum((d - xs)[::-1])
    return max(float(tails.max()), 0.0)


def _active_piece(d: np.ndarray, x: np.ndarray):
    """Gap value and maximising piece ``(t0, S)``; ``None`` piece when zero.

    ``t0`` is 0-based and the smallest maximiser; ``S`` holds the
    ``T - t0`` smallest entries of ``x`` (lowest index first on ties).
    """
    T = len(d)
    order = np.argsort(x, kind="stable")
    best, best_t0 = 0.0, None
    need = have = 0.0
    for k in range(1, T + 1):
        need += d[T - k]
        have += x[order[k - 1]]
        val = need - have
        if val > 0 and val >= best:
            best, best_t0 = val, T - k
    if best_t0 is None:
        return 0.0, None
    return best, (best_t0, tuple(sorted(int(i) for i in order[: T - best_t0])))


def _scenario_arrays(scenarios: ScenarioSet, horizon: int):
    R = np.asarray(scenarios.scenarios, dtype=float).reshape(len(scenarios), horizon)
    return R, np.asarray(scenarios.probabilities(), dtype=float)


def expected_relaxed_gap(d, y, scenarios: ScenarioSet) -> float:
    d = np.asarray(d, dtype=float)
    y = np.asarray(y, dtype=float)
    gaps = [relaxed_gap(d, y + np.asarray(r, dtype=float)) for r in scenarios.scenarios]
    return scenarios.expectation(gaps)


def profit(mm: MarketModel, d, y, scenarios: ScenarioSet) -> float:
    d = _check_d(d, mm.horizon)
    y = np.asarray(y, dtype=float)
    if y.shape != (mm.horizon,) or np.any(y < -_EPS):
        raise InputError("y must be nonnegative with one entry per slot")
    if scenarios.horizon not in (None, mm.horizon):
        raise InputError("scenario horizon differs from market horizon")
    return (
        revenue_from_d(mm, d)
        - mm.c_da * float(y.sum())
        - mm.c_rt * expected_relaxed_gap(d, y, scenarios)
    )


def _subgradient_with_pieces(mm, d, y, scenarios):
    d = np.asarray(d, dtype=float)
    y = np.asarray(y, dtype=float)
    T = mm.horizon
    g_d = _revenue_coefficients(mm).copy()
    g_y = np.full(T, -mm.c_da)
    pieces = []
    for i, (r, w) in enumerate(zip(scenarios.scenarios, scenarios.probabilities())):
        _, piece = _active_piece(d, y + np.asarray(r, dtype=float))
        if piece is None:
            continue
        t0, S = piece
        pieces.append((i, t0, S))
        g_d[t0:] -= mm.c_rt * w
        g_y[list(S)] += mm.c_rt * w
    return g_d, g_y, pieces


def subgradient(mm: MarketModel, d, y, scenarios: ScenarioSet):
    """Supergradient ``(g_d, g_y)`` of the concave profit at ``(d, y)``."""
    g_d, g_y, _ = _subgradient_with_pieces(mm, d, y, scenarios)
    return g_d, g_y


def project(d: np.ndarray, y: np.ndarray, caps: Caps):
    """Euclidean projection onto {d nonincreasing in [0, d_max]} x [0, y_max]^T."""
    d = isotonic_regression(d, increasing=False).x
    return np.clip(d, 0.0, caps.d_max), np.clip(y, 0.0, caps.y_max)


def _ascent(mm, scenarios, caps, config, pieces_seen):
    T = mm.horizon
    d = np.zeros(T)
    y = np.zeros(T)
    best_obj = profit(mm, d, y, scenarios)
    best = (d.copy(), y.copy())
    last_improvement = 0
    step = 0.0
    converged = False
    k = 0
    for k in range(1, config.iterations + 1):
        g_d, g_y, pieces = _subgradient_with_pieces(mm, d, y, scenarios)
        pieces_seen.update(pieces)
        norm = math.sqrt(float(g_d @ g_d + g_y @ g_y))
        if norm == 0.0:
            converged = True
            break
        step = config.step / math.sqrt(k)
        d, y = project(d + step * g_d / norm, y + step * g_y / norm, caps)
        obj = profit(mm, d, y, scenarios)
        if obj > best_obj + config.tol:
            last_improvement = k
        if obj > best_obj:
            best_obj, best = obj, (d.copy(), y.copy())
        if k - last_improvement >= config.patience:
            converged = True
            break
    return best, best_obj, k, step, converged


def _cutting_plane(mm, scenarios, caps, config, pieces):
    """Kelley's method on the epigraph of each scenario's gap.

    Each cut is one affine piece ``sum(d[t0:]) - sum(y[S] + r[S])`` of a
    scenario gap, so the loop ends after finitely many rounds with the exact
    relaxed optimum.
    """
    T = mm.horizon
    n = len(scenarios)
    R, w = _scenario_arrays(scenarios, T)
    c = np.concatenate((-_revenue_coefficients(mm), np.full(T, mm.c_da), mm.c_rt * w))
    mono = np.zeros((max(T - 1, 0), 2 * T + n))
    for t in range(T - 1):
        mono[t, t] = -1.0
        mono[t, t + 1] = 1.0
    bounds = [(0, caps.d_max)] * T + [(0, caps.y_max)] * T + [(0, None)] * n
    cuts = set(pieces)
    x = None
    for _ in range(config.max_cut_rounds):
        rows = [mono]
        rhs = [np.zeros(T - 1)]
        for i, t0, S in sorted(cuts):
            row = np.zeros(2 * T + n)
            row[t0:T] = 1.0
            row[[T + s for s in S]] = -1.0
            row[2 * T + i] = -1.0
            rows.append(row[None, :])
            rhs.append(np.array([R[i, list(S)].sum()]))
        res = linprog(c, A_ub=np.vstack(rows), b_ub=np.concatenate(rhs),
                      bounds=bounds, method="highs")
        if res.status != 0:
            log.warning("cutting-plane LP failed: %s", res.message)
            return None, len(cuts)
        x = res.x
        d, y, z = x[:T], x[T:2 * T], x[2 * T:]
        added = False
        for i in range(n):
            gap, piece = _active_piece(d, y + R[i])
            if piece is not None and gap > z[i] + 1e-9 and (i, *piece) not in cuts:
                cuts.add((i, *piece))
                added = True
        if not added:
            return project(d, y, caps), len(cuts)
    log.warning("cutting plane hit %d rounds", config.max_cut_rounds)
    return None, len(cuts)


def solve_relaxation(
    mm: MarketModel,
    scenarios: ScenarioSet,
    caps: Caps | None,
    config: SolverConfig = SolverConfig(),
) -> RelaxationResult:
    """Maximise profit over real ``d`` (nonincreasing) and ``y`` within caps."""
    if caps is None:
        raise InputError("d_max and y_max caps are required")
    pieces: set = set()
    (d, y), obj, iters, step, converged = _ascent(mm, scenarios, caps, config, pieces)
    polished, n_cuts = False, 0
    if config.polish and len(scenarios):
        point, n_cuts = _cutting_plane(mm, scenarios, caps, config, pieces)
        if point is not None:
            polished = True
            cand = profit(mm, point[0], point[1], scenarios)
            if cand >= obj:
                (d, y), obj = point, cand
    elif config.polish:
        # no scenarios: profit is linear, the box vertex is exact
        coef = _revenue_coefficients(mm)
        d_lp = _best_monotone_linear(coef, caps.d_max)
        cand = profit(mm, d_lp, np.zeros(mm.horizon), scenarios)
        polished = True
        if cand >= obj:
            d, y, obj = d_lp, np.zeros(mm.horizon), cand
    # on a flat optimum prefer committing nothing
    zero = np.zeros(mm.horizon)
    if profit(mm, zero, zero, scenarios) >= obj - 1e-12:
        d, y, obj = zero, zero, profit(mm, zero, zero, scenarios)
    if not (converged or polished):
        log.warning("supergradient ascent did not stagnate within %d iterations", iters)
    point = DecisionPoint(tuple(float(v) for v in d), tuple(float(v) for v in y))
    return RelaxationResult(point, float(obj), iters, step, converged, polished, n_cuts)


def _best_monotone_linear(coef: np.ndarray, d_max: int) -> np.ndarray:
    # max coef.d over nonincreasing d in [0, d_max]: d = d_max on the best prefix
    prefix = np.cumsum(coef)
    k = int(np.argmax(prefix))
    d = np.zeros(len(coef))
    if prefix[k] > 0:
        d[: k + 1] = d_max
    return d


def round_solution(d_c, y_c) -> tuple[tuple[int, ...], tuple[int, ...]]:
    """Floor successive differences of ``d_c``, ceil ``y_c``.

    Values within 1e-9 of an integer are snapped first so solver noise does
    not cost a whole unit.
    """
    d_c = np.asarray(d_c, dtype=float)
    diffs = d_c - np.concatenate((d_c[1:], [0.0]))
    steps = np.floor(diffs + _EPS).astype(int)
    steps = np.maximum(steps, 0)
    d_a = np.cumsum(steps[::-1])[::-1]
    y_a = np.maximum(np.ceil(np.asarray(y_c, dtype=float) - _EPS).astype(int), 0)
    return tuple(int(v) for v in d_a), tuple(int(v) for v in y_a)


def gap_certificate(mm: MarketModel) -> float:
    return mm.c_da * mm.horizon + sum(mm.pi_unit)


def realize_portfolio(d_a: Sequence[int]) -> UnitRatePortfolio:
    return UnitRatePortfolio(tuple(durations_from_demand(d_a)), len(d_a))


def solve_market(
    mm: MarketModel,
    scenarios: ScenarioSet,
    caps: Caps | None,
    config: SolverConfig = SolverConfig(),
) -> SolveReport:
    relaxed = solve_relaxation(mm, scenarios, caps, config)
    d_a, y_a = round_solution(relaxed.point.d, relaxed.point.y)
    obj_a = profit(mm, d_a, y_a, scenarios)
    return SolveReport(
        relaxed=relaxed.point,
        rounded=DecisionPoint(d_a, y_a),
        objective_relaxed=relaxed.objective,
        objective_rounded=obj_a,
        gap_bound=gap_certificate(mm),
        iterations=relaxed.iterations,
        final_step_size=relaxed.final_step_size,
        warning=not (relaxed.converged or relaxed.polished),
        polished=relaxed.polished,
        unit_portfolio=realize_portfolio(d_a),
    )
