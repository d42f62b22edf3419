"""Oracle cross-check suites run by ``ratecap verify``."""
from __future__ import annotations

import itertools
from dataclasses import dataclass, field

import numpy as np

from . import adequacy, market, oracle, realtime
from .errors import InadequateSupplyError, InvariantViolation
from .market import Caps, MarketModel, SolverConfig
from .oracle import SmallInstanceBounds
from .portfolio import demand_duration
from .realtime import ScenarioSet


@dataclass
class SuiteResult:
    name: str
    checked: int = 0
    counterexample: dict | None = field(default=None)

    @property
    def passed(self) -> bool:
        return self.counterexample is None


def iter_adequacy_instances(bounds: SmallInstanceBounds):
    for T in range(1, bounds.T_max + 1):
        top = min(bounds.duration_max, T)
        for n in range(bounds.N_max + 1):
            for durations in itertools.product(range(top + 1), repeat=n):
                for p in itertools.product(range(bounds.supply_max + 1), repeat=T):
                    yield durations, p


def check_llf(durations, p) -> str | None:
    try:
        alloc = adequacy.llf_allocate(durations, p)
    except InadequateSupplyError as exc:
        return f"llf failed on adequate supply: {exc}"
    if alloc.row_sums() != tuple(durations):
        return f"row sums {alloc.row_sums()} != {tuple(durations)}"
    if any(c > x for c, x in zip(alloc.column_sums(len(p)), p)):
        return f"column sums {alloc.column_sums(len(p))} exceed {p}"
    return None


def adequacy_suite(
    bounds: SmallInstanceBounds,
    is_adequate=adequacy.is_adequate,
    is_exactly_adequate=adequacy.is_exactly_adequate,
) -> SuiteResult:
    res = SuiteResult("adequacy equivalence + llf soundness")
    for durations, p in iter_adequacy_instances(bounds):
        d = demand_duration(durations, len(p))
        weak = is_adequate(d, p)
        exact = is_exactly_adequate(d, p)
        bf_weak = oracle.bf_adequate(durations, p, bounds=bounds)
        bf_exact = oracle.bf_adequate(durations, p, exact=True, bounds=bounds)
        res.checked += 1
        problem = None
        if weak != bf_weak:
            problem = f"is_adequate={weak}, brute force={bf_weak}"
        elif exact != bf_exact:
            problem = f"is_exactly_adequate={exact}, brute force={bf_exact}"
        elif weak:
            problem = check_llf(durations, p)
        if problem:
            res.counterexample = {"durations": list(durations), "p": list(p), "problem": problem}
            return res
    return res


def purchase_suite(bounds: SmallInstanceBounds) -> SuiteResult:
    res = SuiteResult("minimal purchase = energy gap = g* purchase")
    for T in range(1, bounds.T_max + 1):
        span = min(bounds.duration_max, T)
        for head in oracle._nonincreasing(span, bounds.N_max):
            d = tuple(head) + (0,) * (T - span)
            for p in itertools.product(range(bounds.supply_max + 1), repeat=T):
                y = tuple(x // 2 for x in p)
                r = tuple(x - v for x, v in zip(p, y))
                gap = adequacy.energy_gap(d, p)
                try:
                    gstar = realtime.run_gstar(d, y, r).total_purchase
                except InvariantViolation as exc:
                    res.counterexample = {"d": list(d), "y": list(y), "r": list(r),
                                          "problem": str(exc)}
                    return res
                bf = oracle.bf_min_purchase(d, y, r, bounds=bounds)
                res.checked += 1
                if not (bf == gap == gstar):
                    res.counterexample = {"d": list(d), "y": list(y), "r": list(r),
                                          "problem": f"brute force {bf}, gap {gap}, g* {gstar}"}
                    return res
    return res


def random_small_market(rng: np.random.Generator, T: int = 2, cap: int = 3, max_scen: int = 4):
    pi = np.sort(rng.integers(0, 30, size=T)).astype(float)
    mm = MarketModel(tuple(pi), float(rng.integers(0, 15)), float(rng.integers(0, 25)))
    n = int(rng.integers(1, max_scen + 1))
    scen = ScenarioSet(tuple(tuple(int(v) for v in rng.integers(0, cap + 1, size=T))
                             for _ in range(n)))
    return mm, scen, Caps(cap, cap)


def market_suite(bounds: SmallInstanceBounds, n_markets: int = 20, seed: int = 0,
                 config: SolverConfig = SolverConfig()) -> SuiteResult:
    res = SuiteResult("rounding gap certificate vs integer optimum")
    rng = np.random.default_rng(seed)
    T = min(bounds.T_max, 2)
    cap = min(bounds.supply_max, 3)
    for _ in range(n_markets):
        mm, scen, caps = random_small_market(rng, T, cap)
        d_star, y_star, J_star = oracle.bf_optimal_integer_market(mm, scen, caps)
        report = market.solve_market(mm, scen, caps, config)
        res.checked += 1
        problem = None
        if J_star - report.objective_rounded > report.gap_bound + 1e-9:
            problem = "rounded profit outside certificate"
        elif report.objective_relaxed < J_star - 1e-6:
            problem = "relaxation below integer optimum"
        if problem:
            res.counterexample = {
                "pi_unit": list(mm.pi_unit), "c_da": mm.c_da, "c_rt": mm.c_rt,
                "scenarios": [list(s) for s in scen.scenarios], "J_star": J_star,
                "relaxed": report.objective_relaxed, "rounded": report.objective_rounded,
                "problem": problem,
            }
            return res
    return res


def run_all(bounds: SmallInstanceBounds, **overrides) -> list[SuiteResult]:
    return [
        adequacy_suite(bounds, **overrides),
        purchase_suite(bounds),
        market_suite(bounds),
    ]
