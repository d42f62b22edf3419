"""Command-line entry point.

Exit codes: 0 ok, 2 input error, 3 infeasible service, 4 internal invariant
violation, 5 optimizer warning under ``--strict``.
"""
from __future__ import annotations

import argparse
import csv
import logging
import sys

from . import io, verify
from .errors import InputError, InvariantViolation, RatecapError
from .market import SolverConfig, profit, revenue_from_d, solve_market
from .oracle import SmallInstanceBounds
from .portfolio import decompose_portfolio, demand_duration
from .realtime import ScenarioSet, estimate_V, simulate_delivery

log = logging.getLogger("ratecap")


def _int_list(text: str) -> tuple[int, ...]:
    try:
        return tuple(int(v) for v in text.split(",") if v.strip())
    except ValueError as exc:
        raise argparse.ArgumentTypeError(f"expected comma-separated integers: {text}") from exc


def build_parser() -> argparse.ArgumentParser:
    p = argparse.ArgumentParser(
        prog="ratecap",
        description="Portfolio, purchase and allocation planning for rate-constrained energy services",
    )
    p.add_argument("command", choices=["decompose", "simulate", "optimize", "verify"])
    p.add_argument("--market", help="market JSON file")
    p.add_argument("--portfolio", help="portfolio JSON file")
    p.add_argument("--scenarios", help="renewable scenario CSV file")
    p.add_argument("--generate", type=int, metavar="N", help="generate N scenarios instead of reading a file")
    p.add_argument("--seed", type=int, default=0, help="seed for --generate")
    p.add_argument("--gen-mean", type=float, default=2.0, help="per-slot mean for --generate")
    p.add_argument("--gen-spread", type=float, default=1.0, help="per-slot std dev for --generate")
    p.add_argument("--y", type=_int_list, help="day-ahead energy per slot, e.g. 1,0,2")
    p.add_argument("--out", help="write the JSON report here as well as stdout")
    p.add_argument("--trace-csv", help="simulate: write per-slot traces as CSV")
    p.add_argument("--iters", type=int, default=SolverConfig.iterations)
    p.add_argument("--step", type=float, default=SolverConfig.step)
    p.add_argument("--tol", type=float, default=SolverConfig.tol)
    p.add_argument("--no-polish", action="store_true",
                   help="skip the cutting-plane pass after supergradient ascent")
    p.add_argument("--strict", action="store_true", help="exit 5 on optimizer warnings")
    p.add_argument("--bounds", type=_int_list, default=(4, 3, 4, 4), metavar="T,N,D,P",
                   help="verify: max horizon, services, duration, supply")
    return p


def _require(args, *names):
    for name in names:
        if getattr(args, name) is None:
            raise InputError(f"--{name} is required for {args.command}")


def _scenarios(args, horizon: int) -> ScenarioSet:
    if args.scenarios is not None:
        s = io.load_scenarios(args.scenarios)
    elif args.generate is not None:
        s = io.generate_scenarios(args.generate, horizon, args.seed, args.gen_mean, args.gen_spread)
    else:
        raise InputError("need --scenarios or --generate")
    if s.horizon not in (None, horizon):
        raise InputError(f"scenario horizon {s.horizon} != {horizon}")
    return s


def _emit(doc, args) -> None:
    sys.stdout.write(io.dump_json(doc, args.out))


def cmd_decompose(args) -> int:
    _require(args, "portfolio")
    c = io.load_portfolio(args.portfolio)
    unit = decompose_portfolio(c)
    _emit({
        "horizon": c.horizon,
        "durations": list(unit.durations),
        "origin": [list(o) for o in unit.origin],
        "d": list(demand_duration(unit)),
    }, args)
    return 0


def cmd_simulate(args) -> int:
    _require(args, "market", "portfolio")
    mm, _ = io.load_market(args.market)
    c = io.load_portfolio(args.portfolio)
    if mm.horizon != c.horizon:
        raise InputError(f"market horizon {mm.horizon} != portfolio horizon {c.horizon}")
    T = c.horizon
    y = args.y if args.y is not None else (0,) * T
    if len(y) != T or min(y, default=0) < 0:
        raise InputError(f"--y needs {T} nonnegative entries")
    scen = _scenarios(args, T)
    if not len(scen):
        log.warning("no scenarios: expected real-time cost reported as 0")
    d = demand_duration(decompose_portfolio(c))
    probs = scen.probabilities() if len(scen) else ()
    traces = []
    for i, r in enumerate(scen.scenarios):
        tr = simulate_delivery(c, y, r)
        traces.append({
            "index": i,
            "weight": probs[i],
            "r": list(r),
            "a": list(tr.profile.a),
            "q": list(tr.profile.q),
            "total_purchase": tr.total_purchase,
            "allocations": [list(u) for u in tr.merged],
        })
    V = estimate_V(c, y, scen, mm.c_rt)
    revenue = revenue_from_d(mm, d)
    summary = {
        "n_scenarios": len(scen),
        "expected_purchase": scen.expectation([t["total_purchase"] for t in traces]),
        "V": V,
        "revenue": revenue,
        "day_ahead_cost": mm.c_da * sum(y),
        "profit": revenue - mm.c_da * sum(y) - V,
    }
    if len(scen):
        check = profit(mm, d, y, scen)
        if abs(check - summary["profit"]) > 1e-9 * max(1.0, abs(check)):
            raise InvariantViolation(f"profit mismatch {check} vs {summary['profit']}")
    if args.trace_csv:
        _write_traces(args.trace_csv, traces, y, len(c))
    _emit({"horizon": T, "y": list(y), "d": list(d), "scenarios": traces, "summary": summary}, args)
    return 0


def _write_traces(path, traces, y, n_consumers) -> None:
    with open(path, "w", newline="") as f:
        w = csv.writer(f)
        w.writerow(["scenario", "slot", "y", "r", "a", "q"]
                   + [f"consumer_{i}" for i in range(n_consumers)])
        for tr in traces:
            for t in range(len(y)):
                w.writerow([tr["index"], t + 1, y[t], tr["r"][t], tr["a"][t], tr["q"][t]]
                           + [u[t] for u in tr["allocations"]])


def cmd_optimize(args) -> int:
    _require(args, "market")
    mm, caps = io.load_market(args.market)
    if caps is None:
        raise InputError("market file needs d_max and y_max for optimize")
    scen = _scenarios(args, mm.horizon)
    config = SolverConfig(iterations=args.iters, step=args.step, tol=args.tol,
                          polish=not args.no_polish)
    rep = solve_market(mm, scen, caps, config)
    if rep.objective_rounded < rep.objective_relaxed - rep.gap_bound - 1e-9:
        raise InvariantViolation("rounded objective outside the gap certificate")
    _emit({
        "relaxed": {"d": list(rep.relaxed.d), "y": list(rep.relaxed.y)},
        "rounded": {"d": list(rep.rounded.d), "y": list(rep.rounded.y)},
        "objective_relaxed": rep.objective_relaxed,
        "objective_rounded": rep.objective_rounded,
        "gap_bound": rep.gap_bound,
        "iterations": rep.iterations,
        "final_step_size": rep.final_step_size,
        "polished": rep.polished,
        "warning": rep.warning,
        "portfolio": io.portfolio_to_dict(rep.unit_portfolio),
    }, args)
    return 5 if (args.strict and rep.warning) else 0


def cmd_verify(args) -> int:
    if len(args.bounds) != 4:
        raise InputError("--bounds takes four integers T,N,D,P")
    bounds = SmallInstanceBounds(*args.bounds)
    return report_suites(verify.run_all(bounds))


def report_suites(results) -> int:
    ok = True
    for res in results:
        status = "PASS" if res.passed else "FAIL"
        print(f"{status}  {res.name}  ({res.checked} instances)")
        if not res.passed:
            ok = False
            print(f"      counterexample: {res.counterexample}")
    return 0 if ok else InvariantViolation.exit_code


COMMANDS = {
    "decompose": cmd_decompose,
    "simulate": cmd_simulate,
    "optimize": cmd_optimize,
    "verify": cmd_verify,
}


def main(argv=None) -> int:
    logging.basicConfig(level=logging.WARNING, format="%(levelname)s: %(message)s")
    args = build_parser().parse_args(argv)
    try:
        return COMMANDS[args.command](args)
    except RatecapError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return exc.exit_code


if __name__ == "__main__":
    sys.exit(main())
