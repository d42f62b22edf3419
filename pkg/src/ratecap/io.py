"""Reading and writing the portfolio, market and scenario files.

Portfolio (JSON)::

    {"horizon": 3, "services": [{"E": 5, "m": 2}, {"E": 1, "m": 1}]}

Market (JSON)::

    {"horizon": 3, "pi_unit": [10, 18, 24], "c_da": 3, "c_rt": 8,
     "d_max": 4, "y_max": 4}

Scenarios (CSV): one scenario per row, one integer column per slot.  A row
may start with a ``weight:<w>`` field, e.g. ``weight:0.25,1,0,2``; either
every row carries a weight or none does (uniform).  Blank lines and lines
starting with ``#`` are skipped.
"""
from __future__ import annotations

import csv
import json
from pathlib import Path

import numpy as np

from .errors import InputError
from .market import Caps, MarketModel
from .portfolio import Portfolio, Service, UnitRatePortfolio
from .realtime import ScenarioSet


def _read_json(path) -> dict:
    try:
        with open(path) as f:
            doc = json.load(f)
    except (OSError, json.JSONDecodeError) as exc:
        raise InputError(f"cannot read {path}: {exc}") from exc
    if not isinstance(doc, dict):
        raise InputError(f"{path}: expected a JSON object")
    return doc


def _int(value, what):
    if isinstance(value, bool) or not isinstance(value, (int, float)) or int(value) != value:
        raise InputError(f"{what} must be an integer, got {value!r}")
    return int(value)


def parse_portfolio(doc: dict) -> Portfolio:
    try:
        horizon = _int(doc["horizon"], "horizon")
        services = [
            Service(_int(s["E"], "E"), _int(s["m"], "m")) for s in doc["services"]
        ]
    except (KeyError, TypeError) as exc:
        raise InputError(f"malformed portfolio: missing {exc}") from exc
    caps = None
    if "E_max" in doc or "m_max" in doc:
        caps = (_int(doc.get("E_max", 10**18), "E_max"), _int(doc.get("m_max", 10**18), "m_max"))
    return Portfolio(tuple(services), horizon, caps)


def load_portfolio(path) -> Portfolio:
    return parse_portfolio(_read_json(path))


def portfolio_to_dict(p: Portfolio | UnitRatePortfolio) -> dict:
    if isinstance(p, UnitRatePortfolio):
        services = [{"E": e, "m": 1} for e in p.durations]
    else:
        services = [{"E": s.E, "m": s.m} for s in p.services]
    return {"horizon": p.horizon, "services": services}


def parse_market(doc: dict) -> tuple[MarketModel, Caps | None]:
    try:
        pi = [float(v) for v in doc["pi_unit"]]
        mm = MarketModel(tuple(pi), float(doc["c_da"]), float(doc["c_rt"]))
    except (KeyError, TypeError, ValueError) as exc:
        raise InputError(f"malformed market: {exc}") from exc
    if "horizon" in doc and _int(doc["horizon"], "horizon") != mm.horizon:
        raise InputError(f"market horizon {doc['horizon']} but {mm.horizon} prices")
    caps = None
    if "d_max" in doc and "y_max" in doc:
        caps = Caps(_int(doc["d_max"], "d_max"), _int(doc["y_max"], "y_max"))
    return mm, caps


def load_market(path) -> tuple[MarketModel, Caps | None]:
    return parse_market(_read_json(path))


def load_scenarios(path) -> ScenarioSet:
    rows, weights = [], []
    try:
        with open(path, newline="") as f:
            for line_no, row in enumerate(csv.reader(f), 1):
                row = [c.strip() for c in row]
                if not row or not any(row) or row[0].startswith("#"):
                    continue
                if row[0].lower().startswith("weight:"):
                    weights.append(float(row[0].split(":", 1)[1]))
                    row = row[1:]
                try:
                    rows.append(tuple(int(c) for c in row))
                except ValueError as exc:
                    raise InputError(f"{path}:{line_no}: {exc}") from exc
    except OSError as exc:
        raise InputError(f"cannot read {path}: {exc}") from exc
    if weights and len(weights) != len(rows):
        raise InputError(f"{path}: weight on some rows but not all")
    return ScenarioSet(tuple(rows), tuple(weights) if weights else None)


def write_scenarios(path, s: ScenarioSet) -> None:
    with open(path, "w", newline="") as f:
        w = csv.writer(f)
        for i, r in enumerate(s.scenarios):
            prefix = [f"weight:{s.weights[i]!r}"] if s.weights is not None else []
            w.writerow(prefix + list(r))


def generate_scenarios(
    n: int, horizon: int, seed: int, mean: float = 2.0, spread: float = 1.0,
    upper: int | None = None,
) -> ScenarioSet:
    """Independent per-slot normal draws, rounded and clipped to [0, upper]."""
    rng = np.random.default_rng(seed)
    draws = np.rint(rng.normal(mean, spread, size=(n, horizon)))
    draws = np.clip(draws, 0, upper if upper is not None else np.inf).astype(int)
    return ScenarioSet(tuple(tuple(int(v) for v in row) for row in draws))


def dump_json(doc, path=None) -> str:
    text = json.dumps(doc, indent=2) + "\n"
    if path is not None:
        Path(path).write_text(text)
    return text
