import itertools

import pytest
from hypothesis import given, strategies as st

from ratecap.errors import InfeasibleServiceError, InputError
from ratecap.portfolio import (
    Portfolio,
    Service,
    UnitRatePortfolio,
    decompose_portfolio,
    decompose_service,
    demand_duration,
    durations_from_demand,
    merge_allocation,
    split_allocation,
)


@pytest.mark.parametrize("E, m, expected", [
    (5, 2, [3, 2]),
    (4, 2, [2, 2]),
    (0, 3, [0, 0, 0]),
])
def test_decompose_service(E, m, expected):
    assert decompose_service(Service(E, m)) == expected


@pytest.mark.parametrize("pairs, T, expected", [
    ([(5, 2), (1, 1)], 3, (3, 2, 1)),
    ([], 2, ()),
    ([(4, 2), (4, 2)], 2, (2, 2, 2, 2)),
])
def test_decompose_portfolio(pairs, T, expected):
    u = decompose_portfolio(Portfolio.from_pairs(pairs, T))
    assert u.durations == expected
    assert sorted(u.origin) == sorted(
        (i, k) for i, (_, m) in enumerate(pairs) for k in range(m)
    )


@pytest.mark.parametrize("durations, T, expected", [
    ((3, 2, 1), 3, (3, 2, 1)),
    ((2, 2), 2, (2, 2)),
    ((), 2, (0, 0)),
])
def test_demand_duration(durations, T, expected):
    assert demand_duration(UnitRatePortfolio(durations, T)) == expected


@given(st.lists(st.integers(0, 6), max_size=8))
def test_demand_duration_conserves_energy_and_inverts(durations):
    d = demand_duration(durations, 6)
    assert sum(d) == sum(durations)
    assert all(d[t] >= d[t + 1] for t in range(5))
    assert sorted(durations_from_demand(d)) == sorted(e for e in durations if e)


def test_infeasible_service_named():
    with pytest.raises(InfeasibleServiceError) as err:
        Portfolio.from_pairs([(1, 1), (7, 2)], 3)
    assert err.value.index == 1


def test_service_rejects_zero_rate():
    with pytest.raises(InfeasibleServiceError):
        Service(1, 0)


@pytest.mark.parametrize("E, m, u, rows", [
    (5, 2, (2, 2, 1, 0), [(1, 1, 1, 0), (1, 1, 0, 0)]),
    (2, 1, (1, 1), [(1, 1)]),
    (2, 2, (2, 0), [(1, 0), (1, 0)]),
])
def test_split_allocation(E, m, u, rows):
    assert split_allocation(Service(E, m), u) == rows


def test_split_rejects_infeasible():
    with pytest.raises(InputError):
        split_allocation(Service(2, 1), (2, 0))
    with pytest.raises(InputError):
        split_allocation(Service(3, 2), (1, 1))


@pytest.mark.parametrize("rows, T, expected", [
    ([(1, 1, 1, 0), (1, 1, 0, 0)], 4, (2, 2, 1, 0)),
    ([(0, 0, 0)], 3, (0, 0, 0)),
    ([(1, 0), (0, 1)], 2, (1, 1)),
    ([], 2, (0, 0)),
])
def test_merge_allocation(rows, T, expected):
    assert merge_allocation(rows, T) == expected


def test_split_merge_roundtrip_exhaustive():
    for T in range(1, 5):
        for m in range(1, 4):
            for u in itertools.product(range(m + 1), repeat=T):
                s = Service(sum(u), m)
                rows = split_allocation(s, u)
                assert merge_allocation(rows, T) == u
                assert [sum(r) for r in rows] == decompose_service(s)
                assert all(v in (0, 1) for r in rows for v in r)
