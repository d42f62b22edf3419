import itertools
import random

import pytest

from ratecap.adequacy import (
    LaxityState,
    energy_gap,
    is_adequate,
    is_exactly_adequate,
    llf_allocate,
    llf_allocate_step,
)
from ratecap.errors import InadequateSupplyError, InputError
from ratecap.majorization import weakly_majorizes
from ratecap.oracle import bf_adequate
from ratecap.portfolio import demand_duration


@pytest.mark.parametrize("d, p, expected", [
    ((3, 2, 1), (2, 2, 2), True),
    ((2, 2), (3, 1), False),
    ((0, 0), (0, 0), True),
])
def test_is_exactly_adequate(d, p, expected):
    assert is_exactly_adequate(d, p) is expected


@pytest.mark.parametrize("d, p, expected", [
    ((2, 1, 0), (1, 1, 2), True),
    ((2, 2, 1), (1, 1, 1), False),
    ((1, 0), (5, 5), True),
])
def test_is_adequate(d, p, expected):
    assert is_adequate(d, p) is expected


@pytest.mark.parametrize("d, p, expected", [
    ((2, 2, 1), (1, 1, 1), 2),
    ((2, 1, 0), (1, 1, 2), 0),
    ((1, 1), (0, 0), 2),
])
def test_energy_gap(d, p, expected):
    assert energy_gap(d, p) == expected


def test_gap_zero_iff_adequate_exhaustive():
    for T in range(1, 4):
        for d in itertools.combinations_with_replacement(range(3, -1, -1), T):
            for p in itertools.product(range(4), repeat=T):
                assert (energy_gap(d, p) == 0) == is_adequate(d, p)


def test_gap_is_lower_bound_on_any_adequate_topup():
    # every q >= p adequate for d costs at least the gap
    for T in range(1, 4):
        for d in itertools.combinations_with_replacement(range(2, -1, -1), T):
            for p in itertools.product(range(3), repeat=T):
                gap = energy_gap(d, p)
                best = None
                for extra in itertools.product(range(4), repeat=T):
                    q = tuple(a + b for a, b in zip(p, extra))
                    if weakly_majorizes(d, q):
                        assert sum(extra) >= gap
                        best = sum(extra) if best is None else min(best, sum(extra))
                assert best == gap


def test_length_mismatch():
    with pytest.raises(InputError):
        energy_gap((1,), (1, 1))


@pytest.mark.parametrize("p1, column", [(2, (1, 1)), (1, (1, 0))])
def test_llf_step(p1, column):
    state = LaxityState.initial(2, 2)
    assert state.laxity((2, 1)) == [0, 1]
    new, col = llf_allocate_step(state, (2, 1), p1)
    assert col == column
    assert new.served == column and new.t == 2


def test_llf_step_all_complete():
    state = LaxityState((2, 1), 3, 3)
    _, col = llf_allocate_step(state, (2, 1), 5)
    assert col == (0, 0)


@pytest.mark.parametrize("durations, p, nu", [
    ((2, 1), (2, 1), ((1, 1), (1, 0))),
    ((1,), (0, 1), ((0, 1),)),
    ((), (3, 1), ()),
])
def test_llf_allocate(durations, p, nu):
    assert llf_allocate(durations, p).nu == nu


def test_llf_reports_inadequate():
    with pytest.raises(InadequateSupplyError) as err:
        llf_allocate((2, 2), (1, 1, 1))
    assert err.value.unmet
    assert err.value.tail_index == 0
    assert err.value.partial is not None


def test_adequacy_matches_brute_force_small():
    for T in range(1, 4):
        for n in range(3):
            for durs in itertools.product(range(T + 1), repeat=n):
                for p in itertools.product(range(3), repeat=T):
                    d = demand_duration(durs, T)
                    assert is_adequate(d, p) == bf_adequate(durs, p)
                    assert is_exactly_adequate(d, p) == bf_adequate(durs, p, exact=True)


def test_llf_random_larger_instances():
    rng = random.Random(5)
    for _ in range(300):
        T = rng.randint(1, 12)
        durs = [rng.randint(0, T) for _ in range(rng.randint(0, 20))]
        p = [rng.randint(0, 8) for _ in range(T)]
        if not is_adequate(demand_duration(durs, T), p):
            with pytest.raises(InadequateSupplyError):
                llf_allocate(durs, p)
            continue
        alloc = llf_allocate(durs, p)
        assert alloc.row_sums() == tuple(durs)
        assert all(c <= x for c, x in zip(alloc.column_sums(T), p))


def test_llf_causal():
    rng = random.Random(11)
    for _ in range(200):
        T = rng.randint(2, 8)
        durs = [rng.randint(0, T) for _ in range(rng.randint(1, 6))]
        p = [rng.randint(0, 5) for _ in range(T)]
        t = rng.randint(1, T - 1)
        p2 = p[:t] + [rng.randint(0, 5) for _ in range(T - t)]
        cols = []
        for supply in (p, p2):
            try:
                nu = llf_allocate(durs, supply).nu
            except InadequateSupplyError as exc:
                nu = exc.partial.nu
            cols.append([tuple(row[:t]) for row in nu])
        assert cols[0] == cols[1]
