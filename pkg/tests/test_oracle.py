import pytest

from ratecap.errors import BoundsExceeded
from ratecap.market import Caps, MarketModel
from ratecap.oracle import (
    SmallInstanceBounds,
    bf_adequate,
    bf_min_purchase,
    bf_optimal_integer_market,
)
from ratecap.realtime import ScenarioSet


@pytest.mark.parametrize("durations, p, expected", [
    ((2, 1), (2, 1), True),
    ((2, 2), (1, 1, 1), False),
    ((), (0, 0), True),
])
def test_bf_adequate(durations, p, expected):
    assert bf_adequate(durations, p) is expected


def test_bf_adequate_exact_variant():
    assert bf_adequate((2, 1), (2, 1), exact=True)
    assert not bf_adequate((2, 1), (2, 2), exact=True)
    assert bf_adequate((2, 1), (2, 2))


def test_bounds_enforced():
    with pytest.raises(BoundsExceeded):
        bf_adequate((1, 1, 1, 1), (4, 4))
    with pytest.raises(BoundsExceeded):
        bf_adequate((1,), (5,))
    with pytest.raises(BoundsExceeded):
        SmallInstanceBounds(T_max=9, supply_max=9)
    with pytest.raises(BoundsExceeded):
        bf_min_purchase((1, 1, 1, 1, 1), (0,) * 5, (0,) * 5)


def test_bf_optimal_market_examples():
    zero = MarketModel((0, 0), 0, 0)
    d, y, J = bf_optimal_integer_market(zero, ScenarioSet(((1, 0),)), Caps(2, 2))
    assert (d, y, J) == ((0, 0), (0, 0), 0.0)

    mm = MarketModel((10,), 3, 8)
    assert bf_optimal_integer_market(mm, ScenarioSet(((0,),)), Caps(1, 1)) == ((1,), (1,), 7.0)

    cheap_rt = MarketModel((10,), 8, 3)
    d, y, J = bf_optimal_integer_market(cheap_rt, ScenarioSet(((0,),)), Caps(1, 1))
    assert y == (0,) and J == 7.0


def test_grid_limit():
    with pytest.raises(BoundsExceeded):
        bf_optimal_integer_market(MarketModel((1,) * 4, 0, 0), ScenarioSet(()), Caps(9, 9), grid_limit=1000)
