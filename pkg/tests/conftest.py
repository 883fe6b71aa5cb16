from fractions import Fraction

import pytest

from borwin.graph import Arc, Window, WindowedDag
from borwin.huc import HucInstance, OperatingPoint

F = Fraction


def make_wclpp5() -> WindowedDag:
    """Five-vertex windowed instance used as the regression fixture.

    Vertices s,1,2,3,p with windows [5,5], [10,27], [10,15], [20,29]
    (none on s); arcs carry (value, resource):
    s->1 (11,5)  s->3 (15,15)  1->3 (10,5)  1->2 (13,10)
    3->2 (6,15)  2->p (5,10)   3->p (12,6)
    Five s-p paths, two feasible, optimum (s,1,2,p) with value 29.
    """
    labels = ["s", "1", "2", "3", "p"]
    windows = [
        Window(None, None),
        Window(F(5), F(5)),
        Window(F(10), F(27)),
        Window(F(10), F(15)),
        Window(F(20), F(29)),
    ]
    arcs = [
        Arc(0, 1, F(11), F(5)),
        Arc(0, 3, F(15), F(15)),
        Arc(1, 3, F(10), F(5)),
        Arc(1, 2, F(13), F(10)),
        Arc(3, 2, F(6), F(15)),
        Arc(2, 4, F(5), F(10)),
        Arc(3, 4, F(12), F(6)),
    ]
    return WindowedDag(windows, arcs, 0, 4, labels=labels)


def make_huc5() -> HucInstance:
    """Five-period commitment fixture with three levels (idle included).

    Prices and water values are chosen so the per-point revenue table is
    t=1: (0, 2.8, 1)   t=2: (0, -6.8, -6.2)  t=3: (0, 0.4, -0.8)
    t=4: (0, -11.6, -9.8)  t=5: (0, 2.0, 0.4)
    and level flows are 0 / 6 / 11 cumulatively.
    """
    return HucInstance(
        periods=5,
        points=(
            OperatingPoint(F(0), F(0)),
            OperatingPoint(F(6), F(8)),
            OperatingPoint(F(5), F(6)),
        ),
        ramp_up=F(6),
        ramp_down=F(6),
        min_updown=3,
        prices=(F(2), F(4, 5), F(17, 10), F(1, 5), F(19, 10)),
        water_value_upstream=F(11, 5),
        water_value_downstream=F(0),
        win_lo=(F(0), F(0), F(7), F(18), F(18)),
        win_hi=(F(11), F(18), F(18), F(18), F(18)),
    )


@pytest.fixture
def wclpp() -> WindowedDag:
    return make_wclpp5()


@pytest.fixture
def huc5() -> HucInstance:
    return make_huc5()
