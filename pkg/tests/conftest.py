import pytest

from tpgabor.window import make_window

# two-sided exponential, one-sided type 3, even type 4
G1 = (1.0, -1.0)
G2 = (1.0, 0.5, 1.0 / 3.0)
G3 = (1.0, -1.0, 0.5, -0.5)
OTHERS = ((-1.0, -0.5), (2.0, -1.0 / 3.0), (1.0, 0.5, 0.25, -1.0))


@pytest.fixture
def g1():
    return make_window(G1)


@pytest.fixture
def g2():
    return make_window(G2)


@pytest.fixture
def g3():
    return make_window(G3)
