import pytest

from treesub.problems import ModuloInstance, PCPInstance

CLASSIC = PCPInstance((("1", "111"), ("10111", "10"), ("10", "0")))
UNIT = PCPInstance((("0", "0"),))
UNSOLVABLE = PCPInstance((("0", "00"),))
COLLATZ = ModuloInstance(2, ((1, 0), (6, 4)))
ONE_STEP = ModuloInstance(2, ((1, 0), (0, 2)))


@pytest.fixture
def classic():
    return CLASSIC


@pytest.fixture
def collatz():
    return COLLATZ
