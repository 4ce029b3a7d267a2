from fractions import Fraction

import pytest

from radialkzb.envalg import lie_algebra


@pytest.fixture(scope="session")
def sl2():
    return lie_algebra("A1")


@pytest.fixture(scope="session")
def sl3():
    return lie_algebra("A2")


def frac(s) -> Fraction:
    return Fraction(s)
