from fractions import Fraction

import pytest

from slowent import cutstack


@pytest.fixture(scope="session")
def sched_default():
    """Greedy minimal schedule, theta = 1/3, c = 2: r = (1, 28, 185221, ...)."""
    return cutstack.build_schedule(4, Fraction(1, 3), 2, 1)


@pytest.fixture(scope="session")
def sched_c5():
    """Loose-spacing variant, theta = 1/3, c = 5: r = (1, 217, ...)."""
    return cutstack.build_schedule(4, Fraction(1, 3), 5, 1)


@pytest.fixture(scope="session")
def sched_theta4():
    """theta = 1/4, c = 2: r = (1, 82, ...)."""
    return cutstack.build_schedule(4, Fraction(1, 4), 2, 1)
