from fractions import Fraction

import pytest
from hypothesis import HealthCheck, settings
from hypothesis import strategies as st

from ergoblind.examples import load_game, load_pfa
from ergoblind.game import BlindGame
from ergoblind.pfa import PFA

settings.register_profile("default", deadline=None, suppress_health_check=[HealthCheck.too_slow])
settings.load_profile("default")

# acceptance lines collected by tests/test_acceptance.py
ACCEPTANCE_LINES: dict = {}


def pytest_terminal_summary(terminalreporter):
    if ACCEPTANCE_LINES:
        terminalreporter.section("acceptance criteria")
        for n in sorted(ACCEPTANCE_LINES):
            terminalreporter.write_line(ACCEPTANCE_LINES[n])


@st.composite
def distributions(draw, k, grid=4, allow_zero=True):
    """Rational distribution over k outcomes with denominators dividing a small integer."""
    lo = 0 if allow_zero else 1
    w = draw(st.lists(st.integers(lo, grid), min_size=k, max_size=k).filter(lambda xs: sum(xs) > 0))
    s = sum(w)
    return tuple(Fraction(x, s) for x in w)


@st.composite
def stochastic_matrices(draw, k=None, max_k=4, grid=4):
    k = k or draw(st.integers(1, max_k))
    return tuple(draw(distributions(k, grid)) for _ in range(k))


@st.composite
def blind_games(draw, max_k=3, max_n1=2, max_n2=1, grid=4):
    k = draw(st.integers(1, max_k))
    n1 = draw(st.integers(1, max_n1))
    n2 = draw(st.integers(1, max_n2))
    pairs = n1 * n2
    mats = tuple(draw(stochastic_matrices(k, grid=grid)) for _ in range(pairs))
    rews = tuple(
        tuple(Fraction(x, grid) for x in draw(st.lists(st.integers(0, grid), min_size=k, max_size=k)))
        for _ in range(pairs)
    )
    return BlindGame(
        tuple(f"k{s}" for s in range(k)),
        tuple(f"i{s}" for s in range(n1)),
        tuple(f"j{s}" for s in range(n2)) if n2 > 1 else ("*",),
        mats,
        rews,
    )


@st.composite
def pfas(draw, max_k=3, max_symbols=2, grid=4):
    k = draw(st.integers(1, max_k))
    n = draw(st.integers(1, max_symbols))
    mats = tuple(draw(stochastic_matrices(k, grid=grid)) for _ in range(n))
    acc = draw(st.frozensets(st.integers(0, k - 1)))
    init = draw(st.integers(0, k - 1))
    return PFA(tuple(f"q{s}" for s in range(k)), tuple("ab"[:n]), mats, acc, init)


@pytest.fixture(scope="session")
def table1():
    return load_game("machine_maintenance")


@pytest.fixture(scope="session")
def swap_game():
    return load_game("swap_identity")


@pytest.fixture(scope="session")
def inspection():
    return load_game("inspection_game")


@pytest.fixture(scope="session")
def coin_pfa():
    return load_pfa("coin_pfa")
