import itertools
from fractions import Fraction

import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from ergoblind.abstraction import AbstractGame, build_abstract_game
from ergoblind.errors import DegenerateInputError, DomainError, NotErgodicError, NotSinglePlayerError
from ergoblind.game import uniform_belief
from ergoblind.numeric import FLOAT, dot
from ergoblind.solver import (
    SolverParams,
    approximate_uniform_value,
    doubling_iterate,
    matrix_game_value,
    mean_cycle_value,
    shapley_iterate,
)

F = Fraction


def check_certificate(a, sol, tol=0):
    rows, cols = len(a), len(a[0])
    x, y, v = sol.row_strategy, sol.col_strategy, sol.value
    assert len(x) == rows and len(y) == cols
    assert min(x) >= -tol and min(y) >= -tol
    assert abs(sum(x) - 1) <= tol and abs(sum(y) - 1) <= tol
    for j in range(cols):
        assert sum(x[i] * a[i][j] for i in range(rows)) >= v - tol
    for i in range(rows):
        assert sum(a[i][j] * y[j] for j in range(cols)) <= v + tol


def test_matching_pennies():
    sol = matrix_game_value([[1, 0], [0, 1]])
    assert sol.value == F(1, 2)
    assert list(sol.row_strategy) == [F(1, 2), F(1, 2)]
    assert list(sol.col_strategy) == [F(1, 2), F(1, 2)]


def test_rock_paper_scissors_shifted():
    a = [[F(1, 2), 0, 1], [1, F(1, 2), 0], [0, 1, F(1, 2)]]
    sol = matrix_game_value(a)
    assert sol.value == F(1, 2)
    assert list(sol.row_strategy) == [F(1, 3)] * 3
    check_certificate(a, sol)


def test_saddle_point_and_degenerate_shapes():
    a = [[3, 1], [4, 2]]
    sol = matrix_game_value(a)
    assert sol.value == 2
    check_certificate(a, sol)
    assert matrix_game_value([[F(7, 9)]]).value == F(7, 9)
    assert matrix_game_value([[1, 0, F(1, 2)]]).value == 0
    with pytest.raises(DegenerateInputError):
        matrix_game_value([])


@given(
    st.integers(1, 5).flatmap(
        lambda r: st.integers(1, 5).flatmap(
            lambda c: st.lists(st.lists(st.integers(-4, 4), min_size=c, max_size=c), min_size=r, max_size=r)
        )
    )
)
def test_exact_minimax_certificate(a):
    check_certificate(a, matrix_game_value(a))


@given(st.integers(0, 2**32 - 1))
def test_float_minimax_certificate(seed):
    rng = np.random.default_rng(seed)
    r, c = rng.integers(1, 7, size=2)
    a = rng.random((r, c)).tolist()
    check_certificate(a, matrix_game_value(a), tol=1e-9)


def cycle_means(nodes, succ):
    """All simple-cycle means of a small graph given as succ[u] = [(v, w), ...]."""
    means = []
    for start in nodes:
        stack = [(start, (start,), F(0))]
        while stack:
            u, path, w = stack.pop()
            for v, wv in succ[u]:
                if v == start:
                    means.append(((w + wv) / len(path), set(path)))
                elif v > start and v not in path:
                    stack.append((v, path + (v,), w + wv))
    return means


def reachable(succ, s):
    seen, todo = {s}, [s]
    while todo:
        u = todo.pop()
        for v, _ in succ[u]:
            if v not in seen:
                seen.add(v)
                todo.append(v)
    return seen


@st.composite
def deterministic_games(draw, max_nodes=6):
    n = draw(st.integers(1, max_nodes))
    pairs = draw(st.integers(1, 3))
    nxt = [[draw(st.integers(0, n - 1)) for _ in range(pairs)] for _ in range(n)]
    rew = [[F(draw(st.integers(0, 8)), 8) for _ in range(pairs)] for _ in range(n)]
    minimizer = draw(st.booleans())
    n1, n2 = (1, pairs) if minimizer else (pairs, 1)
    return AbstractGame(list(range(n)), n1, n2, nxt, rew, n=1, eps=F(1, 2), num_beliefs=n)


@settings(max_examples=200)
@given(deterministic_games())
def test_mean_cycle_matches_cycle_enumeration(g):
    succ = [[(g.next_state[s][a], g.reward[s][a]) for a in range(g.num_pairs)] for s in range(g.num_states)]
    means = cycle_means(range(g.num_states), succ)
    pick = min if g.num_actions1 == 1 and g.num_actions2 > 1 else max
    values = mean_cycle_value(g)
    for s in range(g.num_states):
        reach = reachable(succ, s)
        assert values[s] == pick(m for m, nodes in means if nodes <= reach)


@settings(max_examples=50)
@given(deterministic_games(max_nodes=5))
def test_value_iteration_approaches_mean_cycle(g):
    n = 2000
    vi = shapley_iterate(g, n, mode=FLOAT).value_per_state
    mc = mean_cycle_value(g)
    # transient at most |S| stages of reward in [0, 1]
    for s in range(g.num_states):
        assert abs(vi[s] - float(mc[s])) <= g.num_states / n + 1e-12


def test_float_karp_matches_exact():
    g = AbstractGame([0, 1, 2], 2, 1, [[1, 2], [0, 2], [2, 0]], [[F(1, 3), 0], [1, F(1, 7)], [F(2, 5), F(1, 2)]], 1, 0, 3)
    gf = AbstractGame([0, 1, 2], 2, 1, g.next_state, [[float(x) for x in r] for r in g.reward], 1, 0, 3)
    assert mean_cycle_value(gf) == pytest.approx([float(v) for v in mean_cycle_value(g)], abs=1e-15)


def test_table1_value_from_three_stable_rows(table1):
    g = build_abstract_game(table1, uniform_belief(3), F(19, 20))
    rows = [g.states[t].base for t in g.next_state[0]]
    succ = {a: [(b, dot(rows[a], table1.rewards[b])) for b in range(3)] for a in range(3)}
    best = max(m for m, _ in cycle_means(range(3), succ))
    assert best == F(791, 1200)
    assert mean_cycle_value(g)[0] == best
    report = approximate_uniform_value(table1, uniform_belief(3), F(19, 20))
    assert report.method == "mean-cycle"
    assert report.root_value == best
    assert report.n_eps == 1 and report.abstract_states == 4


def test_mean_cycle_needs_single_player(inspection):
    g = build_abstract_game(inspection, (1, 0), F(1, 2))
    with pytest.raises(NotSinglePlayerError):
        mean_cycle_value(g)


def test_concurrent_solve_report(inspection):
    rep = approximate_uniform_value(inspection, (1, 0), F(1, 2), SolverParams(tol=1e-4))
    assert rep.method == "value-iteration"
    assert rep.residual <= 1e-4
    d = rep.as_dict()
    for key in ("ergodic", "n0", "tau_bar", "n_eps", "abstract_states", "num_beliefs", "root_value", "guarantee_radius"):
        assert key in d
    assert d["guarantee_radius"] == pytest.approx(2.0)
    again = approximate_uniform_value(inspection, (1, 0), F(1, 2), SolverParams(tol=1e-4))
    assert again.root_value == rep.root_value


def test_solver_guards(table1, swap_game):
    g = build_abstract_game(table1, uniform_belief(3), F(9, 10), max_depth=2)
    assert shapley_iterate(g, 2).horizon == 2
    with pytest.raises(DomainError):
        shapley_iterate(g, 3)
    with pytest.raises(DomainError):
        shapley_iterate(g, 0)
    with pytest.raises(NotErgodicError):
        approximate_uniform_value(swap_game, (1, 0), F(1, 2))


def test_doubling_stops_at_tolerance(inspection):
    g = build_abstract_game(inspection, (1, 0), F(1, 2))
    res = doubling_iterate(g, tol=1e-3)
    assert res.residual <= 1e-3
    assert res.horizon & (res.horizon - 1) == 0
    capped = doubling_iterate(g, tol=0.0, n_max=8)
    assert capped.horizon == 8


def test_exact_and_float_iteration_agree(inspection):
    g = build_abstract_game(inspection, (1, 0), F(1, 2))
    for n in (1, 2, 5):
        exact = shapley_iterate(g, n).root_value
        assert isinstance(exact, Fraction)
        assert shapley_iterate(g, n, mode=FLOAT).root_value == pytest.approx(float(exact), abs=1e-12)


def test_brute_force_horizons_match_shapley_on_single_player(table1):
    # single-player backward induction equals a max over all action sequences
    g = build_abstract_game(table1, uniform_belief(3), F(9, 10))
    for n in (1, 2, 3):
        best = max(
            sum(g.reward[s][a] for s, a in walk(g, seq)) for seq in itertools.product(range(3), repeat=n)
        )
        assert shapley_iterate(g, n).root_value == best / n


def walk(g, seq):
    s = 0
    for a in seq:
        yield s, a
        s = g.next_state[s][a]
