"""Values of the finite abstract game.

Concurrent instances go through Shapley value iteration with a matrix-game
oracle (a Bland-rule simplex written here, exact over rationals when the
payoffs are Fractions). Single-player instances are deterministic
mean-payoff graphs and get an exact answer from Karp's mean-cycle algorithm.
"""

from __future__ import annotations

import math
import time
from dataclasses import dataclass, field
from fractions import Fraction
from typing import NamedTuple, Sequence

import numpy as np

from .abstraction import AbstractGame, build_abstract_game
from .errors import DegenerateInputError, DomainError, NotErgodicError, NotSinglePlayerError
from .ergodicity import ErgodicityCertificate, n_epsilon, verify_ergodic
from .game import BlindGame
from .numeric import EXACT, FLOAT, Budget, Number

PIVOT_TOL = 1e-12


class MatrixGameSolution(NamedTuple):
    value: Number
    row_strategy: tuple
    col_strategy: tuple


def _pure_solution(payoffs, rows: int, cols: int, exact: bool) -> MatrixGameSolution | None:
    one, zero = (Fraction(1), Fraction(0)) if exact else (1.0, 0.0)
    if cols == 1:
        i = max(range(rows), key=lambda r: (payoffs[r][0], -r))
        return MatrixGameSolution(payoffs[i][0], tuple(one if r == i else zero for r in range(rows)), (one,))
    if rows == 1:
        j = min(range(cols), key=lambda c: (payoffs[0][c], c))
        return MatrixGameSolution(payoffs[0][j], (one,), tuple(one if c == j else zero for c in range(cols)))
    row_mins = [min(r) for r in payoffs]
    col_maxs = [max(payoffs[r][c] for r in range(rows)) for c in range(cols)]
    lo, hi = max(row_mins), min(col_maxs)
    if lo == hi:
        i = row_mins.index(lo)
        j = col_maxs.index(hi)
        return MatrixGameSolution(
            lo,
            tuple(one if r == i else zero for r in range(rows)),
            tuple(one if c == j else zero for c in range(cols)),
        )
    return None


def matrix_game_value(payoffs, mode: str | None = None, max_pivots: int = 10_000) -> MatrixGameSolution:
    """Value and optimal mixed strategies of a zero-sum matrix game (rows maximize).

    Solves max 1'y s.t. A'y <= 1, y >= 0 on the shifted matrix A' >= 1 by a
    tableau simplex with Bland's rule; the row strategy is read off the
    final reduced costs of the slack columns.
    """
    rows = len(payoffs)
    if rows == 0 or len(payoffs[0]) == 0:
        raise DegenerateInputError("matrix game needs at least one row and one column")
    cols = len(payoffs[0])
    if any(len(r) != cols for r in payoffs):
        raise DegenerateInputError("ragged payoff matrix")
    if mode is None:
        mode = FLOAT if any(isinstance(x, float) for r in payoffs for x in r) else EXACT
    exact = mode == EXACT
    if exact:
        g = [[Fraction(x) for x in r] for r in payoffs]
    else:
        g = [[float(x) for x in r] for r in payoffs]
        if not all(math.isfinite(x) for r in g for x in r):
            raise DegenerateInputError("payoffs must be finite")
    pure = _pure_solution(g, rows, cols, exact)
    if pure is not None:
        return pure

    one = Fraction(1) if exact else 1.0
    zero = Fraction(0) if exact else 0.0
    tol = 0 if exact else PIVOT_TOL
    shift = one - min(min(r) for r in g)
    # tableau columns: y_0..y_{cols-1}, s_0..s_{rows-1}, rhs
    width = cols + rows + 1
    tab = []
    for r in range(rows):
        row = [g[r][c] + shift for c in range(cols)] + [zero] * rows + [one]
        row[cols + r] = one
        tab.append(row)
    obj = [-one] * cols + [zero] * rows + [zero]
    basis = [cols + r for r in range(rows)]

    for _ in range(max_pivots):
        enter = next((c for c in range(width - 1) if obj[c] < -tol), None)
        if enter is None:
            break
        leave, best = None, None
        for r in range(rows):
            coef = tab[r][enter]
            if coef > tol:
                ratio = tab[r][-1] / coef
                if best is None or ratio < best or (ratio == best and basis[r] < basis[leave]):
                    leave, best = r, ratio
        if leave is None:
            raise DegenerateInputError("unbounded LP; payoffs were not shifted positive")
        piv = tab[leave][enter]
        prow = [x / piv for x in tab[leave]]
        tab[leave] = prow
        for r in range(rows):
            if r != leave and tab[r][enter] != 0:
                f = tab[r][enter]
                tab[r] = [x - f * y for x, y in zip(tab[r], prow)]
        f = obj[enter]
        obj = [x - f * y for x, y in zip(obj, prow)]
        basis[leave] = enter
    else:
        raise DegenerateInputError(f"simplex did not terminate within {max_pivots} pivots")

    total = obj[-1]
    y = [zero] * cols
    for r, var in enumerate(basis):
        if var < cols:
            y[var] = tab[r][-1]
    x = [obj[cols + r] for r in range(rows)]
    col_strategy = [v / total for v in y]
    row_strategy = [v / total for v in x]
    if not exact:
        col_strategy = _clean(col_strategy)
        row_strategy = _clean(row_strategy)
    value = one / total - shift
    return MatrixGameSolution(value, tuple(row_strategy), tuple(col_strategy))


def _clean(p: list) -> list:
    p = [max(0.0, v) for v in p]
    s = sum(p)
    return [v / s for v in p]


@dataclass
class SolveResult:
    value_per_state: list
    horizon: int
    residual: float
    root_value: Number


def _iterate_exact(g: AbstractGame):
    """Yield V_1, V_2, ... (total rewards) as lists of Fractions."""
    n1, n2 = g.num_actions1, g.num_actions2
    v = [Fraction(0)] * g.num_states
    while True:
        nv = []
        for s in range(g.num_states):
            q = [g.reward[s][a] + v[g.next_state[s][a]] for a in range(g.num_pairs)]
            if n2 == 1:
                nv.append(max(q))
            elif n1 == 1:
                nv.append(min(q))
            else:
                mat = [q[i * n2 : (i + 1) * n2] for i in range(n1)]
                nv.append(matrix_game_value(mat, EXACT).value)
        v = nv
        yield v


def _iterate_float(g: AbstractGame):
    """Jacobi sweeps in numpy; mixed-strategy states fall back to the simplex."""
    nxt, rew = g.arrays()
    n1, n2 = g.num_actions1, g.num_actions2
    v = np.zeros(g.num_states)
    while True:
        q = (rew + v[nxt]).reshape(g.num_states, n1, n2)
        if n2 == 1:
            nv = q[:, :, 0].max(axis=1)
        elif n1 == 1:
            nv = q[:, 0, :].min(axis=1)
        else:
            lo = q.min(axis=2).max(axis=1)
            hi = q.max(axis=1).min(axis=1)
            nv = lo.copy()
            for s in np.nonzero(lo != hi)[0]:
                nv[s] = matrix_game_value(q[s].tolist(), FLOAT).value
        v = nv
        yield v


def _iterates(g: AbstractGame, mode: str | None):
    if mode is None:
        mode = EXACT if g.exact else FLOAT
    return _iterate_exact(g) if mode == EXACT else _iterate_float(g)


def shapley_iterate(g: AbstractGame, horizon: int, mode: str | None = None) -> SolveResult:
    """N-stage values v_N = V_N / N by backward induction on total rewards."""
    if horizon < 1:
        raise DomainError(f"horizon must be >= 1, got {horizon}")
    if g.truncated and g.max_depth is not None and horizon > g.max_depth:
        raise DomainError(f"truncated abstract game only supports horizons <= {g.max_depth}")
    half = horizon // 2
    v_half = None
    for n, v in enumerate(_iterates(g, mode), start=1):
        if n == half:
            v_half = v
        if n == horizon:
            break
    values = [x / horizon for x in v]
    residual = math.inf if v_half is None else abs(float(values[0]) - float(v_half[0]) / half)
    return SolveResult(list(values), horizon, residual, values[0])


def doubling_iterate(g: AbstractGame, tol: float = 1e-4, n_max: int = 2**20, mode: str | None = None) -> SolveResult:
    """Run horizons 1, 2, 4, ... until |v_N - v_{N/2}| at the root is <= tol or N >= n_max."""
    prev = None
    checkpoint = 1
    # long horizons in rationals blow up denominators; exact only on request
    for n, v in enumerate(_iterates(g, mode or FLOAT), start=1):
        if n == checkpoint:
            root = float(v[0]) / n
            residual = math.inf if prev is None else abs(root - prev)
            if residual <= tol or n >= n_max:
                return SolveResult([x / n for x in v], n, residual, v[0] / n)
            prev = root
            checkpoint *= 2
    raise AssertionError("unreachable")


def _sccs(adj: list[list[int]]) -> list[list[int]]:
    """Tarjan's algorithm, iterative; components come out in reverse topological order."""
    n = len(adj)
    index = [-1] * n
    low = [0] * n
    on_stack = [False] * n
    stack, out = [], []
    counter = 0
    for root in range(n):
        if index[root] != -1:
            continue
        work = [(root, 0)]
        while work:
            v, i = work.pop()
            if i == 0:
                index[v] = low[v] = counter
                counter += 1
                stack.append(v)
                on_stack[v] = True
            recurse = False
            while i < len(adj[v]):
                w = adj[v][i]
                i += 1
                if index[w] == -1:
                    work.append((v, i))
                    work.append((w, 0))
                    recurse = True
                    break
                if on_stack[w]:
                    low[v] = min(low[v], index[w])
            if recurse:
                continue
            if low[v] == index[v]:
                comp = []
                while True:
                    w = stack.pop()
                    on_stack[w] = False
                    comp.append(w)
                    if w == v:
                        break
                out.append(sorted(comp))
            if work:
                u = work[-1][0]
                low[u] = min(low[u], low[v])
    return out


def _karp_sweeps(m: int, us, vs, ws, lowest):
    """Yield (k, d_k, reached_k) for k = 0..m: best k-edge walk weights from node 0."""
    d = np.full(m, lowest, dtype=ws.dtype)
    reach = np.zeros(m, dtype=bool)
    d[0], reach[0] = 0, True
    yield 0, d, reach
    for k in range(1, m + 1):
        ok = reach[us]
        nd = np.full(m, lowest, dtype=ws.dtype)
        np.maximum.at(nd, vs[ok], d[us[ok]] + ws[ok])
        reach = np.zeros(m, dtype=bool)
        reach[vs[ok]] = True
        d = nd
        yield k, d, reach


def _karp_max_mean(nodes: list[int], edges: dict, exact: bool):
    """Maximum cycle mean inside one strongly connected component, or None if acyclic.

    Two numpy passes over the walk table keep memory linear in the component.
    Exact weights are scaled to integers by the lcm of their denominators.
    """
    pos = {v: i for i, v in enumerate(nodes)}
    m = len(nodes)
    local = [(pos[u], pos[v], w) for (u, v), w in edges.items() if u in pos and v in pos]
    if not local:
        return None
    us = np.array([e[0] for e in local], dtype=np.int64)
    vs = np.array([e[1] for e in local], dtype=np.int64)
    scale = 1
    if exact:
        scale = math.lcm(*(Fraction(e[2]).denominator for e in local))
        ints = [int(Fraction(e[2]) * scale) for e in local]
        bound = (max(map(abs, ints)) + 1) * (m + 1) ** 2
        # python ints in object arrays when int64 could overflow
        dtype = np.int64 if bound < 2**62 else object
        ws = np.array(ints, dtype=dtype)
        lowest = -bound
    else:
        ws = np.array([float(e[2]) for e in local])
        lowest = -np.inf
    *_, (_, dm, reach_m) = _karp_sweeps(m, us, vs, ws, lowest)
    dm, reach_m = dm.copy(), reach_m.copy()
    # per node v, the minimum over k of (d_m - d_k) / (m - k) kept as num / den
    num = np.zeros(m, dtype=ws.dtype)
    den = np.zeros(m, dtype=ws.dtype if ws.dtype == object else np.int64)
    for k, d, reach in _karp_sweeps(m, us, vs, ws, lowest):
        if k == m:
            break
        ok = reach & reach_m
        # unreached entries hold the sentinel; zero them so the arithmetic stays finite
        cn = np.where(ok, dm, 0) - np.where(ok, d, 0)
        cd = m - k
        better = ok & ((den == 0) | (cn * den < num * cd))
        num[better] = cn[better]
        den[better] = cd
    live = np.nonzero(den)[0]
    if exact:
        return max(Fraction(int(num[v]), int(den[v]) * scale) for v in live)
    return max(float(num[v]) / float(den[v]) for v in live)


def mean_cycle_value(g: AbstractGame) -> list:
    """Exact long-run value of a single-player deterministic abstract game.

    The lone player (maximizer if |J| = 1, minimizer if |I| = 1) steers to
    the best reachable cycle, so the value of a state is the best cycle mean
    among the strongly connected components it can reach.
    """
    if not g.is_single_player:
        raise NotSinglePlayerError("mean_cycle_value needs |I| = 1 or |J| = 1")
    sign = 1 if g.num_actions2 == 1 else -1
    edges: dict = {}
    adj = [[] for _ in range(g.num_states)]
    for s in range(g.num_states):
        for a in range(g.num_pairs):
            t = g.next_state[s][a]
            w = sign * g.reward[s][a]
            if (s, t) not in edges:
                adj[s].append(t)
                edges[(s, t)] = w
            elif w > edges[(s, t)]:
                edges[(s, t)] = w
    comp_of = {}
    comps = _sccs(adj)
    best_reach = [None] * len(comps)
    for ci, comp in enumerate(comps):
        for v in comp:
            comp_of[v] = ci
    exact = g.exact
    by_comp_edges = [dict() for _ in comps]
    for (u, v), w in edges.items():
        if comp_of[u] == comp_of[v]:
            by_comp_edges[comp_of[u]][(u, v)] = w
    # reverse topological order: successors are finished before predecessors
    for ci, comp in enumerate(comps):
        val = _karp_max_mean(comp, by_comp_edges[ci], exact)
        for v in comp:
            for t in adj[v]:
                cj = comp_of[t]
                if cj != ci and best_reach[cj] is not None and (val is None or best_reach[cj] > val):
                    val = best_reach[cj]
        best_reach[ci] = val
    return [sign * best_reach[comp_of[s]] for s in range(g.num_states)]


@dataclass
class SolverParams:
    tol: float = 1e-4
    n_max: int = 2**20
    mode: str | None = None
    budget: Budget = field(default_factory=Budget)
    threads: int = 1


@dataclass
class SolveReport:
    certificate: ErgodicityCertificate
    n_eps: int
    eps: Number
    abstract_states: int
    num_beliefs: int
    root_value: Number
    method: str
    residual: float
    horizon: int | None
    timings: dict = field(default_factory=dict)

    @property
    def guarantee_radius(self) -> Number:
        return 4 * self.eps

    def as_dict(self) -> dict:
        cert = self.certificate
        out = {
            "ergodic": cert.ergodic,
            "n0": cert.n0,
            "tau_bar": float(cert.tau_bar),
            "n_eps": self.n_eps,
            "abstract_states": self.abstract_states,
            "num_beliefs": self.num_beliefs,
            "root_value": float(self.root_value),
            "guarantee_radius": float(self.guarantee_radius),
            "residual": self.residual,
            "horizon": self.horizon,
            "method": self.method,
        }
        if isinstance(self.root_value, Fraction):
            out["root_value_exact"] = str(self.root_value)
            out["tau_bar_exact"] = str(cert.tau_bar)
        return out


def approximate_uniform_value(
    game: BlindGame, b1: Sequence[Number], eps: Number, params: SolverParams | None = None
) -> SolveReport:
    """Approximate the uniform value from ``b1`` to within 4 * eps.

    Steps: verify ergodicity, size the block length, build the abstract game,
    then solve it exactly (single player) or by doubling value iteration.
    """
    params = params or SolverParams()
    if not 0 < eps < 1:
        raise DomainError(f"eps must lie in (0, 1), got {eps}")
    timings = {}
    t0 = time.perf_counter()
    cert = verify_ergodic(game, params.budget, threads=params.threads)
    timings["verify_ergodic"] = (time.perf_counter() - t0) * 1e3
    if not cert.ergodic:
        raise NotErgodicError(f"game is not ergodic; witness {cert.counterexample}", cert)
    t0 = time.perf_counter()
    n = n_epsilon(game, cert, eps)
    g = build_abstract_game(game, b1, eps, cert, params.budget)
    timings["build_abstract_game"] = (time.perf_counter() - t0) * 1e3
    t0 = time.perf_counter()
    if g.is_single_player:
        values = mean_cycle_value(g)
        root, method, residual, horizon = values[0], "mean-cycle", 0.0, None
    else:
        res = doubling_iterate(g, params.tol, params.n_max, params.mode)
        root, method, residual, horizon = res.root_value, "value-iteration", res.residual, res.horizon
    timings["solve"] = (time.perf_counter() - t0) * 1e3
    return SolveReport(cert, n, eps, g.num_states, g.num_beliefs, root, method, residual, horizon, timings)
