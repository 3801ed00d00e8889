"""No-signalling winning probability of nonlocal games by linear programming.

The LP is solved by a small dense two-phase primal simplex with Bland's rule.
"""
from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .errors import MacapError, RefusalError, ValidationError
from .games import NonlocalGame

FEAS_TOL = 1e-9
OPT_TOL = 1e-9
DEFAULT_VAR_CEILING = 20_000


class LPError(MacapError):
    exit_code = 5


@dataclass
class NsConstraintSystem:
    a_eq: np.ndarray        # normalization rows followed by independent marginal rows
    b_eq: np.ndarray
    c: np.ndarray           # 1/d on winning coordinates
    n_blocks: int           # question tuples
    block_size: int         # answer tuples
    n_norm_rows: int
    ns_rows: np.ndarray     # all marginal-equality rows before rank filtering

    @property
    def n_vars(self) -> int:
        return self.n_blocks * self.block_size


def _independent_rows(rows: np.ndarray, basis: list, tol: float = 1e-9) -> list:
    """Indices of rows that extend the span of ``basis`` (modified Gram-Schmidt)."""
    keep = []
    for k, r in enumerate(rows):
        v = r.astype(float).copy()
        for q in basis:
            v -= (q @ v) * q
        nv = np.linalg.norm(v)
        if nv > tol * max(1.0, np.linalg.norm(r)):
            basis.append(v / nv)
            keep.append(k)
    return keep


def marginal_rows(game: NonlocalGame) -> np.ndarray:
    """Rows forcing each player's answer marginal to ignore the other questions.

    For player i, question x_i and answer y_i, consecutive question tuples
    sharing x_i must give equal P(y_i | x); one difference row per pair.
    """
    qs, ans, n = game.question_sizes, game.answer_sizes, game.players
    nY = game.n_answers
    y_of = np.array([game.answer(y) for y in range(nY)]).reshape(nY, n)
    x_of = np.array([game.question(x) for x in range(game.d)]).reshape(game.d, n)
    rows = []
    for i in range(n):
        for xi in range(qs[i]):
            members = np.nonzero(x_of[:, i] == xi)[0]
            for yi in range(ans[i]):
                s = (y_of[:, i] == yi).astype(float)
                for a, b in zip(members[:-1], members[1:]):
                    r = np.zeros(game.d * nY)
                    r[a * nY:(a + 1) * nY] = s
                    r[b * nY:(b + 1) * nY] = -s
                    rows.append(r)
    return np.array(rows).reshape(-1, game.d * nY)


def build_ns_system(game: NonlocalGame, ceiling: int = DEFAULT_VAR_CEILING) -> NsConstraintSystem:
    nv = game.d * game.n_answers
    if nv > ceiling:
        raise RefusalError(f"no-signalling LP has {nv} variables (ceiling {ceiling})", nv)
    d, nY = game.d, game.n_answers
    norm = np.kron(np.eye(d), np.ones((1, nY)))
    ns = marginal_rows(game)
    basis: list = []
    _independent_rows(norm, basis)
    keep = _independent_rows(ns, basis)
    a_eq = np.vstack([norm, ns[keep]]) if keep else norm
    b_eq = np.concatenate([np.ones(d), np.zeros(len(keep))])
    c = game.win.astype(float).ravel() / d
    return NsConstraintSystem(a_eq, b_eq, c, d, nY, d, ns)


def _run_simplex(T: np.ndarray, basis: list, n_cols: int) -> None:
    """Minimize with tableau T (last row reduced costs, last column rhs) in place."""
    m = T.shape[0] - 1
    max_pivots = 50 * (m + n_cols) + 1000
    for _ in range(max_pivots):
        r = T[-1, :n_cols]
        cand = np.nonzero(r < -OPT_TOL)[0]
        if cand.size == 0:
            return
        j = int(cand[0])  # Bland: lowest index
        col = T[:m, j]
        pos = np.nonzero(col > FEAS_TOL)[0]
        if pos.size == 0:
            raise LPError("linear program is unbounded")
        ratios = T[pos, -1] / col[pos]
        rmin = ratios.min()
        ties = pos[ratios <= rmin + FEAS_TOL]
        i = int(min(ties, key=lambda k: basis[k]))
        T[i] /= T[i, j]
        others = np.arange(T.shape[0]) != i
        T[others] -= np.outer(T[others, j], T[i])
        basis[i] = j
    raise LPError("simplex exceeded its pivot budget")


def simplex_maximize(c: np.ndarray, a_eq: np.ndarray, b_eq: np.ndarray):
    """max c.x s.t. a_eq x = b_eq, x >= 0. Returns (value, x)."""
    A = np.array(a_eq, dtype=float)
    b = np.array(b_eq, dtype=float)
    m, n = A.shape
    neg = b < 0
    A[neg] *= -1
    b[neg] *= -1
    # phase 1: artificial identity, minimize their sum
    T = np.zeros((m + 1, n + m + 1))
    T[:m, :n] = A
    T[:m, n:n + m] = np.eye(m)
    T[:m, -1] = b
    T[-1, :n] = -A.sum(axis=0)
    T[-1, -1] = -b.sum()
    basis = list(range(n, n + m))
    _run_simplex(T, basis, n + m)
    if -T[-1, -1] > 1e-7:
        raise LPError(f"linear program is infeasible (phase-1 residual {-T[-1, -1]:.3g})")
    # drive leftover artificials out of the basis; drop rows that are redundant
    rows = list(range(m))
    for i in range(m):
        if basis[i] >= n:
            nz = np.nonzero(np.abs(T[i, :n]) > FEAS_TOL)[0]
            if nz.size:
                j = int(nz[0])
                T[i] /= T[i, j]
                others = np.arange(m + 1) != i
                T[others] -= np.outer(T[others, j], T[i])
                basis[i] = j
            else:
                rows.remove(i)
    T = np.vstack([T[rows][:, list(range(n)) + [n + m]], np.zeros((1, n + 1))])
    basis = [basis[i] for i in rows]
    # phase 2: minimize -c
    cost = -np.asarray(c, dtype=float)
    T[-1, :n] = cost
    for i, j in enumerate(basis):
        T[-1] -= cost[j] * T[i]
    _run_simplex(T, basis, n)
    x = np.zeros(n)
    for i, j in enumerate(basis):
        x[j] = T[i, -1]
    x[np.abs(x) < FEAS_TOL] = 0.0
    return float(c @ x), x


def max_ns_winning_prob(game: NonlocalGame, ceiling: int = DEFAULT_VAR_CEILING):
    """Largest winning probability over no-signalling strategies (uniform questions).

    Returns (omega, v) with v reshaped to (question tuple, answer tuple).
    """
    sysm = build_ns_system(game, ceiling)
    val, x = simplex_maximize(sysm.c, sysm.a_eq, sysm.b_eq)
    v = x.reshape(sysm.n_blocks, sysm.block_size)
    res = np.abs(sysm.ns_rows @ x).max() if sysm.ns_rows.size else 0.0
    if res > 1e-7 or np.abs(v.sum(axis=1) - 1).max() > 1e-7:
        raise LPError(f"LP solution violates constraints (residual {res:.3g}); "
                      f"condition number {np.linalg.cond(sysm.a_eq):.3g}")
    return val, v


def ns_winning_vector(game: NonlocalGame, v: np.ndarray) -> np.ndarray:
    return (np.asarray(v) * game.win).sum(axis=1)
