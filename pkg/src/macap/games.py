"""Nonlocal games, the MACs built from them, and the associated sum-rate bounds.

Question and answer tuples are flattened row-major with player 1 slowest.
"""
from __future__ import annotations

import itertools
import math
from dataclasses import dataclass
from typing import Iterable, Sequence

import numpy as np

from .entropy import Mac, PROB_TOL, _entropy, check_prob
from .errors import DomainError, RefusalError, ValidationError

DEFAULT_STRATEGY_CEILING = 10 ** 7

# Quantum winning probabilities are inputs, not computed here.
QUANTUM_VALUES = {
    "magic_square": 1.0,
    "chsh": (1 + 1 / math.sqrt(2)) / 2,
    "multiparty_parity": 1.0,
}


@dataclass(frozen=True, eq=False)
class NonlocalGame:
    """Promise-free N-player game; ``win[x, y]`` over flattened question/answer tuples.

    ``promise`` optionally records the promised question indices of a game that
    was made promise-free by letting every answer win off the promise.
    """

    question_sizes: tuple
    answer_sizes: tuple
    win: np.ndarray
    promise: tuple | None = None
    name: str = "custom"

    def __post_init__(self):
        qs = tuple(int(v) for v in self.question_sizes)
        ans = tuple(int(v) for v in self.answer_sizes)
        if len(qs) < 2:
            raise ValidationError(f"a nonlocal game needs at least 2 players, got {len(qs)}")
        if len(ans) != len(qs):
            raise ValidationError("question_sizes and answer_sizes differ in length")
        if min(qs) < 1 or min(ans) < 1:
            raise ValidationError("alphabet sizes must be positive")
        w = np.array(self.win, dtype=bool)
        if w.shape != (math.prod(qs), math.prod(ans)):
            raise ValidationError(
                f"winning table has shape {w.shape}, expected {(math.prod(qs), math.prod(ans))}")
        w.setflags(write=False)
        object.__setattr__(self, "question_sizes", qs)
        object.__setattr__(self, "answer_sizes", ans)
        object.__setattr__(self, "win", w)
        if self.promise is not None:
            object.__setattr__(self, "promise", tuple(sorted(int(i) for i in self.promise)))

    @classmethod
    def from_pairs(cls, question_sizes, answer_sizes,
                   winning: Iterable[tuple[Sequence[int], Sequence[int]]],
                   promise=None, name: str = "custom") -> "NonlocalGame":
        qs, ans = tuple(question_sizes), tuple(answer_sizes)
        if len(qs) < 2:
            raise ValidationError(f"a nonlocal game needs at least 2 players, got {len(qs)}")
        win = np.zeros((math.prod(qs), math.prod(ans)), dtype=bool)
        for k, (x, y) in enumerate(winning):
            x, y = tuple(x), tuple(y)
            if len(x) != len(qs) or len(y) != len(ans):
                raise ValidationError(f"winning entry {k}: tuple length does not match players")
            for i, (xi, yi) in enumerate(zip(x, y)):
                if not (0 <= xi < qs[i] and 0 <= yi < ans[i]):
                    raise ValidationError(
                        f"winning entry {k}: index out of range for player {i + 1} "
                        f"(question {xi} of {qs[i]}, answer {yi} of {ans[i]})")
            win[np.ravel_multi_index(x, qs), np.ravel_multi_index(y, ans)] = True
        return cls(qs, ans, win, promise, name)

    @property
    def players(self) -> int:
        return len(self.question_sizes)

    @property
    def d(self) -> int:
        return math.prod(self.question_sizes)

    @property
    def n_answers(self) -> int:
        return math.prod(self.answer_sizes)

    def question(self, index: int) -> tuple:
        return tuple(int(v) for v in np.unravel_index(index, self.question_sizes))

    def answer(self, index: int) -> tuple:
        return tuple(int(v) for v in np.unravel_index(index, self.answer_sizes))

    def winning_pairs(self) -> list:
        """Sorted list of (question tuple, answer tuple)."""
        xs, ys = np.nonzero(self.win)
        return [(self.question(x), self.answer(y)) for x, y in zip(xs, ys)]

    def input_sizes(self) -> tuple:
        return tuple(x * y for x, y in zip(self.question_sizes, self.answer_sizes))


# ---------------------------------------------------------------- built-ins

def chsh() -> NonlocalGame:
    pairs = [((x1, x2), (y1, y2)) for x1, x2, y1, y2 in itertools.product(range(2), repeat=4)
             if (x1 & x2) == (y1 ^ y2)]
    return NonlocalGame.from_pairs((2, 2), (2, 2), pairs, name="chsh")


def _bits3(a: int) -> tuple:
    return ((a >> 2) & 1, (a >> 1) & 1, a & 1)


def magic_square() -> NonlocalGame:
    """Row player answers a row of 3 bits (even parity), column player a column (odd)."""
    pairs = []
    for r, c, a, b in itertools.product(range(3), range(3), range(8), range(8)):
        ra, cb = _bits3(a), _bits3(b)
        if sum(ra) % 2 == 0 and sum(cb) % 2 == 1 and ra[c] == cb[r]:
            pairs.append(((r, c), (a, b)))
    return NonlocalGame.from_pairs((3, 3), (8, 8), pairs, name="magic_square")


def multiparty_parity(n: int = 3) -> NonlocalGame:
    """Promise: sum of question bits even. Off-promise questions win automatically."""
    if n < 2:
        raise ValidationError("multiparty parity needs at least 2 players")
    qs = (2,) * n
    win = np.zeros((2 ** n, 2 ** n), dtype=bool)
    promise = []
    for xi, x in enumerate(itertools.product(range(2), repeat=n)):
        sx = sum(x)
        if sx % 2:
            win[xi, :] = True
            continue
        promise.append(xi)
        for yi, y in enumerate(itertools.product(range(2), repeat=n)):
            win[xi, yi] = (sum(y) - sx // 2) % 2 == 0
    return NonlocalGame(qs, qs, win, promise=promise, name=f"multiparty_parity:{n}")


def signalling(m1: int = 2, m2: int = 2) -> NonlocalGame:
    """Each player must output the other player's question."""
    if m1 < 1 or m2 < 1:
        raise ValidationError("question alphabet sizes must be positive")
    pairs = [((x1, x2), (x2, x1)) for x1 in range(m1) for x2 in range(m2)]
    return NonlocalGame.from_pairs((m1, m2), (m2, m1), pairs, name=f"signalling:{m1}:{m2}")


BUILTINS = {
    "chsh": chsh,
    "magic_square": magic_square,
    "multiparty_parity": multiparty_parity,
    "signalling": signalling,
}


# ---------------------------------------------------------------- game MACs

def _channel_from_pwin(game: NonlocalGame, pwin: np.ndarray) -> np.ndarray:
    """Transition tensor (z, B_1, ..., B_N) given P(win | x, y) of shape (d, |Y|).

    Winning inputs deliver the question tuple noiselessly; losing ones a uniform z.
    """
    d = game.d
    t = pwin[None, :, :] * np.eye(d)[:, :, None] + (1 - pwin[None, :, :]) / d
    n = game.players
    t = t.reshape((d,) + game.question_sizes + game.answer_sizes)
    order = [0] + [a for i in range(n) for a in (1 + i, 1 + n + i)]
    return t.transpose(order).reshape((d,) + game.input_sizes())


def game_channel(game: NonlocalGame) -> np.ndarray:
    return _channel_from_pwin(game, game.win.astype(float))


def build_game_mac(game: NonlocalGame):
    """MAC N_G. Two players give a ``Mac``; more players give the raw tensor
    indexed (z, b_1, ..., b_N) with b_i = x_i * |Y_i| + y_i."""
    t = game_channel(game)
    return Mac(t) if game.players == 2 else t


@dataclass(frozen=True)
class Correlation:
    """P(y' | x, y) as an array (d, |Y|, |Y'|); ``output_sizes`` factor |Y'| per player."""

    table: np.ndarray
    output_sizes: tuple

    def __post_init__(self):
        t = np.asarray(self.table, dtype=float)
        if t.ndim != 3 or t.shape[2] != math.prod(self.output_sizes):
            raise ValidationError("correlation table must have shape (d, |Y|, prod output_sizes)")
        if np.any(t < -PROB_TOL) or np.any(np.abs(t.sum(axis=2) - 1) > PROB_TOL):
            raise ValidationError("correlation rows must be probability distributions")
        object.__setattr__(self, "table", t)
        object.__setattr__(self, "output_sizes", tuple(int(v) for v in self.output_sizes))


@dataclass(frozen=True)
class PostProcessing:
    """Per-player f_i(ybar_i | x_i, y_i, y'_i) as arrays indexed [x_i, y_i, y'_i, ybar_i]."""

    tables: tuple

    def __post_init__(self):
        ts = tuple(np.asarray(t, dtype=float) for t in self.tables)
        for i, t in enumerate(ts):
            if t.ndim != 4:
                raise ValidationError(f"post-processing table {i} must be 4-d")
            if np.any(t < -PROB_TOL) or np.any(np.abs(t.sum(axis=3) - 1) > PROB_TOL):
                raise ValidationError(f"post-processing table {i} has a slice not summing to 1")
        object.__setattr__(self, "tables", ts)


def assistance_channel(game: NonlocalGame, corr: Correlation, post: PostProcessing) -> np.ndarray:
    """A(ybar | x, y) as an array (d, |Y|, |Y|); questions pass through unchanged."""
    qs, ans = game.question_sizes, game.answer_sizes
    if corr.table.shape[:2] != (game.d, game.n_answers):
        raise ValidationError("correlation shape does not match the game")
    if len(post.tables) != game.players:
        raise ValidationError("need one post-processing table per player")
    for i, t in enumerate(post.tables):
        if t.shape != (qs[i], ans[i], corr.output_sizes[i], ans[i]):
            raise ValidationError(f"post-processing table {i} has shape {t.shape}")
    A = np.zeros((game.d, game.n_answers, game.n_answers))
    for x in range(game.d):
        xt = game.question(x)
        for y in range(game.n_answers):
            yt = game.answer(y)
            F = np.ones((1, 1))
            for i in range(game.players):
                F = np.kron(F, post.tables[i][xt[i], yt[i]])
            A[x, y] = corr.table[x, y] @ F
    return A


def assisted_mac(game: NonlocalGame, corr: Correlation, post: PostProcessing):
    """N_G composed with the correlation-assistance channel."""
    A = assistance_channel(game, corr, post)
    pwin = np.einsum("xyb,xb->xy", A, game.win.astype(float))
    t = _channel_from_pwin(game, pwin)
    return Mac(t) if game.players == 2 else t


def pr_box() -> Correlation:
    """PR box for two binary players: y'_1 xor y'_2 = x_1 and x_2, ignoring y."""
    g = chsh()
    t = np.zeros((4, 4, 4))
    for x in range(4):
        x1, x2 = g.question(x)
        for yp in range(4):
            a, b = divmod(yp, 2)
            if (a ^ b) == (x1 & x2):
                t[x, :, yp] = 0.5
    return Correlation(t, (2, 2))


def passthrough(game: NonlocalGame, corr: Correlation) -> PostProcessing:
    """f_i = delta(ybar_i, y'_i); requires |Y'_i| = |Y_i|."""
    tabs = []
    for i, (qx, ay) in enumerate(zip(game.question_sizes, game.answer_sizes)):
        if corr.output_sizes[i] != ay:
            raise ValidationError("pass-through needs correlation outputs matching answers")
        tabs.append(np.broadcast_to(np.eye(ay)[None, None], (qx, ay, ay, ay)).copy())
    return PostProcessing(tuple(tabs))


def keep_answers(game: NonlocalGame, corr: Correlation) -> PostProcessing:
    """f_i = delta(ybar_i, y_i): ignore the correlation entirely."""
    tabs = []
    for i, (qx, ay) in enumerate(zip(game.question_sizes, game.answer_sizes)):
        t = np.zeros((qx, ay, corr.output_sizes[i], ay))
        for y in range(ay):
            t[:, y, :, y] = 1
        tabs.append(t)
    return PostProcessing(tuple(tabs))


def trivial_correlation(game: NonlocalGame) -> Correlation:
    """Single-outcome correlation for every player."""
    return Correlation(np.ones((game.d, game.n_answers, 1)), (1,) * game.players)


# ---------------------------------------------------------------- analytics

@dataclass(frozen=True)
class WinningVector:
    w: np.ndarray

    def __post_init__(self):
        w = np.asarray(self.w, dtype=float)
        if w.ndim != 1 or w.size == 0:
            raise ValidationError("winning vector must be a non-empty 1-d array")
        if np.any(w < -PROB_TOL) or np.any(w > 1 + PROB_TOL):
            raise ValidationError("winning vector entries must lie in [0, 1]")
        object.__setattr__(self, "w", np.clip(w, 0.0, 1.0))

    @property
    def d(self) -> int:
        return self.w.size

    def matrix(self) -> np.ndarray:
        """Effective channel: column j keeps question j w.p. w_j, else uniform."""
        d = self.d
        return np.diag(self.w) + np.broadcast_to((1 - self.w)[None, :] / d, (d, d))


def _wv(w) -> WinningVector:
    return w if isinstance(w, WinningVector) else WinningVector(w)


def mi_given_winning_vector(w, pi) -> float:
    """Mutual information (nats) of the game MAC when questions ~ pi and the
    strategy wins question j with probability w_j."""
    w = _wv(w)
    pi = check_prob(pi, w.d, "pi")
    d = w.d
    return _entropy(w.matrix() @ pi) + float(pi @ w.w) * math.log(d) - math.log(d)


def deterministic_max_mi(d: int, K: int) -> float:
    """Largest mutual information when exactly K questions are won with certainty."""
    if d < 1 or K < 0:
        raise DomainError("need d >= 1 and K >= 0")
    if K > d:
        raise DomainError(f"K={K} exceeds d={d}")
    if K == 0:
        return 0.0
    if K == d:
        return math.log(d)
    return math.log(K + (d - K) * d ** (-d / (d - K)))


def deterministic_optimizer(d: int, K: int) -> np.ndarray:
    """Input distribution attaining ``deterministic_max_mi`` for w = (1,..,1,0,..,0)."""
    if not 0 < K < d:
        raise DomainError("optimizer formula covers 0 < K < d")
    E = d ** (d / (d - K))
    p_lose = 1 / (1 + K * (E - 1) / d)
    pi = np.empty(d)
    pi[:K] = (E - 1) * p_lose / d
    pi[K:] = p_lose / (d - K)
    return pi


def _istar_exponents(w: WinningVector) -> np.ndarray:
    if np.any(w.w <= 0):
        raise DomainError("all winning-vector entries must be positive")
    d = w.d
    w_eff = 1.0 / float(np.sum(1.0 / w.w))
    return d * w_eff * math.log(d) * (1 - 1 / w.w)


def istar_positive_w(w) -> float:
    """Max over pi of the winning-vector mutual information, all w_i > 0.

    Exact when the maximizer has full support (see ``istar_stationary_point``);
    otherwise the value is that of an infeasible stationary point and
    overestimates the maximum.
    """
    expo = _istar_exponents(_wv(w))
    m = expo.max()
    return float(m + math.log(np.exp(expo - m).sum()))


def istar_stationary_point(w) -> np.ndarray:
    """Input distribution behind ``istar_positive_w``.

    The output law is softmax of the exponents; pi solves W pi = z. Entries sum
    to 1 but may be negative, in which case the full-support premise fails.
    """
    w = _wv(w)
    expo = _istar_exponents(w)
    z = np.exp(expo - expo.max())
    z /= z.sum()
    r = (1 - w.w) / (w.w * w.d)
    c = float(r @ z) / (1 + r.sum())
    return (z - c) / w.w


def correlation_bound(d: int, omega: float) -> float:
    """Upper bound (nats) on the assisted sum rate given winning probability omega."""
    if d < 2:
        raise DomainError("need d >= 2")
    if not 0 <= omega <= 1:
        raise DomainError(f"omega must be in [0, 1], got {omega}")
    return math.log(d - 1 + d ** (-(1 - omega) * d))


def promise_free_winning_prob(omega_promise: float, promise_size: int,
                              question_space: int) -> float:
    if not 0 <= omega_promise <= 1:
        raise DomainError("omega_promise must be in [0, 1]")
    if promise_size > question_space or promise_size < 0 or question_space < 1:
        raise DomainError("promise must be a subset of the question space")
    r = promise_size / question_space
    return r * omega_promise + (1 - r)


def strategy_count(game: NonlocalGame) -> int:
    return math.prod(a ** q for q, a in zip(game.question_sizes, game.answer_sizes))


def classical_winning_prob(game: NonlocalGame, on_promise: bool = False,
                           ceiling: int = DEFAULT_STRATEGY_CEILING):
    """Best deterministic strategy under uniform questions.

    Enumerates strategies of all players but the last in lexicographic order;
    the last player's best response is separable per question, so this covers
    the full strategy space. Ties go to the lexicographically lowest strategy.
    Returns (omega, strategy) with strategy[i][x_i] = answer of player i.
    """
    total = strategy_count(game)
    if total > ceiling:
        raise RefusalError(f"{total} deterministic strategies exceed the ceiling {ceiling}", total)
    qs, ans, n = game.question_sizes, game.answer_sizes, game.players
    W = game.win.reshape(qs + ans).astype(np.int64)
    if on_promise:
        if game.promise is None:
            raise ValidationError("game has no promise")
        mask = np.zeros(game.d, dtype=np.int64)
        mask[list(game.promise)] = 1
        W = W * mask.reshape(qs + (1,) * n)
        n_q = len(game.promise)
    else:
        n_q = game.d
    xgrids = np.meshgrid(*[np.arange(q) for q in qs[:-1]], indexing="ij")
    best, best_s = -1, None
    for prefix in itertools.product(*[itertools.product(range(ans[i]), repeat=qs[i])
                                      for i in range(n - 1)]):
        # fix answers of players 1..n-1 -> table over (x_1..x_n, y_n)
        ysel = tuple(np.asarray(prefix[i])[xgrids[i]] for i in range(n - 1))
        sub = W[tuple(xgrids) + (slice(None),) + ysel + (slice(None),)]
        # sub has axes (x_1..x_{n-1}, x_n, y_n)
        score = sub.reshape(-1, qs[-1], ans[-1]).sum(axis=0)
        last = score.argmax(axis=1)
        val = int(score.max(axis=1).sum())
        if val > best:
            best, best_s = val, tuple(prefix) + (tuple(int(v) for v in last),)
    return best / n_q, best_s


def strategy_winning_vector(game: NonlocalGame, strategy) -> np.ndarray:
    """Per-question win indicator of a deterministic strategy."""
    w = np.zeros(game.d)
    for x in range(game.d):
        xt = game.question(x)
        y = np.ravel_multi_index(tuple(strategy[i][xt[i]] for i in range(game.players)),
                                 game.answer_sizes)
        w[x] = game.win[x, y]
    return w


def full_communication_winning_prob(game: NonlocalGame) -> float:
    return float(game.win.any(axis=1).mean())
