"""Global maximization of Lipschitz-like functions.

An f is beta-Lipschitz-like if |f(x) - f(y)| <= beta(||x - y||) for a monotone
modulus beta with beta(0) = 0. Provided here: a sawtooth (Piyavskii-Shubert
style) method on intervals, grid search and dense-curve search on the
standard simplex, and a hypercube-curve method for compact convex sets.
"""
from __future__ import annotations

import heapq
import math
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass
from typing import Callable, Iterator, Sequence

import numpy as np

from .entropy import Modulus
from .errors import DomainError, EvaluationError, RefusalError, ValidationError


@dataclass
class OptimizationOutcome:
    best_value: float
    best_point: np.ndarray | float
    upper_bound: float
    iterations: int
    converged: bool
    evaluations: int = 0

    @property
    def gap(self) -> float:
        return self.upper_bound - self.best_value


def _as_modulus(beta) -> Modulus:
    """Accept a Modulus, a callable, or a number (read as a Lipschitz constant)."""
    if isinstance(beta, Modulus):
        return beta
    if isinstance(beta, (int, float, np.integer, np.floating)):
        return Modulus.linear(float(beta))
    if not callable(beta):
        raise ValidationError(f"modulus must be callable or a number, got {type(beta).__name__}")
    return Modulus(beta)


def largest_step(beta, target: float, diameter: float = 2.0) -> float:
    """Largest delta in [0, diameter] with beta(delta) <= target (bisection)."""
    if not target > 0:
        raise DomainError(f"target must be positive, got {target}")
    beta = _as_modulus(beta)
    if beta(diameter) <= target:
        return diameter
    if beta.is_linear and beta.slope > 0 and target / beta.slope <= min(beta.cap, diameter):
        return target / beta.slope
    lo, hi = 0.0, diameter
    while hi - lo > 1e-12 * hi:
        mid = 0.5 * (lo + hi)
        if beta(mid) <= target:
            lo = mid
        else:
            hi = mid
    return lo


def _checked(f, x):
    v = f(x)
    try:
        v = float(v)
    except (TypeError, ValueError):
        raise EvaluationError(f"objective returned non-numeric value at {x!r}", x)
    if not math.isfinite(v):
        raise EvaluationError(f"objective returned {v} at {x!r}", x)
    return v


def _crossing(beta: Modulus, ql, fl, qr, fr, tol):
    """Peak of min(F_l, F_r) on [ql, qr]; returns (certified value, next point).

    g(q) = F_l(q) - F_r(q) is nondecreasing, so bisection keeps g(lo) <= 0 <= g(hi)
    and F_l(hi) bounds the true peak from above.
    """
    width = qr - ql
    if beta.is_linear and beta.slope > 0:
        L = beta.slope
        q = 0.5 * (ql + qr) + (fr - fl) / (2 * L)
        if ql <= q <= qr and q - ql <= beta.cap and qr - q <= beta.cap:
            return fl + L * (q - ql), q
    bf = beta.fn
    g = lambda q: fl + bf(q - ql) - fr - bf(qr - q)
    glo, ghi = g(ql), g(qr)
    if glo >= 0:
        # only possible if f breaks the modulus or ties exactly
        return fl, ql
    if ghi <= 0:
        return fr, qr
    # Illinois regula falsi on the bracket, bisection steps when it stalls.
    # F_l(hi) overshoots the true peak by at most g(hi), so stop on that.
    lo, hi = ql, qr
    wlo, whi = glo, ghi  # Illinois-weighted copies; ghi stays the true g(hi) > 0
    side = 0
    for it in range(400):
        if ghi <= tol or hi - lo <= tol:
            break
        mid = hi - whi * (hi - lo) / (whi - wlo)
        if it % 8 == 7 or not lo < mid < hi:
            mid = 0.5 * (lo + hi)
        gm = g(mid)
        if gm <= 0:
            lo, wlo = mid, gm
            if side == -1:
                whi *= 0.5
            side = -1
        else:
            hi, ghi, whi = mid, gm, gm
            if side == 1:
                wlo *= 0.5
            side = 1
    return fl + beta(hi - ql), hi


def maximize_1d(f: Callable[[float], float], beta, a: float, b: float,
                eps: float | None = None, max_iter: int | None = None,
                callback: Callable | None = None) -> OptimizationOutcome:
    """Maximize a beta-Lipschitz-like f on [a, b].

    Stops when the certified gap F(q*) - f(q*) <= eps, or after ``max_iter``
    iterations (an iteration = one new sample point after the initial one at a).
    ``upper_bound`` is always a valid bound on max f (up to the objective's
    own evaluation error).
    """
    if not a < b:
        raise DomainError(f"need a < b, got [{a}, {b}]")
    if eps is None and max_iter is None:
        raise DomainError("give a precision eps or an iteration budget max_iter")
    if eps is not None and not eps > 0:
        raise DomainError("eps must be positive")
    beta = _as_modulus(beta)
    span = b - a

    def root_tol(k):
        t = 1e-10 * span
        if eps is not None:
            t = min(eps / (8 * max(k, 1)), t)
        return t

    fa = _checked(f, a)
    best_v, best_q = fa, a
    n_eval = 1
    k = 0
    qstar, Fstar = b, fa + beta(span)
    parent = None  # interval (ql, fl, qr, fr) that produced q*
    heap: list = []
    converged = False
    while True:
        fq = _checked(f, qstar)
        n_eval += 1
        k += 1
        if fq > best_v:
            best_v, best_q = fq, qstar
        if callback is not None:
            callback(k, qstar, fq, Fstar)
        if eps is not None and Fstar - fq <= eps:
            converged = True
            upper = Fstar
            break
        if parent is None:
            pieces = ((a, fa, b, fq),)
        else:
            ql, fl, qr, fr = parent
            pieces = ((ql, fl, qstar, fq), (qstar, fq, qr, fr))
        tol = root_tol(k)
        for u, fu, v, fv in pieces:
            if v > u:
                val, q = _crossing(beta, u, fu, v, fv, tol)
                # ties on the bound go to the leftmost interval
                heapq.heappush(heap, (-val, u, q, fu, v, fv))
        if max_iter is not None and k >= max_iter:
            upper = -heap[0][0] if heap else best_v
            break
        if not heap:
            converged, upper = True, best_v
            break
        negv, ql, qstar, fl, qr, fr = heapq.heappop(heap)
        Fstar = -negv
        parent = (ql, fl, qr, fr)
        if not ql < qstar < qr:
            # peak sits on a sampled endpoint
            known = fl if qstar <= ql else fr
            if eps is not None and Fstar - known <= eps:
                converged, upper = True, Fstar
                break
            qstar = 0.5 * (ql + qr)
    return OptimizationOutcome(best_v, best_q, max(upper, best_v), k, converged, n_eval)


# ---------------------------------------------------------------- simplex grid

def grid_size(d: int, n: int) -> int:
    return math.comb(n + d - 1, d - 1)


def _unrank(d: int, n: int, index: int, reverse: bool, out: list) -> None:
    # Block structure: first coordinate n - m for m = 0..n, followed by the
    # (d-1)-grid of level m. Block m runs forward iff n - m is even, so each
    # forward sequence starts at (n,0,..,0) and ends at (0,..,0,n).
    while True:
        if reverse:
            index = grid_size(d, n) - 1 - index
        if d == 1:
            out.append(n)
            return
        # blocks 0..m-1 hold comb(m+d-2, d-1) points in total; binary search m
        lo, hi = 0, n
        while lo < hi:
            mid = (lo + hi + 1) // 2
            if math.comb(mid + d - 2, d - 1) <= index:
                lo = mid
            else:
                hi = mid - 1
        m = lo
        index -= math.comb(m + d - 2, d - 1)
        out.append(n - m)
        d, n, reverse = d - 1, m, (n - m) % 2 == 1


def _iter_grid(d: int, n: int, reverse: bool = False) -> Iterator[tuple]:
    if d == 1:
        yield (n,)
        return
    ms = range(n, -1, -1) if reverse else range(n + 1)
    for m in ms:
        sub_rev = ((n - m) % 2 == 1) != reverse
        for tail in _iter_grid(d - 1, m, sub_rev):
            yield (n - m,) + tail


class SimplexGrid:
    """Rational grid {k/N : k in Z^d_+, sum k = N} in equidistant order.

    Consecutive points are exactly 2/N apart in l1. Points are produced on
    demand; the grid is never materialized.
    """

    def __init__(self, d: int, n: int):
        if d < 2:
            raise DomainError(f"simplex grid needs d >= 2, got {d}")
        if n < 1:
            raise DomainError(f"grid parameter N must be >= 1, got {n}")
        self.d, self.n = int(d), int(n)
        self.size = grid_size(self.d, self.n)

    def __len__(self):
        return self.size

    def counts(self, index: int) -> tuple:
        if not 0 <= index < self.size:
            raise IndexError(f"grid index {index} outside [0, {self.size})")
        out: list = []
        _unrank(self.d, self.n, int(index), False, out)
        return tuple(out)

    def point(self, index: int) -> np.ndarray:
        return np.array(self.counts(index), dtype=float) / self.n

    def __iter__(self) -> Iterator[np.ndarray]:
        for c in _iter_grid(self.d, self.n):
            yield np.array(c, dtype=float) / self.n


def grid_point(grid: SimplexGrid, index: int) -> np.ndarray:
    return grid.point(index)


def grid_resolution(beta, eps: float) -> int:
    """N = ceil(1/delta^2) with beta(delta) = eps/2."""
    delta = largest_step(beta, eps / 2)
    return math.ceil(1.0 / delta ** 2)


def maximize_grid(f: Callable[[np.ndarray], float], beta, d: int, eps: float,
                  threads: int = 1, max_points: int | None = None) -> OptimizationOutcome:
    """Exhaustive search of the simplex grid fine enough for precision eps."""
    if d < 2:
        raise DomainError(f"simplex search needs d >= 2, got {d}")
    if not eps > 0:
        raise DomainError("eps must be positive")
    grid = SimplexGrid(d, grid_resolution(beta, eps))
    if max_points is not None and grid.size > max_points:
        raise RefusalError(
            f"grid search needs {grid.size} evaluations (ceiling {max_points})", grid.size)
    if threads > 1:
        with ThreadPoolExecutor(max_workers=threads) as pool:
            values = list(pool.map(lambda x: _checked(f, x), grid, chunksize=64))
        i = int(np.argmax(values))  # first index on ties
        best_v = values[i]
    else:
        best_v, i = -math.inf, -1
        for j, x in enumerate(grid):
            v = _checked(f, x)
            if v > best_v:
                best_v, i = v, j
    return OptimizationOutcome(best_v, grid.point(i), best_v + eps, grid.size, True, grid.size)


# ---------------------------------------------------------------- dense curve

class SimplexCurve:
    """Piecewise-linear curve through the ordered grid, parametrized by l1 arc length."""

    def __init__(self, d: int, n: int):
        self.grid = SimplexGrid(d, n)
        if self.grid.size < 2:
            raise DomainError("curve needs at least two grid points")
        self.n = n
        self.length = 2.0 / n * self.grid.size

    @property
    def density(self) -> float:
        return 2.0 * (self.grid.d - 1) / self.n

    def __call__(self, theta: float) -> np.ndarray:
        if not 0 <= theta <= self.length:
            raise IndexError(f"theta={theta} outside [0, {self.length}]")
        s = theta * self.n / 2
        k = min(int(math.floor(s)), self.grid.size - 2)
        t = min(max(1 + k - s, 0.0), 1.0)  # parameters past the last vertex map to it
        x0 = np.array(self.grid.counts(k), dtype=float)
        x1 = np.array(self.grid.counts(k + 1), dtype=float)
        return (t * x0 + (1 - t) * x1) / self.n


def curve_point(curve: SimplexCurve, theta: float) -> np.ndarray:
    return curve(theta)


def maximize_dense_curve(f: Callable[[np.ndarray], float], beta, d: int, eps: float,
                         max_iter: int | None = None) -> OptimizationOutcome:
    """Reduce simplex maximization to an interval via a dense curve.

    Half the budget goes to curve density, half to the 1-d search.
    """
    if d < 2:
        raise DomainError(f"simplex search needs d >= 2, got {d}")
    if not eps > 0:
        raise DomainError("eps must be positive")
    beta = _as_modulus(beta)
    alpha = largest_step(beta, eps / 2)
    curve = SimplexCurve(d, math.ceil(2 * (d - 1) / alpha))
    composed = beta.compose(Modulus.linear(1.0, cap=2.0))
    res = maximize_1d(lambda th: f(curve(th)), composed, 0.0, curve.length,
                      eps=eps / 2, max_iter=max_iter)
    # density error: every simplex point is within alpha of the curve
    return OptimizationOutcome(res.best_value, curve(res.best_point),
                               res.upper_bound + eps / 2, res.iterations,
                               res.converged, res.evaluations)


# ------------------------------------------------ compact convex via extension

class HypercubeCurve:
    """Cosine curve filling the box prod [a_i, b_i]; sqrt(d-1)*eta dense in l2."""

    def __init__(self, bounds: Sequence[Sequence[float]], eta: float):
        b = np.asarray(bounds, dtype=float)
        if b.ndim != 2 or b.shape[1] != 2 or b.shape[0] < 2:
            raise DomainError("bounds must be a list of at least two [a_i, b_i] pairs")
        if np.any(b[:, 0] > b[:, 1]):
            raise DomainError("each interval needs a_i <= b_i")
        if not eta > 0:
            raise DomainError("eta must be positive")
        self.lo, self.hi = b[:, 0], b[:, 1]
        self.eta = eta
        scale = np.abs(self.lo) + np.abs(self.hi)
        if np.any(scale[1:] == 0):
            raise DomainError("intervals [0, 0] beyond the first axis are not supported")
        d = len(scale)
        self.eta_i = np.ones(d)
        for i in range(1, d):
            self.eta_i[i] = self.eta_i[i - 1] * (eta / math.pi) / scale[i]
        self.lip_const = 0.5 * math.sqrt(float(np.sum(scale ** 2 * self.eta_i ** 2)))
        self.theta_max = math.pi / self.eta_i[-1]

    @property
    def dim(self) -> int:
        return len(self.lo)

    def __call__(self, theta: float) -> np.ndarray:
        return 0.5 * (self.lo - self.hi) * np.cos(self.eta_i * theta) + 0.5 * (self.lo + self.hi)


_NORM_C1 = {"l1": lambda d: 1 / math.sqrt(d), "l2": lambda d: 1.0,
            "linf": lambda d: 1.0}
_NORM_C2 = {"l1": lambda d: 1.0, "l2": lambda d: 1.0, "linf": lambda d: math.sqrt(d)}
_NORM_ORD = {"l1": 1, "l2": 2, "linf": np.inf}


@dataclass
class ExtensionSpec:
    """f on a convex D, extended to the ambient space by projection.

    ``norm`` is the norm in which f is beta-Lipschitz-like; constants c1, c2
    satisfy c1 ||x|| <= ||x||_2 <= c2 ||x||.
    """

    f: Callable[[np.ndarray], float]
    beta: Modulus
    kappa: Modulus
    projector: Callable[[np.ndarray], np.ndarray]
    dim: int
    norm: str = "l1"

    def __post_init__(self):
        if self.norm not in _NORM_ORD:
            raise DomainError(f"unknown norm {self.norm!r}")
        self.beta = _as_modulus(self.beta)
        self.kappa = _as_modulus(self.kappa)

    @property
    def c1(self) -> float:
        return _NORM_C1[self.norm](self.dim)

    @property
    def norm_equiv_c(self) -> float:
        return _NORM_C2[self.norm](self.dim) / self.c1

    def extended_modulus(self) -> Modulus:
        C = self.norm_equiv_c
        return self.beta.scaled(C) + self.kappa.scaled(C + 1)


def extend(spec: ExtensionSpec, x) -> float:
    x = np.asarray(x, dtype=float)
    try:
        px = np.asarray(spec.projector(x), dtype=float)
    except Exception as exc:  # noqa: BLE001 - surfaced with context
        raise EvaluationError(f"projection failed at {x!r}: {exc}", x) from exc
    dist = float(np.linalg.norm(x - px, ord=_NORM_ORD[spec.norm]))
    return _checked(spec.f, px) - spec.beta(dist)


def maximize_compact_convex(f, beta, kappa, projector, bounds, eps: float,
                            norm: str = "l1",
                            max_iter: int | None = None) -> OptimizationOutcome:
    """Maximize f over a convex D inside the box ``bounds`` via a hypercube curve."""
    bounds = np.asarray(bounds, dtype=float)
    d = bounds.shape[0]
    if d < 2:
        raise DomainError("needs dimension >= 2")
    if not eps > 0:
        raise DomainError("eps must be positive")
    spec = ExtensionSpec(f, beta, kappa, projector, d, norm)
    bbar = spec.extended_modulus()
    diam = float(np.linalg.norm(bounds[:, 1] - bounds[:, 0], ord=_NORM_ORD[norm]))
    alpha = largest_step(bbar, eps / 2, diameter=max(diam, 1e-12))
    eta = spec.c1 * alpha / math.sqrt(d - 1)
    curve = HypercubeCurve(bounds, eta)
    # curve is L-Lipschitz in l2, hence L/c1 in the working norm
    curve_mod = Modulus.linear(curve.lip_const / spec.c1)
    res = maximize_1d(lambda th: extend(spec, curve(th)), bbar.compose(curve_mod),
                      0.0, curve.theta_max, eps=eps / 2, max_iter=max_iter)
    px = np.asarray(projector(curve(res.best_point)), dtype=float)
    best = max(res.best_value, _checked(f, px))
    return OptimizationOutcome(best, px, max(res.upper_bound + eps / 2, best),
                               res.iterations, res.converged, res.evaluations)


def project_simplex(x) -> np.ndarray:
    """Euclidean projection onto the probability simplex (sort-based)."""
    x = np.asarray(x, dtype=float)
    u = np.sort(x)[::-1]
    css = np.cumsum(u) - 1
    rho = np.nonzero(u * np.arange(1, len(x) + 1) > css)[0][-1]
    tau = css[rho] / (rho + 1)
    return np.maximum(x - tau, 0.0)


def project_box(lo, hi) -> Callable[[np.ndarray], np.ndarray]:
    lo, hi = np.asarray(lo, dtype=float), np.asarray(hi, dtype=float)
    return lambda x: np.clip(x, lo, hi)
