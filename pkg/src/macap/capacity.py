"""Sum capacity of two-sender MACs and the relaxed (joint-input) capacity."""
from __future__ import annotations

import math
import os
from dataclasses import dataclass

import numpy as np

from .entropy import Mac, Modulus, beta_I_modulus, check_prob, effective_channel, xlogx
from .errors import ConvergenceError, DomainError, RefusalError, ValidationError
from .lipschitz import (SimplexGrid, grid_resolution, largest_step, maximize_1d,
                        maximize_dense_curve, maximize_grid)

DEFAULT_EVAL_CEILING = 10 ** 7
DEFAULT_INNER_MAX_ITER = 200_000


def eval_ceiling() -> int:
    raw = os.environ.get("MACAP_EVAL_CEILING")
    if raw is None:
        return DEFAULT_EVAL_CEILING
    try:
        return int(float(raw))
    except ValueError:
        raise ValidationError(f"MACAP_EVAL_CEILING must be a number, got {raw!r}")


@dataclass
class InnerSolveReport:
    value: float          # I*(q) estimate, nats (lower bound)
    optimizer_p: np.ndarray
    gap: float            # value + gap >= true maximum
    iterations: int
    gaps: list | None = None


@dataclass
class SumCapacityReport:
    value: float
    method: str
    precision: float | None
    upper_bound: float
    outer_point: np.ndarray
    inner_point: np.ndarray
    iterations: int = 0
    converged: bool = True


def _dual_terms(A, b, p):
    out = A @ p
    logs = np.zeros_like(out)
    pos = out > 0
    logs[pos] = np.log(out[pos])
    D = -(A.T @ logs) - b
    return D


def channel_capacity(A: np.ndarray, b: np.ndarray, eps: float, p0=None,
                     max_iter: int = DEFAULT_INNER_MAX_ITER,
                     track: bool = False) -> InnerSolveReport:
    """max_p H(A p) - <b, p> over the simplex, by multiplicative updates.

    The certificate max_j D_j - <p, D> bounds the suboptimality of p, where D
    is the gradient of the objective up to an additive constant.
    """
    if not eps > 0:
        raise DomainError("inner precision must be positive")
    n = A.shape[1]
    p = np.full(n, 1.0 / n) if p0 is None else np.asarray(p0, dtype=float).copy()
    gaps = [] if track else None
    # the objective is nondecreasing under the update, so pairing it with the
    # best upper bound seen so far gives a nonincreasing certified gap
    upper = math.inf
    gap = math.inf
    for it in range(max_iter + 1):
        D = _dual_terms(A, b, p)
        val = float(p @ D)
        upper = min(upper, float(D.max()))
        gap = max(upper - val, 0.0)
        if track:
            gaps.append(gap)
        if gap <= eps:
            return InnerSolveReport(max(val, 0.0), p, gap, it, gaps)
        w = p * np.exp(D - D.max())
        p = w / w.sum()
    best_gap = gap
    raise ConvergenceError(
        f"inner solver did not reach gap {eps:g} in {max_iter} iterations", best_gap)


def inner_capacity(mac: Mac, q, eps_I: float = 1e-6, p0=None,
                   max_iter: int = DEFAULT_INNER_MAX_ITER,
                   track: bool = False) -> InnerSolveReport:
    """I*(q) = max_p I(p, q) for fixed sender-2 distribution q."""
    ch = effective_channel(mac, q)
    return channel_capacity(ch.aq, ch.bq, eps_I, p0=p0, max_iter=max_iter, track=track)


def _warm(p, floor=1e-6):
    # keep every coordinate alive so multiplicative updates can recover it
    p = (1 - floor) * p + floor / len(p)
    return p / p.sum()


def sum_capacity_d2_binary(mac: Mac, eps: float | None = 0.01,
                           max_iter: int | None = None) -> SumCapacityReport:
    """Sum capacity when one sender is binary: 1-d sawtooth search over q = (s, 1-s)."""
    if mac.d2 != 2:
        if mac.d1 == 2:
            rep = sum_capacity_d2_binary(mac.swapped(), eps, max_iter)
            rep.outer_point, rep.inner_point = rep.inner_point, rep.outer_point
            return rep
        raise ValidationError(
            f"no binary input alphabet (d1={mac.d1}, d2={mac.d2}); "
            "use method 'grid' or 'dense_curve'")
    beta = beta_I_modulus(mac).scaled(2.0)
    if eps is not None:
        if not eps > 0:
            raise DomainError("eps must be positive")
        expected = math.ceil(1.0 / largest_step(beta, eps / 2, diameter=1.0))
        eps_I = eps / (8 * expected)
        outer_eps = eps - 2 * eps_I
    else:
        eps_I = 1e-9
        outer_eps = None
    cache: dict = {}
    state = {"p": None, "gap": 0.0}

    def istar(s):
        s = min(max(s, 0.0), 1.0)
        r = inner_capacity(mac, np.array([s, 1 - s]), eps_I,
                           p0=None if state["p"] is None else _warm(state["p"]))
        state["p"] = r.optimizer_p
        state["gap"] = max(state["gap"], r.gap)
        cache[s] = r.optimizer_p
        return r.value

    res = maximize_1d(istar, beta, 0.0, 1.0, eps=outer_eps, max_iter=max_iter)
    s = float(res.best_point)
    return SumCapacityReport(
        value=res.best_value, method="piyavskii_shubert_d2", precision=eps,
        upper_bound=res.upper_bound + state["gap"], outer_point=np.array([s, 1 - s]),
        inner_point=cache[s], iterations=res.iterations, converged=res.converged)


def estimate_evaluations(mac: Mac, method: str, eps: float) -> int:
    beta = beta_I_modulus(mac)
    if method == "grid":
        return SimplexGrid(mac.d2, grid_resolution(beta, eps / 2)).size
    if method == "dense_curve":
        # worst case of the sawtooth search on the curve (Prop.-style ceiling)
        alpha = largest_step(beta, eps / 4)
        n = math.ceil(2 * (mac.d2 - 1) / alpha)
        length = 2.0 / n * SimplexGrid(mac.d2, n).size
        delta = largest_step(beta.compose(Modulus.linear(1.0, cap=2.0)), eps / 8,
                             diameter=length)
        return math.ceil(length / delta)
    raise ValidationError(f"unknown method {method!r}")


def sum_capacity_general(mac: Mac, method: str = "grid", eps: float = 0.1,
                         threads: int = 1, ceiling: int | None = None,
                         max_iter: int | None = None) -> SumCapacityReport:
    """Sum capacity by simplex search over sender 2's distribution.

    Budget: eps/2 for the outer search, eps/2 for inner-solve error.
    """
    if not eps > 0:
        raise DomainError("eps must be positive")
    if method not in ("grid", "dense_curve"):
        raise ValidationError(f"unknown method {method!r}; use 'grid' or 'dense_curve'")
    ceiling = eval_ceiling() if ceiling is None else ceiling
    est = estimate_evaluations(mac, method, eps)
    if est > ceiling and max_iter is None:
        raise RefusalError(
            f"{method} search would need about {est} inner solves (ceiling {ceiling}); "
            "raise MACAP_EVAL_CEILING or loosen eps", est)
    beta = beta_I_modulus(mac)
    eps_I = eps / 2
    inner_points: dict = {}
    gaps = [0.0]

    def istar(q):
        q = np.clip(q, 0.0, None)
        q = q / q.sum()
        r = inner_capacity(mac, q, eps_I)
        inner_points[q.tobytes()] = r.optimizer_p
        gaps.append(r.gap)
        return r.value

    if method == "grid":
        res = maximize_grid(istar, beta, mac.d2, eps / 2, threads=threads)
    else:
        res = maximize_dense_curve(istar, beta, mac.d2, eps / 2, max_iter=max_iter)
    q = np.asarray(res.best_point, dtype=float)
    qn = np.clip(q, 0.0, None)
    qn = qn / qn.sum()
    p = inner_points.get(qn.tobytes())
    if p is None:
        p = inner_capacity(mac, qn, eps_I).optimizer_p
    return SumCapacityReport(
        value=res.best_value, method=method, precision=eps,
        upper_bound=res.upper_bound + max(gaps), outer_point=qn, inner_point=p,
        iterations=res.iterations, converged=res.converged)


def sum_capacity(mac: Mac, eps: float | None = 0.01, method: str | None = None,
                 max_iter: int | None = None, threads: int = 1) -> SumCapacityReport:
    """Dispatch: binary-side search when possible, otherwise simplex search."""
    if method in (None, "auto", "piyavskii_shubert_d2") and 2 in (mac.d1, mac.d2):
        return sum_capacity_d2_binary(mac, eps, max_iter)
    if method in (None, "auto"):
        method = "grid"
    if method == "piyavskii_shubert_d2":
        raise ValidationError("method piyavskii_shubert_d2 needs an input alphabet of size 2")
    if eps is None:
        eps = 0.1
    return sum_capacity_general(mac, method, eps, threads=threads, max_iter=max_iter)


def relaxed_sum_capacity(mac: Mac, eps: float = 1e-7,
                         max_iter: int = DEFAULT_INNER_MAX_ITER) -> float:
    """Capacity over joint input distributions (MAC as one point-to-point channel)."""
    A = mac.transition.reshape(mac.dout, mac.d1 * mac.d2)
    b = -xlogx(A).sum(axis=0)
    return channel_capacity(A, b, eps, max_iter=max_iter).value
