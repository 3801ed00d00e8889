"""Probability and entropy primitives, plus the two-sender MAC reformulation.

Everything is computed in nats. ``base="bits"`` only rescales the final number.
"""
from __future__ import annotations

import math
from dataclasses import dataclass, field
from functools import cached_property
from typing import Callable, Sequence

import numpy as np

from .errors import DomainError, ValidationError

PROB_TOL = 1e-9
LN2 = math.log(2.0)


def to_base(value, base: str = "nats"):
    """Convert a nat-valued quantity to ``base``."""
    if base == "nats":
        return value
    if base == "bits":
        return value / LN2
    raise ValidationError(f"unknown base {base!r}; use 'nats' or 'bits'")


def check_prob(p, dim: int | None = None, name: str = "p") -> np.ndarray:
    """Validate a probability vector and return it as a float array. Never renormalizes."""
    arr = np.asarray(p, dtype=float)
    if arr.ndim != 1 or arr.size == 0:
        raise ValidationError(f"{name} must be a non-empty 1-d vector")
    if dim is not None and arr.size != dim:
        raise ValidationError(f"{name} has dimension {arr.size}, expected {dim}")
    if not np.all(np.isfinite(arr)) or np.any(arr < -PROB_TOL):
        raise ValidationError(f"{name} has negative or non-finite entries")
    if abs(arr.sum() - 1.0) > PROB_TOL:
        raise ValidationError(f"{name} sums to {arr.sum():.12g}, not 1")
    return np.clip(arr, 0.0, None)


def xlogx(x) -> np.ndarray:
    """Elementwise x ln x with 0 ln 0 = 0."""
    x = np.asarray(x, dtype=float)
    out = np.zeros_like(x)
    pos = x > 0
    out[pos] = x[pos] * np.log(x[pos])
    return out


def _entropy(p: np.ndarray) -> float:
    return float(-xlogx(p).sum())


def shannon_entropy(p, base: str = "nats") -> float:
    return to_base(_entropy(check_prob(p)), base)


def modified_binary_entropy(x: float) -> float:
    """h(x) on [0, 1/2], clamped to ln 2 beyond."""
    if x < 0:
        raise DomainError(f"modified binary entropy needs x >= 0, got {x}")
    if x >= 0.5:
        return LN2
    if x == 0:
        return 0.0
    return -x * math.log(x) - (1 - x) * math.log1p(-x)


@dataclass(frozen=True, eq=False)
class Mac:
    """Two-sender discrete memoryless MAC, ``transition[z, b1, b2] = N(z|b1,b2)``."""

    transition: np.ndarray

    def __post_init__(self):
        t = np.array(self.transition, dtype=float)
        if t.ndim != 3 or min(t.shape) < 1:
            raise ValidationError("transition must be a 3-d array indexed [z][b1][b2]")
        if not np.all(np.isfinite(t)) or np.any(t < -PROB_TOL) or np.any(t > 1 + PROB_TOL):
            raise ValidationError("transition entries must lie in [0, 1]")
        sums = t.sum(axis=0)
        bad = np.argwhere(np.abs(sums - 1.0) > PROB_TOL)
        if bad.size:
            b1, b2 = (int(v) for v in bad[0])
            raise ValidationError(
                f"column (b1={b1}, b2={b2}) sums to {sums[b1, b2]:.12g}, not 1")
        t = np.clip(t, 0.0, 1.0)
        t.setflags(write=False)
        object.__setattr__(self, "transition", t)

    @property
    def dout(self) -> int:
        return self.transition.shape[0]

    @property
    def d1(self) -> int:
        return self.transition.shape[1]

    @property
    def d2(self) -> int:
        return self.transition.shape[2]

    def swapped(self) -> "Mac":
        """Same channel with the roles of the two senders exchanged."""
        return Mac(self.transition.transpose(0, 2, 1))

    def column_entropies(self) -> np.ndarray:
        """H(Z | b1, b2) for every input pair, shape (d1, d2)."""
        return self._col_h

    @cached_property
    def _col_h(self) -> np.ndarray:
        h = -xlogx(self.transition).sum(axis=0)
        h.setflags(write=False)
        return h

    def __eq__(self, other):
        return isinstance(other, Mac) and np.array_equal(self.transition, other.transition)

    def __repr__(self):
        return f"Mac(d1={self.d1}, d2={self.d2}, dout={self.dout})"


@dataclass(frozen=True)
class EffectiveChannel:
    aq: np.ndarray  # dout x d1, left-stochastic
    bq: np.ndarray  # length d1, nats


def effective_channel(mac: Mac, q) -> EffectiveChannel:
    """Fix sender 2's distribution ``q``; sender 1 then sees a point-to-point channel."""
    q = check_prob(q, mac.d2, "q")
    aq = mac.transition @ q
    bq = mac.column_entropies() @ q
    return EffectiveChannel(aq, bq)


def mutual_information(mac: Mac, p, q, base: str = "nats") -> float:
    """I(B1 B2; Z) for product input p x q."""
    p = check_prob(p, mac.d1, "p")
    ch = effective_channel(mac, q)
    val = _entropy(ch.aq @ p) - float(ch.bq @ p)
    return to_base(max(val, 0.0), base)


def h_n_max(mac: Mac) -> float:
    return float(mac.column_entropies().max())


@dataclass(frozen=True)
class Modulus:
    """Monotone continuity bound beta with beta(0) = 0.

    ``slope``/``cap`` mark the piecewise-linear family x -> slope*min(x, cap),
    which lets the 1-d optimizer use closed-form crossings.
    """

    fn: Callable[[float], float]
    kind: str = "generic"
    slope: float | None = None
    cap: float = math.inf
    params: dict = field(default_factory=dict)

    def __call__(self, x: float) -> float:
        return self.fn(x)

    @property
    def is_linear(self) -> bool:
        return self.slope is not None

    @classmethod
    def linear(cls, L: float, cap: float = math.inf) -> "Modulus":
        if L < 0:
            raise DomainError("Lipschitz constant must be nonnegative")
        if math.isinf(cap):
            return cls(lambda x: L * x, "linear", slope=L, params={"L": L})
        return cls(lambda x: L * min(x, cap), "linear", slope=L, cap=cap,
                   params={"L": L, "cap": cap})

    def scaled(self, c: float) -> "Modulus":
        """x -> beta(c x)."""
        if self.is_linear:
            return Modulus.linear(self.slope * c, self.cap / c)
        return Modulus(lambda x: self.fn(c * x), "scaled", params={"inner": self, "c": c})

    def compose(self, inner: "Modulus") -> "Modulus":
        """x -> self(inner(x))."""
        if self.is_linear and inner.is_linear and inner.slope > 0:
            return Modulus.linear(self.slope * inner.slope,
                                  min(inner.cap, self.cap / inner.slope))
        return Modulus(lambda x: self.fn(inner.fn(x)), "composed",
                       params={"outer": self, "inner": inner})

    def __add__(self, other: "Modulus") -> "Modulus":
        if self.is_linear and other.is_linear and self.cap == other.cap:
            return Modulus.linear(self.slope + other.slope, self.cap)
        return Modulus(lambda x: self.fn(x) + other.fn(x), "sum",
                       params={"terms": (self, other)})


def beta_I_modulus(mac: Mac) -> Modulus:
    """Continuity modulus of q -> I*(q) w.r.t. the l1 distance on sender 2's simplex."""
    if mac.dout < 2:
        raise DomainError("beta_I needs dout >= 2")
    hmax = h_n_max(mac)
    c = 0.5 * math.log(mac.dout - 1) + hmax

    def beta(x: float) -> float:
        return c * x + modified_binary_entropy(x / 2)

    return Modulus(beta, "mac_beta_I", params={"dout": mac.dout, "hmax": hmax})
