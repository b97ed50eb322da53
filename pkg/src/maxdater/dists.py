"""Catalogue of positive service and inter-arrival laws.

Each law carries exact closed forms for the cdf, the upper tail (computed
directly, not as 1 - cdf, so extreme tails keep full precision), the
left-continuous generalized inverse cdf, the mean (``math.inf`` when the
first moment diverges), and the truncated mean E[min(Y, x)].  Sampling is
always quantile inversion of a strict (0, 1) uniform, which keeps every
sampler exact, reproducible, and monotone in the underlying uniform.

``truncated_mean_by_quadrature`` integrates the tail numerically and is
kept as an independent route against the closed forms.
"""

from __future__ import annotations

import math
from abc import ABC, abstractmethod
from dataclasses import dataclass
from typing import Optional

import numpy as np
from scipy import integrate

from .streams import Stream

__all__ = [
    "Distribution",
    "Exponential",
    "Deterministic",
    "Pareto",
    "TruncatedParetoOne",
    "Uniform",
    "DiscreteUniform",
    "Mixture",
    "TailClass",
    "QuadratureError",
    "truncated_mean_by_quadrature",
]


class QuadratureError(RuntimeError):
    """Adaptive quadrature failed to reach the requested tolerance."""


@dataclass(frozen=True)
class TailClass:
    """Coarse decay class of an upper tail, used for symbolic finiteness
    decisions.  kind is 'bounded', 'light' (faster than any power), or
    'regvar' with index ``alpha`` (tail ~ x**-alpha)."""

    kind: str
    alpha: Optional[float] = None


def _out(x):
    x = np.asarray(x)
    return float(x) if x.ndim == 0 else x


def _check_prob(p) -> np.ndarray:
    p = np.asarray(p, dtype=float)
    if np.any((p <= 0.0) | (p >= 1.0)):
        raise ValueError("quantile defined for 0 < p < 1")
    return p


@dataclass(frozen=True)
class Distribution(ABC):
    @abstractmethod
    def cdf(self, x):
        """P(Y <= x)."""

    @abstractmethod
    def tail(self, x):
        """P(Y > x), computed from its own closed form."""

    @abstractmethod
    def quantile(self, p):
        """inf{x : cdf(x) >= p} for p in (0, 1)."""

    @abstractmethod
    def mean(self) -> float:
        """E[Y]; math.inf when the first moment diverges."""

    @abstractmethod
    def truncated_mean(self, x):
        """E[min(Y, x)] = integral of the tail over [0, x]."""

    @abstractmethod
    def support(self) -> tuple[float, float]:
        """(essential infimum, essential supremum); sup may be math.inf."""

    @abstractmethod
    def tail_class(self) -> TailClass:
        ...

    def laplace(self, mu: float) -> float:
        """E[exp(-mu Y)] for mu > 0.  Closed form where available,
        otherwise adaptive quadrature in quantile space."""
        if mu <= 0:
            raise ValueError("laplace transform evaluated for mu > 0")
        val, err = integrate.quad(
            lambda p: math.exp(-mu * float(self.quantile(p))), 0.0, 1.0,
            epsabs=1e-13, epsrel=1e-11, limit=200,
        )
        if err > 1e-9 * max(abs(val), 1e-12):
            raise QuadratureError(f"laplace transform did not converge (err={err:g})")
        return val

    def sample(self, stream: Stream, size=None):
        return self.quantile(stream.uniform_open(size))

    def _breakpoints(self) -> tuple[float, ...]:
        """Atoms and kink locations of the tail, for piecewise quadrature."""
        return ()


@dataclass(frozen=True)
class Exponential(Distribution):
    rate: float

    def __post_init__(self):
        if not self.rate > 0:
            raise ValueError("rate must be > 0")

    def cdf(self, x):
        x = np.asarray(x, dtype=float)
        return _out(np.where(x <= 0, 0.0, -np.expm1(-self.rate * np.maximum(x, 0.0))))

    def tail(self, x):
        x = np.asarray(x, dtype=float)
        return _out(np.where(x <= 0, 1.0, np.exp(-self.rate * np.maximum(x, 0.0))))

    def quantile(self, p):
        p = _check_prob(p)
        return _out(-np.log1p(-p) / self.rate)

    def mean(self) -> float:
        return 1.0 / self.rate

    def truncated_mean(self, x):
        x = np.asarray(x, dtype=float)
        return _out(-np.expm1(-self.rate * np.maximum(x, 0.0)) / self.rate)

    def support(self):
        return (0.0, math.inf)

    def tail_class(self):
        return TailClass("light")

    def laplace(self, mu: float) -> float:
        if mu <= 0:
            raise ValueError("laplace transform evaluated for mu > 0")
        return self.rate / (self.rate + mu)


@dataclass(frozen=True)
class Deterministic(Distribution):
    value: float

    def __post_init__(self):
        if not self.value > 0:
            raise ValueError("value must be > 0")

    def cdf(self, x):
        x = np.asarray(x, dtype=float)
        return _out(np.where(x >= self.value, 1.0, 0.0))

    def tail(self, x):
        x = np.asarray(x, dtype=float)
        return _out(np.where(x >= self.value, 0.0, 1.0))

    def quantile(self, p):
        p = _check_prob(p)
        return _out(np.full_like(p, self.value))

    def mean(self) -> float:
        return self.value

    def truncated_mean(self, x):
        x = np.asarray(x, dtype=float)
        return _out(np.minimum(x, self.value))

    def support(self):
        return (self.value, self.value)

    def tail_class(self):
        return TailClass("bounded")

    def laplace(self, mu: float) -> float:
        if mu <= 0:
            raise ValueError("laplace transform evaluated for mu > 0")
        return math.exp(-mu * self.value)

    def _breakpoints(self):
        return (self.value,)


@dataclass(frozen=True)
class Pareto(Distribution):
    """Tail (x / scale)**-alpha for x >= scale, 1 below."""

    alpha: float
    scale: float

    def __post_init__(self):
        if not self.alpha > 0:
            raise ValueError("alpha must be > 0")
        if not self.scale > 0:
            raise ValueError("scale must be > 0")

    def cdf(self, x):
        x = np.asarray(x, dtype=float)
        z = np.maximum(x, self.scale) / self.scale
        return _out(np.where(x < self.scale, 0.0, 1.0 - z ** (-self.alpha)))

    def tail(self, x):
        x = np.asarray(x, dtype=float)
        z = np.maximum(x, self.scale) / self.scale
        return _out(np.where(x < self.scale, 1.0, z ** (-self.alpha)))

    def quantile(self, p):
        p = _check_prob(p)
        return _out(self.scale * (1.0 - p) ** (-1.0 / self.alpha))

    def mean(self) -> float:
        if self.alpha <= 1.0:
            return math.inf
        return self.alpha * self.scale / (self.alpha - 1.0)

    def truncated_mean(self, x):
        x = np.asarray(x, dtype=float)
        z = np.maximum(x, self.scale)
        if self.alpha == 1.0:
            above = self.scale * (1.0 + np.log(z / self.scale))
        else:
            above = self.scale + (self.scale ** self.alpha) * (
                z ** (1.0 - self.alpha) - self.scale ** (1.0 - self.alpha)
            ) / (1.0 - self.alpha)
        return _out(np.where(x <= self.scale, np.minimum(x, self.scale), above))

    def support(self):
        return (self.scale, math.inf)

    def tail_class(self):
        return TailClass("regvar", self.alpha)

    def _breakpoints(self):
        return (self.scale,)


@dataclass(frozen=True)
class TruncatedParetoOne(Distribution):
    """Exact reciprocal tail: P(Y > x) = min(1, d1 / x) for x >= x0, 1 below.

    Requires x0 >= d1 so the tail is a genuine probability on [x0, inf);
    there is an atom of mass 1 - d1/x0 at x0 whenever x0 > d1.
    """

    d1: float
    x0: float

    def __post_init__(self):
        if not self.d1 > 0:
            raise ValueError("d1 must be > 0")
        if not self.x0 > 0:
            raise ValueError("x0 must be > 0")
        if self.x0 < self.d1:
            raise ValueError("x0 must be >= d1")

    def cdf(self, x):
        x = np.asarray(x, dtype=float)
        z = np.maximum(x, self.x0)
        return _out(np.where(x < self.x0, 0.0, 1.0 - np.minimum(1.0, self.d1 / z)))

    def tail(self, x):
        x = np.asarray(x, dtype=float)
        z = np.maximum(x, self.x0)
        return _out(np.where(x < self.x0, 1.0, np.minimum(1.0, self.d1 / z)))

    def quantile(self, p):
        p = _check_prob(p)
        p_atom = 1.0 - self.d1 / self.x0  # cdf at the left endpoint
        return _out(np.where(p <= p_atom, self.x0, self.d1 / np.maximum(1.0 - p, 1e-300)))

    def mean(self) -> float:
        return math.inf

    def truncated_mean(self, x):
        x = np.asarray(x, dtype=float)
        z = np.maximum(x, self.x0)
        above = self.x0 + self.d1 * np.log(z / self.x0)
        return _out(np.where(x <= self.x0, np.minimum(x, self.x0), above))

    def support(self):
        return (self.x0, math.inf)

    def tail_class(self):
        return TailClass("regvar", 1.0)

    def _breakpoints(self):
        return (self.x0,)


@dataclass(frozen=True)
class Uniform(Distribution):
    lo: float
    hi: float

    def __post_init__(self):
        if self.lo < 0:
            raise ValueError("lo must be >= 0")
        if not self.hi > self.lo:
            raise ValueError("hi must be > lo")

    def cdf(self, x):
        x = np.asarray(x, dtype=float)
        return _out(np.clip((x - self.lo) / (self.hi - self.lo), 0.0, 1.0))

    def tail(self, x):
        x = np.asarray(x, dtype=float)
        inner = (self.hi - np.clip(x, self.lo, self.hi)) / (self.hi - self.lo)
        return _out(np.where(x <= self.lo, 1.0, np.where(x >= self.hi, 0.0, inner)))

    def quantile(self, p):
        p = _check_prob(p)
        return _out(self.lo + p * (self.hi - self.lo))

    def mean(self) -> float:
        return 0.5 * (self.lo + self.hi)

    def truncated_mean(self, x):
        x = np.asarray(x, dtype=float)
        xc = np.clip(x, self.lo, self.hi)
        mid = self.lo + (self.hi * (xc - self.lo) - 0.5 * (xc * xc - self.lo * self.lo)) / (
            self.hi - self.lo
        )
        return _out(np.where(x <= self.lo, np.minimum(x, self.lo),
                             np.where(x >= self.hi, self.mean(), mid)))

    def support(self):
        return (self.lo, self.hi)

    def tail_class(self):
        return TailClass("bounded")

    def laplace(self, mu: float) -> float:
        if mu <= 0:
            raise ValueError("laplace transform evaluated for mu > 0")
        return (math.exp(-mu * self.lo) - math.exp(-mu * self.hi)) / (mu * (self.hi - self.lo))

    def _breakpoints(self):
        return (self.lo, self.hi)


@dataclass(frozen=True)
class DiscreteUniform(Distribution):
    """Equal weight on a finite multiset of positive values."""

    values: tuple[float, ...]

    def __post_init__(self):
        if len(self.values) == 0:
            raise ValueError("values must be non-empty")
        if any(not v > 0 for v in self.values):
            raise ValueError("all values must be > 0")
        object.__setattr__(self, "values", tuple(sorted(float(v) for v in self.values)))

    def _arr(self):
        return np.asarray(self.values)

    def cdf(self, x):
        x = np.asarray(x, dtype=float)
        idx = np.searchsorted(self._arr(), x, side="right")
        return _out(idx / len(self.values))

    def tail(self, x):
        x = np.asarray(x, dtype=float)
        idx = np.searchsorted(self._arr(), x, side="right")
        return _out((len(self.values) - idx) / len(self.values))

    def quantile(self, p):
        p = _check_prob(p)
        n = len(self.values)
        cum = np.arange(1, n + 1) / n
        idx = np.searchsorted(cum, p, side="left")
        return _out(self._arr()[np.minimum(idx, n - 1)])

    def mean(self) -> float:
        return math.fsum(self.values) / len(self.values)

    def truncated_mean(self, x):
        x = np.asarray(x, dtype=float)
        v = self._arr()
        return _out(np.minimum.outer(x, v).mean(axis=-1) if x.ndim else np.minimum(x, v).mean())

    def support(self):
        return (self.values[0], self.values[-1])

    def tail_class(self):
        return TailClass("bounded")

    def laplace(self, mu: float) -> float:
        if mu <= 0:
            raise ValueError("laplace transform evaluated for mu > 0")
        return float(np.mean(np.exp(-mu * self._arr())))

    def _breakpoints(self):
        return self.values


@dataclass(frozen=True)
class Mixture(Distribution):
    """Finite mixture: components is a tuple of (weight, distribution)."""

    components: tuple[tuple[float, Distribution], ...]

    def __post_init__(self):
        if len(self.components) == 0:
            raise ValueError("mixture needs at least one component")
        total = math.fsum(w for w, _ in self.components)
        if any(not w > 0 for w, _ in self.components):
            raise ValueError("all mixture weights must be > 0")
        if abs(total - 1.0) > 1e-9:
            raise ValueError(f"mixture weights must sum to 1 (got {total!r})")

    def cdf(self, x):
        x = np.asarray(x, dtype=float)
        return _out(sum(w * np.asarray(d.cdf(x)) for w, d in self.components))

    def tail(self, x):
        x = np.asarray(x, dtype=float)
        return _out(sum(w * np.asarray(d.tail(x)) for w, d in self.components))

    def quantile(self, p):
        # Generalized inverse by bisection on the mixture cdf.  The upper
        # bracket max_i q_i(p) satisfies cdf >= p; 0 is always below.
        p = _check_prob(p)
        scalar = p.ndim == 0
        p = np.atleast_1d(p)
        hi = np.max([np.atleast_1d(d.quantile(p)) for _, d in self.components], axis=0)
        lo = np.zeros_like(hi)
        # bisect to float resolution; invariant: cdf(hi) >= p > cdf(lo)
        for _ in range(200):
            mid = 0.5 * (lo + hi)
            done = (mid <= lo) | (mid >= hi)
            if done.all():
                break
            ge = np.asarray(self.cdf(mid)) >= p
            hi = np.where(ge & ~done, mid, hi)
            lo = np.where(~ge & ~done, mid, lo)
        return float(hi[0]) if scalar else hi

    def mean(self) -> float:
        if any(math.isinf(d.mean()) for _, d in self.components):
            return math.inf
        return math.fsum(w * d.mean() for w, d in self.components)

    def truncated_mean(self, x):
        x = np.asarray(x, dtype=float)
        return _out(sum(w * np.asarray(d.truncated_mean(x)) for w, d in self.components))

    def support(self):
        los, his = zip(*(d.support() for _, d in self.components))
        return (min(los), max(his))

    def tail_class(self):
        classes = [d.tail_class() for _, d in self.components]
        reg = [c.alpha for c in classes if c.kind == "regvar"]
        if reg:
            return TailClass("regvar", min(reg))
        if any(c.kind == "light" for c in classes):
            return TailClass("light")
        return TailClass("bounded")

    def laplace(self, mu: float) -> float:
        if mu <= 0:
            raise ValueError("laplace transform evaluated for mu > 0")
        return math.fsum(w * d.laplace(mu) for w, d in self.components)

    def _breakpoints(self):
        pts: list[float] = []
        for _, d in self.components:
            pts.extend(d._breakpoints())
        return tuple(sorted(set(pts)))


def truncated_mean_by_quadrature(dist: Distribution, x: float, rel_tol: float = 1e-10) -> float:
    """E[min(Y, x)] as the integral of the tail over [0, x].

    Independent numeric route against the closed forms; raises
    QuadratureError when the adaptive scheme cannot certify ``rel_tol``.
    """
    if not x > 0:
        raise ValueError("truncation point must be > 0")
    pts = [b for b in dist._breakpoints() if 0.0 < b < x]
    val, err = integrate.quad(
        lambda u: float(dist.tail(u)), 0.0, float(x),
        points=pts or None, epsabs=1e-14, epsrel=rel_tol, limit=500,
    )
    if err > rel_tol * max(abs(val), 1e-12):
        raise QuadratureError(
            f"tail integral over [0, {x}] did not converge (err={err:g}, value={val:g})"
        )
    return val
