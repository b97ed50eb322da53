"""Regeneration structure of the workload chain.

The chain regenerates on a two-part event: the workload sits at or below
a level w0 at the start of an m0-step window, and the window's arrival
gap exceeds w0, which flushes every job that was present.  Parameters
(m0, w0) are chosen so that both P(s <= w0) and P(T_m0 > w0) are at
least one half; the post-regeneration law

    phi = law of X_m0 started empty, conditioned on T_m0 > w0

is sampled by rejection.  Renewal quantities estimated from phi-started
replications separate recurrence regimes: a summable renewal sequence
means the chain eventually stops regenerating (transience), a positive
Cesaro average means regenerations keep a positive frequency.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from typing import Optional

import numpy as np

from .dists import Deterministic
from .engine import ModelSpec, PathSample
from .streams import Stream, run_chunked

__all__ = [
    "RegenParams",
    "RegenTrace",
    "RenewalSummary",
    "find_params",
    "phi_sample",
    "detect",
    "renewal_tests",
]

_PARAM_SEED = 715517  # find_params draws from a fixed stream: params are
                      # model properties, not experiment randomness


@dataclass(frozen=True)
class RegenParams:
    m0: int
    w0: float
    p_service: float
    p_gap: float


@dataclass
class RegenTrace:
    taus: np.ndarray
    r: np.ndarray
    u_hat: Optional[np.ndarray] = None


@dataclass
class RenewalSummary:
    sum_u: float
    cesaro: float
    cycle_mean: float
    u_hat: np.ndarray
    frac_no_regen: float
    reps: int
    horizon: int
    m0: int


def find_params(m: ModelSpec, *, draws: int = 100_000) -> RegenParams:
    """Smallest w0 with P(s <= w0) >= 1/2 (the lower median), then the
    smallest m0 with P(T_m0 > w0) >= 1/2.

    m0 is exact for deterministic arrivals; otherwise it comes from a
    fixed-seed Monte Carlo estimate with a three-standard-error margin,
    so the inequality holds with slack rather than borderline.
    """
    w0 = float(m.service.quantile(0.5))
    p_service = float(m.service.cdf(w0))
    if 0.5 - 1e-9 < p_service < 0.5:
        p_service = 0.5  # cdf(quantile(1/2)) >= 1/2 exactly; rounding noise only
    if isinstance(m.interarrival, Deterministic):
        r = m.interarrival.value
        m0 = max(1, int(math.floor(w0 / r)) + 1)
        if m0 * r <= w0:  # floor landed on the boundary
            m0 += 1
        return RegenParams(m0=m0, w0=w0, p_service=p_service, p_gap=1.0)
    stream = Stream.from_seed(_PARAM_SEED)
    total = np.zeros(draws)
    for m0 in range(1, 100_000):
        total += m.interarrival.sample(stream, draws)
        p = float(np.mean(total > w0))
        se = math.sqrt(max(p * (1.0 - p), 1e-12) / draws)
        if p - 3.0 * se >= 0.5:
            return RegenParams(m0=m0, w0=w0, p_service=p_service, p_gap=p)
    raise RuntimeError("no window length reached the gap-probability target")


def _phi_batch(m: ModelSpec, params: RegenParams, count: int,
               stream: Stream) -> np.ndarray:
    """``count`` draws from the post-regeneration law by rejection:
    run m0 steps from empty, keep the terminal workload when the window's
    arrival gap clears w0."""
    out = np.empty(count)
    filled = 0
    guard = 0
    while filled < count:
        pending = count - filled
        t = m.interarrival.sample(stream, (pending, params.m0))
        s = m.service.sample(stream, (pending, params.m0))
        x = np.zeros(pending)
        for j in range(params.m0):
            x = np.maximum(x - t[:, j], s[:, j])
        accept = t.sum(axis=1) > params.w0
        k = int(accept.sum())
        out[filled:filled + k] = x[accept]
        filled += k
        guard += 1
        if guard > 10_000:  # pragma: no cover - acceptance prob >= 1/2
            raise RuntimeError("rejection sampler failed to accept")
    return out


def phi_sample(m: ModelSpec, params: RegenParams, stream: Stream) -> float:
    """One draw from the post-regeneration law."""
    return float(_phi_batch(m, params, 1, stream)[0])


def detect(path: PathSample, params: RegenParams) -> RegenTrace:
    """Scan a simulated path for regeneration times.

    Window k (steps (k-1)m0 .. k*m0) regenerates when the workload at
    the window start is at most w0 and the window's arrival gap exceeds
    w0; the k = 1 window conditions on X_0 itself.  A path shorter than
    one window yields an empty trace.
    """
    m0, w0 = params.m0, params.w0
    n = len(path.x) - 1
    k_max = n // m0
    if k_max < 1:
        empty = np.array([], dtype=np.int64)
        return RegenTrace(taus=empty, r=np.array([], dtype=bool))
    ends = np.arange(1, k_max + 1, dtype=np.int64) * m0
    starts = ends - m0
    r = (path.x[starts] <= w0) & ((path.arrivals[ends] - path.arrivals[starts]) > w0)
    return RegenTrace(taus=ends[r], r=r)


def _renewal_chunk(m: ModelSpec, params: RegenParams, horizon: int,
                   count: int, stream: Stream):
    m0, w0 = params.m0, params.w0
    k_max = horizon // m0
    x = _phi_batch(m, params, count, stream)
    r = np.zeros((count, k_max), dtype=bool)
    wins_per_block = max(1, 4096 // m0)
    k = 0
    while k < k_max:
        wins = min(wins_per_block, k_max - k)
        t = m.interarrival.sample(stream, (count, wins * m0))
        s = m.service.sample(stream, (count, wins * m0))
        for w in range(wins):
            lo = w * m0
            start_ok = x <= w0
            gap = t[:, lo:lo + m0].sum(axis=1)
            for j in range(lo, lo + m0):
                x = np.maximum(x - t[:, j], s[:, j])
            r[:, k + w] = start_ok & (gap > w0)
        k += wins
    return r


def renewal_tests(m: ModelSpec, params: RegenParams, reps: int, horizon: int,
                  stream: Stream, *, threads: int = 1) -> RenewalSummary:
    """Renewal quantities from phi-started replications.

    u_hat[i] estimates the probability that window i regenerates, with
    u_hat[0] = 1 by convention.  cycle_mean averages the first
    regeneration time over replications; it is flagged infinite when more
    than 10% of replications never regenerate within the horizon (a
    censored observation, not a proof of no return).
    """
    if reps < 1_000:
        raise ValueError("reps must be >= 1000")
    if horizon < params.m0:
        raise ValueError("horizon shorter than one regeneration window")
    parts = run_chunked(
        lambda st, start, count: _renewal_chunk(m, params, horizon, count, st),
        reps, stream, threads=threads,
    )
    r = np.concatenate(parts, axis=0)
    u_hat = np.concatenate([[1.0], r.mean(axis=0)])
    any_r = r.any(axis=1)
    frac_no = float(np.mean(~any_r))
    if frac_no > 0.10:
        cycle_mean = math.inf
    elif any_r.any():
        first = (np.argmax(r[any_r], axis=1) + 1) * params.m0
        cycle_mean = float(first.mean())
    else:
        cycle_mean = math.inf
    return RenewalSummary(
        sum_u=float(u_hat.sum()),
        cesaro=float(u_hat.mean()),
        cycle_mean=cycle_mean,
        u_hat=u_hat,
        frac_no_regen=frac_no,
        reps=reps,
        horizon=horizon,
        m0=params.m0,
    )
