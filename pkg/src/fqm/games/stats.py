"""Seeding and interval helpers shared by the games."""
from __future__ import annotations

import math
from fractions import Fraction

import numpy as np
from scipy.stats import binomtest

Z95 = 1.959963984540054


def trial_seed(master_seed: int, trial: int) -> int:
    """Seed for one trial, a pure function of ``(master_seed, trial)``."""
    ss = np.random.SeedSequence(entropy=int(master_seed), spawn_key=(int(trial),))
    return int(ss.generate_state(1, np.uint64)[0])


def trial_rng(master_seed: int, trial: int) -> np.random.Generator:
    return np.random.default_rng(trial_seed(master_seed, trial))


def wilson(k: int, n: int) -> tuple[float, float]:
    """Wilson score 95% interval for ``k`` successes in ``n``; ``(0, 1)`` when ``n == 0``."""
    if n == 0:
        return 0.0, 1.0
    ci = binomtest(int(k), int(n)).proportion_ci(0.95, method="wilson")
    return float(ci.low), float(ci.high)


def newcombe(k1: int, n1: int, k2: int, n2: int) -> tuple[float, float]:
    """Newcombe hybrid-score 95% interval for ``p1 - p2``."""
    p1 = k1 / n1 if n1 else 0.0
    p2 = k2 / n2 if n2 else 0.0
    l1, u1 = wilson(k1, n1)
    l2, u2 = wilson(k2, n2)
    d = p1 - p2
    lo = d - math.sqrt((p1 - l1) ** 2 + (u2 - p2) ** 2)
    hi = d + math.sqrt((u1 - p1) ** 2 + (p2 - l2) ** 2)
    return max(-1.0, lo), min(1.0, hi)


def abs_interval(lo: float, hi: float) -> tuple[float, float]:
    """Interval for ``|d|`` given one for ``d``."""
    if lo <= 0.0 <= hi:
        return 0.0, max(-lo, hi)
    return min(abs(lo), abs(hi)), max(abs(lo), abs(hi))


def at_least(probs, k: int):
    """``P(sum of independent Bernoulli(p_i) >= k)``; exact when the inputs are Fractions."""
    probs = list(probs)
    exact = all(isinstance(p, (Fraction, int)) for p in probs)
    one = Fraction(1) if exact else 1.0
    zero = Fraction(0) if exact else 0.0
    dist = [one]
    for p in probs:
        p = Fraction(p) if exact else float(p)
        nxt = [zero] * (len(dist) + 1)
        for j, mass in enumerate(dist):
            nxt[j] += mass * (1 - p)
            nxt[j + 1] += mass * p
        dist = nxt
    return sum(dist[max(k, 0):], zero)


def mean_sigma(probs) -> tuple[float, float]:
    """Mean of per-trial success probabilities and the standard deviation of the mean of
    independent Bernoulli draws with those probabilities."""
    ps = np.asarray([float(p) for p in probs], dtype=float)
    if ps.size == 0:
        return 0.0, 0.0
    return float(ps.mean()), float(math.sqrt(np.sum(ps * (1 - ps))) / ps.size)
