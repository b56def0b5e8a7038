"""Pseudo-binomial family: binomial-shaped weights with a real size parameter.

P(Z = m) = C^{-1} * binom(alpha, m) * p^m * q^(alpha - m),  m = 0..floor(alpha),
where C renormalizes the truncated weights.  Integer alpha gives the ordinary
binomial with C = 1.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

from .exact import Pmf
from .model import MomentPair


def genbinom(alpha: float, m: int) -> float:
    """alpha (alpha-1) ... (alpha-m+1) / m!  for 0 <= m <= floor(alpha)."""
    if m < 0 or m > math.floor(alpha):
        raise ValueError(f"m = {m} outside 0..floor(alpha) = {math.floor(alpha)}")
    out = 1.0
    for j in range(m):
        out *= (alpha - j) / (j + 1)
    return out


def _log_weight(alpha: float, m: int, log_p: float, log_q: float) -> float:
    log_coef = math.lgamma(alpha + 1) - math.lgamma(m + 1) - math.lgamma(alpha - m + 1)
    return log_coef + m * log_p + (alpha - m) * log_q


@dataclass(frozen=True)
class PseudoBinomial:
    alpha: float
    p_check: float

    def __post_init__(self):
        if not self.alpha > 0:
            raise ValueError(f"alpha must be positive, got {self.alpha!r}")
        if not 0 < self.p_check < 1:
            raise ValueError(f"p_check must lie in (0, 1), got {self.p_check!r}")

    @property
    def q_check(self) -> float:
        return 1.0 - self.p_check

    @property
    def support_max(self) -> int:
        return math.floor(self.alpha)

    def _log_weights(self) -> list:
        lp, lq = math.log(self.p_check), math.log1p(-self.p_check)
        return [_log_weight(self.alpha, m, lp, lq) for m in range(self.support_max + 1)]

    @property
    def normalizer(self) -> float:
        """C = sum of the unnormalized weights."""
        logs = self._log_weights()
        top = max(logs)
        return math.exp(top) * math.fsum(math.exp(x - top) for x in logs)


def pb_pmf(pb: PseudoBinomial) -> Pmf:
    logs = pb._log_weights()
    top = max(logs)
    w = [math.exp(x - top) for x in logs]
    total = math.fsum(w)
    return Pmf(tuple(x / total for x in w))


def pb_moments(pb: PseudoBinomial) -> MomentPair:
    """Mean and variance of the normalized PMF (not alpha*p and alpha*p*q)."""
    pmf = pb_pmf(pb)
    return MomentPair(pmf.mean(), pmf.variance())


def delta_g_bound(pb: PseudoBinomial) -> float:
    """Sup-norm bound 2 / (floor(alpha) p q) on the first difference of the
    Stein solution for indicator test functions."""
    if pb.support_max < 1:
        raise ValueError("floor(alpha) = 0: the Stein solution bound is undefined")
    return 2.0 / (pb.support_max * pb.p_check * pb.q_check)
