"""The (k1, k2)-runs model: trial specification, window probabilities and
closed-form moments of the linear count B and the circular count M.

A window starting at trial ``l`` "fires" when trials ``l .. l+k1-1`` are all
failures and trials ``l+k1 .. l+k1+k2-1`` are all successes.  B counts firing
windows that fit inside the ``n`` trials; M counts all ``n`` windows with the
trial indices taken modulo ``n``.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from fractions import Fraction
from numbers import Real
from typing import Sequence, Union

from ._numerics import accurate_sum, to_exact

Prob = Union[float, Fraction]


@dataclass(frozen=True)
class RunsSpec:
    """Pattern lengths, trial count and success probabilities.

    ``probs`` is either a single probability (identical trials) or a sequence
    of ``n`` per-trial probabilities.  Probabilities may be floats or
    :class:`fractions.Fraction` (the latter enables exact arithmetic
    downstream).
    """

    k1: int
    k2: int
    n: int
    probs: Union[Prob, Sequence[Prob]]

    def __post_init__(self):
        for name in ("k1", "k2", "n"):
            v = getattr(self, name)
            if isinstance(v, bool) or not isinstance(v, int):
                raise TypeError(f"{name} must be an integer, got {v!r}")
        if self.k1 < 1 or self.k2 < 1:
            raise ValueError("k1 and k2 must both be >= 1")
        if self.n < 1:
            raise ValueError("n must be >= 1")
        if isinstance(self.probs, (Real, Fraction)):
            ps = (self.probs,)
        else:
            ps = tuple(self.probs)
            if len(ps) != self.n:
                raise ValueError(f"expected {self.n} probabilities, got {len(ps)}")
            object.__setattr__(self, "probs", ps)
        for p in ps:
            if not (0 <= p <= 1) or (isinstance(p, float) and math.isnan(p)):
                raise ValueError(f"probability {p!r} outside [0, 1]")

    @property
    def k(self) -> int:
        return self.k1 + self.k2

    @property
    def identical(self) -> bool:
        if not isinstance(self.probs, tuple):
            return True
        return all(p == self.probs[0] for p in self.probs)

    @property
    def p(self) -> Prob:
        """Common success probability; only defined for identical trials."""
        if not self.identical:
            raise ValueError("spec has non-identical trial probabilities")
        return self.probs[0] if isinstance(self.probs, tuple) else self.probs

    @property
    def degenerate(self) -> bool:
        """True when some trial probability is exactly 0 or 1."""
        return any(p in (0, 1) for p in self.prob_list())

    @property
    def n_windows(self) -> int:
        return max(self.n - self.k + 1, 0)

    def prob_list(self) -> list:
        if isinstance(self.probs, tuple):
            return list(self.probs)
        return [self.probs] * self.n

    def prob(self, i: int) -> Prob:
        """Probability of trial ``i`` (1-based, taken modulo n)."""
        if isinstance(self.probs, tuple):
            return self.probs[(i - 1) % self.n]
        return self.probs

    def exact(self) -> "RunsSpec":
        """The same spec with every probability converted to a Fraction."""
        if isinstance(self.probs, tuple):
            return RunsSpec(self.k1, self.k2, self.n, tuple(to_exact(p) for p in self.probs))
        return RunsSpec(self.k1, self.k2, self.n, to_exact(self.probs))

    def with_n(self, n: int) -> "RunsSpec":
        """Spec restricted to the first ``n`` trials (identical specs only grow)."""
        if isinstance(self.probs, tuple):
            if n > self.n:
                raise ValueError("cannot extend a per-trial spec")
            return RunsSpec(self.k1, self.k2, n, self.probs[:n])
        return RunsSpec(self.k1, self.k2, n, self.probs)


@dataclass(frozen=True)
class MomentPair:
    mean: float
    variance: float


def pattern_prob(k1: int, k2: int, p):
    """(1-p)^k1 p^k2, the firing probability of one window under identical trials."""
    return (1 - p) ** k1 * p ** k2


def window_prob(spec: RunsSpec, l: int, circular: bool = False):
    """Probability a(p_l) that window ``l`` (1-based) fires."""
    if circular:
        if not 1 <= l <= spec.n:
            raise IndexError(f"circular window index {l} outside 1..{spec.n}")
        if spec.n < spec.k:
            raise ValueError("circular windows need n >= k1 + k2")
    elif not 1 <= l <= spec.n_windows:
        raise IndexError(f"window index {l} outside 1..{spec.n_windows}")
    if not isinstance(spec.probs, tuple):
        return pattern_prob(spec.k1, spec.k2, spec.probs)
    fail = math.prod(1 - spec.prob(l + i) for i in range(spec.k1))
    succ = math.prod(spec.prob(l + spec.k1 + i) for i in range(spec.k2))
    return fail * succ


def window_probs(spec: RunsSpec, circular: bool = False) -> list:
    count = spec.n if circular else spec.n_windows
    return [window_prob(spec, l, circular) for l in range(1, count + 1)]


def _identical_pair_count(n: int, k: int) -> int:
    # 2 * #{l < r <= n-k+1 : r - l <= k-1}, three branches as derived for B
    if n <= k:
        return 0
    if n <= 2 * k - 1:
        return (n - k) * (n - k + 1)
    return 2 * (n - 2 * k + 2) * (k - 1) + (k - 1) * (k - 2)


def linear_moments(spec: RunsSpec) -> MomentPair:
    """Mean and variance of B.

    Overlapping windows (gap at most k-1) can never fire together, so each
    such pair contributes ``-a_l a_r`` to the variance; windows further apart
    are independent.
    """
    k = spec.k
    if spec.n_windows == 0:
        return MomentPair(0 * spec.prob(1), 0 * spec.prob(1))
    if spec.identical:
        a = pattern_prob(spec.k1, spec.k2, spec.p)
        big_n = spec.n_windows
        mean = big_n * a
        var = big_n * a - big_n * a * a - _identical_pair_count(spec.n, k) * a * a
        return MomentPair(mean, var)
    a = window_probs(spec)
    mean = accurate_sum(a)
    cross = accurate_sum(
        a[l] * a[r] for l in range(len(a)) for r in range(l + 1, min(l + k, len(a)))
    )
    var = mean - accurate_sum(x * x for x in a) - 2 * cross
    return MomentPair(mean, var)


def circular_moments(spec: RunsSpec, pairs: str = "cyclic") -> MomentPair:
    """Mean and variance of M.

    ``pairs="linear"`` evaluates the variance with the non-wrapping pair
    condition ``l < r, r - l <= k-1``; ``pairs="cyclic"`` also subtracts the
    pairs that are close only through the wrap-around, which is the true
    variance of M when ``n >= 2k - 1``.
    """
    if pairs not in ("linear", "cyclic"):
        raise ValueError(f"unknown pair convention {pairs!r}")
    k, n = spec.k, spec.n
    a = window_probs(spec, circular=True)
    mean = accurate_sum(a)

    def close(l, r):
        d = r - l
        if pairs == "cyclic":
            d = min(d, n - d)
        return d <= k - 1

    cross = accurate_sum(
        a[l] * a[r] for l in range(n) for r in range(l + 1, n) if close(l, r)
    )
    var = mean - accurate_sum(x * x for x in a) - 2 * cross
    return MomentPair(mean, var)
