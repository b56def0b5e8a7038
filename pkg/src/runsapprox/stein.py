"""Stein operators as executable functionals and their zero-mean identities."""

from __future__ import annotations

import numpy as np

from ._numerics import accurate_sum
from .exact import enumerate_counts, pmf_dp
from .model import RunsSpec, pattern_prob
from .pseudobinomial import PseudoBinomial, pb_pmf
from .exact import p_tilde

A1_MAX_N = 16


class TestFunction:
    """Values g(0), g(1), ..., g(m_max); g vanishes beyond m_max and g(0) = 0."""

    __test__ = False  # not a pytest class

    def __init__(self, values):
        values = np.asarray(values, dtype=float)
        if values.ndim != 1 or len(values) == 0:
            raise ValueError("need a non-empty 1-d array of values")
        if values[0] != 0:
            raise ValueError("test functions must satisfy g(0) = 0")
        self.values = values
        self.values.setflags(write=False)

    def __call__(self, m: int) -> float:
        if 0 <= m < len(self.values):
            return float(self.values[m])
        return 0.0

    def __add__(self, other):
        size = max(len(self.values), len(other.values))
        return TestFunction(_pad(self.values, size) + _pad(other.values, size))

    def __mul__(self, c: float):
        return TestFunction(self.values * c)

    __rmul__ = __mul__

    @classmethod
    def random(cls, support_max: int, rng: np.random.Generator) -> "TestFunction":
        """Uniform[-1, 1] values on 1..support_max, g(0) = 0."""
        v = rng.uniform(-1.0, 1.0, size=support_max + 1)
        v[0] = 0.0
        return cls(v)


def _pad(v, size):
    out = np.zeros(size)
    out[: len(v)] = v
    return out


def apply_A0(pb: PseudoBinomial, g: TestFunction, m: int) -> float:
    """(alpha - m) p g(m+1) - m q g(m) on the support 0..floor(alpha)."""
    if not 0 <= m <= pb.support_max:
        raise ValueError(f"m = {m} outside the support 0..{pb.support_max}")
    return (pb.alpha - m) * pb.p_check * g(m + 1) - m * pb.q_check * g(m)


def stein_identity_A0(pb: PseudoBinomial, g: TestFunction) -> float:
    """E[A_0 g(Z)]; zero for g vanishing outside the support of Z."""
    pmf = pb_pmf(pb)
    return accurate_sum(apply_A0(pb, g, m) * pmf[m] for m in range(pb.support_max + 1))


def _joint_prefix_laws(spec: RunsSpec, prefixes):
    """Joint law of (B^n, B^{n'}) for each prefix length n', by enumeration."""
    k = spec.k
    top = spec.n // k
    laws = {n2: np.zeros((top + 1, top + 1)) for n2 in prefixes}
    for codes, weights, counts in enumerate_counts(spec):
        for n2 in prefixes:
            windows = max(n2 - k + 1, 0)
            sub = np.zeros(codes.shape, dtype=np.int64)
            pattern = ((1 << spec.k2) - 1) << spec.k1
            mask = (1 << k) - 1
            for s in range(windows):
                sub += ((codes >> s) & mask) == pattern
            flat = np.bincount(counts * (top + 1) + sub, weights=weights,
                               minlength=(top + 1) ** 2)
            laws[n2] += flat.reshape(top + 1, top + 1)
    return laws


def apply_A1(spec: RunsSpec, g: TestFunction, m: int, laws=None) -> float:
    """Runs operator at ``m``; the conditional expectations
    E[g(B^{n-k+u+1} + 1) | B^n = m] come from the enumerated joint law."""
    n, k = spec.n, spec.k
    a = pattern_prob(spec.k1, spec.k2, float(spec.p))
    pt = p_tilde(k, a)
    prefixes = [n - k + u + 1 for u in range(k - 1)]
    if laws is None:
        laws = _joint_prefix_laws(spec, prefixes)
    head = (n / k - m) * pt * g(m + 1) - (1 - pt) * m * g(m)
    tail = []
    for u, n2 in enumerate(prefixes):
        row = laws[n2][m]
        pm = row.sum()
        cond = 0.0 if pm == 0 else accurate_sum(row[j] * g(j + 1) for j in range(len(row))) / pm
        tail.append((n + u + 1) / (k - 1) * (k / (k - 1)) ** u * cond)
    return head - a * accurate_sum(tail)


def stein_identity_A1(spec: RunsSpec, g: TestFunction) -> float:
    """E[A_1 g(B^n)] with the conditional terms from full enumeration."""
    if not spec.identical:
        raise ValueError("the runs operator is for identical trials")
    if spec.n > A1_MAX_N:
        raise ValueError(f"n = {spec.n} too large for enumeration (limit {A1_MAX_N})")
    if spec.n < spec.k:
        raise ValueError("need n >= k1 + k2")
    n, k = spec.n, spec.k
    laws = _joint_prefix_laws(spec, [n - k + u + 1 for u in range(k - 1)])
    law_b = pmf_dp(spec)
    return accurate_sum(
        law_b[m] * apply_A1(spec, g, m, laws) for m in range(n // k + 1) if law_b[m] > 0
    )
