"""Choosing pseudo-binomial parameters (alpha, p_check) for a runs spec."""

from __future__ import annotations

import enum
import math
from dataclasses import dataclass, field

from .model import RunsSpec, circular_moments, linear_moments, pattern_prob


class Convention(str, enum.Enum):
    ONE_FIX_ALPHA = "OneParamFixAlpha"
    ONE_FIX_P = "OneParamFixP"
    TWO_IID = "TwoParamIID"
    ONE_NON_IID = "OneParamNonIID"
    TWO_M = "TwoParamM"

    @property
    def one_parameter(self) -> bool:
        return self in (Convention.ONE_FIX_ALPHA, Convention.ONE_FIX_P, Convention.ONE_NON_IID)


class MatchingError(ValueError):
    pass


@dataclass(frozen=True)
class MatchResult:
    alpha: float
    p_check: float
    convention: Convention
    warnings: tuple = field(default=())

    @property
    def q_check(self) -> float:
        return 1.0 - self.p_check

    @property
    def floor_alpha(self) -> int:
        return math.floor(self.alpha)


def _finish(alpha, p_check, convention, warnings=()):
    alpha, p_check = float(alpha), float(p_check)
    if not 0 < p_check < 1:
        raise MatchingError(f"matched p_check = {p_check!r} outside (0, 1)")
    if not alpha > 0:
        raise MatchingError(f"matched alpha = {alpha!r} is not positive")
    warnings = list(warnings)
    if math.floor(alpha) < 1:
        warnings.append("floor(alpha) = 0; bounds are undefined for this matching")
    return MatchResult(alpha, p_check, convention, tuple(warnings))


ALPHA_PRESETS = {
    "n/k": lambda spec: spec.n / spec.k,
    "n/3k": lambda spec: spec.n / (3 * spec.k),
}


def preset_alpha(spec: RunsSpec, preset: str) -> float:
    try:
        return ALPHA_PRESETS[preset](spec)
    except KeyError:
        raise ValueError(f"unknown alpha preset {preset!r}; choose from {sorted(ALPHA_PRESETS)}")


def match_one_fix_alpha(spec: RunsSpec, alpha: float) -> MatchResult:
    """Keep ``alpha`` and set p_check = E(B) / alpha."""
    if math.floor(alpha) < 1:
        raise MatchingError("floor(alpha) must be at least 1")
    conv = Convention.ONE_FIX_ALPHA if spec.identical else Convention.ONE_NON_IID
    mean = float(linear_moments(spec).mean)
    return _finish(alpha, mean / alpha, conv)


def match_one_fix_p(spec: RunsSpec, p_check: float) -> MatchResult:
    """Keep ``p_check`` and set alpha = E(B) / p_check."""
    if not 0 < p_check < 1:
        raise MatchingError(f"p_check = {p_check!r} outside (0, 1)")
    conv = Convention.ONE_FIX_P if spec.identical else Convention.ONE_NON_IID
    mean = float(linear_moments(spec).mean)
    return _finish(mean / p_check, p_check, conv)


def match_two_iid(spec: RunsSpec) -> MatchResult:
    """Two-moment matching with the n >= 2k closed-form variance of B."""
    if not spec.identical:
        raise MatchingError("two-moment iid matching needs identical trials")
    n, k = spec.n, spec.k
    warnings = []
    if n < 2 * k:
        warnings.append("n < 2k: variance formula used outside its regime")
    a = pattern_prob(spec.k1, spec.k2, float(spec.p))
    denom = (2 * k - 1) * n - (k - 1) * (3 * k - 1)
    if n < k or denom <= 0 or a == 0:
        raise MatchingError("two-moment iid matching needs n >= k1 + k2 and a(p) > 0")
    p_check = denom * a / (n - k + 1)
    alpha = (n - k + 1) ** 2 / denom
    return _finish(alpha, p_check, Convention.TWO_IID, warnings)


def match_two_M(spec: RunsSpec, pairs: str = "cyclic") -> MatchResult:
    """Match alpha p = E(M) and alpha p q = Var(M) for the circular count."""
    mom = circular_moments(spec, pairs)
    mean, var = float(mom.mean), float(mom.variance)
    if mean <= 0 or not 0 < var < mean:
        raise MatchingError(f"degenerate moments of M: mean={mean!r}, var={var!r}")
    q_check = var / mean
    p_check = 1.0 - q_check
    return _finish(mean / p_check, p_check, Convention.TWO_M, [f"pairs={pairs}"])
