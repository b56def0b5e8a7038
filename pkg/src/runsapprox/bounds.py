"""Closed-form total-variation error bounds.

Each function returns a :class:`BoundReport`.  Hypotheses of the underlying
result are evaluated into ``flags``; a violated hypothesis never stops the
computation (the published tables contain such cells), it only flips a flag.
Values above 1 are reported as computed.
"""

from __future__ import annotations

import json
import math
from dataclasses import dataclass, field

from ._numerics import accurate_sum
from .exact import p_tilde
from .matching import Convention, MatchResult, match_two_iid
from .model import RunsSpec, pattern_prob, window_probs

SQRT_2_OVER_PI = math.sqrt(2 / math.pi)


@dataclass(frozen=True)
class BoundReport:
    name: str
    value: float
    flags: dict = field(default_factory=dict)
    notes: tuple = ()

    @property
    def preconditions_met(self) -> bool:
        return all(self.flags.values())

    def to_dict(self) -> dict:
        return {"name": self.name, "value": self.value, "flags": dict(self.flags),
                "preconditions_met": self.preconditions_met, "notes": list(self.notes)}

    def to_json(self) -> str:
        return json.dumps(self.to_dict())

    @classmethod
    def from_dict(cls, d: dict) -> "BoundReport":
        return cls(d["name"], d["value"], dict(d.get("flags", {})), tuple(d.get("notes", ())))


def _identical_a(spec: RunsSpec) -> float:
    if not spec.identical:
        raise ValueError("this bound is stated for identical trials")
    return pattern_prob(spec.k1, spec.k2, float(spec.p))


def k_star(k: int) -> float:
    """(k/(k-1))^(k-1)."""
    return (k / (k - 1)) ** (k - 1)


def _match_flags(match: MatchResult, one_param: bool | None = None) -> dict:
    flags = {"floor_alpha_ge_1": match.floor_alpha >= 1}
    if one_param is True:
        flags["one_parameter_matching"] = match.convention.one_parameter
    return flags


def _denominator(match: MatchResult) -> float:
    return match.floor_alpha * match.p_check * match.q_check


def _safe_div(num, den):
    return num / den if den != 0 else math.inf


def bound_thm21(spec: RunsSpec, match: MatchResult) -> BoundReport:
    """One-parameter bound from the perturbed Stein operator (identical trials)."""
    a = _identical_a(spec)
    n, k = spec.n, spec.k
    ks = k_star(k)
    pt = p_tilde(k, a)
    pc = match.p_check
    first = (n * (2 * ks - 1) + k - 1) * _safe_div(abs(pt - pc), 1 - 2 * pt)
    second = (n * (k * (ks - 2) + 1) - k * (k - 1) * ks + 3 * k * k - 4 * k + 1) * a
    value = _safe_div(a, _denominator(match)) * (first + second)
    flags = {"n_ge_2k": n >= 2 * k, "k_ge_2": k >= 2, "p_tilde_lt_half": pt < 0.5}
    flags.update(_match_flags(match, one_param=True))
    notes = [] if pt < 0.5 else ["p_tilde >= 1/2: value is not a valid bound (may be negative)"]
    return BoundReport("thm21", value, flags, tuple(notes))


def prop24_M(spec: RunsSpec) -> float:
    """The constant 72 (1 - (2k-1) a) / a; M(n) has this over n as first term."""
    a = _identical_a(spec)
    return 72 * (1 - (2 * spec.k - 1) * a) / a if a > 0 else math.inf


def shift_bound_value(n_eff: float, a: float, k: int) -> float:
    if n_eff <= 0 or a == 0:
        return math.inf
    return (72 * (1 - (2 * k - 1) * a) / (n_eff * a)
            + SQRT_2_OVER_PI * (0.25 + n_eff * a * (1 - a)) ** -0.5)


def bound_prop24(spec: RunsSpec) -> BoundReport:
    """min{1, M(n)} bound on d_TV(B, B+1)."""
    a = _identical_a(spec)
    value = min(1.0, shift_bound_value(spec.n, a, spec.k))
    return BoundReport("prop24", value, {"na_ge_8": spec.n * a >= 8})


def bound_thm22(spec: RunsSpec) -> BoundReport:
    """Two-parameter bound (two-moment iid matching) with the O(n^-1/2) factor."""
    a = _identical_a(spec)
    n, k = spec.n, spec.k
    match = match_two_iid(spec)
    ks = k_star(k)
    pt = p_tilde(k, a)
    pc = match.p_check
    diff = abs(pt - pc)
    part1 = diff * (k * ks * (n * (2 * ks - 1) + k - 1) / (1 - 2 * pt)
                    + (n * (k * (ks - 2) + 1) - k * (k - 1) * ks + 3 * k * k - 4 * k + 1))
    part2 = (n * ((2 * k - 1) * k * ks - 4.5 * k * (k - 1) - 1)
             - k * ks * (3 * k - 1) * (k - 1)
             + (17 * k ** 3 - 30 * k ** 2 + 15 * k - 2) / 2) * a
    m_const = prop24_M(spec)
    n_eff = n - 3 * k + 3
    if n_eff > 0:
        clamp = min(1.0, m_const / n_eff + SQRT_2_OVER_PI * (0.25 + n_eff * a * (1 - a)) ** -0.5)
    else:
        clamp = 1.0
    value = 2 * a * a / _denominator(match) * (part1 + part2) * clamp
    flags = {"n_ge_3k": n >= 3 * k, "k_ge_2": k >= 2, "na_ge_8": n * a >= 8,
             "p_tilde_lt_half": pt < 0.5}
    flags.update(_match_flags(match))
    notes = ["M = 72(1-(2k-1)a)/a", f"clamp={clamp!r}"]
    if pt >= 0.5:
        notes.append("p_tilde >= 1/2: value is not a valid bound (may be negative)")
    return BoundReport("thm22", value, flags, tuple(notes))


def _cyclic(values, i):
    return values[(i - 1) % len(values)]


def bound_thm31(spec: RunsSpec, match: MatchResult, edges: str = "full") -> BoundReport:
    """One-parameter coupling bound for independent, non-identical trials.

    ``edges="full"`` sums all 2(k1+k2)-1 neighbours of every window, reading
    window probabilities beyond the last window cyclically; this is the form
    that reduces to the identical-trials corollary.  ``edges="truncated"``
    keeps only neighbours that are genuine windows of B.
    """
    n, k = spec.n, spec.k
    big_n = spec.n_windows
    if edges == "full":
        if n < k:
            raise ValueError("full-edge evaluation needs n >= k1 + k2")
        ring = [float(x) for x in window_probs(spec, circular=True)]

        def a_at(u):
            return _cyclic(ring, u)
    elif edges == "truncated":
        lin = [float(x) for x in window_probs(spec)]

        def a_at(u):
            return lin[u - 1] if 1 <= u <= big_n else 0.0
    else:
        raise ValueError(f"unknown edge convention {edges!r}")
    pc = match.p_check
    terms = []
    for l in range(1, big_n + 1):
        near = accurate_sum(a_at(u) for u in range(l - k + 1, l + k))
        terms.append(a_at(l) * (near + pc))
    value = _safe_div(accurate_sum(terms), _denominator(match))
    flags = {"n_ge_2k": n >= 2 * k}
    flags.update(_match_flags(match, one_param=True))
    return BoundReport("thm31", value, flags, (f"edges={edges}",))


def v_sequence(spec: RunsSpec, first: int = 1) -> list:
    """Descending values of
    a(p_l) * (p_{l-2}^2 (1 - p_{l-1}) p_l + p_{l+1} p_{l-1}^2),  first <= l <= n,
    with trial indices read cyclically.  ``first=1`` gives n values (the count
    used by the identical-trials corollaries), ``first=2`` the n-1 values of the
    printed index range.
    """
    p = [float(x) for x in spec.prob_list()]
    n = spec.n
    ring = [float(x) for x in window_probs(spec, circular=True)]

    def pr(i):
        return p[(i - 1) % n]

    vals = [
        ring[l - 1] * (pr(l - 2) ** 2 * (1 - pr(l - 1)) * pr(l) + pr(l + 1) * pr(l - 1) ** 2)
        for l in range(first, n + 1)
    ]
    return sorted(vals, reverse=True)


def _tail_sum(v: list, start: int) -> float:
    # V is 1-based: sum V_start .. V_len
    return accurate_sum(v[start - 1:]) if start >= 1 else accurate_sum(v)


def psi(spec: RunsSpec, first: int = 1) -> float:
    """2 ^ 4.6 / sqrt(V_{4k-1} + ... + V_n)."""
    if spec.n < 4 * spec.k:
        raise ValueError("psi needs n >= 4(k1 + k2)")
    tail = _tail_sum(v_sequence(spec, first), 4 * spec.k - 1)
    return 2.0 if tail <= 0 else min(2.0, 4.6 / math.sqrt(tail))


def bound_thm32(spec: RunsSpec, match: MatchResult, tier: int = 1, first: int = 1,
                m_rule: str = "printed") -> BoundReport:
    """Two-parameter bound for the circular count M; ``tier`` picks one of the
    three chained displays (1 is the sharpest).

    Tier 3 replaces every nearby a(p_u) by one envelope.  ``m_rule="printed"``
    uses a(m_l) with m_l the largest nearby p; because a(.) is not monotone this
    can undercut tier 2, so the flag ``envelope_dominates`` records whether
    a(m_l) >= a(p_u) held for all nearby windows.  ``m_rule="window_max"`` uses
    max a(p_u) directly and always satisfies tier2 <= tier3.
    """
    if m_rule not in ("printed", "window_max"):
        raise ValueError(f"unknown m_rule {m_rule!r}")
    n, k = spec.n, spec.k
    if n < 4 * k:
        raise ValueError("this bound needs n >= 4(k1 + k2)")
    ring = [float(x) for x in window_probs(spec, circular=True)]
    ps = psi(spec, first)
    pc = match.p_check

    def a(u):
        return _cyclic(ring, u)

    terms = []
    envelope_ok = True
    for l in range(1, n + 1):
        near = accurate_sum(a(u) for u in range(l - k + 1, l + k))
        wide = accurate_sum(a(v) for v in range(l - 2 * k + 2, l + 2 * k - 1))
        if tier == 1:
            t1 = accurate_sum(a(u) * a(v) for u in range(l - k + 1, l + k)
                              for v in range(l - 2 * k + 2, u - k + 1))
            t2 = accurate_sum(a(u) * a(v) for u in range(l - k + 1, l + 1)
                              for v in range(l + k, l + 2 * k - 1))
            t3 = accurate_sum(a(u) * a(v) for u in range(l + 1, l + k)
                              for v in range(u + k, u + 2 * k - 1))
            inner = t1 + t2 + t3 + near * wide + pc * near
            terms.append(a(l) * inner)
        elif tier == 2:
            terms.append(a(l) * (2 * near * wide + pc * near))
        elif tier == 3:
            span = range(l - 2 * k + 2, l + 2 * k - 1)
            a_max = max(a(u) for u in span)
            if m_rule == "printed":
                m_l = max(float(spec.prob(s)) for s in span)
                am = pattern_prob(spec.k1, spec.k2, m_l)
                envelope_ok &= am >= a_max
            else:
                am = a_max
            terms.append(a(l) * am * (2 * (4 * k - 3) * am + pc))
        else:
            raise ValueError("tier must be 1, 2 or 3")
    scale = (2 * k - 1) if tier == 3 else 1
    value = _safe_div(scale * ps * accurate_sum(terms), _denominator(match))
    flags = {"n_ge_4k": n >= 4 * k,
             "two_moment_M_matching": match.convention == Convention.TWO_M}
    flags.update(_match_flags(match))
    notes = [f"psi={ps!r}"]
    if tier == 3:
        notes.append(f"m_rule={m_rule}")
        if m_rule == "printed":
            flags["envelope_dominates"] = envelope_ok
    return BoundReport(f"thm32_tier{tier}", value, flags, tuple(notes))


def bound_thm33(spec: RunsSpec, first: int = 1) -> BoundReport:
    """Bound on d_TV(B, M) from the last k-1 wrapped windows."""
    n, k = spec.n, spec.k
    if n < k:
        raise ValueError("needs n >= k1 + k2")
    ring = [float(x) for x in window_probs(spec, circular=True)]
    edge = accurate_sum(ring[l - 1] for l in range(n - k + 2, n + 1))
    tail = _tail_sum(v_sequence(spec, first), k + 2)
    factor = 1.0 if tail <= 0 else min(1.0, 2.3 / math.sqrt(tail))
    return BoundReport("thm33", 2 * edge * factor, {"n_ge_k": n >= k}, (f"factor={factor!r}",))


def bound_cor41(spec: RunsSpec, match: MatchResult) -> BoundReport:
    a = _identical_a(spec)
    n, k = spec.n, spec.k
    value = _safe_div((n - k + 1) * a * ((2 * k - 1) * a + match.p_check), _denominator(match))
    flags = {"n_ge_2k": n >= 2 * k}
    flags.update(_match_flags(match, one_param=True))
    return BoundReport("cor41", value, flags)


def bound_cor42(spec: RunsSpec, match: MatchResult) -> BoundReport:
    """Triangle-inequality bound d_TV(B,M) + d_TV(M,Z), identical trials.

    Only an M-based two-moment matching satisfies the hypotheses; the
    published table evaluates the same expression with the two-moment iid
    matching, which is allowed here but leaves the matching flag false.
    """
    a = _identical_a(spec)
    p = float(spec.p)
    n, k = spec.n, spec.k
    w = a * (2 * p ** 3 - p ** 4)
    r1 = (n - k - 1) * w
    r2 = (n - 4 * k + 2) * w
    c1 = 1.0 if r1 <= 0 else min(1.0, 2.3 / math.sqrt(r1))
    c2 = 2.0 if r2 <= 0 else min(2.0, 4.6 / math.sqrt(r2))
    first = 2 * (k - 1) * a * c1
    second = _safe_div(n * a * a, _denominator(match)) * (2 * k - 1) * (2 * (4 * k - 3) * a + match.p_check) * c2
    flags = {"n_ge_4k": n >= 4 * k,
             "two_moment_M_matching": match.convention == Convention.TWO_M}
    flags.update(_match_flags(match))
    return BoundReport("cor42", first + second, flags,
                       (f"matching={match.convention.value}",))


def bound_poisson(spec: RunsSpec, variant: str = "table") -> BoundReport:
    """Poisson(lambda_n) bound, lambda_n = (n-k+1) a.

    ``table`` uses (2k-1) n - (k-1)(3k-1): since overlapping windows are
    mutually exclusive this is the Stein-Chen b1 term over a^2, and it
    reproduces the published Poisson columns.  ``printed`` uses the printed
    coefficient n k - n - 2k^2 + 4k - 1, which is smaller than b1 and fails
    against exact distances; its ``coefficient_dominates_b1`` flag is false
    and the value is kept only to document the discrepancy.
    """
    a = _identical_a(spec)
    n, k = spec.n, spec.k
    lam = (n - k + 1) * a
    table_coef = (2 * k - 1) * n - (k - 1) * (3 * k - 1)
    if variant == "printed":
        coef = n * k - n - 2 * k * k + 4 * k - 1
    elif variant == "table":
        coef = table_coef
    else:
        raise ValueError(f"unknown Poisson variant {variant!r}")
    factor = -math.expm1(-lam) / lam if lam > 0 else 1.0
    # the closed-form pair count needs at least k - 1 windows
    flags = {"n_ge_2k_minus_1": n >= 2 * k - 1, "coefficient_dominates_b1": coef >= table_coef}
    return BoundReport(f"poisson_{variant}", factor * coef * a * a, flags, (f"lambda={lam!r}",))


def bound_barbour(spec: RunsSpec) -> BoundReport:
    """(2k-1) a(p), Poisson((n-k+1) a) approximation."""
    a = _identical_a(spec)
    return BoundReport("barbour", (2 * spec.k - 1) * a, {"n_ge_k": spec.n >= spec.k})


def bound_gs_1k(spec: RunsSpec) -> tuple:
    """Poisson bounds for the (1, k) pattern: the original (2k+1) q p^k and
    the refinement ((2k+1) n - 3k^2 - 2k)/(n - k) q p^k (k = k2 here)."""
    if spec.k1 != 1:
        raise ValueError("needs k1 = 1")
    p = float(_identical_p(spec))
    k, n = spec.k2, spec.n
    base = (1 - p) * p ** k
    gs = BoundReport("gs", (2 * k + 1) * base, {"n_ge_2k_plus_2": n >= 2 * (k + 1)})
    improved = BoundReport("gs_improved", ((2 * k + 1) * n - 3 * k * k - 2 * k) / (n - k) * base,
                           {"n_ge_2k_plus_2": n >= 2 * (k + 1)})
    return gs, improved


def _identical_p(spec):
    if not spec.identical:
        raise ValueError("this bound is stated for identical trials")
    return spec.p


def bound_runs11(spec: RunsSpec, variant: str = "one", match: MatchResult | None = None) -> BoundReport:
    """(1,1)-runs specializations with q p in place of a(p) and p_tilde = 4qp."""
    if (spec.k1, spec.k2) != (1, 1):
        raise ValueError("needs k1 = k2 = 1")
    p = float(_identical_p(spec))
    q = 1 - p
    n = spec.n
    qp = q * p
    pt = 4 * qp
    if variant == "one":
        if match is None:
            raise ValueError("the one-parameter form needs a matching")
        pc = match.p_check
        lead = _safe_div(qp, _denominator(match))
        value = lead * min((3 * n + 1) * _safe_div(abs(pt - pc), 1 - 2 * pt) + (n + 1) * qp,
                           (n - 1) * (3 * qp + pc))
        flags = {"n_ge_4": n >= 4, "p_tilde_lt_half": pt < 0.5}
        flags.update(_match_flags(match, one_param=True))
        return BoundReport("runs11_one", value, flags)
    if variant == "two":
        pc = (3 * n - 5) * qp / (n - 1)
        alpha = (n - 1) ** 2 / (3 * n - 5)
        den = math.floor(alpha) * pc * (1 - pc)
        m_const = 72 * (1 - 3 * qp) / qp
        if n > 3:
            clamp = min(1.0, m_const / (n - 3)
                        + SQRT_2_OVER_PI * (0.25 + (n - 3) * (1 - qp) * qp) ** -0.5)
        else:
            clamp = 1.0
        value = (2 * qp * qp / den
                 * (((12 * n + 4) / (1 - 2 * pt) + n + 1) * abs(pt - pc) + 2 * (n + 1) * qp)
                 * clamp)
        flags = {"n_ge_6": n >= 6, "na_ge_8": n * qp >= 8, "p_tilde_lt_half": pt < 0.5}
        return BoundReport("runs11_two", value, flags)
    raise ValueError(f"unknown variant {variant!r}")
