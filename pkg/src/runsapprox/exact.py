"""Exact law of the runs count.

Four independent routes to the distribution of B (recursion, alternating
closed form, Markov-chain dynamic program, exhaustive enumeration), the
probability generating function and its derivative, residuals of the PGF
recurrences, the circular count M, and the inter-occurrence waiting time.

Every PMF routine takes ``exact=True`` to return :class:`~fractions.Fraction`
masses; float probabilities are then converted through their exact binary
value, so pass Fractions (``RunsSpec(..., Fraction(1, 5))``) for decimal
exactness.
"""

from __future__ import annotations

import json
import math
from dataclasses import dataclass, field
from fractions import Fraction
from typing import Sequence

import numpy as np

from ._numerics import accurate_sum, to_exact
from .model import RunsSpec, pattern_prob

SUM_TOL = 1e-10
NEG_TOL = 1e-14
BRUTE_MAX_N = 24
DP_MAX_K = 22
CIRCULAR_DP_MAX_K = 14
CONDITION_LIMIT = 1e3


@dataclass(frozen=True)
class Pmf:
    """Finitely supported PMF on ``offset, offset+1, ...``.

    ``clamped`` records the total magnitude of small negative masses set to
    zero during construction (cancellation noise from alternating sums).
    """

    masses: tuple
    offset: int = 0
    clamped: float = 0.0

    def __post_init__(self):
        masses = tuple(self.masses)
        neg = [m for m in masses if m < 0]
        if neg:
            if min(neg) < -NEG_TOL:
                raise ValueError(f"negative mass {min(neg)!r} below clamp tolerance")
            object.__setattr__(self, "clamped", self.clamped + float(-sum(neg)))
            masses = tuple(0.0 if m < 0 else m for m in masses)
        object.__setattr__(self, "masses", masses)

    def __len__(self):
        return len(self.masses)

    def __getitem__(self, m: int):
        i = m - self.offset
        if 0 <= i < len(self.masses):
            return self.masses[i]
        return 0

    @property
    def support_max(self) -> int:
        return self.offset + len(self.masses) - 1

    @property
    def exact(self) -> bool:
        return any(isinstance(m, Fraction) for m in self.masses)

    def total(self):
        return accurate_sum(self.masses)

    def is_normalized(self, tol: float = SUM_TOL) -> bool:
        return abs(self.total() - 1) <= tol

    def mean(self):
        return accurate_sum((self.offset + i) * m for i, m in enumerate(self.masses))

    def variance(self):
        mu = self.mean()
        return accurate_sum((self.offset + i - mu) ** 2 * m for i, m in enumerate(self.masses))

    def shifted(self, d: int = 1) -> "Pmf":
        return Pmf(self.masses, self.offset + d, self.clamped)

    def to_array(self, length: int | None = None) -> np.ndarray:
        """Masses as a float array indexed from 0 (requires offset >= 0)."""
        if self.offset < 0:
            raise ValueError("negative offset")
        size = self.support_max + 1 if length is None else length
        out = np.zeros(size)
        for i, m in enumerate(self.masses):
            j = self.offset + i
            if j < size:
                out[j] = float(m)
        return out

    def as_float(self) -> "Pmf":
        return Pmf(tuple(float(m) for m in self.masses), self.offset, self.clamped)

    def rows(self):
        return [(self.offset + i, m) for i, m in enumerate(self.masses)]

    def to_csv(self, precision: int = 7) -> str:
        lines = ["m,probability"]
        lines += [f"{m},{float(v):.{precision}f}" for m, v in self.rows()]
        return "\n".join(lines) + "\n"

    def to_json(self) -> str:
        return json.dumps({
            "offset": self.offset,
            "masses": [str(m) if isinstance(m, Fraction) else m for m in self.masses],
            "clamped": self.clamped,
        })

    @classmethod
    def from_json(cls, text: str) -> "Pmf":
        d = json.loads(text)
        masses = tuple(Fraction(m) if isinstance(m, str) else m for m in d["masses"])
        return cls(masses, d.get("offset", 0), d.get("clamped", 0.0))


def _trim(masses: list) -> list:
    while len(masses) > 1 and masses[-1] == 0:
        masses.pop()
    return masses


def _require_identical(spec: RunsSpec):
    if not spec.identical:
        raise ValueError("this route needs identical trial probabilities")


def _window_a(spec: RunsSpec, exact: bool):
    p = to_exact(spec.p) if exact else float(spec.p)
    return pattern_prob(spec.k1, spec.k2, p)


def pmf_recursive(spec: RunsSpec, exact: bool = False) -> Pmf:
    """p_{m,n} = p_{m,n-1} + a [p_{m-1,n-k} - p_{m,n-k}], with p_{m,n} = delta_{m,0} for n < k."""
    _require_identical(spec)
    k, n = spec.k, spec.n
    a = _window_a(spec, exact)
    one, zero = (Fraction(1), Fraction(0)) if exact else (1.0, 0.0)
    top = n // k
    # rows[j] holds p_{., j}
    rows = []
    for j in range(n + 1):
        if j < k:
            rows.append([one] + [zero] * top)
            continue
        prev, back = rows[j - 1], rows[j - k]
        row = [zero] * (top + 1)
        for m in range(j // k + 1):
            lower = back[m - 1] if m >= 1 else zero
            row[m] = prev[m] + a * (lower - back[m])
        rows.append(row)
    return Pmf(tuple(rows[n][: top + 1]))


def _multinomial(n: int, k: int, m: int, l: int) -> int:
    """(n-(l+m)(k-1))! / ((n-(l+m)k)! l! m!) as an exact integer."""
    total = n - (l + m) * (k - 1)
    return math.comb(total, l + m) * math.comb(l + m, m)


def _closed_form_mass_exact(n: int, k: int, m: int, a: Fraction) -> Fraction:
    s = Fraction(0)
    for l in range((n - m * k) // k + 1):
        s += (-1) ** l * _multinomial(n, k, m, l) * a ** (l + m)
    return s


def pmf_closed_form(spec: RunsSpec, exact: bool = False) -> Pmf:
    """Alternating multinomial sum for each mass.

    Floating evaluation works on log magnitudes with explicit signs; when the
    condition estimate sum|terms| / |result| exceeds ``CONDITION_LIMIT`` the
    mass is recomputed with exact rationals (from the binary value of a(p)).
    """
    _require_identical(spec)
    k, n = spec.k, spec.n
    top = n // k
    if exact:
        a = _window_a(spec, True)
        return Pmf(tuple(_closed_form_mass_exact(n, k, m, a) for m in range(top + 1)))
    a = _window_a(spec, False)
    if a == 0:
        return Pmf((1.0,) + (0.0,) * top)
    log_a = math.log(a)
    masses = []
    for m in range(top + 1):
        logs, signs = [], []
        for l in range((n - m * k) // k + 1):
            # log of the exact integer coefficient is correctly rounded
            logs.append(math.log(_multinomial(n, k, m, l)) + (l + m) * log_a)
            signs.append(-1.0 if l % 2 else 1.0)
        shift = max(logs)
        scaled = [s * math.exp(x - shift) for s, x in zip(signs, logs)]
        value = math.fsum(scaled)
        magnitude = math.fsum(abs(x) for x in scaled)
        if value == 0 or magnitude / abs(value) > CONDITION_LIMIT:
            masses.append(float(_closed_form_mass_exact(n, k, m, Fraction(a))))
        else:
            masses.append(value * math.exp(shift))
    return Pmf(tuple(masses))


def _pattern_bits(k1: int, k2: int) -> int:
    # most recent outcome in bit 0; success = 1
    return (1 << k2) - 1


def _check_dp_size(k: int, limit: int):
    if k > limit:
        raise ValueError(f"k1 + k2 = {k} exceeds the state-space limit {limit}")


def _dp_float(probs, k1, k2, start_state=None, start_prob=1.0, tail_bits=()):
    """Forward pass of the windowed chain.

    ``probs`` lists success probabilities of the trials processed after the
    starting state; ``tail_bits`` are forced outcomes appended at the end.
    Returns the count distribution as an array.
    """
    k = k1 + k2
    n_states = 1 << (k - 1)
    half = n_states >> 1
    pattern = _pattern_bits(k1, k2)
    full_mask = (1 << k) - 1
    seen = 0 if start_state is None else k - 1
    steps = list(probs) + [None] * len(tail_bits)
    max_count = (len(steps) + seen) // k + 1
    dist = np.zeros((n_states, max_count + 1))
    dist[0 if start_state is None else start_state, 0] = start_prob
    low = np.arange(half)
    for t, p in enumerate(steps):
        if p is None:
            forced = tail_bits[t - len(probs)]
            weights = {forced: 1.0, 1 - forced: 0.0}
        else:
            weights = {1: p, 0: 1.0 - p}
        new = np.zeros_like(dist)
        complete = seen + t + 1 >= k
        view = dist.reshape(2, half, -1)
        new_view = new.reshape(half, 2, -1)
        for x, w in weights.items():
            if w == 0:
                continue
            for h in (0, 1):
                contrib = view[h] * w
                if complete:
                    full = ((h << (k - 1)) | (low << 1) | x) & full_mask
                    hit = full == pattern
                    new_view[~hit, x, :] += contrib[~hit]
                    new_view[hit, x, 1:] += contrib[hit, :-1]
                else:
                    new_view[:, x, :] += contrib
        dist = new
    return dist.sum(axis=0)


def _dp_exact(probs, k1, k2, start_state=None, start_prob=Fraction(1), tail_bits=()):
    k = k1 + k2
    mask = (1 << (k - 1)) - 1
    pattern = _pattern_bits(k1, k2)
    full_mask = (1 << k) - 1
    seen = 0 if start_state is None else k - 1
    dist = {(0 if start_state is None else start_state, 0): start_prob}
    steps = [(1, to_exact(p)) for p in probs] + [(0, b) for b in tail_bits]
    for t, (kind, val) in enumerate(steps):
        outcomes = ((1, val), (0, 1 - val)) if kind else ((val, Fraction(1)),)
        complete = seen + t + 1 >= k
        new = {}
        for (s, c), w in dist.items():
            for x, px in outcomes:
                if px == 0:
                    continue
                full = ((s << 1) | x) & full_mask
                c2 = c + 1 if complete and full == pattern else c
                key = (full & mask, c2)
                new[key] = new.get(key, 0) + w * px
        dist = new
    top = max(c for _, c in dist) if dist else 0
    out = [Fraction(0)] * (top + 1)
    for (_, c), w in dist.items():
        out[c] += w
    return out


def pmf_dp(spec: RunsSpec, circular: bool = False, exact: bool = False) -> Pmf:
    """Exact PMF by a forward pass over (last k-1 outcomes, count so far).

    The circular mode conditions on the first k-1 outcomes, runs the chain over
    all n trials and then appends those k-1 outcomes again so every wrapped
    window is scored exactly once.
    """
    k1, k2, k, n = spec.k1, spec.k2, spec.k, spec.n
    probs = spec.prob_list()
    if exact:
        probs = [to_exact(p) for p in probs]
    run = _dp_exact if exact else _dp_float
    if not circular:
        _check_dp_size(k, DP_MAX_K)
        if not exact:
            probs = [float(p) for p in probs]
        total = run(probs, k1, k2)
        return Pmf(tuple(_trim([m if exact else float(m) for m in total])))
    _check_dp_size(k, CIRCULAR_DP_MAX_K)
    if n < k:
        raise ValueError("circular count needs n >= k1 + k2")
    if not exact:
        probs = [float(p) for p in probs]
    head, rest = probs[: k - 1], probs[k - 1:]
    acc = None
    for b in range(1 << (k - 1)):
        bits = [(b >> (k - 2 - j)) & 1 for j in range(k - 1)]
        w = math.prod(p if x else 1 - p for p, x in zip(head, bits))
        if w == 0:
            continue
        part = run(rest, k1, k2, start_state=b, start_prob=w, tail_bits=bits)
        part = list(part)
        if acc is None:
            acc = part
        else:
            if len(part) > len(acc):
                acc, part = part, acc
            for i, v in enumerate(part):
                acc[i] += v
    return Pmf(tuple(_trim([m if exact else float(m) for m in acc])))


def _window_hits(codes: np.ndarray, k1: int, k2: int, starts) -> np.ndarray:
    """Per-code number of firing windows; bit j of a code is trial j+1."""
    k = k1 + k2
    pattern = ((1 << k2) - 1) << k1
    mask = (1 << k) - 1
    count = np.zeros(codes.shape, dtype=np.int64)
    for s in starts:
        count += ((codes >> s) & mask) == pattern
    return count


def _code_probs(codes: np.ndarray, probs: Sequence[float]) -> np.ndarray:
    out = np.ones(codes.shape)
    for j, p in enumerate(probs):
        bit = (codes >> j) & 1
        out *= np.where(bit == 1, p, 1.0 - p)
    return out


def enumerate_counts(spec: RunsSpec, circular: bool = False, chunk_bits: int = 16):
    """Yield ``(codes, weights, counts)`` chunks covering all 2^n sequences."""
    n, k = spec.n, spec.k
    probs = [float(p) for p in spec.prob_list()]
    if circular:
        starts = range(n)
    else:
        starts = range(spec.n_windows)
    size = 1 << min(n, chunk_bits)
    for base in range(0, 1 << n, size):
        codes = np.arange(base, base + size, dtype=np.int64)
        ext = codes | (codes << n) if circular else codes
        yield codes, _code_probs(codes, probs), _window_hits(ext, spec.k1, spec.k2, starts)


def pmf_bruteforce(spec: RunsSpec, circular: bool = False, exact: bool = False) -> Pmf:
    """Sum the probability of each of the 2^n outcome sequences into its count.

    Chunks are reduced in a fixed order and each bucket is summed with
    correctly rounded summation, so the result does not depend on chunking.
    """
    n, k = spec.n, spec.k
    if n > BRUTE_MAX_N:
        raise ValueError(f"n = {n} too large for enumeration (limit {BRUTE_MAX_N})")
    if circular and n < k:
        raise ValueError("circular count needs n >= k1 + k2")
    top = n if circular else n // k
    if exact:
        probs = [to_exact(p) for p in spec.prob_list()]
        out = [Fraction(0)] * (top + 1)
        starts = range(n) if circular else range(spec.n_windows)
        pattern = ((1 << spec.k2) - 1) << spec.k1
        mask = (1 << k) - 1
        for code in range(1 << n):
            w = Fraction(1)
            for j, p in enumerate(probs):
                w *= p if (code >> j) & 1 else 1 - p
            ext = code | (code << n) if circular else code
            c = sum(((ext >> s) & mask) == pattern for s in starts)
            out[c] += w
        return Pmf(tuple(_trim(out)))
    buckets = [[] for _ in range(top + 1)]
    for _, weights, counts in enumerate_counts(spec, circular):
        partial = np.bincount(counts, weights=weights, minlength=top + 1)
        for c, v in enumerate(partial):
            buckets[c].append(v)
    return Pmf(tuple(_trim([math.fsum(b) for b in buckets])))


@dataclass(frozen=True)
class PgfValue:
    t: float
    value: float
    derivative: float


def _pgf_parts(n: int, k: int, a, t):
    if n < 0:
        return 0.0, 0.0
    value, deriv = [], []
    for m in range(n // k + 1):
        c = math.comb(n - m * (k - 1), m)
        value.append(c * (a * (t - 1)) ** m)
        if m >= 1:
            deriv.append(m * c * a ** m * (t - 1) ** (m - 1))
    return accurate_sum(value), accurate_sum(deriv)


def pgf_eval(spec: RunsSpec, t) -> PgfValue:
    """phi_n(t) = sum_m C(n - m(k-1), m) (a (t-1))^m and its t-derivative."""
    _require_identical(spec)
    a = pattern_prob(spec.k1, spec.k2, spec.p)
    value, deriv = _pgf_parts(spec.n, spec.k, a, t)
    return PgfValue(t, value, deriv)


def p_tilde(k: int, a):
    """k a (k/(k-1))^(k-1)."""
    return k * a * (k / (k - 1)) ** (k - 1)


def check_pgf_relations(spec: RunsSpec, t_grid: Sequence[float]) -> dict:
    """Max absolute residual of the four PGF recurrences over ``t_grid``.

    (i)   phi'_n = (n-k+1) a phi_{n-k} - a (k-1)(t-1) phi'_{n-k}
    (ii)  phi'_{n-1} = (n-k) a phi_{n-k} - a k (t-1) phi'_{n-k}
    (iii) phi'_n = phi'_{n-1} + a phi_{n-k} + a (t-1) phi'_{n-k}
    (iv)  [1 + pt (t-1)] phi'_n = (n/k) pt phi_n
              - a sum_{u=0}^{k-2} ((n+u+1)/(k-1)) (k/(k-1))^u phi_{n-k+u+1}
    """
    _require_identical(spec)
    n, k = spec.n, spec.k
    if n < k:
        raise ValueError("relations need n >= k")
    a = pattern_prob(spec.k1, spec.k2, float(spec.p))
    pt = p_tilde(k, a)
    res = {"i": 0.0, "ii": 0.0, "iii": 0.0, "iv": 0.0}
    for t in t_grid:
        f_n, d_n = _pgf_parts(n, k, a, t)
        _, d_n1 = _pgf_parts(n - 1, k, a, t)
        f_nk, d_nk = _pgf_parts(n - k, k, a, t)
        r1 = d_n - ((n - k + 1) * a * f_nk - a * (k - 1) * (t - 1) * d_nk)
        r2 = d_n1 - ((n - k) * a * f_nk - a * k * (t - 1) * d_nk)
        r3 = d_n - (d_n1 + a * f_nk + a * (t - 1) * d_nk)
        tail = accurate_sum(
            (n + u + 1) / (k - 1) * (k / (k - 1)) ** u * _pgf_parts(n - k + u + 1, k, a, t)[0]
            for u in range(k - 1)
        )
        r4 = (1 + pt * (t - 1)) * d_n - (n / k * pt * f_n - a * tail)
        for key, r in zip(res, (r1, r2, r3, r4)):
            res[key] = max(res[key], abs(r))
    return res


@dataclass(frozen=True)
class WaitingTime:
    mean: float
    variance: float
    series: Pmf = field(repr=False)


def waiting_time(spec: RunsSpec, tol: float = 1e-12, max_terms: int = 10_000_000) -> WaitingTime:
    """Waiting time T between successive pattern occurrences.

    T has PGF a z^k / (1 - z + a z^k).  The returned ``series`` holds the
    power-series coefficients P(T = j) up to the first j where the cumulative
    mass exceeds ``1 - tol``.
    """
    _require_identical(spec)
    k = spec.k
    a = pattern_prob(spec.k1, spec.k2, float(spec.p))
    if a == 0:
        raise ValueError("a(p) = 0: the pattern never occurs")
    mean = 1 / a
    var = (1 - (2 * k - 1) * a) / a ** 2
    # 1/(1 - z + a z^k) = sum_j d_j z^j with d_j = d_{j-1} - a d_{j-k};
    # P(T = j) = a d_{j-k}
    d = [1.0]
    coeffs = [0.0] * k
    total = 0.0
    while total < 1 - tol and len(coeffs) < max_terms:
        c = a * d[len(coeffs) - k]
        coeffs.append(c)
        total += c
        j = len(d)
        d.append(d[j - 1] - (a * d[j - k] if j >= k else 0.0))
    return WaitingTime(mean, var, Pmf(tuple(coeffs)))
