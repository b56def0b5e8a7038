"""Exact total-variation distances, Monte Carlo sanity checks and
bound-versus-exact comparison reports."""

from __future__ import annotations

import json
import math
import os
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass, field

import numpy as np
from scipy import stats

from . import bounds as B
from ._numerics import accurate_sum
from .exact import Pmf, pmf_dp
from .matching import (MatchingError, MatchResult, match_one_fix_alpha, match_two_M,
                       match_two_iid, preset_alpha)
from .model import RunsSpec, linear_moments
from .pseudobinomial import PseudoBinomial, pb_pmf

DOMINANCE_TOL = 1e-10
SIM_CHUNK = 1 << 15


def tv_distance(a: Pmf, b: Pmf) -> float:
    """Half the L1 distance between two normalized PMFs."""
    for name, pmf in (("first", a), ("second", b)):
        if not pmf.is_normalized():
            raise ValueError(f"{name} PMF is not normalized (total {float(pmf.total())!r})")
    lo = min(a.offset, b.offset)
    hi = max(a.offset + len(a), b.offset + len(b))
    return 0.5 * accurate_sum(abs(float(a[m]) - float(b[m])) for m in range(lo, hi))


def tv_shift(a: Pmf, d: int = 1) -> float:
    """d_TV(X, X + d)."""
    return tv_distance(a, a.shifted(d))


def poisson_pmf(lam: float) -> Pmf:
    """Poisson(lam) truncated far enough out that the dropped tail is negligible."""
    if lam <= 0:
        return Pmf((1.0,))
    upper = int(lam + 12 * math.sqrt(lam) + 40)
    return Pmf(tuple(float(x) for x in stats.poisson.pmf(np.arange(upper + 1), lam)))


def _thread_count(threads: int | None) -> int:
    if threads is not None:
        return max(1, int(threads))
    env = os.environ.get("RUNS_APPROX_THREADS")
    if env:
        return max(1, int(env))
    return min(8, os.cpu_count() or 1)


def _simulate_chunk(probs: np.ndarray, k1: int, k2: int, circular: bool, size: int,
                    seed: int, index: int) -> np.ndarray:
    rng = np.random.Generator(np.random.Philox(np.random.SeedSequence([seed, index])))
    succ = rng.random((size, probs.size)) < probs
    n, k = probs.size, k1 + k2
    if circular:
        succ = np.concatenate([succ, succ[:, :k - 1]], axis=1)
        starts = n
    else:
        starts = n - k + 1
    counts = np.zeros(size, dtype=np.int64)
    for l in range(max(starts, 0)):
        hit = np.ones(size, dtype=bool)
        for j in range(k1):
            hit &= ~succ[:, l + j]
        for j in range(k1, k):
            hit &= succ[:, l + j]
        counts += hit
    return np.bincount(counts, minlength=max(starts, 0) + 1)


def simulate_counts(spec: RunsSpec, circular: bool = False, reps: int = 100_000,
                    seed: int = 0, threads: int | None = None) -> Pmf:
    """Empirical law of the runs count from ``reps`` simulated sequences.

    Sequences are generated in fixed-size chunks, chunk i drawing from a Philox
    stream keyed by (seed, i); histograms are summed as integers in chunk
    order, so the output does not depend on the worker count.
    """
    if reps < 1:
        raise ValueError("reps must be >= 1")
    if circular and spec.n < spec.k:
        raise ValueError("circular count needs n >= k1 + k2")
    probs = np.array([float(x) for x in spec.prob_list()])
    sizes = [SIM_CHUNK] * (reps // SIM_CHUNK)
    if reps % SIM_CHUNK:
        sizes.append(reps % SIM_CHUNK)
    jobs = [(probs, spec.k1, spec.k2, circular, s, seed, i) for i, s in enumerate(sizes)]
    with ThreadPoolExecutor(max_workers=_thread_count(threads)) as pool:
        hists = list(pool.map(lambda j: _simulate_chunk(*j), jobs))
    total = np.zeros(max(h.size for h in hists), dtype=np.int64)
    for h in hists:
        total[:h.size] += h
    return Pmf(tuple(int(c) / reps for c in total))


@dataclass
class TvRow:
    name: str
    value: float
    target: str
    exact: float
    flags: dict = field(default_factory=dict)
    notes: tuple = ()

    @property
    def slack(self) -> float:
        return self.value - self.exact

    @property
    def applicable(self) -> bool:
        return all(self.flags.values())

    @property
    def dominates(self) -> bool:
        return self.slack >= -DOMINANCE_TOL

    def to_dict(self) -> dict:
        return {"name": self.name, "value": self.value, "slack": self.slack,
                "flags": dict(self.flags), "notes": list(self.notes),
                "target": self.target, "exact": self.exact}


@dataclass
class TvReport:
    """``exact_tv`` is d_TV between B and the two-moment pseudo-binomial when
    that matching exists, else the first pseudo-binomial target computed.
    Each row carries the exact distance its own bound is compared with."""

    spec: RunsSpec
    exact_tv: float
    rows: list
    skipped: list = field(default_factory=list)

    def violations(self) -> list:
        return [r for r in self.rows if r.applicable and not r.dominates]

    def to_dict(self) -> dict:
        s = self.spec
        probs = [float(x) for x in s.prob_list()] if not s.identical else float(s.p)
        return {"spec": {"k1": s.k1, "k2": s.k2, "n": s.n, "probs": probs},
                "exact_tv": self.exact_tv,
                "rows": [r.to_dict() for r in self.rows],
                "skipped": list(self.skipped)}

    def to_json(self) -> str:
        return json.dumps(self.to_dict())

    @classmethod
    def from_json(cls, text: str) -> "TvReport":
        d = json.loads(text)
        s = d["spec"]
        spec = RunsSpec(s["k1"], s["k2"], s["n"], s["probs"])
        rows = [TvRow(r["name"], r["value"], r["target"], r["exact"], r["flags"], tuple(r["notes"]))
                for r in d["rows"]]
        return cls(spec, d["exact_tv"], rows, d.get("skipped", []))


class _Laws:
    """Lazily computed exact laws shared across rows."""

    def __init__(self, spec: RunsSpec):
        self.spec = spec
        self._cache = {}

    def get(self, key, fn):
        if key not in self._cache:
            self._cache[key] = fn()
        return self._cache[key]

    @property
    def linear(self) -> Pmf:
        return self.get("B", lambda: pmf_dp(self.spec))

    @property
    def circular(self) -> Pmf:
        return self.get("M", lambda: pmf_dp(self.spec, circular=True))

    def pb(self, match: MatchResult) -> Pmf:
        return self.get(("pb", match.alpha, match.p_check),
                        lambda: pb_pmf(PseudoBinomial(match.alpha, match.p_check)))

    def poisson(self) -> Pmf:
        return self.get("poi", lambda: poisson_pmf(float(linear_moments(self.spec).mean)))


def compare_all(spec: RunsSpec, alpha_presets=("n/k", "n/3k")) -> TvReport:
    """Evaluate every applicable bound next to the exact distance it controls."""
    laws = _Laws(spec)
    rows, skipped = [], []

    def add(label, report_fn, target, exact_fn):
        try:
            rep = report_fn()
            exact = exact_fn()
        except (ValueError, MatchingError, ZeroDivisionError) as exc:
            skipped.append(f"{label}: {exc}")
            return
        if not math.isfinite(rep.value):
            skipped.append(f"{label}: non-finite value")
            return
        rows.append(TvRow(label, rep.value, target, exact, dict(rep.flags), rep.notes))

    def tv_b(match):
        return lambda: tv_distance(laws.linear, laws.pb(match))

    def tv_m(match):
        return lambda: tv_distance(laws.circular, laws.pb(match))

    one_matches = {}
    for preset in alpha_presets:
        try:
            one_matches[preset] = match_one_fix_alpha(spec, preset_alpha(spec, preset))
        except (ValueError, MatchingError) as exc:
            skipped.append(f"one-parameter matching {preset}: {exc}")

    two_iid = two_m = None
    if spec.identical:
        try:
            two_iid = match_two_iid(spec)
        except (ValueError, MatchingError) as exc:
            skipped.append(f"two-moment iid matching: {exc}")
    if spec.n >= spec.k:
        try:
            two_m = match_two_M(spec)
        except (ValueError, MatchingError) as exc:
            skipped.append(f"two-moment circular matching: {exc}")

    for preset, m in one_matches.items():
        tag = f"[alpha={preset}]"
        add(f"thm31 {tag}", lambda: B.bound_thm31(spec, m, "full"), f"B vs PB{tag}", tv_b(m))
        add(f"thm31_truncated {tag}", lambda: B.bound_thm31(spec, m, "truncated"),
            f"B vs PB{tag}", tv_b(m))
        if spec.identical:
            add(f"thm21 {tag}", lambda: B.bound_thm21(spec, m), f"B vs PB{tag}", tv_b(m))
            add(f"cor41 {tag}", lambda: B.bound_cor41(spec, m), f"B vs PB{tag}", tv_b(m))
            if (spec.k1, spec.k2) == (1, 1):
                add(f"runs11_one {tag}", lambda: B.bound_runs11(spec, "one", m),
                    f"B vs PB{tag}", tv_b(m))

    if two_m is not None:
        for tier in (1, 2, 3):
            add(f"thm32_tier{tier}", lambda: B.bound_thm32(spec, two_m, tier),
                "M vs PB[two-moment M]", tv_m(two_m))
        add("thm32_tier3_window_max", lambda: B.bound_thm32(spec, two_m, 3, m_rule="window_max"),
            "M vs PB[two-moment M]", tv_m(two_m))
        add("thm33", lambda: B.bound_thm33(spec), "B vs M",
            lambda: tv_distance(laws.linear, laws.circular))

    if spec.identical:
        if two_iid is not None:
            add("thm22", lambda: B.bound_thm22(spec), "B vs PB[two-moment iid]", tv_b(two_iid))
            add("cor42 [two-moment iid]", lambda: B.bound_cor42(spec, two_iid),
                "B vs PB[two-moment iid]", tv_b(two_iid))
            if (spec.k1, spec.k2) == (1, 1):
                add("runs11_two", lambda: B.bound_runs11(spec, "two"),
                    "B vs PB[two-moment iid]", tv_b(two_iid))
        if two_m is not None:
            add("cor42 [two-moment M]", lambda: B.bound_cor42(spec, two_m),
                "B vs PB[two-moment M]", tv_b(two_m))
        add("prop24", lambda: B.bound_prop24(spec), "B vs B+1", lambda: tv_shift(laws.linear))
        poi = lambda: tv_distance(laws.linear, laws.poisson())
        add("poisson_printed", lambda: B.bound_poisson(spec, "printed"), "B vs Poisson", poi)
        add("poisson_table", lambda: B.bound_poisson(spec, "table"), "B vs Poisson", poi)
        add("barbour", lambda: B.bound_barbour(spec), "B vs Poisson", poi)
        if spec.k1 == 1:
            try:
                gs, gs2 = B.bound_gs_1k(spec)
                add("gs", lambda: gs, "B vs Poisson", poi)
                add("gs_improved", lambda: gs2, "B vs Poisson", poi)
            except (ValueError, ZeroDivisionError) as exc:
                skipped.append(f"gs: {exc}")

    headline = two_iid or two_m or next(iter(one_matches.values()), None)
    exact_tv = tv_distance(laws.linear, laws.pb(headline)) if headline is not None else float("nan")
    return TvReport(spec, exact_tv, rows, skipped)
