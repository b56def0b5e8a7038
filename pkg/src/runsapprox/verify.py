"""Named property suites behind ``runs-approx verify``."""

from __future__ import annotations

import math
from dataclasses import dataclass, field
from fractions import Fraction

import numpy as np

from .bounds import bound_thm21, bound_thm22
from .exact import check_pgf_relations, pmf_bruteforce, pmf_closed_form, pmf_dp, pmf_recursive
from .matching import match_one_fix_alpha, preset_alpha
from .model import RunsSpec, linear_moments
from .pseudobinomial import PseudoBinomial
from .stein import TestFunction, stein_identity_A0, stein_identity_A1
from .tables import compute_table, summarize, summary_line
from .tvlab import compare_all, simulate_counts

PATTERNS = ((1, 1), (1, 2), (2, 1), (2, 2), (3, 2))
ORACLE_PROBS = (0.2, 0.5, 0.8)


@dataclass
class SuiteResult:
    name: str
    passed: bool
    lines: list = field(default_factory=list)


def _max_diff(a, b) -> float:
    size = max(len(a), len(b))
    return max((abs(float(a[m]) - float(b[m])) for m in range(size)), default=0.0)


def suite_oracle(max_n: int = 18) -> SuiteResult:
    worst = 0.0
    exact_mismatch = 0
    for k1, k2 in PATTERNS:
        for n in range(1, max_n + 1):
            for p in ORACLE_PROBS:
                spec = RunsSpec(k1, k2, n, p)
                routes = [pmf_recursive(spec), pmf_closed_form(spec), pmf_dp(spec),
                          pmf_bruteforce(spec)]
                for r in routes[1:]:
                    worst = max(worst, _max_diff(routes[0], r))
                if n <= 10:
                    ex = spec.exact()
                    rational = [pmf_recursive(ex, exact=True), pmf_closed_form(ex, exact=True),
                                pmf_dp(ex, exact=True)]
                    if any(r.masses != rational[0].masses for r in rational[1:]):
                        exact_mismatch += 1
    ok = worst <= 1e-10 and exact_mismatch == 0
    return SuiteResult("oracle", ok, [f"max route difference {worst:.3e} (limit 1e-10)",
                                      f"rational route mismatches {exact_mismatch}"])


def suite_stein(seed: int = 2024) -> SuiteResult:
    rng = np.random.default_rng(seed)
    worst0 = 0.0
    for _ in range(100):
        alpha = float(rng.uniform(1.0, 40.0))
        pb = PseudoBinomial(alpha, float(rng.uniform(0.01, 0.99)))
        g = TestFunction.random(pb.support_max, rng)
        worst0 = max(worst0, abs(stein_identity_A0(pb, g)))
    worst1 = 0.0
    for k1, k2, n in ((1, 1, 8), (2, 1, 12), (3, 2, 15)):
        spec = RunsSpec(k1, k2, n, float(rng.uniform(0.2, 0.8)))
        for _ in range(20):
            g = TestFunction.random(n // spec.k + 1, rng)
            worst1 = max(worst1, abs(stein_identity_A1(spec, g)))
    ok = worst0 <= 1e-12 and worst1 <= 1e-10
    return SuiteResult("stein", ok, [f"max |E A0 g(Z)| {worst0:.3e} (limit 1e-12)",
                                     f"max |E A1 g(B)| {worst1:.3e} (limit 1e-10)"])


def dominance_grid(max_n: int = 18):
    for k1, k2 in PATTERNS:
        for n in range(1, max_n + 1):
            for p in ORACLE_PROBS:
                yield RunsSpec(k1, k2, n, p)


def suite_dominance(max_n: int = 18) -> SuiteResult:
    checked = 0
    violations = []
    for spec in dominance_grid(max_n):
        report = compare_all(spec)
        for row in report.rows:
            if row.applicable:
                checked += 1
                if not row.dominates:
                    violations.append(f"{spec.k1},{spec.k2},n={spec.n},p={spec.p}: {row.name} "
                                      f"slack {row.slack:.3e}")
    lines = [f"{checked} flag-satisfied rows checked, {len(violations)} violations"]
    return SuiteResult("dominance", not violations, lines + violations[:20])


def suite_pgf(seed: int = 7, cases: int = 60) -> SuiteResult:
    # float residuals grow with the size of phi_n; n stays within the enumerable range
    rng = np.random.default_rng(seed)
    worst = {"i": 0.0, "ii": 0.0, "iii": 0.0, "iv": 0.0}
    for _ in range(cases):
        k1, k2 = PATTERNS[int(rng.integers(len(PATTERNS)))]
        k = k1 + k2
        spec = RunsSpec(k1, k2, int(rng.integers(k, 31)), float(rng.uniform(0.05, 0.95)))
        res = check_pgf_relations(spec, rng.uniform(-1.0, 1.5, size=5))
        for key in worst:
            worst[key] = max(worst[key], res[key])
    ok = all(v <= 1e-9 for v in worst.values())
    return SuiteResult("pgf", ok, [f"relation ({key}) max residual {v:.3e}" for key, v in worst.items()])


def suite_tables() -> SuiteResult:
    lines, ok = [], True
    for tid in (1, 2, 3):
        summary = summarize(compute_table(tid))
        ok &= summary["failures"] == 0
        lines.append(summary_line(tid, summary))
    return SuiteResult("tables", ok, lines)


ORDER_NS = (50, 100, 200, 400, 800)


def order_values():
    """|thm22| sqrt(n) and |thm21| for (1,1), p = 1/2, alpha = n/k."""
    two, one = [], []
    for n in ORDER_NS:
        spec = RunsSpec(1, 1, n, 0.5)
        two.append(abs(bound_thm22(spec).value) * math.sqrt(n))
        match = match_one_fix_alpha(spec, preset_alpha(spec, "n/k"))
        one.append(abs(bound_thm21(spec, match).value))
    return two, one


def suite_order() -> SuiteResult:
    two, one = order_values()
    r2, r1 = max(two) / min(two), max(one) / min(one)
    lines = [f"|thm22| sqrt(n) over n={ORDER_NS}: max/min {r2:.3f} (limit 2)",
             f"|thm21| over the same n: max/min {r1:.3f} (limit 2)"]
    return SuiteResult("order", r2 <= 2 and r1 <= 2, lines)


def suite_simulation(reps: int = 1_000_000, seed: int = 12345) -> SuiteResult:
    spec = RunsSpec(3, 2, 31, 0.75)
    mom = linear_moments(spec)
    emp = simulate_counts(spec, reps=reps, seed=seed, threads=1)
    emp4 = simulate_counts(spec, reps=reps, seed=seed, threads=4)
    se = math.sqrt(float(mom.variance) / reps)
    z = (float(emp.mean()) - float(mom.mean)) / se
    identical = emp.masses == emp4.masses
    ok = abs(z) <= 4 and identical
    return SuiteResult("simulation", ok, [f"empirical mean {float(emp.mean()):.7f}, z = {z:+.3f}",
                                          f"bit-identical across 1 and 4 threads: {identical}"])


SUITES = {
    "oracle": suite_oracle,
    "stein": suite_stein,
    "dominance": suite_dominance,
    "pgf": suite_pgf,
    "tables": suite_tables,
    "order": suite_order,
    "simulation": suite_simulation,
}


def run_suite(name: str) -> list:
    if name == "all":
        return [fn() for fn in SUITES.values()]
    if name not in SUITES:
        raise KeyError(name)
    return [SUITES[name]()]
