import math

import numpy as np
import pytest
from hypothesis import given, settings, strategies as st

from runsapprox import bounds as B
from runsapprox.matching import match_one_fix_alpha, match_two_M, match_two_iid, preset_alpha
from runsapprox.model import RunsSpec, pattern_prob

SPEC = RunsSpec(3, 2, 31, 0.75)
A = pattern_prob(3, 2, 0.75)


def one(spec, preset="n/k"):
    return match_one_fix_alpha(spec, preset_alpha(spec, preset))


def test_table_anchor_values():
    assert B.bound_thm21(SPEC, one(SPEC)).value == pytest.approx(0.4721530, abs=5e-7)
    assert B.bound_cor41(SPEC, one(SPEC)).value == pytest.approx(0.1261160, abs=5e-7)
    assert B.bound_thm22(SPEC).value == pytest.approx(0.0583356, abs=5e-7)
    assert B.bound_cor42(SPEC, match_two_iid(SPEC)).value == pytest.approx(0.1495820, abs=5e-7)
    assert B.bound_poisson(SPEC, "table").value == pytest.approx(0.0153348, abs=5e-7)
    s91 = RunsSpec(3, 2, 91, 0.70)
    assert B.bound_thm21(s91, one(s91)).value == pytest.approx(0.6925100, abs=5e-7)
    s61 = RunsSpec(3, 2, 61, 0.75)
    assert B.bound_thm22(s61).value == pytest.approx(0.0490745, abs=5e-7)
    small = RunsSpec(3, 2, 31, 0.99)
    assert B.bound_cor41(small, one(small, "n/3k")).value == pytest.approx(0.0000223, abs=5e-8)
    assert B.bound_thm21(small, one(small, "n/3k")).value == pytest.approx(8.0e-6, rel=0.05)


def test_printed_poisson_variant():
    rep = B.bound_poisson(SPEC, "printed")
    assert rep.value == pytest.approx(0.0063952, abs=5e-8)
    assert not rep.flags["coefficient_dominates_b1"]
    assert B.bound_poisson(SPEC, "table").preconditions_met


def test_thm22_clamp_and_constant():
    # 72 (1 - 9a) / a with a = 9/1024 is 8192 - 648
    assert B.prop24_M(SPEC) == pytest.approx(7544.0, rel=1e-14)
    rep = B.bound_thm22(SPEC)
    assert "clamp=1.0" in rep.notes
    assert not rep.flags["na_ge_8"]


def test_prop24():
    assert B.bound_prop24(SPEC).value == 1.0
    big = RunsSpec(3, 2, 100_000, 0.75)
    rep = B.bound_prop24(big)
    assert rep.value < 1 and rep.flags["na_ge_8"]


def test_thm31_reduces_to_cor41_for_identical_trials():
    for n, p in [(31, 0.75), (61, 0.72), (12, 0.4)]:
        spec = RunsSpec(3, 2, n, p)
        m = one(spec)
        assert B.bound_thm31(spec, m).value == pytest.approx(B.bound_cor41(spec, m).value, rel=1e-14)
    trunc = B.bound_thm31(SPEC, one(SPEC), edges="truncated").value
    assert trunc < B.bound_thm31(SPEC, one(SPEC)).value


def test_v_sequence_and_psi():
    v = B.v_sequence(SPEC)
    w = A * (2 * 0.75 ** 3 - 0.75 ** 4)
    assert len(v) == 31 and all(x == pytest.approx(w) for x in v)
    assert len(B.v_sequence(SPEC, first=2)) == 30
    assert sum(v[18:]) == pytest.approx(0.0603, abs=5e-5)
    assert B.psi(SPEC) == 2.0
    big = RunsSpec(3, 2, 2000, 0.5)
    wb = pattern_prob(3, 2, 0.5) * (2 * 0.5 ** 3 - 0.5 ** 4)
    assert B.psi(big) == pytest.approx(min(2, 4.6 / math.sqrt((2000 - 18) * wb)), rel=1e-12)
    with pytest.raises(ValueError):
        B.psi(RunsSpec(3, 2, 19, 0.5))


def test_v_sequence_direct_recomputation():
    rng = np.random.default_rng(5)
    p = list(rng.uniform(0.1, 0.9, 10))
    spec = RunsSpec(1, 2, 10, p)

    def P(i):
        return p[(i - 1) % 10]

    direct = sorted(
        ((1 - P(l)) * P(l + 1) * P(l + 2) * (P(l - 2) ** 2 * (1 - P(l - 1)) * P(l) + P(l + 1) * P(l - 1) ** 2)
         for l in range(1, 11)), reverse=True)
    assert B.v_sequence(spec) == pytest.approx(direct, rel=1e-14)


def test_thm33_identical_reduction():
    rep = B.bound_thm33(SPEC)
    assert rep.value == pytest.approx(0.0703125, abs=1e-15)
    spec = RunsSpec(2, 2, 400, 0.5)
    a = pattern_prob(2, 2, 0.5)
    w = a * (2 * 0.5 ** 3 - 0.5 ** 4)
    expect = 2 * 3 * a * min(1, 2.3 / math.sqrt((400 - 4 - 1) * w))
    assert B.bound_thm33(spec).value == pytest.approx(expect, rel=1e-12)


def test_cor42_matches_its_two_components():
    spec = RunsSpec(2, 2, 400, 0.5)
    m = match_two_M(spec)
    tier3 = B.bound_thm32(spec, m, tier=3).value
    total = B.bound_cor42(spec, m).value
    assert total == pytest.approx(B.bound_thm33(spec).value + tier3, rel=1e-12)


@pytest.mark.parametrize("spec", [RunsSpec(1, 1, 30, 0.3), RunsSpec(2, 1, 40, 0.6)])
def test_tier_order_identical(spec):
    m = match_two_M(spec)
    t = [B.bound_thm32(spec, m, tier).value for tier in (1, 2, 3)]
    assert t[0] <= t[1] <= t[2] * (1 + 1e-12)


@settings(max_examples=40, deadline=None)
@given(seed=st.integers(0, 2 ** 32 - 1), n=st.integers(8, 40))
def test_tier_order_nonidentical(seed, n):
    p = list(np.random.default_rng(seed).uniform(0.05, 0.95, n))
    spec = RunsSpec(1, 1, n, p)
    m = match_two_M(spec)
    t1, t2 = (B.bound_thm32(spec, m, tier).value for tier in (1, 2))
    t3w = B.bound_thm32(spec, m, 3, m_rule="window_max").value
    assert t1 <= t2 * (1 + 1e-12) and t2 <= t3w * (1 + 1e-12)
    printed = B.bound_thm32(spec, m, 3)
    if printed.flags["envelope_dominates"]:
        assert t2 <= printed.value * (1 + 1e-12)


def test_printed_tier3_can_fall_below_tier2():
    p = [0.9, 0.9, 0.1, 0.5, 0.95, 0.2, 0.5, 0.5, 0.6, 0.4]
    spec = RunsSpec(1, 1, 10, p)
    m = match_two_M(spec)
    printed = B.bound_thm32(spec, m, 3)
    assert not printed.flags["envelope_dominates"]
    assert printed.value < B.bound_thm32(spec, m, 2).value


def test_barbour_and_gs():
    assert B.bound_barbour(SPEC).value == pytest.approx(9 * A)
    assert B.bound_barbour(RunsSpec(1, 1, 5, 0.5)).value == 0.75
    gs, imp = B.bound_gs_1k(RunsSpec(1, 2, 31, 0.75))
    assert gs.value == pytest.approx(0.703125)
    for n in range(7, 200):
        gs, imp = B.bound_gs_1k(RunsSpec(1, 2, n, 0.75))
        assert imp.value < gs.value
    with pytest.raises(ValueError):
        B.bound_gs_1k(SPEC)


@pytest.mark.parametrize("n,p", [(20, 0.1), (50, 0.3), (100, 0.5), (400, 0.05)])
def test_runs11_identities(n, p):
    spec = RunsSpec(1, 1, n, p)
    m = one(spec)
    r1 = B.bound_runs11(spec, "one", m).value
    assert r1 == pytest.approx(min(B.bound_thm21(spec, m).value, B.bound_cor41(spec, m).value),
                               rel=1e-12)
    assert B.bound_runs11(spec, "two").value == pytest.approx(B.bound_thm22(spec).value, rel=1e-12)


def test_report_serialization():
    rep = B.bound_thm21(SPEC, one(SPEC))
    back = B.BoundReport.from_dict(__import__("json").loads(rep.to_json()))
    assert back == rep and back.preconditions_met
