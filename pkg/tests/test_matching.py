import pytest
from hypothesis import given, settings, strategies as st

from runsapprox.matching import (Convention, MatchingError, match_one_fix_alpha, match_one_fix_p,
                                 match_two_M, match_two_iid, preset_alpha)
from runsapprox.model import RunsSpec, circular_moments, linear_moments, pattern_prob

SPEC = RunsSpec(3, 2, 31, 0.75)


def test_one_parameter_fix_alpha():
    m = match_one_fix_alpha(SPEC, preset_alpha(SPEC, "n/k"))
    assert m.alpha == pytest.approx(6.2)
    assert m.p_check == pytest.approx(0.0382749, abs=5e-8)
    assert m.convention is Convention.ONE_FIX_ALPHA and m.convention.one_parameter
    assert m.floor_alpha == 6


def test_one_parameter_small_q_preset():
    spec = RunsSpec(3, 2, 31, 0.99)
    m = match_one_fix_alpha(spec, preset_alpha(spec, "n/3k"))
    assert m.p_check == pytest.approx(1.28045e-5, rel=1e-5)


def test_fix_p_inverts_fix_alpha():
    m = match_one_fix_p(SPEC, 0.05)
    assert m.alpha * 0.05 == pytest.approx(linear_moments(SPEC).mean, rel=1e-14)


def test_two_moment_iid():
    m = match_two_iid(SPEC)
    assert m.alpha == pytest.approx(3.26906, abs=5e-6)
    assert m.p_check == pytest.approx(0.0725911, abs=5e-8)
    assert m.q_check < 1 and not m.convention.one_parameter


@settings(max_examples=50, deadline=None)
@given(k1=st.integers(1, 4), k2=st.integers(1, 4), extra=st.integers(0, 200),
       p=st.floats(0.05, 0.95))
def test_two_moment_iid_matches_both_moments(k1, k2, extra, p):
    spec = RunsSpec(k1, k2, 2 * (k1 + k2) + extra, p)
    m = match_two_iid(spec)
    mom = linear_moments(spec)
    assert m.alpha * m.p_check == pytest.approx(mom.mean, rel=1e-13)
    assert m.alpha * m.p_check * m.q_check == pytest.approx(mom.variance, rel=1e-12)


def test_two_moment_circular():
    lin = match_two_M(SPEC, pairs="linear")
    assert lin.p_check == pytest.approx(0.073431, abs=5e-7)
    cyc = match_two_M(SPEC, pairs="cyclic")
    assert cyc.p_check == pytest.approx(9 * pattern_prob(3, 2, 0.75), rel=1e-13)
    mom = circular_moments(SPEC)
    assert cyc.alpha * cyc.p_check == pytest.approx(mom.mean, rel=1e-15)


def test_matching_errors():
    with pytest.raises((ValueError, MatchingError)):
        match_one_fix_alpha(RunsSpec(3, 2, 4, 0.5), preset_alpha(RunsSpec(3, 2, 4, 0.5), "n/3k"))
    with pytest.raises(MatchingError):
        match_two_iid(RunsSpec(1, 1, 6, [0.5] * 5 + [0.4]))
    with pytest.raises(MatchingError):
        match_two_M(RunsSpec(1, 1, 4, 0.0))
    with pytest.raises(ValueError):
        preset_alpha(SPEC, "n/2k")
