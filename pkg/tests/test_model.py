from fractions import Fraction

import pytest
from hypothesis import given, settings, strategies as st

from oracle import enumerate_law, mean_var
from runsapprox.model import (RunsSpec, circular_moments, linear_moments, pattern_prob,
                              window_prob, window_probs)


def test_pattern_prob_uses_failures_then_successes():
    # (1-p)^k1 p^k2, not p^k1
    assert pattern_prob(3, 2, 0.75) == pytest.approx(0.25 ** 3 * 0.75 ** 2)
    assert pattern_prob(3, 2, Fraction(3, 4)) == Fraction(9, 1024)


@pytest.mark.parametrize("bad", [
    dict(k1=0, k2=1, n=3, probs=0.5),
    dict(k1=1, k2=1, n=0, probs=0.5),
    dict(k1=1, k2=1, n=3, probs=1.5),
    dict(k1=1, k2=1, n=3, probs=[0.5, 0.5]),
    dict(k1=1, k2=1, n=3, probs=float("nan")),
])
def test_spec_rejects_bad_input(bad):
    with pytest.raises(ValueError):
        RunsSpec(**bad)


def test_spec_rejects_non_integer_sizes():
    with pytest.raises(TypeError):
        RunsSpec(1.0, 1, 3, 0.5)


def test_spec_properties():
    s = RunsSpec(3, 2, 31, 0.75)
    assert s.k == 5 and s.n_windows == 27 and s.identical
    assert RunsSpec(1, 1, 3, [0.5, 0.5, 0.5]).identical
    assert not RunsSpec(1, 1, 3, [0.5, 0.4, 0.5]).identical


def test_window_prob_cyclic_indices():
    s = RunsSpec(1, 1, 4, [0.1, 0.2, 0.3, 0.4])
    # window 4 wraps: trial 4 fails, trial 1 succeeds
    assert window_prob(s, 4, circular=True) == pytest.approx(0.6 * 0.1)
    with pytest.raises(IndexError):
        window_prob(s, 4)
    assert len(window_probs(s)) == 3 and len(window_probs(s, circular=True)) == 4


def test_linear_moments_spot_value():
    mom = linear_moments(RunsSpec(3, 2, 31, 0.75))
    assert mom.mean == pytest.approx(0.2373046875, abs=1e-15)
    a = 9 / 1024
    closed = 27 * a + (4 * 14 - 9 * 31) * a * a
    assert mom.variance == pytest.approx(closed, rel=1e-13)


probs_st = st.sampled_from([Fraction(1, 5), Fraction(1, 2), Fraction(3, 4), Fraction(2, 3)])


@settings(max_examples=40, deadline=None)
@given(k1=st.integers(1, 3), k2=st.integers(1, 3), n=st.integers(1, 11), p=probs_st)
def test_linear_moments_match_enumeration(k1, k2, n, p):
    mean, var = mean_var(enumerate_law(k1, k2, n, p))
    mom = linear_moments(RunsSpec(k1, k2, n, p))
    assert mom.mean == mean and mom.variance == var


@settings(max_examples=30, deadline=None)
@given(k1=st.integers(1, 2), k2=st.integers(1, 2), n=st.integers(4, 10),
       seed=st.integers(0, 10 ** 6))
def test_nonidentical_moments_match_enumeration(k1, k2, n, seed):
    import random
    rng = random.Random(seed)
    probs = [Fraction(rng.randint(1, 9), 10) for _ in range(n)]
    spec = RunsSpec(k1, k2, n, probs)
    mom = linear_moments(spec)
    assert (mom.mean, mom.variance) == mean_var(enumerate_law(k1, k2, n, probs))
    if n >= 2 * (k1 + k2) - 1:
        mom = circular_moments(spec, "cyclic")
        assert (mom.mean, mom.variance) == mean_var(enumerate_law(k1, k2, n, probs, circular=True))


def test_circular_pair_conventions():
    s = RunsSpec(3, 2, 31, 0.75)
    a = 9 / 1024
    cyc = circular_moments(s, "cyclic")
    assert cyc.variance == pytest.approx(31 * a * (1 - 9 * a), rel=1e-13)
    lin = circular_moments(s, "linear")
    assert lin.variance == pytest.approx(0.252454, abs=5e-7)
    with pytest.raises(ValueError):
        circular_moments(s, "other")
