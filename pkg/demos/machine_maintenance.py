"""Daily machine usage over one to three years: how many times does a stretch
of k1 idle days followed by k2 busy days occur, and how well do the
approximations describe that count?

Run:  python demos/machine_maintenance.py
"""

import numpy as np

from runsapprox import bounds as B
from runsapprox.exact import pmf_dp
from runsapprox.matching import match_one_fix_alpha, match_two_iid, preset_alpha
from runsapprox.model import RunsSpec, linear_moments
from runsapprox.pseudobinomial import PseudoBinomial, pb_pmf
from runsapprox.tvlab import poisson_pmf, tv_distance

for (k1, k2), n in [((3, 4), 365), ((5, 2), 730)]:
    for q in (0.35, 0.55):
        spec = RunsSpec(k1, k2, n, 1 - q)
        law = pmf_dp(spec)
        mom = linear_moments(spec)
        two = match_two_iid(spec)
        one = match_one_fix_alpha(spec, preset_alpha(spec, "n/3k"))
        exact_two = tv_distance(law, pb_pmf(PseudoBinomial(two.alpha, two.p_check)))
        exact_poi = tv_distance(law, poisson_pmf(mom.mean))
        print(f"({k1},{k2}) n={n} q={q}: mean {mom.mean:.3f}, var {mom.variance:.3f}")
        print(f"    two-moment PB: exact d_TV {exact_two:.2e}, bound {B.bound_thm22(spec).value:.2e}")
        print(f"    Poisson:       exact d_TV {exact_poi:.2e}, bound {B.bound_poisson(spec).value:.2e}")
        print(f"    one-moment PB bound (alpha=n/3k) {B.bound_cor41(spec, one).value:.2e}")

# The count is under-dispersed, which is why a binomial-shaped target fits better
spec = RunsSpec(3, 4, 365, 0.65)
law = pmf_dp(spec)
print("\nP(count = m), m = 0..6:", np.round(law.to_array()[:7], 4))
