"""Exact distributions of (k1,k2)-runs in Bernoulli trials and pseudo-binomial
approximation bounds."""

from .bounds import (BoundReport, bound_barbour, bound_cor41, bound_cor42, bound_gs_1k,
                     bound_poisson, bound_prop24, bound_runs11, bound_thm21, bound_thm22,
                     bound_thm31, bound_thm32, bound_thm33, psi, v_sequence)
from .exact import (Pmf, check_pgf_relations, pgf_eval, pmf_bruteforce, pmf_closed_form,
                    pmf_dp, pmf_recursive, waiting_time)
from .matching import (Convention, MatchResult, match_one_fix_alpha, match_one_fix_p,
                       match_two_iid, match_two_M)
from .model import RunsSpec, circular_moments, linear_moments, pattern_prob
from .pseudobinomial import PseudoBinomial, delta_g_bound, pb_moments, pb_pmf
from .tvlab import TvReport, compare_all, simulate_counts, tv_distance, tv_shift

__version__ = "0.1.0"

__all__ = [
    "BoundReport", "Convention", "MatchResult", "Pmf", "PseudoBinomial", "RunsSpec", "TvReport",
    "bound_barbour", "bound_cor41", "bound_cor42", "bound_gs_1k", "bound_poisson", "bound_prop24",
    "bound_runs11", "bound_thm21", "bound_thm22", "bound_thm31", "bound_thm32", "bound_thm33",
    "check_pgf_relations", "circular_moments", "compare_all", "delta_g_bound", "linear_moments",
    "match_one_fix_alpha", "match_one_fix_p", "match_two_M", "match_two_iid", "pattern_prob",
    "pb_moments", "pb_pmf", "pgf_eval", "pmf_bruteforce", "pmf_closed_form", "pmf_dp",
    "pmf_recursive", "psi", "simulate_counts", "tv_distance", "tv_shift", "v_sequence",
    "waiting_time",
]
