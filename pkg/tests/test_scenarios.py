"""End-to-end runs of every catalog scenario at reduced desk size.

The default parameter sets are exercised by the acceptance suite and the
CLI; here each runner is driven once with smaller models so the whole
catalog stays covered without repeating the heavy runs.
"""

import warnings

import pytest

from cpsglab.scenarios import CATALOG_BY_ID, run_scenario

REDUCED = {
    "thm34-holomorphic": {"k": 500, "n_hi": 10},
    "thm36-cp-rate": {"k": 500, "n_hi": 11},
    "thm41-no-log": {"k": 500, "n_hi": 11},
    "thm42-inverse-equiv": {"k": 2000, "t_hi": 13},
    "thm23-characterizations": {"k": 30000, "k_condition": 500},
    "prop35-lower-bound": {"k": 2048, "n_hi": 10},
    "sec44-lower-subsequence": {"k": 2000, "j_max": 40},
    "prop47-poly": {"k": 10000},
    "thm48-equivalence": {"k": 4000},
    "appendix-dcalc": {},
    "norms-selftest": {},
}


@pytest.mark.parametrize("scenario_id", sorted(REDUCED))
def test_scenario_passes_at_reduced_size(scenario_id):
    with warnings.catch_warnings():
        warnings.simplefilter("ignore")
        outcome = run_scenario(scenario_id, REDUCED[scenario_id], seed=11)
    assert outcome.verdict == "pass", outcome.payload
    for name, curve, info in outcome.curves:
        assert curve is not None
        assert len(curve.samples) >= 4


def test_reduced_map_covers_whole_catalog():
    assert sorted(REDUCED) == sorted(CATALOG_BY_ID)


def test_equivalence_scenario_reports_gap():
    with warnings.catch_warnings():
        warnings.simplefilter("ignore")
        outcome = run_scenario("thm48-equivalence", {"k": 4000}, seed=3)
    payload = outcome.payload
    assert payload["identity_max_discrepancy"] <= 1e-10
    assert abs(payload["beta_resolvent"] - 0.5) <= 0.08
    assert payload["equivalence_gap"] <= 0.08
