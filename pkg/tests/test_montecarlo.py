
import numpy as np
import pytest

from starfuse import (
    CostPair,
    NetworkConfig,
    ObservationModel,
    PhaseRegion,
    SimulationSpec,
    estimate_exponent,
    exact_risk,
    gaussian_q,
    optimal_exponent,
    simulate,
    threshold_from_belief,
    update_belief_count,
)
from conftest import random_config


def _config(pi0=0.3, q0=0.5, q_local=(0.5, 0.5), sigma=1.0, c_fa=1.0, c_md=1.0):
    return NetworkConfig(pi0, CostPair(c_fa, c_md), ObservationModel(sigma=sigma), q0, q_local)


class TestSimulate:
    def test_deterministic_across_chunk_sizes(self):
        cfg = _config(q0=0.7372, q_local=(0.396, 0.396))
        spec = SimulationSpec(cfg, trials=30_000, seed=99)
        results = {simulate(spec, chunk_size=c) for c in (1_000, 7_777, 30_000, 65_536)}
        assert len(results) == 1

    def test_same_seed_same_result(self):
        cfg = _config()
        spec = SimulationSpec(cfg, trials=10_000, seed=7)
        assert simulate(spec) == simulate(spec)
        other = simulate(SimulationSpec(cfg, trials=10_000, seed=8))
        assert other != simulate(spec)

    def test_risk_decomposition_identity(self):
        cfg = _config(c_fa=1.3, c_md=0.8)
        result = simulate(SimulationSpec(cfg, trials=50_000, seed=3))
        rebuilt = (1.3 * result.fa_count + 0.8 * result.md_count) / result.trials
        assert result.empirical_risk == rebuilt
        assert result.h0_trials + result.h1_trials == result.trials

    def test_benchmark_matches_exact_risk(self, benchmark_template):
        cfg = benchmark_template.tied(0.7372, 0.3960)
        result = simulate(SimulationSpec(cfg, trials=1_000_000, seed=12345))
        assert abs(result.empirical_risk - 0.1918) <= 3.0 * result.std_error

    def test_agreement_suite(self):
        """30 random configs: empirical risk within 4 standard errors."""
        rng = np.random.default_rng(71)
        for _ in range(30):
            cfg = random_config(rng, n_max=10)
            exact = exact_risk(cfg).r0
            result = simulate(SimulationSpec(cfg, trials=100_000,
                                             seed=int(rng.integers(2**32))))
            assert abs(result.empirical_risk - exact) <= 4.0 * result.std_error

    def test_silenced_locals_reduce_to_shifted_single_test(self):
        """Locals believing almost surely in hypothesis 0 always decide 0, so
        the fusion agent behaves like a lone tester at the all-zeros-updated
        threshold."""
        cfg = _config(q0=0.4, q_local=(1.0 - 1e-9, 1.0 - 1e-9))
        lam = threshold_from_belief(cfg.model, cfg.costs, update_belief_count(cfg, 0))
        p_fa = gaussian_q(lam / cfg.model.sigma)
        p_md = 1.0 - gaussian_q((lam - 1.0) / cfg.model.sigma)
        expected = cfg.costs.c_fa * cfg.pi0 * p_fa + cfg.costs.c_md * (1 - cfg.pi0) * p_md
        result = simulate(SimulationSpec(cfg, trials=200_000, seed=31))
        assert abs(result.empirical_risk - expected) <= 4.0 * result.std_error

    def test_one_sided_costs(self):
        """With a vanishing missed-detection cost, only false alarms count."""
        cfg = _config(pi0=0.999999, q0=0.5, q_local=(0.5, 0.5), c_md=1e-9)
        result = simulate(SimulationSpec(cfg, trials=100_000, seed=17))
        report = exact_risk(cfg)
        expected = cfg.costs.c_fa * cfg.pi0 * report.p_fa0
        assert result.empirical_risk == pytest.approx(expected, abs=4.0 * result.std_error + 1e-9)

    def test_validation(self):
        with pytest.raises(ValueError):
            SimulationSpec(_config(), trials=0, seed=1)
        with pytest.raises(ValueError):
            SimulationSpec(_config(), trials=10, seed=-1)


class TestEstimateExponent:
    def test_vanishing_region_fit(self, std_model, equal_costs):
        beta_hat, fit = estimate_exponent(0.3, equal_costs, std_model, 0.5, 0.5,
                                          n_list=range(5, 41, 5))
        assert beta_hat > 0.0
        assert fit.r_squared >= 0.98
        assert fit.region is PhaseRegion.RISK_VANISHES
        assert not fit.truncated

    def test_no_rule_beats_the_optimal_exponent(self, std_model, equal_costs):
        beta_star = optimal_exponent(std_model).beta_star
        beta_hat, _ = estimate_exponent(0.3, equal_costs, std_model, 0.5, 0.5,
                                        n_list=range(5, 41, 5))
        assert beta_hat <= beta_star + 0.02

    def test_positive_slope_in_all_three_regions(self, std_model, equal_costs):
        cases = [
            (0.5, 0.5, range(5, 41, 5), PhaseRegion.RISK_VANISHES),
            (0.9, 0.3, (3, 5, 8, 10, 12, 15), PhaseRegion.FALSE_ALARM_FLOOR),
            (0.1, 0.5, (5, 10, 15, 20, 30, 40), PhaseRegion.MISSED_DETECTION_FLOOR),
        ]
        for q0, q1, n_list, region in cases:
            beta_hat, fit = estimate_exponent(0.3, equal_costs, std_model, q0, q1, n_list)
            assert fit.region is region
            assert beta_hat > 0.0
            assert fit.r_squared >= 0.9

    def test_collapsed_tail_truncated_and_flagged(self, std_model, equal_costs):
        """Beyond size ~40 the false-alarm-floor excess hits float resolution."""
        beta_hat, fit = estimate_exponent(0.3, equal_costs, std_model, 0.9, 0.3,
                                          n_list=(5, 10, 15, 20, 60, 80))
        assert fit.truncated
        assert fit.n_used == (5, 10, 15, 20)
        assert beta_hat > 0.0

    def test_short_n_list_rejected(self, std_model, equal_costs):
        with pytest.raises(ValueError):
            estimate_exponent(0.3, equal_costs, std_model, 0.5, 0.5, n_list=(5, 10))

    def test_boundary_config_rejected(self, std_model, equal_costs):
        # Fusion belief bisected onto the sign change of the region test.
        q0_boundary = 0.6247676238784021
        with pytest.raises(ValueError):
            estimate_exponent(0.3, equal_costs, std_model, q0_boundary, 0.5,
                              n_list=(5, 10, 15))

    def test_simulation_fallback_used_beyond_exact_cap(self, std_model, equal_costs):
        beta_hat, fit = estimate_exponent(0.3, equal_costs, std_model, 0.5, 0.5,
                                          n_list=(5, 10, 15, 20), trials=50_000,
                                          seed=5, exact_max_n=12)
        assert beta_hat > 0.0
        exact_part, _ = estimate_exponent(0.3, equal_costs, std_model, 0.5, 0.5,
                                          n_list=(5, 10, 15, 20))
        assert beta_hat == pytest.approx(exact_part, abs=0.05)
