import numpy as np
import pytest

from starfuse import (
    CostPair,
    NetworkConfig,
    NetworkTemplate,
    ObservationModel,
    OptimizerSettings,
    grid_search,
    optimal_belief_sweep,
)


@pytest.fixture(scope="session")
def std_model():
    return ObservationModel(sigma=1.0)


@pytest.fixture(scope="session")
def equal_costs():
    return CostPair(1.0, 1.0)


@pytest.fixture(scope="session")
def benchmark_template(std_model, equal_costs):
    """pi0 = 0.3, two local agents, standard Gaussian noise, equal costs."""
    return NetworkTemplate(0.3, equal_costs, std_model, 2)


@pytest.fixture(scope="session")
def benchmark_optimum(benchmark_template):
    """Tied-belief grid optimum of the benchmark problem (computed once)."""
    settings = OptimizerSettings(tie_local_beliefs=True, grid_resolution=2e-4)
    return grid_search(benchmark_template, settings)


@pytest.fixture(scope="session")
def prior_sweep(benchmark_template):
    """Optimal tied beliefs across the prior grid, step 0.01 on [0.05, 0.95]."""
    pi0_values = np.round(np.arange(0.05, 0.9501, 0.01), 10)
    return pi0_values, optimal_belief_sweep(benchmark_template, pi0_values)


def random_config(rng, n_max=10, sigma_range=(0.5, 2.0), cost_range=(0.3, 3.0)):
    """Moderate random network for randomized agreement suites."""
    n = int(rng.integers(1, n_max + 1))
    return NetworkConfig(
        pi0=float(rng.uniform(0.1, 0.9)),
        costs=CostPair(float(rng.uniform(*cost_range)), float(rng.uniform(*cost_range))),
        model=ObservationModel(sigma=float(rng.uniform(*sigma_range))),
        q0=float(rng.uniform(0.05, 0.95)),
        q_local=tuple(float(q) for q in rng.uniform(0.05, 0.95, size=n)),
    )
