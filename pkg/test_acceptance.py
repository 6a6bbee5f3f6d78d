import os
import sys

import pytest

sys.path.append(os.path.dirname(os.path.dirname(os.path.abspath(__file__))))

from config.scenario_config import HCNSettings
from conftest import FAST_SETTINGS_YAML
from pipe.sweep_pipeline import SweepPipeline
from pipe.validation_pipeline import run_acceptance_grid

# Varreduras reduzidas: κ ∈ {0.5, 1, 2} e γ em 4 pontos
ACCEPTANCE_YAML = FAST_SETTINGS_YAML + """
sweeps:
  fig1:
    kappa_min: 0.5
    kappa_max: 2.0
    kappa_points: 3
    alphas: [3.0, 4.0]
    tiers: [2, 3]
    gamma: 0.15
    variant: xi-campbell
  fig2:
    gamma_min: 0.05
    gamma_max: 0.5
    gamma_points: 4
    kappas: [0.5, 1.0, 2.0]
    alpha: 3.0
    tiers: 2
    variant: xi-campbell
"""

pytestmark = pytest.mark.slow


@pytest.fixture(scope="module")
def acceptance_settings(tmp_path_factory) -> HCNSettings:
    path = tmp_path_factory.mktemp("acceptance") / "hcn_settings.yml"
    path.write_text(ACCEPTANCE_YAML, encoding="utf-8")
    return HCNSettings(path)


@pytest.fixture(scope="module")
def fig1_summary(acceptance_settings, tmp_path_factory):
    results = tmp_path_factory.mktemp("results")
    return SweepPipeline(acceptance_settings, results_dir=str(results), progress=False).run("fig1")


@pytest.fixture(scope="module")
def fig2_summary(acceptance_settings, tmp_path_factory):
    results = tmp_path_factory.mktemp("results")
    return SweepPipeline(acceptance_settings, results_dir=str(results), progress=False).run("fig2")


@pytest.mark.parametrize("alpha,claim", [(3.0, 0.06), (4.0, 0.15)])
@pytest.mark.parametrize("n_tiers", [2, 3])
def test_capacity_gap_within_claim(fig1_summary, alpha, claim, n_tiers):
    scenario = fig1_summary["scenarios"][f"fig_{n_tiers}tier_a{alpha:g}_k1"]
    print(f"{n_tiers} camadas α={alpha:g}: gap máximo {scenario['max_gap']:.4f}")
    assert fig1_summary["variant"] == "xi-campbell"
    assert scenario["gap_claim"] == claim
    assert scenario["max_gap"] <= claim
    assert scenario["gap_within_claim"]


def test_three_tiers_tighten_the_gap(fig1_summary):
    assert fig1_summary["three_tier_tighter"] == {"alpha_3": True, "alpha_4": True}


def test_heuristic_capacity_non_increasing_in_kappa(fig1_summary):
    for name, scenario in fig1_summary["scenarios"].items():
        assert scenario["heuristic_non_increasing"], name
    assert fig1_summary["passed"]


def test_capacity_bounds_non_decreasing_in_gamma(fig2_summary):
    assert len(fig2_summary["scenarios"]) == 3
    for name, scenario in fig2_summary["scenarios"].items():
        assert scenario["lower_non_decreasing"], name
        assert scenario["upper_non_decreasing"], name
    assert fig2_summary["passed"]


def test_acceptance_grid_contains_simulation(tmp_path):
    """2 e 3 camadas × κ ∈ {0.5, 1, 2} × τ ∈ {0.1, 0.3, 0.6}, mais capacidade"""
    report = run_acceptance_grid(seed=11, trials=4000, settings=HCNSettings(), output=tmp_path / "grid.json")
    names = [c.name for c in report.checks]
    containment = [n for n in names if "/outage_containment_tau_" in n]
    capacity = [n for n in names if "/capacity_containment_gamma_" in n]
    print(f"{len(containment)} pares (cenário, τ); falhas: {[c.name for c in report.failed]}")

    assert len(containment) == 18
    assert len(capacity) == 6
    assert report.passed
    assert (tmp_path / "grid.json").exists()
