import os
import sys

import pytest

sys.path.append(os.path.dirname(os.path.abspath(__file__)))

from core.numerics import QuadratureSpec
from core.outage import OutageSettings

# Tolerâncias folgadas para manter a suíte rápida
FAST_SETTINGS_YAML = """
numerics:
  moments: {rel_tol: 1.0e-9, abs_tol: 1.0e-12, max_subdivisions: 200}
  outer: {rel_tol: 1.0e-4, abs_tol: 1.0e-7, max_subdivisions: 200}
  inner: {rel_tol: 1.0e-5, abs_tol: 1.0e-8, max_subdivisions: 200}
capacity:
  grid_points: 30
  tolerance: 1.0e-3
  variant: xi-printed
simulation:
  trials: 400
  seed: 7
  workers: 1
  chunk_size: 100
  tail_fraction: 1.0e-2
  max_window_radius: 6.0
validation:
  taus: [0.1, 0.3]
  gammas: [0.1, 0.3]
  capacity_gamma: 0.15
  band_grid_points: 9
  band_conditions: [[1, 0.5], [2, 0.3]]
  sigma: 4.0
"""


def pytest_configure(config):
    config.addinivalue_line("markers", "slow: testes longos (quadraturas BARSS ou Monte Carlo grande)")


@pytest.fixture
def fast_settings() -> OutageSettings:
    return OutageSettings(
        outer=QuadratureSpec(rel_tol=1e-4, abs_tol=1e-7),
        inner=QuadratureSpec(rel_tol=1e-5, abs_tol=1e-8),
        grid_points=30,
        capacity_tol=1e-3
    )


@pytest.fixture
def settings_file(tmp_path):
    path = tmp_path / "hcn_settings.yml"
    path.write_text(FAST_SETTINGS_YAML, encoding="utf-8")
    return path
