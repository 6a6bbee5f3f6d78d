import math
import os
import sys
from dataclasses import replace

import numpy as np
import pytest

sys.path.append(os.path.dirname(os.path.dirname(os.path.abspath(__file__))))

from config.scenario_config import figure_preset
from core.errors import InvalidInputError
from core.interference import InterferenceMoments
from core.model import FadingModel, NetworkConfig, PathLossModel, TierConfig
from core.outage import (
    BarssOutageEvaluator,
    Bounds,
    OutageQuery,
    bounds_from_coverage,
    capacity_ceiling,
    conditional_capacity_bounds,
    conditional_outage_bounds,
    fading_threshold,
    invert_outage_curves,
    monotone_envelopes,
    zeta,
)
from core.numerics import DEFAULT_QUADRATURE


def single_tier(noise: float = 0.0) -> NetworkConfig:
    tier = TierConfig(power=1.0, intensity=1.0, pathloss=PathLossModel(alpha=3.0), fading=FadingModel(family="rayleigh"))
    return NetworkConfig(tiers=(tier,), noise=noise, name="single")


def test_zeta_and_fading_threshold():
    moments = InterferenceMoments(mean=0.5, variance=0.25, xi=0.0)
    cfg = single_tier()

    assert zeta(cfg, 0, 1.0, math.log(2.0), 0.0, moments) == pytest.approx(1.0)
    assert zeta(cfg, 0, 1.0, 0.0, 0.0, moments) == math.inf
    assert fading_threshold(cfg, 0, 0.5, 1.0) == 0.0

    noisy = single_tier(noise=0.5)
    # (e^τ - 1)·SNR⁻¹/G(1) = 1·0.5/0.5
    assert fading_threshold(noisy, 0, math.log(2.0), 1.0) == pytest.approx(1.0)


def test_query_validation():
    with pytest.raises(InvalidInputError):
        OutageQuery(tau=-0.1)
    with pytest.raises(InvalidInputError):
        OutageQuery(gamma=1.0)
    with pytest.raises(InvalidInputError):
        OutageQuery(gamma=0.0)


def test_bounds_container():
    bounds = bounds_from_coverage(0.8, 0.6)
    assert bounds.lower == pytest.approx(0.2)
    assert bounds.upper == pytest.approx(0.4)
    assert bounds.heuristic == pytest.approx(0.3)

    with pytest.raises(ArithmeticError):
        Bounds(lower=0.5, upper=0.4)


def test_conditional_outage_zero_rate(fast_settings):
    cfg = figure_preset(3)
    bounds = conditional_outage_bounds(cfg, 2, 0.3, 0.0, settings=fast_settings)
    assert (bounds.lower, bounds.upper) == (0.0, 0.0)


def test_conditional_outage_sandwich(fast_settings):
    cfg = figure_preset(3)
    for tau in (0.05, 0.3, 1.0):
        bounds = conditional_outage_bounds(cfg, 2, 0.3, tau, settings=fast_settings)
        print(f"τ={tau}: [{bounds.lower:.4f}, {bounds.upper:.4f}]")
        assert 0.0 <= bounds.lower <= bounds.upper <= 1.0


def test_xi_override_collapses_bounds(fast_settings):
    cfg = figure_preset(2)
    exact = replace(fast_settings, xi_override=0.0)
    bounds = conditional_outage_bounds(cfg, 1, 0.5, 0.4, settings=exact)
    assert bounds.lower == bounds.upper


def test_explicit_exclusions_match_barss_default(fast_settings):
    cfg = figure_preset(2)
    implicit = conditional_outage_bounds(cfg, 1, 1.0, 0.3, settings=fast_settings)
    explicit = conditional_outage_bounds(
        cfg, 1, 1.0, 0.3, exclusions=(7.0 ** (1.0 / 3.0), 1.0), settings=fast_settings
    )
    assert explicit.lower == pytest.approx(implicit.lower, abs=1e-9)
    assert explicit.upper == pytest.approx(implicit.upper, abs=1e-9)


def test_monotone_envelopes():
    lower, upper = monotone_envelopes(np.array([0.1, 0.3, 0.2, 0.5]), np.array([0.2, 0.5, 0.4, 0.6]))
    assert lower.tolist() == pytest.approx([0.1, 0.2, 0.2, 0.5])
    assert upper.tolist() == pytest.approx([0.2, 0.5, 0.5, 0.6])


def test_invert_outage_curves_synthetic():
    """lower(τ) = τ/4 e upper(τ) = τ/2: capacidade em γ = 0.25 fica em [0.5, 1.0]"""
    curve = lambda t: Bounds(lower=min(1.0, t / 4.0), upper=min(1.0, t / 2.0))
    bounds = invert_outage_curves(curve, 0.25, tau_max=4.0, grid_points=50, tol=1e-6)

    assert bounds.lower == pytest.approx(0.5, abs=1e-5)
    assert bounds.upper == pytest.approx(1.0, abs=1e-5)
    assert not bounds.ceiling_hit
    assert not bounds.degenerate


def test_invert_outage_curves_ceiling():
    curve = lambda t: Bounds(lower=min(0.5, t / 4.0), upper=min(1.0, t / 2.0))
    bounds = invert_outage_curves(curve, 0.9, tau_max=4.0, grid_points=50, tol=1e-6)

    assert bounds.ceiling_hit
    assert bounds.upper == 4.0
    assert bounds.lower == pytest.approx(1.8, abs=1e-5)


def test_invert_outage_curves_degenerate():
    curve = lambda t: Bounds(lower=0.0, upper=0.5)
    bounds = invert_outage_curves(curve, 0.25, tau_max=4.0, grid_points=20, tol=1e-6)

    assert bounds.degenerate
    assert bounds.lower == 0.0
    assert bounds.upper == 4.0


def test_capacity_ceiling_single_tier():
    """log(1 + P·G(0)·PG·q_{0.9999}/E[I]) com q exponencial"""
    expected_mean = 4.0 * math.pi ** 2 / (3.0 * math.sqrt(3.0))
    expected = math.log1p(-math.log(1e-4) / expected_mean)
    assert capacity_ceiling(single_tier(), DEFAULT_QUADRATURE) == pytest.approx(expected, rel=1e-7)


def test_conditional_capacity_bounds(fast_settings):
    cfg = figure_preset(3)
    gamma = 0.15
    bounds = conditional_capacity_bounds(cfg, 2, 0.3, gamma, settings=fast_settings)
    tau_max = capacity_ceiling(cfg, fast_settings.moments)

    print(f"C_o({gamma}) ∈ [{bounds.lower:.4f}, {bounds.upper:.4f}], τ_max={tau_max:.3f}")
    assert 0.0 <= bounds.lower <= bounds.upper <= tau_max

    if not bounds.ceiling_hit:
        beyond = conditional_outage_bounds(cfg, 2, 0.3, bounds.upper + 0.05, settings=fast_settings)
        assert beyond.lower > gamma

    higher = conditional_capacity_bounds(cfg, 2, 0.3, 0.3, settings=fast_settings)
    assert higher.lower >= bounds.lower - fast_settings.capacity_tol
    assert higher.upper >= bounds.upper - fast_settings.capacity_tol


def test_barss_outage_bounds(fast_settings):
    evaluator = BarssOutageEvaluator(figure_preset(2), fast_settings)

    zero = evaluator.outage_bounds(0.0)
    assert (zero.lower, zero.upper) == (0.0, 0.0)

    low = evaluator.outage_bounds(0.1)
    high = evaluator.outage_bounds(1.0)
    print(f"τ=0.1: [{low.lower:.4f}, {low.upper:.4f}]  τ=1.0: [{high.lower:.4f}, {high.upper:.4f}]")
    assert 0.0 <= low.lower <= low.upper <= 1.0
    assert 0.0 <= high.lower <= high.upper <= 1.0
    assert high.lower >= low.lower
    assert high.upper >= low.upper


def test_barss_outage_curve_is_monotone(fast_settings):
    evaluator = BarssOutageEvaluator(figure_preset(2), fast_settings)
    lower, upper = evaluator.outage_curve([0.1, 0.3, 0.6])
    assert np.all(np.diff(lower) >= 0)
    assert np.all(np.diff(upper) >= 0)
    assert np.all(lower <= upper)


@pytest.mark.slow
def test_barss_capacity_bounds(fast_settings):
    evaluator = BarssOutageEvaluator(figure_preset(2), fast_settings)
    bounds = evaluator.capacity_bounds(0.15)

    print(f"C_o(0.15) ∈ [{bounds.lower:.4f}, {bounds.upper:.4f}] heurística={bounds.heuristic:.4f}")
    assert 0.0 <= bounds.lower <= bounds.heuristic <= bounds.upper
    assert bounds.upper <= capacity_ceiling(evaluator.cfg, fast_settings.moments)


def test_moment_cache_is_bounded(fast_settings):
    """O cache de momentos respeita cache_size sem mudar os limites"""
    small = BarssOutageEvaluator(figure_preset(2), fast_settings, cache_size=8)
    default = BarssOutageEvaluator(figure_preset(2), fast_settings, stats=small.stats)

    bounds = small.outage_bounds(0.3)
    reference = default.outage_bounds(0.3)
    info = small.cache_info()
    print(info)
    assert info.maxsize == 8
    assert info.currsize <= 8
    assert bounds.lower == pytest.approx(reference.lower, abs=1e-12)
    assert bounds.upper == pytest.approx(reference.upper, abs=1e-12)

    # Os dois sinais de V̂ reaproveitam os mesmos nós (k, r)
    assert default.cache_info().hits > 0
    assert default.cache_info().currsize <= default.cache_info().maxsize
