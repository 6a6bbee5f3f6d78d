import math
import os
import sys

import pytest

sys.path.append(os.path.dirname(os.path.dirname(os.path.abspath(__file__))))

from config.scenario_config import figure_preset
from core.errors import DegenerateInterferenceError, InvalidInputError
from core.interference import (
    InterferenceMoments,
    XiVariant,
    barss_exclusions,
    berry_esseen_c,
    conditional_moments,
    gaussian_cdf_band,
    interference_moments,
    pathloss_moment_integral,
)
from core.model import FadingModel, NetworkConfig, PathLossModel, TierConfig

SQRT3 = math.sqrt(3.0)
G1 = 2.0 * math.pi / (3.0 * SQRT3)    # ∫ G·t
G2 = 2.0 * math.pi / (9.0 * SQRT3)    # ∫ G²·t
G3 = 4.0 * math.pi / (27.0 * SQRT3)   # ∫ G³·t


def single_tier(intensity: float = 1.0) -> NetworkConfig:
    tier = TierConfig(
        power=1.0,
        intensity=intensity,
        pathloss=PathLossModel(alpha=3.0),
        fading=FadingModel(family="rayleigh")
    )
    return NetworkConfig(tiers=(tier,), name="single")


def test_pathloss_moment_integrals_closed_form():
    model = PathLossModel(alpha=3.0)
    assert pathloss_moment_integral(model, 1, 0.0) == pytest.approx(G1, rel=1e-7)
    assert pathloss_moment_integral(model, 2, 0.0) == pytest.approx(G2, rel=1e-7)
    assert pathloss_moment_integral(model, 3, 0.0) == pytest.approx(G3, rel=1e-7)
    assert pathloss_moment_integral(model, 1, math.inf) == 0.0


def test_single_tier_campbell_moments():
    """λ = P = 1, Rayleigh, sem exclusão"""
    moments = interference_moments(single_tier(), (0.0,))

    print(f"E[I]={moments.mean:.6f} Var[I]={moments.variance:.6f} Ξ={moments.xi:.6f}")
    assert moments.mean == pytest.approx(2.0 * math.pi * G1, rel=1e-7)
    assert moments.mean == pytest.approx(7.5976, abs=1e-3)
    assert moments.variance == pytest.approx(2.0 * math.pi * 2.0 * G2, rel=1e-7)

    expected_xi = 6.0 * G3 / (math.sqrt(2.0 * math.pi) * (2.0 * G2) ** 1.5)
    assert moments.xi == pytest.approx(expected_xi, rel=1e-7)


def test_campbell_variant_rescales_xi():
    printed = interference_moments(single_tier(), (0.5,), XiVariant.PRINTED)
    campbell = interference_moments(single_tier(), (0.5,), XiVariant.CAMPBELL)

    assert campbell.mean == printed.mean
    assert campbell.variance == printed.variance
    assert campbell.xi == pytest.approx(printed.xi / (2.0 * math.pi) ** 1.5, rel=1e-12)


def test_doubling_intensity_scales_moments():
    base = interference_moments(single_tier(1.0), (0.3,))
    doubled = interference_moments(single_tier(2.0), (0.3,))

    assert doubled.mean == pytest.approx(2.0 * base.mean, rel=1e-12)
    assert doubled.variance == pytest.approx(2.0 * base.variance, rel=1e-12)
    assert doubled.xi == pytest.approx(base.xi / math.sqrt(2.0), rel=1e-12)


def test_exclusion_reduces_interference():
    near = interference_moments(single_tier(), (0.1,))
    far = interference_moments(single_tier(), (2.0,))
    assert far.mean < near.mean
    assert far.variance < near.variance


def test_all_tiers_excluded_is_degenerate():
    with pytest.raises(DegenerateInterferenceError):
        interference_moments(single_tier(), (math.inf,))

    cfg = figure_preset(2)
    with pytest.raises(DegenerateInterferenceError):
        interference_moments(cfg, (math.inf, math.inf))


def test_exclusion_vector_validation():
    with pytest.raises(InvalidInputError):
        interference_moments(single_tier(), (0.0, 0.0))
    with pytest.raises(InvalidInputError):
        interference_moments(single_tier(), (-1.0,))


def test_berry_esseen_c():
    assert berry_esseen_c(0.0) == 0.4785
    assert berry_esseen_c(10.0) == pytest.approx(31.935 / 1001.0)
    assert berry_esseen_c(-2.5) == berry_esseen_c(2.5)
    assert berry_esseen_c(math.inf) == 0.0


def test_gaussian_cdf_band():
    exact = InterferenceMoments(mean=1.0, variance=1.0, xi=0.0)
    lower, upper = gaussian_cdf_band(exact, 0.7)
    assert lower == upper

    loose = InterferenceMoments(mean=1.0, variance=1.0, xi=1.0)
    lower, upper = gaussian_cdf_band(loose, 0.0)
    assert lower == pytest.approx(0.0215)
    assert upper == pytest.approx(0.9785)

    # Faixa sempre dentro de [0, 1]
    lower, upper = gaussian_cdf_band(InterferenceMoments(mean=1.0, variance=1.0, xi=5.0), -1.0)
    assert 0.0 <= lower <= upper <= 1.0


def test_barss_exclusions_two_tier_preset():
    """P = (4, 1), α = 3"""
    cfg = figure_preset(2)

    served_by_weak = barss_exclusions(cfg, 1, 1.0)
    assert served_by_weak[0] == pytest.approx(7.0 ** (1.0 / 3.0))
    assert served_by_weak[1] == 1.0

    served_by_strong = barss_exclusions(cfg, 0, 1.0)
    assert served_by_strong == (1.0, 0.0)

    with pytest.raises(InvalidInputError):
        barss_exclusions(cfg, 2, 1.0)


def test_conditional_moments_xi_override():
    cfg = figure_preset(3)
    moments = conditional_moments(cfg, 2, 0.4, xi_override=0.0)
    plain = conditional_moments(cfg, 2, 0.4)

    assert moments.xi == 0.0
    assert moments.mean == plain.mean
    assert plain.xi > 0
