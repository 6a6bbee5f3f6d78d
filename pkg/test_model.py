import math
import os
import sys

import numpy as np
import pytest
from scipy import special

sys.path.append(os.path.dirname(os.path.dirname(os.path.abspath(__file__))))

from core.errors import InvalidInputError
from core.model import FadingModel, NetworkConfig, PathLossModel, TierConfig, nakagami_moments, path_loss_inverse
from core.numerics import integrate_semi_infinite
from simulation.metrics import OracleMetrics


def test_path_loss_inverse_examples():
    """Inversa generalizada de G(x) = 1/(1+x³)"""
    model = PathLossModel(alpha=3.0)

    assert path_loss_inverse(model, 0.5) == pytest.approx(1.0, rel=1e-12)
    assert path_loss_inverse(model, 2.0) == 0.0
    assert path_loss_inverse(model, 0.125) == pytest.approx(7.0 ** (1.0 / 3.0), rel=1e-12)
    assert path_loss_inverse(model, 0.0) == math.inf

    with pytest.raises(InvalidInputError):
        path_loss_inverse(model, -0.1)


def test_path_loss_inverse_custom_family():
    """Família customizada inverte por bisseção e bate com a forma fechada"""
    custom = PathLossModel(alpha=3.0, family="custom", gain_fn=lambda t: 1.0 / (1.0 + t ** 3))

    assert path_loss_inverse(custom, 0.125) == pytest.approx(7.0 ** (1.0 / 3.0), rel=1e-9)
    assert path_loss_inverse(custom, 1.5) == 0.0
    assert path_loss_inverse(custom, 0.0) == math.inf


def test_path_loss_round_trip():
    model = PathLossModel(alpha=4.0)
    for x in (0.01, 0.5, 1.0, 3.0, 40.0):
        assert path_loss_inverse(model, model.gain(x)) == pytest.approx(x, rel=1e-9)


def test_nakagami_moments():
    assert nakagami_moments(5.0) == pytest.approx((1.0, 1.2, 1.68))
    assert nakagami_moments(1.0) == pytest.approx((1.0, 2.0, 6.0))

    with pytest.raises(InvalidInputError):
        nakagami_moments(0.0)


def test_rayleigh_is_nakagami_one():
    assert FadingModel(family="rayleigh").moments == pytest.approx((1.0, 2.0, 6.0))
    assert FadingModel(family="rayleigh").pdf(0.7) == pytest.approx(math.exp(-0.7))


@pytest.mark.parametrize("m", [1.0, 2.5, 5.0])
def test_fading_pdf_normalization(m):
    fading = FadingModel(family="nakagami", m=m)
    assert integrate_semi_infinite(fading.pdf, 0.0).value == pytest.approx(1.0, abs=1e-8)


def test_fading_quantile_inverts_cdf():
    fading = FadingModel(family="nakagami", m=5.0)
    for p in (0.01, 0.5, 0.9999):
        assert fading.cdf(fading.quantile(p)) == pytest.approx(p, rel=1e-9)


def test_fading_sampler_matches_distribution():
    """Momentos amostrais e distância KS para Gamma(5, 1/5)"""
    fading = FadingModel(family="nakagami", m=5.0)
    draws = fading.sample(np.random.default_rng(11), 100_000)

    print(f"média={draws.mean():.4f} E[h²]={np.mean(draws ** 2):.4f}")
    assert draws.mean() == pytest.approx(1.0, abs=0.01)
    assert np.mean(draws ** 2) == pytest.approx(1.2, abs=0.02)

    distance = OracleMetrics.ks_distance(draws, lambda x: special.gammainc(5.0, 5.0 * np.asarray(x)))
    assert distance < 0.01


def test_network_derived_quantities():
    tier = TierConfig(power=2.0, intensity=0.5, pathloss=PathLossModel(alpha=3.0), fading=FadingModel())
    cfg = NetworkConfig(tiers=(tier,), noise=0.0, processing_gain=1.0)

    assert cfg.snr(0) == math.inf
    assert cfg.inverse_snr(0) == 0.0

    noisy = NetworkConfig(tiers=(tier,), noise=0.5)
    assert noisy.snr(0) == pytest.approx(4.0)
    assert noisy.inverse_snr(0) == pytest.approx(0.25)

    scaled = cfg.scale_intensities(4.0)
    assert scaled.tiers[0].intensity == pytest.approx(2.0)
    with pytest.raises(InvalidInputError):
        cfg.scale_intensities(0.0)


def test_exclusion_radius_uses_power_ratio():
    """Q_i^{(k)}(r) = G_i^{-1}((P_k/P_i)·G_k(r))"""
    g = PathLossModel(alpha=3.0)
    strong = TierConfig(power=4.0, intensity=0.1, pathloss=g, fading=FadingModel(m=5.0))
    weak = TierConfig(power=1.0, intensity=1.0, pathloss=g, fading=FadingModel(m=5.0))
    cfg = NetworkConfig(tiers=(strong, weak))

    # Servido pela camada fraca em r = 1: G_0^{-1}(0.5/4) = 7^(1/3)
    assert cfg.exclusion_radius(1, 0, 1.0) == pytest.approx(7.0 ** (1.0 / 3.0))
    # Servido pela forte em r = 1: limiar 2 > G(0), nenhuma exclusão
    assert cfg.exclusion_radius(0, 1, 1.0) == 0.0
    assert cfg.exclusion_radius(1, 1, 0.3) == 0.3
