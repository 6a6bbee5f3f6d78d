"""
Modelo do cenário HCN
=====================

Camadas (tiers), perda de percurso limitada, desvanecimento e os parâmetros
escalares derivados usados pelos demais módulos.

Convenções:
- índices de camada começam em 0 na API Python
- G^{-1}(0) = +inf e G^{-1}(y) = 0 para y > G(0)
"""

import math
from dataclasses import dataclass, field, replace
from typing import Callable, Optional, Tuple

import numpy as np
from scipy import special

from core.errors import InvalidInputError

PATHLOSS_FAMILIES = ("inverse_power", "custom")
FADING_FAMILIES = ("nakagami", "rayleigh", "custom")

# Tolerância em distância para a inversão por bisseção
INVERSE_DISTANCE_TOL = 1e-12


@dataclass(frozen=True)
class PathLossModel:
    """
    Perda de percurso limitada, monótona não-crescente e contínua.

    family='inverse_power' usa G(x) = 1/(1 + x^alpha) com inversa fechada;
    family='custom' recebe gain_fn e inverte por bisseção.
    """
    alpha: float
    family: str = "inverse_power"
    gain_fn: Optional[Callable[[float], float]] = None

    def gain(self, t: float) -> float:
        if self.family == "inverse_power":
            if math.isinf(t):
                return 0.0
            return 1.0 / (1.0 + t ** self.alpha)
        return float(self.gain_fn(t))

    def gain_array(self, t: np.ndarray) -> np.ndarray:
        """Versão vetorizada usada pelo simulador"""
        t = np.asarray(t, dtype=float)
        if self.family == "inverse_power":
            return 1.0 / (1.0 + np.power(t, self.alpha))
        return np.vectorize(self.gain_fn, otypes=[float])(t)

    @property
    def peak(self) -> float:
        """G(0)"""
        return self.gain(0.0)

    def inverse(self, y: float) -> float:
        return path_loss_inverse(self, y)


def path_loss_inverse(model: PathLossModel, y: float) -> float:
    """
    Inversa generalizada inf{x >= 0 : G(x) = y}.

    Returns:
        0 se y > G(0); +inf se y == 0; a distância caso contrário
    """
    if y < 0 or math.isnan(y):
        raise InvalidInputError(f"Ganho deve ser >= 0, recebido {y}")
    if y == 0:
        return math.inf

    peak = model.peak
    if y >= peak:
        return 0.0

    if model.family == "inverse_power":
        return ((1.0 - y) / y) ** (1.0 / model.alpha)

    # Bisseção: menor x com G(x) <= y (igual a inf{G(x) = y} por continuidade)
    lo, hi = 0.0, 1.0
    while model.gain(hi) > y:
        lo, hi = hi, hi * 2.0
        if hi > 1e300:
            return math.inf
    while hi - lo > INVERSE_DISTANCE_TOL * max(1.0, hi):
        mid = 0.5 * (lo + hi)
        if model.gain(mid) <= y:
            hi = mid
        else:
            lo = mid
    return hi


def nakagami_moments(m: float) -> Tuple[float, float, float]:
    """Momentos do ganho de potência Gamma(m, 1/m): (1, (m+1)/m, (m+1)(m+2)/m²)"""
    if not m > 0:
        raise InvalidInputError(f"Parâmetro de forma m deve ser > 0, recebido {m}")
    return 1.0, (m + 1.0) / m, (m + 1.0) * (m + 2.0) / (m * m)


@dataclass(frozen=True)
class FadingModel:
    """
    Desvanecimento de potência: densidade q(h), momentos e amostrador.

    Para family='custom' devem ser informados density_fn, sampler_fn e moments;
    a consistência é conferida em utils.validation.
    """
    family: str = "nakagami"
    m: float = 1.0
    density_fn: Optional[Callable[[float], float]] = None
    sampler_fn: Optional[Callable[[np.random.Generator, int], np.ndarray]] = None
    custom_moments: Optional[Tuple[float, float, float]] = None

    @property
    def shape(self) -> float:
        return 1.0 if self.family == "rayleigh" else self.m

    @property
    def moments(self) -> Tuple[float, float, float]:
        if self.family == "custom":
            return tuple(self.custom_moments)  # type: ignore[arg-type]
        return nakagami_moments(self.shape)

    @property
    def m_h(self) -> float:
        return self.moments[0]

    @property
    def m_h2(self) -> float:
        return self.moments[1]

    @property
    def m_h3(self) -> float:
        return self.moments[2]

    def pdf(self, h: float) -> float:
        if h < 0:
            return 0.0
        if self.family == "custom":
            return float(self.density_fn(h))
        m = self.shape
        if h == 0.0:
            if m < 1.0:
                return math.inf
            return m if m == 1.0 else 0.0
        return math.exp(m * math.log(m) + (m - 1.0) * math.log(h) - m * h - math.lgamma(m))

    def cdf(self, h: float) -> float:
        if h <= 0:
            return 0.0
        if self.family == "custom":
            from core.numerics import integrate_finite
            return min(1.0, integrate_finite(self.pdf, 0.0, h).value)
        return float(special.gammainc(self.shape, self.shape * h))

    def quantile(self, p: float) -> float:
        if not 0.0 < p < 1.0:
            raise InvalidInputError(f"p deve estar em (0, 1), recebido {p}")
        if self.family == "custom":
            from core.numerics import bisect_monotone
            hi = 1.0
            while self.cdf(hi) < p:
                hi *= 2.0
            return bisect_monotone(self.cdf, p, 0.0, hi, tol=1e-10).value
        return float(special.gammaincinv(self.shape, p) / self.shape)

    def sample(self, rng: np.random.Generator, size: int) -> np.ndarray:
        if self.family == "custom":
            return np.asarray(self.sampler_fn(rng, size), dtype=float)
        m = self.shape
        return rng.gamma(shape=m, scale=1.0 / m, size=size)


@dataclass(frozen=True)
class TierConfig:
    """Camada k: potência P (W), intensidade λ (BS/área), viés β, G_k, q_k"""
    power: float
    intensity: float
    pathloss: PathLossModel
    fading: FadingModel
    bias: float = 1.0

    def scaled(self, kappa: float) -> "TierConfig":
        return replace(self, intensity=self.intensity * kappa)


@dataclass(frozen=True)
class NetworkConfig:
    """Lista ordenada de camadas + ruído N0 + ganho de processamento PG"""
    tiers: Tuple[TierConfig, ...]
    noise: float = 0.0
    processing_gain: float = 1.0
    name: str = field(default="scenario", compare=False)

    @property
    def K(self) -> int:
        return len(self.tiers)

    def snr(self, k: int) -> float:
        """SNR_k = P_k/N0 (+inf quando N0 = 0)"""
        if self.noise == 0:
            return math.inf
        return self.tiers[k].power / self.noise

    def inverse_snr(self, k: int) -> float:
        """SNR_k^{-1}; exatamente 0 no regime limitado por interferência"""
        if self.noise == 0:
            return 0.0
        return self.noise / self.tiers[k].power

    def exclusion_threshold(self, k: int, i: int, r: float) -> float:
        """Argumento (β_k P_k / β_i P_i)·G_k(r) de Q_i^{(k)}(r)"""
        tier_k, tier_i = self.tiers[k], self.tiers[i]
        return (tier_k.bias * tier_k.power) / (tier_i.bias * tier_i.power) * tier_k.pathloss.gain(r)

    def exclusion_radius(self, k: int, i: int, r: float) -> float:
        """Q_i^{(k)}(r) = G_i^{-1}((β_k P_k / β_i P_i)·G_k(r))"""
        if i == k:
            return r
        return path_loss_inverse(self.tiers[i].pathloss, self.exclusion_threshold(k, i, r))

    def scale_intensities(self, kappa: float) -> "NetworkConfig":
        if not kappa > 0:
            raise InvalidInputError(f"kappa deve ser > 0, recebido {kappa}")
        return replace(self, tiers=tuple(t.scaled(kappa) for t in self.tiers))

    def reordered(self, order: Tuple[int, ...]) -> "NetworkConfig":
        return replace(self, tiers=tuple(self.tiers[i] for i in order))
