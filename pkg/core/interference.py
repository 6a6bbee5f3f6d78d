"""
Interferência agregada (AWI)
============================

Momentos de Campbell da interferência fora de discos de exclusão e a
aproximação Gaussiana tipo Berry-Esseen:

    |P(Î <= x) - Ψ(x)| <= Ξ·c(x),   c(x) = min(0.4785, 31.935/(1+|x|³))

Variante PRINTED: Ξ = S3 / (√(2π)·S2^{3/2}), com S2 e S3 sem o fator 2π.
Variante CAMPBELL: mesmo numerador, com a variância de Campbell (com 2π)
no denominador.
"""

import math
from dataclasses import dataclass
from enum import Enum
from functools import lru_cache
from typing import Optional, Sequence, Tuple, TypeVar

from core.errors import DegenerateInterferenceError, InvalidInputError
from core.logger import setup_logger
from core.model import NetworkConfig, PathLossModel
from core.numerics import DEFAULT_QUADRATURE, QuadratureSpec, integrate_semi_infinite, std_normal_cdf

logger = setup_logger("hcn.interference")

BE_CAP = 0.4785
BE_NUMERATOR = 31.935


class XiVariant(Enum):
    PRINTED = "xi-printed"
    CAMPBELL = "xi-campbell"


ExclusionVector = Tuple[float, ...]

# float ou np.ndarray (aritmética elemento a elemento)
Sample = TypeVar("Sample")


@dataclass(frozen=True)
class InterferenceMoments:
    """E[I], Var[I] e a constante Ξ para um vetor de exclusão"""
    mean: float
    variance: float
    xi: float

    def __post_init__(self):
        if self.mean < 0 or self.xi < 0:
            raise InvalidInputError("Momentos de interferência inválidos")
        if not self.variance > 0:
            raise DegenerateInterferenceError("Variância da interferência deve ser positiva")

    @property
    def std(self) -> float:
        return math.sqrt(self.variance)

    def standardize(self, value: Sample) -> Sample:
        """(I - E[I]) / σ; aceita escalares ou arrays"""
        return (value - self.mean) / self.std

    def with_xi(self, xi: float) -> "InterferenceMoments":
        return InterferenceMoments(self.mean, self.variance, xi)


@lru_cache(maxsize=200_000)
def pathloss_moment_integral(
    model: PathLossModel,
    power: int,
    d: float,
    spec: QuadratureSpec = DEFAULT_QUADRATURE
) -> float:
    """∫_d^∞ G(t)^power · t dt"""
    if math.isinf(d):
        return 0.0
    return integrate_semi_infinite(lambda t: model.gain(t) ** power * t, d, spec).value


def interference_moments(
    cfg: NetworkConfig,
    excl: Sequence[float],
    variant: XiVariant = XiVariant.PRINTED,
    spec: QuadratureSpec = DEFAULT_QUADRATURE
) -> InterferenceMoments:
    """
    Momentos da interferência com interferentes PPP fora de B(0, d_i).

    Raises:
        InvalidInputError: vetor com tamanho diferente de K ou raio negativo
        DegenerateInterferenceError: todas as camadas excluídas
    """
    if len(excl) != cfg.K:
        raise InvalidInputError(f"Vetor de exclusão com {len(excl)} entradas, esperado {cfg.K}")
    if any(d < 0 for d in excl):
        raise InvalidInputError(f"Raios de exclusão devem ser >= 0: {tuple(excl)}")

    mean_sum = 0.0
    second_sum = 0.0
    third_sum = 0.0
    for tier, d in zip(cfg.tiers, excl):
        if math.isinf(d):
            continue
        lam, p = tier.intensity, tier.power
        mean_sum += lam * p * tier.fading.m_h * pathloss_moment_integral(tier.pathloss, 1, float(d), spec)
        second_sum += lam * p ** 2 * tier.fading.m_h2 * pathloss_moment_integral(tier.pathloss, 2, float(d), spec)
        third_sum += lam * p ** 3 * tier.fading.m_h3 * pathloss_moment_integral(tier.pathloss, 3, float(d), spec)

    if not second_sum > 0:
        raise DegenerateInterferenceError(
            f"Interferência degenerada: todas as camadas excluídas ({tuple(excl)})"
        )

    mean = 2.0 * math.pi * mean_sum
    variance = 2.0 * math.pi * second_sum

    if variant is XiVariant.PRINTED:
        xi = third_sum / (math.sqrt(2.0 * math.pi) * second_sum ** 1.5)
    else:
        xi = third_sum / (math.sqrt(2.0 * math.pi) * variance ** 1.5)

    return InterferenceMoments(mean=mean, variance=variance, xi=xi)


def berry_esseen_c(x: float) -> float:
    """c(x) = min(0.4785, 31.935/(1+|x|³))"""
    if math.isinf(x):
        return 0.0
    return min(BE_CAP, BE_NUMERATOR / (1.0 + abs(x) ** 3))


def gaussian_cdf_band(moments: InterferenceMoments, x: float) -> Tuple[float, float]:
    """Faixa [max(0, Ψ(x) - Ξc(x)), min(1, Ψ(x) + Ξc(x))] para P(Î <= x)"""
    psi = std_normal_cdf(x)
    slack = moments.xi * berry_esseen_c(x)
    return max(0.0, psi - slack), min(1.0, psi + slack)


def barss_exclusions(cfg: NetworkConfig, k: int, r: float) -> ExclusionVector:
    """
    Raios Q_i^{(k)}(r) dados serviço BARSS pela camada k à distância r.

    Entrada k é o próprio r (nenhum interferente da camada k mais próximo).
    """
    if not 0 <= k < cfg.K:
        raise InvalidInputError(f"Camada {k} fora de [0, {cfg.K})")
    if r < 0:
        raise InvalidInputError(f"Distância deve ser >= 0, recebido {r}")
    return tuple(cfg.exclusion_radius(k, i, r) for i in range(cfg.K))


def conditional_moments(
    cfg: NetworkConfig,
    k: int,
    r: float,
    variant: XiVariant = XiVariant.PRINTED,
    spec: QuadratureSpec = DEFAULT_QUADRATURE,
    xi_override: Optional[float] = None
) -> InterferenceMoments:
    """Momentos com exclusões BARSS; Ξ_k(r) salvo se xi_override for dado"""
    moments = interference_moments(cfg, barss_exclusions(cfg, k, r), variant, spec)
    if xi_override is not None:
        return moments.with_xi(xi_override)
    return moments
