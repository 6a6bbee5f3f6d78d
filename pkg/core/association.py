"""
Estatísticas de associação BARSS
================================

- Probabilidade de associação p_k por camada (integral segmentada por limiares)
- Densidade condicional f_k(u) da distância de serviço dado A = k
- Forma fechada para duas camadas

A tabela de limiares ordena a_i = (β_i P_i / β_k P_k)·G_i(0) em ordem
decrescente (sentinelas a_0 = 0 e a_{K+1} = +inf) e converte cada limiar em
um raio r_i = G_k^{-1}(a_{π(i)}). No segmento [r_{j-1}, r_j) as camadas
π(1..j-1) competem com a camada k.
"""

import math
from dataclasses import dataclass
from typing import Callable, Iterator, List, Optional, Tuple

import numpy as np
from scipy.integrate import cumulative_trapezoid

from core.errors import InvalidConfigurationError, InvalidInputError, UndefinedConditionalError
from core.logger import setup_logger
from core.model import NetworkConfig, path_loss_inverse
from core.numerics import DEFAULT_QUADRATURE, QuadratureSpec, integrate_finite, integrate_semi_infinite

logger = setup_logger("hcn.association")

DensityFn = Callable[[float], float]

CDF_GRID_POINTS = 4001


@dataclass(frozen=True)
class BreakpointTable:
    """
    Tabela de limiares para a camada servidora k.

    order: índices das camadas em ordem decrescente de limiar, com as
    sentinelas representadas por None (primeira = +inf, última = 0).
    """
    tier: int
    order: Tuple[Optional[int], ...]
    thresholds: Tuple[float, ...]
    radii: Tuple[float, ...]

    def segments(self) -> Iterator[Tuple[float, float, Tuple[int, ...]]]:
        """(r_{j-1}, r_j, camadas ativas) para j = 1..K, pulando segmentos vazios"""
        for j in range(1, len(self.radii)):
            lo, hi = self.radii[j - 1], self.radii[j]
            if hi <= lo:
                continue
            active = tuple(i for i in self.order[1:j] if i is not None)
            yield lo, hi, active

    def segment_of(self, u: float) -> Tuple[int, ...]:
        """Camadas ativas no segmento que contém u"""
        for lo, hi, active in self.segments():
            if lo <= u < hi:
                return active
        raise InvalidInputError(f"Distância {u} fora dos segmentos")


def breakpoints(cfg: NetworkConfig, k: int) -> BreakpointTable:
    if not 0 <= k < cfg.K:
        raise InvalidInputError(f"Camada {k} fora de [0, {cfg.K})")

    serving = cfg.tiers[k]
    candidates = [
        (tier.bias * tier.power / (serving.bias * serving.power) * tier.pathloss.peak, i)
        for i, tier in enumerate(cfg.tiers) if i != k
    ]
    # Empates resolvidos pelo índice original crescente
    candidates.sort(key=lambda item: (-item[0], item[1]))

    order: List[Optional[int]] = [None] + [i for _, i in candidates] + [None]
    thresholds = [math.inf] + [a for a, _ in candidates] + [0.0]
    radii = [path_loss_inverse(serving.pathloss, a) if not math.isinf(a) else 0.0 for a in thresholds]

    return BreakpointTable(tier=k, order=tuple(order), thresholds=tuple(thresholds), radii=tuple(radii))


def _void_exponent(cfg: NetworkConfig, k: int, u: float, active: Tuple[int, ...]) -> float:
    """λ_k u² + Σ λ_i Q_i^{(k)}(u)² para as camadas ativas"""
    total = cfg.tiers[k].intensity * u * u
    for i in active:
        q = cfg.exclusion_radius(k, i, u)
        total += cfg.tiers[i].intensity * q * q
    return total


def _unnormalized_density(cfg: NetworkConfig, k: int, u: float, active: Tuple[int, ...]) -> float:
    return 2.0 * math.pi * cfg.tiers[k].intensity * u * math.exp(-math.pi * _void_exponent(cfg, k, u, active))


def integrate_segments(
    table: BreakpointTable,
    integrand: Callable[[float, Tuple[int, ...]], float],
    spec: QuadratureSpec = DEFAULT_QUADRATURE
) -> float:
    """Soma das integrais por segmento; o último usa o núcleo semi-infinito"""
    total = 0.0
    for lo, hi, active in table.segments():
        fn = (lambda u, a=active: integrand(u, a))
        if math.isinf(hi):
            total += integrate_semi_infinite(fn, lo, spec).value
        else:
            total += integrate_finite(fn, lo, hi, spec).value
    return total


def association_probability(
    cfg: NetworkConfig,
    k: int,
    spec: QuadratureSpec = DEFAULT_QUADRATURE,
    table: Optional[BreakpointTable] = None
) -> float:
    """p_k = 2πλ_k Σ_j ∫_{r_{j-1}}^{r_j} u·exp(-π(λ_k u² + Σ λ_π(i) Q²)) du"""
    table = table or breakpoints(cfg, k)
    value = integrate_segments(
        table,
        lambda u, active: _unnormalized_density(cfg, k, u, active),
        spec
    )
    return min(1.0, max(0.0, value))


def conditional_distance_pdf(
    cfg: NetworkConfig,
    k: int,
    u: float,
    p_star: Optional[float] = None,
    table: Optional[BreakpointTable] = None
) -> float:
    """
    f_k(u): densidade da distância de serviço dado A = k.

    Raises:
        UndefinedConditionalError: se p_k = 0
    """
    if u < 0:
        raise InvalidInputError(f"Distância deve ser >= 0, recebido {u}")
    p_star = association_probability(cfg, k) if p_star is None else p_star
    if not p_star > 0:
        raise UndefinedConditionalError(f"p_{k + 1} = 0: densidade condicional indefinida")
    table = table or breakpoints(cfg, k)
    return _unnormalized_density(cfg, k, u, table.segment_of(u)) / p_star


@dataclass(frozen=True)
class AssociationStats:
    """p_k para todas as camadas e avaliadores de f_k"""
    cfg: NetworkConfig
    p_star: Tuple[float, ...]
    tables: Tuple[BreakpointTable, ...]

    def pdf(self, k: int, u: float) -> float:
        return conditional_distance_pdf(self.cfg, k, u, p_star=self.p_star[k], table=self.tables[k])

    def density(self, k: int) -> DensityFn:
        return lambda u: self.pdf(k, u)

    def cdf(self, k: int, u_max: float, points: int = CDF_GRID_POINTS) -> Callable[[np.ndarray], np.ndarray]:
        """
        F_k(u) = ∫_0^u f_k tabelada por trapézios em [0, u_max].

        Os raios de quebra entram na grade, logo nenhum trapézio cruza um
        segmento. Acima de u_max devolve F_k(u_max).
        """
        if not u_max > 0:
            raise InvalidInputError(f"u_max deve ser > 0, recebido {u_max}")
        interior = [r for r in self.tables[k].radii if 0.0 < r < u_max]
        grid = np.unique(np.concatenate([np.linspace(0.0, u_max, points), interior]))
        f_k = self.density(k)
        values = np.array([f_k(float(u)) for u in grid])
        table = np.minimum(cumulative_trapezoid(values, grid, initial=0.0), 1.0)
        return lambda x: np.interp(np.asarray(x, dtype=float), grid, table)

    def weighted_density(self, k: int, u: float, active: Tuple[int, ...]) -> float:
        """p_k·f_k(u) com camadas ativas já conhecidas (evita busca do segmento)"""
        return _unnormalized_density(self.cfg, k, u, active)


def association_stats(cfg: NetworkConfig, spec: QuadratureSpec = DEFAULT_QUADRATURE) -> AssociationStats:
    tables = tuple(breakpoints(cfg, k) for k in range(cfg.K))
    p_star = tuple(association_probability(cfg, k, spec, tables[k]) for k in range(cfg.K))

    logger.info(
        "Probabilidades de associação calculadas",
        extra={"scenario": cfg.name, "p_star": list(p_star), "sum": math.fsum(p_star)}
    )
    return AssociationStats(cfg=cfg, p_star=p_star, tables=tables)


def relabel_for_two_tier(cfg: NetworkConfig) -> NetworkConfig:
    """Troca a ordem das camadas para que β₁P₁G₁(0) <= β₂P₂G₂(0)"""
    if cfg.K != 2:
        raise InvalidConfigurationError(f"Forma fechada exige K = 2, recebido K = {cfg.K}")
    t1, t2 = cfg.tiers
    if t1.bias * t1.power * t1.pathloss.peak <= t2.bias * t2.power * t2.pathloss.peak:
        return cfg
    return cfg.reordered((1, 0))


def two_tier_pdfs(
    cfg: NetworkConfig,
    spec: QuadratureSpec = DEFAULT_QUADRATURE
) -> Tuple[DensityFn, DensityFn]:
    """
    Formas fechadas (f_1, f_2) para K = 2 com β₁P₁G₁(0) <= β₂P₂G₂(0).

    Raises:
        InvalidConfigurationError: K != 2 ou ordem das camadas invertida
    """
    if cfg.K != 2:
        raise InvalidConfigurationError(f"Forma fechada exige K = 2, recebido K = {cfg.K}")
    t1, t2 = cfg.tiers
    if t1.bias * t1.power * t1.pathloss.peak > t2.bias * t2.power * t2.pathloss.peak:
        raise InvalidConfigurationError(
            "β₁P₁G₁(0) > β₂P₂G₂(0): use relabel_for_two_tier para reordenar as camadas"
        )

    lam1, lam2 = t1.intensity, t2.intensity
    u_star = path_loss_inverse(t2.pathloss, t1.bias * t1.power / (t2.bias * t2.power) * t1.pathloss.peak)
    p1 = association_probability(cfg, 0, spec)
    p2 = association_probability(cfg, 1, spec)

    def f1(u: float) -> float:
        if u < 0:
            return 0.0
        q2 = cfg.exclusion_radius(0, 1, u)
        return 2.0 * math.pi * lam1 / p1 * u * math.exp(-math.pi * (lam1 * u * u + lam2 * q2 * q2))

    def f2(u: float) -> float:
        if u < 0:
            return 0.0
        if u < u_star:
            return 2.0 * math.pi * lam2 / p2 * u * math.exp(-math.pi * lam2 * u * u)
        q1 = cfg.exclusion_radius(1, 0, u)
        return 2.0 * math.pi * lam2 / p2 * u * math.exp(-math.pi * (lam2 * u * u + lam1 * q1 * q1))

    return f1, f2
