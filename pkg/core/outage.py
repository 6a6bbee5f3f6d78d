"""
Limites de probabilidade de outage e capacidade de outage
=========================================================

Política genérica (serviço fixo na camada k à distância r, interferentes PPP
fora de discos de exclusão) e política BARSS (média sobre p_k e f_k).

    1 - E[V⁺(H, τ, r)] <= P(τ-outage) <= 1 - E[V⁻(H, τ, r)]

V± = clamp(Ψ(ζ) ± Ξ·c(ζ))·𝟙{h >= (e^τ-1)·SNR⁻¹/G_k(r)}.
"""

import math
from dataclasses import dataclass
from functools import lru_cache
from typing import Callable, Dict, Optional, Sequence, Tuple

import numpy as np

from core.association import AssociationStats, association_stats, integrate_segments
from core.errors import InvalidInputError
from core.interference import (
    InterferenceMoments,
    XiVariant,
    berry_esseen_c,
    barss_exclusions,
    interference_moments,
)
from core.logger import setup_logger
from core.model import NetworkConfig
from core.numerics import (
    QuadratureSpec,
    bisect_monotone,
    integrate_semi_infinite,
    std_normal_cdf,
)

logger = setup_logger("hcn.outage")

CEILING_FADING_QUANTILE = 0.9999
CEILING_MEAN_FLOOR = 1e-12
# Nós (k, r) guardados por avaliador; uma curva de outage usa poucos milhares
MOMENT_CACHE_SIZE = 20_000


@dataclass(frozen=True)
class OutageSettings:
    """Parâmetros numéricos dos limites (carregados de config/hcn_settings.yml)"""
    outer: QuadratureSpec = QuadratureSpec(rel_tol=1e-6, abs_tol=1e-9)
    inner: QuadratureSpec = QuadratureSpec(rel_tol=1e-7, abs_tol=1e-10)
    moments: QuadratureSpec = QuadratureSpec(rel_tol=1e-9, abs_tol=1e-13)
    grid_points: int = 200
    capacity_tol: float = 1e-4
    variant: XiVariant = XiVariant.PRINTED
    xi_override: Optional[float] = None  # Ξ forçado (ex: 0 para Gaussiana exata)


DEFAULT_SETTINGS = OutageSettings()


@dataclass(frozen=True)
class Bounds:
    """(lower, upper, heurística = ponto médio) com flags de diagnóstico"""
    lower: float
    upper: float
    ceiling_hit: bool = False
    degenerate: bool = False

    def __post_init__(self):
        if self.lower > self.upper + 1e-12:
            raise ArithmeticError(f"Sanduíche violado: lower={self.lower} > upper={self.upper}")

    @property
    def heuristic(self) -> float:
        return 0.5 * (self.lower + self.upper)

    @property
    def gap(self) -> float:
        return self.upper - self.lower

    def to_dict(self) -> Dict[str, float]:
        return {
            "lower": self.lower,
            "upper": self.upper,
            "heuristic": self.heuristic,
            "ceiling_hit": self.ceiling_hit,
            "degenerate": self.degenerate
        }


@dataclass(frozen=True)
class OutageQuery:
    """Taxa alvo τ (nats/s/Hz), outage alvo γ, camada e distância de serviço"""
    tau: float = 0.0
    gamma: float = 0.15
    tier: Optional[int] = None
    distance: Optional[float] = None

    def __post_init__(self):
        if not self.tau >= 0:
            raise InvalidInputError(f"τ deve ser >= 0, recebido {self.tau}")
        if not 0 < self.gamma < 1:
            raise InvalidInputError(f"γ deve estar em (0, 1), recebido {self.gamma}")


def zeta(
    cfg: NetworkConfig,
    k: int,
    h: float,
    tau: float,
    r: float,
    moments: InterferenceMoments
) -> float:
    """ζ_k(h, τ, r) = (P_k (h G_k(r)/(e^τ-1) - SNR_k⁻¹)·PG - E[I]) / √Var[I]"""
    if tau == 0:
        return math.inf
    if tau < 0:
        raise InvalidInputError(f"τ deve ser >= 0, recebido {tau}")
    tier = cfg.tiers[k]
    margin = h * tier.pathloss.gain(r) / math.expm1(tau) - cfg.inverse_snr(k)
    return (tier.power * margin * cfg.processing_gain - moments.mean) / moments.std


def fading_threshold(cfg: NetworkConfig, k: int, tau: float, r: float) -> float:
    """Menor h fora do corte por ruído: (e^τ-1)·SNR_k⁻¹/G_k(r); 0 com N0 = 0"""
    inverse_snr = cfg.inverse_snr(k)
    if inverse_snr == 0 or tau == 0:
        return 0.0
    gain = cfg.tiers[k].pathloss.gain(r)
    if gain <= 0:
        return math.inf
    return math.expm1(tau) * inverse_snr / gain


def expected_coverage(
    cfg: NetworkConfig,
    k: int,
    tau: float,
    r: float,
    moments: InterferenceMoments,
    spec: QuadratureSpec,
    sign: int
) -> float:
    """E[V⁺] (sign=+1) ou E[V⁻] (sign=-1) por quadratura sobre q_k"""
    if tau == 0:
        return 1.0
    h0 = fading_threshold(cfg, k, tau, r)
    fading = cfg.tiers[k].fading
    slack = sign * moments.xi

    def integrand(h: float) -> float:
        density = fading.pdf(h)
        if density == 0.0:
            return 0.0
        z = zeta(cfg, k, h, tau, r, moments)
        return density * min(1.0, max(0.0, std_normal_cdf(z) + slack * berry_esseen_c(z)))

    return min(1.0, max(0.0, integrate_semi_infinite(integrand, h0, spec).value))


def coverage_band(
    cfg: NetworkConfig,
    k: int,
    tau: float,
    r: float,
    moments: InterferenceMoments,
    spec: QuadratureSpec
) -> Tuple[float, float]:
    """(E[V⁺], E[V⁻])"""
    v_plus = expected_coverage(cfg, k, tau, r, moments, spec, +1)
    if moments.xi == 0:
        return v_plus, v_plus
    return v_plus, expected_coverage(cfg, k, tau, r, moments, spec, -1)


def bounds_from_coverage(v_plus: float, v_minus: float) -> Bounds:
    """Outage = 1 - cobertura; ordena contra ruído de quadratura"""
    lower, upper = 1.0 - v_plus, 1.0 - v_minus
    return Bounds(lower=min(lower, upper), upper=max(lower, upper))


def conditional_outage_bounds(
    cfg: NetworkConfig,
    k: int,
    r: float,
    tau: float,
    exclusions: Optional[Sequence[float]] = None,
    settings: OutageSettings = DEFAULT_SETTINGS
) -> Bounds:
    """
    Limites de P(τ-outage) dado serviço pela camada k à distância r.

    exclusions=None usa os raios BARSS Q_i^{(k)}(r) (e portanto Ξ_k(r)).
    """
    OutageQuery(tau=tau)
    moments = _moments(cfg, k, r, exclusions, settings)
    return bounds_from_coverage(*coverage_band(cfg, k, tau, r, moments, settings.inner))


def _moments(
    cfg: NetworkConfig,
    k: int,
    r: float,
    exclusions: Optional[Sequence[float]],
    settings: OutageSettings
) -> InterferenceMoments:
    excl = barss_exclusions(cfg, k, r) if exclusions is None else tuple(exclusions)
    moments = interference_moments(cfg, excl, settings.variant, settings.moments)
    if settings.xi_override is not None:
        return moments.with_xi(settings.xi_override)
    return moments


def capacity_ceiling(cfg: NetworkConfig, spec: QuadratureSpec) -> float:
    """τ_max = log(1 + P_max·G_max(0)·PG·h_q / max(E[I], ε))"""
    signal = max(
        t.power * t.pathloss.peak * t.fading.quantile(CEILING_FADING_QUANTILE) for t in cfg.tiers
    )
    mean = interference_moments(cfg, (0.0,) * cfg.K, spec=spec).mean
    return math.log1p(signal * cfg.processing_gain / max(mean, CEILING_MEAN_FLOOR))


def monotone_envelopes(lower: np.ndarray, upper: np.ndarray) -> Tuple[np.ndarray, np.ndarray]:
    """
    Envelopes não-decrescentes em τ que preservam a validade do sanduíche:
    mínimo corrente pela direita no limite inferior, máximo corrente no superior.
    """
    lower_env = np.minimum.accumulate(lower[::-1])[::-1]
    upper_env = np.maximum.accumulate(upper)
    return lower_env, upper_env


def invert_outage_curves(
    curve: Callable[[float], Bounds],
    gamma: float,
    tau_max: float,
    grid_points: int,
    tol: float
) -> Bounds:
    """
    Capacidade a partir das curvas de outage: varredura grossa em [0, τ_max]
    para isolar o cruzamento de γ, seguida de bisseção em cada curva.

    upper = sup{τ : lower_outage(τ) <= γ}, lower = sup{τ : upper_outage(τ) <= γ}.
    """
    OutageQuery(gamma=gamma)
    grid = np.linspace(0.0, tau_max, grid_points)
    cache: Dict[float, Bounds] = {}

    def evaluate(tau: float) -> Bounds:
        if tau not in cache:
            cache[tau] = curve(tau)
        return cache[tau]

    lower_vals = np.empty(grid_points)
    upper_vals = np.empty(grid_points)
    filled = 0
    # Varredura da esquerda; para quando as duas curvas passam de γ
    for idx, tau in enumerate(grid):
        b = evaluate(float(tau))
        lower_vals[idx], upper_vals[idx] = b.lower, b.upper
        filled = idx + 1
        if b.lower > gamma and b.upper > gamma:
            break
    lower_vals[filled:] = lower_vals[filled - 1]
    upper_vals[filled:] = upper_vals[filled - 1]
    lower_env, upper_env = monotone_envelopes(lower_vals[:filled], upper_vals[:filled])

    def crossing(values: np.ndarray, pick: Callable[[Bounds], float]) -> Tuple[float, bool, bool]:
        above = np.nonzero(values > gamma)[0]
        if above.size == 0:
            return float(grid[-1]), True, False
        first = int(above[0])
        if first == 0:
            return 0.0, False, True
        lo, hi = float(grid[first - 1]), float(grid[first])
        result = bisect_monotone(lambda t: pick(evaluate(t)), gamma, lo, hi, tol)
        value = min(max(result.value, lo), hi)
        # Curva já acima de γ em τ → 0⁺
        degenerate = lo == 0.0 and value <= tol
        return (0.0 if degenerate else value), False, degenerate

    cap_upper, ceiling_upper, degenerate_upper = crossing(lower_env, lambda b: b.lower)
    cap_lower, ceiling_lower, degenerate_lower = crossing(upper_env, lambda b: b.upper)

    bounds = Bounds(
        lower=min(cap_lower, cap_upper),
        upper=cap_upper,
        ceiling_hit=ceiling_upper or ceiling_lower,
        degenerate=degenerate_lower
    )
    if bounds.ceiling_hit:
        logger.warning("Teto de busca da capacidade atingido", extra={"gamma": gamma, "tau_max": tau_max})
    if bounds.degenerate:
        logger.warning("Limite inferior já acima de γ em τ → 0⁺", extra={"gamma": gamma})
    return bounds


def conditional_capacity_bounds(
    cfg: NetworkConfig,
    k: int,
    r: float,
    gamma: float,
    exclusions: Optional[Sequence[float]] = None,
    settings: OutageSettings = DEFAULT_SETTINGS
) -> Bounds:
    """Limites de C_o(γ) na política genérica (serviço fixo em (k, r))"""
    moments = _moments(cfg, k, r, exclusions, settings)

    def curve(tau: float) -> Bounds:
        return bounds_from_coverage(*coverage_band(cfg, k, tau, r, moments, settings.inner))

    tau_max = capacity_ceiling(cfg, settings.moments)
    return invert_outage_curves(curve, gamma, tau_max, settings.grid_points, settings.capacity_tol)


@dataclass
class BarssOutageEvaluator:
    """
    Limites BARSS: média de E[V̂±] (com Ξ_k(r)) sobre p_k·f_k(r).

    Guarda os momentos condicionais por (k, r) em um cache LRU limitado; os
    nós da quadratura externa se repetem entre valores de τ.
    """
    cfg: NetworkConfig
    settings: OutageSettings = DEFAULT_SETTINGS
    stats: Optional[AssociationStats] = None
    cache_size: int = MOMENT_CACHE_SIZE

    def __post_init__(self):
        if self.stats is None:
            self.stats = association_stats(self.cfg, self.settings.outer)
        self.logger = setup_logger("hcn.outage.barss")
        self._cached_moments = lru_cache(maxsize=self.cache_size)(self._conditional_moments)

    def _conditional_moments(self, k: int, r: float) -> InterferenceMoments:
        return _moments(self.cfg, k, r, None, self.settings)

    def moments(self, k: int, r: float) -> InterferenceMoments:
        return self._cached_moments(k, r)

    def cache_info(self):
        return self._cached_moments.cache_info()

    def _coverage(self, tau: float, sign: int) -> float:
        """Σ_k ∫ p_k f_k(r)·E[V̂±(H_k, τ, r)] dr"""
        total = 0.0
        for k in range(self.cfg.K):
            def integrand(r: float, active: Tuple[int, ...], k: int = k) -> float:
                weight = self.stats.weighted_density(k, r, active)
                if weight == 0.0:
                    return 0.0
                moments = self.moments(k, r)
                return weight * expected_coverage(self.cfg, k, tau, r, moments, self.settings.inner, sign)

            total += integrate_segments(self.stats.tables[k], integrand, self.settings.outer)
        return min(1.0, max(0.0, total))

    def outage_bounds(self, tau: float) -> Bounds:
        OutageQuery(tau=tau)
        if tau == 0:
            return Bounds(0.0, 0.0)
        covered_plus = self._coverage(tau, +1)
        if self.settings.xi_override == 0:
            covered_minus = covered_plus
        else:
            covered_minus = self._coverage(tau, -1)
        return bounds_from_coverage(covered_plus, covered_minus)

    def outage_curve(self, taus: Sequence[float]) -> Tuple[np.ndarray, np.ndarray]:
        """Curvas (lower, upper) em uma grade de τ, já com envelope monótono"""
        values = [self.outage_bounds(float(t)) for t in taus]
        lower = np.array([b.lower for b in values])
        upper = np.array([b.upper for b in values])
        return monotone_envelopes(lower, upper)

    def capacity_bounds(self, gamma: float) -> Bounds:
        tau_max = capacity_ceiling(self.cfg, self.settings.moments)
        bounds = invert_outage_curves(
            self.outage_bounds, gamma, tau_max, self.settings.grid_points, self.settings.capacity_tol
        )
        self.logger.info(
            "Capacidade de outage BARSS calculada",
            extra={"scenario": self.cfg.name, "gamma": gamma, **bounds.to_dict()}
        )
        return bounds


def barss_outage_bounds(
    cfg: NetworkConfig,
    tau: float,
    settings: OutageSettings = DEFAULT_SETTINGS
) -> Bounds:
    return BarssOutageEvaluator(cfg, settings).outage_bounds(tau)


def barss_capacity_bounds(
    cfg: NetworkConfig,
    gamma: float,
    settings: OutageSettings = DEFAULT_SETTINGS
) -> Bounds:
    return BarssOutageEvaluator(cfg, settings).capacity_bounds(gamma)
