"""
Simulador Monte Carlo (oráculo)
===============================

Implantações PPP por camada, desvanecimento, associação BARSS (ou serviço
fixo com discos de exclusão), SINR e estatísticas empíricas de outage.

Reprodutibilidade: cada sorteio usa um fluxo Philox próprio derivado de
(semente mestre, trial, camada, finalidade), logo o resultado não depende do
número de workers nem da ordem de conclusão dos lotes.

Convenções:
- Camadas 0-based na API; tier = -1 indica janela vazia (outage para todo τ)
- Janela vazia tem distance/fading/rate = NaN e sinr = 0
"""

import math
from concurrent.futures import ProcessPoolExecutor
from dataclasses import dataclass
from enum import Enum, IntEnum
from typing import List, Optional, Sequence, Tuple

import numpy as np
import pandas as pd
from tqdm import tqdm

from core.errors import InvalidInputError
from core.interference import interference_moments, pathloss_moment_integral
from core.logger import setup_logger
from core.model import NetworkConfig
from core.numerics import DEFAULT_QUADRATURE, QuadratureSpec, bisect_monotone
from simulation.metrics import THREE_SIGMA_CONFIDENCE, OracleMetrics

logger = setup_logger("hcn.montecarlo")

EMPTY_TIER = -1
MIN_TRIALS_OUTAGE = 100
MIN_TRIALS_CAPACITY = 1000

DROP_COLUMNS = ["trial", "tier", "distance", "fading", "interference", "sinr", "rate"]


class SimPolicy(Enum):
    BARSS = "barss"
    GENERIC = "generic"


class Purpose(IntEnum):
    """Etiqueta de finalidade na chave do fluxo aleatório"""
    POINTS = 0
    FADING = 1
    SERVING_FADING = 2


@dataclass(frozen=True)
class SimSpec:
    """
    Parâmetros de uma rodada Monte Carlo.

    window_radius=None escolhe o raio pelo critério de cauda (ver
    default_window_radius). No modo GENERIC o serviço é fixo em
    (serving_tier, serving_distance) e a camada i só tem interferentes fora
    de B(0, exclusions[i]).
    """
    trials: int
    seed: int = 20240601
    window_radius: Optional[float] = None
    policy: SimPolicy = SimPolicy.BARSS
    serving_tier: Optional[int] = None
    serving_distance: Optional[float] = None
    exclusions: Optional[Tuple[float, ...]] = None
    tail_fraction: float = 1e-3
    max_window_radius: float = 25.0
    workers: int = 1
    chunk_size: int = 2000

    def __post_init__(self):
        if self.trials < 1:
            raise InvalidInputError(f"trials deve ser >= 1, recebido {self.trials}")
        if self.window_radius is not None and not self.window_radius > 0:
            raise InvalidInputError(f"Raio da janela deve ser > 0, recebido {self.window_radius}")
        if not 0 < self.tail_fraction < 1:
            raise InvalidInputError(f"tail_fraction deve estar em (0, 1), recebido {self.tail_fraction}")
        if self.workers < 1 or self.chunk_size < 1:
            raise InvalidInputError("workers e chunk_size devem ser >= 1")
        if self.policy is SimPolicy.GENERIC:
            if self.serving_tier is None or self.serving_distance is None or self.exclusions is None:
                raise InvalidInputError("Modo GENERIC exige serving_tier, serving_distance e exclusions")
            if self.serving_distance < 0 or any(d < 0 for d in self.exclusions):
                raise InvalidInputError("Distância de serviço e raios de exclusão devem ser >= 0")


@dataclass(frozen=True)
class WindowPlan:
    """Raio efetivo da janela e média analítica da interferência truncada"""
    radius: float
    tail_mean: float = 0.0
    capped: bool = False


@dataclass(frozen=True)
class DropResult:
    trial: int
    tier: int
    distance: float
    fading: float
    interference: float
    sinr: float
    rate: float

    @property
    def empty(self) -> bool:
        return self.tier == EMPTY_TIER


@dataclass(frozen=True)
class Estimate:
    """Estimativa empírica com erro (erro padrão ou intervalo)"""
    value: float
    stderr: float = 0.0
    lower: float = math.nan
    upper: float = math.nan


def trial_stream(seed: int, trial: int, tier: int, purpose: Purpose) -> np.random.Generator:
    """Fluxo Philox contra-baseado, independente para cada chave"""
    key = np.random.SeedSequence([int(seed) & 0xFFFFFFFFFFFFFFFF, int(trial), int(tier), int(purpose)])
    return np.random.Generator(np.random.Philox(key))


def sample_ppp(
    intensity: float,
    radius: float,
    rng: np.random.Generator,
    inner_radius: float = 0.0
) -> np.ndarray:
    """
    PPP homogêneo no anel inner_radius <= ‖x‖ <= radius (disco se inner_radius = 0).

    Returns:
        array (n, 2) de posições; n ~ Poisson(λπ(R² - d²))
    """
    if not intensity > 0:
        raise InvalidInputError(f"Intensidade deve ser > 0, recebido {intensity}")
    if inner_radius >= radius:
        return np.empty((0, 2))

    area = math.pi * (radius ** 2 - inner_radius ** 2)
    count = int(rng.poisson(intensity * area))
    r = np.sqrt(inner_radius ** 2 + rng.random(count) * (radius ** 2 - inner_radius ** 2))
    theta = rng.random(count) * 2.0 * math.pi
    return np.column_stack((r * np.cos(theta), r * np.sin(theta)))


def tail_mean(
    cfg: NetworkConfig,
    radius: float,
    exclusions: Optional[Sequence[float]] = None,
    spec: QuadratureSpec = DEFAULT_QUADRATURE
) -> float:
    """Média de Campbell da interferência além de max(radius, d_i)"""
    excl = exclusions if exclusions is not None else (0.0,) * cfg.K
    total = 0.0
    for tier, d in zip(cfg.tiers, excl):
        start = max(radius, float(d))
        if math.isinf(start):
            continue
        total += tier.intensity * tier.power * tier.fading.m_h * pathloss_moment_integral(tier.pathloss, 1, start, spec)
    return 2.0 * math.pi * total


def default_window_radius(
    cfg: NetworkConfig,
    tail_fraction: float = 1e-3,
    max_radius: float = 25.0,
    exclusions: Optional[Sequence[float]] = None,
    spec: QuadratureSpec = DEFAULT_QUADRATURE
) -> WindowPlan:
    """
    Menor R com cauda analítica < tail_fraction × média total.

    Se R passa de max_radius a janela fica em max_radius e a cauda entra na
    interferência simulada como deslocamento determinístico.
    """
    excl = tuple(exclusions) if exclusions is not None else (0.0,) * cfg.K
    target = tail_fraction * interference_moments(cfg, excl, spec=spec).mean

    def tail(r: float) -> float:
        return tail_mean(cfg, r, excl, spec)

    if tail(max_radius) >= target:
        offset = tail(max_radius)
        logger.warning(
            "Critério de cauda exige janela acima do teto; usando compensação analítica",
            extra={"scenario": cfg.name, "max_radius": max_radius, "tail_mean": offset, "target": target}
        )
        return WindowPlan(radius=max_radius, tail_mean=offset, capped=True)

    hi = 1.0
    while tail(hi) >= target:
        hi *= 2.0
    lo = hi / 2.0 if hi > 1.0 else 0.0
    tol = 1e-3 * hi
    # sup{R : tail(R) >= alvo} via g(R) = -tail(R), não-decrescente
    result = bisect_monotone(lambda r: -tail(r), -target, lo, hi, tol)
    radius = min(result.value + tol, hi, max_radius)
    return WindowPlan(radius=radius)


def resolve_window(cfg: NetworkConfig, spec: SimSpec) -> WindowPlan:
    exclusions = spec.exclusions if spec.policy is SimPolicy.GENERIC else None
    if spec.window_radius is not None:
        return WindowPlan(radius=spec.window_radius)
    return default_window_radius(cfg, spec.tail_fraction, spec.max_window_radius, exclusions)


def _finish(
    cfg: NetworkConfig,
    trial: int,
    tier: int,
    distance: float,
    fading: float,
    signal: float,
    interference: float
) -> DropResult:
    denominator = cfg.noise + interference / cfg.processing_gain
    sinr = signal / denominator if denominator > 0 else math.inf
    return DropResult(
        trial=trial,
        tier=tier,
        distance=distance,
        fading=fading,
        interference=interference,
        sinr=sinr,
        rate=math.log1p(sinr)
    )


def _empty_drop(trial: int, interference: float) -> DropResult:
    return DropResult(
        trial=trial,
        tier=EMPTY_TIER,
        distance=math.nan,
        fading=math.nan,
        interference=interference,
        sinr=0.0,
        rate=math.nan
    )


def _drop_barss(cfg: NetworkConfig, spec: SimSpec, plan: WindowPlan, trial: int) -> DropResult:
    scores: List[np.ndarray] = []
    received: List[np.ndarray] = []
    distances: List[np.ndarray] = []
    gains: List[np.ndarray] = []
    labels: List[np.ndarray] = []

    for i, tier in enumerate(cfg.tiers):
        points = sample_ppp(tier.intensity, plan.radius, trial_stream(spec.seed, trial, i, Purpose.POINTS))
        d = np.hypot(points[:, 0], points[:, 1])
        h = tier.fading.sample(trial_stream(spec.seed, trial, i, Purpose.FADING), d.size)
        g = tier.pathloss.gain_array(d)
        scores.append(tier.bias * tier.power * g)
        received.append(tier.power * h * g)
        distances.append(d)
        gains.append(h)
        labels.append(np.full(d.size, i))

    score = np.concatenate(scores)
    if score.size == 0:
        return _empty_drop(trial, plan.tail_mean)

    power = np.concatenate(received)
    serving = int(np.argmax(score))
    signal = float(power[serving])
    power[serving] = 0.0
    interference = float(np.sum(power)) + plan.tail_mean

    return _finish(
        cfg,
        trial,
        int(np.concatenate(labels)[serving]),
        float(np.concatenate(distances)[serving]),
        float(np.concatenate(gains)[serving]),
        signal,
        interference
    )


def _drop_generic(cfg: NetworkConfig, spec: SimSpec, plan: WindowPlan, trial: int) -> DropResult:
    k, r = spec.serving_tier, spec.serving_distance
    serving = cfg.tiers[k]
    h = float(serving.fading.sample(trial_stream(spec.seed, trial, k, Purpose.SERVING_FADING), 1)[0])
    signal = serving.power * h * serving.pathloss.gain(r)

    interference = plan.tail_mean
    for i, (tier, d) in enumerate(zip(cfg.tiers, spec.exclusions)):
        points = sample_ppp(
            tier.intensity, plan.radius, trial_stream(spec.seed, trial, i, Purpose.POINTS), inner_radius=d
        )
        if points.shape[0] == 0:
            continue
        dist = np.hypot(points[:, 0], points[:, 1])
        fades = tier.fading.sample(trial_stream(spec.seed, trial, i, Purpose.FADING), dist.size)
        interference += float(np.sum(tier.power * fades * tier.pathloss.gain_array(dist)))

    return _finish(cfg, trial, k, float(r), h, signal, interference)


def drop(cfg: NetworkConfig, spec: SimSpec, trial: int, plan: Optional[WindowPlan] = None) -> DropResult:
    """Um sorteio completo da rede para o trial dado"""
    plan = plan or resolve_window(cfg, spec)
    if spec.policy is SimPolicy.GENERIC:
        return _drop_generic(cfg, spec, plan, trial)
    return _drop_barss(cfg, spec, plan, trial)


def _simulate_chunk(cfg: NetworkConfig, spec: SimSpec, plan: WindowPlan, start: int, stop: int) -> List[DropResult]:
    return [drop(cfg, spec, trial, plan) for trial in range(start, stop)]


def run_drops(cfg: NetworkConfig, spec: SimSpec, progress: bool = False) -> pd.DataFrame:
    """
    Executa spec.trials sorteios e devolve um DataFrame com DROP_COLUMNS,
    em ordem de trial independentemente do número de workers.
    """
    plan = resolve_window(cfg, spec)
    chunks = [
        (start, min(start + spec.chunk_size, spec.trials))
        for start in range(0, spec.trials, spec.chunk_size)
    ]
    logger.info(
        "Iniciando simulação Monte Carlo",
        extra={
            "scenario": cfg.name,
            "policy": spec.policy.value,
            "trials": spec.trials,
            "seed": spec.seed,
            "window_radius": plan.radius,
            "tail_mean": plan.tail_mean,
            "workers": spec.workers
        }
    )

    results: List[DropResult] = []
    if spec.workers > 1 and len(chunks) > 1:
        with ProcessPoolExecutor(max_workers=spec.workers) as executor:
            batches = executor.map(
                _simulate_chunk,
                *zip(*[(cfg, spec, plan, start, stop) for start, stop in chunks])
            )
            for batch in tqdm(batches, total=len(chunks), desc="Drops", disable=not progress):
                results.extend(batch)
    else:
        for start, stop in tqdm(chunks, desc="Drops", disable=not progress):
            results.extend(_simulate_chunk(cfg, spec, plan, start, stop))

    frame = pd.DataFrame(
        {
            "trial": [d.trial for d in results],
            "tier": [d.tier for d in results],
            "distance": [d.distance for d in results],
            "fading": [d.fading for d in results],
            "interference": [d.interference for d in results],
            "sinr": [d.sinr for d in results],
            "rate": [d.rate for d in results],
        },
        columns=DROP_COLUMNS
    )
    empty = int((frame["tier"] == EMPTY_TIER).sum())
    if empty:
        logger.warning("Janelas vazias contadas como outage", extra={"scenario": cfg.name, "empty": empty})
    return frame


@dataclass(frozen=True)
class WindowCheck:
    """Média da interferência simulada com janela R e 2R"""
    radius: float
    mean_inner: float
    mean_outer: float
    trials: int
    capped: bool = False

    @property
    def relative_change(self) -> float:
        if self.mean_outer <= 0:
            return 0.0
        return abs(self.mean_outer - self.mean_inner) / self.mean_outer


def _window_pair(cfg: NetworkConfig, spec: SimSpec, inner: float, outer: float, trial: int) -> Tuple[float, float]:
    """Interferência do mesmo sorteio restrita a B(0, inner) e em B(0, outer)"""
    received: List[np.ndarray] = []
    scores: List[np.ndarray] = []
    distances: List[np.ndarray] = []
    for i, tier in enumerate(cfg.tiers):
        d_min = spec.exclusions[i] if spec.policy is SimPolicy.GENERIC else 0.0
        points = sample_ppp(tier.intensity, outer, trial_stream(spec.seed, trial, i, Purpose.POINTS), inner_radius=d_min)
        d = np.hypot(points[:, 0], points[:, 1])
        h = tier.fading.sample(trial_stream(spec.seed, trial, i, Purpose.FADING), d.size)
        g = tier.pathloss.gain_array(d)
        received.append(tier.power * h * g)
        scores.append(tier.bias * tier.power * g)
        distances.append(d)

    power = np.concatenate(received)
    score = np.concatenate(scores)
    inside = np.concatenate(distances) <= inner

    def interference(mask: np.ndarray) -> float:
        selected = power[mask]
        if selected.size == 0:
            return 0.0
        total = float(np.sum(selected))
        if spec.policy is SimPolicy.BARSS:
            total -= float(selected[int(np.argmax(score[mask]))])
        return total

    return interference(inside), interference(np.ones(power.size, dtype=bool))


def window_sufficiency(cfg: NetworkConfig, spec: SimSpec, trials: Optional[int] = None) -> WindowCheck:
    """
    Compara a média da interferência com a janela de spec e com o dobro do raio.

    Os pontos vêm de B(0, 2R); restritos a B(0, R) são o PPP da janela
    original, então as duas médias usam os mesmos sorteios. Janelas truncadas
    somam a cauda analítica do próprio raio.
    """
    plan = resolve_window(cfg, spec)
    outer = 2.0 * plan.radius
    exclusions = spec.exclusions if spec.policy is SimPolicy.GENERIC else None
    outer_offset = tail_mean(cfg, outer, exclusions) if plan.capped else 0.0
    n = min(spec.trials, trials or spec.trials)

    inner_values: List[float] = []
    outer_values: List[float] = []
    for trial in range(n):
        a, b = _window_pair(cfg, spec, plan.radius, outer, trial)
        inner_values.append(a + plan.tail_mean)
        outer_values.append(b + outer_offset)

    check = WindowCheck(
        radius=plan.radius,
        mean_inner=math.fsum(inner_values) / n,
        mean_outer=math.fsum(outer_values) / n,
        trials=n,
        capped=plan.capped
    )
    logger.info(
        "Suficiência da janela avaliada",
        extra={"scenario": cfg.name, "radius": plan.radius, "relative_change": check.relative_change, "trials": n}
    )
    return check


def _rates(drops) -> np.ndarray:
    if isinstance(drops, pd.DataFrame):
        return drops["rate"].to_numpy(dtype=float)
    return np.asarray(drops, dtype=float)


def empirical_outage(drops, tau: float) -> Estimate:
    """
    Fração de sorteios com log(1 + SINR) < τ (janelas vazias contam como outage).

    Aceita o DataFrame de run_drops ou diretamente as taxas.
    """
    rates = _rates(drops)
    n = rates.size
    if n < MIN_TRIALS_OUTAGE:
        raise InvalidInputError(f"Outage empírica exige n >= {MIN_TRIALS_OUTAGE}, recebido {n}")
    if tau < 0:
        raise InvalidInputError(f"τ deve ser >= 0, recebido {tau}")

    outage = np.isnan(rates) | (rates < tau)
    p_hat = float(np.count_nonzero(outage)) / n
    return Estimate(value=p_hat, stderr=OracleMetrics.binomial_stderr(p_hat, n))


def empirical_capacity(
    drops,
    gamma: float,
    confidence: float = THREE_SIGMA_CONFIDENCE
) -> Estimate:
    """
    sup{τ : P̂(taxa < τ) <= γ}, i.e. a (⌊γn⌋+1)-ésima estatística de ordem,
    com intervalo binomial de estatísticas de ordem.
    """
    rates = _rates(drops)
    n = rates.size
    if n < MIN_TRIALS_CAPACITY:
        raise InvalidInputError(f"Capacidade empírica exige n >= {MIN_TRIALS_CAPACITY}, recebido {n}")
    if not 0 < gamma < 1:
        raise InvalidInputError(f"γ deve estar em (0, 1), recebido {gamma}")

    # Janela vazia: outage para todo τ >= 0
    values = np.where(np.isnan(rates), -math.inf, rates)
    rank = math.floor(gamma * n) + 1
    value = float(np.partition(values, rank - 1)[rank - 1])
    lower, upper = OracleMetrics.quantile_interval(values, gamma, confidence)

    if value < 0:
        logger.warning("Capacidade empírica nula: fração de janelas vazias acima de γ", extra={"gamma": gamma})
    return Estimate(value=max(value, 0.0), lower=max(lower, 0.0), upper=max(upper, 0.0))


def association_frequencies(drops: pd.DataFrame, K: int) -> np.ndarray:
    """Frequência de cada camada servidora (janelas vazias ficam fora)"""
    tiers = drops["tier"].to_numpy()
    return np.array([np.count_nonzero(tiers == k) for k in range(K)], dtype=float) / tiers.size


def interference_summary(drops: pd.DataFrame) -> Tuple[float, float]:
    """(média, variância) da interferência com soma compensada"""
    values = drops["interference"].to_numpy(dtype=float)
    n = values.size
    if n < 2:
        raise InvalidInputError("Resumo exige ao menos 2 sorteios")
    mean = math.fsum(values) / n
    variance = math.fsum((values - mean) ** 2) / (n - 1)
    return mean, variance
