"""
Validation Pipeline - Suíte de verificações cruzadas
====================================================

Confronta o motor analítico consigo mesmo e com o oráculo Monte Carlo:

1. Σ p_k = 1 e normalização de cada f_k
2. Frequências de associação simuladas vs p_k (3 erros padrão binomiais)
3. Distância de serviço simulada vs f_k (KS)
4. Outage empírica dentro de [lower - 3σ, upper + 3σ] em uma grade de τ
   (folga de Clopper-Pearson quando a contagem é 0 ou n)
5. Capacidade empírica (com intervalo de estatística de ordem) vs limites
6. Suficiência da janela: R vs 2R muda a média da interferência < 0.5%
7. ECDF da interferência padronizada dentro de Ψ ± Ξ·c para vários (k, r),
   nas duas variantes de Ξ (a variante Campbell é apenas informativa)
8. Média da interferência simulada vs média de Campbell
9. Monotonicidade: curvas de outage em τ e capacidade em γ
10. Forma fechada de duas camadas vs densidade geral

run_acceptance_grid repete 2, 4 e 5 para os presets de 2 e 3 camadas em
cada κ da grade de aceitação, em um único relatório.

O relatório não tem timestamps: mesma semente → mesmos bytes.
"""

import math
from pathlib import Path
from typing import Optional, Sequence, Union

import numpy as np
import pandas as pd

from config.scenario_config import HCNSettings, figure_preset, load_scenario
from core.association import (
    conditional_distance_pdf,
    integrate_segments,
    relabel_for_two_tier,
    two_tier_pdfs,
)
from core.interference import XiVariant, barss_exclusions, conditional_moments, gaussian_cdf_band
from core.logger import setup_logger
from core.model import NetworkConfig
from core.outage import BarssOutageEvaluator, OutageSettings
from simulation.metrics import OracleMetrics
from simulation.montecarlo import (
    MIN_TRIALS_CAPACITY,
    SimPolicy,
    SimSpec,
    association_frequencies,
    empirical_capacity,
    empirical_outage,
    interference_summary,
    run_drops,
    window_sufficiency,
)
from utils.report_generator import ValidationReport

ASSOCIATION_SUM_TOL = 1e-6
PDF_NORMALIZATION_TOL = 1e-6
TWO_TIER_TOL = 1e-10
TWO_TIER_POINTS = 1000
BAND_X_RANGE = (-3.0, 3.0)


class ValidationPipeline:
    """
    Executa as verificações para um cenário e monta o relatório.

    report/prefix permitem acumular vários cenários no mesmo relatório.
    """

    def __init__(
        self,
        cfg: NetworkConfig,
        seed: int,
        trials: int,
        settings: Optional[HCNSettings] = None,
        variant: Optional[str] = None,
        workers: Optional[int] = None,
        progress: bool = False,
        report: Optional[ValidationReport] = None,
        prefix: str = ""
    ):
        self.cfg = cfg
        self.seed = seed
        self.trials = trials
        self.settings = settings or HCNSettings()
        self.outage_settings: OutageSettings = self.settings.outage_settings(variant)
        self.conf = self.settings.validation
        self.sim_conf = self.settings.simulation
        self.workers = workers or int(self.sim_conf["workers"])
        self.progress = progress
        self.sigma = float(self.conf["sigma"])
        self.evaluator = BarssOutageEvaluator(cfg, self.outage_settings)
        self.report = report if report is not None else ValidationReport(scenario=cfg.name, seed=seed, trials=trials)
        self.prefix = prefix
        self.logger = setup_logger("hcn.validation")

    def _add(self, name: str, measured: float, tolerance: float, passed: bool, **details) -> None:
        self.report.add(f"{self.prefix}{name}", measured, tolerance, passed, **details)

    def _sim_spec(self, **overrides) -> SimSpec:
        params = dict(
            trials=self.trials,
            seed=self.seed,
            tail_fraction=float(self.sim_conf["tail_fraction"]),
            max_window_radius=float(self.sim_conf["max_window_radius"]),
            workers=self.workers,
            chunk_size=int(self.sim_conf["chunk_size"]),
        )
        params.update(overrides)
        return SimSpec(**params)

    def run(self) -> ValidationReport:
        self.logger.info(
            "Iniciando suíte de validação",
            extra={"scenario": self.cfg.name, "seed": self.seed, "trials": self.trials}
        )
        self._check_association()
        drops = run_drops(self.cfg, self._sim_spec(), progress=self.progress)
        self._check_association_frequencies(drops)
        self._check_serving_distance(drops)
        self._check_outage_containment(drops, self.conf["taus"])
        self._check_capacity_containment(drops, float(self.conf["capacity_gamma"]))
        self._check_window()
        self._check_gaussian_band()
        self._check_monotonicity()
        self._check_two_tier()

        self.logger.info("Suíte de validação concluída", extra=self.report.summary())
        return self.report

    def run_containment(self, taus: Sequence[float], gamma: float) -> ValidationReport:
        """Só as verificações de contenção contra o Monte Carlo (grade de aceitação)"""
        drops = run_drops(self.cfg, self._sim_spec(), progress=self.progress)
        self._check_association_frequencies(drops)
        self._check_outage_containment(drops, taus)
        self._check_capacity_containment(drops, gamma)
        return self.report

    def _check_association(self) -> None:
        stats = self.evaluator.stats
        total = math.fsum(stats.p_star)
        self._add(
            "association_sum", abs(total - 1.0), ASSOCIATION_SUM_TOL,
            abs(total - 1.0) <= ASSOCIATION_SUM_TOL, p_star=list(stats.p_star)
        )
        for k in range(self.cfg.K):
            if stats.p_star[k] <= 0:
                continue
            mass = integrate_segments(
                stats.tables[k],
                lambda u, active, k=k: stats.weighted_density(k, u, active) / stats.p_star[k],
                self.outage_settings.outer.tighter()
            )
            self._add(
                f"pdf_normalization_tier_{k + 1}", abs(mass - 1.0), PDF_NORMALIZATION_TOL,
                abs(mass - 1.0) <= PDF_NORMALIZATION_TOL
            )

    def _check_association_frequencies(self, drops: pd.DataFrame) -> None:
        freqs = association_frequencies(drops, self.cfg.K)
        n = len(drops)
        for k, (freq, p) in enumerate(zip(freqs, self.evaluator.stats.p_star)):
            stderr = max(OracleMetrics.binomial_stderr(p, n), 0.5 / n)
            z = abs(freq - p) / stderr
            self._add(
                f"mc_association_tier_{k + 1}", z, self.sigma, z <= self.sigma,
                frequency=float(freq), p_star=float(p)
            )

    def _check_serving_distance(self, drops: pd.DataFrame) -> None:
        stats = self.evaluator.stats
        confidence = OracleMetrics.sigma_confidence(self.sigma)
        for k in range(self.cfg.K):
            name = f"serving_distance_ks_tier_{k + 1}"
            samples = drops.loc[drops["tier"] == k, "distance"].to_numpy(dtype=float)
            if stats.p_star[k] <= 0 or samples.size == 0:
                self.report.add(f"{self.prefix}{name}", 0.0, 0.0, True, enforced=False, skipped="sem sorteios")
                continue
            cdf = stats.cdf(k, float(samples.max()))
            ks = OracleMetrics.ks_distance(samples, cdf)
            # Com poucos sorteios o crítico de D_n supera o teto fixo
            tolerance = max(float(self.conf["ks_tolerance"]), OracleMetrics.ks_critical(samples.size, confidence))
            self._add(name, ks, tolerance, ks <= tolerance, samples=int(samples.size))

    def _check_outage_containment(self, drops: pd.DataFrame, taus: Sequence[float]) -> None:
        for tau in taus:
            bounds = self.evaluator.outage_bounds(float(tau))
            estimate = empirical_outage(drops, float(tau))
            metrics = OracleMetrics.calculate_all(
                estimate.value, len(drops), bounds.lower, bounds.upper, self.sigma
            )
            self._add(
                f"outage_containment_tau_{float(tau):g}", metrics["excess"], 0.0, metrics["excess"] <= 0.0,
                **{k: v for k, v in metrics.items() if k != "excess"}
            )

    def _check_capacity_containment(self, drops: pd.DataFrame, gamma: float) -> None:
        name = f"capacity_containment_gamma_{gamma:g}"
        if len(drops) < MIN_TRIALS_CAPACITY:
            self.report.add(
                f"{self.prefix}{name}", 0.0, 0.0, True, enforced=False, skipped=f"trials < {MIN_TRIALS_CAPACITY}"
            )
            return
        bounds = self.evaluator.capacity_bounds(gamma)
        estimate = empirical_capacity(drops, gamma)
        # Distância entre o intervalo empírico e [lower, upper]
        distance = max(bounds.lower - estimate.upper, estimate.lower - bounds.upper, 0.0)
        self._add(
            name, distance, self.outage_settings.capacity_tol, distance <= self.outage_settings.capacity_tol,
            empirical=estimate.value, interval=[estimate.lower, estimate.upper],
            lower=bounds.lower, upper=bounds.upper, ceiling_hit=bounds.ceiling_hit
        )

    def _check_window(self) -> None:
        check = window_sufficiency(self.cfg, self._sim_spec(), trials=int(self.conf["window_check_trials"]))
        tolerance = float(self.conf["window_tolerance"])
        self._add(
            "window_sufficiency", check.relative_change, tolerance, check.relative_change <= tolerance,
            radius=check.radius, capped=check.capped, trials=check.trials,
            mean_inner=check.mean_inner, mean_outer=check.mean_outer
        )

    def _check_gaussian_band(self) -> None:
        grid = np.linspace(BAND_X_RANGE[0], BAND_X_RANGE[1], int(self.conf["band_grid_points"]))
        for tier, r in self.conf["band_conditions"]:
            k, r = int(tier) - 1, float(r)
            if not 0 <= k < self.cfg.K:
                continue
            exclusions = barss_exclusions(self.cfg, k, r)
            drops = run_drops(self.cfg, self._sim_spec(
                policy=SimPolicy.GENERIC,
                serving_tier=k,
                serving_distance=r,
                exclusions=exclusions,
            ))
            samples = drops["interference"].to_numpy(dtype=float)
            label = f"tier_{k + 1}_r_{r:g}"

            for variant in (XiVariant.PRINTED, XiVariant.CAMPBELL):
                moments = conditional_moments(self.cfg, k, r, variant, self.outage_settings.moments)
                band = [gaussian_cdf_band(moments, float(x)) for x in grid]
                excess = OracleMetrics.band_excess(
                    moments.standardize(samples), grid,
                    [b[0] for b in band], [b[1] for b in band], self.sigma
                )
                worst = float(excess.max())
                self.report.add(
                    f"{self.prefix}gaussian_band_{variant.value}_{label}", worst, 0.0, worst <= 0.0,
                    enforced=variant is XiVariant.PRINTED, xi=moments.xi
                )

            moments = conditional_moments(self.cfg, k, r, XiVariant.PRINTED, self.outage_settings.moments)
            mean, _ = interference_summary(drops)
            z = abs(mean - moments.mean) / (moments.std / math.sqrt(len(drops)))
            self._add(
                f"interference_mean_{label}", z, self.sigma, z <= self.sigma,
                simulated=mean, analytic=moments.mean
            )

    def _check_monotonicity(self) -> None:
        taus = sorted(float(t) for t in self.conf["taus"])
        lower, upper = self.evaluator.outage_curve(taus)
        decrease = float(max(np.max(-np.diff(lower), initial=0.0), np.max(-np.diff(upper), initial=0.0)))
        self._add("outage_monotone_in_tau", decrease, 0.0, decrease <= 0.0)

        gammas = sorted(float(g) for g in self.conf["gammas"])
        caps = [self.evaluator.capacity_bounds(g) for g in gammas]
        worst = 0.0
        for a, b in zip(caps, caps[1:]):
            worst = max(worst, a.lower - b.lower, a.upper - b.upper)
        tol = 2.0 * self.outage_settings.capacity_tol
        self._add("capacity_monotone_in_gamma", worst, tol, worst <= tol)

    def _check_two_tier(self) -> None:
        if self.cfg.K != 2:
            return
        cfg = relabel_for_two_tier(self.cfg)
        f1, f2 = two_tier_pdfs(cfg, self.outage_settings.outer)
        stats = BarssOutageEvaluator(cfg, self.outage_settings).stats
        # Cobre a massa das duas camadas: alguns raios médios da camada mais esparsa
        u_max = 3.0 / math.sqrt(min(t.intensity for t in cfg.tiers))
        worst = 0.0
        for u in np.linspace(u_max / TWO_TIER_POINTS, u_max, TWO_TIER_POINTS):
            for k, closed in enumerate((f1, f2)):
                if stats.p_star[k] <= 0:
                    continue
                general = conditional_distance_pdf(cfg, k, float(u), stats.p_star[k], stats.tables[k])
                worst = max(worst, abs(closed(float(u)) - general))
        self._add(
            "two_tier_closed_form", worst, TWO_TIER_TOL, worst <= TWO_TIER_TOL, points=TWO_TIER_POINTS
        )


def run_validation(
    scenario: Union[str, Path, NetworkConfig],
    seed: int,
    trials: int,
    settings: Optional[HCNSettings] = None,
    variant: Optional[str] = None,
    workers: Optional[int] = None,
    output: Optional[Union[str, Path]] = None,
    progress: bool = False
) -> ValidationReport:
    """Executa a suíte e grava o relatório JSON se output for dado"""
    cfg = scenario if isinstance(scenario, NetworkConfig) else load_scenario(scenario)
    report = ValidationPipeline(cfg, seed, trials, settings, variant, workers, progress).run()
    if output is not None:
        report.save(output)
    return report


def run_acceptance_grid(
    seed: int,
    trials: int,
    settings: Optional[HCNSettings] = None,
    variant: Optional[str] = None,
    workers: Optional[int] = None,
    output: Optional[Union[str, Path]] = None,
    progress: bool = False
) -> ValidationReport:
    """
    Contenção de outage e capacidade para presets × κ × τ (seção
    validation.acceptance). Os nomes dos checks levam o cenário como prefixo.
    """
    settings = settings or HCNSettings()
    conf = settings.validation["acceptance"]
    report = ValidationReport(scenario="acceptance_grid", seed=seed, trials=trials)
    logger = setup_logger("hcn.validation")

    for n_tiers in conf["tiers"]:
        for kappa in conf["kappas"]:
            cfg = figure_preset(int(n_tiers), kappa=float(kappa))
            pipeline = ValidationPipeline(
                cfg, seed, trials, settings, variant, workers, progress, report=report, prefix=f"{cfg.name}/"
            )
            pipeline.run_containment([float(t) for t in conf["taus"]], float(conf["gamma"]))
            logger.info("Cenário da grade de aceitação concluído", extra={"scenario": cfg.name})

    logger.info("Grade de aceitação concluída", extra=report.summary())
    if output is not None:
        report.save(output)
    return report
