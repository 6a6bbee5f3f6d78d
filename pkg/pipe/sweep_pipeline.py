"""
Sweep Pipeline - Varreduras dos limites analíticos
==================================================

Avalia os limites BARSS de outage/capacidade ao longo de uma grade de κ, τ
ou γ e grava um CSV por cenário com cabeçalho estável:

    scenario,variable,value,quantity,lower,upper,heuristic,ceiling_hit,degenerate,p_star_1..p_star_K

Presets:
- fig1: capacidade C_o(0.15) vs κ (20 pontos log em [0.1, 10]) para 2 e 3
  camadas com α ∈ {3, 4}; o resumo confronta os gaps com 0.06 (α=3) e 0.15 (α=4)
- fig2: capacidade vs γ (15 pontos lineares em [0.05, 0.5]) para κ ∈ {0.5, 1, 2}

Os presets usam a variante de Ξ declarada em sweeps.<preset>.variant (--variant
da CLI prevalece). O resumo traz "passed" = todas as verificações True.

Uso:
----
    python -m pipe.hcn_cli sweep --preset fig1 --workers 4
    python -m pipe.hcn_cli sweep --config config/presets/fig_2tier.json --sweep tau --grid 0.1 0.2 0.4
"""

from concurrent.futures import ProcessPoolExecutor
from dataclasses import dataclass
from pathlib import Path
from typing import Any, Dict, List, Optional, Sequence, Tuple, Union

import numpy as np
import pandas as pd
from tqdm import tqdm

from config.scenario_config import HCNSettings, figure_preset, load_scenario
from core.errors import InvalidInputError
from core.logger import setup_logger
from core.model import NetworkConfig
from core.outage import BarssOutageEvaluator, Bounds, OutageSettings
from storage.layout import ResultsLayout
from storage.writer_csv import ResultsWriter

SWEEP_VARIABLES = ("kappa", "tau", "gamma")
QUANTITIES = ("capacity", "outage")

logger = setup_logger("hcn.sweep")


def bounds_columns(K: int) -> List[str]:
    base = ["scenario", "variable", "value", "quantity", "lower", "upper", "heuristic", "ceiling_hit", "degenerate"]
    return base + [f"p_star_{k + 1}" for k in range(K)]


@dataclass(frozen=True)
class SweepSpec:
    """
    Variável varrida, grade e parâmetros fixos da consulta.

    quantity=None escolhe pela variável: τ → outage; κ e γ → capacidade.
    """
    variable: str
    grid: Tuple[float, ...]
    tau: float = 0.3
    gamma: float = 0.15
    quantity: Optional[str] = None
    output: Optional[Path] = None

    def __post_init__(self):
        if self.variable not in SWEEP_VARIABLES:
            raise InvalidInputError(f"Variável '{self.variable}' inválida. Válidas: {', '.join(SWEEP_VARIABLES)}")
        if len(self.grid) == 0:
            raise InvalidInputError("Grade da varredura vazia")
        if any(b <= a for a, b in zip(self.grid, self.grid[1:])):
            raise InvalidInputError(f"Grade deve ser estritamente crescente: {self.grid}")
        if self.quantity is not None and self.quantity not in QUANTITIES:
            raise InvalidInputError(f"Quantidade '{self.quantity}' inválida. Válidas: {', '.join(QUANTITIES)}")
        if self.variable == "tau" and self.quantity == "capacity":
            raise InvalidInputError("Varredura em τ só produz probabilidade de outage")
        if self.variable == "gamma" and self.quantity == "outage":
            raise InvalidInputError("Varredura em γ só produz capacidade")

    @property
    def resolved_quantity(self) -> str:
        if self.quantity is not None:
            return self.quantity
        return "outage" if self.variable == "tau" else "capacity"


def _row(cfg: NetworkConfig, spec: SweepSpec, value: float, bounds: Bounds, p_star: Sequence[float]) -> Dict[str, Any]:
    row: Dict[str, Any] = {
        "scenario": cfg.name,
        "variable": spec.variable,
        "value": float(value),
        "quantity": spec.resolved_quantity,
        "lower": bounds.lower,
        "upper": bounds.upper,
        "heuristic": bounds.heuristic,
        "ceiling_hit": bool(bounds.ceiling_hit),
        "degenerate": bool(bounds.degenerate),
    }
    for k, p in enumerate(p_star):
        row[f"p_star_{k + 1}"] = float(p)
    return row


def _evaluate(evaluator: BarssOutageEvaluator, spec: SweepSpec, value: float) -> Bounds:
    if spec.variable == "tau":
        return evaluator.outage_bounds(value)
    if spec.variable == "gamma":
        return evaluator.capacity_bounds(value)
    if spec.resolved_quantity == "outage":
        return evaluator.outage_bounds(spec.tau)
    return evaluator.capacity_bounds(spec.gamma)


def _evaluate_task(
    cfg: NetworkConfig,
    spec: SweepSpec,
    values: Sequence[float],
    settings: OutageSettings
) -> List[Dict[str, Any]]:
    """
    Avalia um bloco da grade. Em κ cada ponto é uma rede diferente; em τ e γ o
    bloco inteiro reaproveita os momentos condicionais do mesmo avaliador.
    """
    rows = []
    shared: Optional[BarssOutageEvaluator] = None
    for value in values:
        if spec.variable == "kappa":
            evaluator = BarssOutageEvaluator(cfg.scale_intensities(value), settings)
        else:
            shared = shared or BarssOutageEvaluator(cfg, settings)
            evaluator = shared
        bounds = _evaluate(evaluator, spec, value)
        rows.append(_row(cfg, spec, value, bounds, evaluator.stats.p_star))
    return rows


def _split(values: Sequence[float], parts: int) -> List[List[float]]:
    chunks = [list(c) for c in np.array_split(np.asarray(values, dtype=float), parts)]
    return [c for c in chunks if c]


def run_bounds_sweep(
    scenario: Union[str, Path, NetworkConfig],
    spec: SweepSpec,
    settings: Optional[OutageSettings] = None,
    workers: int = 1,
    progress: bool = False
) -> pd.DataFrame:
    """
    Uma linha por ponto da grade, em ordem da grade independentemente da
    ordem de conclusão dos workers. Grava spec.output se definido.
    """
    cfg = scenario if isinstance(scenario, NetworkConfig) else load_scenario(scenario)
    settings = settings or HCNSettings().outage_settings()

    # κ: um ponto por tarefa; τ/γ: blocos contíguos para reaproveitar o cache
    if spec.variable == "kappa":
        blocks = [[v] for v in spec.grid]
    else:
        blocks = _split(spec.grid, max(1, min(workers, len(spec.grid))))

    logger.info(
        "Iniciando varredura",
        extra={
            "scenario": cfg.name,
            "variable": spec.variable,
            "points": len(spec.grid),
            "quantity": spec.resolved_quantity,
            "workers": workers
        }
    )

    rows: List[Dict[str, Any]] = []
    if workers > 1 and len(blocks) > 1:
        with ProcessPoolExecutor(max_workers=workers) as executor:
            results = executor.map(
                _evaluate_task,
                *zip(*[(cfg, spec, block, settings) for block in blocks])
            )
            for block_rows in tqdm(results, total=len(blocks), desc=cfg.name, disable=not progress):
                rows.extend(block_rows)
    else:
        for block in tqdm(blocks, desc=cfg.name, disable=not progress):
            rows.extend(_evaluate_task(cfg, spec, block, settings))

    frame = pd.DataFrame(rows, columns=bounds_columns(cfg.K))
    if spec.output is not None:
        ResultsWriter().write_table(frame, spec.output, bounds_columns(cfg.K))
    return frame


def is_monotone(values: Sequence[float], increasing: bool, tol: float = 1e-9) -> bool:
    diffs = np.diff(np.asarray(values, dtype=float))
    if increasing:
        return bool(np.all(diffs >= -tol))
    return bool(np.all(diffs <= tol))


class SweepPipeline:
    """Executa os presets fig1/fig2 e grava CSVs + resumo em results/<preset>/"""

    def __init__(
        self,
        settings: Optional[HCNSettings] = None,
        results_dir: str = "results",
        variant: Optional[str] = None,
        workers: int = 1,
        progress: bool = True
    ):
        self.settings = settings or HCNSettings()
        self.variant = variant
        self.layout = ResultsLayout(results_dir)
        self.writer = ResultsWriter()
        self.workers = workers
        self.progress = progress
        self.logger = setup_logger("hcn.sweep.pipeline")

    def run(self, preset: str) -> Dict[str, Any]:
        if preset == "fig1":
            return self.run_fig1()
        if preset == "fig2":
            return self.run_fig2()
        self.settings.sweep(preset)
        raise InvalidInputError(f"Preset '{preset}' sem rotina de execução")

    def _outage_settings(self, conf: Dict[str, Any]) -> OutageSettings:
        """--variant da CLI prevalece sobre a variante declarada no preset"""
        return self.settings.outage_settings(self.variant or conf.get("variant"))

    def _sweep(self, run: str, cfg: NetworkConfig, spec: SweepSpec, settings: OutageSettings) -> pd.DataFrame:
        path = self.layout.get_artifact_path(run, "bounds", scenario=cfg.name)
        spec = SweepSpec(
            variable=spec.variable, grid=spec.grid, tau=spec.tau, gamma=spec.gamma,
            quantity=spec.quantity, output=path
        )
        return run_bounds_sweep(cfg, spec, settings, self.workers, self.progress)

    def run_fig1(self) -> Dict[str, Any]:
        """Capacidade vs κ; confere gap por α e aperto com 3 camadas"""
        conf = self.settings.sweep("fig1")
        settings = self._outage_settings(conf)
        tol = 2.0 * settings.capacity_tol
        grid = tuple(np.logspace(
            np.log10(conf["kappa_min"]), np.log10(conf["kappa_max"]), int(conf["kappa_points"])
        ))
        gamma = float(conf["gamma"])
        claims = {float(a): float(g) for a, g in conf.get("gap_claims", {}).items()}

        scenarios: Dict[str, Any] = {}
        gaps: Dict[Tuple[int, float], np.ndarray] = {}
        for alpha in conf["alphas"]:
            for n_tiers in conf["tiers"]:
                cfg = figure_preset(int(n_tiers), alpha=float(alpha), kappa=1.0)
                frame = self._sweep("fig1", cfg, SweepSpec(variable="kappa", grid=grid, gamma=gamma), settings)
                gap = (frame["upper"] - frame["lower"]).to_numpy()
                gaps[(int(n_tiers), float(alpha))] = gap
                claim = claims.get(float(alpha))
                scenarios[cfg.name] = {
                    "tiers": int(n_tiers),
                    "alpha": float(alpha),
                    "max_gap": float(gap.max()),
                    "gap_claim": claim,
                    "gap_within_claim": None if claim is None else bool(gap.max() <= claim),
                    # A capacidade é resolvida por bisseção com tolerância capacity_tol
                    "heuristic_non_increasing": is_monotone(frame["heuristic"], increasing=False, tol=tol),
                    "ceiling_hits": int(frame["ceiling_hit"].sum()),
                }

        tightening = {}
        for alpha in conf["alphas"]:
            two, three = gaps.get((2, float(alpha))), gaps.get((3, float(alpha)))
            if two is not None and three is not None:
                tightening[f"alpha_{float(alpha):g}"] = bool(np.all(three <= two + tol))

        flags = [
            flag for s in scenarios.values()
            for flag in (s["gap_within_claim"], s["heuristic_non_increasing"]) if flag is not None
        ]
        summary = {
            "preset": "fig1",
            "variant": settings.variant.value,
            "gamma": gamma,
            "kappa_grid": list(grid),
            "scenarios": scenarios,
            "three_tier_tighter": tightening,
            "passed": all(flags) and all(tightening.values()),
        }
        self.writer.write_json(summary, self.layout.get_artifact_path("fig1", "summary"))
        self.logger.info("Preset fig1 concluído", extra={"summary": summary})
        return summary

    def run_fig2(self) -> Dict[str, Any]:
        """Capacidade vs γ para κ fixos; confere tendência crescente"""
        conf = self.settings.sweep("fig2")
        settings = self._outage_settings(conf)
        tol = 2.0 * settings.capacity_tol
        grid = tuple(np.linspace(float(conf["gamma_min"]), float(conf["gamma_max"]), int(conf["gamma_points"])))

        scenarios: Dict[str, Any] = {}
        for kappa in conf["kappas"]:
            cfg = figure_preset(int(conf["tiers"]), alpha=float(conf["alpha"]), kappa=float(kappa))
            frame = self._sweep("fig2", cfg, SweepSpec(variable="gamma", grid=grid), settings)
            scenarios[cfg.name] = {
                "kappa": float(kappa),
                "lower_non_decreasing": is_monotone(frame["lower"], increasing=True, tol=tol),
                "upper_non_decreasing": is_monotone(frame["upper"], increasing=True, tol=tol),
                "max_gap": float((frame["upper"] - frame["lower"]).max()),
            }

        summary = {
            "preset": "fig2",
            "variant": settings.variant.value,
            "gamma_grid": list(grid),
            "scenarios": scenarios,
            "passed": all(s["lower_non_decreasing"] and s["upper_non_decreasing"] for s in scenarios.values()),
        }
        self.writer.write_json(summary, self.layout.get_artifact_path("fig2", "summary"))
        self.logger.info("Preset fig2 concluído", extra={"summary": summary})
        return summary

    @staticmethod
    def failed_flags(summary: Dict[str, Any]) -> List[str]:
        """Nomes '<cenário>.<flag>' das verificações do resumo que deram False"""
        failed = [
            f"{name}.{flag}" for name, scenario in summary.get("scenarios", {}).items()
            for flag, value in scenario.items() if isinstance(value, bool) and not value
        ]
        failed += [f"three_tier_tighter.{a}" for a, ok in summary.get("three_tier_tighter", {}).items() if not ok]
        return failed
