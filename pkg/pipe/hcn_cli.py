"""
HCN CLI - Limites de outage, simulação e validação
==================================================

Subcomandos:
    bounds    limites de outage (--tau) e/ou capacidade (--gamma); com
              --tier/--distance condiciona em serviço pela camada k à distância r
    simulate  sorteios Monte Carlo (CSV bruto) + outage/capacidade empíricas
    validate  suíte de verificações cruzadas (relatório JSON); --acceptance roda a
              contenção Monte Carlo na grade presets × κ × τ
    sweep     varreduras: --preset fig1|fig2 ou --sweep kappa|tau|gamma --grid ...

Uso:
----
    python -m pipe.hcn_cli bounds --config config/presets/fig_3tier.json --tau 0.3 --gamma 0.15
    python -m pipe.hcn_cli simulate --config config/presets/fig_2tier.json --trials 100000 --seed 7 --out drops.csv
    python -m pipe.hcn_cli validate --config config/presets/fig_3tier.json --trials 10000 --out report.json
    python -m pipe.hcn_cli validate --acceptance --trials 20000
    python -m pipe.hcn_cli sweep --preset fig1 --workers 4

Códigos de saída:
    0  sucesso
    1  alguma verificação da suíte (ou do resumo de um preset de sweep) falhou
    2  erro de configuração (a mensagem nomeia o invariante)
    3  falha numérica (a mensagem nomeia a operação)
"""

import argparse
import sys
from pathlib import Path
from typing import Any, Dict, List, Optional

from rich.console import Console
from rich.markup import escape

from config.scenario_config import HCNSettings, load_scenario
from core.errors import (
    ConfigValidationError,
    ConvergenceError,
    DegenerateInterferenceError,
    InvalidConfigurationError,
    InvalidInputError,
    UndefinedConditionalError,
)
from core.interference import XiVariant
from core.logger import configure_logging, enable_console, setup_logger
from core.outage import BarssOutageEvaluator, conditional_capacity_bounds, conditional_outage_bounds
from pipe.sweep_pipeline import SWEEP_VARIABLES, SweepPipeline, SweepSpec, run_bounds_sweep
from pipe.validation_pipeline import run_acceptance_grid, run_validation
from simulation.montecarlo import SimSpec, empirical_capacity, empirical_outage, run_drops
from storage.layout import ResultsLayout
from storage.writer_csv import ResultsWriter

EXIT_OK = 0
EXIT_CHECKS_FAILED = 1
EXIT_CONFIG_ERROR = 2
EXIT_NUMERIC_FAILURE = 3

CONFIG_ERRORS = (ConfigValidationError, InvalidConfigurationError, InvalidInputError)
NUMERIC_ERRORS = (ConvergenceError, DegenerateInterferenceError, UndefinedConditionalError, ArithmeticError)

logger = setup_logger("hcn.cli")
console = Console()


def _emit(payload: Dict[str, Any], out: Optional[str]) -> None:
    data = ResultsWriter.dumps(payload)
    if out:
        ResultsWriter().write_json(payload, out)
    else:
        sys.stdout.write(data.decode("utf-8"))


def cmd_bounds(args: argparse.Namespace, settings: HCNSettings) -> int:
    cfg = load_scenario(args.config)
    outage_settings = settings.outage_settings(args.variant)
    if args.tau is None and args.gamma is None:
        raise InvalidInputError("bounds exige --tau e/ou --gamma")
    if (args.tier is None) != (args.distance is None):
        raise InvalidInputError("--tier e --distance devem ser usados juntos")

    payload: Dict[str, Any] = {"scenario": cfg.name, "variant": outage_settings.variant.value}
    if args.tier is not None:
        k = args.tier - 1
        if not 0 <= k < cfg.K:
            raise InvalidInputError(f"--tier deve estar em [1, {cfg.K}], recebido {args.tier}")
        payload["condition"] = {"tier": args.tier, "distance": args.distance}
        if args.tau is not None:
            bounds = conditional_outage_bounds(cfg, k, args.distance, args.tau, settings=outage_settings)
            payload["outage"] = {"tau": args.tau, **bounds.to_dict()}
        if args.gamma is not None:
            bounds = conditional_capacity_bounds(cfg, k, args.distance, args.gamma, settings=outage_settings)
            payload["capacity"] = {"gamma": args.gamma, **bounds.to_dict()}
    else:
        evaluator = BarssOutageEvaluator(cfg, outage_settings)
        payload["p_star"] = list(evaluator.stats.p_star)
        if args.tau is not None:
            payload["outage"] = {"tau": args.tau, **evaluator.outage_bounds(args.tau).to_dict()}
        if args.gamma is not None:
            payload["capacity"] = {"gamma": args.gamma, **evaluator.capacity_bounds(args.gamma).to_dict()}

    _emit(payload, args.out)
    return EXIT_OK


def cmd_simulate(args: argparse.Namespace, settings: HCNSettings) -> int:
    cfg = load_scenario(args.config)
    sim = settings.simulation
    spec = SimSpec(
        trials=args.trials or int(sim["trials"]),
        seed=args.seed if args.seed is not None else int(sim["seed"]),
        tail_fraction=float(sim["tail_fraction"]),
        max_window_radius=float(sim["max_window_radius"]),
        workers=args.workers or int(sim["workers"]),
        chunk_size=int(sim["chunk_size"]),
    )
    drops = run_drops(cfg, spec, progress=args.verbose)
    out = Path(args.out) if args.out else ResultsLayout().get_artifact_path(cfg.name, "drops")
    ResultsWriter().write_drops(drops, out)

    summary: Dict[str, Any] = {"scenario": cfg.name, "trials": spec.trials, "seed": spec.seed, "drops": str(out)}
    if args.tau is not None:
        estimate = empirical_outage(drops, args.tau)
        summary["outage"] = {"tau": args.tau, "value": estimate.value, "stderr": estimate.stderr}
    if args.gamma is not None:
        estimate = empirical_capacity(drops, args.gamma)
        summary["capacity"] = {
            "gamma": args.gamma, "value": estimate.value, "lower": estimate.lower, "upper": estimate.upper
        }
    _emit(summary, None)
    return EXIT_OK


def cmd_validate(args: argparse.Namespace, settings: HCNSettings) -> int:
    if bool(args.config) == bool(args.acceptance):
        raise InvalidInputError("validate exige --config ou --acceptance (apenas um)")
    sim = settings.simulation
    options = dict(
        seed=args.seed if args.seed is not None else int(sim["seed"]),
        trials=args.trials or int(sim["trials"]),
        settings=settings,
        variant=args.variant,
        workers=args.workers,
        progress=args.verbose
    )
    if args.acceptance:
        out = args.out or str(ResultsLayout().get_artifact_path("acceptance_grid", "validation"))
        report = run_acceptance_grid(output=out, **options)
    else:
        out = args.out or str(ResultsLayout().get_artifact_path(Path(args.config).stem, "validation"))
        report = run_validation(args.config, output=out, **options)
    report.render(console)
    if not report.passed:
        console.print(f"[red]{len(report.failed)} verificação(ões) falharam[/red]: "
                      + ", ".join(c.name for c in report.failed))
        return EXIT_CHECKS_FAILED
    return EXIT_OK


def cmd_sweep(args: argparse.Namespace, settings: HCNSettings) -> int:
    workers = args.workers or int(settings.simulation["workers"])
    if args.preset:
        summary = SweepPipeline(settings, variant=args.variant, workers=workers, progress=args.verbose).run(args.preset)
        _emit(summary, None)
        if not summary["passed"]:
            failed = SweepPipeline.failed_flags(summary)
            logger.warning("Verificações do preset falharam", extra={"preset": args.preset, "failed": failed})
            console.print(f"[red]{len(failed)} verificação(ões) do preset falharam[/red]: " + ", ".join(failed))
            return EXIT_CHECKS_FAILED
        return EXIT_OK

    if not (args.config and args.sweep and args.grid):
        raise InvalidInputError("sweep exige --preset ou --config com --sweep e --grid")
    cfg = load_scenario(args.config)
    out = Path(args.out) if args.out else ResultsLayout().get_artifact_path(cfg.name, "bounds")
    spec = SweepSpec(
        variable=args.sweep,
        grid=tuple(args.grid),
        tau=args.tau if args.tau is not None else 0.3,
        gamma=args.gamma if args.gamma is not None else 0.15,
        quantity=args.quantity,
        output=out
    )
    frame = run_bounds_sweep(cfg, spec, settings.outage_settings(args.variant), workers, args.verbose)
    console.print(f"{len(frame)} linha(s) gravadas em {out}")
    return EXIT_OK


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="hcn",
        description="Limites de outage e capacidade em redes heterogêneas K-camadas"
    )
    parser.add_argument('--settings', default=None, help='YAML de parâmetros (padrão: config/hcn_settings.yml)')
    parser.add_argument('--verbose', action='store_true', help='Logs coloridos e barras de progresso')

    sub = parser.add_subparsers(dest="command", required=True)
    variants = [v.value for v in XiVariant]

    bounds = sub.add_parser("bounds", help="Limites analíticos")
    bounds.add_argument('--config', required=True, help='JSON do cenário')
    bounds.add_argument('--tau', type=float, help='Taxa alvo τ (nats/s/Hz)')
    bounds.add_argument('--gamma', type=float, help='Outage alvo γ')
    bounds.add_argument('--tier', type=int, help='Camada servidora (1-based) para limites condicionais')
    bounds.add_argument('--distance', type=float, help='Distância de serviço para limites condicionais')
    bounds.add_argument('--variant', choices=variants, help='Variante de Ξ')
    bounds.add_argument('--out', help='Arquivo JSON de saída (padrão: stdout)')

    simulate = sub.add_parser("simulate", help="Simulação Monte Carlo")
    simulate.add_argument('--config', required=True, help='JSON do cenário')
    simulate.add_argument('--seed', type=int, help='Semente mestre')
    simulate.add_argument('--trials', type=int, help='Número de sorteios')
    simulate.add_argument('--workers', type=int, help='Processos paralelos')
    simulate.add_argument('--tau', type=float, help='Outage empírica em τ')
    simulate.add_argument('--gamma', type=float, help='Capacidade empírica em γ')
    simulate.add_argument('--out', help='CSV dos sorteios')

    validate = sub.add_parser("validate", help="Suíte de validação")
    validate.add_argument('--config', help='JSON do cenário')
    validate.add_argument('--acceptance', action='store_true', help='Grade de aceitação (seção validation.acceptance)')
    validate.add_argument('--seed', type=int, help='Semente mestre')
    validate.add_argument('--trials', type=int, help='Número de sorteios')
    validate.add_argument('--workers', type=int, help='Processos paralelos')
    validate.add_argument('--variant', choices=variants, help='Variante de Ξ')
    validate.add_argument('--out', help='Relatório JSON')

    sweep = sub.add_parser("sweep", help="Varreduras de limites")
    sweep.add_argument('--preset', choices=["fig1", "fig2"], help='Preset das figuras')
    sweep.add_argument('--config', help='JSON do cenário (sem --preset)')
    sweep.add_argument('--sweep', choices=SWEEP_VARIABLES, help='Variável varrida')
    sweep.add_argument('--grid', type=float, nargs='+', help='Grade estritamente crescente')
    sweep.add_argument('--quantity', choices=["capacity", "outage"], help='Quantidade na varredura em κ')
    sweep.add_argument('--tau', type=float, help='τ fixo')
    sweep.add_argument('--gamma', type=float, help='γ fixo')
    sweep.add_argument('--workers', type=int, help='Processos paralelos')
    sweep.add_argument('--variant', choices=variants, help='Variante de Ξ')
    sweep.add_argument('--out', help='CSV de saída')

    return parser


COMMANDS = {
    "bounds": cmd_bounds,
    "simulate": cmd_simulate,
    "validate": cmd_validate,
    "sweep": cmd_sweep,
}


def main(argv: Optional[List[str]] = None) -> int:
    args = build_parser().parse_args(argv)
    if args.verbose:
        enable_console("INFO")

    try:
        settings = HCNSettings(args.settings) if args.settings else HCNSettings()
        configure_logging(**settings.logging)
        return COMMANDS[args.command](args, settings)
    except CONFIG_ERRORS as e:
        logger.error("Erro de configuração", extra={"command": args.command, "error": str(e)})
        console.print(f"[red]Erro de configuração:[/red] {escape(str(e))}")
        return EXIT_CONFIG_ERROR
    except NUMERIC_ERRORS as e:
        logger.error("Falha numérica", extra={"command": args.command, "error": str(e)}, exc_info=True)
        console.print(f"[red]Falha numérica em {args.command}:[/red] {type(e).__name__}: {escape(str(e))}")
        return EXIT_NUMERIC_FAILURE


if __name__ == '__main__':
    sys.exit(main())
