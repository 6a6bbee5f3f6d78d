"""
Configuração de cenários e parâmetros de execução
=================================================

- Cenário HCN: documento JSON (orjson) <-> NetworkConfig validado
- Presets das figuras: P₁ = 4P₂ = 16P₃, λ = (0.1κ, κ, 5κ), Nakagami m = 5, PG = 25, N0 = 0
- Parâmetros numéricos/simulação/varreduras: config/hcn_settings.yml (PyYAML)

Formato do cenário:

    {
      "name": "fig_3tier",
      "tiers": [
        {"power": 16.0, "intensity": 0.1, "bias": 1.0,
         "pathloss": {"family": "inverse_power", "alpha": 3.0},
         "fading": {"family": "nakagami", "m": 5.0}}
      ],
      "noise": 0.0,
      "processing_gain": 25.0
    }
"""

import copy
from pathlib import Path
from typing import Any, Dict, List, Optional, Union

import orjson
import yaml

from core.errors import ConfigValidationError
from core.interference import XiVariant
from core.logger import setup_logger
from core.model import FadingModel, NetworkConfig, PathLossModel, TierConfig
from core.numerics import QuadratureSpec
from core.outage import OutageSettings
from utils.validation import IssueType, NetworkValidator, validate_network

logger = setup_logger("hcn.config")

PRESETS_DIR = Path(__file__).parent / "presets"
SETTINGS_FILE = Path(__file__).parent / "hcn_settings.yml"

# Parâmetros fixos dos cenários das figuras
PRESET_POWERS = (16.0, 4.0, 1.0)
PRESET_DENSITY_RATIOS = (0.1, 1.0, 5.0)
PRESET_NAKAGAMI_M = 5.0
PRESET_PROCESSING_GAIN = 25.0

PathLike = Union[str, Path]


def _require(data: Dict[str, Any], key: str, where: str) -> Any:
    if key not in data:
        raise ConfigValidationError(
            f"[{IssueType.MISSING_FIELD.value}] Campo '{key}' ausente em {where}",
            issue_type=IssueType.MISSING_FIELD
        )
    return data[key]


def _pathloss_from_dict(data: Dict[str, Any], where: str) -> PathLossModel:
    family = data.get("family", "inverse_power")
    if family != "inverse_power":
        raise ConfigValidationError(
            f"[{IssueType.UNKNOWN_PATHLOSS_FAMILY.value}] {where}: família '{family}' não suportada em JSON",
            issue_type=IssueType.UNKNOWN_PATHLOSS_FAMILY
        )
    return PathLossModel(alpha=float(_require(data, "alpha", where)), family=family)


def _fading_from_dict(data: Dict[str, Any], where: str) -> FadingModel:
    family = data.get("family", "nakagami")
    if family == "rayleigh":
        return FadingModel(family="rayleigh", m=1.0)
    if family == "nakagami":
        return FadingModel(family="nakagami", m=float(_require(data, "m", where)))
    raise ConfigValidationError(
        f"[{IssueType.UNKNOWN_FADING_FAMILY.value}] {where}: família '{family}' não suportada em JSON",
        issue_type=IssueType.UNKNOWN_FADING_FAMILY
    )


def scenario_from_dict(
    data: Dict[str, Any],
    validator: Optional[NetworkValidator] = None
) -> NetworkConfig:
    """
    Constrói e valida um NetworkConfig a partir do documento já decodificado.

    Raises:
        ConfigValidationError: campo ausente, família desconhecida ou invariante violado
    """
    if not isinstance(data, dict):
        raise ConfigValidationError(
            f"[{IssueType.MALFORMED_DOCUMENT.value}] Documento de cenário deve ser um objeto JSON",
            issue_type=IssueType.MALFORMED_DOCUMENT
        )

    tiers: List[TierConfig] = []
    for idx, raw in enumerate(_require(data, "tiers", "cenário"), start=1):
        where = f"tiers[{idx}]"
        try:
            tiers.append(TierConfig(
                power=float(_require(raw, "power", where)),
                intensity=float(_require(raw, "intensity", where)),
                bias=float(raw.get("bias", 1.0)),
                pathloss=_pathloss_from_dict(_require(raw, "pathloss", where), f"{where}.pathloss"),
                fading=_fading_from_dict(_require(raw, "fading", where), f"{where}.fading")
            ))
        except (TypeError, AttributeError) as e:
            raise ConfigValidationError(
                f"[{IssueType.MALFORMED_DOCUMENT.value}] {where}: {e}",
                issue_type=IssueType.MALFORMED_DOCUMENT,
                tier=idx - 1
            ) from e

    cfg = NetworkConfig(
        tiers=tuple(tiers),
        noise=float(data.get("noise", 0.0)),
        processing_gain=float(data.get("processing_gain", 1.0)),
        name=str(data.get("name", "scenario"))
    )
    return validate_network(cfg, validator)


def scenario_to_dict(cfg: NetworkConfig) -> Dict[str, Any]:
    """Inverso de scenario_from_dict para famílias serializáveis"""
    return {
        "name": cfg.name,
        "tiers": [
            {
                "power": t.power,
                "intensity": t.intensity,
                "bias": t.bias,
                "pathloss": {"family": t.pathloss.family, "alpha": t.pathloss.alpha},
                "fading": {"family": t.fading.family, "m": t.fading.shape}
            }
            for t in cfg.tiers
        ],
        "noise": cfg.noise,
        "processing_gain": cfg.processing_gain
    }


def load_scenario(path: PathLike, validator: Optional[NetworkValidator] = None) -> NetworkConfig:
    """Lê o JSON do cenário; o nome padrão é o stem do arquivo"""
    path = Path(path)
    try:
        data = orjson.loads(path.read_bytes())
    except FileNotFoundError as e:
        raise ConfigValidationError(
            f"[{IssueType.MALFORMED_DOCUMENT.value}] Arquivo de cenário não encontrado: {path}",
            issue_type=IssueType.MALFORMED_DOCUMENT
        ) from e
    except orjson.JSONDecodeError as e:
        raise ConfigValidationError(
            f"[{IssueType.MALFORMED_DOCUMENT.value}] JSON inválido em {path}: {e}",
            issue_type=IssueType.MALFORMED_DOCUMENT
        ) from e

    if isinstance(data, dict):
        data.setdefault("name", path.stem)
    cfg = scenario_from_dict(data, validator)
    logger.info("Cenário carregado", extra={"path": str(path), "scenario": cfg.name, "tiers": cfg.K})
    return cfg


def dump_scenario(cfg: NetworkConfig, path: PathLike) -> Path:
    path = Path(path)
    path.parent.mkdir(parents=True, exist_ok=True)
    path.write_bytes(orjson.dumps(scenario_to_dict(cfg), option=orjson.OPT_INDENT_2))
    return path


def figure_preset(n_tiers: int, alpha: float = 3.0, kappa: float = 1.0) -> NetworkConfig:
    """
    Cenário das figuras com n_tiers camadas (2 ou 3).

    Duas camadas usam as duas últimas potências (P₁ = 4P₂ = 4).
    """
    if n_tiers not in (2, 3):
        raise ConfigValidationError(
            f"[{IssueType.NO_TIERS.value}] Presets existem para 2 ou 3 camadas, recebido {n_tiers}",
            issue_type=IssueType.NO_TIERS
        )
    powers = PRESET_POWERS[3 - n_tiers:]
    tiers = tuple(
        TierConfig(
            power=powers[i],
            intensity=PRESET_DENSITY_RATIOS[i] * kappa,
            pathloss=PathLossModel(alpha=alpha),
            fading=FadingModel(family="nakagami", m=PRESET_NAKAGAMI_M)
        )
        for i in range(n_tiers)
    )
    cfg = NetworkConfig(
        tiers=tiers,
        noise=0.0,
        processing_gain=PRESET_PROCESSING_GAIN,
        name=f"fig_{n_tiers}tier_a{alpha:g}_k{kappa:g}"
    )
    return validate_network(cfg)


def preset_path(n_tiers: int) -> Path:
    return PRESETS_DIR / f"fig_{n_tiers}tier.json"


def _deep_merge(base: Dict[str, Any], override: Dict[str, Any]) -> Dict[str, Any]:
    merged = copy.deepcopy(base)
    for key, value in (override or {}).items():
        if isinstance(value, dict) and isinstance(merged.get(key), dict):
            merged[key] = _deep_merge(merged[key], value)
        else:
            merged[key] = value
    return merged


class HCNSettings:
    """
    Parâmetros de execução lidos de config/hcn_settings.yml.

    Chaves ausentes no arquivo caem nos valores de DEFAULT_CONFIG.
    """

    DEFAULT_CONFIG: Dict[str, Any] = {
        "numerics": {
            "moments": {"rel_tol": 1e-9, "abs_tol": 1e-13, "max_subdivisions": 200},
            "outer": {"rel_tol": 1e-6, "abs_tol": 1e-9, "max_subdivisions": 200},
            "inner": {"rel_tol": 1e-7, "abs_tol": 1e-10, "max_subdivisions": 200}
        },
        "capacity": {"grid_points": 200, "tolerance": 1e-4, "variant": "xi-printed"},
        "simulation": {
            "trials": 100000,
            "seed": 20240601,
            "workers": 1,
            "chunk_size": 2000,
            "tail_fraction": 1e-3,
            "max_window_radius": 25.0
        },
        "sweeps": {
            "fig1": {
                "kappa_min": 0.1,
                "kappa_max": 10.0,
                "kappa_points": 20,
                "alphas": [3.0, 4.0],
                "tiers": [2, 3],
                "gamma": 0.15,
                "gap_claims": {"3.0": 0.06, "4.0": 0.15},
                "variant": "xi-campbell"
            },
            "fig2": {
                "gamma_min": 0.05,
                "gamma_max": 0.5,
                "gamma_points": 15,
                "kappas": [0.5, 1.0, 2.0],
                "alpha": 3.0,
                "tiers": 2,
                "variant": "xi-campbell"
            }
        },
        "validation": {
            "taus": [0.1, 0.3, 0.6],
            "gammas": [0.05, 0.15, 0.3],
            "capacity_gamma": 0.15,
            "band_grid_points": 25,
            "band_conditions": [[1, 0.5], [1, 1.0], [2, 0.3], [2, 0.6]],
            "sigma": 3.0,
            "ks_tolerance": 0.02,
            "window_check_trials": 1000,
            "window_tolerance": 5e-3,
            "acceptance": {
                "tiers": [2, 3],
                "kappas": [0.5, 1.0, 2.0],
                "taus": [0.1, 0.3, 0.6],
                "gamma": 0.15
            }
        },
        "logging": {"level": "INFO", "dir": "logs"}
    }

    def __init__(self, config_file: PathLike = SETTINGS_FILE):
        self.config_file = Path(config_file)
        self.logger = setup_logger("hcn.config.settings")
        self.config = self._load_config()

    def _load_config(self) -> Dict[str, Any]:
        """Carrega o YAML; qualquer falha cai nos padrões"""
        try:
            if self.config_file.exists():
                with open(self.config_file, "r", encoding="utf-8") as f:
                    loaded = yaml.safe_load(f) or {}
                self.logger.info(f"Configuração carregada de {self.config_file}")
                return _deep_merge(self.DEFAULT_CONFIG, loaded)
            self.logger.warning("Config não encontrado, usando padrão", extra={"path": str(self.config_file)})
            return copy.deepcopy(self.DEFAULT_CONFIG)
        except yaml.YAMLError as e:
            self.logger.error(f"Erro ao carregar config: {e}")
            return copy.deepcopy(self.DEFAULT_CONFIG)

    @staticmethod
    def _quadrature(section: Dict[str, Any]) -> QuadratureSpec:
        return QuadratureSpec(
            rel_tol=float(section["rel_tol"]),
            abs_tol=float(section["abs_tol"]),
            max_subdivisions=int(section["max_subdivisions"])
        )

    def outage_settings(self, variant: Optional[str] = None) -> OutageSettings:
        numerics = self.config["numerics"]
        capacity = self.config["capacity"]
        return OutageSettings(
            outer=self._quadrature(numerics["outer"]),
            inner=self._quadrature(numerics["inner"]),
            moments=self._quadrature(numerics["moments"]),
            grid_points=int(capacity["grid_points"]),
            capacity_tol=float(capacity["tolerance"]),
            variant=XiVariant(variant or capacity["variant"])
        )

    @property
    def simulation(self) -> Dict[str, Any]:
        return self.config["simulation"]

    @property
    def validation(self) -> Dict[str, Any]:
        return self.config["validation"]

    @property
    def logging(self) -> Dict[str, str]:
        """Seção logging validada (nível padrão do módulo logging e diretório)"""
        section = self.config["logging"]
        level = str(section.get("level", "INFO")).upper()
        if level not in ("DEBUG", "INFO", "WARNING", "ERROR", "CRITICAL"):
            raise ConfigValidationError(
                f"[{IssueType.MALFORMED_DOCUMENT.value}] Nível de log inválido: {section.get('level')}",
                issue_type=IssueType.MALFORMED_DOCUMENT
            )
        return {"level": level, "log_dir": str(section.get("dir", "logs"))}

    def sweep(self, preset: str) -> Dict[str, Any]:
        sweeps = self.config["sweeps"]
        if preset not in sweeps:
            raise ConfigValidationError(
                f"[{IssueType.MALFORMED_DOCUMENT.value}] Preset de varredura desconhecido: {preset}",
                issue_type=IssueType.MALFORMED_DOCUMENT
            )
        return sweeps[preset]
