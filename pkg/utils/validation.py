"""
Pipeline sequencial de validação de cenários HCN com política de rejeição.

Ordem das etapas:
1. Estrutura básica (camadas, ruído, ganho de processamento)
2. Parâmetros por camada (potência, intensidade, viés)
3. Perda de percurso (limitada, monótona, expoente > 2)
4. Desvanecimento (normalização da densidade, momentos, amostrador)
"""

import math
from dataclasses import dataclass
from enum import Enum
from typing import Any, Dict, List, Optional

import numpy as np

from core.errors import ConfigValidationError
from core.logger import setup_logger
from core.model import FADING_FAMILIES, PATHLOSS_FAMILIES, NetworkConfig, TierConfig
from core.numerics import integrate_semi_infinite, QuadratureSpec


class Severity(Enum):
    """Níveis de severidade para issues de validação"""
    CRITICAL = "CRITICAL"  # Rejeita o cenário
    WARNING = "WARNING"    # Aceita mas loga
    INFO = "INFO"         # Apenas informa


class IssueType(Enum):
    """Invariantes do cenário; cada violação tem um nome distinto"""
    # Documento
    MALFORMED_DOCUMENT = "malformed_scenario_document"
    MISSING_FIELD = "missing_required_field"

    # Estrutura
    NO_TIERS = "no_tiers"
    NEGATIVE_NOISE = "negative_noise"
    PROCESSING_GAIN_BELOW_ONE = "processing_gain_below_one"

    # Por camada
    NON_POSITIVE_POWER = "non_positive_power"
    NON_POSITIVE_INTENSITY = "non_positive_intensity"
    NON_POSITIVE_BIAS = "non_positive_bias"

    # Perda de percurso
    UNKNOWN_PATHLOSS_FAMILY = "unknown_pathloss_family"
    PATHLOSS_EXPONENT = "pathloss_exponent_not_above_two"
    PATHLOSS_UNBOUNDED = "pathloss_unbounded"
    PATHLOSS_NOT_MONOTONE = "pathloss_not_monotone"
    PATHLOSS_DECAY = "pathloss_decay_slower_than_exponent"

    # Desvanecimento
    UNKNOWN_FADING_FAMILY = "unknown_fading_family"
    FADING_SHAPE = "fading_shape_not_positive"
    FADING_MOMENTS = "fading_moments_not_positive"
    FADING_JENSEN = "fading_moments_violate_jensen"
    FADING_DENSITY_NORMALIZATION = "fading_density_not_normalized"
    FADING_MOMENT_MISMATCH = "fading_moments_mismatch_density"
    FADING_SAMPLER = "fading_sampler_inconsistent"


@dataclass
class Issue:
    """Representa um problema encontrado na validação"""
    type: IssueType
    severity: Severity
    description: str
    tier: Optional[int] = None
    suggested_fix: Optional[str] = None

    def to_dict(self) -> Dict[str, Any]:
        """Converte para dict para logging já estruturado"""
        return {
            "issue_type": self.type.value,
            "severity": self.severity.value,
            "description": self.description,
            "tier": self.tier,
            "suggested_fix": self.suggested_fix
        }


@dataclass
class ValidationResult:
    """Resultado da validação com todas as issues encontradas"""
    is_valid: bool
    scenario: str
    issues: List[Issue]

    @property
    def critical_issues(self) -> List[Issue]:
        """Issues críticas que rejeitam o cenário"""
        return [i for i in self.issues if i.severity == Severity.CRITICAL]

    @property
    def warning_issues(self) -> List[Issue]:
        return [i for i in self.issues if i.severity == Severity.WARNING]

    def summary(self) -> Dict[str, Any]:
        """Resumo para logging estruturado"""
        return {
            "is_valid": self.is_valid,
            "scenario": self.scenario,
            "total_issues": len(self.issues),
            "critical_count": len(self.critical_issues),
            "warning_count": len(self.warning_issues)
        }


class NetworkValidator:
    """Valida invariantes de NetworkConfig antes de qualquer cálculo"""

    def __init__(
        self,
        check_sampler: bool = True,
        sampler_draws: int = 20000,
        seed: int = 20240601
    ):
        """
        Args:
            check_sampler: Se deve conferir momentos empíricos de amostradores customizados
            sampler_draws: Número de amostras para a conferência
            seed: Semente da conferência (determinística)
        """
        self.check_sampler = check_sampler
        self.sampler_draws = sampler_draws
        self.seed = seed
        self.logger = setup_logger("hcn.validation")

        # Limites configuráveis
        self.min_pathloss_exponent = 2.0
        self.monotone_grid = np.concatenate(([0.0], np.logspace(-3, 4, 400)))
        self.density_tolerance = 1e-6
        self.moment_tolerance = 1e-3

    def validate(self, cfg: NetworkConfig) -> ValidationResult:
        issues: List[Issue] = []

        issues.extend(self._validate_basic_structure(cfg))
        for k, tier in enumerate(cfg.tiers):
            issues.extend(self._validate_tier_parameters(tier, k))
            issues.extend(self._validate_pathloss(tier, k))
            issues.extend(self._validate_fading(tier, k))

        critical = [i for i in issues if i.severity == Severity.CRITICAL]
        result = ValidationResult(is_valid=not critical, scenario=cfg.name, issues=issues)

        self.logger.info(f"Validação concluída para {cfg.name}", extra=result.summary())
        for issue in critical:
            self.logger.error(f"Issue crítica encontrada: {issue.description}", extra=issue.to_dict())

        return result

    def _validate_basic_structure(self, cfg: NetworkConfig) -> List[Issue]:
        issues = []

        if cfg.K < 1:
            issues.append(Issue(
                type=IssueType.NO_TIERS,
                severity=Severity.CRITICAL,
                description="Cenário precisa de pelo menos uma camada (K >= 1)",
                suggested_fix="Adicionar entradas em 'tiers'"
            ))

        if not cfg.noise >= 0:
            issues.append(Issue(
                type=IssueType.NEGATIVE_NOISE,
                severity=Severity.CRITICAL,
                description=f"Potência de ruído N0 deve ser >= 0, encontrado {cfg.noise}"
            ))

        if not cfg.processing_gain >= 1:
            issues.append(Issue(
                type=IssueType.PROCESSING_GAIN_BELOW_ONE,
                severity=Severity.CRITICAL,
                description=f"Ganho de processamento deve ser >= 1, encontrado {cfg.processing_gain}"
            ))

        return issues

    def _validate_tier_parameters(self, tier: TierConfig, k: int) -> List[Issue]:
        issues = []
        checks = [
            (tier.power, IssueType.NON_POSITIVE_POWER, "potência"),
            (tier.intensity, IssueType.NON_POSITIVE_INTENSITY, "intensidade"),
            (tier.bias, IssueType.NON_POSITIVE_BIAS, "viés"),
        ]
        for value, issue_type, label in checks:
            if not (value > 0 and math.isfinite(value)):
                issues.append(Issue(
                    type=issue_type,
                    severity=Severity.CRITICAL,
                    description=f"Camada {k + 1}: {label} deve ser positiva e finita, encontrado {value}",
                    tier=k
                ))
        return issues

    def _validate_pathloss(self, tier: TierConfig, k: int) -> List[Issue]:
        issues = []
        model = tier.pathloss

        if model.family not in PATHLOSS_FAMILIES or (model.family == "custom" and model.gain_fn is None):
            return [Issue(
                type=IssueType.UNKNOWN_PATHLOSS_FAMILY,
                severity=Severity.CRITICAL,
                description=f"Camada {k + 1}: família de perda de percurso '{model.family}' não suportada",
                tier=k,
                suggested_fix=f"Usar uma de {PATHLOSS_FAMILIES}"
            )]

        if not model.alpha > self.min_pathloss_exponent:
            issues.append(Issue(
                type=IssueType.PATHLOSS_EXPONENT,
                severity=Severity.CRITICAL,
                description=f"Camada {k + 1}: expoente alpha={model.alpha} deve ser > 2",
                tier=k
            ))
            return issues

        peak = model.peak
        if not math.isfinite(peak) or peak < 0:
            issues.append(Issue(
                type=IssueType.PATHLOSS_UNBOUNDED,
                severity=Severity.CRITICAL,
                description=f"Camada {k + 1}: G(0)={peak} precisa ser finito",
                tier=k
            ))
            return issues

        gains = np.array([model.gain(t) for t in self.monotone_grid])
        if np.any(np.diff(gains) > 1e-12 * max(peak, 1.0)):
            issues.append(Issue(
                type=IssueType.PATHLOSS_NOT_MONOTONE,
                severity=Severity.CRITICAL,
                description=f"Camada {k + 1}: G não é monótona não-crescente",
                tier=k
            ))

        # G(t)·t^alpha limitada na cauda
        tail = self.monotone_grid[self.monotone_grid >= 10.0]
        scaled = gains[self.monotone_grid >= 10.0] * tail ** model.alpha
        if np.any(~np.isfinite(scaled)) or scaled[-1] > 10.0 * max(scaled[0], 1e-300):
            issues.append(Issue(
                type=IssueType.PATHLOSS_DECAY,
                severity=Severity.CRITICAL,
                description=f"Camada {k + 1}: G(t)·t^alpha não é limitada na cauda",
                tier=k
            ))

        return issues

    def _validate_fading(self, tier: TierConfig, k: int) -> List[Issue]:
        issues = []
        fading = tier.fading

        if fading.family not in FADING_FAMILIES:
            return [Issue(
                type=IssueType.UNKNOWN_FADING_FAMILY,
                severity=Severity.CRITICAL,
                description=f"Camada {k + 1}: família de desvanecimento '{fading.family}' não suportada",
                tier=k,
                suggested_fix=f"Usar uma de {FADING_FAMILIES}"
            )]

        if fading.family == "custom":
            if fading.density_fn is None or fading.sampler_fn is None or fading.custom_moments is None:
                return [Issue(
                    type=IssueType.UNKNOWN_FADING_FAMILY,
                    severity=Severity.CRITICAL,
                    description=f"Camada {k + 1}: desvanecimento customizado exige densidade, momentos e amostrador",
                    tier=k
                )]
        elif not fading.shape > 0:
            return [Issue(
                type=IssueType.FADING_SHAPE,
                severity=Severity.CRITICAL,
                description=f"Camada {k + 1}: parâmetro m={fading.m} deve ser > 0",
                tier=k
            )]

        m1, m2, m3 = fading.moments
        if not all(math.isfinite(v) and v > 0 for v in (m1, m2, m3)):
            issues.append(Issue(
                type=IssueType.FADING_MOMENTS,
                severity=Severity.CRITICAL,
                description=f"Camada {k + 1}: momentos ({m1}, {m2}, {m3}) devem ser finitos e positivos",
                tier=k
            ))
            return issues

        if m2 < m1 * m1 * (1 - 1e-12):
            issues.append(Issue(
                type=IssueType.FADING_JENSEN,
                severity=Severity.CRITICAL,
                description=f"Camada {k + 1}: m_H2={m2} < m_H²={m1 * m1}",
                tier=k
            ))

        # Famílias da biblioteca têm momentos fechados; só customizadas são conferidas
        if fading.family == "custom":
            issues.extend(self._validate_custom_fading(tier, k))

        return issues

    def _validate_custom_fading(self, tier: TierConfig, k: int) -> List[Issue]:
        issues = []
        fading = tier.fading
        spec = QuadratureSpec(rel_tol=1e-8, abs_tol=1e-10)

        total = integrate_semi_infinite(fading.pdf, 0.0, spec).value
        if abs(total - 1.0) > self.density_tolerance:
            issues.append(Issue(
                type=IssueType.FADING_DENSITY_NORMALIZATION,
                severity=Severity.CRITICAL,
                description=f"Camada {k + 1}: densidade integra {total:.8f} (esperado 1)",
                tier=k
            ))
            return issues

        for order, declared in enumerate(fading.moments, start=1):
            numeric = integrate_semi_infinite(lambda h: h ** order * fading.pdf(h), 0.0, spec).value
            if abs(numeric - declared) > self.moment_tolerance * declared:
                issues.append(Issue(
                    type=IssueType.FADING_MOMENT_MISMATCH,
                    severity=Severity.CRITICAL,
                    description=f"Camada {k + 1}: momento {order} declarado {declared} vs densidade {numeric:.6f}",
                    tier=k
                ))

        if self.check_sampler:
            rng = np.random.default_rng(self.seed)
            draws = np.asarray(fading.sample(rng, self.sampler_draws), dtype=float)
            # Momentos 1..3 da amostra vs declarados, cada um com 5 erros padrão
            off = []
            for order, declared in enumerate(fading.moments, start=1):
                powered = draws ** order
                empirical = float(powered.mean())
                stderr = float(powered.std()) / math.sqrt(draws.size)
                if abs(empirical - declared) > 5 * stderr + 1e-9 * max(1.0, declared):
                    off.append(f"m{order}: amostra {empirical:.4f} vs {declared}")
            if off:
                issues.append(Issue(
                    type=IssueType.FADING_SAMPLER,
                    severity=Severity.WARNING,
                    description=f"Camada {k + 1}: amostrador inconsistente ({'; '.join(off)})",
                    tier=k,
                    suggested_fix="Conferir amostrador do desvanecimento customizado"
                ))

        return issues


def validate_network(cfg: NetworkConfig, validator: Optional[NetworkValidator] = None) -> NetworkConfig:
    """
    Valida o cenário e devolve o próprio NetworkConfig (imutável).

    Raises:
        ConfigValidationError: nomeando o primeiro invariante violado
    """
    result = (validator or NetworkValidator()).validate(cfg)
    if result.critical_issues:
        first = result.critical_issues[0]
        raise ConfigValidationError(
            f"[{first.type.value}] {first.description}",
            issue_type=first.type,
            tier=first.tier
        )
    return cfg
