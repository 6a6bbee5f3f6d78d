"""
Hierarquia de exceções do motor analítico e do simulador.
"""

from typing import Any, Optional


class HCNError(Exception):
    """Exceção base do projeto"""

    def __init__(self, message: str, original_error: Optional[Exception] = None):
        super().__init__(message)
        self.original_error = original_error


class InvalidInputError(HCNError, ValueError):
    """Argumento fora do contrato da operação (ex: ganho negativo, m <= 0)"""


class ConfigValidationError(HCNError, ValueError):
    """Configuração de rede viola um invariante; carrega o IssueType violado"""

    def __init__(self, message: str, issue_type: Any, tier: Optional[int] = None):
        super().__init__(message)
        self.issue_type = issue_type
        self.tier = tier


class InvalidConfigurationError(HCNError, ValueError):
    """Pré-condição específica de uma operação não atendida"""


class ConvergenceError(HCNError, ArithmeticError):
    """Quadratura não convergiu; mantém a melhor estimativa disponível"""

    def __init__(self, message: str, best_estimate: float, error: float):
        super().__init__(message)
        self.best_estimate = best_estimate
        self.error = error


class DegenerateInterferenceError(HCNError, ArithmeticError):
    """Todas as camadas excluídas: variância da interferência é zero"""


class UndefinedConditionalError(HCNError, ArithmeticError):
    """Condicionamento em evento de probabilidade zero (p_k = 0)"""
