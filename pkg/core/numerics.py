"""
Núcleos numéricos compartilhados
================================

- Quadratura adaptativa (Gauss-Kronrod via scipy) em intervalos finitos e semi-infinitos
- CDF da normal padrão
- Bisseção em funções monótonas (semântica de supremo)
- Quantil empírico
"""

import math
from dataclasses import dataclass
from typing import Callable, Sequence

import numpy as np
from scipy import integrate, special

from core.errors import ConvergenceError, InvalidInputError
from core.logger import setup_logger

logger = setup_logger("hcn.numerics")


@dataclass(frozen=True)
class QuadratureSpec:
    """Tolerâncias da quadratura adaptativa"""
    rel_tol: float = 1e-8
    abs_tol: float = 1e-12
    max_subdivisions: int = 200

    def __post_init__(self):
        if self.rel_tol <= 0 or self.abs_tol <= 0:
            raise InvalidInputError("Tolerâncias da quadratura devem ser positivas")
        if self.max_subdivisions < 1:
            raise InvalidInputError("max_subdivisions deve ser >= 1")

    def tighter(self, factor: float = 10.0) -> "QuadratureSpec":
        """Spec para integrais internas (aninhadas)"""
        return QuadratureSpec(self.rel_tol / factor, self.abs_tol / factor, self.max_subdivisions)


@dataclass(frozen=True)
class QuadratureResult:
    value: float
    error: float


@dataclass(frozen=True)
class BisectionResult:
    value: float
    degenerate: bool = False  # g(lo) > target


DEFAULT_QUADRATURE = QuadratureSpec()


def integrate_finite(
    f: Callable[[float], float],
    a: float,
    b: float,
    spec: QuadratureSpec = DEFAULT_QUADRATURE
) -> QuadratureResult:
    """
    Integra f em [a, b] com quadratura adaptativa.

    Raises:
        InvalidInputError: se a > b
        ConvergenceError: se o limite de subdivisões foi atingido sem a tolerância
    """
    if a > b:
        raise InvalidInputError(f"Intervalo inválido: a={a} > b={b}")
    if a == b:
        return QuadratureResult(0.0, 0.0)

    result = integrate.quad(
        f, a, b,
        epsabs=spec.abs_tol,
        epsrel=spec.rel_tol,
        limit=spec.max_subdivisions,
        full_output=1
    )
    value, error = float(result[0]), float(result[1])
    tolerance = max(spec.abs_tol, spec.rel_tol * abs(value))

    # full_output devolve 4 elementos apenas quando ier > 0
    if len(result) == 4 and error > tolerance:
        info = result[2]
        if info.get("last", 0) >= spec.max_subdivisions:
            raise ConvergenceError(
                f"Quadratura não convergiu em [{a}, {b}] após {spec.max_subdivisions} subdivisões",
                best_estimate=value,
                error=error
            )
        logger.warning(
            "Quadratura com aviso numérico",
            extra={"a": a, "b": b, "value": value, "error": error, "detail": str(result[3])[:200]}
        )

    return QuadratureResult(value, error)


def integrate_semi_infinite(
    f: Callable[[float], float],
    a: float,
    spec: QuadratureSpec = DEFAULT_QUADRATURE
) -> QuadratureResult:
    """
    Integra f em [a, ∞) pela substituição t = a + u/(1-u), u ∈ (0, 1].

    a = +inf representa domínio vazio e devolve 0.
    """
    if math.isinf(a):
        return QuadratureResult(0.0, 0.0)

    def mapped(u: float) -> float:
        if u >= 1.0:
            return 0.0
        one_minus = 1.0 - u
        t = a + u / one_minus
        value = f(t)
        if value == 0.0:
            return 0.0
        return value / (one_minus * one_minus)

    return integrate_finite(mapped, 0.0, 1.0, spec)


def std_normal_cdf(x: float) -> float:
    """Ψ(x) via função erro complementar; aceita ±inf"""
    return float(0.5 * special.erfc(-x / math.sqrt(2.0)))


def bisect_monotone(
    g: Callable[[float], float],
    target: float,
    lo: float,
    hi: float,
    tol: float = 1e-6
) -> BisectionResult:
    """
    sup{x ∈ [lo, hi] : g(x) <= target} para g não-decrescente.

    Se g(hi) <= target devolve hi; se g(lo) > target devolve lo com flag degenerate.
    """
    if lo > hi:
        raise InvalidInputError(f"Intervalo inválido para bisseção: [{lo}, {hi}]")
    if tol <= 0:
        raise InvalidInputError("tol deve ser positiva")

    if g(lo) > target:
        return BisectionResult(lo, degenerate=True)
    if g(hi) <= target:
        return BisectionResult(hi)

    # Invariante: g(lo) <= target < g(hi)
    while hi - lo > tol:
        mid = 0.5 * (lo + hi)
        if g(mid) <= target:
            lo = mid
        else:
            hi = mid
    return BisectionResult(lo)


def empirical_quantile(samples: Sequence[float], p: float) -> float:
    """⌈p·n⌉-ésima estatística de ordem (quantil empírico inferior)"""
    values = np.asarray(samples, dtype=float)
    if values.size == 0:
        raise InvalidInputError("Lista de amostras vazia")
    if not 0.0 < p < 1.0:
        raise InvalidInputError(f"p deve estar em (0, 1), recebido {p}")

    n = values.size
    rank = max(1, math.ceil(p * n - 1e-12))
    return float(np.partition(values, rank - 1)[rank - 1])
