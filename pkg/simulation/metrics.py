"""
Métricas do Oráculo Monte Carlo
===============================

Estatísticas usadas para confrontar o simulador com os limites analíticos:
- Erro padrão binomial e intervalo de Clopper-Pearson
- Intervalo de confiança de quantil por estatísticas de ordem
- Distância de Kolmogorov-Smirnov contra uma CDF analítica
- Contenção da ECDF em uma faixa [lower, upper] com inflação de k·σ
- Função K de Ripley com correção de borda (teste de CSR)
"""

import math
from typing import Any, Callable, Dict, Sequence, Tuple

import numpy as np
from scipy import stats
from scipy.spatial import cKDTree

from core.errors import InvalidInputError

# Confiança equivalente a ±3σ gaussiano
THREE_SIGMA_CONFIDENCE = 0.9973


class OracleMetrics:
    """Classe para calcular métricas do oráculo"""

    @staticmethod
    def binomial_stderr(p_hat: float, n: int) -> float:
        """√(p̂(1-p̂)/n)"""
        if n < 1:
            raise InvalidInputError(f"n deve ser >= 1, recebido {n}")
        return math.sqrt(max(p_hat * (1.0 - p_hat), 0.0) / n)

    @staticmethod
    def clopper_pearson(k: int, n: int, confidence: float = THREE_SIGMA_CONFIDENCE) -> Tuple[float, float]:
        """Intervalo exato para uma proporção binomial"""
        if n <= 0:
            return 0.0, 1.0
        alpha = 1.0 - confidence
        lower = 0.0 if k == 0 else stats.beta.ppf(alpha / 2.0, k, n - k + 1)
        upper = 1.0 if k == n else stats.beta.ppf(1.0 - alpha / 2.0, k + 1, n - k)
        return float(np.nan_to_num(lower, nan=0.0)), float(np.nan_to_num(upper, nan=1.0))

    @staticmethod
    def quantile_interval(
        samples: Sequence[float],
        p: float,
        confidence: float = THREE_SIGMA_CONFIDENCE
    ) -> Tuple[float, float]:
        """
        Intervalo livre de distribuição para o p-quantil.

        Os postos vêm dos quantis de Binomial(n, p); devolve as estatísticas
        de ordem correspondentes (limitadas a [1, n]).
        """
        values = np.sort(np.asarray(samples, dtype=float))
        n = values.size
        if n == 0:
            raise InvalidInputError("Lista de amostras vazia")
        alpha = 1.0 - confidence
        lo_rank = int(stats.binom.ppf(alpha / 2.0, n, p))
        hi_rank = int(stats.binom.ppf(1.0 - alpha / 2.0, n, p)) + 1
        lo_rank = min(max(lo_rank, 1), n)
        hi_rank = min(max(hi_rank, 1), n)
        return float(values[lo_rank - 1]), float(values[hi_rank - 1])

    @staticmethod
    def ecdf(samples: Sequence[float], x: Sequence[float]) -> np.ndarray:
        """F̂(x) = #{amostras <= x}/n em cada ponto de x"""
        values = np.sort(np.asarray(samples, dtype=float))
        if values.size == 0:
            raise InvalidInputError("Lista de amostras vazia")
        return np.searchsorted(values, np.asarray(x, dtype=float), side="right") / values.size

    @staticmethod
    def ks_distance(samples: Sequence[float], cdf: Callable[[np.ndarray], np.ndarray]) -> float:
        """Estatística D de Kolmogorov-Smirnov"""
        return float(stats.kstest(np.asarray(samples, dtype=float), cdf).statistic)

    @staticmethod
    def band_excess(
        samples: Sequence[float],
        grid: Sequence[float],
        lower: Sequence[float],
        upper: Sequence[float],
        sigma: float = 3.0
    ) -> np.ndarray:
        """
        Quanto a ECDF sai da faixa [lower, upper] inflada por sigma erros padrão.

        Valores <= 0 indicam contenção no ponto correspondente da grade.
        """
        values = np.asarray(samples, dtype=float)
        f_hat = OracleMetrics.ecdf(values, grid)
        slack = sigma * np.sqrt(np.maximum(f_hat * (1.0 - f_hat), 0.0) / values.size)
        # Piso de meia contagem para F̂ ∈ {0, 1}
        slack = np.maximum(slack, 0.5 / values.size)
        below = np.asarray(lower, dtype=float) - slack - f_hat
        above = f_hat - np.asarray(upper, dtype=float) - slack
        return np.maximum(below, above)

    @staticmethod
    def ripley_k(points: np.ndarray, window_radius: float, radii: Sequence[float]) -> np.ndarray:
        """
        K̂(r) com correção de borda para pontos no disco B(0, window_radius).

        Só contam como centros os pontos a distância >= r da borda.
        Sob CSR, K(r) = πr².
        """
        points = np.asarray(points, dtype=float).reshape(-1, 2)
        n = points.shape[0]
        if n < 2:
            raise InvalidInputError("Ripley K exige ao menos 2 pontos")

        intensity = n / (math.pi * window_radius ** 2)
        border = window_radius - np.hypot(points[:, 0], points[:, 1])
        tree = cKDTree(points)

        estimates = np.full(len(radii), np.nan)
        for idx, r in enumerate(radii):
            centers = points[border >= r]
            if centers.shape[0] == 0:
                continue
            counts = np.asarray(tree.query_ball_point(centers, r, return_length=True)) - 1
            estimates[idx] = counts.mean() / intensity
        return estimates

    @staticmethod
    def sigma_confidence(sigma: float) -> float:
        """Confiança bilateral equivalente a ±sigma gaussiano"""
        return math.erf(sigma / math.sqrt(2.0))

    @staticmethod
    def ks_critical(n: int, confidence: float = THREE_SIGMA_CONFIDENCE) -> float:
        """Quantil da distribuição exata de D_n (uma amostra, bilateral)"""
        if n < 1:
            raise InvalidInputError(f"n deve ser >= 1, recebido {n}")
        return float(stats.kstwo.ppf(confidence, n))

    @staticmethod
    def calculate_all(
        outage_hat: float,
        n: int,
        lower: float,
        upper: float,
        sigma: float = 3.0
    ) -> Dict[str, Any]:
        """
        Resumo de contenção de uma outage empírica em [lower, upper].

        A folga é a maior entre sigma·σ̂ e o intervalo de Clopper-Pearson de
        mesma confiança, logo contagens 0 ou n não têm folga nula.
        """
        stderr = OracleMetrics.binomial_stderr(outage_hat, n)
        count = int(round(outage_hat * n))
        cp_lower, cp_upper = OracleMetrics.clopper_pearson(count, n, OracleMetrics.sigma_confidence(sigma))
        slack_up = max(sigma * stderr, cp_upper - outage_hat)
        slack_down = max(sigma * stderr, outage_hat - cp_lower)
        return {
            "outage": outage_hat,
            "stderr": stderr,
            "interval": [outage_hat - slack_down, outage_hat + slack_up],
            "lower": lower,
            "upper": upper,
            "excess": max(lower - slack_up - outage_hat, outage_hat - upper - slack_down),
        }
