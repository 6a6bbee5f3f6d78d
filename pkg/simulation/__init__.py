"""
Módulo de Simulação
===================

Oráculo Monte Carlo para os limites analíticos de outage:
- Implantações PPP por camada e associação BARSS
- Modo genérico (serviço fixo e discos de exclusão)
- Outage e capacidade empíricas com erros binomiais
- Métricas do oráculo (KS, faixa da ECDF, Ripley K)
- Suficiência da janela (R vs 2R com os mesmos sorteios)
"""

from .metrics import OracleMetrics
from .montecarlo import (
    DropResult,
    Estimate,
    SimPolicy,
    SimSpec,
    WindowCheck,
    WindowPlan,
    default_window_radius,
    drop,
    empirical_capacity,
    empirical_outage,
    run_drops,
    sample_ppp,
    window_sufficiency,
)

__all__ = [
    'OracleMetrics',
    'DropResult',
    'Estimate',
    'SimPolicy',
    'SimSpec',
    'WindowCheck',
    'WindowPlan',
    'default_window_radius',
    'drop',
    'empirical_capacity',
    'empirical_outage',
    'run_drops',
    'sample_ppp',
    'window_sufficiency',
]
