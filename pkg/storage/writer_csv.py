"""
Writer para artefatos de resultados em CSV e JSON.

Features:
- CSV com cabeçalho estável e floats em notação científica de precisão total
- Camadas 1-based nos CSVs (0 = janela vazia)
- JSON determinístico (chaves ordenadas, indentação fixa) via orjson
"""

from pathlib import Path
from typing import Any, Dict, Optional, Sequence, Union

import numpy as np
import orjson
import pandas as pd

from core.logger import setup_logger
from simulation.montecarlo import DROP_COLUMNS

FLOAT_FORMAT = "%.17e"

PathLike = Union[str, Path]


def _jsonable(value: Any) -> Any:
    """Normaliza tipos numpy e floats não finitos para JSON"""
    if isinstance(value, dict):
        return {str(k): _jsonable(v) for k, v in value.items()}
    if isinstance(value, (list, tuple)):
        return [_jsonable(v) for v in value]
    if isinstance(value, np.generic):
        value = value.item()
    if isinstance(value, float) and not np.isfinite(value):
        return "nan" if np.isnan(value) else ("inf" if value > 0 else "-inf")
    return value


class ResultsWriter:
    """Writer de tabelas (CSV) e relatórios (JSON)"""

    def __init__(self, float_format: str = FLOAT_FORMAT):
        self.float_format = float_format
        self.logger = setup_logger('hcn.storage')

    def write_table(
        self,
        df: pd.DataFrame,
        path: PathLike,
        columns: Optional[Sequence[str]] = None
    ) -> Path:
        """
        Grava o DataFrame com as colunas na ordem dada.

        Raises:
            ValueError: se faltar alguma coluna do cabeçalho
        """
        path = Path(path)
        if columns is not None:
            missing = [c for c in columns if c not in df.columns]
            if missing:
                raise ValueError(f"Colunas ausentes para {path.name}: {missing}")
            df = df.loc[:, list(columns)]

        path.parent.mkdir(parents=True, exist_ok=True)
        df.to_csv(path, index=False, float_format=self.float_format, lineterminator="\n")
        self.logger.info("Tabela gravada", extra={"path": str(path), "rows": len(df)})
        return path

    def write_drops(self, drops: pd.DataFrame, path: PathLike) -> Path:
        """Sorteios brutos: trial,tier,distance,fading,interference,sinr,rate"""
        out = drops.copy()
        out["tier"] = out["tier"].astype(int) + 1
        return self.write_table(out, path, DROP_COLUMNS)

    def write_json(self, payload: Dict[str, Any], path: PathLike) -> Path:
        path = Path(path)
        path.parent.mkdir(parents=True, exist_ok=True)
        path.write_bytes(self.dumps(payload))
        self.logger.info("JSON gravado", extra={"path": str(path)})
        return path

    @staticmethod
    def dumps(payload: Dict[str, Any]) -> bytes:
        """Bytes determinísticos para o mesmo conteúdo"""
        return orjson.dumps(_jsonable(payload), option=orjson.OPT_INDENT_2 | orjson.OPT_SORT_KEYS) + b"\n"
