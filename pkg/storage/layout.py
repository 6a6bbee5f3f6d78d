"""
Sistema de layout e organização de arquivos de resultados.

Estrutura de pastas:
results/
├── {run}/
│   ├── {scenario}/bounds.csv  (varredura de limites por cenário)
│   ├── drops.csv           (sorteios Monte Carlo brutos)
│   ├── summary.json        (resumo da varredura / simulação)
│   └── validation.json     (relatório da suíte de validação)
"""

from pathlib import Path
from typing import List, Optional


class ResultsLayout:
    """Gerencia estrutura de pastas e paths dos artefatos de saída"""

    ARTIFACTS = {
        "bounds": "bounds.csv",
        "drops": "drops.csv",
        "summary": "summary.json",
        "validation": "validation.json",
    }

    def __init__(self, base_path: str = "results"):
        """
        Args:
            base_path: Diretório base para resultados (padrão: 'results/')
        """
        self.base_path = Path(base_path)

    def run_dir(self, run: str) -> Path:
        return self.base_path / self._safe_filename(run)

    def get_artifact_path(self, run: str, artifact: str, scenario: Optional[str] = None) -> Path:
        """
        Constrói path para um artefato da execução (opcionalmente por cenário).

        Example:
            >>> ResultsLayout().get_artifact_path('fig1', 'bounds')
            PosixPath('results/fig1/bounds.csv')
        """
        if artifact not in self.ARTIFACTS:
            valid = ', '.join(self.ARTIFACTS)
            raise ValueError(f"Artefato '{artifact}' desconhecido. Válidos: {valid}")
        base = self.run_dir(run)
        if scenario is not None:
            base = base / self._safe_filename(scenario)
        return base / self.ARTIFACTS[artifact]

    def ensure_directories(self, run: str) -> Path:
        path = self.run_dir(run)
        path.mkdir(parents=True, exist_ok=True)
        return path

    def list_runs(self) -> List[str]:
        if not self.base_path.exists():
            return []
        return sorted(p.name for p in self.base_path.iterdir() if p.is_dir() and not p.name.startswith('.'))

    def _safe_filename(self, name: str) -> str:
        """Converte nome de execução em nome de diretório seguro"""
        return name.replace('/', '_').replace('\\', '_').replace(' ', '_')
