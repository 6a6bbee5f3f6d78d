"""
Gerador de relatórios da suíte de validação.

Cada verificação registra valor medido, tolerância e resultado. O JSON é
determinístico (sem timestamps) para que sementes iguais gerem bytes iguais.
Checks informativos (enforced=False) aparecem no relatório mas não afetam
o resultado global.
"""

from dataclasses import dataclass, field
from pathlib import Path
from typing import Any, Dict, List, Optional, Union

from rich.console import Console
from rich.table import Table

from storage.writer_csv import ResultsWriter


@dataclass(frozen=True)
class CheckResult:
    """Uma verificação da suíte"""
    name: str
    measured: float
    tolerance: float
    passed: bool
    enforced: bool = True
    details: Dict[str, Any] = field(default_factory=dict)

    def to_dict(self) -> Dict[str, Any]:
        return {
            "name": self.name,
            "measured": self.measured,
            "tolerance": self.tolerance,
            "passed": self.passed,
            "enforced": self.enforced,
            "details": self.details
        }


@dataclass
class ValidationReport:
    """Relatório com todas as verificações de um cenário"""
    scenario: str
    seed: int
    trials: int
    checks: List[CheckResult] = field(default_factory=list)

    def add(
        self,
        name: str,
        measured: float,
        tolerance: float,
        passed: bool,
        enforced: bool = True,
        **details: Any
    ) -> CheckResult:
        check = CheckResult(name, float(measured), float(tolerance), bool(passed), enforced, dict(details))
        self.checks.append(check)
        return check

    @property
    def failed(self) -> List[CheckResult]:
        return [c for c in self.checks if c.enforced and not c.passed]

    @property
    def passed(self) -> bool:
        return not self.failed

    def summary(self) -> Dict[str, Any]:
        return {
            "scenario": self.scenario,
            "seed": self.seed,
            "trials": self.trials,
            "total_checks": len(self.checks),
            "failed_checks": len(self.failed),
            "passed": self.passed
        }

    def to_dict(self) -> Dict[str, Any]:
        return {**self.summary(), "checks": [c.to_dict() for c in self.checks]}

    def to_json(self) -> bytes:
        return ResultsWriter.dumps(self.to_dict())

    def save(self, output_path: Union[str, Path]) -> Path:
        return ResultsWriter().write_json(self.to_dict(), output_path)

    def render(self, console: Optional[Console] = None) -> None:
        """Tabela resumida no terminal"""
        table = Table(title=f"Validação: {self.scenario}")
        table.add_column("check")
        table.add_column("medido", justify="right")
        table.add_column("tolerância", justify="right")
        table.add_column("status")
        for check in self.checks:
            if check.passed:
                status = "[green]ok[/green]"
            elif check.enforced:
                status = "[red]falhou[/red]"
            else:
                status = "[yellow]info[/yellow]"
            table.add_row(check.name, f"{check.measured:.3e}", f"{check.tolerance:.1e}", status)
        (console or Console()).print(table)
