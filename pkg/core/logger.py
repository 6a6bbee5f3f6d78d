import logging
import json
from datetime import datetime
from pathlib import Path
from typing import Any, Dict, List, Optional

# Atributos padrão de LogRecord; o restante veio via extra={...}
_RESERVED_ATTRS = set(vars(logging.makeLogRecord({}))) | {"message", "asctime"}

# Nível do console ativado por enable_console (None = só arquivo)
_console_level: Optional[str] = None

# Padrões de nível e diretório (alterados por configure_logging)
_defaults: Dict[str, str] = {"level": "INFO", "dir": "logs"}


class JSONFormatter(logging.Formatter):
    """Formatter personalizado para output JSON estruturado (NDJSON)"""

    def format(self, record: logging.LogRecord) -> str:
        log_entry: Dict[str, Any] = {
            "timestamp": datetime.fromtimestamp(record.created).isoformat() + "Z",
            "level": record.levelname,
            "module": record.name,
            "message": record.getMessage()
        }

        # Campos passados com extra={...} viram atributos do record
        extra = {
            key: value for key, value in vars(record).items()
            if key not in _RESERVED_ATTRS and not key.startswith("_")
        }
        if extra:
            log_entry["extra"] = extra

        if record.exc_info:
            log_entry["exception"] = self.formatException(record.exc_info)

        return json.dumps(log_entry, ensure_ascii=False, default=str)


def _file_handler(name: str, log_dir: str) -> logging.FileHandler:
    log_path = Path(log_dir)
    log_path.mkdir(parents=True, exist_ok=True)
    log_file = log_path / f"{name}_{datetime.now().strftime('%Y-%m-%d')}.ndjson"
    file_handler = logging.FileHandler(log_file, encoding='utf-8')
    file_handler.setFormatter(JSONFormatter())
    return file_handler


def setup_logger(name: str = "hcn", level: Optional[str] = None, log_dir: Optional[str] = None) -> logging.Logger:
    """
    Logger NDJSON em <log_dir>/<name>_<data>.ndjson.

    level/log_dir ausentes usam os padrões de configure_logging (INFO, logs/).
    """
    level = level or _defaults["level"]
    log_dir = log_dir or _defaults["dir"]
    logger = logging.getLogger(name)
    logger.setLevel(getattr(logging, level.upper()))  # Define o nível mínimo (mensagens abaixo são ignoradas)
    logger.propagate = False  # Evita mensagens duplicadas se root logger também estiver configurado
    log_file = (Path(log_dir) / f"{name}_{datetime.now().strftime('%Y-%m-%d')}.ndjson").resolve()
    if not any(isinstance(h, logging.FileHandler) and h.baseFilename == str(log_file) for h in logger.handlers):
        logger.addHandler(_file_handler(name, log_dir))
    if _console_level is not None:
        _attach_console(logger, _console_level)
    return logger


def _hcn_loggers() -> List[logging.Logger]:
    return [
        existing for name, existing in list(logging.Logger.manager.loggerDict.items())
        if isinstance(existing, logging.Logger) and (name == "hcn" or name.startswith("hcn."))
    ]


def configure_logging(level: str = "INFO", log_dir: str = "logs") -> None:
    """
    Aplica a seção logging de hcn_settings.yml.

    Loggers hcn.* já criados trocam de nível e passam a gravar em log_dir;
    os criados depois herdam os novos padrões.
    """
    if not isinstance(logging.getLevelName(level.upper()), int):
        raise ValueError(f"Nível de log inválido: {level}")
    _defaults["level"] = level.upper()
    _defaults["dir"] = str(log_dir)
    for existing in _hcn_loggers():
        for handler in [h for h in existing.handlers if isinstance(h, logging.FileHandler)]:
            existing.removeHandler(handler)
            handler.close()
        setup_logger(existing.name)


def _attach_console(logger: logging.Logger, level: str) -> None:
    from rich.logging import RichHandler

    if any(isinstance(h, RichHandler) for h in logger.handlers):
        return
    handler = RichHandler(rich_tracebacks=True, show_path=False)
    handler.setLevel(getattr(logging, level.upper()))
    logger.addHandler(handler)


def enable_console(level: str = "INFO") -> None:
    """
    Saída colorida no terminal para todos os loggers hcn.* (CLI com --verbose).

    Loggers criados depois desta chamada também recebem o handler.
    """
    global _console_level
    _console_level = level
    for existing in _hcn_loggers():
        _attach_console(existing, level)


# Logger global
logger = setup_logger()
