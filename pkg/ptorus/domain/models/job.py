# ptorus/domain/models/job.py

import hashlib
import json
from typing import Any, Dict, List, Optional

from pydantic import BaseModel, Field

from ptorus.domain.enums import CommandType


class JobConfig(BaseModel):
    """Параметры одного запуска команды CLI."""
    command: CommandType
    params: Dict[str, Any] = {}  # численные параметры команды
    outputs: Dict[str, Optional[str]] = {}  # пути вывода (в хэш не входят)
    seed: int = 0
    workers: Optional[int] = Field(None, ge=1)

    def canonical(self) -> str:
        """Каноническая JSON-строка конфигурации без путей вывода."""
        payload = {"command": self.command.value, "params": self.params, "seed": self.seed}
        return json.dumps(payload, sort_keys=True, separators=(",", ":"), default=str)

    @property
    def config_hash(self) -> str:
        return hashlib.sha256(self.canonical().encode("utf-8")).hexdigest()


class PipelineResult(BaseModel):
    """Итог выполнения команды."""
    command: CommandType
    summary: str = ""
    total: int = 0  # строк, точек или вердиктов в результате
    outputs: List[str] = []
    payload: Dict[str, Any] = {}
