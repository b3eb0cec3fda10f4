"""Service configuration.

Config files are flat ``key = value`` text; values are parsed as JSON
where they look like it (lists, numbers, quoted strings) and taken as
raw strings otherwise. The CHOIR_CONFIG environment variable overrides
the config file path.
"""

from __future__ import annotations

import json
from dataclasses import dataclass, field
from pathlib import Path

from .errors import ConfigError

ENV_CONFIG_PATH = "CHOIR_CONFIG"


@dataclass
class ServiceConfig:
    repo_root: str
    journal_path: str
    managers: list[str] = field(default_factory=list)
    selection_window: int = 10
    answer_top_k: int = 4
    relevance_threshold: float = 0.05
    max_chunk_chars: int = 1600
    embedding_dimension: int = 256
    embedder: str = "hashed"  # "hashed" | "remote"
    embedder_endpoint: str = ""
    assistant_provider: str = "scripted"  # "scripted" | "remote"
    assistant_endpoint: str = ""
    assistant_timeout_secs: float = 30.0
    flow_ttl_hours: float = 72.0
    listen_addr: str = "127.0.0.1:8787"

    def validate(self) -> "ServiceConfig":
        if not self.repo_root:
            raise ConfigError("repo_root", "must be set")
        if not self.journal_path:
            raise ConfigError("journal_path", "must be set")
        if not isinstance(self.managers, list) or not all(
            isinstance(m, str) and m for m in self.managers
        ):
            raise ConfigError("managers", "must be a list of non-empty user ids")
        for key in ("selection_window", "answer_top_k", "max_chunk_chars", "embedding_dimension"):
            value = getattr(self, key)
            if not isinstance(value, int) or value < 1:
                raise ConfigError(key, "must be a positive integer")
        if not isinstance(self.relevance_threshold, (int, float)):
            raise ConfigError("relevance_threshold", "must be a number")
        if self.flow_ttl_hours <= 0:
            raise ConfigError("flow_ttl_hours", "must be positive")
        if self.embedder not in ("hashed", "remote"):
            raise ConfigError("embedder", "must be 'hashed' or 'remote'")
        if self.embedder == "remote" and not self.embedder_endpoint:
            raise ConfigError("embedder.endpoint", "required for the remote embedder")
        if self.assistant_provider not in ("scripted", "remote"):
            raise ConfigError("assistant.provider", "must be 'scripted' or 'remote'")
        if self.assistant_provider == "remote" and not self.assistant_endpoint:
            raise ConfigError("assistant.endpoint", "required for the remote provider")
        host, _, port = self.listen_addr.partition(":")
        if not host or not port.isdigit():
            raise ConfigError("listen_addr", "must be host:port")
        return self


_KEY_MAP = {
    "embedder.endpoint": "embedder_endpoint",
    "assistant.provider": "assistant_provider",
    "assistant.endpoint": "assistant_endpoint",
    "assistant.timeout_secs": "assistant_timeout_secs",
}


def load_config(path: str | Path) -> ServiceConfig:
    path = Path(path)
    if not path.is_file():
        raise ConfigError("config", f"file not found: {path}")
    raw: dict[str, object] = {}
    for lineno, line in enumerate(path.read_text(encoding="utf-8").splitlines(), 1):
        line = line.strip()
        if not line or line.startswith("#"):
            continue
        key, sep, value = line.partition("=")
        if not sep:
            raise ConfigError(f"line {lineno}", f"expected 'key = value', got {line!r}")
        key = key.strip()
        value = value.strip()
        try:
            parsed: object = json.loads(value)
        except json.JSONDecodeError:
            parsed = value
        raw[_KEY_MAP.get(key, key)] = parsed
    known = set(ServiceConfig.__dataclass_fields__)
    unknown = set(raw) - known
    if unknown:
        raise ConfigError(sorted(unknown)[0], "unknown key")
    if "repo_root" not in raw:
        raise ConfigError("repo_root", "must be set")
    if "journal_path" not in raw:
        raise ConfigError("journal_path", "must be set")
    return ServiceConfig(**raw).validate()  # type: ignore[arg-type]
