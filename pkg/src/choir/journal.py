"""Append-only newline-delimited JSON journal.

Each line is one record: ingested events, flow snapshots, conversation
snapshots, and emitted actions. Replay restores service state without
re-running side effects (repository commits live in git already). A
truncated or undecodable line refuses startup with its record index.
"""

from __future__ import annotations

import json
import os
from pathlib import Path
from typing import IO, Iterator, Optional

from .errors import CorruptJournal

RECORD_TYPES = ("event", "flow", "conversation", "action")


class Journal:
    def __init__(self, path: str | Path):
        self.path = Path(path)
        self.path.parent.mkdir(parents=True, exist_ok=True)
        self._fh: Optional[IO[str]] = None

    def _handle(self) -> IO[str]:
        if self._fh is None:
            self._fh = open(self.path, "a", encoding="utf-8")
        return self._fh

    def append(self, record_type: str, record: dict) -> None:
        assert record_type in RECORD_TYPES
        fh = self._handle()
        fh.write(json.dumps({"type": record_type, "record": record}, ensure_ascii=False))
        fh.write("\n")
        fh.flush()
        os.fsync(fh.fileno())

    def close(self) -> None:
        if self._fh is not None:
            self._fh.close()
            self._fh = None

    def read_all(self) -> Iterator[tuple[str, dict]]:
        """Yield (type, record) pairs; raise CorruptJournal on a bad line."""
        if not self.path.exists():
            return
        with open(self.path, "r", encoding="utf-8", newline="\n") as fh:
            data = fh.read()
        if not data:
            return
        if not data.endswith("\n"):
            index = data.count("\n") + 1
            raise CorruptJournal(index, "truncated final record")
        for index, line in enumerate(data.splitlines(), 1):
            try:
                parsed = json.loads(line)
                record_type = parsed["type"]
                record = parsed["record"]
            except (json.JSONDecodeError, KeyError, TypeError) as exc:
                raise CorruptJournal(index, f"undecodable record: {exc}") from exc
            if record_type not in RECORD_TYPES or not isinstance(record, dict):
                raise CorruptJournal(index, f"unknown record type {record_type!r}")
            yield record_type, record
