# backend/app/utils/records.py
# Result files, digests and the append-only result store

import csv
import hashlib
import json
import logging
import os
import threading
from enum import Enum
from typing import Any, Dict, List, Optional, Sequence

import numpy as np

from app.exceptions import ResultIOError
from app.utils.constants import OutputFormat

logger = logging.getLogger(__name__)


def _plain(value: Any) -> Any:
    """Convert numpy scalars/arrays and enums into JSON-friendly values."""
    if isinstance(value, np.ndarray):
        return [_plain(item) for item in value.tolist()]
    if isinstance(value, np.generic):
        return value.item()
    if isinstance(value, (list, tuple)):
        return [_plain(item) for item in value]
    if isinstance(value, dict):
        return {str(key): _plain(item) for key, item in value.items()}
    if isinstance(value, Enum):
        return value.value
    return value


def canonical_json(payload: Any) -> str:
    return json.dumps(_plain(payload), sort_keys=True, separators=(",", ":"))


def content_key(module: str, inputs: Dict[str, Any]) -> str:
    """sha256 of (module, inputs); identical inputs always map to the same key."""
    return hashlib.sha256(canonical_json([module, inputs]).encode("utf-8")).hexdigest()


def file_digest(path: str) -> str:
    digest = hashlib.sha256()
    with open(path, "rb") as handle:
        for chunk in iter(lambda: handle.read(65536), b""):
            digest.update(chunk)
    return digest.hexdigest()


def write_records(
    records: Sequence[Dict[str, Any]],
    path: str,
    fmt: OutputFormat,
    columns: Optional[List[str]] = None,
) -> str:
    """Write records with a fixed column order; returns the sha256 of the written file."""
    if columns is None:
        columns = []
        for record in records:
            for key in record:
                if key not in columns:
                    columns.append(key)
    try:
        os.makedirs(os.path.dirname(os.path.abspath(path)), exist_ok=True)
        if fmt == OutputFormat.CSV:
            with open(path, "w", newline="", encoding="utf-8") as handle:
                writer = csv.writer(handle, lineterminator="\n")
                writer.writerow(columns)
                for record in records:
                    writer.writerow([_csv_cell(record.get(column)) for column in columns])
        else:
            ordered = [{column: _plain(record.get(column)) for column in columns} for record in records]
            with open(path, "w", encoding="utf-8") as handle:
                json.dump(ordered, handle, indent=2)
                handle.write("\n")
    except OSError as e:
        logger.error(f"Error writing {path}: {str(e)}")
        raise ResultIOError(path, str(e))
    return file_digest(path)


def _csv_cell(value: Any) -> str:
    value = _plain(value)
    if value is None:
        return ""
    if isinstance(value, float):
        return repr(value)
    if isinstance(value, (list, dict)):
        return json.dumps(value, sort_keys=True)
    return str(value)


def write_json(payload: Any, path: str) -> str:
    try:
        os.makedirs(os.path.dirname(os.path.abspath(path)), exist_ok=True)
        with open(path, "w", encoding="utf-8") as handle:
            json.dump(_plain(payload), handle, indent=2, sort_keys=True)
            handle.write("\n")
    except OSError as e:
        logger.error(f"Error writing {path}: {str(e)}")
        raise ResultIOError(path, str(e))
    return file_digest(path)


class ResultStore:
    """Append-only JSONL store keyed by content hash of (module, inputs)."""

    def __init__(self, path: Optional[str]):
        self.path = path
        self._lock = threading.Lock()
        self._cache: Dict[str, Any] = {}
        if path and os.path.exists(path):
            self._load()

    def _load(self) -> None:
        try:
            with open(self.path, encoding="utf-8") as handle:
                for line in handle:
                    line = line.strip()
                    if not line:
                        continue
                    try:
                        entry = json.loads(line)
                    except json.JSONDecodeError:
                        logger.warning(f"Skipping corrupt line in result store {self.path}")
                        continue
                    self._cache[entry["key"]] = entry["result"]
        except OSError as e:
            logger.warning(f"Could not read result store {self.path}: {str(e)}")

    def get(self, module: str, inputs: Dict[str, Any]) -> Optional[Any]:
        return self._cache.get(content_key(module, inputs))

    def put(self, module: str, inputs: Dict[str, Any], result: Any) -> None:
        key = content_key(module, inputs)
        with self._lock:
            if key in self._cache:
                return
            self._cache[key] = _plain(result)
            if not self.path:
                return
            line = json.dumps(
                {"key": key, "module": module, "inputs": _plain(inputs), "result": _plain(result)},
                sort_keys=True,
            )
            try:
                os.makedirs(os.path.dirname(os.path.abspath(self.path)), exist_ok=True)
                with open(self.path, "a", encoding="utf-8") as handle:
                    handle.write(line + "\n")
            except OSError as e:
                logger.error(f"Error appending to result store {self.path}: {str(e)}")
                raise ResultIOError(self.path, str(e))


_default_store = ResultStore(None)


def get_store() -> ResultStore:
    return _default_store


def set_store(store: ResultStore) -> None:
    global _default_store
    _default_store = store
