"""Content-addressed on-disk cache for fixed-point sums.

Keys are SHA-256 digests of a canonical JSON encoding of the computation
inputs (surface, equivariant weights, n, mode, seed, schema version); the
stored value is the serialized QResult.  Writes publish atomically via a
rename, so concurrent workers can share a cache directory.
"""

from __future__ import annotations

import hashlib
import json
import os
import tempfile
from pathlib import Path
from typing import Any, Mapping, Optional

ENV_CACHE_DIR = "VWMONO_CACHE_DIR"


def default_cache_dir() -> Path:
    env = os.environ.get(ENV_CACHE_DIR)
    if env:
        return Path(env)
    xdg = os.environ.get("XDG_CACHE_HOME")
    base = Path(xdg) if xdg else Path.home() / ".cache"
    return base / "vwmonopole"


def _digest(key: Mapping[str, Any]) -> str:
    payload = json.dumps(key, sort_keys=True, separators=(",", ":"))
    return hashlib.sha256(payload.encode("utf-8")).hexdigest()


class ResultCache:
    def __init__(self, root: Path | str | None = None, enabled: bool = True):
        self.root = Path(root) if root is not None else default_cache_dir()
        self.enabled = enabled
        self.hits = 0
        self.misses = 0

    def _path(self, digest: str) -> Path:
        return self.root / digest[:2] / f"{digest}.json"

    def get(self, key: Mapping[str, Any]) -> Optional[dict]:
        if not self.enabled:
            return None
        path = self._path(_digest(key))
        try:
            with open(path, "r", encoding="utf-8") as fh:
                record = json.load(fh)
        except (OSError, json.JSONDecodeError):
            self.misses += 1
            return None
        self.hits += 1
        return record["value"]

    def put(self, key: Mapping[str, Any], value: dict) -> None:
        if not self.enabled:
            return
        digest = _digest(key)
        path = self._path(digest)
        path.parent.mkdir(parents=True, exist_ok=True)
        record = {"key": dict(key), "value": value}
        fd, tmp = tempfile.mkstemp(dir=path.parent, suffix=".tmp")
        try:
            with os.fdopen(fd, "w", encoding="utf-8") as fh:
                json.dump(record, fh, sort_keys=True)
            os.replace(tmp, path)
        except BaseException:
            try:
                os.unlink(tmp)
            except OSError:
                pass
            raise

    def entries(self):
        if not self.root.is_dir():
            return
        for sub in sorted(self.root.iterdir()):
            if not sub.is_dir():
                continue
            for path in sorted(sub.glob("*.json")):
                yield path

    def gc(self, current_schema: int, remove_all: bool = False) -> int:
        """Remove stale (or all) entries; returns the number deleted."""
        removed = 0
        for path in list(self.entries() or []):
            drop = remove_all
            if not drop:
                try:
                    with open(path, "r", encoding="utf-8") as fh:
                        record = json.load(fh)
                    drop = record.get("key", {}).get("schema") != current_schema
                except (OSError, json.JSONDecodeError):
                    drop = True
            if drop:
                path.unlink(missing_ok=True)
                removed += 1
        return removed
