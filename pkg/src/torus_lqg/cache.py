"""Persistent cache for Monte Carlo moment estimates.

Building a modulus-density table costs one negative-moment estimate per
grid point; these are pure functions of (tau, coupling, insertions,
resolution, seed), so they are memoized in a JSON file keyed by a content
hash of that configuration.  Writes go through a temp file in the same
directory followed by os.replace, so concurrent readers never observe a
partially written store.  A corrupt or foreign-schema file is treated as
empty rather than trusted.

The default location is ~/.cache/torus-lqg; the TORUS_LQG_CACHE_DIR
environment variable overrides it.
"""

from __future__ import annotations

import hashlib
import json
import os
import tempfile
from dataclasses import dataclass
from pathlib import Path

__all__ = ["MomentCache", "default_cache_dir", "moment_key"]

_SCHEMA = 1
_FILENAME = "moments.json"


def default_cache_dir() -> Path:
    override = os.environ.get("TORUS_LQG_CACHE_DIR")
    if override:
        return Path(override)
    return Path.home() / ".cache" / "torus-lqg"


def _canonical(obj) -> str:
    return json.dumps(obj, sort_keys=True, separators=(",", ":"))


def moment_key(
    tau: complex,
    gamma: float,
    insertions,
    cutoff: int,
    grid_factor: int,
    eps: float,
    replicas: int,
    seed: int,
    base_stream: int,
) -> str:
    """Content hash of everything the moment estimate depends on.

    Floats enter as exact hex so the key never aliases two distinct
    configurations; mu is deliberately absent (the moment does not depend
    on it).
    """
    payload = {
        "kind": "negative-moment",
        "tau": [float(tau.real).hex(), float(tau.imag).hex()],
        "gamma": float(gamma).hex(),
        "insertions": [
            [float(i.x1).hex(), float(i.x2).hex(), float(i.alpha).hex()]
            for i in insertions
        ],
        "cutoff": int(cutoff),
        "grid_factor": int(grid_factor),
        "eps": float(eps).hex(),
        "replicas": int(replicas),
        "seed": int(seed),
        "base_stream": int(base_stream),
    }
    return hashlib.sha256(_canonical(payload).encode()).hexdigest()


@dataclass
class MomentCache:
    directory: Path | None = None

    def __post_init__(self):
        if self.directory is None:
            self.directory = default_cache_dir()
        self.directory = Path(self.directory)

    @property
    def path(self) -> Path:
        return self.directory / _FILENAME

    def _load(self) -> dict:
        try:
            with open(self.path, encoding="utf-8") as fh:
                data = json.load(fh)
        except (FileNotFoundError, json.JSONDecodeError):
            return {}
        if not isinstance(data, dict) or data.get("schema") != _SCHEMA:
            return {}
        entries = data.get("entries")
        return entries if isinstance(entries, dict) else {}

    def get(self, key: str) -> dict | None:
        return self._load().get(key)

    def put(self, key: str, record: dict) -> None:
        self.directory.mkdir(parents=True, exist_ok=True)
        entries = self._load()
        entries[key] = record
        payload = {"schema": _SCHEMA, "entries": entries}
        fd, tmp = tempfile.mkstemp(dir=self.directory, suffix=".tmp")
        try:
            with os.fdopen(fd, "w", encoding="utf-8") as fh:
                json.dump(payload, fh, sort_keys=True)
            os.replace(tmp, self.path)
        except BaseException:
            try:
                os.unlink(tmp)
            except FileNotFoundError:
                pass
            raise
