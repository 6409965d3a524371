"""On-disk result cache keyed by family content hash."""

from __future__ import annotations

import json
import os
import tempfile
from pathlib import Path

ENV_VAR = "MPAT_CACHE_DIR"


def resolve_cache_dir(flag: str | None) -> Path | None:
    env = os.environ.get(ENV_VAR)
    if env:
        return Path(env)
    return Path(flag) if flag else None


class ResultCache:
    """One JSON file per (family hash, function, n).

    Only exact results are stored.  Writes go to a temporary file in the
    same directory and are renamed into place.
    """

    def __init__(self, root: str | Path):
        self.root = Path(root)

    def _path(self, fam_hash: str, function: str, n: int) -> Path:
        return self.root / f"{fam_hash}-{function}-{n}.json"

    def get(self, fam_hash: str, function: str, n: int) -> dict | None:
        path = self._path(fam_hash, function, n)
        try:
            return json.loads(path.read_text())
        except FileNotFoundError:
            return None
        except json.JSONDecodeError:
            return None

    def put(self, record: dict) -> None:
        self.root.mkdir(parents=True, exist_ok=True)
        path = self._path(record["family_hash"], record["function"], record["n"])
        fd, tmp = tempfile.mkstemp(dir=self.root, prefix=".tmp-", suffix=".json")
        try:
            with os.fdopen(fd, "w") as fh:
                json.dump(record, fh, sort_keys=True)
            os.replace(tmp, path)
        except BaseException:
            if os.path.exists(tmp):
                os.unlink(tmp)
            raise
