"""Content-addressed result cache with checksums, atomic writes and an advisory lock."""

from __future__ import annotations

import hashlib
import json
import logging
import os
import tempfile
from pathlib import Path
from typing import Any, Optional

from filelock import FileLock

log = logging.getLogger(__name__)

ENV_VAR = "DIOPHLAB_CACHE"


def canonical(obj: Any) -> str:
    return json.dumps(obj, sort_keys=True, separators=(",", ":"), default=str)


def digest(text: str) -> str:
    return hashlib.sha256(text.encode()).hexdigest()


class Store:
    """Maps (operation, arguments) to a JSON payload on disk.

    Entries live at ``root/<op>/<sha256 of canonical args>.json`` and embed a
    checksum of their payload; a mismatch or parse failure counts as a miss.
    """

    def __init__(self, root: os.PathLike | str):
        self.root = Path(root)
        self.root.mkdir(parents=True, exist_ok=True)
        self._lock = FileLock(str(self.root / ".lock"))

    @classmethod
    def from_env(cls, fallback: Optional[str] = None) -> Optional["Store"]:
        path = os.environ.get(ENV_VAR) or fallback
        return cls(path) if path else None

    def path(self, op: str, args: dict) -> Path:
        return self.root / op / f"{digest(canonical({'op': op, 'args': args}))}.json"

    def get(self, op: str, args: dict) -> Optional[Any]:
        p = self.path(op, args)
        try:
            entry = json.loads(p.read_text())
            payload = canonical(entry["payload"])
            if entry["sha256"] != digest(payload) or entry["args"] != json.loads(canonical(args)):
                raise ValueError("checksum mismatch")
        except FileNotFoundError:
            return None
        except (ValueError, KeyError, TypeError) as exc:
            log.warning("discarding corrupt cache entry %s: %s", p, exc)
            return None
        return entry["payload"]

    def put(self, op: str, args: dict, payload: Any) -> None:
        p = self.path(op, args)
        p.parent.mkdir(parents=True, exist_ok=True)
        body = canonical({"op": op, "args": json.loads(canonical(args)), "payload": payload,
                          "sha256": digest(canonical(payload))})
        with self._lock:
            fd, tmp = tempfile.mkstemp(dir=p.parent, suffix=".tmp")
            try:
                with os.fdopen(fd, "w") as fh:
                    fh.write(body)
                    fh.flush()
                    os.fsync(fh.fileno())
                os.replace(tmp, p)
            except BaseException:
                if os.path.exists(tmp):
                    os.unlink(tmp)
                raise
