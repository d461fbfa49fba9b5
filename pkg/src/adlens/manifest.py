"""Run manifests embedded in every emitted report.

Reports are deterministic for identical inputs and seed; the manifest's
wall time and creation timestamp are the only volatile fields, and the
determinism digest is computed with them removed.
"""

from __future__ import annotations

import datetime as dt
import hashlib
import json
import math
import time
from pathlib import Path

import adlens

_VOLATILE_FIELDS = ("wall_time_s", "created")


def file_digest(path: str | Path) -> str:
    h = hashlib.sha256()
    with open(path, "rb") as fh:
        for chunk in iter(lambda: fh.read(1 << 20), b""):
            h.update(chunk)
    return h.hexdigest()


def _json_safe(obj):
    """Replace non-finite floats (inf statistics etc.) with strings."""
    if isinstance(obj, float):
        return obj if math.isfinite(obj) else repr(obj)
    if isinstance(obj, dict):
        return {k: _json_safe(v) for k, v in obj.items()}
    if isinstance(obj, (list, tuple)):
        return [_json_safe(v) for v in obj]
    return obj


def canonical_json(payload) -> str:
    return json.dumps(_json_safe(payload), sort_keys=True, ensure_ascii=False, allow_nan=False)


class RunTimer:
    def __init__(self):
        self.started = time.monotonic()

    def elapsed(self) -> float:
        return time.monotonic() - self.started


def build_manifest(
    command: str,
    args: dict,
    inputs: dict[str, str | Path],
    seed: int | None,
    timer: RunTimer,
) -> dict:
    return {
        "command": command,
        "args_digest": hashlib.sha256(canonical_json(args).encode()).hexdigest(),
        "args": args,
        "input_digests": {name: file_digest(p) for name, p in sorted(inputs.items())},
        "seed": seed,
        "tool_version": adlens.__version__,
        "wall_time_s": timer.elapsed(),
        "created": dt.datetime.now(dt.timezone.utc).isoformat(),
    }


def determinism_digest(report: dict) -> str:
    """Hash of the report with the volatile manifest fields removed."""
    scrubbed = dict(report)
    manifest = dict(scrubbed.get("manifest", {}))
    for key in _VOLATILE_FIELDS + ("determinism_digest",):
        manifest.pop(key, None)
    scrubbed["manifest"] = manifest
    return hashlib.sha256(canonical_json(scrubbed).encode()).hexdigest()


def finish_report(payload: dict, manifest: dict) -> dict:
    report = {"manifest": manifest, **payload}
    report["manifest"]["determinism_digest"] = determinism_digest(report)
    return report


def write_report(path: str | Path, report: dict) -> None:
    Path(path).write_text(
        json.dumps(_json_safe(report), indent=1, sort_keys=True, ensure_ascii=False) + "\n",
        encoding="utf-8",
    )
