from __future__ import annotations

import hashlib
import json
from dataclasses import asdict
from datetime import datetime, timezone
from pathlib import Path
from typing import Any

from .config import config_to_dict
from .model import ModelConfig, RunManifest

TOOL_VERSION = "0.1.0"
HASH_NAME = "sha256"


def canonical_json(data: Any) -> bytes:
    return json.dumps(data, sort_keys=True, separators=(",", ":"), ensure_ascii=False).encode("utf-8")


def digest_bytes(payload: bytes) -> str:
    """sha256 over the payload with CRLF and lone CR folded to LF."""
    normalized = payload.replace(b"\r\n", b"\n").replace(b"\r", b"\n")
    return hashlib.sha256(normalized).hexdigest()


def digest_file(path: str | Path) -> str:
    return digest_bytes(Path(path).read_bytes())


def digest_config(config: ModelConfig) -> str:
    return hashlib.sha256(canonical_json(config_to_dict(config))).hexdigest()


def utc_timestamp() -> str:
    return datetime.now(timezone.utc).replace(microsecond=0).isoformat().replace("+00:00", "Z")


def build_manifest(
    config: ModelConfig,
    input_digest: str,
    *,
    rng_identity: str | None = None,
    parameters: dict[str, Any] | None = None,
) -> RunManifest:
    return RunManifest(
        tool_version=TOOL_VERSION,
        config_digest=digest_config(config),
        input_digest=input_digest,
        timestamp=utc_timestamp(),
        rng_identity=rng_identity,
        parameters=dict(parameters or {}),
    )


def manifest_path_for(output: str | Path) -> Path:
    output = Path(output)
    return output.with_name(f"{output.stem}.manifest.json")


def write_manifest(manifest: RunManifest, path: str | Path) -> None:
    payload = asdict(manifest)
    payload["hash"] = HASH_NAME
    if manifest.rng_identity is None:
        del payload["rng_identity"]
    Path(path).write_text(json.dumps(payload, indent=2, sort_keys=True) + "\n", encoding="utf-8")
