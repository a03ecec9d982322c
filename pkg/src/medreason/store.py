"""Content-hashed artifact directory with a manifest for reproducible loads."""

from __future__ import annotations

import hashlib
import json
import logging
from pathlib import Path

log = logging.getLogger(__name__)

MANIFEST_NAME = "manifest.json"


def write_artifact(directory: str | Path, kind: str, content: str, suffix: str) -> str:
    """Store content under a name derived from its own hash; returns the name."""
    directory = Path(directory)
    directory.mkdir(parents=True, exist_ok=True)
    digest = hashlib.sha256(content.encode("utf-8")).hexdigest()[:16]
    name = f"{kind}-{digest}{suffix}"
    path = directory / name
    if not path.exists():
        path.write_text(content, encoding="utf-8")
    return name


def write_manifest(directory: str | Path, entries: dict[str, str]) -> None:
    """entries: artifact kind -> file name inside the directory."""
    path = Path(directory) / MANIFEST_NAME
    path.write_text(json.dumps(entries, indent=2, sort_keys=True) + "\n", "utf-8")
    log.info("wrote manifest with %d entries to %s", len(entries), path)


def read_manifest(directory: str | Path) -> dict[str, str]:
    path = Path(directory) / MANIFEST_NAME
    if not path.is_file():
        raise FileNotFoundError(f"no {MANIFEST_NAME} in {directory}")
    entries = json.loads(path.read_text("utf-8"))
    if not isinstance(entries, dict):
        raise ValueError(f"{path} must hold an object")
    return entries


def read_artifact(directory: str | Path, name: str) -> str:
    path = Path(directory) / name
    content = path.read_text("utf-8")
    expected = name.split("-")[-1].split(".")[0]
    actual = hashlib.sha256(content.encode("utf-8")).hexdigest()[:16]
    if actual != expected:
        raise ValueError(f"artifact {name} is corrupt (hash {actual})")
    return content


def save_engine_artifacts(
    directory: str | Path,
    matrix_csv: str,
    rules_text: str,
    model_json: str | None = None,
) -> dict[str, str]:
    """Persist the KB trio and return the manifest mapping."""
    entries = {
        "matrix": write_artifact(directory, "matrix", matrix_csv, ".csv"),
        "rules": write_artifact(directory, "rules", rules_text, ".swrlx"),
    }
    if model_json is not None:
        entries["model"] = write_artifact(directory, "model", model_json, ".json")
    write_manifest(directory, entries)
    return entries
