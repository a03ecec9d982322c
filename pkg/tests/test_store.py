"""Content-hashed artifact storage and manifest handling."""

import hashlib
import json

import pytest

from medreason.store import (
    read_artifact,
    read_manifest,
    save_engine_artifacts,
    write_artifact,
    write_manifest,
)


class TestArtifacts:
    def test_name_embeds_content_hash(self, tmp_path):
        name = write_artifact(tmp_path, "rules", "a -> b\n", ".swrlx")
        digest = hashlib.sha256(b"a -> b\n").hexdigest()[:16]
        assert name == f"rules-{digest}.swrlx"
        assert (tmp_path / name).read_text() == "a -> b\n"

    def test_round_trip(self, tmp_path):
        name = write_artifact(tmp_path, "matrix", "disease,x\nA,1\n", ".csv")
        assert read_artifact(tmp_path, name) == "disease,x\nA,1\n"

    def test_identical_content_reuses_file(self, tmp_path):
        first = write_artifact(tmp_path, "m", "same", ".txt")
        second = write_artifact(tmp_path, "m", "same", ".txt")
        assert first == second
        assert len(list(tmp_path.iterdir())) == 1

    def test_creates_directories(self, tmp_path):
        nested = tmp_path / "a" / "b"
        name = write_artifact(nested, "m", "x", ".txt")
        assert (nested / name).is_file()

    def test_tampering_detected(self, tmp_path):
        name = write_artifact(tmp_path, "rules", "a -> b\n", ".swrlx")
        (tmp_path / name).write_text("tampered")
        with pytest.raises(ValueError, match="corrupt"):
            read_artifact(tmp_path, name)


class TestManifest:
    def test_round_trip(self, tmp_path):
        write_manifest(tmp_path, {"rules": "rules-abc.swrlx"})
        assert read_manifest(tmp_path) == {"rules": "rules-abc.swrlx"}

    def test_missing_manifest(self, tmp_path):
        with pytest.raises(FileNotFoundError, match="manifest.json"):
            read_manifest(tmp_path)

    def test_non_object_manifest(self, tmp_path):
        (tmp_path / "manifest.json").write_text(json.dumps(["not", "a", "dict"]))
        with pytest.raises(ValueError, match="must hold an object"):
            read_manifest(tmp_path)


class TestEngineArtifacts:
    def test_kb_only(self, tmp_path):
        entries = save_engine_artifacts(tmp_path, "disease,x\nA,1\n", "a -> b\n")
        assert set(entries) == {"matrix", "rules"}
        assert read_manifest(tmp_path) == entries
        assert read_artifact(tmp_path, entries["matrix"]).startswith("disease")

    def test_with_model(self, tmp_path):
        entries = save_engine_artifacts(
            tmp_path, "disease,x\nA,1\n", "a -> b\n", model_json='{"kind": "MNB"}')
        assert set(entries) == {"matrix", "rules", "model"}
        assert json.loads(read_artifact(tmp_path, entries["model"])) == {"kind": "MNB"}
