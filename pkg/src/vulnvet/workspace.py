"""Workspace layout and atomic artifact IO.

Analyses persist intermediate artifacts under ``.vet/`` so the scan steps
compose incrementally in any order. All JSON artifacts are written with
sorted keys and no wall-clock data, so reruns on an unchanged workspace are
byte-identical.
"""

from __future__ import annotations

import json
import os
from pathlib import Path

ARTIFACT_DIR = ".vet"


class Workspace:
    def __init__(self, root: Path, kb_path: Path = None):
        self.root = Path(root)
        self.kb_path = Path(kb_path) if kb_path else self.root / "kb"

    @classmethod
    def discover(cls, root=None, kb_path=None) -> "Workspace":
        root = root or os.environ.get("VET_WORKSPACE") or "."
        return cls(Path(root), kb_path)

    @property
    def manifest(self) -> Path:
        return self.root / "app.json"

    @property
    def artifact_dir(self) -> Path:
        return self.root / ARTIFACT_DIR

    def artifact(self, name: str) -> Path:
        return self.artifact_dir / name

    def write_text(self, name: str, text: str) -> Path:
        self.artifact_dir.mkdir(parents=True, exist_ok=True)
        path = self.artifact(name)
        tmp = path.with_name(path.name + ".tmp")
        tmp.write_text(text, encoding="utf-8")
        tmp.replace(path)
        return path

    def write_json(self, name: str, data) -> Path:
        return self.write_text(name, json.dumps(data, indent=2, sort_keys=True) + "\n")

    def read_json(self, name: str, default=None):
        path = self.artifact(name)
        if not path.is_file():
            return default
        return json.loads(path.read_text(encoding="utf-8"))

    def has_artifact(self, name: str) -> bool:
        return self.artifact(name).is_file()
