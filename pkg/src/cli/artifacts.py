"""Artifact files and the run manifest"""

import hashlib
import json
from importlib.metadata import version
from pathlib import Path
from typing import Any, Dict, List, Optional, Sequence

import numpy as np
import pandas as pd

from src import __version__
from src.characteristic.semilinear_solver import SingularEvent
from src.characteristic.transform import CharState
from src.core.grid_function import GridFunction
from src.peakons.dynamics import PeakonState, PeakonTrajectory

FLOAT_FORMAT = "%.17g"


def git_blob_hash(text: str) -> str:
    """sha1 of ``blob <len>\\0<content>``, as git hashes a file"""
    data = text.encode("utf-8")
    return hashlib.sha1(b"blob %d\0" % len(data) + data).hexdigest()


def sha256_file(path: Path) -> str:
    digest = hashlib.sha256()
    with open(path, "rb") as f:
        for chunk in iter(lambda: f.read(1 << 16), b""):
            digest.update(chunk)
    return digest.hexdigest()


def _jsonable(obj: Any) -> Any:
    if isinstance(obj, dict):
        return {str(k): _jsonable(v) for k, v in obj.items()}
    if isinstance(obj, (list, tuple)):
        return [_jsonable(v) for v in obj]
    if isinstance(obj, np.ndarray):
        return _jsonable(obj.tolist())
    if isinstance(obj, np.generic):
        return obj.item()
    if isinstance(obj, float) and not np.isfinite(obj):
        return None
    if isinstance(obj, Path):
        return str(obj)
    if hasattr(obj, "model_dump"):
        return _jsonable(obj.model_dump(mode="json"))
    return obj


def dumps(obj: Any) -> str:
    return json.dumps(_jsonable(obj), sort_keys=True, indent=2) + "\n"


def library_versions() -> Dict[str, str]:
    versions = {"novikov-lab": __version__}
    for package in ("numpy", "scipy", "pandas", "pydantic"):
        versions[package] = version(package)
    return versions


class ArtifactWriter:
    """Writes run artifacts under one directory and remembers them for the manifest"""

    def __init__(self, out_dir: Path):
        self.out_dir = Path(out_dir)
        self.out_dir.mkdir(parents=True, exist_ok=True)
        self.files: List[str] = []

    def _path(self, name: str) -> Path:
        path = self.out_dir / name
        path.parent.mkdir(parents=True, exist_ok=True)
        if name not in self.files:
            self.files.append(name)
        return path

    def write_csv(self, name: str, frame: pd.DataFrame) -> Path:
        path = self._path(name)
        frame.to_csv(path, index=False, float_format=FLOAT_FORMAT)
        return path

    def write_json(self, name: str, obj: Any) -> Path:
        path = self._path(name)
        path.write_text(dumps(obj))
        return path

    def write_char_archive(
        self,
        states: Sequence[CharState],
        events: Sequence[SingularEvent],
        prefix: str = "slices",
    ) -> Path:
        """One CSV per stored slice plus an index JSON {times, grid, events, files}"""
        names = []
        for k, s in enumerate(states):
            name = f"{prefix}/slice_{k:05d}.csv"
            self.write_csv(name, s.to_frame())
            names.append(name)
        first = states[0]
        index = {
            "times": [s.t for s in states],
            "grid": {"Y0": first.Y0, "dY": first.dY, "n": first.n, "breaks": list(first.breaks)},
            "events": [e.to_dict() for e in events],
            "files": names,
        }
        return self.write_json(f"{prefix}/index.json", index)

    def write_partial(self, partial: Sequence[Any]) -> Optional[str]:
        """Whatever a failed run computed: a slice archive, a peakon trajectory or the last field"""
        if not partial:
            return None
        last = partial[-1]
        if isinstance(last, CharState):
            self.write_char_archive(partial, [], prefix="partial")
            return "partial/index.json"
        if isinstance(last, PeakonState):
            self.write_csv("partial.csv", PeakonTrajectory(states=list(partial)).to_frame())
            return "partial.csv"
        if isinstance(last, GridFunction):
            self.write_csv("partial.csv", last.to_frame())
            return "partial.csv"
        return None

    def write_manifest(
        self,
        config: Dict[str, Any],
        input_hash: str,
        times: Sequence[float],
        events: Sequence[SingularEvent],
        stats: Optional[Dict[str, float]] = None,
    ) -> Path:
        """Manifest listing every artifact with its SHA-256; only ``stats`` varies between reruns"""
        manifest = {
            "config": config,
            "versions": library_versions(),
            "input_hash": input_hash,
            "times": list(times),
            "events": [e.to_dict() for e in events],
            "files": {name: sha256_file(self.out_dir / name) for name in sorted(self.files)},
            "stats": stats or {},
        }
        path = self.out_dir / "manifest.json"
        path.write_text(dumps(manifest))
        return path
