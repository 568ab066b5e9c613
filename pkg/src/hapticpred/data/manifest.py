"""Dataset manifest: which textures exist and where their files live."""
from __future__ import annotations

import json
from dataclasses import asdict, dataclass, field
from pathlib import Path

from ..errors import ManifestError

MANIFEST_VERSION = 1
_PATH_KEYS = ("raw_dir", "processed", "tactile_features", "image_features")


@dataclass
class TextureEntry:
    texture_id: str
    class_label: str
    raw_dir: str | None = None
    processed: str | None = None
    tactile_features: str | None = None
    image_features: str | None = None
    split: str = "all"


@dataclass
class Manifest:
    textures: list = field(default_factory=list)
    ratings: str | None = None
    root: str = "."
    version: int = MANIFEST_VERSION

    @property
    def texture_ids(self):
        return [t.texture_id for t in self.textures]

    @property
    def classes(self):
        return sorted({t.class_label for t in self.textures})

    def resolve(self, rel) -> Path:
        return (Path(self.root) / rel) if rel is not None else None

    def to_dict(self) -> dict:
        return {"version": self.version, "ratings": self.ratings,
                "textures": [asdict(t) for t in self.textures]}


def manifest_save(path, manifest: Manifest) -> None:
    text = json.dumps(manifest.to_dict(), indent=2, sort_keys=True) + "\n"
    Path(path).write_text(text)


def manifest_load(path, check_files: bool = True) -> Manifest:
    """Parse a manifest; relative paths resolve against the manifest's directory."""
    path = Path(path)
    try:
        data = json.loads(path.read_text())
    except OSError as exc:
        raise ManifestError(f"cannot read manifest {path}: {exc}", path=str(path)) from exc
    except ValueError as exc:
        raise ManifestError(f"manifest {path} is not valid JSON: {exc}", path=str(path)) from exc
    if data.get("version") != MANIFEST_VERSION:
        raise ManifestError(f"unsupported manifest version {data.get('version')}", path=str(path))
    try:
        entries = [TextureEntry(**t) for t in data["textures"]]
    except (KeyError, TypeError) as exc:
        raise ManifestError(f"malformed manifest {path}: {exc}", path=str(path)) from exc
    m = Manifest(entries, data.get("ratings"), root=str(path.parent))
    if check_files:
        refs = [m.ratings] + [getattr(t, k) for t in entries for k in _PATH_KEYS]
        for rel in refs:
            if rel is not None and not m.resolve(rel).exists():
                raise ManifestError(f"manifest references missing file {rel}", path=rel)
    return m
