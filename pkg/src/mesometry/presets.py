"""Bundled figure-reproduction presets (flat key=value text files)."""

from __future__ import annotations

from importlib import resources
from pathlib import Path


def list_presets() -> list[str]:
    files = resources.files(__package__) / "presets"
    return sorted(p.name[: -len(".cfg")] for p in files.iterdir() if p.name.endswith(".cfg"))


def load_preset(name: str) -> dict[str, str]:
    """Load a bundled preset by name, or any key=value file by path."""
    path = Path(name)
    if path.suffix == ".cfg" and path.exists():
        text = path.read_text()
    else:
        candidate = resources.files(__package__) / "presets" / f"{name}.cfg"
        if not candidate.is_file():
            raise ValueError(
                f"unknown preset {name!r}; bundled presets: {', '.join(list_presets())}"
            )
        text = candidate.read_text()
    out: dict[str, str] = {}
    for lineno, raw in enumerate(text.splitlines(), start=1):
        line = raw.strip()
        if not line or line.startswith("#"):
            continue
        key, eq, value = line.partition("=")
        if not eq:
            raise ValueError(f"{name}:{lineno}: expected key = value, got {raw!r}")
        out[key.strip()] = value.strip()
    return out


def split_floats(value: str) -> list[float]:
    return [float(tok) for tok in value.split(",") if tok.strip()]


def split_ints(value: str) -> list[int]:
    return [int(tok) for tok in value.split(",") if tok.strip()]


def split_names(value: str) -> list[str]:
    return [tok.strip() for tok in value.split(",") if tok.strip()]
