"""Bundled example specs and the layout of the block-size table."""

from __future__ import annotations

from importlib import resources
from pathlib import Path

from .jordan import ElementaryDivisorSpec

BUILTIN = ("a1", "a2", "a3", "a4", "a5", "gf2_mixed")

TABLE1_CASES = ("a1", "a2", "a3", "a4", "a5")
TABLE1_BLOCKS = (1, 2, 3, 4)

# decimals shown per cell, row-major over TABLE1_CASES x TABLE1_BLOCKS
TABLE1_DIGITS = (
    (3, 3, 5, 7),
    (3, 3, 3, 4),
    (3, 3, 3, 4),
    (3, 3, 3, 4),
    (3, 3, 3, 3),
)


def builtin_path(name: str) -> Path:
    return Path(str(resources.files("blockpmp") / "specs" / f"{name}.json"))


def load_spec(name_or_path: str) -> ElementaryDivisorSpec:
    """Load a spec file, or a bundled one by name (``a1`` .. ``a5``)."""
    key = name_or_path.lower().removesuffix(".json")
    if key in BUILTIN and not Path(name_or_path).exists():
        return ElementaryDivisorSpec.load(builtin_path(key))
    return ElementaryDivisorSpec.load(name_or_path)


def table1_specs() -> list[tuple[str, ElementaryDivisorSpec]]:
    return [(name.upper(), load_spec(name)) for name in TABLE1_CASES]
