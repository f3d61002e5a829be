from __future__ import annotations

from pathlib import Path

import pytest

from lpgar.ingest import build_archive
from lpgar.schema import load_schema

TOY = Path(__file__).parent / "data" / "toy"

# The toy edge set used throughout: (0,5), (0,1), (2,3) over six persons.
TOY_EDGES = [(0, 5), (0, 1), (2, 3)]
TOY_LABELS = {
    "Asian": [True, True, False, False, True, False],
    "Enrollee": [True, False, False, True, False, False],
}
TOY_NAMES = ["Ada", "Bo", "Cy", "Di", "Ed", "Fay"]


@pytest.fixture
def toy_dir() -> Path:
    return TOY


@pytest.fixture
def toy_archive(tmp_path: Path) -> Path:
    out = tmp_path / "toy"
    build_archive(
        load_schema(TOY / "schema.yaml"),
        {"Person": TOY / "Person.csv"},
        {"Person_Knows_Person": TOY / "Person_Knows_Person.csv"},
        out,
    )
    return out


def random_expr(rng, labels, depth: int = 3) -> str:
    """Random expression text over ``labels`` in the ``& | ! ( )`` grammar."""
    if depth == 0 or rng.random() < 0.3:
        atom = labels[int(rng.integers(len(labels)))]
        return f"!{atom}" if rng.random() < 0.3 else atom
    op = "&" if rng.random() < 0.5 else "|"
    text = f"{random_expr(rng, labels, depth - 1)}{op}{random_expr(rng, labels, depth - 1)}"
    if rng.random() < 0.3:
        return f"!({text})"
    return f"({text})" if rng.random() < 0.5 else text


def clustered_labels(rng, n: int, k: int, mean_run: float = 20.0) -> dict[str, list[bool]]:
    out = {}
    for j in range(k):
        bits, value = [], bool(rng.integers(2))
        while len(bits) < n:
            bits.extend([value] * int(rng.geometric(1.0 / mean_run)))
            value = not value
        out[f"L{j}"] = bits[:n]
    return out
