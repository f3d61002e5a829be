"""Brute-force reference implementations for differential testing.

Nothing here imports the storage, topology or label modules. Every oracle
works on plain in-memory data so a format bug cannot leak into the
reference answer.
"""

from __future__ import annotations

import re
import struct
from typing import Callable, Iterable, Mapping, Sequence

_MASK64 = (1 << 64) - 1


def oracle_neighbors(edges: Iterable[Sequence[int]], v: int, direction: str = "out") -> list[int]:
    """Sorted neighbors of ``v`` found by scanning every edge.

    ``direction`` is ``"out"`` (edges leaving ``v``) or ``"in"`` (edges
    arriving at ``v``).
    """
    if direction not in ("out", "in"):
        raise ValueError(f"direction must be 'out' or 'in', got {direction!r}")
    key, other = (0, 1) if direction == "out" else (1, 0)
    return sorted(int(e[other]) for e in edges if int(e[key]) == v)


def oracle_adjacency(edges: Iterable[Sequence[int]], n: int, direction: str = "out") -> list[list[int]]:
    """All neighbor lists at once; same answer as ``oracle_neighbors`` for each vertex."""
    adj: list[list[int]] = [[] for _ in range(n)]
    key, other = (0, 1) if direction == "out" else (1, 0)
    for e in edges:
        adj[int(e[key])].append(int(e[other]))
    for row in adj:
        row.sort()
    return adj


_TOKEN = re.compile(r"\s*(?:([A-Za-z_][A-Za-z0-9_]*)|(.))")


def _compile(expr: str) -> tuple[Callable[[Sequence[bool]], bool], list[str]]:
    names: list[str] = []
    out = []
    for ident, sym in _TOKEN.findall(expr):
        if ident:
            if ident not in names:
                names.append(ident)
            out.append(f"_v[{names.index(ident)}]")
        elif sym in "&|!()":
            out.append({"&": " and ", "|": " or ", "!": " not "}.get(sym, sym))
        elif not sym.isspace():
            raise ValueError(f"unexpected character {sym!r} in {expr!r}")
    code = compile("".join(out).strip() or "False", "<label-expr>", "eval")
    return (lambda values: bool(eval(code, {}, {"_v": values}))), names


def oracle_filter(
    labels: Mapping[str, Sequence[bool]],
    expr: str | Callable[[Mapping[str, bool]], bool],
) -> set[int]:
    """Ids whose labels satisfy ``expr``, checked one vertex at a time.

    ``expr`` is either a string in the ``& | ! ( )`` grammar or a predicate
    receiving a ``{label: bool}`` dict.
    """
    lengths = {len(col) for col in labels.values()}
    if len(lengths) > 1:
        raise ValueError("label columns differ in length")
    n = lengths.pop() if lengths else 0
    if callable(expr):
        return {i for i in range(n) if expr({k: bool(col[i]) for k, col in labels.items()})}
    fn, names = _compile(expr)
    for name in names:
        if name not in labels:
            raise KeyError(name)
    cols = [labels[name] for name in names]
    return {i for i in range(n) if fn([bool(c[i]) for c in cols])}


def _naive_delta_encode(values: Sequence[int]) -> bytes:
    out = bytearray(struct.pack("<Q", len(values)))
    prev = 0
    for i, x in enumerate(values):
        x = int(x)
        word = x if i == 0 else x - prev
        out += struct.pack("<Q", word & _MASK64)
        prev = x
    return bytes(out)


def _naive_delta_decode(buf: bytes) -> list[int]:
    (count,) = struct.unpack_from("<Q", buf, 0)
    values = []
    acc = 0
    for i in range(count):
        (word,) = struct.unpack_from("<Q", buf, 8 + 8 * i)
        acc = word if i == 0 else (acc + word) & _MASK64
        values.append(acc - (1 << 64) if acc >= 1 << 63 else acc)
    return values


def oracle_delta_roundtrip(values: Sequence[int]) -> bool:
    """Encode as first value plus 64-bit wrapping deltas, decode, compare."""
    original = [int(x) for x in values]
    return _naive_delta_decode(_naive_delta_encode(original)) == original


def oracle_intervals(bits: Sequence[bool]) -> tuple[int, list[int]]:
    """``(first_value, P)`` of a boolean sequence: run starts plus the end."""
    if not len(bits):
        return 0, [0]
    bounds = [0] + [i for i in range(1, len(bits)) if bool(bits[i]) != bool(bits[i - 1])] + [len(bits)]
    return int(bool(bits[0])), bounds


def oracle_pac(ids: Iterable[int], page_rows: int) -> dict[int, list[int]]:
    """``{page: sorted in-page offsets}`` for a set of row ids."""
    pages: dict[int, set[int]] = {}
    for i in ids:
        pages.setdefault(int(i) // page_rows, set()).add(int(i) % page_rows)
    return {p: sorted(s) for p, s in sorted(pages.items())}


def oracle_neighbor_properties(
    edges: Iterable[Sequence[int]], v: int, column: Sequence, direction: str = "out"
) -> list[tuple[int, object]]:
    """Two-step reference: adjacency scan, then a row lookup per neighbor."""
    return [(u, column[u]) for u in oracle_neighbors(edges, v, direction)]
