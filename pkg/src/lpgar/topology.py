"""Sorted edge tables with an offset index, and neighbor retrieval into PACs.

An edge table is stored once per orientation. CSR sorts by ``(src, dst)``
and indexes by source; CSC sorts by ``(dst, src)`` and indexes by
destination. ``offset[v]:offset[v + 1]`` is the row range of key vertex
``v`` in both the ``src`` and ``dst`` columns.

Within one key group the value-side ids strictly increase, so every delta
inside the group is at least 1. That is what lets :func:`gaps_to_bitmap_fast`
turn a miniblock of deltas straight into bitmap bits: delta ``d`` becomes the
one-hot lane ``1 << (d - 1)`` and the lanes are compacted with a parallel
bit extract, no running sum needed.
"""

from __future__ import annotations

import enum
import os
import time
from dataclasses import dataclass, field
from pathlib import Path
from typing import Any, Mapping, Sequence

import numpy as np

from .colstore import (
    MINIBLOCK_SIZE,
    PAGE_ROWS,
    Codec,
    ColumnFile,
    DeltaPage,
    PhysicalType,
    encode_column,
)
from .errors import FastPathUnavailable, TopologyError
from .pac import PAC

FAST_MAX_WIDTH = 4
LANE_BITS = 16
_LANES_PER_WORD = 64 // LANE_BITS


class Orientation(str, enum.Enum):
    CSR = "csr"
    CSC = "csc"

    @classmethod
    def parse(cls, value: "Orientation | str") -> "Orientation":
        if isinstance(value, Orientation):
            return value
        try:
            return cls(str(value).lower())
        except ValueError:
            raise ValueError(f"unknown orientation {value!r}; expected csr or csc") from None


@dataclass
class EdgeTopology:
    orientation: Orientation
    src_column: ColumnFile
    dst_column: ColumnFile
    offset_column: ColumnFile
    edge_property_columns: dict[str, ColumnFile] = field(default_factory=dict)
    timings: dict[str, float] = field(default_factory=dict)

    @property
    def key_column(self) -> ColumnFile:
        return self.src_column if self.orientation is Orientation.CSR else self.dst_column

    @property
    def value_column(self) -> ColumnFile:
        return self.dst_column if self.orientation is Orientation.CSR else self.src_column

    @property
    def n_key_vertices(self) -> int:
        return self.offset_column.total_rows - 1

    @property
    def num_edges(self) -> int:
        return self.src_column.total_rows

    def columns(self) -> dict[str, ColumnFile]:
        cols = {"src": self.src_column, "dst": self.dst_column, "offset": self.offset_column}
        cols.update({f"prop_{k}": v for k, v in self.edge_property_columns.items()})
        return cols

    def save(self, directory: str | os.PathLike) -> None:
        directory = Path(directory)
        directory.mkdir(parents=True, exist_ok=True)
        for name, col in self.columns().items():
            col.save(directory / f"{name}.gar")

    @classmethod
    def open(cls, directory: str | os.PathLike, orientation: Orientation | str | None = None) -> "EdgeTopology":
        directory = Path(directory)
        orientation = Orientation.parse(orientation or directory.name)
        props = {
            p.stem[len("prop_"):]: ColumnFile.open(p) for p in sorted(directory.glob("prop_*.gar"))
        }
        return cls(
            orientation,
            ColumnFile.open(directory / "src.gar"),
            ColumnFile.open(directory / "dst.gar"),
            ColumnFile.open(directory / "offset.gar"),
            props,
        )


def _as_edge_arrays(edges: Any) -> tuple[np.ndarray, np.ndarray, dict[str, list]]:
    if isinstance(edges, np.ndarray):
        arr = edges.reshape(-1, 2) if edges.size else np.empty((0, 2), dtype=np.int64)
        return arr[:, 0].astype(np.int64), arr[:, 1].astype(np.int64), {}
    edges = list(edges)
    props: dict[str, list] = {}
    if edges and len(edges[0]) == 3:
        names = list(edges[0][2])
        props = {n: [e[2][n] for e in edges] for n in names}
    src = np.fromiter((e[0] for e in edges), dtype=np.int64, count=len(edges))
    dst = np.fromiter((e[1] for e in edges), dtype=np.int64, count=len(edges))
    return src, dst, props


def build_topology(
    edges: Any,
    orientation: Orientation | str,
    n_key_vertices: int,
    *,
    n_value_vertices: int | None = None,
    properties: Mapping[str, Sequence] | None = None,
    property_types: Mapping[str, PhysicalType | str] | None = None,
    page_rows: int = PAGE_ROWS,
) -> EdgeTopology:
    """Sort ``edges`` for one orientation and encode the src/dst/offset columns.

    ``edges`` is an ``(m, 2)`` array of ``(src, dst)`` internal ids or a
    sequence of ``(src, dst)`` / ``(src, dst, {prop: value})`` tuples.
    ``properties`` maps edge property names to per-edge values in input
    order; they are permuted along with the edges.
    """
    orientation = Orientation.parse(orientation)
    src, dst, tuple_props = _as_edge_arrays(edges)
    props = dict(tuple_props)
    props.update(properties or {})
    m = src.size
    for name, values in props.items():
        if len(values) != m:
            raise TopologyError(f"edge property {name!r} has {len(values)} values for {m} edges")

    keys, vals = (src, dst) if orientation is Orientation.CSR else (dst, src)
    key_side, val_side = ("src", "dst") if orientation is Orientation.CSR else ("dst", "src")
    if m and (keys.min() < 0 or keys.max() >= n_key_vertices):
        bad = int(np.flatnonzero((keys < 0) | (keys >= n_key_vertices))[0])
        raise TopologyError(f"edge {bad}: {key_side} id {int(keys[bad])} outside [0, {n_key_vertices})")
    if m and (vals.min() < 0 or (n_value_vertices is not None and vals.max() >= n_value_vertices)):
        limit = n_value_vertices if n_value_vertices is not None else "inf"
        bad = int(np.flatnonzero((vals < 0) | (vals >= (n_value_vertices or np.iinfo(np.int64).max)))[0])
        raise TopologyError(f"edge {bad}: {val_side} id {int(vals[bad])} outside [0, {limit})")

    timings = {}
    t0 = time.perf_counter()
    order = np.lexsort((vals, keys))
    keys_sorted, vals_sorted = keys[order], vals[order]
    timings["sort"] = time.perf_counter() - t0

    if m > 1:
        dup = np.flatnonzero((keys_sorted[1:] == keys_sorted[:-1]) & (vals_sorted[1:] == vals_sorted[:-1]))
        if dup.size:
            s, d = (keys_sorted, vals_sorted) if orientation is Orientation.CSR else (vals_sorted, keys_sorted)
            i = int(dup[0])
            raise TopologyError(f"duplicate edge ({int(s[i])}, {int(d[i])})")

    t0 = time.perf_counter()
    offset = np.zeros(n_key_vertices + 1, dtype=np.int64)
    np.cumsum(np.bincount(keys_sorted, minlength=n_key_vertices), out=offset[1:])
    timings["offset"] = time.perf_counter() - t0

    t0 = time.perf_counter()
    src_sorted, dst_sorted = (keys_sorted, vals_sorted) if orientation is Orientation.CSR else (vals_sorted, keys_sorted)
    src_col = ColumnFile(encode_column(src_sorted, Codec.DELTA, page_rows=page_rows))
    dst_col = ColumnFile(encode_column(dst_sorted, Codec.DELTA, page_rows=page_rows))
    off_col = ColumnFile(encode_column(offset, Codec.PLAIN, PhysicalType.INT64, page_rows=page_rows))
    prop_cols = {}
    for name, values in props.items():
        ptype = (property_types or {}).get(name)
        if isinstance(values, np.ndarray):
            permuted = values[order]
        else:
            permuted = [values[i] for i in order.tolist()]
        prop_cols[name] = ColumnFile(encode_column(permuted, Codec.PLAIN, ptype, page_rows=page_rows))
    timings["write"] = time.perf_counter() - t0

    return EdgeTopology(orientation, src_col, dst_col, off_col, prop_cols, timings)


def _check_vertex(topo: EdgeTopology, v: int) -> int:
    v = int(v)
    if not 0 <= v < topo.n_key_vertices:
        raise TopologyError(f"vertex {v} outside [0, {topo.n_key_vertices})")
    return v


def _edge_range(topo: EdgeTopology, v: int) -> tuple[int, int]:
    lo, hi = topo.offset_column.read_rows(v, v + 2).tolist()
    return lo, hi


def neighbor_ids(topo: EdgeTopology, v: int) -> np.ndarray:
    """Ascending value-side ids adjacent to key vertex ``v``."""
    v = _check_vertex(topo, v)
    lo, hi = _edge_range(topo, v)
    return topo.value_column.read_rows(lo, hi)


# -- bitmap generation -----------------------------------------------------

@dataclass(frozen=True)
class GapRun:
    start_id: int
    raw_deltas: tuple[int, ...] = ()


def gaps_to_bitmap_scalar(run: GapRun, page_rows: int = PAGE_ROWS) -> PAC:
    """Two-step reference: add each delta to the running id, then set its bit."""
    pages: dict[int, bytearray] = {}

    def set_bit(i: int) -> None:
        page, off = divmod(i, page_rows)
        bitmap = pages.setdefault(page, bytearray(page_rows // 8))
        bitmap[off >> 3] |= 1 << (off & 7)

    current = run.start_id
    set_bit(current)
    for d in run.raw_deltas:
        if d < 1:
            raise ValueError(f"gap {d} < 1; neighbor ids must strictly increase")
        current += d
        set_bit(current)
    return PAC(page_rows, {p: np.frombuffer(bytes(b), dtype=np.uint8) for p, b in pages.items()})


def pext64(src: int, mask: int) -> int:
    """Parallel bit extract: gather the bits of ``src`` selected by ``mask`` into the low bits."""
    out = 0
    k = 0
    while mask:
        low = mask & -mask
        if src & low:
            out |= 1 << k
        k += 1
        mask ^= low
    return out


def fast_path_applicable(min_delta: int, bit_width: int) -> bool:
    """Every delta in the span lies in [1, 16], so its one-hot form fits a 16-bit lane."""
    return (
        0 <= bit_width <= FAST_MAX_WIDTH
        and min_delta >= 1
        and (min_delta - 1) + ((1 << bit_width) - 1) <= LANE_BITS - 1
    )


def _unpack_span(packed: bytes, bit_width: int, count: int) -> list[int]:
    if bit_width == 0:
        return [0] * count
    word = int.from_bytes(packed, "little")
    mask = (1 << bit_width) - 1
    return [(word >> (i * bit_width)) & mask for i in range(count)]


def _fast_gap_bits(stored: Sequence[int], min_delta: int) -> tuple[int, int]:
    """Bitmap (bit 0 = start id) and its length for one span of stored values."""
    n = len(stored)
    lanes = np.zeros(-(-n // _LANES_PER_WORD) * _LANES_PER_WORD, dtype=np.uint16)
    lanes[:n] = np.left_shift(1, np.asarray(stored, dtype=np.uint16) + np.uint16(min_delta - 1))
    masks = (lanes << np.uint16(1)) - np.uint16(1)
    masks[n:] = 0
    bitmap, pos = 1, 1
    for s, m in zip(lanes.view("<u8").tolist(), masks.view("<u8").tolist()):
        bitmap |= pext64(s, m) << pos
        pos += m.bit_count()
    return bitmap, pos


def _bits_to_ids(bitmap: int, nbits: int, start_id: int) -> np.ndarray:
    raw = np.frombuffer(bitmap.to_bytes(-(-nbits // 8), "little"), dtype=np.uint8)
    return np.flatnonzero(np.unpackbits(raw, bitorder="little")) + start_id


def gaps_to_bitmap_fast(
    packed: bytes,
    min_delta: int,
    bit_width: int,
    start_id: int,
    page_rows: int = PAGE_ROWS,
    count: int = MINIBLOCK_SIZE,
) -> PAC:
    """Bit-extract decoder for one packed miniblock span.

    Each stored value ``x`` gives the delta ``d = min_delta + x``; the lane
    ``1 << (d - 1)`` and its mask ``(s << 1) - 1`` are built four lanes to a
    64-bit word, and ``pext`` compacts each word into ``d`` output bits
    (``d - 1`` zeros then a one). Appending these after the start bit yields
    the neighbor bitmap directly.
    """
    if not fast_path_applicable(min_delta, bit_width):
        raise FastPathUnavailable(
            f"bit width {bit_width} with min_delta {min_delta} needs the scalar decoder"
        )
    if len(packed) != 4 * bit_width or not 0 <= count <= MINIBLOCK_SIZE:
        raise ValueError("packed span must hold 32 values of the given width")
    bitmap, nbits = _fast_gap_bits(_unpack_span(packed, bit_width, count), min_delta)
    return PAC.from_ids(_bits_to_ids(bitmap, nbits, start_id), page_rows)


# -- neighbor retrieval ----------------------------------------------------

def _page_segment_ids(page: DeltaPage, a: int, b: int, fast: bool, decoded: list) -> list[np.ndarray]:
    """Ids of page-local rows ``[a, b)`` of one key group."""

    def values():
        if not decoded:
            decoded.append(page.values())
        return decoded[0]

    start_id = page.first_value if a == 0 else int(values()[a])
    out = [np.array([start_id], dtype=np.int64)]
    current = start_id
    # delta i produces row i + 1; this group owns deltas a .. b - 2
    lo_d, hi_d = a, b - 1
    j = lo_d // MINIBLOCK_SIZE
    while lo_d < hi_d and j * MINIBLOCK_SIZE < hi_d:
        block = page.miniblocks[j]
        d0 = max(lo_d, j * MINIBLOCK_SIZE)
        d1 = min(hi_d, (j + 1) * MINIBLOCK_SIZE)
        whole = d0 == j * MINIBLOCK_SIZE and d1 - d0 == MINIBLOCK_SIZE
        if fast and whole and fast_path_applicable(block.min_delta, block.bit_width):
            bitmap, nbits = _fast_gap_bits(
                _unpack_span(block.packed, block.bit_width, MINIBLOCK_SIZE), block.min_delta
            )
            ids = _bits_to_ids(bitmap, nbits, current)[1:]
        else:
            ids = values()[d0 + 1 : d1 + 1]
        out.append(ids)
        current = int(ids[-1])
        j += 1
    return out


def neighbor_pac(
    topo: EdgeTopology, v: int, target_page_rows: int = PAGE_ROWS, *, fast: bool = True
) -> PAC:
    """Neighbors of ``v`` as page-aligned bitmaps over the target vertex table."""
    return _neighbor_pac(topo, v, target_page_rows, fast)[0]


def _neighbor_pac(topo: EdgeTopology, v: int, target_page_rows: int, fast: bool) -> tuple[PAC, int]:
    v = _check_vertex(topo, v)
    col = topo.value_column
    before = topo.offset_column.pages_read + col.pages_read
    lo, hi = _edge_range(topo, v)
    parts: list[np.ndarray] = []
    for p in col.pages_for_range(lo, hi):
        ps, pe = col.page_bounds(p)
        page = col.delta_page(p)
        parts.extend(_page_segment_ids(page, max(lo, ps) - ps, min(hi, pe) - ps, fast, []))
    ids = np.concatenate(parts) if parts else np.empty(0, dtype=np.int64)
    touched = topo.offset_column.pages_read + col.pages_read - before
    return PAC.from_ids(ids, target_page_rows), touched


def retrieval_page_cost(topo: EdgeTopology, v: int, target_page_rows: int = PAGE_ROWS) -> int:
    """Pages (offset + value column) read by one :func:`neighbor_pac` call."""
    return _neighbor_pac(topo, v, target_page_rows, True)[1]


def full_scan_page_cost(topo: EdgeTopology) -> int:
    """Pages a scan without the offset index reads: every value-column page."""
    return topo.value_column.page_count
