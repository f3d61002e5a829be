"""Micro-benchmark suites behind ``lpgar bench``.

Each suite builds a deterministic synthetic dataset from ``(scale, seed)``
and returns a flat ``{field: value}`` report. The baselines are written
here on purpose so they stay independent of the optimized paths:

* ``plain``: the edge list as two PLAIN int64 columns, no index.
* ``plain+offset``: CSR-sorted PLAIN dst column plus the offset column.
* ``string``: every vertex's labels joined by ``;`` in one PLAIN string column.
"""

from __future__ import annotations

import json
import time
from typing import Any, Callable

import numpy as np

from .colstore import PAGE_ROWS, Codec, ColumnFile, PhysicalType, column_stats, encode_column
from .ingest import generate_synthetic
from .labels import IntervalLabelColumn, evaluation_count, filter_complex, filter_simple, parse_label_expr
from .properties import fetch_by_pac
from .topology import (
    Orientation,
    build_topology,
    full_scan_page_cost,
    neighbor_ids,
    neighbor_pac,
    retrieval_page_cost,
)

SUITES = ("topology", "labels", "e2e")
DEFAULT_SCALE = 100_000
EDGE_FACTOR = 10


def _plain_bytes(values, ptype: PhysicalType, page_rows: int) -> int:
    return len(encode_column(values, Codec.PLAIN, ptype, page_rows))


def _per_call(fn: Callable[[int], Any], vertices: np.ndarray) -> float:
    t0 = time.perf_counter()
    for v in vertices.tolist():
        fn(v)
    return (time.perf_counter() - t0) / max(len(vertices), 1)


def _sample(rng: np.random.Generator, n: int, k: int) -> np.ndarray:
    return rng.choice(n, size=min(k, n), replace=False) if n else np.empty(0, dtype=np.int64)


def topology_suite(scale: int = DEFAULT_SCALE, seed: int = 0, *, locality: float = 0.9,
                   page_rows: int = PAGE_ROWS, samples: int = 1000) -> dict[str, Any]:
    """Delta vs plain storage, build breakdown and per-vertex page cost on a clustered graph."""
    n, m = scale, EDGE_FACTOR * scale
    g = generate_synthetic(n, m, locality, label_count=0, seed=seed)
    topo = build_topology(np.stack([g.src, g.dst], axis=1), Orientation.CSR, n, page_rows=page_rows)

    delta_src = column_stats(topo.src_column).encoded_bytes
    delta_dst = column_stats(topo.dst_column).encoded_bytes
    offset = column_stats(topo.offset_column).encoded_bytes
    plain_src = _plain_bytes(g.src, PhysicalType.INT64, page_rows)
    plain_dst = _plain_bytes(g.dst, PhysicalType.INT64, page_rows)
    sorted_dst = topo.dst_column.read_all()
    plain_sorted_dst = _plain_bytes(sorted_dst, PhysicalType.INT64, page_rows)

    rng = np.random.default_rng(seed + 1)
    sample = _sample(rng, n, samples)
    costs = np.array([retrieval_page_cost(topo, v) for v in sample.tolist()], dtype=np.int64)
    scan = full_scan_page_cost(topo)
    median_cost = float(np.median(costs)) if costs.size else 0.0

    timed = sample[: min(200, sample.size)]
    return {
        "suite": "topology",
        "n": n,
        "m": m,
        "locality": locality,
        "seed": seed,
        "page_rows": page_rows,
        "delta_src_dst_bytes": delta_src + delta_dst,
        "plain_src_dst_bytes": plain_src + plain_dst,
        "ratio_delta_vs_plain": (delta_src + delta_dst) / max(plain_src + plain_dst, 1),
        "delta_offset_bytes": delta_dst + offset,
        "plain_offset_bytes": plain_sorted_dst + offset,
        "ratio_delta_offset_vs_plain_offset": (delta_dst + offset) / max(plain_sorted_dst + offset, 1),
        "build_sort_s": topo.timings.get("sort", 0.0),
        "build_offset_s": topo.timings.get("offset", 0.0),
        "build_write_s": topo.timings.get("write", 0.0),
        "median_retrieval_pages": median_cost,
        "full_scan_pages": scan,
        "page_cost_ratio": scan / median_cost if median_cost else float("inf"),
        "neighbor_ids_us": 1e6 * _per_call(lambda v: neighbor_ids(topo, v), timed),
        "neighbor_pac_fast_us": 1e6 * _per_call(lambda v: neighbor_pac(topo, v, page_rows), timed),
        "neighbor_pac_scalar_us": 1e6 * _per_call(lambda v: neighbor_pac(topo, v, page_rows, fast=False), timed),
    }


def labels_suite(scale: int = DEFAULT_SCALE, seed: int = 0, *, label_count: int = 3,
                 mean_run: float = 400.0, page_rows: int = PAGE_ROWS) -> dict[str, Any]:
    """RLE label storage against plain-bool and string-concat baselines, plus filter timing."""
    n = scale
    g = generate_synthetic(n, 0, 0.0, label_count=label_count, seed=seed, mean_run=mean_run)
    names = list(g.labels)

    rle_cols = {k: ColumnFile(encode_column(v, Codec.RLE_BOOL, page_rows=page_rows)) for k, v in g.labels.items()}
    rle = sum(c.nbytes for c in rle_cols.values())
    plain_bool = sum(_plain_bytes(v, PhysicalType.BOOL, page_rows) for v in g.labels.values())
    matrix = np.stack([g.labels[k] for k in names], axis=1) if names else np.zeros((n, 0), bool)
    joined = [";".join(k for k, on in zip(names, row) if on) for row in matrix.tolist()]
    string = _plain_bytes(joined, PhysicalType.STRING, page_rows)
    boundaries = sum(int(np.count_nonzero(np.diff(v.astype(np.int8)))) for v in g.labels.values())

    cols = {k: IntervalLabelColumn.from_column(k, c) for k, c in rle_cols.items()}
    report: dict[str, Any] = {
        "suite": "labels",
        "n": n,
        "labels": label_count,
        "seed": seed,
        "page_rows": page_rows,
        "boundary_density": boundaries / max(n * max(label_count, 1), 1),
        "rle_bytes": rle,
        "plain_bool_bytes": plain_bool,
        "string_bytes": string,
        "ratio_rle_vs_plain_bool": rle / max(plain_bool, 1),
        "ratio_rle_vs_string": rle / max(string, 1),
    }
    if not names:
        return report

    t0 = time.perf_counter()
    simple = filter_simple(cols[names[0]], True)
    report["filter_simple_s"] = time.perf_counter() - t0
    report["filter_simple_matches"] = simple.count()
    t0 = time.perf_counter()
    baseline = [i for i, s in enumerate(joined) if names[0] in s.split(";")]
    report["baseline_simple_s"] = time.perf_counter() - t0

    text = "&".join(names[:2]) + (f"|!{names[2]}" if len(names) > 2 else "")
    expr = parse_label_expr(text)
    t0 = time.perf_counter()
    result = filter_complex(cols, expr)
    report["filter_complex_s"] = time.perf_counter() - t0
    report["filter_complex_expr"] = text
    report["filter_complex_matches"] = result.count()
    report["evaluation_count"] = evaluation_count(result)
    t0 = time.perf_counter()
    per_vertex = [i for i, s in enumerate(joined) if expr.evaluate({k: k in s.split(";") for k in names})]
    report["baseline_complex_s"] = time.perf_counter() - t0
    report["baseline_agrees"] = len(per_vertex) == result.count() and len(baseline) == simple.count()
    return report


def e2e_suite(scale: int = DEFAULT_SCALE, seed: int = 0, *, locality: float = 0.9,
              page_rows: int = PAGE_ROWS, samples: int = 100) -> dict[str, Any]:
    """Friends-of-a-person with their names: PAC pushdown against a full scan."""
    n, m = scale, EDGE_FACTOR * scale
    g = generate_synthetic(n, m, locality, label_count=0, seed=seed)
    topo = build_topology(np.stack([g.src, g.dst], axis=1), Orientation.CSR, n, page_rows=page_rows)
    names = ColumnFile(encode_column(g.properties["firstName"], Codec.PLAIN, PhysicalType.STRING, page_rows))
    plain_src = ColumnFile(encode_column(g.src, Codec.PLAIN, PhysicalType.INT64, page_rows))
    plain_dst = ColumnFile(encode_column(g.dst, Codec.PLAIN, PhysicalType.INT64, page_rows))

    rng = np.random.default_rng(seed + 2)
    sample = _sample(rng, n, samples)

    names.reset_counter()
    topo.offset_column.reset_counter()
    topo.dst_column.reset_counter()
    t0 = time.perf_counter()
    fetched = 0
    for v in sample.tolist():
        fetched += len(fetch_by_pac(names, neighbor_pac(topo, v, page_rows)))
    pushdown_s = time.perf_counter() - t0
    pushdown_pages = names.pages_read + topo.offset_column.pages_read + topo.dst_column.pages_read

    for c in (plain_src, plain_dst, names):
        c.reset_counter()
    t0 = time.perf_counter()
    scanned = 0
    for v in sample.tolist():
        src = plain_src.read_all()
        dst = plain_dst.read_all()
        friends = np.sort(dst[src == v])
        all_names = names.read_all()
        scanned += len([all_names[u] for u in friends.tolist()])
    scan_s = time.perf_counter() - t0
    scan_pages = plain_src.pages_read + plain_dst.pages_read + names.pages_read

    k = max(sample.size, 1)
    return {
        "suite": "e2e",
        "n": n,
        "m": m,
        "locality": locality,
        "seed": seed,
        "queries": int(sample.size),
        "rows_returned": fetched,
        "baseline_agrees": fetched == scanned,
        "pushdown_ms_per_query": 1e3 * pushdown_s / k,
        "scan_ms_per_query": 1e3 * scan_s / k,
        "speedup": scan_s / pushdown_s if pushdown_s else float("inf"),
        "pushdown_pages_per_query": pushdown_pages / k,
        "scan_pages_per_query": scan_pages / k,
    }


_RUNNERS = {"topology": topology_suite, "labels": labels_suite, "e2e": e2e_suite}


def run_suite(suite: str, scale: int = DEFAULT_SCALE, seed: int = 0, **kwargs) -> dict[str, Any]:
    if suite not in _RUNNERS:
        raise ValueError(f"unknown suite {suite!r}; choose from {', '.join(SUITES)}")
    return _RUNNERS[suite](scale, seed, **kwargs)


def format_report(report: dict[str, Any], fmt: str = "table") -> str:
    if fmt == "json":
        return json.dumps(report, indent=2, sort_keys=False)
    width = max((len(k) for k in report), default=0)
    lines = []
    for key, value in report.items():
        if isinstance(value, float):
            value = f"{value:.4g}"
        lines.append(f"{key:<{width}}  {value}")
    return "\n".join(lines)
