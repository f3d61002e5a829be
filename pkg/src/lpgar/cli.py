"""Command line entry point: ``lpgar {import,neighbors,filter,bench,info}``.

Exit status is 0 on success, 1 when the data is at fault (bad archive,
unknown vertex, failed validation) and 2 for usage errors, including a
malformed ``--where`` expression.
"""

from __future__ import annotations

import argparse
import os
import sys
from pathlib import Path
from typing import Sequence

from . import bench
from .colstore import ColumnFile, column_stats
from .errors import LpgarError, LabelExprSyntaxError
from .ingest import build_archive
from .labels import IntervalLabelColumn, evaluation_count, filter_complex, parse_label_expr
from .properties import fetch_by_pac
from .schema import (
    KEY_FILE,
    GraphSchema,
    edge_dir,
    load_schema,
    schema_from_dict,
    schema_to_dict,
    validate_layout,
    vertex_dir,
)
from .topology import EdgeTopology, Orientation, neighbor_pac

PAGE_ROWS_ENV = "GAR_PAGE_ROWS"


class UsageError(Exception):
    """Raised for bad invocations; reported with exit status 2."""


def _pairs(items: Sequence[str], what: str) -> dict[str, str]:
    out = {}
    for item in items:
        name, sep, path = item.partition("=")
        if not sep:
            path, name = item, Path(item).stem
        if not Path(path).is_file():
            raise UsageError(f"{what} file not found: {path}")
        if name in out:
            raise UsageError(f"{what} {name!r} given twice")
        out[name] = path
    return out


def _open_graph(path: str) -> GraphSchema:
    if not (Path(path) / "_graph.yaml").is_file():
        raise LpgarError(f"{path}: no metadata (_graph.yaml not found)")
    return load_schema(path)


def cmd_import(args: argparse.Namespace) -> int:
    if not Path(args.schema).is_file():
        raise UsageError(f"schema file not found: {args.schema}")
    vertices = _pairs(args.vertices, "vertex")
    edges = _pairs(args.edges or [], "edge")
    schema = load_schema(args.schema)
    override = os.environ.get(PAGE_ROWS_ENV)
    if override:
        try:
            rows = int(override)
        except ValueError:
            raise UsageError(f"{PAGE_ROWS_ENV} must be an integer, got {override!r}") from None
        schema = schema_from_dict({**schema_to_dict(schema), "page_rows": rows})
    result = build_archive(schema, vertices, edges, args.out)
    for name, idmap in result.idmaps.items():
        print(f"vertex {name}: {len(idmap)} rows")
    for key, per in result.topologies.items():
        o = next(iter(per.values()))
        print(f"edge {key}: {o.num_edges} rows ({', '.join(x.value for x in per)})")
    t = result.timings
    print(f"sort {t['sort']:.6f}s  offset {t['offset']:.6f}s  write {t['write']:.6f}s")
    return 0


def _resolve_vertex(schema: GraphSchema, root: str, type_name: str, raw: str, by_key: bool) -> int:
    if not by_key:
        try:
            return int(raw)
        except ValueError:
            raise UsageError(f"--vertex expects an internal id, got {raw!r} (use --key for external keys)") from None
    keys = ColumnFile.open(vertex_dir(root, schema, type_name) / KEY_FILE).read_all()
    try:
        return keys.index(raw)
    except ValueError:
        raise LpgarError(f"unknown {type_name} key {raw!r}") from None


def cmd_neighbors(args: argparse.Namespace) -> int:
    schema = _open_graph(args.graph)
    et = schema.edge_type(args.type)
    orientation = Orientation.CSR if args.direction == "out" else Orientation.CSC
    if orientation not in et.orientations:
        raise LpgarError(
            f"{et.key}: {orientation.value} orientation was not built; "
            f"--direction {args.direction} needs it listed under orientations"
        )
    key_type, target_type = (et.src_type, et.dst_type) if orientation is Orientation.CSR else (et.dst_type, et.src_type)
    topo = EdgeTopology.open(edge_dir(args.graph, schema, et, orientation), orientation)
    v = _resolve_vertex(schema, args.graph, key_type, args.vertex, args.key)
    if not 0 <= v < topo.n_key_vertices:
        raise LpgarError(f"vertex {args.vertex} out of range for {key_type} ({topo.n_key_vertices} rows)")
    pac = neighbor_pac(topo, v, schema.page_rows)
    touched = topo.offset_column.pages_read + topo.value_column.pages_read
    ids = pac.ids().tolist()
    props = [p for p in (args.properties or "").split(",") if p]
    if not props:
        if ids:
            print(" ".join(map(str, ids)))
    else:
        vt = schema.vertex_type(target_type)
        cols = []
        for name in props:
            vt.property(name)
            col = ColumnFile.open(vertex_dir(args.graph, schema, target_type) / f"prop_{name}.gar")
            cols.append(dict(fetch_by_pac(col, pac)))
            touched += col.pages_read
        for i in ids:
            print("\t".join([str(i)] + [str(c[i]) for c in cols]))
    if args.stats:
        print(f"pages_touched {touched}")
    return 0


def normalize_where(text: str) -> str:
    """Cypher writes conjunction as ``:``; the core grammar uses ``&``."""
    return text.replace(":", "&")


def cmd_filter(args: argparse.Namespace) -> int:
    schema = _open_graph(args.graph)
    vt = schema.vertex_type(args.type)
    expr = parse_label_expr(normalize_where(args.where))
    unknown = sorted(expr.atoms() - set(vt.candidate_labels))
    if unknown:
        raise LpgarError(f"unknown label {unknown[0]!r} for vertex type {vt.type_name}")
    d = vertex_dir(args.graph, schema, vt.type_name)
    cols = {
        name: IntervalLabelColumn.from_column(name, ColumnFile.open(d / f"label_{name}.gar"))
        for name in sorted(expr.atoms())
    }
    if not cols:
        raise LpgarError("expression names no labels")
    result = filter_complex(cols, expr)
    if args.count:
        print(result.count())
    else:
        ids = result.ids().tolist()
        if ids:
            print(" ".join(map(str, ids)))
    if args.stats:
        print(f"evaluation_count {evaluation_count(result)}")
    return 0


def cmd_bench(args: argparse.Namespace) -> int:
    if args.scale < 1:
        raise UsageError("--scale must be positive")
    report = bench.run_suite(args.suite, args.scale, args.seed)
    print(bench.format_report(report, args.format))
    return 0


def cmd_info(args: argparse.Namespace) -> int:
    schema = _open_graph(args.graph)
    print(f"graph {schema.name} (format {schema.format_version}, page_rows {schema.page_rows})")
    for vt in schema.vertex_types:
        props = ", ".join(f"{p.name}:{p.datatype}" for p in vt.properties) or "-"
        labels = ", ".join(vt.candidate_labels) or "-"
        print(f"  vertex {vt.type_name}: partition_size {vt.partition_size}; properties {props}; labels {labels}")
    for et in schema.edge_types:
        print(f"  edge {et.key}: orientations {', '.join(o.value for o in et.orientations)}")
    report = validate_layout(schema, args.graph)
    print("columns:")
    for f in report.findings:
        if f.status in ("ok", "row_mismatch"):
            st = column_stats(ColumnFile.open(Path(args.graph) / f.path))
            print(f"  {f.path}: rows {st.rows}, pages {st.pages}, bytes {st.encoded_bytes}")
    print(report.format())
    return 0 if report.ok else 1


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(prog="lpgar", description="Columnar labeled property graph archives.")
    sub = parser.add_subparsers(dest="command", required=True)

    p = sub.add_parser("import", help="build an archive from CSV tables")
    p.add_argument("--schema", required=True, help="YAML schema file")
    p.add_argument("--vertices", nargs="+", required=True, metavar="[TYPE=]CSV")
    p.add_argument("--edges", nargs="*", metavar="[SRC_REL_DST=]CSV")
    p.add_argument("--out", required=True, help="archive directory")
    p.set_defaults(func=cmd_import)

    p = sub.add_parser("neighbors", help="neighbors of one vertex")
    p.add_argument("--graph", required=True)
    p.add_argument("--type", required=True, help="edge type, e.g. Person_Knows_Person")
    p.add_argument("--vertex", required=True, help="internal id (external key with --key)")
    p.add_argument("--key", action="store_true", help="treat --vertex as an external key")
    p.add_argument("--direction", choices=("out", "in"), default="out")
    p.add_argument("--properties", help="comma-separated neighbor properties to fetch")
    p.add_argument("--stats", action="store_true", help="print pages_touched")
    p.set_defaults(func=cmd_neighbors)

    p = sub.add_parser("filter", help="vertices matching a label expression")
    p.add_argument("--graph", required=True)
    p.add_argument("--type", required=True, help="vertex type")
    p.add_argument("--where", required=True, help="e.g. '(Asian&!Enrollee)|Student'")
    p.add_argument("--count", action="store_true")
    p.add_argument("--stats", action="store_true", help="print evaluation_count")
    p.set_defaults(func=cmd_filter)

    p = sub.add_parser("bench", help="run a micro-benchmark suite")
    p.add_argument("--suite", choices=bench.SUITES, required=True)
    p.add_argument("--scale", type=int, default=bench.DEFAULT_SCALE, help="vertex count")
    p.add_argument("--seed", type=int, default=0)
    p.add_argument("--format", choices=("table", "json"), default="table")
    p.set_defaults(func=cmd_bench)

    p = sub.add_parser("info", help="schema, column stats and layout check")
    p.add_argument("--graph", required=True)
    p.set_defaults(func=cmd_info)
    return parser


def main(argv: Sequence[str] | None = None) -> int:
    parser = build_parser()
    args = parser.parse_args(argv)
    try:
        return args.func(args)
    except (UsageError, LabelExprSyntaxError) as exc:
        parser.print_usage(sys.stderr)
        print(f"lpgar: error: {exc}", file=sys.stderr)
        return 2
    except (LpgarError, KeyError, OSError) as exc:
        msg = exc.args[0] if isinstance(exc, KeyError) and exc.args else exc
        print(f"lpgar: error: {msg}", file=sys.stderr)
        return 1


if __name__ == "__main__":
    sys.exit(main())
