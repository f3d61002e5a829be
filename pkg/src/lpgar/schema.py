"""Graph metadata: vertex/edge types, properties, labels, and the ``_graph.yaml`` document.

Example document::

    name: medical
    format_version: 1
    page_rows: 1024
    vertices:
      - type: Person
        partition_size: 1024
        properties:
          - {name: pid, type: int64}
          - {name: age, type: int64}
        labels: [Asian, Enrollee]
      - type: Disease
        partition_size: 1024
        properties:
          - {name: name, type: string}
        labels: []
    edges:
      - src: Person
        relation: Diagnosed
        dst: Disease
        properties: []
        orientations: [csr, csc]
"""

from __future__ import annotations

import os
import re
from dataclasses import dataclass, field
from pathlib import Path
from typing import Any

import yaml

from .colstore import PAGE_ROWS, ColumnFile, check_page_rows
from .errors import ColumnFormatError, SchemaError
from .topology import Orientation

METADATA_FILE = "_graph.yaml"
FORMAT_VERSION = 1
DATATYPES = ("int64", "float64", "string", "bool")
KEY_FILE = "_id.gar"

_IDENT = re.compile(r"^[A-Za-z_][A-Za-z0-9_]*$")


@dataclass(frozen=True)
class Property:
    name: str
    datatype: str


@dataclass(frozen=True)
class VertexTypeSchema:
    type_name: str
    partition_size: int
    properties: tuple[Property, ...] = ()
    candidate_labels: tuple[str, ...] = ()

    def property(self, name: str) -> Property:
        for p in self.properties:
            if p.name == name:
                return p
        raise KeyError(f"vertex type {self.type_name!r} has no property {name!r}")


@dataclass(frozen=True)
class EdgeTypeSchema:
    src_type: str
    relation: str
    dst_type: str
    properties: tuple[Property, ...] = ()
    orientations: tuple[Orientation, ...] = (Orientation.CSR,)

    @property
    def key(self) -> str:
        return f"{self.src_type}_{self.relation}_{self.dst_type}"


@dataclass(frozen=True)
class GraphSchema:
    name: str
    vertex_types: tuple[VertexTypeSchema, ...] = ()
    edge_types: tuple[EdgeTypeSchema, ...] = ()
    format_version: int = FORMAT_VERSION
    path_prefix: str = ""
    page_rows: int = PAGE_ROWS

    def __post_init__(self):
        validate_schema(self)

    def vertex_type(self, name: str) -> VertexTypeSchema:
        for vt in self.vertex_types:
            if vt.type_name == name:
                return vt
        raise KeyError(f"unknown vertex type {name!r}")

    def edge_type(self, key: str) -> EdgeTypeSchema:
        for et in self.edge_types:
            if et.key == key or f"{et.src_type}-{et.relation}-{et.dst_type}" == key:
                return et
        raise KeyError(f"unknown edge type {key!r}")


# -- validation ------------------------------------------------------------

def _ident(value: Any, path: str) -> str:
    if not isinstance(value, str) or not _IDENT.match(value):
        raise SchemaError(path, f"expected an identifier, got {value!r}")
    return value


def validate_schema(schema: GraphSchema) -> None:
    _ident(schema.name, "name")
    if schema.format_version != FORMAT_VERSION:
        raise SchemaError("format_version", f"unsupported version {schema.format_version!r}")
    try:
        check_page_rows(schema.page_rows)
    except (TypeError, ValueError) as exc:
        raise SchemaError("page_rows", str(exc)) from None
    seen: set[str] = set()
    for i, vt in enumerate(schema.vertex_types):
        where = f"vertices[{i}]"
        _ident(vt.type_name, f"{where}.type")
        if vt.type_name in seen:
            raise SchemaError(f"{where}.type", f"duplicate vertex type {vt.type_name!r}")
        seen.add(vt.type_name)
        if not isinstance(vt.partition_size, int) or isinstance(vt.partition_size, bool) or vt.partition_size < 1:
            raise SchemaError(f"{where}.partition_size", f"must be a positive integer, got {vt.partition_size!r}")
        if vt.partition_size % schema.page_rows:
            raise SchemaError(
                f"{where}.partition_size",
                f"{vt.partition_size} is not a multiple of page_rows {schema.page_rows}",
            )
        names = _check_properties(vt.properties, f"{where}.properties")
        for j, label in enumerate(vt.candidate_labels):
            _ident(label, f"{where}.labels[{j}]")
            if label in names:
                raise SchemaError(f"{where}.labels[{j}]", f"duplicate name {label!r}")
            names.add(label)
    triples: set[tuple[str, str, str]] = set()
    for i, et in enumerate(schema.edge_types):
        where = f"edges[{i}]"
        for attr in ("src_type", "relation", "dst_type"):
            key = {"src_type": "src", "relation": "relation", "dst_type": "dst"}[attr]
            _ident(getattr(et, attr), f"{where}.{key}")
        for attr, key in (("src_type", "src"), ("dst_type", "dst")):
            if getattr(et, attr) not in seen:
                raise SchemaError(f"{where}.{key}", f"dangling vertex type {getattr(et, attr)!r}")
        triple = (et.src_type, et.relation, et.dst_type)
        if triple in triples:
            raise SchemaError(where, f"duplicate edge type {'-'.join(triple)}")
        triples.add(triple)
        _check_properties(et.properties, f"{where}.properties")
        if not et.orientations:
            raise SchemaError(f"{where}.orientations", "at least one of csr, csc is required")
        if len(set(et.orientations)) != len(et.orientations):
            raise SchemaError(f"{where}.orientations", "duplicate orientation")


def _check_properties(props, where: str) -> set[str]:
    names: set[str] = set()
    for j, p in enumerate(props):
        _ident(p.name, f"{where}[{j}].name")
        if p.name in names:
            raise SchemaError(f"{where}[{j}].name", f"duplicate name {p.name!r}")
        if p.datatype not in DATATYPES:
            raise SchemaError(f"{where}[{j}].type", f"unknown datatype {p.datatype!r}")
        names.add(p.name)
    return names


# -- document mapping ------------------------------------------------------

def _expect(doc: Any, kind: type, path: str):
    if not isinstance(doc, kind):
        raise SchemaError(path, f"expected a {'mapping' if kind is dict else 'list'}")
    return doc


def _keys(doc: dict, allowed: set[str], required: set[str], path: str) -> None:
    for k in doc:
        if k not in allowed:
            raise SchemaError(f"{path}.{k}" if path else str(k), "unknown key")
    for k in sorted(required - doc.keys()):
        raise SchemaError(f"{path}.{k}" if path else k, "missing required key")


def _properties_from(doc: Any, path: str) -> tuple[Property, ...]:
    out = []
    for j, item in enumerate(_expect(doc if doc is not None else [], list, path)):
        _expect(item, dict, f"{path}[{j}]")
        _keys(item, {"name", "type"}, {"name", "type"}, f"{path}[{j}]")
        out.append(Property(item["name"], item["type"]))
    return tuple(out)


def schema_from_dict(doc: Any) -> GraphSchema:
    _expect(doc, dict, "")
    _keys(doc, {"name", "format_version", "vertices", "edges", "path_prefix", "page_rows"},
          {"name", "format_version", "vertices"}, "")
    vertices = []
    for i, v in enumerate(_expect(doc["vertices"], list, "vertices")):
        where = f"vertices[{i}]"
        _expect(v, dict, where)
        _keys(v, {"type", "partition_size", "properties", "labels"}, {"type", "partition_size"}, where)
        labels = _expect(v.get("labels") or [], list, f"{where}.labels")
        vertices.append(VertexTypeSchema(
            v["type"], v["partition_size"], _properties_from(v.get("properties"), f"{where}.properties"),
            tuple(labels),
        ))
    edges = []
    for i, e in enumerate(_expect(doc.get("edges") or [], list, "edges")):
        where = f"edges[{i}]"
        _expect(e, dict, where)
        _keys(e, {"src", "relation", "dst", "properties", "orientations"}, {"src", "relation", "dst"}, where)
        raw = _expect(e.get("orientations", ["csr"]), list, f"{where}.orientations")
        orients = []
        for j, o in enumerate(raw):
            try:
                orients.append(Orientation.parse(o))
            except ValueError as exc:
                raise SchemaError(f"{where}.orientations[{j}]", str(exc)) from None
        edges.append(EdgeTypeSchema(
            e["src"], e["relation"], e["dst"], _properties_from(e.get("properties"), f"{where}.properties"),
            tuple(orients),
        ))
    return GraphSchema(
        doc["name"], tuple(vertices), tuple(edges), doc["format_version"],
        doc.get("path_prefix", "") or "", doc.get("page_rows", PAGE_ROWS),
    )


def schema_to_dict(schema: GraphSchema) -> dict:
    doc: dict[str, Any] = {"name": schema.name, "format_version": schema.format_version}
    if schema.path_prefix:
        doc["path_prefix"] = schema.path_prefix
    doc["page_rows"] = schema.page_rows
    doc["vertices"] = [
        {
            "type": vt.type_name,
            "partition_size": vt.partition_size,
            "properties": [{"name": p.name, "type": p.datatype} for p in vt.properties],
            "labels": list(vt.candidate_labels),
        }
        for vt in schema.vertex_types
    ]
    doc["edges"] = [
        {
            "src": et.src_type,
            "relation": et.relation,
            "dst": et.dst_type,
            "properties": [{"name": p.name, "type": p.datatype} for p in et.properties],
            "orientations": [o.value for o in et.orientations],
        }
        for et in schema.edge_types
    ]
    return doc


def _metadata_path(path: str | os.PathLike) -> Path:
    path = Path(path)
    return path / METADATA_FILE if path.is_dir() else path


def load_schema(path: str | os.PathLike) -> GraphSchema:
    """Load ``_graph.yaml`` (or the file at ``path``) and validate it."""
    path = _metadata_path(path)
    try:
        text = path.read_text(encoding="utf-8")
    except FileNotFoundError:
        raise SchemaError("", f"no metadata file at {path}") from None
    try:
        doc = yaml.safe_load(text)
    except yaml.YAMLError as exc:
        raise SchemaError("", f"cannot parse {path}: {exc}") from None
    try:
        return schema_from_dict(doc)
    except TypeError as exc:
        raise SchemaError("", f"malformed metadata: {exc}") from None


def save_schema(schema: GraphSchema, path: str | os.PathLike) -> None:
    path = _metadata_path(path)
    with open(path, "w", encoding="utf-8") as fh:
        yaml.safe_dump(schema_to_dict(schema), fh, sort_keys=False, default_flow_style=None)


# -- archive layout --------------------------------------------------------

def vertex_dir(root: str | os.PathLike, schema: GraphSchema, type_name: str) -> Path:
    return Path(root) / schema.path_prefix / "vertex" / type_name


def edge_dir(root: str | os.PathLike, schema: GraphSchema, et: EdgeTypeSchema, orientation: Orientation) -> Path:
    return Path(root) / schema.path_prefix / "edge" / et.key / orientation.value


@dataclass
class Finding:
    path: str
    status: str  # ok | missing | row_mismatch | corrupt
    rows: int | None = None
    expected_rows: int | None = None
    detail: str = ""


@dataclass
class LayoutReport:
    findings: list[Finding] = field(default_factory=list)
    partitions: dict[str, list[tuple[int, int]]] = field(default_factory=dict)

    @property
    def ok(self) -> bool:
        return all(f.status == "ok" for f in self.findings)

    def problems(self) -> list[Finding]:
        return [f for f in self.findings if f.status != "ok"]

    def format(self) -> str:
        lines = []
        for f in self.findings:
            rows = "" if f.rows is None else f" rows={f.rows}"
            want = "" if f.expected_rows is None or f.status == "ok" else f" expected={f.expected_rows}"
            note = f" ({f.detail})" if f.detail else ""
            lines.append(f"{f.status.upper():12} {f.path}{rows}{want}{note}")
        for t, parts in self.partitions.items():
            lines.append(f"PARTITIONS   {t}: " + ", ".join(f"[{a},{b})" for a, b in parts))
        lines.append("layout OK" if self.ok else f"layout FAILED: {len(self.problems())} problem(s)")
        return "\n".join(lines)


def _probe(path: Path, root: Path) -> tuple[Finding, ColumnFile | None]:
    rel = str(path.relative_to(root))
    if not path.exists():
        return Finding(rel, "missing"), None
    try:
        col = ColumnFile.open(path)
    except (ColumnFormatError, OSError) as exc:
        return Finding(rel, "corrupt", detail=str(exc)), None
    return Finding(rel, "ok", rows=col.total_rows), col


def _expect_rows(found: list[Finding], expected: int | None) -> None:
    for f in found:
        f.expected_rows = expected
        if f.status == "ok" and expected is not None and f.rows != expected:
            f.status = "row_mismatch"


def validate_layout(schema: GraphSchema, root: str | os.PathLike) -> LayoutReport:
    """Check every column file the schema implies; never raises for data problems."""
    root = Path(root)
    report = LayoutReport()
    counts: dict[str, int | None] = {}
    for vt in schema.vertex_types:
        d = vertex_dir(root, schema, vt.type_name)
        files = [d / KEY_FILE] + [d / f"prop_{p.name}.gar" for p in vt.properties] + [
            d / f"label_{l}.gar" for l in vt.candidate_labels
        ]
        probed = [_probe(f, root) for f in files]
        found = [f for f, _ in probed]
        rows = [f.rows for f in found if f.status == "ok"]
        n = rows[0] if rows else None
        _expect_rows(found, n)
        counts[vt.type_name] = n
        report.findings.extend(found)
        if n is not None:
            ps = vt.partition_size
            report.partitions[vt.type_name] = [(s, min(s + ps, n)) for s in range(0, n, ps)]
    for et in schema.edge_types:
        m = None
        for o in et.orientations:
            d = edge_dir(root, schema, et, o)
            edge_files = [d / "src.gar", d / "dst.gar"] + [d / f"prop_{p.name}.gar" for p in et.properties]
            found = [_probe(f, root)[0] for f in edge_files]
            if m is None:
                m = next((f.rows for f in found if f.status == "ok"), None)
            _expect_rows(found, m)
            off, _ = _probe(d / "offset.gar", root)
            key_type = et.src_type if o is Orientation.CSR else et.dst_type
            n_key = counts.get(key_type)
            _expect_rows([off], None if n_key is None else n_key + 1)
            report.findings.extend(found + [off])
    return report
