"""Build archives from CSV tables or synthetic graphs.

Archive tree::

    _graph.yaml
    vertex/<Type>/_id.gar              external keys, internal-id order
    vertex/<Type>/prop_<name>.gar      PLAIN
    vertex/<Type>/label_<Label>.gar    RLE_BOOL
    edge/<Src>_<Rel>_<Dst>/<csr|csc>/{src,dst,offset,prop_<name>}.gar
"""

from __future__ import annotations

import csv
import os
import time
from dataclasses import dataclass, field
from pathlib import Path
from typing import Any, Mapping

import numpy as np

from .colstore import PAGE_ROWS, Codec, ColumnFile, PhysicalType, encode_column
from .errors import IngestError, TopologyError
from .schema import (
    KEY_FILE,
    EdgeTypeSchema,
    GraphSchema,
    Property,
    VertexTypeSchema,
    edge_dir,
    save_schema,
    vertex_dir,
)
from .topology import EdgeTopology, Orientation, build_topology

ID_COLUMN = "id"
LABELS_COLUMN = "labels"
LABEL_SEPARATOR = ";"


@dataclass
class IdMap:
    """Bijection between external keys and dense internal ids of one vertex type.

    Ids are assigned in sorted key order, so partition ``i`` starts at
    ``partition_size * i``; only the last partition may be short.
    """

    type_name: str
    keys: list
    partition_size: int
    _index: dict = field(default_factory=dict, repr=False)

    def __post_init__(self):
        self._index = {k: i for i, k in enumerate(self.keys)}
        if len(self._index) != len(self.keys):
            raise IngestError(f"{self.type_name}: external keys are not unique")

    @property
    def int_keys(self) -> bool:
        return bool(self.keys) and isinstance(self.keys[0], int)

    def internal(self, key: Any) -> int:
        if self.int_keys and isinstance(key, str):
            try:
                key = int(key)
            except ValueError:
                raise KeyError(key) from None
        return self._index[key]

    def external(self, internal_id: int):
        return self.keys[internal_id]

    def partition_of(self, internal_id: int) -> int:
        return internal_id // self.partition_size

    def __len__(self) -> int:
        return len(self.keys)


def _parse_value(raw: str, datatype: str):
    if datatype == "string":
        return raw
    if datatype == "int64":
        return int(raw)
    if datatype == "float64":
        return float(raw)
    low = raw.strip().lower()
    if low in ("true", "1"):
        return True
    if low in ("false", "0"):
        return False
    raise ValueError(f"not a bool: {raw!r}")


def _read_csv(path: str | os.PathLike) -> tuple[list[str], list[list[str]]]:
    with open(path, newline="", encoding="utf-8") as fh:
        reader = csv.reader(fh)
        try:
            header = next(reader)
        except StopIteration:
            raise IngestError(f"{path}: missing header row") from None
        rows = [r for r in reader if r]
    return [h.strip() for h in header], rows


def _columns_for(header: list[str], names: list[str], path) -> dict[str, int]:
    pos = {h: i for i, h in enumerate(header)}
    missing = [n for n in names if n not in pos]
    if missing:
        raise IngestError(f"{path}: header lacks column(s) {', '.join(missing)}")
    return {n: pos[n] for n in names}


def _sort_keys(raw_keys: list[str]) -> tuple[list, np.ndarray]:
    try:
        keys: list = [int(k) for k in raw_keys]
    except ValueError:
        keys = list(raw_keys)
    order = sorted(range(len(keys)), key=keys.__getitem__)
    return [keys[i] for i in order], np.array(order, dtype=np.int64)


def _property_column(values: list, datatype: str, page_rows: int) -> bytes:
    ptype = PhysicalType.from_name(datatype)
    if ptype is PhysicalType.STRING:
        return encode_column(values, Codec.PLAIN, ptype, page_rows)
    dt = {PhysicalType.INT64: np.int64, PhysicalType.FLOAT64: np.float64, PhysicalType.BOOL: bool}[ptype]
    return encode_column(np.array(values, dtype=dt), Codec.PLAIN, ptype, page_rows)


def _emit(columns: dict[str, bytes], out_dir: Path | None) -> dict[str, ColumnFile]:
    if out_dir is not None:
        out_dir.mkdir(parents=True, exist_ok=True)
    result = {}
    for name, data in columns.items():
        path = None
        if out_dir is not None:
            path = out_dir / f"{name}.gar"
            path.write_bytes(data)
        result[name] = ColumnFile(data, path=path)
    return result


def encode_vertex_table(
    vt: VertexTypeSchema,
    keys: list,
    properties: Mapping[str, Any],
    labels: Mapping[str, Any],
    page_rows: int = PAGE_ROWS,
) -> dict[str, bytes]:
    """Encode columns already in internal-id order, keyed by file stem."""
    cols = {KEY_FILE[:-4]: encode_column([str(k) for k in keys], Codec.PLAIN, PhysicalType.STRING, page_rows)}
    for p in vt.properties:
        values = properties[p.name]
        if isinstance(values, np.ndarray):
            cols[f"prop_{p.name}"] = encode_column(values, Codec.PLAIN, p.datatype, page_rows)
        else:
            cols[f"prop_{p.name}"] = _property_column(list(values), p.datatype, page_rows)
    for label in vt.candidate_labels:
        cols[f"label_{label}"] = encode_column(
            np.asarray(labels[label], dtype=bool), Codec.RLE_BOOL, page_rows=page_rows
        )
    return cols


def import_vertices(
    csv_path: str | os.PathLike,
    vt: VertexTypeSchema,
    out_dir: str | os.PathLike | None = None,
    page_rows: int = PAGE_ROWS,
) -> tuple[IdMap, dict[str, ColumnFile]]:
    """Read a vertex CSV (``id``, property columns, ``labels``) and encode its columns.

    Rows are reordered by external key; the resulting ``IdMap`` gives each
    key's internal id.
    """
    header, rows = _read_csv(csv_path)
    needed = [ID_COLUMN] + [p.name for p in vt.properties]
    if vt.candidate_labels:
        needed.append(LABELS_COLUMN)
    pos = _columns_for(header, needed, csv_path)
    if LABELS_COLUMN in header:
        pos[LABELS_COLUMN] = header.index(LABELS_COLUMN)

    raw_keys = []
    seen: dict[str, int] = {}
    props: dict[str, list] = {p.name: [] for p in vt.properties}
    label_sets: list[set[str]] = []
    candidates = set(vt.candidate_labels)
    for line, row in enumerate(rows, start=2):
        if len(row) != len(header):
            raise IngestError(f"{csv_path}: row {line} has {len(row)} fields, header has {len(header)}")
        key = row[pos[ID_COLUMN]]
        if key in seen:
            raise IngestError(f"{csv_path}: duplicate external key {key!r} (rows {seen[key]} and {line})")
        seen[key] = line
        raw_keys.append(key)
        for p in vt.properties:
            try:
                props[p.name].append(_parse_value(row[pos[p.name]], p.datatype))
            except ValueError:
                raise IngestError(
                    f"{csv_path}: row {line}, column {p.name!r}: cannot parse "
                    f"{row[pos[p.name]]!r} as {p.datatype}"
                ) from None
        names = set()
        if LABELS_COLUMN in pos:
            names = {s.strip() for s in row[pos[LABELS_COLUMN]].split(LABEL_SEPARATOR) if s.strip()}
        unknown = names - candidates
        if unknown:
            raise IngestError(f"{csv_path}: row {line}: unknown label {sorted(unknown)[0]!r}")
        label_sets.append(names)

    keys, order = _sort_keys(raw_keys)
    if len(set(keys)) != len(keys):
        raise IngestError(f"{csv_path}: external keys collide after integer parsing")
    idmap = IdMap(vt.type_name, keys, vt.partition_size)
    ordered_props = {name: [vals[i] for i in order.tolist()] for name, vals in props.items()}
    labels = {
        label: np.array([label in label_sets[i] for i in order.tolist()], dtype=bool)
        for label in vt.candidate_labels
    }
    cols = encode_vertex_table(vt, keys, ordered_props, labels, page_rows)
    return idmap, _emit(cols, Path(out_dir) if out_dir is not None else None)


def import_edges(
    csv_path: str | os.PathLike,
    et: EdgeTypeSchema,
    idmaps: Mapping[str, IdMap],
    out_dir: str | os.PathLike | None = None,
    page_rows: int = PAGE_ROWS,
) -> dict[Orientation, EdgeTopology]:
    """Resolve a ``src,dst[,props...]`` CSV through the id maps and build each orientation.

    With ``out_dir`` set, orientation ``o`` is written to ``out_dir/<o>/``.
    """
    header, rows = _read_csv(csv_path)
    pos = _columns_for(header, ["src", "dst"] + [p.name for p in et.properties], csv_path)
    src_map, dst_map = idmaps[et.src_type], idmaps[et.dst_type]
    src = np.empty(len(rows), dtype=np.int64)
    dst = np.empty(len(rows), dtype=np.int64)
    props: dict[str, list] = {p.name: [] for p in et.properties}
    for i, row in enumerate(rows):
        line = i + 2
        for side, idmap, arr in (("src", src_map, src), ("dst", dst_map, dst)):
            try:
                arr[i] = idmap.internal(row[pos[side]])
            except (KeyError, IndexError):
                value = row[pos[side]] if pos[side] < len(row) else ""
                raise IngestError(
                    f"{csv_path}: row {line}: {side} {value!r} is not a known {idmap.type_name}"
                ) from None
        for p in et.properties:
            try:
                props[p.name].append(_parse_value(row[pos[p.name]], p.datatype))
            except ValueError:
                raise IngestError(
                    f"{csv_path}: row {line}, column {p.name!r}: cannot parse as {p.datatype}"
                ) from None
    return build_edge_tables(et, src, dst, len(src_map), len(dst_map), props, out_dir, page_rows)


def build_edge_tables(
    et: EdgeTypeSchema,
    src: np.ndarray,
    dst: np.ndarray,
    n_src: int,
    n_dst: int,
    properties: Mapping[str, Any] | None = None,
    out_dir: str | os.PathLike | None = None,
    page_rows: int = PAGE_ROWS,
) -> dict[Orientation, EdgeTopology]:
    edges = np.stack([np.asarray(src, dtype=np.int64), np.asarray(dst, dtype=np.int64)], axis=1)
    types = {p.name: p.datatype for p in et.properties}
    out = {}
    for o in et.orientations:
        n_key, n_val = (n_src, n_dst) if o is Orientation.CSR else (n_dst, n_src)
        try:
            topo = build_topology(
                edges, o, n_key, n_value_vertices=n_val, properties=properties,
                property_types=types, page_rows=page_rows,
            )
        except TopologyError as exc:
            raise IngestError(f"{et.key}: {exc}") from None
        if out_dir is not None:
            t0 = time.perf_counter()
            topo.save(Path(out_dir) / o.value)
            topo.timings["write"] += time.perf_counter() - t0
        out[o] = topo
    return out


@dataclass
class ImportResult:
    idmaps: dict[str, IdMap]
    topologies: dict[str, dict[Orientation, EdgeTopology]]
    timings: dict[str, float]


def _sum_timings(topologies) -> dict[str, float]:
    total = {"sort": 0.0, "offset": 0.0, "write": 0.0}
    for per_type in topologies.values():
        for topo in per_type.values():
            for k in total:
                total[k] += topo.timings.get(k, 0.0)
    return total


def build_archive(
    schema: GraphSchema,
    vertex_csvs: Mapping[str, str | os.PathLike],
    edge_csvs: Mapping[str, str | os.PathLike],
    out: str | os.PathLike,
) -> ImportResult:
    """Import every vertex and edge table named in ``schema`` and write the archive."""
    out = Path(out)
    for vt in schema.vertex_types:
        if vt.type_name not in vertex_csvs:
            raise IngestError(f"no input table for vertex type {vt.type_name!r}")
    for name in vertex_csvs:
        schema.vertex_type(name)
    by_key = {et.key: et for et in schema.edge_types}
    for key in edge_csvs:
        if key not in by_key:
            raise IngestError(f"edge table {key!r} does not match any edge type")
    out.mkdir(parents=True, exist_ok=True)
    idmaps = {}
    for vt in schema.vertex_types:
        idmaps[vt.type_name], _ = import_vertices(
            vertex_csvs[vt.type_name], vt, vertex_dir(out, schema, vt.type_name), schema.page_rows
        )
    topologies = {}
    for et in schema.edge_types:
        d = edge_dir(out, schema, et, et.orientations[0]).parent
        if et.key in edge_csvs:
            topologies[et.key] = import_edges(edge_csvs[et.key], et, idmaps, d, schema.page_rows)
        else:
            empty = np.empty(0, dtype=np.int64)
            topologies[et.key] = build_edge_tables(
                et, empty, empty, len(idmaps[et.src_type]), len(idmaps[et.dst_type]),
                {p.name: [] for p in et.properties}, d, schema.page_rows,
            )
    save_schema(schema, out)
    return ImportResult(idmaps, topologies, _sum_timings(topologies))


# -- synthetic graphs ------------------------------------------------------

@dataclass
class SyntheticGraph:
    """Single-type graph ``Person -Knows-> Person`` with clustered labels."""

    n: int
    src: np.ndarray
    dst: np.ndarray
    labels: dict[str, np.ndarray]
    properties: dict[str, Any]
    window: int
    locality: float

    @property
    def m(self) -> int:
        return int(self.src.size)

    def schema(self, page_rows: int = PAGE_ROWS, orientations=(Orientation.CSR, Orientation.CSC)) -> GraphSchema:
        partition = max(page_rows, -(-self.n // page_rows) * page_rows)
        person = VertexTypeSchema(
            "Person", partition,
            (Property("firstName", "string"), Property("age", "int64")),
            tuple(self.labels),
        )
        knows = EdgeTypeSchema("Person", "Knows", "Person", (), tuple(orientations))
        return GraphSchema("synthetic", (person,), (knows,), page_rows=page_rows)


def _draw_unique(rng, count: int, sampler, n: int, exclude: np.ndarray, rounds: int = 200) -> np.ndarray:
    """``count`` distinct edge keys ``src * n + dst`` (no self loops), in draw order."""
    acc = np.empty(0, dtype=np.int64)
    for _ in range(rounds):
        need = count - acc.size
        if need <= 0:
            return acc[:count]
        s, d = sampler(2 * need + 16)
        k = (s * n + d)[s != d]
        cat = np.concatenate([acc, k])
        _, first = np.unique(cat, return_index=True)
        cat = cat[np.sort(first)]
        if exclude.size:
            cat = cat[~np.isin(cat, exclude)]
        acc = cat
    if acc.size >= count:
        return acc[:count]
    raise IngestError(f"could not draw {count} distinct edges; graph too dense")


def generate_synthetic(
    n: int,
    m: int,
    locality: float = 0.0,
    label_count: int = 3,
    seed: int = 0,
    *,
    window: int = 16,
    mean_run: float = 400.0,
) -> SyntheticGraph:
    """Deterministic random simple digraph with a tunable share of local edges.

    A fraction ``locality`` of the edges lands inside a ``window``-wide block
    of ids around the source; the rest are uniform. Labels come in runs with
    geometric lengths of mean ``mean_run``.
    """
    if n < 0 or m < 0:
        raise IngestError("n and m must be non-negative")
    if not 0.0 <= locality <= 1.0:
        raise IngestError(f"locality must lie in [0, 1], got {locality}")
    if m > n * (n - 1):
        raise IngestError(f"{m} edges cannot form a simple graph on {n} vertices")
    rng = np.random.default_rng(seed)
    n_local = int(round(locality * m))
    span = min(window, n)
    if n_local > n * max(span - 1, 0):
        raise IngestError(f"{n_local} local edges exceed the window capacity of {n} vertices")

    def local(size):
        s = rng.integers(0, n, size)
        base = np.clip(s - window // 2, 0, n - span)
        return s, base + rng.integers(0, span, size)

    def uniform(size):
        return rng.integers(0, n, size), rng.integers(0, n, size)

    keys_local = _draw_unique(rng, n_local, local, n, np.empty(0, dtype=np.int64)) if n_local else np.empty(0, np.int64)
    keys_uni = _draw_unique(rng, m - n_local, uniform, n, keys_local) if m - n_local else np.empty(0, np.int64)
    keys = rng.permutation(np.concatenate([keys_local, keys_uni]))

    labels = {}
    for j in range(label_count):
        runs = []
        total = 0
        while total < n:
            chunk = rng.geometric(1.0 / mean_run, size=max(16, int(2 * n / mean_run) + 1))
            runs.append(chunk)
            total += int(chunk.sum())
        lengths = np.concatenate(runs)
        cut = np.searchsorted(np.cumsum(lengths), n)
        lengths = lengths[: cut + 1]
        lengths[-1] -= int(lengths.sum()) - n
        start = int(rng.integers(0, 2))
        values = (np.arange(lengths.size) + start) & 1
        labels[f"L{j}"] = np.repeat(values.astype(bool), lengths)

    props = {
        "firstName": [f"p{i:07d}" for i in range(n)],
        "age": rng.integers(18, 90, n).astype(np.int64),
    }
    return SyntheticGraph(n, keys // max(n, 1), keys % max(n, 1), labels, props, window, locality)


def write_synthetic_archive(
    graph: SyntheticGraph,
    out: str | os.PathLike,
    page_rows: int = PAGE_ROWS,
    orientations=(Orientation.CSR, Orientation.CSC),
) -> ImportResult:
    out = Path(out)
    schema = graph.schema(page_rows, orientations)
    vt = schema.vertex_types[0]
    et = schema.edge_types[0]
    keys = list(range(graph.n))
    _emit(encode_vertex_table(vt, keys, graph.properties, graph.labels, page_rows),
          vertex_dir(out, schema, vt.type_name))
    topos = build_edge_tables(
        et, graph.src, graph.dst, graph.n, graph.n, None, edge_dir(out, schema, et, et.orientations[0]).parent,
        page_rows,
    )
    save_schema(schema, out)
    idmap = IdMap("Person", keys, vt.partition_size)
    return ImportResult({"Person": idmap}, {et.key: topos}, _sum_timings({et.key: topos}))
