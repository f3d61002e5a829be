from __future__ import annotations

import hashlib

import numpy as np
import pytest

from lpgar.colstore import Codec, ColumnFile
from lpgar.errors import IngestError
from lpgar.ingest import (
    IdMap,
    build_archive,
    generate_synthetic,
    import_edges,
    import_vertices,
    write_synthetic_archive,
)
from lpgar.labels import IntervalLabelColumn
from lpgar.oracle import oracle_adjacency, oracle_intervals
from lpgar.schema import load_schema, schema_from_dict, validate_layout
from lpgar.topology import Orientation, neighbor_ids

from .test_schema import MEDICAL

PERSONS = "id,pid,age,labels\np3,3,40,\np1,1,22,Asian;Enrollee\np2,2,31,Asian\n"
DISEASES = "id,name\nflu,influenza\ncovid,covid-19\n"
DIAGNOSED = "src,dst\np1,flu\np3,covid\np1,covid\n"


@pytest.fixture
def medical(tmp_path):
    files = {}
    for name, text in (("persons", PERSONS), ("diseases", DISEASES), ("diagnosed", DIAGNOSED)):
        files[name] = tmp_path / f"{name}.csv"
        files[name].write_text(text)
    return schema_from_dict(MEDICAL), files


def test_label_columns_follow_internal_order(medical, tmp_path):
    schema, files = medical
    idmap, cols = import_vertices(files["persons"], schema.vertex_type("Person"), tmp_path / "out")
    assert idmap.keys == ["p1", "p2", "p3"]
    asian = IntervalLabelColumn.from_column("Asian", cols["label_Asian"])
    enrollee = IntervalLabelColumn.from_column("Enrollee", cols["label_Enrollee"])
    assert (asian.first_value, asian.boundaries.tolist()) == (1, [0, 2, 3])
    assert (enrollee.first_value, enrollee.boundaries.tolist()) == (1, [0, 1, 3])
    assert cols["label_Asian"].codec is Codec.RLE_BOOL
    assert cols["prop_age"].codec is Codec.PLAIN
    assert cols["prop_age"].read_all().tolist() == [22, 31, 40]
    assert (tmp_path / "out" / "prop_pid.gar").exists()


def test_labels_match_per_vertex_oracle(medical):
    schema, files = medical
    idmap, cols = import_vertices(files["persons"], schema.vertex_type("Person"))
    raw = {"p1": {"Asian", "Enrollee"}, "p2": {"Asian"}, "p3": set()}
    for label in ("Asian", "Enrollee"):
        bits = [label in raw[k] for k in idmap.keys]
        col = IntervalLabelColumn.from_column(label, cols[f"label_{label}"])
        assert (col.first_value, col.boundaries.tolist()) == tuple(oracle_intervals(bits))


def test_empty_table(tmp_path):
    schema = schema_from_dict(MEDICAL)
    path = tmp_path / "p.csv"
    path.write_text("id,pid,age,labels\n")
    idmap, cols = import_vertices(path, schema.vertex_type("Person"))
    assert len(idmap) == 0
    assert all(c.total_rows == 0 for c in cols.values())


def test_duplicate_key_named(tmp_path):
    schema = schema_from_dict(MEDICAL)
    path = tmp_path / "p.csv"
    path.write_text("id,pid,age,labels\np1,1,2,\np1,3,4,\n")
    with pytest.raises(IngestError, match="'p1'"):
        import_vertices(path, schema.vertex_type("Person"))


def test_unknown_label(tmp_path):
    schema = schema_from_dict(MEDICAL)
    path = tmp_path / "p.csv"
    path.write_text("id,pid,age,labels\np1,1,2,Student\n")
    with pytest.raises(IngestError, match="row 2: unknown label 'Student'"):
        import_vertices(path, schema.vertex_type("Person"))


def test_parse_failure_reports_row_and_column(tmp_path):
    schema = schema_from_dict(MEDICAL)
    path = tmp_path / "p.csv"
    path.write_text("id,pid,age,labels\np1,1,2,\np2,2,old,\n")
    with pytest.raises(IngestError, match="row 3, column 'age'"):
        import_vertices(path, schema.vertex_type("Person"))


def test_missing_header_column(tmp_path):
    schema = schema_from_dict(MEDICAL)
    path = tmp_path / "p.csv"
    path.write_text("id,pid\np1,1\n")
    with pytest.raises(IngestError, match="age"):
        import_vertices(path, schema.vertex_type("Person"))


def test_integer_keys_sort_numerically(tmp_path):
    schema = schema_from_dict(MEDICAL)
    path = tmp_path / "p.csv"
    path.write_text("id,pid,age,labels\n10,1,1,\n9,2,2,\n100,3,3,\n")
    idmap, _ = import_vertices(path, schema.vertex_type("Person"))
    assert idmap.keys == [9, 10, 100]
    assert idmap.internal("100") == 2 and idmap.internal(9) == 0
    assert idmap.external(1) == 10


def test_idmap_partitions():
    m = IdMap("P", list(range(2500)), 1024)
    assert [m.partition_of(i) for i in (0, 1023, 1024, 2499)] == [0, 0, 1, 2]


def test_edges_both_orientations(medical):
    schema, files = medical
    et = schema.edge_types[0]
    persons, _ = import_vertices(files["persons"], schema.vertex_type("Person"))
    diseases, _ = import_vertices(files["diseases"], schema.vertex_type("Disease"))
    topos = import_edges(files["diagnosed"], et, {"Person": persons, "Disease": diseases})
    # p1 -> 0, p2 -> 1, p3 -> 2; covid -> 0, flu -> 1
    edges = [(0, 1), (2, 0), (0, 0)]
    csr, csc = topos[Orientation.CSR], topos[Orientation.CSC]
    assert csr.offset_column.read_all().tolist() == [0, 2, 2, 3]
    assert csc.offset_column.read_all().tolist() == [0, 2, 3]
    out, inc = oracle_adjacency(edges, 3, "out"), oracle_adjacency(edges, 2, "in")
    assert [neighbor_ids(csr, v).tolist() for v in range(3)] == out
    assert [neighbor_ids(csc, v).tolist() for v in range(2)] == inc


def test_unresolvable_endpoint(medical, tmp_path):
    schema, files = medical
    persons, _ = import_vertices(files["persons"], schema.vertex_type("Person"))
    diseases, _ = import_vertices(files["diseases"], schema.vertex_type("Disease"))
    bad = tmp_path / "bad.csv"
    bad.write_text("src,dst\np1,flu\np9,flu\n")
    with pytest.raises(IngestError, match="row 3: src 'p9'"):
        import_edges(bad, schema.edge_types[0], {"Person": persons, "Disease": diseases})


def test_duplicate_edge(medical, tmp_path):
    schema, files = medical
    persons, _ = import_vertices(files["persons"], schema.vertex_type("Person"))
    diseases, _ = import_vertices(files["diseases"], schema.vertex_type("Disease"))
    bad = tmp_path / "dup.csv"
    bad.write_text("src,dst\np1,flu\np1,flu\n")
    with pytest.raises(IngestError, match="duplicate edge"):
        import_edges(bad, schema.edge_types[0], {"Person": persons, "Disease": diseases})


def test_build_archive_validates(medical, tmp_path):
    schema, files = medical
    result = build_archive(
        schema,
        {"Person": files["persons"], "Disease": files["diseases"]},
        {"Person_Diagnosed_Disease": files["diagnosed"]},
        tmp_path / "arch",
    )
    assert validate_layout(load_schema(tmp_path / "arch"), tmp_path / "arch").ok
    assert set(result.timings) == {"sort", "offset", "write"}
    keys = ColumnFile.open(tmp_path / "arch/vertex/Disease/_id.gar").read_all()
    assert keys == ["covid", "flu"]


def test_build_archive_requires_every_vertex_table(medical, tmp_path):
    schema, files = medical
    with pytest.raises(IngestError, match="Disease"):
        build_archive(schema, {"Person": files["persons"]}, {}, tmp_path / "x")


def _digest(root):
    h = hashlib.sha256()
    for p in sorted(root.rglob("*")):
        if p.is_file():
            h.update(str(p.relative_to(root)).encode())
            h.update(p.read_bytes())
    return h.hexdigest()


def test_archives_are_byte_identical(medical, tmp_path):
    schema, files = medical
    args = ({"Person": files["persons"], "Disease": files["diseases"]},
            {"Person_Diagnosed_Disease": files["diagnosed"]})
    build_archive(schema, *args, tmp_path / "a")
    build_archive(schema, *args, tmp_path / "b")
    assert _digest(tmp_path / "a") == _digest(tmp_path / "b")


def test_import_roundtrip_modulo_relabeling(toy_dir, toy_archive):
    import csv

    schema = load_schema(toy_archive)
    rows = list(csv.DictReader(open(toy_dir / "Person.csv")))
    keys = ColumnFile.open(toy_archive / "vertex/Person/_id.gar").read_all()
    names = ColumnFile.open(toy_archive / "vertex/Person/prop_name.gar").read_all()
    for row in rows:
        assert names[keys.index(row["id"])] == row["name"]
    assert schema.vertex_types[0].candidate_labels == ("Asian", "Enrollee")


# -- synthetic graphs ------------------------------------------------------

def test_synthetic_is_deterministic():
    a = generate_synthetic(500, 3000, 0.5, 3, seed=7)
    b = generate_synthetic(500, 3000, 0.5, 3, seed=7)
    assert np.array_equal(a.src, b.src) and np.array_equal(a.dst, b.dst)
    assert all(np.array_equal(a.labels[k], b.labels[k]) for k in a.labels)
    c = generate_synthetic(500, 3000, 0.5, 3, seed=8)
    assert not np.array_equal(a.src, c.src)


def test_synthetic_is_simple():
    g = generate_synthetic(200, 5000, 0.3, 0, seed=1)
    pairs = set(zip(g.src.tolist(), g.dst.tolist()))
    assert len(pairs) == g.m == 5000
    assert not np.any(g.src == g.dst)
    assert g.src.min() >= 0 and g.dst.max() < 200


def test_full_locality_keeps_gaps_small():
    g = generate_synthetic(5000, 40000, 1.0, 0, seed=2, window=16)
    assert np.abs(g.dst - g.src).max() <= 16
    # gap histogram inside each sorted neighbor list: a gap of at most 16
    # is stored as (gap - 1) <= 15, i.e. in 4 bits
    order = np.lexsort((g.dst, g.src))
    src, dst = g.src[order], g.dst[order]
    same = src[1:] == src[:-1]
    gaps = np.diff(dst)[same]
    assert gaps.min() >= 1
    assert np.mean(gaps <= 16) > 0.9

    from lpgar.colstore import column_stats
    from lpgar.topology import build_topology

    # miniblocks that straddle a group boundary hold a backward step, so they
    # pack at 8 bits; the column still beats 64-bit plain storage by far
    topo = build_topology(np.stack([g.src, g.dst], axis=1), Orientation.CSR, g.n)
    assert column_stats(topo.dst_column).payload_bytes < 0.25 * 8 * g.m


def test_zero_locality_is_uniform():
    g = generate_synthetic(1000, 20000, 0.0, 0, seed=3)
    gaps = np.abs(g.dst - g.src)
    assert np.mean(gaps <= 16) < 0.05
    assert np.histogram(g.dst, bins=10, range=(0, 1000))[0].min() > 1500


def test_labels_come_in_runs():
    g = generate_synthetic(20000, 0, 0.0, 2, seed=4, mean_run=100)
    for bits in g.labels.values():
        runs = np.count_nonzero(np.diff(bits.astype(np.int8))) + 1
        assert 20000 / runs > 50


@pytest.mark.parametrize("args", [(3, 7, 0.0), (10, 5, 1.5), (10, -1, 0.0), (100, 2000, 1.0)])
def test_infeasible_parameters(args):
    n, m, tau = args
    with pytest.raises(IngestError):
        generate_synthetic(n, m, tau, 0, seed=0, window=4)


def test_synthetic_archive(tmp_path):
    g = generate_synthetic(3000, 20000, 0.9, 3, seed=5)
    write_synthetic_archive(g, tmp_path / "syn")
    schema = load_schema(tmp_path / "syn")
    assert validate_layout(schema, tmp_path / "syn").ok
    assert schema.vertex_types[0].partition_size % schema.page_rows == 0
