from __future__ import annotations

import copy
import os

import pytest
import yaml

from lpgar.errors import SchemaError
from lpgar.schema import (
    EdgeTypeSchema,
    GraphSchema,
    Property,
    VertexTypeSchema,
    load_schema,
    save_schema,
    schema_from_dict,
    schema_to_dict,
    validate_layout,
)
from lpgar.topology import Orientation

MINIMAL = {
    "name": "g",
    "format_version": 1,
    "vertices": [{"type": "Person", "partition_size": 1024, "labels": ["Asian", "Enrollee"]}],
}

# Person and Disease vertex tables with a Person-Diagnosed-Disease edge table
MEDICAL = {
    "name": "medical",
    "format_version": 1,
    "vertices": [
        {
            "type": "Person",
            "partition_size": 1024,
            "properties": [{"name": "pid", "type": "int64"}, {"name": "age", "type": "int64"}],
            "labels": ["Asian", "Enrollee"],
        },
        {"type": "Disease", "partition_size": 1024, "properties": [{"name": "name", "type": "string"}]},
    ],
    "edges": [{"src": "Person", "relation": "Diagnosed", "dst": "Disease", "orientations": ["csr", "csc"]}],
}


def write(tmp_path, doc):
    path = tmp_path / "_graph.yaml"
    path.write_text(yaml.safe_dump(doc))
    return path


def test_minimal_document(tmp_path):
    s = load_schema(write(tmp_path, MINIMAL))
    assert len(s.vertex_types) == 1 and len(s.edge_types) == 0
    assert s.vertex_types[0].candidate_labels == ("Asian", "Enrollee")


def test_medical_document(tmp_path):
    s = load_schema(write(tmp_path, MEDICAL))
    assert [v.type_name for v in s.vertex_types] == ["Person", "Disease"]
    assert len(s.edge_types) == 1
    et = s.edge_types[0]
    assert et.key == "Person_Diagnosed_Disease"
    assert et.orientations == (Orientation.CSR, Orientation.CSC)


@pytest.mark.parametrize("doc", [MINIMAL, MEDICAL])
def test_roundtrip(tmp_path, doc):
    s = schema_from_dict(doc)
    save_schema(s, tmp_path)
    assert load_schema(tmp_path) == s
    assert schema_from_dict(schema_to_dict(s)) == s


def test_roundtrip_with_prefix_and_odd_label_names(tmp_path):
    person = VertexTypeSchema("P", 2048, (Property("yes", "bool"),), ("No", "null_", "On"))
    s = GraphSchema("g", (person,), (EdgeTypeSchema("P", "r", "P"),), path_prefix="data/v1", page_rows=256)
    save_schema(s, tmp_path)
    assert load_schema(tmp_path) == s


def test_unwritable_directory(tmp_path):
    if os.geteuid() == 0:
        target = tmp_path / "missing" / "deeper"
    else:
        target = tmp_path / "ro"
        target.mkdir()
        target.chmod(0o500)
    with pytest.raises(OSError):
        save_schema(schema_from_dict(MINIMAL), target / "_graph.yaml")


def mutate(doc, fn):
    d = copy.deepcopy(doc)
    fn(d)
    return d


@pytest.mark.parametrize(
    "fn,path,message",
    [
        (lambda d: d["edges"][0].update(src="Ghost"), "edges[0].src", "dangling vertex type"),
        (lambda d: d["edges"][0].update(dst="Ghost"), "edges[0].dst", "dangling vertex type"),
        (lambda d: d["vertices"][1]["properties"][0].update(type="decimal"),
         "vertices[1].properties[0].type", "unknown datatype"),
        (lambda d: d["vertices"].append(copy.deepcopy(d["vertices"][0])), "vertices[2].type", "duplicate vertex type"),
        (lambda d: d["edges"].append(copy.deepcopy(d["edges"][0])), "edges[1]", "duplicate edge type"),
        (lambda d: d["vertices"][0]["labels"].append("age"), "vertices[0].labels[2]", "duplicate name"),
        (lambda d: d["vertices"][0]["properties"].append({"name": "pid", "type": "string"}),
         "vertices[0].properties[2].name", "duplicate name"),
        (lambda d: d["vertices"][0].update(partition_size=1000), "vertices[0].partition_size", "multiple"),
        (lambda d: d["vertices"][0].update(partition_size=0), "vertices[0].partition_size", "positive"),
        (lambda d: d["edges"][0].update(orientations=[]), "edges[0].orientations", "at least one"),
        (lambda d: d["edges"][0].update(orientations=["csr", "csr"]), "edges[0].orientations", "duplicate"),
        (lambda d: d["edges"][0].update(orientations=["rows"]), "edges[0].orientations[0]", ""),
        (lambda d: d.update(format_version=2), "format_version", "unsupported"),
        (lambda d: d.pop("format_version"), "format_version", "missing"),
        (lambda d: d.update(colour="blue"), "colour", "unknown key"),
        (lambda d: d["vertices"][0].update(type="Per son"), "vertices[0].type", "identifier"),
        (lambda d: d.update(page_rows=1000), "page_rows", "power of two"),
    ],
)
def test_rejections_carry_key_path(fn, path, message):
    with pytest.raises(SchemaError) as info:
        schema_from_dict(mutate(MEDICAL, fn))
    assert info.value.key_path == path
    assert message in str(info.value)


def test_parse_failure(tmp_path):
    bad = tmp_path / "bad.yaml"
    bad.write_text("name: [unclosed\n")
    with pytest.raises(SchemaError, match="cannot parse"):
        load_schema(bad)
    with pytest.raises(SchemaError):
        load_schema(tmp_path / "absent.yaml")


def test_layout_of_fresh_archive(toy_archive):
    report = validate_layout(load_schema(toy_archive), toy_archive)
    assert report.ok
    assert {f.path for f in report.findings} >= {
        "vertex/Person/_id.gar",
        "vertex/Person/label_Asian.gar",
        "edge/Person_Knows_Person/csr/dst.gar",
    }
    assert report.partitions == {"Person": [(0, 6)]}


def test_layout_flags_missing_dst(toy_archive):
    (toy_archive / "edge/Person_Knows_Person/csr/dst.gar").unlink()
    report = validate_layout(load_schema(toy_archive), toy_archive)
    assert not report.ok
    assert [(f.path, f.status) for f in report.problems()] == [("edge/Person_Knows_Person/csr/dst.gar", "missing")]


def test_layout_flags_row_mismatch(toy_archive):
    from lpgar.colstore import ColumnFile, Codec, PhysicalType, encode_column

    path = toy_archive / "vertex/Person/prop_age.gar"
    short = ColumnFile.open(path).read_all()[:4]
    path.write_bytes(encode_column(short, Codec.PLAIN, PhysicalType.INT64))
    report = validate_layout(load_schema(toy_archive), toy_archive)
    problems = report.problems()
    assert [(f.path, f.status, f.rows, f.expected_rows) for f in problems] == [
        ("vertex/Person/prop_age.gar", "row_mismatch", 4, 6)
    ]


def test_layout_flags_corruption(toy_archive):
    path = toy_archive / "vertex/Person/label_Enrollee.gar"
    data = bytearray(path.read_bytes())
    data[-1] ^= 0xFF
    path.write_bytes(bytes(data))
    report = validate_layout(load_schema(toy_archive), toy_archive)
    assert [(f.path, f.status) for f in report.problems()] == [("vertex/Person/label_Enrollee.gar", "corrupt")]
