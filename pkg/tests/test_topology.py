from __future__ import annotations

import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from lpgar.colstore import MINIBLOCK_SIZE, pack_bits
from lpgar.errors import FastPathUnavailable, TopologyError
from lpgar.ingest import generate_synthetic
from lpgar.oracle import oracle_adjacency, oracle_neighbors
from lpgar.pac import PAC
from lpgar.topology import (
    EdgeTopology,
    GapRun,
    Orientation,
    build_topology,
    fast_path_applicable,
    full_scan_page_cost,
    gaps_to_bitmap_fast,
    gaps_to_bitmap_scalar,
    neighbor_ids,
    neighbor_pac,
    pext64,
    retrieval_page_cost,
)

from .conftest import TOY_EDGES


def packed_span(stored, width):
    x = np.zeros((1, MINIBLOCK_SIZE), dtype=np.uint64)
    x[0, : len(stored)] = stored
    return pack_bits(x, width).tobytes()


def pac_ids(pac: PAC) -> list[int]:
    return pac.ids().tolist()


# -- build -----------------------------------------------------------------

def test_build_csr_example():
    topo = build_topology(TOY_EDGES, Orientation.CSR, 3)
    assert topo.src_column.read_all().tolist() == [0, 0, 2]
    assert topo.dst_column.read_all().tolist() == [1, 5, 3]
    assert topo.offset_column.read_all().tolist() == [0, 2, 2, 3]


def test_build_csc_example():
    topo = build_topology(TOY_EDGES, Orientation.CSC, 6)
    pairs = list(zip(topo.src_column.read_all().tolist(), topo.dst_column.read_all().tolist()))
    assert pairs == [(0, 1), (2, 3), (0, 5)]
    assert topo.offset_column.read_all().tolist() == [0, 0, 1, 1, 2, 2, 3]


def test_build_empty():
    topo = build_topology([], Orientation.CSR, 4)
    assert topo.offset_column.read_all().tolist() == [0, 0, 0, 0, 0]
    assert topo.num_edges == 0
    assert neighbor_ids(topo, 3).tolist() == []


def test_duplicate_edge_rejected():
    with pytest.raises(TopologyError, match="duplicate edge \\(0, 1\\)"):
        build_topology([(0, 1), (0, 1)], Orientation.CSR, 2)


def test_out_of_range_rejected():
    with pytest.raises(TopologyError, match="outside"):
        build_topology([(3, 0)], Orientation.CSR, 2)
    with pytest.raises(TopologyError, match="outside"):
        build_topology([(0, 3)], Orientation.CSR, 2, n_value_vertices=3)
    with pytest.raises(TopologyError):
        build_topology([(-1, 0)], Orientation.CSR, 2)


def test_properties_follow_the_sort():
    edges = [(0, 5, {"w": 50}), (0, 1, {"w": 10}), (2, 3, {"w": 23})]
    topo = build_topology(edges, Orientation.CSR, 3)
    assert topo.edge_property_columns["w"].read_all().tolist() == [10, 50, 23]
    csc = build_topology(edges, "csc", 6)
    assert csc.edge_property_columns["w"].read_all().tolist() == [10, 23, 50]


def test_save_and_open(tmp_path):
    topo = build_topology(TOY_EDGES, Orientation.CSR, 3)
    topo.save(tmp_path / "csr")
    again = EdgeTopology.open(tmp_path / "csr")
    assert again.orientation is Orientation.CSR
    assert neighbor_ids(again, 0).tolist() == [1, 5]


def test_timings_recorded():
    topo = build_topology(TOY_EDGES, Orientation.CSR, 3)
    assert set(topo.timings) == {"sort", "offset", "write"}


# -- retrieval -------------------------------------------------------------

def test_neighbor_examples():
    topo = build_topology(TOY_EDGES, Orientation.CSR, 3)
    assert neighbor_ids(topo, 0).tolist() == [1, 5]
    assert neighbor_ids(topo, 1).tolist() == []
    assert pac_ids(neighbor_pac(topo, 0)) == [1, 5]
    pac = neighbor_pac(topo, 0, 1024)
    assert pac.pages() == [0]
    assert pac.page_offsets(0).tolist() == [1, 5]
    assert len(neighbor_pac(topo, 1)) == 0


def test_neighbors_across_page_boundary():
    topo = build_topology([(0, 1023), (0, 1024)], Orientation.CSR, 1)
    pac = neighbor_pac(topo, 0, 1024)
    assert pac.pages() == [0, 1]
    assert pac.page_offsets(0).tolist() == [1023]
    assert pac.page_offsets(1).tolist() == [0]


def test_vertex_out_of_range():
    topo = build_topology(TOY_EDGES, Orientation.CSR, 3)
    with pytest.raises(TopologyError):
        neighbor_ids(topo, 3)
    with pytest.raises(TopologyError):
        neighbor_pac(topo, -1)


def test_tail_vertex_slice():
    rng = np.random.default_rng(11)
    n = 300
    edges = {(int(a), int(b)) for a, b in rng.integers(0, n, (3000, 2))}
    edges |= {(n - 1, 0), (n - 1, n - 2)}
    edges = sorted(edges)
    topo = build_topology(edges, Orientation.CSR, n, page_rows=64)
    assert neighbor_ids(topo, n - 1).tolist() == oracle_neighbors(edges, n - 1)


@pytest.mark.parametrize("locality", [0.0, 0.5, 1.0])
@pytest.mark.parametrize("page_rows", [64, 1024])
def test_oracle_equivalence_both_orientations(locality, page_rows):
    g = generate_synthetic(800, 6000, locality, label_count=0, seed=3)
    edges = np.stack([g.src, g.dst], axis=1)
    for orientation, direction in ((Orientation.CSR, "out"), (Orientation.CSC, "in")):
        topo = build_topology(edges, orientation, g.n, page_rows=page_rows)
        adj = oracle_adjacency(edges.tolist(), g.n, direction)
        for v in range(g.n):
            assert neighbor_ids(topo, v).tolist() == adj[v]
            assert pac_ids(neighbor_pac(topo, v, page_rows)) == adj[v]


def test_dense_groups_use_fast_path_and_agree():
    # vertex 0 links to every even id, so whole miniblocks of delta 2 sit inside one group
    edges = [(0, 2 * i) for i in range(1, 400)] + [(1, i) for i in range(0, 500, 3)]
    topo = build_topology(edges, Orientation.CSR, 2, page_rows=256)
    for v in (0, 1):
        fast = neighbor_pac(topo, v, 256, fast=True)
        slow = neighbor_pac(topo, v, 256, fast=False)
        assert fast == slow
        assert pac_ids(fast) == oracle_neighbors(edges, v)


def test_reversal_equals_csc():
    g = generate_synthetic(300, 2000, 0.5, label_count=0, seed=9)
    fwd = build_topology(np.stack([g.src, g.dst], axis=1), Orientation.CSC, g.n)
    rev = build_topology(np.stack([g.dst, g.src], axis=1), Orientation.CSR, g.n)
    for v in range(g.n):
        assert neighbor_ids(fwd, v).tolist() == neighbor_ids(rev, v).tolist()


# -- bitmap decoders -------------------------------------------------------

def test_scalar_examples():
    assert pac_ids(gaps_to_bitmap_scalar(GapRun(0, (2, 1, 4)))) == [0, 2, 3, 7]
    assert pac_ids(gaps_to_bitmap_scalar(GapRun(0, ()))) == [0]
    pac = gaps_to_bitmap_scalar(GapRun(1022, (3,)), 1024)
    assert pac.page_offsets(0).tolist() == [1022]
    assert pac.page_offsets(1).tolist() == [1]


def test_scalar_rejects_non_positive_gap():
    with pytest.raises(ValueError):
        gaps_to_bitmap_scalar(GapRun(0, (1, 0)))


def test_fast_example():
    # deltas 2,1,4 with min_delta 1 are stored as 1,0,3 at width 2
    pac = gaps_to_bitmap_fast(packed_span([1, 0, 3], 2), 1, 2, 0, count=3)
    assert pac_ids(pac) == [0, 2, 3, 7]


def test_fast_width_zero_dense_run():
    pac = gaps_to_bitmap_fast(b"", 1, 0, 0)
    assert pac_ids(pac) == list(range(33))


def test_fast_refuses_wide_spans():
    with pytest.raises(FastPathUnavailable):
        gaps_to_bitmap_fast(bytes(32), 1, 8, 0)
    with pytest.raises(FastPathUnavailable):
        gaps_to_bitmap_fast(packed_span([0], 4), 2, 4, 0)  # deltas up to 17
    with pytest.raises(FastPathUnavailable):
        gaps_to_bitmap_fast(packed_span([0], 1), 0, 1, 0)  # a zero delta


def test_applicability_predicate():
    assert fast_path_applicable(1, 4)
    assert fast_path_applicable(13, 1)
    assert not fast_path_applicable(2, 4)
    assert fast_path_applicable(15, 1)
    assert not fast_path_applicable(16, 1)
    assert fast_path_applicable(16, 0)
    assert not fast_path_applicable(17, 0)


def test_pext64_reference_cases():
    assert pext64(0b1011_0110, 0b1111_0000) == 0b1011
    assert pext64(0xFFFF_FFFF_FFFF_FFFF, 0x8000_0000_0000_0001) == 0b11
    assert pext64(0b0100, 0b0111) == 0b100
    assert pext64(123, 0) == 0


@settings(max_examples=300, deadline=None)
@given(st.data())
def test_fast_matches_scalar(data):
    width = data.draw(st.sampled_from([0, 1, 2, 4]))
    min_delta = data.draw(st.integers(min_value=1, max_value=16 - (1 << width) + 1))
    count = data.draw(st.integers(min_value=0, max_value=MINIBLOCK_SIZE))
    stored = data.draw(st.lists(st.integers(0, (1 << width) - 1), min_size=count, max_size=count))
    start = data.draw(st.integers(0, 5000))
    page_rows = data.draw(st.sampled_from([8, 64, 1024]))
    fast = gaps_to_bitmap_fast(packed_span(stored, width), min_delta, width, start, page_rows, count)
    slow = gaps_to_bitmap_scalar(GapRun(start, tuple(min_delta + x for x in stored)), page_rows)
    assert fast == slow


# -- page cost -------------------------------------------------------------

def test_page_cost_examples():
    topo = build_topology(TOY_EDGES, Orientation.CSR, 3)
    assert retrieval_page_cost(topo, 1) == 1  # offset page only
    assert retrieval_page_cost(topo, 0) == 2  # offset page + one dst page
    assert full_scan_page_cost(topo) == 1


def test_page_cost_counts_intersecting_pages():
    edges = [(0, i) for i in range(1, 3000)] + [(1, 0)]
    topo = build_topology(edges, Orientation.CSR, 2, page_rows=1024)
    assert retrieval_page_cost(topo, 0) == 1 + 3
    assert retrieval_page_cost(topo, 1) == 1 + 1
    assert full_scan_page_cost(topo) == 3
