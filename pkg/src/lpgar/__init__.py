"""Columnar storage for labeled property graphs.

Vertex and edge tables live in page-based column files. Topology is kept as
delta-encoded CSR/CSC edge tables, labels as run-length interval lists, and
neighbor sets travel as page-aligned bitmaps (PAC) that drive selection
pushdown into property columns.
"""

from .colstore import (
    PAGE_ROWS,
    Codec,
    ColumnFile,
    ColumnStats,
    PhysicalType,
    column_stats,
    encode_column,
    read_rows,
    write_column,
)
from .errors import (
    CodecError,
    ColumnFormatError,
    FastPathUnavailable,
    FilterError,
    LpgarError,
    IngestError,
    LabelExprSyntaxError,
    PACError,
    SchemaError,
    TopologyError,
)
from .ingest import IdMap, build_archive, generate_synthetic, import_edges, import_vertices
from .labels import (
    IntervalLabelColumn,
    IntervalSet,
    LabelExpr,
    evaluation_count,
    filter_complex,
    filter_simple,
    intervals_to_pac,
    parse_label_expr,
)
from .pac import PAC
from .properties import fetch_by_pac, fetch_labels_by_pac
from .schema import GraphSchema, load_schema, save_schema, validate_layout, validate_schema
from .topology import (
    EdgeTopology,
    GapRun,
    Orientation,
    build_topology,
    gaps_to_bitmap_fast,
    gaps_to_bitmap_scalar,
    neighbor_ids,
    neighbor_pac,
    retrieval_page_cost,
)

__version__ = "0.1.0"
