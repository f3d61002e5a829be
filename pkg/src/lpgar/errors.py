"""Exception hierarchy shared by every lpgar module."""


class LpgarError(Exception):
    """Base class for data errors raised by lpgar."""


class SchemaError(LpgarError, ValueError):
    """Metadata document is malformed or violates a schema invariant.

    ``key_path`` names the offending location, e.g. ``vertices[0].properties[1].type``.
    """

    def __init__(self, key_path: str, message: str):
        self.key_path = key_path
        super().__init__(f"{key_path}: {message}" if key_path else message)


class ColumnFormatError(LpgarError, ValueError):
    """A column file is truncated, fails its checksum, or has a bad structure."""


class CodecError(LpgarError, ValueError):
    """Codec not compatible with the physical type of the values."""


class TopologyError(LpgarError, ValueError):
    """Invalid edge set (out-of-range endpoint, duplicate edge) or vertex id."""


class FastPathUnavailable(LpgarError, ValueError):
    """The bit-extract decoder cannot handle this miniblock; use the scalar path."""


class LabelExprSyntaxError(LpgarError, ValueError):
    def __init__(self, message: str, column: int):
        self.column = column
        super().__init__(f"{message} at column {column}")


class FilterError(LpgarError, ValueError):
    """Label filter inputs are inconsistent (unknown label, mismatched lengths)."""


class PACError(LpgarError, ValueError):
    """PAC is incompatible with the column it is applied to."""


class IngestError(LpgarError, ValueError):
    """Raw input rows cannot be imported."""
