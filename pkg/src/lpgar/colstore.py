"""Page-based column files with PLAIN, DELTA and RLE_BOOL codecs.

File layout, little-endian throughout::

    magic "GAR1" | format_version u16 | codec u8 | physical_type u8
    | total_rows u64 | page_count u32
    | page directory: (byte_offset u64, row_count u32) per page
    | page payloads
    | CRC32C u32 over every preceding byte

Every page except the last holds exactly ``page_rows`` rows, so the page that
contains row ``r`` is ``r // page_rows``.

Page payloads:

* PLAIN int64/float64: 8 bytes per value. PLAIN bool: one bit per row,
  LSB-first. PLAIN string: ``(u32 length, utf-8 bytes)`` records.
* DELTA (int64): ``first_value i64 | miniblock_count u16 | min_delta i64 * k
  | bit_width u8 * k | packed bits``. Each miniblock holds 32 deltas relative
  to the previous row of the same page, stored as ``delta - min_delta`` and
  bit-packed LSB-first at a width from {0, 1, 2, 4, 8, 16, 32, 64}. Deltas
  wrap modulo 2**64, so any int64 sequence round-trips.
* RLE_BOOL: ``first_value u8 | boundary_count u16 | boundaries u16 * |P|``
  where ``P[0] == 0`` and ``P[-1] == row_count``.
"""

from __future__ import annotations

import enum
import os
import struct
from dataclasses import dataclass, field
from typing import Any, NamedTuple, Sequence

import crc32c
import numpy as np

from .errors import CodecError, ColumnFormatError

PAGE_ROWS = 1024
MINIBLOCK_SIZE = 32
FORMAT_VERSION = 1
MAGIC = b"GAR1"
BIT_WIDTHS = (0, 1, 2, 4, 8, 16, 32, 64)
MAX_PAGE_ROWS = 1 << 15  # u16 RLE boundaries must hold P[-1] == page_rows

_HEADER = struct.Struct("<4sHBBQI")
_DIR_ENTRY = struct.Struct("<QI")
_CRC = struct.Struct("<I")
_DELTA_HEAD = struct.Struct("<qH")
_RLE_HEAD = struct.Struct("<BH")
_U32 = struct.Struct("<I")

# exclusive upper bound of the stored value for each width below 64
_WIDTH_LIMITS = np.array([1 << w for w in BIT_WIDTHS[:-1]], dtype=np.uint64)
_WIDTHS_ARR = np.array(BIT_WIDTHS, dtype=np.uint8)
_VALID_WIDTH = np.zeros(256, dtype=bool)
_VALID_WIDTH[list(BIT_WIDTHS)] = True


def _present_widths(widths: np.ndarray) -> list[int]:
    return [w for w in np.flatnonzero(np.bincount(widths, minlength=65)).tolist() if w]


class Codec(enum.IntEnum):
    PLAIN = 0
    DELTA = 1
    RLE_BOOL = 2


class PhysicalType(enum.IntEnum):
    INT64 = 0
    FLOAT64 = 1
    STRING = 2
    BOOL = 3

    @classmethod
    def from_name(cls, name: str) -> "PhysicalType":
        try:
            return cls[name.upper()]
        except KeyError:
            raise ValueError(f"unknown datatype {name!r}") from None

    @property
    def type_name(self) -> str:
        return self.name.lower()


class PageEntry(NamedTuple):
    byte_offset: int
    row_count: int


class ColumnStats(NamedTuple):
    encoded_bytes: int
    rows: int
    pages: int
    payload_bytes: int


@dataclass(frozen=True)
class Miniblock:
    min_delta: int
    bit_width: int
    packed: bytes


@dataclass(frozen=True)
class DeltaPage:
    first_value: int
    row_count: int
    miniblocks: tuple[Miniblock, ...]
    payload: bytes = field(default=b"", repr=False, compare=False)

    def values(self) -> np.ndarray:
        """All row values of the page (vectorized decode)."""
        if self.payload:
            return _decode_delta_page(memoryview(self.payload), self.row_count)
        return np.array(decode_delta_scalar(self), dtype=np.int64)


def check_page_rows(page_rows: int) -> int:
    page_rows = int(page_rows)
    if page_rows < 8 or page_rows > MAX_PAGE_ROWS or page_rows & (page_rows - 1):
        raise ValueError(
            f"page_rows must be a power of two in [8, {MAX_PAGE_ROWS}], got {page_rows}"
        )
    return page_rows


def bit_width_for(max_value: int) -> int:
    """Smallest allowed width that can hold ``max_value`` (unsigned)."""
    for w in BIT_WIDTHS:
        if max_value < (1 << w):
            return w
    raise ValueError(f"value {max_value} does not fit in 64 bits")


# -- bit packing -----------------------------------------------------------

def pack_bits(x: np.ndarray, width: int) -> np.ndarray:
    """Pack rows of 32 uint64 values into ``4 * width`` bytes each, LSB-first."""
    k = x.shape[0]
    if width == 0:
        return np.zeros((k, 0), dtype=np.uint8)
    if width >= 8:
        return x.astype(f"<u{width // 8}").view(np.uint8).reshape(k, 4 * width)
    shifts = np.arange(width, dtype=np.uint64)
    bits = ((x[:, :, None] >> shifts) & np.uint64(1)).astype(np.uint8)
    return np.packbits(bits.reshape(k, MINIBLOCK_SIZE * width), axis=1, bitorder="little")


def unpack_bits(packed: np.ndarray, width: int) -> np.ndarray:
    """Inverse of :func:`pack_bits`; returns a ``(k, 32)`` uint64 array."""
    k = packed.shape[0]
    if width == 0:
        return np.zeros((k, MINIBLOCK_SIZE), dtype=np.uint64)
    if width >= 8:
        return np.ascontiguousarray(packed).view(f"<u{width // 8}").astype(np.uint64).reshape(
            k, MINIBLOCK_SIZE
        )
    bits = np.unpackbits(packed, axis=1, bitorder="little").reshape(k, MINIBLOCK_SIZE, width)
    weights = np.uint64(1) << np.arange(width, dtype=np.uint64)
    return (bits.astype(np.uint64) * weights).sum(axis=2, dtype=np.uint64)


# -- page codecs -----------------------------------------------------------

def _encode_delta_page(v: np.ndarray) -> bytes:
    first = int(v[0])
    deltas = v[1:] - v[:-1]
    n = deltas.size
    k = -(-n // MINIBLOCK_SIZE)
    head = _DELTA_HEAD.pack(first, k)
    if k == 0:
        return head
    full = np.empty(k * MINIBLOCK_SIZE, dtype=np.int64)
    full[:n] = deltas
    full[n:] = deltas[-1]  # padding must not lower the minimum
    full = full.reshape(k, MINIBLOCK_SIZE)
    mins = full.min(axis=1)
    x = full.view(np.uint64) - mins.view(np.uint64)[:, None]
    x.reshape(-1)[n:] = 0
    widths = _WIDTHS_ARR[np.searchsorted(_WIDTH_LIMITS, x.max(axis=1), side="right")]
    lo, hi = int(widths.min()), int(widths.max())
    if lo == hi:
        packed = pack_bits(x, lo)
    else:
        sizes = widths.astype(np.int64) * 4
        starts = np.cumsum(sizes) - sizes
        packed = np.zeros(int(sizes.sum()), dtype=np.uint8)
        for w in _present_widths(widths):
            sel = widths == w
            packed[starts[sel][:, None] + np.arange(4 * w)] = pack_bits(x[sel], w)
    return b"".join((head, mins.astype("<i8").tobytes(), widths.tobytes(), packed.tobytes()))


def _delta_layout(buf: memoryview, rows: int):
    if len(buf) < _DELTA_HEAD.size:
        raise ColumnFormatError("delta page shorter than its header")
    first, k = _DELTA_HEAD.unpack_from(buf, 0)
    if k != -(-(rows - 1) // MINIBLOCK_SIZE):
        raise ColumnFormatError(f"delta page has {k} miniblocks for {rows} rows")
    pos = _DELTA_HEAD.size
    if len(buf) < pos + 9 * k:
        raise ColumnFormatError("delta page miniblock headers truncated")
    mins = np.frombuffer(buf, dtype="<i8", count=k, offset=pos)
    widths = np.frombuffer(buf, dtype=np.uint8, count=k, offset=pos + 8 * k)
    if not _VALID_WIDTH[widths].all():
        bad = widths[~_VALID_WIDTH[widths]]
        raise ColumnFormatError(f"invalid miniblock bit width {int(bad[0])}")
    sizes = widths.astype(np.int64) * 4
    data_start = pos + 9 * k
    if len(buf) != data_start + int(sizes.sum()):
        raise ColumnFormatError("delta page packed payload has the wrong length")
    return first, mins, widths, sizes, data_start


def _decode_delta_page(buf: memoryview, rows: int) -> np.ndarray:
    first, mins, widths, sizes, data_start = _delta_layout(buf, rows)
    out = np.empty(rows, dtype=np.int64)
    out[0] = first
    k = mins.size
    if k == 0:
        return out
    packed = np.frombuffer(buf, dtype=np.uint8, offset=data_start)
    lo, hi = int(widths.min()), int(widths.max())
    if lo == hi:
        x = unpack_bits(packed.reshape(k, 4 * lo), lo)
    else:
        starts = np.cumsum(sizes) - sizes
        x = np.zeros((k, MINIBLOCK_SIZE), dtype=np.uint64)
        for w in _present_widths(widths):
            sel = widths == w
            x[sel] = unpack_bits(packed[starts[sel][:, None] + np.arange(4 * w)], w)
    deltas = (x + mins.view(np.uint64)[:, None]).view(np.int64).reshape(-1)[: rows - 1]
    np.cumsum(deltas, out=out[1:])
    out[1:] += first
    return out


def parse_delta_page(buf: bytes | memoryview, rows: int) -> DeltaPage:
    """Structured view of a DELTA payload, one :class:`Miniblock` per 32 deltas."""
    buf = memoryview(buf)
    first, mins, widths, sizes, pos = _delta_layout(buf, rows)
    blocks = []
    for m, w, s in zip(mins.tolist(), widths.tolist(), sizes.tolist()):
        blocks.append(Miniblock(m, w, bytes(buf[pos : pos + s])))
        pos += s
    return DeltaPage(first, rows, tuple(blocks), bytes(buf))


def _wrap64(x: int) -> int:
    return ((x + (1 << 63)) & ((1 << 64) - 1)) - (1 << 63)


def miniblock_values(block: Miniblock) -> list[int]:
    """Stored (unsigned, pre-offset) values of one miniblock, in row order."""
    w = block.bit_width
    if w not in BIT_WIDTHS or len(block.packed) != 4 * w:
        raise ColumnFormatError(f"miniblock with width {w} has {len(block.packed)} packed bytes")
    if w == 0:
        return [0] * MINIBLOCK_SIZE
    word = int.from_bytes(block.packed, "little")
    mask = (1 << w) - 1
    return [(word >> (i * w)) & mask for i in range(MINIBLOCK_SIZE)]


def decode_delta_scalar(page: DeltaPage, upto: int | None = None) -> list[int]:
    """Reference prefix-sum decoder: one running sum, one row at a time."""
    rows = page.row_count if upto is None else upto
    if rows < 0 or rows > page.row_count:
        raise ValueError(f"upto={upto} outside [0, {page.row_count}]")
    if -(-(page.row_count - 1) // MINIBLOCK_SIZE) != len(page.miniblocks):
        raise ColumnFormatError("miniblock count does not match row count")
    if rows == 0:
        return []
    out = [page.first_value]
    acc = page.first_value
    for block in page.miniblocks:
        for x in miniblock_values(block):
            if len(out) == rows:
                return out
            acc = _wrap64(acc + block.min_delta + x)
            out.append(acc)
    return out


def _encode_rle_page(v: np.ndarray) -> bytes:
    change = np.flatnonzero(v[1:] != v[:-1]) + 1
    bounds = np.concatenate(([0], change, [v.size])).astype("<u2")
    return _RLE_HEAD.pack(int(v[0]), bounds.size) + bounds.tobytes()


def parse_rle_page(buf: bytes | memoryview, rows: int) -> tuple[int, np.ndarray]:
    buf = memoryview(buf)
    if len(buf) < _RLE_HEAD.size:
        raise ColumnFormatError("RLE page shorter than its header")
    first, count = _RLE_HEAD.unpack_from(buf, 0)
    if first > 1 or len(buf) != _RLE_HEAD.size + 2 * count or count < 2:
        raise ColumnFormatError("malformed RLE page header")
    bounds = np.frombuffer(buf, dtype="<u2", count=count, offset=_RLE_HEAD.size).astype(np.int64)
    if bounds[0] != 0 or bounds[-1] != rows or np.any(np.diff(bounds) <= 0):
        raise ColumnFormatError("RLE boundaries must increase strictly from 0 to the row count")
    return first, bounds


def _decode_rle_page(buf: memoryview, rows: int) -> np.ndarray:
    first, bounds = parse_rle_page(buf, rows)
    parity = np.arange(bounds.size - 1) & 1
    return np.repeat((parity ^ first).astype(bool), np.diff(bounds))


def _encode_plain_page(v: Any, ptype: PhysicalType) -> bytes:
    if ptype is PhysicalType.INT64:
        return v.astype("<i8").tobytes()
    if ptype is PhysicalType.FLOAT64:
        return v.astype("<f8").tobytes()
    if ptype is PhysicalType.BOOL:
        return np.packbits(v, bitorder="little").tobytes()
    parts = []
    for s in v:
        b = s.encode("utf-8")
        parts.append(_U32.pack(len(b)))
        parts.append(b)
    return b"".join(parts)


def _decode_plain_page(buf: memoryview, rows: int, ptype: PhysicalType):
    if ptype in (PhysicalType.INT64, PhysicalType.FLOAT64):
        if len(buf) != 8 * rows:
            raise ColumnFormatError(f"plain page holds {len(buf)} bytes for {rows} rows")
        dt = "<i8" if ptype is PhysicalType.INT64 else "<f8"
        return np.frombuffer(buf, dtype=dt).astype(dt[1:])
    if ptype is PhysicalType.BOOL:
        if len(buf) != -(-rows // 8):
            raise ColumnFormatError(f"plain bool page holds {len(buf)} bytes for {rows} rows")
        return np.unpackbits(np.frombuffer(buf, dtype=np.uint8), count=rows, bitorder="little").astype(bool)
    out = []
    pos = 0
    raw = bytes(buf)
    for _ in range(rows):
        if pos + 4 > len(raw):
            raise ColumnFormatError("string page truncated")
        (n,) = _U32.unpack_from(raw, pos)
        pos += 4
        if pos + n > len(raw):
            raise ColumnFormatError("string page truncated")
        out.append(raw[pos : pos + n].decode("utf-8"))
        pos += n
    if pos != len(raw):
        raise ColumnFormatError("string page has trailing bytes")
    return out


# -- column encoding -------------------------------------------------------

def _infer_type(values: Any, codec: Codec) -> PhysicalType:
    if codec is Codec.DELTA:
        return PhysicalType.INT64
    if codec is Codec.RLE_BOOL:
        return PhysicalType.BOOL
    if isinstance(values, np.ndarray):
        kind = values.dtype.kind
    else:
        values = list(values)
        if values and all(isinstance(x, str) for x in values):
            return PhysicalType.STRING
        kind = np.asarray(values).dtype.kind if values else "i"
    return {"b": PhysicalType.BOOL, "i": PhysicalType.INT64, "u": PhysicalType.INT64,
            "f": PhysicalType.FLOAT64, "U": PhysicalType.STRING, "O": PhysicalType.STRING}.get(
        kind, PhysicalType.STRING
    )


def _coerce(values: Any, ptype: PhysicalType, codec: Codec):
    if codec is Codec.DELTA and ptype is not PhysicalType.INT64:
        raise CodecError(f"DELTA codec requires int64 values, not {ptype.type_name}")
    if codec is Codec.RLE_BOOL and ptype is not PhysicalType.BOOL:
        raise CodecError(f"RLE_BOOL codec requires bool values, not {ptype.type_name}")
    if ptype is PhysicalType.STRING:
        out = list(values)
        if not all(isinstance(s, str) for s in out):
            raise CodecError("string column holds non-string values")
        return out
    arr = np.asarray(values)
    if arr.ndim != 1 and arr.size:
        raise CodecError("column values must be one-dimensional")
    arr = arr.reshape(-1)
    if ptype is PhysicalType.BOOL:
        if arr.size and arr.dtype.kind != "b":
            raise CodecError(f"bool column got dtype {arr.dtype}")
        return arr.astype(bool)
    if ptype is PhysicalType.INT64:
        if arr.size and arr.dtype.kind not in "iu":
            raise CodecError(f"int64 column got dtype {arr.dtype}")
        if arr.dtype.kind == "u" and arr.size and int(arr.max()) > np.iinfo(np.int64).max:
            raise CodecError("value does not fit in int64")
        return arr.astype(np.int64)
    if arr.size and arr.dtype.kind not in "iuf":
        raise CodecError(f"float64 column got dtype {arr.dtype}")
    return arr.astype(np.float64)


def encode_column(
    values: Any,
    codec: Codec = Codec.PLAIN,
    physical_type: PhysicalType | str | None = None,
    page_rows: int = PAGE_ROWS,
) -> bytes:
    """Serialize ``values`` into the column file format and return the bytes."""
    codec = Codec(codec)
    page_rows = check_page_rows(page_rows)
    if physical_type is None:
        ptype = _infer_type(values, codec)
    elif isinstance(physical_type, str):
        ptype = PhysicalType.from_name(physical_type)
    else:
        ptype = PhysicalType(physical_type)
    data = _coerce(values, ptype, codec)
    total = len(data)

    if codec is Codec.DELTA:
        encode = _encode_delta_page
    elif codec is Codec.RLE_BOOL:
        encode = _encode_rle_page
    else:
        def encode(chunk):
            return _encode_plain_page(chunk, ptype)

    payloads = [encode(data[i : i + page_rows]) for i in range(0, total, page_rows)]
    head_size = _HEADER.size + _DIR_ENTRY.size * len(payloads)
    parts = [_HEADER.pack(MAGIC, FORMAT_VERSION, codec, ptype, total, len(payloads))]
    offset = head_size
    for i, p in enumerate(payloads):
        rows = min(page_rows, total - i * page_rows)
        parts.append(_DIR_ENTRY.pack(offset, rows))
        offset += len(p)
    parts.extend(payloads)
    body = b"".join(parts)
    return body + _CRC.pack(crc32c.crc32c(body))


def write_column(
    values: Any,
    codec: Codec,
    path: str | os.PathLike,
    physical_type: PhysicalType | str | None = None,
    page_rows: int = PAGE_ROWS,
) -> "ColumnFile":
    data = encode_column(values, codec, physical_type, page_rows)
    with open(path, "wb") as fh:
        fh.write(data)
    return ColumnFile(data, path=path)


class ColumnFile:
    """Read handle over one encoded column.

    Decoding is page-granular. ``pages_read`` counts page payloads decoded
    through this handle, which is how tests observe that a read touched only
    the pages it needed.
    """

    def __init__(self, data: bytes, path: str | os.PathLike | None = None):
        self.path = os.fspath(path) if path is not None else None
        self._data = memoryview(bytes(data))
        self.pages_read = 0
        self._parse()

    @classmethod
    def open(cls, path: str | os.PathLike) -> "ColumnFile":
        with open(path, "rb") as fh:
            return cls(fh.read(), path=path)

    @classmethod
    def from_values(cls, values, codec=Codec.PLAIN, physical_type=None, page_rows=PAGE_ROWS):
        return cls(encode_column(values, codec, physical_type, page_rows))

    def _parse(self) -> None:
        buf = self._data
        where = self.path or "<memory>"
        if len(buf) < _HEADER.size + _CRC.size:
            raise ColumnFormatError(f"{where}: file too short")
        (stored,) = _CRC.unpack_from(buf, len(buf) - _CRC.size)
        if crc32c.crc32c(buf[: len(buf) - _CRC.size]) != stored:
            raise ColumnFormatError(f"{where}: CRC32C mismatch")
        magic, version, codec, ptype, total, count = _HEADER.unpack_from(buf, 0)
        if magic != MAGIC:
            raise ColumnFormatError(f"{where}: bad magic {magic!r}")
        if version != FORMAT_VERSION:
            raise ColumnFormatError(f"{where}: unsupported format version {version}")
        try:
            self.codec = Codec(codec)
            self.physical_type = PhysicalType(ptype)
        except ValueError as exc:
            raise ColumnFormatError(f"{where}: {exc}") from None
        self.total_rows = total
        end = len(buf) - _CRC.size
        pos = _HEADER.size
        if pos + count * _DIR_ENTRY.size > end:
            raise ColumnFormatError(f"{where}: page directory truncated")
        entries = [PageEntry(*_DIR_ENTRY.unpack_from(buf, pos + i * _DIR_ENTRY.size)) for i in range(count)]
        payload_start = pos + count * _DIR_ENTRY.size
        bounds = [e.byte_offset for e in entries] + [end]
        if entries and entries[0].byte_offset != payload_start:
            raise ColumnFormatError(f"{where}: first page does not follow the directory")
        if any(b1 < b0 for b0, b1 in zip(bounds, bounds[1:])):
            raise ColumnFormatError(f"{where}: page offsets are not increasing")
        if not entries and payload_start != end:
            raise ColumnFormatError(f"{where}: trailing bytes after empty directory")
        rows = [e.row_count for e in entries]
        if sum(rows) != total:
            raise ColumnFormatError(f"{where}: page rows sum to {sum(rows)}, header says {total}")
        if any(r < 1 for r in rows) or any(r != rows[0] for r in rows[:-1]) or (rows and rows[-1] > rows[0]):
            raise ColumnFormatError(f"{where}: pages are not uniformly sized")
        self.page_directory = entries
        self._page_ends = bounds[1:]
        self._page_rows = rows[0] if rows else 0

    # -- geometry --

    @property
    def page_count(self) -> int:
        return len(self.page_directory)

    @property
    def page_rows(self) -> int:
        """Row capacity implied by the directory (first page size)."""
        return self._page_rows

    @property
    def nbytes(self) -> int:
        return len(self._data)

    @property
    def payload_bytes(self) -> int:
        if not self.page_directory:
            return 0
        return self._page_ends[-1] - self.page_directory[0].byte_offset

    def accepts_page_rows(self, page_rows: int) -> bool:
        """True when page ``i`` of this column covers rows ``[i*page_rows, ...)``."""
        if self.page_count <= 1:
            return self.total_rows <= page_rows
        return self._page_rows == page_rows

    def page_bounds(self, i: int) -> tuple[int, int]:
        start = i * self._page_rows
        return start, start + self.page_directory[i].row_count

    def pages_for_range(self, start: int, end: int) -> range:
        if end <= start:
            return range(0)
        return range(start // self._page_rows, (end - 1) // self._page_rows + 1)

    def to_bytes(self) -> bytes:
        return bytes(self._data)

    def save(self, path: str | os.PathLike) -> None:
        with open(path, "wb") as fh:
            fh.write(self._data)
        self.path = os.fspath(path)

    def reset_counter(self) -> None:
        self.pages_read = 0

    # -- page access --

    def _payload(self, i: int) -> memoryview:
        if not 0 <= i < self.page_count:
            raise IndexError(f"page {i} outside [0, {self.page_count})")
        self.pages_read += 1
        return self._data[self.page_directory[i].byte_offset : self._page_ends[i]]

    def read_page(self, i: int):
        buf = self._payload(i)
        rows = self.page_directory[i].row_count
        if self.codec is Codec.DELTA:
            return _decode_delta_page(buf, rows)
        if self.codec is Codec.RLE_BOOL:
            return _decode_rle_page(buf, rows)
        return _decode_plain_page(buf, rows, self.physical_type)

    def delta_page(self, i: int) -> DeltaPage:
        if self.codec is not Codec.DELTA:
            raise CodecError(f"column codec is {self.codec.name}, not DELTA")
        return parse_delta_page(self._payload(i), self.page_directory[i].row_count)

    def interval_page(self, i: int) -> tuple[int, np.ndarray]:
        """``(first_value, page-local boundaries)`` of an RLE_BOOL page."""
        if self.codec is not Codec.RLE_BOOL:
            raise CodecError(f"column codec is {self.codec.name}, not RLE_BOOL")
        return parse_rle_page(self._payload(i), self.page_directory[i].row_count)

    def read_rows(self, start: int, end: int):
        """Values of rows ``[start, end)``, decoding only the pages they live on."""
        if not 0 <= start <= end <= self.total_rows:
            raise IndexError(f"row range [{start}, {end}) outside [0, {self.total_rows}]")
        chunks = []
        for p in self.pages_for_range(start, end):
            lo, hi = self.page_bounds(p)
            chunks.append(self.read_page(p)[max(start, lo) - lo : min(end, hi) - lo])
        if self.physical_type is PhysicalType.STRING:
            return [s for c in chunks for s in c]
        if not chunks:
            return np.empty(0, dtype=_NP_DTYPES[self.physical_type])
        return np.concatenate(chunks)

    def read_all(self):
        return self.read_rows(0, self.total_rows)

    def __len__(self) -> int:
        return self.total_rows

    def __repr__(self) -> str:
        return (
            f"ColumnFile(path={self.path!r}, codec={self.codec.name}, "
            f"type={self.physical_type.type_name}, rows={self.total_rows}, pages={self.page_count})"
        )


_NP_DTYPES = {
    PhysicalType.INT64: np.int64,
    PhysicalType.FLOAT64: np.float64,
    PhysicalType.BOOL: bool,
    PhysicalType.STRING: object,
}


def read_rows(column: ColumnFile, start: int, end: int):
    return column.read_rows(start, end)


def column_stats(column: ColumnFile) -> ColumnStats:
    """Sizes used by the storage benchmarks; ``encoded_bytes`` is the whole file."""
    return ColumnStats(column.nbytes, column.total_rows, column.page_count, column.payload_bytes)


def rle_payload_size(boundary_counts: Sequence[int]) -> int:
    """Exact RLE_BOOL payload size for pages with the given ``|P|`` values."""
    return sum(_RLE_HEAD.size + 2 * c for c in boundary_counts)
