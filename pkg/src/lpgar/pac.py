"""Page-aligned collections: per-page bitmaps of selected row ids."""

from __future__ import annotations

from typing import Iterator, Mapping

import numpy as np

from .errors import PACError


class PAC:
    """Sparse map ``page index -> bitmap`` over a table with ``page_rows`` rows per page.

    Bitmaps are ``page_rows // 8`` bytes, bit ``b`` of page ``p`` (LSB-first)
    standing for internal id ``p * page_rows + b``. Pages without a set bit
    are never stored.
    """

    __slots__ = ("page_rows", "entries")

    def __init__(self, page_rows: int, entries: Mapping[int, np.ndarray] | None = None):
        if page_rows < 8 or page_rows % 8:
            raise PACError(f"page_rows must be a positive multiple of 8, got {page_rows}")
        self.page_rows = int(page_rows)
        self.entries: dict[int, np.ndarray] = {}
        for page in sorted(entries or {}):
            bitmap = np.asarray(entries[page], dtype=np.uint8)
            if bitmap.shape != (self.page_rows // 8,):
                raise PACError(f"bitmap for page {page} has shape {bitmap.shape}")
            if bitmap.any():
                self.entries[int(page)] = bitmap

    @classmethod
    def from_ids(cls, ids, page_rows: int) -> "PAC":
        ids = np.asarray(ids, dtype=np.int64).reshape(-1)
        if ids.size and ids.min() < 0:
            raise PACError("negative internal id")
        pac = cls(page_rows)
        if not ids.size:
            return pac
        pages = ids // page_rows
        order = np.argsort(pages, kind="stable")
        ids, pages = ids[order], pages[order]
        cut = np.flatnonzero(np.diff(pages)) + 1
        for chunk, page in zip(np.split(ids, cut), pages[np.r_[0, cut]].tolist()):
            bits = np.zeros(page_rows, dtype=bool)
            bits[chunk - page * page_rows] = True
            pac.entries[page] = np.packbits(bits, bitorder="little")
        return pac

    def page_ids(self, page: int) -> np.ndarray:
        """Internal ids selected in one page, ascending."""
        bits = np.unpackbits(self.entries[page], bitorder="little")
        return np.flatnonzero(bits) + page * self.page_rows

    def page_offsets(self, page: int) -> np.ndarray:
        """Row offsets within ``page`` that are selected."""
        return np.flatnonzero(np.unpackbits(self.entries[page], bitorder="little"))

    def ids(self) -> np.ndarray:
        if not self.entries:
            return np.empty(0, dtype=np.int64)
        return np.concatenate([self.page_ids(p) for p in self.entries]).astype(np.int64)

    def pages(self) -> list[int]:
        return list(self.entries)

    def count(self) -> int:
        return int(sum(np.unpackbits(b).sum() for b in self.entries.values()))

    def union(self, other: "PAC") -> "PAC":
        if other.page_rows != self.page_rows:
            raise PACError("cannot combine PACs with different page sizes")
        merged = dict(self.entries)
        for page, bitmap in other.entries.items():
            merged[page] = merged[page] | bitmap if page in merged else bitmap
        return PAC(self.page_rows, merged)

    def __iter__(self) -> Iterator[tuple[int, np.ndarray]]:
        return iter(self.entries.items())

    def __len__(self) -> int:
        return len(self.entries)

    def __eq__(self, other: object) -> bool:
        if not isinstance(other, PAC):
            return NotImplemented
        return (
            self.page_rows == other.page_rows
            and self.entries.keys() == other.entries.keys()
            and all(np.array_equal(b, other.entries[p]) for p, b in self.entries.items())
        )

    def __repr__(self) -> str:
        shown = {p: self.page_offsets(p).tolist() for p in list(self.entries)[:4]}
        more = ", ..." if len(self.entries) > 4 else ""
        return f"PAC(page_rows={self.page_rows}, pages={shown}{more})"
