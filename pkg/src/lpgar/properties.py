"""Selection pushdown: read property and label values only for PAC-selected rows."""

from __future__ import annotations

from typing import Any, Mapping

import numpy as np

from .colstore import Codec, ColumnFile
from .errors import PACError
from .pac import PAC


def _check(column: ColumnFile, pac: PAC) -> None:
    if not column.accepts_page_rows(pac.page_rows):
        raise PACError(
            f"PAC pages hold {pac.page_rows} rows but the column pages hold {column.page_rows}"
        )
    if pac.entries:
        last = max(pac.entries)
        top = int(pac.page_ids(last)[-1])
        if top >= column.total_rows:
            raise PACError(f"PAC selects id {top} but the column has {column.total_rows} rows")


def fetch_by_pac(column: ColumnFile, pac: PAC) -> list[tuple[int, Any]]:
    """``(internal_id, value)`` for every selected row, ascending by id.

    Exactly one page of ``column`` is decoded per PAC entry.
    """
    _check(column, pac)
    out: list[tuple[int, Any]] = []
    for page in pac.entries:
        offsets = pac.page_offsets(page)
        values = column.read_page(page)
        base = page * pac.page_rows
        if isinstance(values, list):
            picked = [values[i] for i in offsets.tolist()]
        else:
            picked = values[offsets].tolist()
        out.extend(zip((offsets + base).tolist(), picked))
    return out


def fetch_labels_by_pac(cols: Mapping[str, ColumnFile], pac: PAC) -> tuple[np.ndarray, np.ndarray, list[str]]:
    """Label membership of the selected rows, read from page-local interval lists.

    Returns ``(ids, bits, labels)`` where ``bits[i, j]`` tells whether row
    ``ids[i]`` carries ``labels[j]``. Each label column is read only on the
    pages the PAC names.
    """
    labels = list(cols)
    for name in labels:
        if cols[name].codec is not Codec.RLE_BOOL:
            raise PACError(f"label column {name!r} is not RLE_BOOL encoded")
        _check(cols[name], pac)
    ids = pac.ids()
    bits = np.zeros((ids.size, len(labels)), dtype=bool)
    row = 0
    for page in pac.entries:
        offsets = pac.page_offsets(page)
        for j, name in enumerate(labels):
            first, bounds = cols[name].interval_page(page)
            interval = np.searchsorted(bounds, offsets, side="right") - 1
            bits[row : row + offsets.size, j] = ((interval & 1) ^ first).astype(bool)
        row += offsets.size
    return ids, bits, labels
