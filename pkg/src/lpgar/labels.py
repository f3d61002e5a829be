"""Interval-encoded label columns and label filtering.

A label column over ``n`` vertices is a boundary list ``P`` (``P[0] == 0``,
``P[-1] == n``, strictly increasing) plus the value of the first interval.
Interval ``i`` is ``[P[i], P[i + 1])`` and carries ``first_value ^ (i & 1)``.
"""

from __future__ import annotations

import heapq
import re
from dataclasses import dataclass
from typing import Callable, Iterable, Mapping, Sequence

import numpy as np

from .colstore import PAGE_ROWS, Codec, ColumnFile, encode_column
from .errors import FilterError, LabelExprSyntaxError, PACError
from .pac import PAC


# -- interval sets ---------------------------------------------------------

class IntervalSet:
    """Sorted, disjoint, coalesced half-open row intervals."""

    __slots__ = ("starts", "ends", "evaluations")

    def __init__(self, starts: Iterable[int] = (), ends: Iterable[int] = ()):
        s = np.asarray(list(starts) if not isinstance(starts, np.ndarray) else starts, dtype=np.int64)
        e = np.asarray(list(ends) if not isinstance(ends, np.ndarray) else ends, dtype=np.int64)
        if s.shape != e.shape:
            raise ValueError("starts and ends differ in length")
        keep = e > s
        s, e = s[keep], e[keep]
        if s.size > 1:
            order = np.argsort(s, kind="stable")
            s, e = s[order], e[order]
            reach = np.maximum.accumulate(e)
            new = np.r_[True, s[1:] > reach[:-1]]
            idx = np.flatnonzero(new)
            e = np.maximum.reduceat(e, idx)
            s = s[idx]
        self.starts = s
        self.ends = e
        self.evaluations: int | None = None

    @classmethod
    def from_pairs(cls, pairs: Iterable[tuple[int, int]]) -> "IntervalSet":
        pairs = list(pairs)
        return cls([p[0] for p in pairs], [p[1] for p in pairs])

    @classmethod
    def from_mask(cls, mask) -> "IntervalSet":
        mask = np.asarray(mask, dtype=bool)
        edges = np.flatnonzero(np.diff(np.r_[False, mask, False].astype(np.int8)))
        return cls(edges[0::2], edges[1::2])

    def pairs(self) -> list[tuple[int, int]]:
        return list(zip(self.starts.tolist(), self.ends.tolist()))

    def ids(self) -> np.ndarray:
        if not self.starts.size:
            return np.empty(0, dtype=np.int64)
        return np.concatenate([np.arange(s, e) for s, e in self.pairs()])

    def count(self) -> int:
        return int((self.ends - self.starts).sum())

    def __len__(self) -> int:
        return int(self.starts.size)

    def __iter__(self):
        return iter(self.pairs())

    def __eq__(self, other: object) -> bool:
        if not isinstance(other, IntervalSet):
            return NotImplemented
        return np.array_equal(self.starts, other.starts) and np.array_equal(self.ends, other.ends)

    def __repr__(self) -> str:
        return "IntervalSet({" + ", ".join(f"[{s},{e})" for s, e in self.pairs()) + "})"


# -- label columns ---------------------------------------------------------

@dataclass(frozen=True)
class IntervalLabelColumn:
    label: str
    n: int
    first_value: int
    boundaries: np.ndarray

    def __post_init__(self):
        p = np.asarray(self.boundaries, dtype=np.int64)
        object.__setattr__(self, "boundaries", p)
        if self.n == 0:
            if p.tolist() not in ([0], [0, 0]):
                raise ValueError("empty label column must have P == [0]")
            return
        if p.size < 2 or p[0] != 0 or p[-1] != self.n or np.any(np.diff(p) <= 0):
            raise ValueError(f"label {self.label!r}: boundaries must rise strictly from 0 to {self.n}")
        if self.first_value not in (0, 1):
            raise ValueError("first_value must be 0 or 1")

    @classmethod
    def from_bools(cls, label: str, values) -> "IntervalLabelColumn":
        v = np.asarray(values, dtype=bool)
        if not v.size:
            return cls(label, 0, 0, np.zeros(1, dtype=np.int64))
        change = np.flatnonzero(v[1:] != v[:-1]) + 1
        return cls(label, int(v.size), int(v[0]), np.r_[0, change, v.size])

    @classmethod
    def from_column(cls, label: str, column: ColumnFile) -> "IntervalLabelColumn":
        """Join the page-local boundary lists of an RLE_BOOL file into one list."""
        if column.codec is not Codec.RLE_BOOL:
            raise FilterError(f"label {label!r} column is {column.codec.name}, not RLE_BOOL")
        if column.total_rows == 0:
            return cls(label, 0, 0, np.zeros(1, dtype=np.int64))
        parts = []
        first = last = None
        for p in range(column.page_count):
            page_first, bounds = column.interval_page(p)
            start, _ = column.page_bounds(p)
            if first is None:
                first = page_first
                parts.append(bounds[:-1] + start)
            else:
                # drop the page seam when the run continues across it
                keep = bounds[:-1] if page_first != last else bounds[1:-1]
                parts.append(keep + start)
            last = page_first ^ ((bounds.size - 2) & 1)
        parts.append(np.array([column.total_rows]))
        return cls(label, column.total_rows, int(first), np.concatenate(parts))

    def to_bools(self) -> np.ndarray:
        if self.n == 0:
            return np.zeros(0, dtype=bool)
        parity = (np.arange(self.boundaries.size - 1) & 1) ^ self.first_value
        return np.repeat(parity.astype(bool), np.diff(self.boundaries))

    def value_at(self, rows) -> np.ndarray:
        idx = np.searchsorted(self.boundaries, np.asarray(rows), side="right") - 1
        return ((idx & 1) ^ self.first_value).astype(bool)

    def write(self, path, page_rows: int = PAGE_ROWS) -> ColumnFile:
        data = encode_column(self.to_bools(), Codec.RLE_BOOL, page_rows=page_rows)
        with open(path, "wb") as fh:
            fh.write(data)
        return ColumnFile(data, path=path)

    def __eq__(self, other: object) -> bool:
        if not isinstance(other, IntervalLabelColumn):
            return NotImplemented
        return (self.label, self.n, self.first_value) == (other.label, other.n, other.first_value) and (
            np.array_equal(self.boundaries, other.boundaries)
        )

    __hash__ = None


# -- expressions -----------------------------------------------------------

class LabelExpr:
    """Boolean expression over label atoms."""

    def evaluate(self, values: Mapping[str, bool]) -> bool:
        raise NotImplementedError

    def atoms(self) -> set[str]:
        raise NotImplementedError

    def __invert__(self) -> "LabelExpr":
        return Not(self)

    def __and__(self, other: "LabelExpr") -> "LabelExpr":
        return And((self, other))

    def __or__(self, other: "LabelExpr") -> "LabelExpr":
        return Or((self, other))


@dataclass(frozen=True)
class Atom(LabelExpr):
    name: str

    def evaluate(self, values):
        return bool(values[self.name])

    def atoms(self):
        return {self.name}

    def __str__(self):
        return self.name


@dataclass(frozen=True)
class Not(LabelExpr):
    operand: LabelExpr

    def evaluate(self, values):
        return not self.operand.evaluate(values)

    def atoms(self):
        return self.operand.atoms()

    def __str__(self):
        return f"!{_wrap(self.operand)}"


@dataclass(frozen=True)
class And(LabelExpr):
    operands: tuple[LabelExpr, ...]

    def evaluate(self, values):
        return all(op.evaluate(values) for op in self.operands)

    def atoms(self):
        return set().union(*(op.atoms() for op in self.operands))

    def __str__(self):
        return "&".join(_wrap(op) for op in self.operands)


@dataclass(frozen=True)
class Or(LabelExpr):
    operands: tuple[LabelExpr, ...]

    def evaluate(self, values):
        return any(op.evaluate(values) for op in self.operands)

    def atoms(self):
        return set().union(*(op.atoms() for op in self.operands))

    def __str__(self):
        return "|".join(_wrap(op) for op in self.operands)


def _wrap(e: LabelExpr) -> str:
    return str(e) if isinstance(e, (Atom, Not)) else f"({e})"


_TOKEN = re.compile(r"\s*(?:([A-Za-z_][A-Za-z0-9_]*)|(.))")


def parse_label_expr(text: str) -> LabelExpr:
    """Parse ``expr := term ('|' term)*``, ``term := factor ('&' factor)*``,
    ``factor := '!' factor | '(' expr ')' | IDENT``.

    Syntax errors report a 1-based column.
    """
    tokens: list[tuple[str, str, int]] = []
    pos = 0
    while text[pos:].strip():
        m = _TOKEN.match(text, pos)
        if m.group(1):
            tokens.append(("ident", m.group(1), m.start(1) + 1))
        elif m.group(2):
            tok = m.group(2)
            if tok not in "&|!()":
                raise LabelExprSyntaxError(f"unexpected character {tok!r}", m.start(2) + 1)
            tokens.append((tok, tok, m.start(2) + 1))
        pos = m.end()
    tokens.append(("end", "", len(text) + 1))
    i = 0

    def peek() -> tuple[str, str, int]:
        return tokens[i]

    def take() -> tuple[str, str, int]:
        nonlocal i
        tok = tokens[i]
        i += 1
        return tok

    def expr() -> LabelExpr:
        ops = [term()]
        while peek()[0] == "|":
            take()
            ops.append(term())
        return ops[0] if len(ops) == 1 else Or(tuple(ops))

    def term() -> LabelExpr:
        ops = [factor()]
        while peek()[0] == "&":
            take()
            ops.append(factor())
        return ops[0] if len(ops) == 1 else And(tuple(ops))

    def factor() -> LabelExpr:
        kind, value, col = take()
        if kind == "!":
            return Not(factor())
        if kind == "(":
            inner = expr()
            if peek()[0] != ")":
                raise LabelExprSyntaxError("expected ')'", peek()[2])
            take()
            return inner
        if kind == "ident":
            return Atom(value)
        what = "end of input" if kind == "end" else repr(value)
        raise LabelExprSyntaxError(f"unexpected {what}", col)

    result = expr()
    if peek()[0] != "end":
        raise LabelExprSyntaxError(f"unexpected {peek()[1]!r}", peek()[2])
    return result


# -- filtering -------------------------------------------------------------

def filter_simple(col: IntervalLabelColumn, exists: bool | int = True) -> IntervalSet:
    """Rows whose label value equals ``exists``: every other interval of ``P``."""
    if col.n == 0:
        return IntervalSet()
    p = col.boundaries
    first = 0 if (col.first_value == int(bool(exists))) else 1
    return IntervalSet(p[first:-1:2], p[first + 1 :: 2])


def _columns_by_label(cols) -> dict[str, IntervalLabelColumn]:
    if isinstance(cols, Mapping):
        return dict(cols)
    return {c.label: c for c in cols}


def filter_complex(cols: Sequence[IntervalLabelColumn] | Mapping[str, IntervalLabelColumn],
                   expr: LabelExpr | str | Callable[[Mapping[str, bool]], bool]) -> IntervalSet:
    """Rows satisfying ``expr`` via a k-way merge of the boundary lists.

    Between two consecutive merged boundaries no label changes value, so
    ``expr`` is evaluated once per merged interval. The result carries the
    number of evaluations in ``.evaluations``.
    """
    if isinstance(expr, str):
        expr = parse_label_expr(expr)
    by_label = _columns_by_label(cols)
    if isinstance(expr, LabelExpr):
        missing = sorted(expr.atoms() - by_label.keys())
        if missing:
            raise FilterError(f"unknown label {missing[0]!r}")
        used = [by_label[a] for a in sorted(expr.atoms())] or list(by_label.values())
        evaluate = expr.evaluate
    else:
        used = list(by_label.values())
        evaluate = expr
    sizes = {c.n for c in by_label.values()}
    if len(sizes) > 1:
        raise FilterError(f"label columns cover different vertex counts {sorted(sizes)}")
    n = sizes.pop() if sizes else 0
    if n == 0:
        if not used and isinstance(expr, LabelExpr):
            raise FilterError("no label columns to determine the vertex count")
        result = IntervalSet()
        result.evaluations = 0
        return result

    state = {c.label: c.first_value ^ 1 for c in used}
    streams = [zip(c.boundaries[:-1].tolist(), [c.label] * (c.boundaries.size - 1)) for c in used]
    starts, ends = [], []
    evaluations = 0
    prev = None
    for pos, label in heapq.merge(*streams):
        # each boundary in list i flips label i; P[0] == 0 flips it to first_value
        if prev is not None and pos != prev:
            evaluations += 1
            if evaluate(state):
                starts.append(prev)
                ends.append(pos)
            prev = pos
        elif prev is None:
            prev = pos
        state[label] ^= 1
    evaluations += 1
    if evaluate(state):
        starts.append(prev)
        ends.append(n)
    result = IntervalSet(starts, ends)
    result.evaluations = evaluations
    return result


def evaluation_count(result: IntervalSet) -> int:
    """Expression evaluations performed by the :func:`filter_complex` call that produced ``result``."""
    if result.evaluations is None:
        raise ValueError("result did not come from filter_complex")
    return result.evaluations


def intervals_to_pac(s: IntervalSet, page_rows: int = PAGE_ROWS, n: int | None = None) -> PAC:
    if len(s) and (s.starts[0] < 0 or (n is not None and s.ends[-1] > n)):
        raise PACError(f"interval set exceeds [0, {n})")
    pac = PAC(page_rows)
    if not len(s):
        return pac
    n_pages = -(-int(s.ends[-1]) // page_rows)
    marks = np.zeros(n_pages * page_rows + 1, dtype=np.int32)
    np.add.at(marks, s.starts, 1)
    np.add.at(marks, s.ends, -1)
    bits = (np.cumsum(marks[:-1]) > 0).reshape(n_pages, page_rows)
    packed = np.packbits(bits, axis=1, bitorder="little")
    for page in np.flatnonzero(bits.any(axis=1)).tolist():
        pac.entries[page] = packed[page]
    return pac
