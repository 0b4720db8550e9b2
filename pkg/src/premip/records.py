"""Versioned serialization of the postsolve record.

The default format is a length-prefixed little-endian binary stream; a
human-readable line-based text format is available behind a flag.  Numbers
are 8-byte doubles in float mode and exact 'p/q' strings in rational mode;
infinite bounds get their own tag so they survive both encodings.
"""
from __future__ import annotations

import struct
from fractions import Fraction
from typing import BinaryIO

from .model import (AggregateEntry, BoundChangeEntry, CoeffChangeEntry,
                    FixEntry, FreeSingletonEntry, ImplyIntegralEntry,
                    RedundantRowEntry, SideChangeEntry, SubstituteEntry)
from .numerics import INF, NEG_INF, Number
from .transactions import PostsolveRecord

MAGIC = b"PMRC"
VERSION = 1

_ENTRY_TAGS = {
    FixEntry: 1,
    BoundChangeEntry: 2,
    SideChangeEntry: 3,
    CoeffChangeEntry: 4,
    RedundantRowEntry: 5,
    SubstituteEntry: 6,
    FreeSingletonEntry: 7,
    AggregateEntry: 8,
    ImplyIntegralEntry: 9,
}
_TAG_ENTRIES = {v: k for k, v in _ENTRY_TAGS.items()}


class RecordFormatError(ValueError):
    pass


# -- binary primitives -------------------------------------------------------


def _w_u64(fh: BinaryIO, v: int) -> None:
    fh.write(struct.pack("<q", v))


def _r_u64(fh: BinaryIO) -> int:
    return struct.unpack("<q", fh.read(8))[0]


def _w_str(fh: BinaryIO, s: str) -> None:
    data = s.encode("utf-8")
    _w_u64(fh, len(data))
    fh.write(data)


def _r_str(fh: BinaryIO) -> str:
    n = _r_u64(fh)
    return fh.read(n).decode("utf-8")


def _w_num(fh: BinaryIO, v: Number, rational: bool) -> None:
    if v == INF:
        fh.write(b"\x01")
    elif v == NEG_INF:
        fh.write(b"\x02")
    else:
        fh.write(b"\x00")
        if rational:
            _w_str(fh, str(Fraction(v)))
        else:
            fh.write(struct.pack("<d", float(v)))


def _r_num(fh: BinaryIO, rational: bool) -> Number:
    tag = fh.read(1)
    if tag == b"\x01":
        return INF
    if tag == b"\x02":
        return NEG_INF
    if tag != b"\x00":
        raise RecordFormatError("corrupt number tag")
    if rational:
        return Fraction(_r_str(fh))
    return struct.unpack("<d", fh.read(8))[0]


def _entry_fields(entry) -> list:
    if isinstance(entry, FixEntry):
        return ["i", entry.col, "n", entry.value]
    if isinstance(entry, BoundChangeEntry):
        return ["i", entry.col, "s", entry.side, "n", entry.old, "n", entry.new]
    if isinstance(entry, SideChangeEntry):
        return ["i", entry.row, "s", entry.side, "n", entry.old, "n", entry.new]
    if isinstance(entry, CoeffChangeEntry):
        return ["i", entry.row, "i", entry.col, "n", entry.old, "n", entry.new]
    if isinstance(entry, RedundantRowEntry):
        return ["i", entry.row]
    if isinstance(entry, SubstituteEntry):
        flat = ["i", entry.col, "i", entry.row, "n", entry.rhs,
                "n", entry.lb, "n", entry.ub, "i", len(entry.coeffs)]
        for j, a in entry.coeffs:
            flat += ["i", j, "n", a]
        return flat
    if isinstance(entry, FreeSingletonEntry):
        flat = ["i", entry.col, "i", entry.row, "n", entry.coeff,
                "n", entry.lhs, "n", entry.rhs, "n", entry.lb, "n", entry.ub,
                "i", len(entry.rest)]
        for j, a in entry.rest:
            flat += ["i", j, "n", a]
        return flat
    if isinstance(entry, AggregateEntry):
        return ["i", entry.kept, "i", entry.gone, "n", entry.scale,
                "n", entry.kept_lb, "n", entry.kept_ub,
                "n", entry.gone_lb, "n", entry.gone_ub]
    if isinstance(entry, ImplyIntegralEntry):
        return ["i", entry.col]
    raise RecordFormatError(f"unknown entry type {type(entry).__name__}")


def _build_entry(tag: int, read_i, read_n, read_s):
    cls = _TAG_ENTRIES.get(tag)
    if cls is None:
        raise RecordFormatError(f"unknown entry tag {tag}")
    if cls is FixEntry:
        return FixEntry(read_i(), read_n())
    if cls is BoundChangeEntry:
        return BoundChangeEntry(read_i(), read_s(), read_n(), read_n())
    if cls is SideChangeEntry:
        return SideChangeEntry(read_i(), read_s(), read_n(), read_n())
    if cls is CoeffChangeEntry:
        return CoeffChangeEntry(read_i(), read_i(), read_n(), read_n())
    if cls is RedundantRowEntry:
        return RedundantRowEntry(read_i())
    if cls is SubstituteEntry:
        col, row, rhs, lb, ub = read_i(), read_i(), read_n(), read_n(), read_n()
        n = read_i()
        coeffs = [(read_i(), read_n()) for _ in range(n)]
        return SubstituteEntry(col, row, coeffs, rhs, lb, ub)
    if cls is FreeSingletonEntry:
        col, row, coeff = read_i(), read_i(), read_n()
        lhs, rhs, lb, ub = read_n(), read_n(), read_n(), read_n()
        n = read_i()
        rest = [(read_i(), read_n()) for _ in range(n)]
        return FreeSingletonEntry(col, row, coeff, rest, lhs, rhs, lb, ub)
    if cls is AggregateEntry:
        return AggregateEntry(read_i(), read_i(), read_n(), read_n(),
                              read_n(), read_n(), read_n())
    if cls is ImplyIntegralEntry:
        return ImplyIntegralEntry(read_i())
    raise RecordFormatError(f"unhandled entry tag {tag}")  # pragma: no cover


# -- binary format -----------------------------------------------------------


def write_record(record: PostsolveRecord, path: str,
                 text: bool = False) -> None:
    if text:
        _write_text(record, path)
        return
    rational = record.mode == "rational"
    with open(path, "wb") as fh:
        fh.write(MAGIC)
        _w_u64(fh, VERSION)
        fh.write(b"\x01" if rational else b"\x00")
        _w_u64(fh, record.original_nrows)
        _w_u64(fh, record.original_ncols)
        _w_num(fh, record.objective_offset, rational)
        for c in record.objective:
            _w_num(fh, c, rational)
        for name in record.col_names:
            _w_str(fh, name)
        for name in record.row_names:
            _w_str(fh, name)
        _w_u64(fh, len(record.entries))
        for entry in record.entries:
            _w_u64(fh, _ENTRY_TAGS[type(entry)])
            fields = _entry_fields(entry)
            for kind, value in zip(fields[::2], fields[1::2]):
                if kind == "i":
                    _w_u64(fh, value)
                elif kind == "s":
                    _w_str(fh, value)
                else:
                    _w_num(fh, value, rational)


def read_record(path: str) -> PostsolveRecord:
    with open(path, "rb") as fh:
        head = fh.read(4)
        if head != MAGIC:
            fh.close()
            return _read_text(path)
        version = _r_u64(fh)
        if version != VERSION:
            raise RecordFormatError(f"unsupported record version {version}")
        rational = fh.read(1) == b"\x01"
        nrows, ncols = _r_u64(fh), _r_u64(fh)
        offset = _r_num(fh, rational)
        objective = [_r_num(fh, rational) for _ in range(ncols)]
        col_names = [_r_str(fh) for _ in range(ncols)]
        row_names = [_r_str(fh) for _ in range(nrows)]
        n_entries = _r_u64(fh)
        read_i = lambda: _r_u64(fh)
        read_n = lambda: _r_num(fh, rational)
        read_s = lambda: _r_str(fh)
        entries = []
        for _ in range(n_entries):
            tag = _r_u64(fh)
            entries.append(_build_entry(tag, read_i, read_n, read_s))
    return PostsolveRecord(
        original_nrows=nrows, original_ncols=ncols, objective=objective,
        objective_offset=offset, col_names=col_names, row_names=row_names,
        mode="rational" if rational else "float64", entries=entries)


# -- text format --------------------------------------------------------------

_TEXT_HEADER = "premip-postsolve-record"


def _fmt_num(v: Number) -> str:
    if v == INF:
        return "inf"
    if v == NEG_INF:
        return "-inf"
    if isinstance(v, Fraction):
        return str(v)
    return repr(float(v))


def _write_text(record: PostsolveRecord, path: str) -> None:
    with open(path, "w") as fh:
        fh.write(f"{_TEXT_HEADER} {VERSION} {record.mode}\n")
        fh.write(f"dims {record.original_nrows} {record.original_ncols}\n")
        fh.write(f"offset {_fmt_num(record.objective_offset)}\n")
        fh.write("obj " + " ".join(_fmt_num(c) for c in record.objective)
                 + "\n")
        fh.write("colnames " + " ".join(record.col_names) + "\n")
        fh.write("rownames " + " ".join(record.row_names) + "\n")
        for entry in record.entries:
            fields = _entry_fields(entry)
            parts = [str(_ENTRY_TAGS[type(entry)])]
            for kind, value in zip(fields[::2], fields[1::2]):
                parts.append(str(value) if kind in ("i", "s")
                             else _fmt_num(value))
            fh.write("entry " + " ".join(parts) + "\n")


def _read_text(path: str) -> PostsolveRecord:
    with open(path) as fh:
        header = fh.readline().split()
        if not header or header[0] != _TEXT_HEADER:
            raise RecordFormatError(f"{path}: not a postsolve record")
        if int(header[1]) != VERSION:
            raise RecordFormatError(f"unsupported record version {header[1]}")
        mode = header[2]
        rational = mode == "rational"

        def parse_num(tok: str) -> Number:
            if tok == "inf":
                return INF
            if tok == "-inf":
                return NEG_INF
            return Fraction(tok) if rational else float(tok)

        dims = fh.readline().split()
        nrows, ncols = int(dims[1]), int(dims[2])
        offset = parse_num(fh.readline().split()[1])
        objective = [parse_num(t) for t in fh.readline().split()[1:]]
        col_names = fh.readline().split()[1:]
        row_names = fh.readline().split()[1:]
        entries = []
        for line in fh:
            tokens = line.split()
            if not tokens:
                continue
            if tokens[0] != "entry":
                raise RecordFormatError(f"unexpected line {line!r}")
            it = iter(tokens[1:])
            tag = int(next(it))
            read_i = lambda: int(next(it))
            read_n = lambda: parse_num(next(it))
            read_s = lambda: next(it)
            entries.append(_build_entry(tag, read_i, read_n, read_s))
    return PostsolveRecord(
        original_nrows=nrows, original_ncols=ncols, objective=objective,
        objective_offset=offset, col_names=col_names, row_names=row_names,
        mode=mode, entries=entries)
