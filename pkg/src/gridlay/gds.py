"""GDSII stream writer and a minimal self-test reader.

The writer emits the record subset needed for rectangle-and-instance layouts:
HEADER/BGNLIB/LIBNAME/UNITS, one structure per instance master plus one for
the design, BOUNDARY for rects, SREF for instances, TEXT for pin labels. All
output is canonical: elements are sorted, timestamps are fixed to zero, and
numbers are big-endian with even-length records, so equal designs produce
byte-identical streams. Arrays are expanded to plain SREFs; no AREF, PATH, or
foreign-file features.
"""

from __future__ import annotations

import struct
from dataclasses import dataclass

from .design import Design
from .errors import GdsOverflow, ParseError
from .geometry import Point, Rect, Transform, mat_apply, half_i_minus

# record type/datatype bytes
HEADER = 0x0002
BGNLIB = 0x0102
LIBNAME = 0x0206
UNITS = 0x0305
ENDLIB = 0x0400
BGNSTR = 0x0502
STRNAME = 0x0606
ENDSTR = 0x0700
BOUNDARY = 0x0800
SREF = 0x0A00
TEXT = 0x0C00
LAYER = 0x0D02
DATATYPE = 0x0E02
XY = 0x1003
ENDEL = 0x1100
SNAME = 0x1206
TEXTTYPE = 0x1602
STRANS = 0x1A01
ANGLE = 0x1C05
STRING = 0x1906

GDS_VERSION = 600
USER_UNIT = 1e-3   # database unit expressed in user units
DB_UNIT_M = 1e-9   # database unit in meters

REFLECT = 0x8000

_PURPOSE_DT_OFFSET = {"drawing": 0, "pin": 1, "colorA": 2, "colorB": 3, "dummy": 4, "cut": 0}

# Orientation -> (strans, angle); None means the record is omitted.
_TRANSFORM_GDS: dict[Transform, tuple[int | None, float | None]] = {
    Transform.R0: (None, None),
    Transform.MX: (REFLECT, None),
    Transform.MY: (REFLECT, 180.0),
    Transform.R180: (None, 180.0),
}


def encode_real(x: float) -> bytes:
    """Pack a float as a GDSII 8-byte real (excess-64 hex exponent)."""
    if x == 0:
        return bytes(8)
    sign = 0
    if x < 0:
        sign = 0x80
        x = -x
    e = 0
    while x >= 1.0:
        x /= 16.0
        e += 1
    while x < 0.0625:
        x *= 16.0
        e -= 1
    m = round(x * (1 << 56))
    if m >= (1 << 56):
        m >>= 4
        e += 1
    return bytes([sign | (64 + e)]) + m.to_bytes(7, "big")


def decode_real(b: bytes) -> float:
    if b == bytes(8):
        return 0.0
    sign = -1.0 if b[0] & 0x80 else 1.0
    e = (b[0] & 0x7F) - 64
    m = int.from_bytes(b[1:8], "big")
    return sign * m * 16.0 ** e / (1 << 56)


@dataclass(frozen=True)
class Boundary:
    layer: int
    datatype: int
    xy: tuple[tuple[int, int], ...]  # closed loop, first point repeated last


@dataclass(frozen=True)
class Sref:
    sname: str
    pos: tuple[int, int]
    strans: int | None = None
    angle: float | None = None


@dataclass(frozen=True)
class Text:
    layer: int
    texttype: int
    pos: tuple[int, int]
    string: str


@dataclass(frozen=True)
class Structure:
    name: str
    elements: tuple = ()


@dataclass(frozen=True)
class Library:
    name: str
    user_unit: float
    db_unit_m: float
    structures: tuple[Structure, ...] = ()


def _record(rtype: int, payload: bytes = b"") -> bytes:
    if len(payload) % 2:
        raise ValueError("record payload must have even length")
    return struct.pack(">HH", len(payload) + 4, rtype) + payload


def _ascii(s: str) -> bytes:
    b = s.encode("ascii")
    return b + b"\0" if len(b) % 2 else b


def _coord(v: int) -> int:
    if not -(1 << 31) <= v < (1 << 31):
        raise GdsOverflow(f"coordinate {v} exceeds the 32-bit range")
    return v


def write_library(lib: Library) -> bytes:
    out = [
        _record(HEADER, struct.pack(">h", GDS_VERSION)),
        _record(BGNLIB, struct.pack(">12h", *([0] * 12))),
        _record(LIBNAME, _ascii(lib.name)),
        _record(UNITS, encode_real(lib.user_unit) + encode_real(lib.db_unit_m)),
    ]
    for s in lib.structures:
        out.append(_record(BGNSTR, struct.pack(">12h", *([0] * 12))))
        out.append(_record(STRNAME, _ascii(s.name)))
        for e in s.elements:
            if isinstance(e, Boundary):
                out.append(_record(BOUNDARY))
                out.append(_record(LAYER, struct.pack(">h", e.layer)))
                out.append(_record(DATATYPE, struct.pack(">h", e.datatype)))
                flat = [c for p in e.xy for c in (_coord(p[0]), _coord(p[1]))]
                out.append(_record(XY, struct.pack(f">{len(flat)}i", *flat)))
            elif isinstance(e, Sref):
                out.append(_record(SREF))
                out.append(_record(SNAME, _ascii(e.sname)))
                if e.strans is not None:
                    out.append(_record(STRANS, struct.pack(">H", e.strans)))
                if e.angle is not None:
                    out.append(_record(ANGLE, encode_real(e.angle)))
                out.append(_record(XY, struct.pack(">2i", _coord(e.pos[0]), _coord(e.pos[1]))))
            elif isinstance(e, Text):
                out.append(_record(TEXT))
                out.append(_record(LAYER, struct.pack(">h", e.layer)))
                out.append(_record(TEXTTYPE, struct.pack(">h", e.texttype)))
                out.append(_record(XY, struct.pack(">2i", _coord(e.pos[0]), _coord(e.pos[1]))))
                out.append(_record(STRING, _ascii(e.string)))
            else:
                raise TypeError(f"unknown element {e!r}")
            out.append(_record(ENDEL))
        out.append(_record(ENDSTR))
    out.append(_record(ENDLIB))
    return b"".join(out)


def read_library(data: bytes) -> Library:
    """Parse a stream produced by write_library back into the model."""
    pos = 0
    records: list[tuple[int, bytes]] = []
    while pos < len(data):
        if pos + 4 > len(data):
            raise ParseError("truncated record header")
        size, rtype = struct.unpack(">HH", data[pos:pos + 4])
        if size < 4 or pos + size > len(data):
            raise ParseError(f"bad record size {size} at offset {pos}")
        records.append((rtype, data[pos + 4:pos + size]))
        pos += size

    it = iter(records)

    def expect(rtype: int) -> bytes:
        t, payload = next(it)
        if t != rtype:
            raise ParseError(f"expected record {rtype:#06x}, got {t:#06x}")
        return payload

    def text(b: bytes) -> str:
        return b.rstrip(b"\0").decode("ascii")

    expect(HEADER)
    expect(BGNLIB)
    name = text(expect(LIBNAME))
    units = expect(UNITS)
    user_unit = decode_real(units[0:8])
    db_unit = decode_real(units[8:16])

    structures: list[Structure] = []
    for rtype, payload in it:
        if rtype == ENDLIB:
            break
        if rtype != BGNSTR:
            raise ParseError(f"unexpected record {rtype:#06x} at library level")
        sname = text(expect(STRNAME))
        elements: list = []
        for rtype2, payload2 in it:
            if rtype2 == ENDSTR:
                break
            if rtype2 == BOUNDARY:
                layer = struct.unpack(">h", expect(LAYER))[0]
                dt = struct.unpack(">h", expect(DATATYPE))[0]
                raw = expect(XY)
                vals = struct.unpack(f">{len(raw) // 4}i", raw)
                xy = tuple(zip(vals[0::2], vals[1::2]))
                elements.append(Boundary(layer, dt, xy))
                expect(ENDEL)
            elif rtype2 == SREF:
                sref_name = text(expect(SNAME))
                strans = angle = None
                t, p = next(it)
                if t == STRANS:
                    strans = struct.unpack(">H", p)[0]
                    t, p = next(it)
                if t == ANGLE:
                    angle = decode_real(p)
                    t, p = next(it)
                if t != XY:
                    raise ParseError("SREF without XY")
                x, y = struct.unpack(">2i", p)
                elements.append(Sref(sref_name, (x, y), strans, angle))
                expect(ENDEL)
            elif rtype2 == TEXT:
                layer = struct.unpack(">h", expect(LAYER))[0]
                tt = struct.unpack(">h", expect(TEXTTYPE))[0]
                x, y = struct.unpack(">2i", expect(XY))
                string = text(expect(STRING))
                elements.append(Text(layer, tt, (x, y), string))
                expect(ENDEL)
            else:
                raise ParseError(f"unexpected record {rtype2:#06x} in structure")
        structures.append(Structure(sname, tuple(elements)))
    return Library(name, user_unit, db_unit, tuple(structures))


def _rect_boundary(d: Design, r: Rect) -> Boundary:
    layer = d.tech.layer(r.layer)
    dt = layer.gds_datatype + _PURPOSE_DT_OFFSET[r.purpose]
    xy = (
        (r.lo.x, r.lo.y),
        (r.hi.x, r.lo.y),
        (r.hi.x, r.hi.y),
        (r.lo.x, r.hi.y),
        (r.lo.x, r.lo.y),
    )
    return Boundary(layer.gds_layer, dt, xy)


def master_struct_name(master: str, params) -> str:
    parts = [master]
    for k in sorted(params):
        v = params[k]
        if isinstance(v, bool):
            v = int(v)
        parts.append(f"{k}{v}")
    return "__".join(parts) if len(parts) > 1 else master


def design_to_library(d: Design) -> Library:
    """Build the hierarchical model: one struct per instance master, one top."""
    masters: dict[str, object] = {}
    for vi in d.instances:
        sname = master_struct_name(vi.master, vi.params)
        if sname not in masters:
            masters[sname] = vi
    structures = []
    for sname in sorted(masters):
        vi = masters[sname]
        local = vi.at(Point(0, 0), Transform.R0)
        elements = sorted(
            (_rect_boundary(d, r) for r in local.flatten()),
            key=lambda b: (b.layer, b.datatype, b.xy),
        )
        structures.append(Structure(sname, tuple(elements)))

    top: list = []
    boundaries = []
    for w in d.wires:
        boundaries.append(_rect_boundary(d, w.rect()))
    for via in d.vias:
        boundaries.extend(_rect_boundary(d, r) for r in d.via_rects(via))
    for pin in d.pins:
        boundaries.append(_rect_boundary(d, pin.rect()))
    for r in d.rects:
        boundaries.append(_rect_boundary(d, r))
    top.extend(sorted(boundaries, key=lambda b: (b.layer, b.datatype, b.xy)))

    srefs = []
    for vi in d.instances:
        strans, angle = _TRANSFORM_GDS[vi.transform]
        # The struct holds local R0 geometry; the stream transform acts
        # before translation, so the anchor shift keeps bboxes in place.
        anchor = vi.origin + mat_apply(half_i_minus(vi.transform), vi.size)
        srefs.append(
            Sref(master_struct_name(vi.master, vi.params), (anchor.x, anchor.y), strans, angle)
        )
    top.extend(sorted(srefs, key=lambda s: (s.sname, s.pos)))

    texts = []
    for pin in d.pins:
        layer = d.tech.layer(pin.wire.layer)
        r = pin.rect()
        center = ((r.lo.x + r.hi.x) // 2, (r.lo.y + r.hi.y) // 2)
        texts.append(Text(layer.gds_layer, layer.gds_datatype + 1, center, pin.name))
    top.extend(sorted(texts, key=lambda t: (t.string, t.pos)))

    structures.append(Structure(d.name, tuple(top)))
    return Library(d.name, USER_UNIT, DB_UNIT_M, tuple(structures))


def write_gds(d: Design) -> bytes:
    return write_library(design_to_library(d))
