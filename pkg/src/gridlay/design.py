"""The mutable design container and its core editing operations.

A Design collects placed instances, track-aligned wires, vias, pins, and raw
rectangles while it moves through the generation pipeline. It is single-owner
mutable: stages edit it in sequence, never concurrently. Wires are modeled as
track segments (axis + center + extent) rather than free rectangles because
the cut-generation pass needs track identity; the rectangle is derived.
"""

from __future__ import annotations

from dataclasses import dataclass
from typing import TYPE_CHECKING, Iterator

from .errors import DuplicatePin, MissingVia, NonRectilinear, UnknownWire
from .geometry import Point, Rect, Transform, bbox_of
from .grid import PlacementGrid, RoutingGrid
from .template import VirtualInstance

if TYPE_CHECKING:
    from .tech import TechDB


@dataclass
class Wire:
    """A routed segment in a track.

    `track` is the physical center coordinate on the axis perpendicular to
    the wire; `lo`/`hi` the extent along the wire. Pin wires are exempt from
    boundary cuts: their separation is handled one hierarchy level up.
    """

    layer: str
    axis: str               # "h" or "v"
    track: int
    lo: int
    hi: int
    width: int
    is_pin: bool = False
    net: str | None = None
    color: str | None = None

    def __post_init__(self):
        if self.axis not in ("h", "v"):
            raise ValueError(f"bad wire axis {self.axis!r}")
        if self.width <= 0:
            raise ValueError("wire width must be positive")
        if self.lo > self.hi:
            self.lo, self.hi = self.hi, self.lo

    @property
    def length(self) -> int:
        return self.hi - self.lo

    def rect(self) -> Rect:
        purpose = {"A": "colorA", "B": "colorB"}.get(self.color, "drawing")
        half = self.width // 2
        c0 = self.track - half
        c1 = c0 + self.width
        if self.axis == "h":
            return Rect(self.layer, Point(self.lo, c0), Point(self.hi, c1), purpose)
        return Rect(self.layer, Point(c0, self.lo), Point(c1, self.hi), purpose)


@dataclass
class PlacedVia:
    via: str
    pos: Point


@dataclass
class Pin:
    """A labeled wire exposing a net to the parent hierarchy level."""

    name: str
    net: str
    wire: Wire

    def rect(self) -> Rect:
        return self.wire.rect().with_purpose("pin")


class Design:
    """Container for everything a generator produces."""

    def __init__(self, name: str, tech: "TechDB"):
        self.name = name
        self.tech = tech
        self.instances: list[VirtualInstance] = []
        self.wires: list[Wire] = []
        self.vias: list[PlacedVia] = []
        self.pins: list[Pin] = []
        self.rects: list[Rect] = []
        self.pgrid: PlacementGrid | None = None
        self.rgrid: RoutingGrid | None = None
        self.grid_name: str | None = None

    # -- editing ------------------------------------------------------------

    def place(
        self,
        vi: VirtualInstance,
        grid: PlacementGrid,
        xy: tuple[int, int],
        transform: Transform = Transform.R0,
    ) -> VirtualInstance:
        """Snap an instance to abstract placement coordinates and append it.

        Overlaps are allowed here; they are reported by check_spacing, not at
        placement time.
        """
        placed = vi.at(grid.phys(xy), transform)
        self.instances.append(placed)
        return placed

    def add_wire(self, wire: Wire) -> Wire:
        self.wires.append(wire)
        return wire

    def add_via(self, grid: RoutingGrid, xy: tuple[int, int]) -> PlacedVia:
        """Drop the grid's via at a track intersection."""
        name = grid.viamap.get(xy[0], xy[1])
        if name is None:
            raise MissingVia(f"no via at track intersection {xy}")
        via = PlacedVia(name, Point(grid.xgrid.phys(xy[0]), grid.ygrid.phys(xy[1])))
        self.vias.append(via)
        return via

    def _end_extension(self, grid: RoutingGrid, layer: str, width: int,
                       xy: tuple[int, int], has_via: bool, axis: str) -> int:
        # Square end cap at minimum; a via landing may need more.
        ext = width // 2
        if has_via:
            name = grid.viamap.get(xy[0], xy[1])
            if name is not None:
                via = self.tech.vias[name]
                cut = via.cut_size[0] if axis == "h" else via.cut_size[1]
                ext = max(ext, cut // 2 + via.enclosure.get(layer, 0))
        return ext

    def route(self, grid: RoutingGrid, waypoints: list[tuple[int, int]]) -> list[Wire]:
        """Route a rectilinear path along grid tracks.

        One wire per segment, taking layer and width from the segment's
        track; a via is placed at every direction change and wherever the
        layer changes at a straight intermediate waypoint. Wire extents reach
        the end track centers plus the via landing (or a square end cap).
        """
        if len(waypoints) < 2:
            raise NonRectilinear("need at least two waypoints")
        segs: list[tuple[tuple[int, int], tuple[int, int], str]] = []
        for a, b in zip(waypoints, waypoints[1:]):
            if a == b:
                continue
            if a[1] == b[1]:
                segs.append((a, b, "h"))
            elif a[0] == b[0]:
                segs.append((a, b, "v"))
            else:
                raise NonRectilinear(f"waypoints {a} and {b} share no row or column")
        if not segs:
            raise NonRectilinear("path has zero length")

        def seg_layer(seg):
            a, _, axis = seg
            return grid.hlayer.get(a[1]) if axis == "h" else grid.vlayer.get(a[0])

        # Vias at direction or layer changes between consecutive segments.
        via_points: list[tuple[int, int]] = []
        for s1, s2 in zip(segs, segs[1:]):
            if s1[2] != s2[2] or seg_layer(s1) != seg_layer(s2):
                via_points.append(s2[0])
        for xy in via_points:
            self.add_via(grid, xy)

        via_set = set(via_points)
        wires: list[Wire] = []
        for a, b, axis in segs:
            if axis == "h":
                layer = grid.hlayer.get(a[1])
                width = grid.hwidth.get(a[1])
                track = grid.ygrid.phys(a[1])
                p0, p1 = sorted((grid.xgrid.phys(a[0]), grid.xgrid.phys(b[0])))
            else:
                layer = grid.vlayer.get(a[0])
                width = grid.vwidth.get(a[0])
                track = grid.xgrid.phys(a[0])
                p0, p1 = sorted((grid.ygrid.phys(a[1]), grid.ygrid.phys(b[1])))
            # extension per end: look up the waypoint sitting at that end
            end_lo, end_hi = a, b
            if (axis == "h" and a[0] > b[0]) or (axis == "v" and a[1] > b[1]):
                end_lo, end_hi = b, a
            e0 = self._end_extension(grid, layer, width, end_lo, end_lo in via_set, axis)
            e1 = self._end_extension(grid, layer, width, end_hi, end_hi in via_set, axis)
            wires.append(
                self.add_wire(Wire(layer=layer, axis=axis, track=track,
                                   lo=p0 - e0, hi=p1 + e1, width=width))
            )
        return wires

    def add_pin(self, name: str, net: str, wire: Wire) -> Pin:
        """Promote a wire to a pin; duplicate names must agree on the net."""
        if not any(w is wire for w in self.wires):
            raise UnknownWire(f"wire is not part of design {self.name}")
        for p in self.pins:
            if p.name == name and p.net != net:
                raise DuplicatePin(f"pin {name!r} already bound to net {p.net!r}")
        wire.is_pin = True
        wire.net = net
        pin = Pin(name, net, wire)
        self.pins.append(pin)
        return pin

    # -- views --------------------------------------------------------------

    def bbox(self) -> tuple[Point, Point] | None:
        rects = [r for r, _ in self.iter_flat()]
        return bbox_of(rects)

    def instance_bbox(self) -> tuple[Point, Point] | None:
        boxes = [vi.bbox() for vi in self.instances]
        if not boxes:
            return None
        lo = Point(min(b[0].x for b in boxes), min(b[0].y for b in boxes))
        hi = Point(max(b[1].x for b in boxes), max(b[1].y for b in boxes))
        return lo, hi

    def via_rects(self, via: PlacedVia) -> list[Rect]:
        """Cut shape plus the two landing pads of a placed via."""
        v = self.tech.vias[via.via]
        cw, ch = v.cut_size
        p = via.pos
        out = [
            Rect(v.cut_layer, Point(p.x - cw // 2, p.y - ch // 2),
                 Point(p.x - cw // 2 + cw, p.y - ch // 2 + ch))
        ]
        for lname in (v.lower, v.upper):
            e = v.enclosure.get(lname, 0)
            out.append(
                Rect(lname, Point(p.x - cw // 2 - e, p.y - ch // 2 - e),
                     Point(p.x - cw // 2 + cw + e, p.y - ch // 2 + ch + e))
            )
        return out

    def iter_flat(self) -> Iterator[tuple[Rect, str]]:
        """Flattened geometry with a source tag: inst, wire, via, pin, raw."""
        for vi in self.instances:
            for r in vi.flatten():
                yield r, "inst"
        for w in self.wires:
            yield w.rect(), "wire"
        for via in self.vias:
            for r in self.via_rects(via):
                yield r, "via"
        for pin in self.pins:
            yield pin.rect(), "pin"
        for r in self.rects:
            yield r, "raw"


# -- DRC-lite spacing check ---------------------------------------------------


@dataclass(frozen=True)
class Violation:
    layer: str
    a: Rect
    b: Rect
    gap_sq: int

    def __str__(self) -> str:
        return (
            f"{self.layer}: spacing violation between "
            f"({self.a.lo.x},{self.a.lo.y},{self.a.hi.x},{self.a.hi.y}) and "
            f"({self.b.lo.x},{self.b.lo.y},{self.b.hi.x},{self.b.hi.y})"
        )


def _gaps(a: Rect, b: Rect) -> tuple[int, int]:
    dx = max(a.lo.x - b.hi.x, b.lo.x - a.hi.x, 0)
    dy = max(a.lo.y - b.hi.y, b.lo.y - a.hi.y, 0)
    return dx, dy


def _cut_suppressed(a: Rect, b: Rect, cuts: list[Rect]) -> bool:
    """True when a cut shape bisects the gap between two rects.

    The cut must span the gap box across the gap axis and its center must
    fall inside the gap span.
    """
    dx, dy = _gaps(a, b)
    if dx > 0 and dy > 0:
        return False  # diagonal gaps are not cuttable
    if dx > 0:
        g0, g1 = min(a.hi.x, b.hi.x), max(a.lo.x, b.lo.x)
        c0, c1 = max(a.lo.y, b.lo.y), min(a.hi.y, b.hi.y)
        for c in cuts:
            if c.lo.y <= c0 and c.hi.y >= c1 and g0 <= (c.lo.x + c.hi.x) // 2 <= g1:
                return True
    else:
        g0, g1 = min(a.hi.y, b.hi.y), max(a.lo.y, b.lo.y)
        c0, c1 = max(a.lo.x, b.lo.x), min(a.hi.x, b.hi.x)
        for c in cuts:
            if c.lo.x <= c0 and c.hi.x >= c1 and g0 <= (c.lo.y + c.hi.y) // 2 <= g1:
                return True
    return False


def check_spacing(d: Design, layer: str) -> list[Violation]:
    """Exhaustive same-layer spacing scan.

    Shapes that touch or overlap are fabricated as one aggregated pattern and
    are merged before checking, so only gaps between disjoint patterns count.
    A gap smaller than min_spacing is reported unless a cut shape on the
    layer's cut layer bisects it. Pin-purpose shapes are label overlays of
    their wires and are skipped. Diagonal gaps compare the exact Euclidean
    distance in integers.
    """
    rule = d.tech.layer(layer)
    shapes = [r for r, _ in d.iter_flat() if r.layer == layer and r.purpose != "pin"]
    cuts = []
    if rule.cut is not None:
        cuts = [
            r for r, _ in d.iter_flat()
            if r.layer == rule.cut.cut_layer and r.purpose == "cut"
        ]

    n = len(shapes)
    parent = list(range(n))

    def find(i: int) -> int:
        while parent[i] != i:
            parent[i] = parent[parent[i]]
            i = parent[i]
        return i

    pair_gap: dict[tuple[int, int], tuple[int, int, int]] = {}
    s = rule.min_spacing
    for i in range(n):
        for j in range(i + 1, n):
            dx, dy = _gaps(shapes[i], shapes[j])
            if dx == 0 and dy == 0:
                ri, rj = find(i), find(j)
                if ri != rj:
                    parent[ri] = rj
            elif dx * dx + dy * dy < s * s:
                pair_gap[(i, j)] = (dx * dx + dy * dy, i, j)

    # Report the closest offending pair per pattern pair.
    best: dict[tuple[int, int], tuple[int, int, int]] = {}
    for (i, j), entry in pair_gap.items():
        key = tuple(sorted((find(i), find(j))))
        if key[0] == key[1]:
            continue  # became connected through other shapes
        if key not in best or entry[0] < best[key][0]:
            best[key] = entry

    out = []
    for gap_sq, i, j in sorted(best.values(), key=lambda e: (e[1], e[2])):
        if not _cut_suppressed(shapes[i], shapes[j], cuts):
            out.append(Violation(layer, shapes[i], shapes[j], gap_sq))
    return out


def check_all(d: Design) -> list[Violation]:
    """check_spacing over every layer of the technology."""
    out: list[Violation] = []
    for name in d.tech.layers:
        out.extend(check_spacing(d, name))
    return out
