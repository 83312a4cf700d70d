"""Cyclic value stores, periodic coordinate grids, and grid generation.

Grid attributes (layer, width, color, via candidates) repeat over the whole
physical space, so they are held in cyclic containers that accept any integer
index, negative included. Abstract (track index) to physical (nanometer)
conversion and its conditional reverse mapping live on OneDimGrid. Everything
here is immutable after construction.
"""

from __future__ import annotations

from bisect import bisect_left, bisect_right
from dataclasses import dataclass
from typing import TYPE_CHECKING, Any, Sequence

from .errors import InfeasibleSpec, NotOnGrid, UnknownLayer
from .geometry import Point, Rect

if TYPE_CHECKING:
    from .tech import TechDB


class CircularMapping:
    """A 1-D list whose indexing wraps around in both directions.

    Element lookup uses floored modulo, so get(i) is defined for every
    integer i and get(i + len) == get(i) exactly. Slices are half-open
    [start, stop) with an optional nonzero step, evaluated index by index
    through the cyclic lookup (so they may be longer than the list itself).
    """

    __slots__ = ("elements",)

    def __init__(self, elements: Sequence):
        if len(elements) < 1:
            raise ValueError("CircularMapping needs at least one element")
        self.elements = tuple(elements)

    def __len__(self) -> int:
        return len(self.elements)

    def get(self, i: int) -> Any:
        return self.elements[i % len(self.elements)]

    def slice(self, start: int, stop: int, step: int = 1) -> list:
        if step == 0:
            raise ValueError("slice step must be nonzero")
        return [self.get(i) for i in range(start, stop, step)]

    def __getitem__(self, key):
        if isinstance(key, slice):
            if key.start is None or key.stop is None:
                raise ValueError("cyclic slices need explicit start and stop")
            return self.slice(key.start, key.stop, 1 if key.step is None else key.step)
        return self.get(key)

    def __eq__(self, other) -> bool:
        return isinstance(other, CircularMapping) and self.elements == other.elements

    def __hash__(self):
        return hash(self.elements)

    def __repr__(self) -> str:
        return f"CircularMapping({list(self.elements)!r})"


class CircularMappingArray:
    """A 2-D array with cyclic indexing on both axes.

    Built from rows of uniform length; get(i, j) wraps i over the rows and
    j over the columns.
    """

    __slots__ = ("rows",)

    def __init__(self, rows: Sequence[Sequence]):
        if len(rows) < 1:
            raise ValueError("CircularMappingArray needs at least one row")
        widths = {len(r) for r in rows}
        if len(widths) != 1 or widths == {0}:
            raise ValueError("rows must have equal, nonzero length")
        self.rows = tuple(tuple(r) for r in rows)

    @property
    def shape(self) -> tuple[int, int]:
        return len(self.rows), len(self.rows[0])

    def get(self, i: int, j: int) -> Any:
        row = self.rows[i % len(self.rows)]
        return row[j % len(row)]

    def __getitem__(self, key):
        i, j = key
        return self.get(i, j)

    def __eq__(self, other) -> bool:
        return isinstance(other, CircularMappingArray) and self.rows == other.rows

    def __repr__(self) -> str:
        return f"CircularMappingArray({[list(r) for r in self.rows]!r})"


_OPS = ("<", "<=", "==", ">=", ">")


@dataclass(frozen=True)
class OneDimGrid:
    """A periodic 1-D coordinate grid: `coords` repeated every `period` units.

    Abstract index i maps to period*floor(i/r) + coords[i mod r], r being the
    number of coordinates per period, so the grid extends infinitely in both
    directions.
    """

    period: int
    coords: tuple[int, ...]

    def __post_init__(self):
        if self.period <= 0:
            raise ValueError("grid period must be positive")
        coords = tuple(self.coords)
        if not coords:
            raise ValueError("grid needs at least one coordinate")
        if any(b <= a for a, b in zip(coords, coords[1:])):
            raise ValueError("grid coordinates must be strictly increasing")
        if coords[0] < 0 or coords[-1] >= self.period:
            raise ValueError("grid coordinates must lie in [0, period)")
        object.__setattr__(self, "coords", coords)

    def __len__(self) -> int:
        return len(self.coords)

    def phys(self, i: int) -> int:
        """Physical coordinate of abstract index i."""
        r = len(self.coords)
        return self.period * (i // r) + self.coords[i % r]

    def index_where(self, op: str, value: int) -> int:
        """Reverse mapping by conditional operator.

        For ">="/">" returns the smallest abstract index whose physical
        coordinate satisfies the condition, for "<="/"<" the largest, and for
        "==" the unique index of an on-grid value (NotOnGrid otherwise).
        """
        if op not in _OPS:
            raise ValueError(f"unknown operator {op!r}")
        r = len(self.coords)
        base, rem = divmod(value, self.period)
        if op == ">=":
            return base * r + bisect_left(self.coords, rem)
        if op == ">":
            return base * r + bisect_right(self.coords, rem)
        if op == "<=":
            return base * r + bisect_right(self.coords, rem) - 1
        if op == "<":
            return base * r + bisect_left(self.coords, rem) - 1
        k = bisect_left(self.coords, rem)
        if k == r or self.coords[k] != rem:
            raise NotOnGrid(f"{value} is not on the grid")
        return base * r + k


@dataclass(frozen=True)
class PlacementGrid:
    """Independent x/y grids that instance origins snap to."""

    xgrid: OneDimGrid
    ygrid: OneDimGrid

    def phys(self, xy: tuple[int, int]) -> Point:
        return Point(self.xgrid.phys(xy[0]), self.ygrid.phys(xy[1]))


@dataclass(frozen=True)
class TrackSpec:
    """One track of a grid generation pattern.

    kind "signal" uses the layer's minimum width; kind "power" widens the
    track by `wmul`. `color` pins the patterning mask of the track ("none"
    leaves it uncolored); absent on a colorable layer means alternate
    automatically.
    """

    layer: str
    kind: str = "signal"
    wmul: int = 1
    color: str | None = None

    def __post_init__(self):
        if self.kind not in ("signal", "power"):
            raise ValueError(f"unknown track kind {self.kind!r}")
        if self.wmul < 1:
            raise ValueError("wmul must be >= 1")
        if self.color not in (None, "A", "B", "none"):
            raise ValueError(f"unknown color {self.color!r}")


@dataclass(frozen=True)
class GridSpec:
    """Input parameters of routing-grid generation: one cycle of tracks per axis."""

    name: str
    xtracks: tuple[TrackSpec, ...]
    ytracks: tuple[TrackSpec, ...]

    @classmethod
    def from_dict(cls, name: str, d: dict) -> "GridSpec":
        def tracks(key):
            return tuple(
                TrackSpec(
                    layer=t["layer"],
                    kind=t.get("kind", "signal"),
                    wmul=t.get("wmul", 1),
                    color=t.get("color"),
                )
                for t in d.get(key, ())
            )

        return cls(name=name, xtracks=tracks("xtracks"), ytracks=tracks("ytracks"))

    def to_dict(self) -> dict:
        def dump(tracks):
            out = []
            for t in tracks:
                e: dict = {"layer": t.layer, "kind": t.kind}
                if t.wmul != 1:
                    e["wmul"] = t.wmul
                if t.color is not None:
                    e["color"] = t.color
                out.append(e)
            return out

        return {"xtracks": dump(self.xtracks), "ytracks": dump(self.ytracks)}


@dataclass(frozen=True)
class RoutingGrid:
    """Periodic x/y track grids with per-track attributes.

    x tracks carry vertical wires (vlayer/vwidth/xcolor), y tracks horizontal
    ones. viamap holds the via-definition name for every (x track, y track)
    intersection, or None where the layer pair has no via.
    """

    name: str
    xgrid: OneDimGrid
    ygrid: OneDimGrid
    vlayer: CircularMapping
    hlayer: CircularMapping
    vwidth: CircularMapping
    hwidth: CircularMapping
    xcolor: CircularMapping
    ycolor: CircularMapping
    viamap: CircularMappingArray

    def __post_init__(self):
        nx, ny = len(self.xgrid), len(self.ygrid)
        for attr, n in (
            ("vlayer", nx), ("vwidth", nx), ("xcolor", nx),
            ("hlayer", ny), ("hwidth", ny), ("ycolor", ny),
        ):
            if len(getattr(self, attr)) != n:
                raise ValueError(f"{attr} length does not match its axis")
        if self.viamap.shape != (nx, ny):
            raise ValueError("viamap shape does not match the axes")
        if any(w <= 0 for w in self.vwidth.elements + self.hwidth.elements):
            raise ValueError("track widths must be positive")


@dataclass(frozen=True)
class IndexWindow:
    """Inclusive abstract index ranges on both axes."""

    x0: int
    x1: int
    y0: int
    y1: int


def overlap_range(g: RoutingGrid, a: Rect, b: Rect) -> IndexWindow | None:
    """Abstract index window of grid points inside intersection(a, b).

    Boundary counts: a grid line on the intersection edge is included.
    Returns None when the rects are apart or no grid point falls inside.
    """
    box = a.intersection(b)
    if box is None:
        return None
    x0 = g.xgrid.index_where(">=", box.lo.x)
    x1 = g.xgrid.index_where("<=", box.hi.x)
    y0 = g.ygrid.index_where(">=", box.lo.y)
    y1 = g.ygrid.index_where("<=", box.hi.y)
    if x0 > x1 or y0 > y1:
        return None
    return IndexWindow(x0, x1, y0, y1)


def _landing_pitch(tech: "TechDB", layer: str, horizontal: bool) -> int:
    """Pitch needed so via landings on adjacent tracks keep min spacing.

    Taken along the axis perpendicular to the track: cut extent plus twice
    the layer enclosure plus the layer's min spacing; zero when no via
    touches the layer.
    """
    best = 0
    for via in tech.vias.values():
        if layer not in (via.lower, via.upper):
            continue
        cut = via.cut_size[0] if not horizontal else via.cut_size[1]
        pad = cut + 2 * via.enclosure.get(layer, 0)
        best = max(best, pad + tech.min_spacing(layer))
    return best


def _build_axis(
    tech: "TechDB", tracks: tuple[TrackSpec, ...], horizontal: bool
) -> tuple[OneDimGrid, list[str], list[int], list[str | None]]:
    if not tracks:
        raise InfeasibleSpec("empty track pattern")
    pitches: list[int] = []
    widths: list[int] = []
    layers: list[str] = []
    colors: list[str | None] = []
    for k, t in enumerate(tracks):
        rule = tech.layer(t.layer)
        width = rule.min_width * (t.wmul if t.kind == "power" else 1)
        pitch = max(width + rule.min_spacing, _landing_pitch(tech, t.layer, horizontal))
        if pitch % 2:
            pitch += 1  # keep slot centers integral
        pitches.append(pitch)
        widths.append(width)
        layers.append(t.layer)
        if t.color == "none":
            colors.append(None)
        elif t.color is not None:
            colors.append(t.color if rule.colorable else None)
        elif rule.colorable:
            colors.append("A" if k % 2 == 0 else "B")
        else:
            colors.append(None)
    period = sum(pitches)
    # Center each track in its pitch slot, then shift the pattern so the
    # first track sits at coordinate 0.
    centers = []
    cursor = 0
    for p in pitches:
        centers.append(cursor + p // 2)
        cursor += p
    shift = centers[0]
    coords = tuple(c - shift for c in centers)
    return OneDimGrid(period=period, coords=coords), layers, widths, colors


def generate_routing_grid(tech: "TechDB", spec: GridSpec, region: Rect) -> RoutingGrid:
    """Realize a grid spec against a technology over a region.

    Track pitch is max(min_width*wmul + min_spacing, via-landing pitch) per
    track; the grid period is one full cycle of the pattern; tracks are
    centered in their pitch slots with the first track normalized to 0. The
    result is anchored at the global origin and extends periodically, so the
    region only bounds feasibility (the cycle must fit inside it).
    """
    for t in spec.xtracks + spec.ytracks:
        if t.layer not in tech.layers:
            raise UnknownLayer(t.layer)
    if region.width <= 0 or region.height <= 0:
        raise InfeasibleSpec("empty region")
    xgrid, vlayers, vwidths, xcolors = _build_axis(tech, spec.xtracks, horizontal=False)
    ygrid, hlayers, hwidths, ycolors = _build_axis(tech, spec.ytracks, horizontal=True)
    if xgrid.period > region.width or ygrid.period > region.height:
        raise InfeasibleSpec(
            f"pattern cycle {xgrid.period}x{ygrid.period} exceeds region "
            f"{region.width}x{region.height}"
        )
    viamap = CircularMappingArray(
        [
            [
                (v.name if (v := tech.via_between(vl, hl)) is not None else None)
                for hl in hlayers
            ]
            for vl in vlayers
        ]
    )
    return RoutingGrid(
        name=spec.name,
        xgrid=xgrid,
        ygrid=ygrid,
        vlayer=CircularMapping(vlayers),
        hlayer=CircularMapping(hlayers),
        vwidth=CircularMapping(vwidths),
        hwidth=CircularMapping(hwidths),
        xcolor=CircularMapping(xcolors),
        ycolor=CircularMapping(ycolors),
        viamap=viamap,
    )
