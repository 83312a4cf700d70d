"""Process-specific post-processing passes.

These run after placement and routing, gated on what the technology actually
requires: cut-pattern generation for layers fabricated as aggregated patterns,
minimum-area wire extension, patterning-mask (color) assignment, and dummy
fill. Pass order in the standard flow is min-area, cuts, colors, dummies:
extensions change gaps so they must precede cuts, coloring reads final track
usage, and dummies fill whatever space remains.
"""

from __future__ import annotations

from dataclasses import dataclass

from .design import Design, Wire
from .errors import LayoutError, NoCutRule, NoDummyTemplate, NotColorable, NotOnGrid
from .geometry import Point, Rect
from .template import VirtualInstance, generate


@dataclass(frozen=True)
class CutShape:
    """One cut-mask rectangle, centered in a gap or beyond a wire end."""

    layer: str
    rect: Rect


def _wire_tracks(d: Design, layer: str) -> dict[tuple[str, int], list[Wire]]:
    tracks: dict[tuple[str, int], list[Wire]] = {}
    for w in d.wires:
        if w.layer == layer:
            tracks.setdefault((w.axis, w.track), []).append(w)
    return tracks


def _merged_spans(wires: list[Wire]) -> list[tuple[int, int]]:
    """Union of wire extents; overlapping or abutting wires form one pattern."""
    spans: list[tuple[int, int]] = []
    for w in sorted(wires, key=lambda w: (w.lo, w.hi)):
        if spans and w.lo <= spans[-1][1]:
            spans[-1] = (spans[-1][0], max(spans[-1][1], w.hi))
        else:
            spans.append((w.lo, w.hi))
    return spans


def cut_pattern_gen(d: Design, layer: str) -> list[CutShape]:
    """Insert cut shapes for a layer fabricated as aggregated patterns.

    Scanning each track: any gap between neighboring patterns smaller than
    the spacing threshold receives exactly one cut centered in the gap
    (midpoint rounded toward the lower coordinate). The outermost non-pin
    wire of a track additionally receives a cut beyond each outer end,
    applied along the wire's own axis; pin wires get none because their cuts
    belong to the parent level. Overlapping or abutting wires are one merged
    pattern and never get a cut between them. Rerunning the pass adds
    nothing.
    """
    rule = d.tech.cut_rule(layer)
    if rule is None:
        raise NoCutRule(f"layer {layer!r} has no cut rule")
    cw, cl = rule.cut_width, rule.cut_length

    existing = {
        (r.lo, r.hi)
        for r in d.rects
        if r.layer == rule.cut_layer and r.purpose == "cut"
    }

    def cut_rect(axis: str, track: int, center: int) -> Rect:
        a0 = center - cw // 2
        c0 = track - cl // 2
        if axis == "h":
            return Rect(rule.cut_layer, Point(a0, c0), Point(a0 + cw, c0 + cl), "cut")
        return Rect(rule.cut_layer, Point(c0, a0), Point(c0 + cl, a0 + cw), "cut")

    out: list[CutShape] = []

    def emit(axis: str, track: int, center: int):
        r = cut_rect(axis, track, center)
        if (r.lo, r.hi) in existing:
            return
        existing.add((r.lo, r.hi))
        d.rects.append(r)
        out.append(CutShape(rule.cut_layer, r))

    for (axis, track), wires in sorted(_wire_tracks(d, layer).items()):
        spans = _merged_spans(wires)
        for (_, hi_a), (lo_b, _) in zip(spans, spans[1:]):
            gap = lo_b - hi_a
            if 0 < gap < rule.spacing_threshold:
                emit(axis, track, (hi_a + lo_b) // 2)
        lowest = min(wires, key=lambda w: (w.lo, w.hi))
        highest = max(wires, key=lambda w: (w.hi, w.lo))
        if not lowest.is_pin:
            emit(axis, track, lowest.lo - rule.end_margin)
        if not highest.is_pin:
            emit(axis, track, highest.hi + rule.end_margin)
    return out


def extend_min_area(d: Design, layer: str) -> list[Wire]:
    """Lengthen undersized wires symmetrically until they meet min area.

    The target length is rounded up to the manufacturing grid; an odd total
    extension puts the extra unit on the high end. Wires are never shrunk.
    """
    min_area = d.tech.min_area(layer)
    touched: list[Wire] = []
    if min_area <= 0:
        return touched
    for w in d.wires:
        if w.layer != layer or w.width * w.length >= min_area:
            continue
        target = -(-min_area // w.width)
        delta = target - w.length
        w.lo -= delta // 2
        w.hi += delta - delta // 2
        touched.append(w)
    return touched


def assign_colors(d: Design, layer: str, offset: int = 0) -> list[Wire]:
    """Assign patterning masks to a colorable layer's wires from the grid.

    A wire's color is the grid's per-track color at its track index shifted
    by `offset` — the alignment knob when abutting this block against a
    neighbor. Wires that sit off-grid or whose axis does not carry this layer
    keep no color.
    """
    if not d.tech.layer(layer).colorable:
        raise NotColorable(f"layer {layer!r} is not colorable")
    g = d.rgrid
    if g is None:
        raise LayoutError("design has no routing grid to color against")
    colored: list[Wire] = []
    for w in d.wires:
        if w.layer != layer:
            continue
        try:
            if w.axis == "v":
                idx = g.xgrid.index_where("==", w.track)
                if g.vlayer.get(idx) != layer:
                    continue
                w.color = g.xcolor.get(idx + offset)
            else:
                idx = g.ygrid.index_where("==", w.track)
                if g.hlayer.get(idx) != layer:
                    continue
                w.color = g.ycolor.get(idx + offset)
        except NotOnGrid:
            continue
        if w.color is not None:
            colored.append(w)
    return colored


def fill_dummies(d: Design, region: Rect) -> list[VirtualInstance]:
    """Put one dummy instance on every free placement site inside a region.

    A site is the half-open placement-grid cell starting at a grid point that
    lies inside the region; it is occupied when any instance bbox overlaps it
    with positive area.
    """
    tpl = d.tech.templates.get("dummy")
    if tpl is None:
        raise NoDummyTemplate(f"tech {d.tech.name} ships no 'dummy' template")
    if d.pgrid is None:
        raise LayoutError("design has no placement grid to fill on")
    dummy = generate(tpl, {}, d.tech)
    boxes = [vi.bbox() for vi in d.instances]

    def occupied(cell_lo: Point, cell_hi: Point) -> bool:
        for lo, hi in boxes:
            if lo.x < cell_hi.x and cell_lo.x < hi.x and lo.y < cell_hi.y and cell_lo.y < hi.y:
                return True
        return False

    gx, gy = d.pgrid.xgrid, d.pgrid.ygrid
    added: list[VirtualInstance] = []
    j = gy.index_where(">=", region.lo.y)
    while gy.phys(j) < region.hi.y:
        i = gx.index_where(">=", region.lo.x)
        while gx.phys(i) < region.hi.x:
            lo = Point(gx.phys(i), gy.phys(j))
            hi = Point(gx.phys(i + 1), gy.phys(j + 1))
            if not occupied(lo, hi):
                added.append(d.place(dummy, d.pgrid, (i, j)))
            i += 1
        j += 1
    return added
