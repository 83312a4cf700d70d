"""Templates and their instantiation into virtual instances.

A native template is a fixed piece of geometry with pins. A dynamic template
is a data-driven generator definition: its parameters select sub-element
counts and flavors at instantiation time, and the result is wrapped into a
VirtualInstance — a group of placed sub-elements that behaves like a single
instance with one bounding box, one transform, and one pin set.
"""

from __future__ import annotations

from dataclasses import dataclass, replace
from typing import TYPE_CHECKING, Any, Callable, Mapping

from .errors import BadParams, UnknownPin
from .geometry import (
    Point,
    Rect,
    Transform,
    apply,
    apply_rect,
    bbox_of,
    compose,
    half_i_minus,
    mat_apply,
)

if TYPE_CHECKING:
    from .tech import TechDB


@dataclass(frozen=True)
class PinDef:
    """A pin shape in the owner's local frame, with its net label."""

    rect: Rect
    net: str | None = None


@dataclass(frozen=True)
class ParamSpec:
    type: str  # "int" | "str" | "bool"
    default: Any = None
    choices: tuple | None = None
    min: int | None = None
    max: int | None = None


def validate_params(schema: Mapping[str, ParamSpec], params: Mapping[str, Any]) -> dict:
    """Fill defaults and check types/choices/bounds; BadParams names the field."""
    out: dict[str, Any] = {}
    for key in params:
        if key not in schema:
            raise BadParams(f"unknown parameter {key!r}")
    for name, spec in schema.items():
        if name in params:
            value = params[name]
        elif spec.default is not None or spec.type == "bool":
            value = spec.default if spec.default is not None else False
        else:
            raise BadParams(f"missing parameter {name!r}")
        if spec.type == "int":
            if isinstance(value, bool) or not isinstance(value, int):
                raise BadParams(f"{name!r} must be an integer")
            if spec.min is not None and value < spec.min:
                raise BadParams(f"{name!r} must be >= {spec.min}")
            if spec.max is not None and value > spec.max:
                raise BadParams(f"{name!r} must be <= {spec.max}")
        elif spec.type == "bool":
            if not isinstance(value, bool):
                raise BadParams(f"{name!r} must be a boolean")
        elif spec.type == "str":
            if not isinstance(value, str):
                raise BadParams(f"{name!r} must be a string")
        if spec.choices is not None and value not in spec.choices:
            raise BadParams(f"{name!r} must be one of {list(spec.choices)}")
        out[name] = value
    return out


@dataclass(frozen=True)
class SubElement:
    """A geometry group placed inside a virtual instance.

    `offset` is the group origin relative to the instance origin, `transform`
    the group's own orientation; `master` is a label for reporting only.
    """

    rects: tuple[Rect, ...]
    offset: Point
    transform: Transform = Transform.R0
    master: str = ""


@dataclass(frozen=True)
class NativeTemplate:
    """A fixed cell: bbox size, pins, and raw geometry, all in local frame."""

    name: str
    size: Point
    pins: Mapping[str, PinDef]
    geometry: tuple[Rect, ...]

    def __post_init__(self):
        if self.size.x < 0 or self.size.y < 0:
            raise ValueError(f"template {self.name}: negative size")
        for pname, pin in self.pins.items():
            if not _inside(pin.rect, self.size):
                raise ValueError(f"template {self.name}: pin {pname} outside bbox")


@dataclass(frozen=True)
class DynamicTemplate:
    """A parameterized generator definition loaded from technology data.

    `kind` selects one of the built-in builders; `config` carries the
    technology-specific dimensions and layer names the builder consumes.
    Generation is a pure function of (params, tech).
    """

    name: str
    kind: str
    schema: Mapping[str, ParamSpec]
    config: Mapping[str, Any]

    def generate(self, params: Mapping[str, Any], tech: "TechDB") -> "VirtualInstance":
        clean = validate_params(self.schema, params)
        builder = _KIND_BUILDERS.get(self.kind)
        if builder is None:
            raise BadParams(f"template {self.name}: unknown kind {self.kind!r}")
        size, subelements, pins = builder(self, clean, tech)
        return VirtualInstance(
            master=self.name,
            params=clean,
            origin=Point(0, 0),
            transform=Transform.R0,
            size=size,
            subelements=tuple(subelements),
            pins=dict(pins),
        )


def _inside(r: Rect, size: Point) -> bool:
    return 0 <= r.lo.x and 0 <= r.lo.y and r.hi.x <= size.x and r.hi.y <= size.y


@dataclass(frozen=True)
class VirtualInstance:
    """A placed group of sub-elements abstracted as one instance.

    The declared size spans the local frame [0, size]; pins and sub-element
    geometry live in that frame. Placement maps a local point q to

        origin + 0.5*(I - M) * size + M * q

    with M the transform matrix, so the absolute bounding box is the box of
    the declared size anchored at the origin for all four orientations.
    """

    master: str
    params: Mapping[str, Any]
    origin: Point
    transform: Transform
    size: Point
    subelements: tuple[SubElement, ...]
    pins: Mapping[str, PinDef]

    def __post_init__(self):
        for pname, pin in self.pins.items():
            if not _inside(pin.rect, self.size):
                raise ValueError(f"instance {self.master}: pin {pname} outside bbox")

    def at(self, origin: Point, transform: Transform) -> "VirtualInstance":
        """Repositioned copy (instances are immutable)."""
        return replace(self, origin=origin, transform=transform)

    def bbox(self) -> tuple[Point, Point]:
        """Absolute bounding box; identical for all four orientations."""
        return self.origin, self.origin + self.size

    def _anchor(self) -> Point:
        return self.origin + mat_apply(half_i_minus(self.transform), self.size)

    def place_subelement(self, k: int) -> tuple[Point, Transform]:
        """Absolute origin and effective orientation of sub-element k.

        The sub-element offset is mapped through the instance transform (not
        through the sub-element's own transform): composing the instance
        transform onto the sub-element transform then mirrors unrotated
        children correctly, which the other reading of the offset rule does
        not. Both conventions produce identical results at R0.
        """
        sub = self.subelements[k]
        pos = self._anchor() + apply(self.transform, sub.offset)
        return pos, compose(self.transform, sub.transform)

    def flatten(self) -> list[Rect]:
        """All sub-element geometry in absolute coordinates."""
        out: list[Rect] = []
        for k, sub in enumerate(self.subelements):
            pos, eff = self.place_subelement(k)
            for r in sub.rects:
                out.append(apply_rect(eff, r).translated(pos))
        return out

    def pin_abs(self, name: str) -> Rect:
        """A pin rect transformed exactly like sub-element geometry."""
        pin = self.pins.get(name)
        if pin is None:
            raise UnknownPin(f"{self.master} has no pin {name!r}")
        return apply_rect(self.transform, pin.rect).translated(self._anchor())

    def pin_net(self, name: str) -> str | None:
        pin = self.pins.get(name)
        if pin is None:
            raise UnknownPin(f"{self.master} has no pin {name!r}")
        return pin.net


def generate(tpl, params: Mapping[str, Any], tech: "TechDB") -> VirtualInstance:
    """Instantiate a template at origin (0,0), R0.

    Native templates take no parameters; dynamic templates validate `params`
    against their schema.
    """
    if isinstance(tpl, NativeTemplate):
        if params:
            raise BadParams(f"native template {tpl.name} takes no parameters")
        return VirtualInstance(
            master=tpl.name,
            params={},
            origin=Point(0, 0),
            transform=Transform.R0,
            size=tpl.size,
            subelements=(SubElement(tpl.geometry, Point(0, 0), Transform.R0, tpl.name),),
            pins=dict(tpl.pins),
        )
    return tpl.generate(params, tech)


def array_of(vi: VirtualInstance, cols: int, rows: int, pitch: Point) -> list[VirtualInstance]:
    """Expand an instance into a cols x rows array with the given pitch."""
    if cols < 1 or rows < 1:
        raise BadParams("array dimensions must be >= 1")
    return [
        vi.at(vi.origin + Point(i * pitch.x, j * pitch.y), vi.transform)
        for j in range(rows)
        for i in range(cols)
    ]


# --- built-in dynamic template kinds ---------------------------------------

def _mos_cell(cfg: Mapping[str, Any], core: bool, vth_marker, ch_marker) -> tuple[Rect, ...]:
    pp = cfg["poly_pitch"]
    rh = cfg["row_height"]
    pw = cfg["poly_width"]
    pm = cfg["poly_margin"]
    am = cfg["active_margin"]
    rects = [Rect(cfg["poly_layer"], Point((pp - pw) // 2, pm), Point((pp + pw) // 2, rh - pm))]
    if core:
        rects.append(Rect(cfg["active_layer"], Point(0, am), Point(pp, rh - am)))
        if vth_marker:
            rects.append(Rect(vth_marker, Point(0, 0), Point(pp, rh)))
        if ch_marker:
            rects.append(Rect(ch_marker, Point(0, 0), Point(pp, rh)))
    return tuple(rects)


def _build_mos(tpl: DynamicTemplate, params: dict, tech: "TechDB"):
    """nf core cells flanked by two boundary dummies; pins on poly-pitch columns."""
    cfg = tpl.config
    nf = params["nf"]
    pp = cfg["poly_pitch"]
    rh = cfg["row_height"]
    vth_marker = cfg["vth_markers"].get(params["vth"])
    ch_marker = cfg["channel_markers"].get(params["channel"])
    core = _mos_cell(cfg, True, vth_marker, ch_marker)
    bnd = _mos_cell(cfg, False, vth_marker, ch_marker)
    subelements = [SubElement(bnd, Point(0, 0), Transform.R0, f"{tpl.name}_bnd")]
    for k in range(nf):
        subelements.append(SubElement(core, Point((1 + k) * pp, 0), Transform.R0, f"{tpl.name}_core"))
    subelements.append(SubElement(bnd, Point((nf + 1) * pp, 0), Transform.R0, f"{tpl.name}_bnd"))
    size = Point((nf + 2) * pp, rh)

    psz = cfg["pin_size"]
    margin = cfg["pin_margin"]
    layer = cfg["pin_layer"]
    half = psz // 2

    def pin_at(x: int, top: bool) -> Rect:
        y0 = rh - margin - psz if top else margin
        return Rect(layer, Point(x - half, y0), Point(x + half, y0 + psz), "pin")

    pins = {
        "g": PinDef(pin_at(pp, top=False), "g"),
        "s": PinDef(pin_at(2 * pp, top=False), "s"),
        "d": PinDef(pin_at(pp, top=True), "d"),
    }
    return size, subelements, pins


def _build_strip(tpl: DynamicTemplate, params: dict, tech: "TechDB"):
    """n repeats of a configured cell in a row (tap/decap stand-ins)."""
    cfg = tpl.config
    n = params["n"]
    cw = cfg["cell_width"]
    rh = cfg["row_height"]
    cell = tuple(
        Rect(
            e["layer"],
            Point(e["rect"][0], e["rect"][1]),
            Point(e["rect"][2], e["rect"][3]),
            e.get("purpose", "drawing"),
        )
        for e in cfg["cell_rects"]
    )
    subelements = [
        SubElement(cell, Point(k * cw, 0), Transform.R0, f"{tpl.name}_cell") for k in range(n)
    ]
    size = Point(n * cw, rh)
    pins = {}
    for pname, p in cfg.get("pins", {}).items():
        r = Rect(p["layer"], Point(p["rect"][0], p["rect"][1]), Point(p["rect"][2], p["rect"][3]), "pin")
        pins[pname] = PinDef(r, p.get("net"))
    return size, subelements, pins


def _build_scan_bit(tpl: DynamicTemplate, params: dict, tech: "TechDB"):
    """One scan cell: core block plus an optional level-shift block abutted right.

    Chain pins sit flush on the cell edges so abutted cells connect by
    coordinate coincidence.
    """
    cfg = tpl.config
    core = tech.template(cfg["core"])
    subelements = [SubElement(core.geometry, Point(0, 0), Transform.R0, core.name)]
    width = core.size.x
    if params["with_levelshift"]:
        ls = tech.template(cfg["levelshift"])
        subelements.append(SubElement(ls.geometry, Point(width, 0), Transform.R0, ls.name))
        out_rect = ls.pins["out"].rect.translated(Point(width, 0))
        width += ls.size.x
    else:
        out_rect = core.pins["scan_out"].rect
    pins = {
        "scan_in": PinDef(core.pins["scan_in"].rect, "si"),
        "scan_out": PinDef(out_rect, "so"),
        "clk": PinDef(core.pins["clk"].rect, "clk"),
    }
    return Point(width, core.size.y), subelements, pins


_KIND_BUILDERS: dict[str, Callable] = {
    "mos": _build_mos,
    "strip": _build_strip,
    "scan_bit": _build_scan_bit,
}
