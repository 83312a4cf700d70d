"""The end-to-end generation pipeline.

Stage order: instance generation, placement, routing-grid generation (after
placement, so the grid can key on the placed structures), routing, pinning,
then the post-processing passes in their fixed order (min-area extension,
cut generation, coloring, dummy fill). Each post pass runs only when the
technology actually requires it and the caller has not switched it off.
Errors are re-raised annotated with the stage that produced them.
"""

from __future__ import annotations

from dataclasses import dataclass

from .design import Design
from .errors import FlowError
from .generators import Generator, get_generator
from .geometry import Rect
from .postprocess import assign_colors, cut_pattern_gen, extend_min_area, fill_dummies
from .tech import TechDB
from .template import validate_params


@dataclass
class FlowFlags:
    """Per-run switches for the post-processing passes."""

    min_area: bool = True
    cuts: bool = True
    colors: bool = True
    dummies: bool = True
    color_offset: int = 0


def run_flow(
    generator: str | Generator,
    params: dict,
    tech: TechDB,
    flags: FlowFlags | None = None,
) -> Design:
    """Run a registered generator through the whole pipeline."""
    flags = flags if flags is not None else FlowFlags()
    if isinstance(generator, str):
        cls = get_generator(generator)
        gen = cls(validate_params(cls.schema, params))
    else:
        gen = generator

    d = Design(gen.design_name(), tech)

    def stage(name, fn, *args):
        try:
            return fn(*args)
        except Exception as exc:
            raise FlowError(name, exc) from exc

    stage("instances", gen.build_instances, d)
    stage("placement", gen.place_instances, d)
    stage("grids", gen.make_grids, d)
    stage("routing", gen.route_wires, d)
    stage("pinning", gen.add_pins, d)

    if flags.min_area:
        for name, rule in tech.layers.items():
            if rule.min_area > 0:
                stage(f"postprocess[min-area:{name}]", extend_min_area, d, name)
    if flags.cuts:
        for name, rule in tech.layers.items():
            if rule.cut is not None:
                stage(f"postprocess[cuts:{name}]", cut_pattern_gen, d, name)
    if flags.colors and d.rgrid is not None:
        for name, rule in tech.layers.items():
            if rule.colorable:
                stage(
                    f"postprocess[colors:{name}]",
                    assign_colors, d, name, flags.color_offset,
                )
    if flags.dummies and "dummy" in tech.templates and d.pgrid is not None:
        box = d.instance_bbox()
        if box is not None:
            region = Rect("", box[0], box[1])
            stage("postprocess[dummies]", fill_dummies, d, region)
    return d


def gen_current_dac(bits: int, tech: TechDB, flags: FlowFlags | None = None) -> Design:
    """Binary-weighted current-DAC design with pins b0..b(bits-1), out, vss."""
    return run_flow("dac", {"bits": bits}, tech, flags)


def gen_scan_cell(
    n_bits: int,
    with_levelshift: bool,
    tech: TechDB,
    flags: FlowFlags | None = None,
) -> Design:
    """Chain of abutted scan cells, optionally with level-shift blocks."""
    return run_flow(
        "scan", {"n_bits": n_bits, "with_levelshift": with_levelshift}, tech, flags
    )
