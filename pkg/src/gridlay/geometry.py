"""Integer-exact points, rectangles, and the four orthogonal transforms.

All coordinates are integers in design units (1 unit = 1 nm by default), so
every operation here is exact; there is no floating point anywhere in the
geometry path. Values are immutable and safe to share between threads.
"""

from __future__ import annotations

import enum
from dataclasses import dataclass, replace

# Rectangle purposes. "drawing" is plain geometry; "pin" marks label shapes
# (exported on datatype+1 and skipped by the spacing checker); "cut" marks
# cut-mask shapes; "dummy" marks fill geometry; colorA/colorB are the two
# patterning masks of a colorable layer.
PURPOSES = ("drawing", "pin", "cut", "dummy", "colorA", "colorB")

Matrix = tuple[tuple[int, int], tuple[int, int]]


@dataclass(frozen=True, order=True)
class Point:
    x: int
    y: int

    def __add__(self, other: "Point") -> "Point":
        return Point(self.x + other.x, self.y + other.y)

    def __sub__(self, other: "Point") -> "Point":
        return Point(self.x - other.x, self.y - other.y)

    def __neg__(self) -> "Point":
        return Point(-self.x, -self.y)


class Transform(enum.Enum):
    """One of the four orthogonal orientations.

    The associated 2x2 matrices are diagonal sign matrices, so the set is
    closed under composition and forms a group isomorphic to Z2 x Z2.
    R90-family orientations are deliberately unsupported: row-based layout
    styles never need them.
    """

    R0 = "R0"
    MX = "MX"      # mirror about the x-axis (y sign flips)
    MY = "MY"      # mirror about the y-axis (x sign flips)
    R180 = "R180"


_MATRIX: dict[Transform, Matrix] = {
    Transform.R0: ((1, 0), (0, 1)),
    Transform.MX: ((1, 0), (0, -1)),
    Transform.MY: ((-1, 0), (0, 1)),
    Transform.R180: ((-1, 0), (0, -1)),
}

# 0.5*(I - M) for each transform. Always integer-valued because the diagonal
# entries of M are +-1; used by the sub-element placement rule so that a
# transformed instance keeps the same absolute bounding box as its R0 twin.
_HALF_I_MINUS: dict[Transform, Matrix] = {
    Transform.R0: ((0, 0), (0, 0)),
    Transform.MX: ((0, 0), (0, 1)),
    Transform.MY: ((1, 0), (0, 0)),
    Transform.R180: ((1, 0), (0, 1)),
}


def matrix_of(t: Transform) -> Matrix:
    """Return the 2x2 integer matrix of an orientation."""
    return _MATRIX[t]


def half_i_minus(t: Transform) -> Matrix:
    """Return the integer matrix 0.5*(I - matrix_of(t))."""
    return _HALF_I_MINUS[t]


def mat_apply(m: Matrix, p: Point) -> Point:
    return Point(m[0][0] * p.x + m[0][1] * p.y, m[1][0] * p.x + m[1][1] * p.y)


def mat_mul(a: Matrix, b: Matrix) -> Matrix:
    return (
        (a[0][0] * b[0][0] + a[0][1] * b[1][0], a[0][0] * b[0][1] + a[0][1] * b[1][1]),
        (a[1][0] * b[0][0] + a[1][1] * b[1][0], a[1][0] * b[0][1] + a[1][1] * b[1][1]),
    )


_COMPOSE: dict[tuple[Transform, Transform], Transform] = {}
for _a in Transform:
    for _b in Transform:
        _m = mat_mul(_MATRIX[_a], _MATRIX[_b])
        for _c in Transform:
            if _MATRIX[_c] == _m:
                _COMPOSE[(_a, _b)] = _c


def compose(outer: Transform, inner: Transform) -> Transform:
    """Orientation whose matrix equals matrix_of(outer) @ matrix_of(inner)."""
    return _COMPOSE[(outer, inner)]


def apply(t: Transform, p: Point) -> Point:
    """Apply an orientation's matrix to a point."""
    return mat_apply(_MATRIX[t], p)


@dataclass(frozen=True)
class Rect:
    """An axis-aligned rectangle on a layer, normalized so lo <= hi."""

    layer: str
    lo: Point
    hi: Point
    purpose: str = "drawing"

    def __post_init__(self):
        if self.purpose not in PURPOSES:
            raise ValueError(f"unknown purpose {self.purpose!r}")
        lo = Point(min(self.lo.x, self.hi.x), min(self.lo.y, self.hi.y))
        hi = Point(max(self.lo.x, self.hi.x), max(self.lo.y, self.hi.y))
        object.__setattr__(self, "lo", lo)
        object.__setattr__(self, "hi", hi)

    @property
    def width(self) -> int:
        return self.hi.x - self.lo.x

    @property
    def height(self) -> int:
        return self.hi.y - self.lo.y

    def translated(self, d: Point) -> "Rect":
        return replace(self, lo=self.lo + d, hi=self.hi + d)

    def with_purpose(self, purpose: str) -> "Rect":
        return replace(self, purpose=purpose)

    def intersection(self, other: "Rect") -> "Rect | None":
        """Overlap box, boundary included; None when the rects are apart.

        A shared edge yields a degenerate (zero-width/height) rectangle,
        which callers that need positive-area overlap must reject themselves.
        """
        lo = Point(max(self.lo.x, other.lo.x), max(self.lo.y, other.lo.y))
        hi = Point(min(self.hi.x, other.hi.x), min(self.hi.y, other.hi.y))
        if lo.x > hi.x or lo.y > hi.y:
            return None
        return Rect(self.layer, lo, hi, self.purpose)

    def overlaps(self, other: "Rect") -> bool:
        """True for positive-area overlap (abutment does not count)."""
        return (
            self.lo.x < other.hi.x
            and other.lo.x < self.hi.x
            and self.lo.y < other.hi.y
            and other.lo.y < self.hi.y
        )


def apply_rect(t: Transform, r: Rect) -> Rect:
    """Transform both corners and re-normalize."""
    return replace(r, lo=apply(t, r.lo), hi=apply(t, r.hi))


def bbox_of(rects) -> tuple[Point, Point] | None:
    """Lower-left / upper-right corners of a rect collection, or None if empty."""
    it = iter(rects)
    first = next(it, None)
    if first is None:
        return None
    lx, ly, hx, hy = first.lo.x, first.lo.y, first.hi.x, first.hi.y
    for r in it:
        lx = min(lx, r.lo.x)
        ly = min(ly, r.lo.y)
        hx = max(hx, r.hi.x)
        hy = max(hy, r.hi.y)
    return Point(lx, ly), Point(hx, hy)
