"""Flat 2-orbifolds presented as finite affine group quotients of the torus.

The torus is R^2/Z^2 with coordinates (theta, phi).  A presentation is a
finite group of affine maps x -> A x + b (A an integer matrix, b rational)
acting on it.  Paths through the quotient are modeled as alternating
sequences of piecewise-linear torus paths and group arrows; waypoints are
kept in the universal cover so winding is explicit and every identity is
checkable in exact rational arithmetic.
"""

from __future__ import annotations

from dataclasses import dataclass
from fractions import Fraction
from typing import Iterable, Sequence


class OrbifoldError(ValueError):
    pass


def _mod1(x: Fraction) -> Fraction:
    return x - (x.numerator // x.denominator)


@dataclass(frozen=True)
class TorusPoint:
    """Point of the torus; exact (Fraction) or numeric (float) coordinates."""

    theta: object
    phi: object

    def __post_init__(self):
        if self.exact:
            object.__setattr__(self, "theta", _mod1(Fraction(self.theta)))
            object.__setattr__(self, "phi", _mod1(Fraction(self.phi)))
        else:
            object.__setattr__(self, "theta", float(self.theta) % 1.0)
            object.__setattr__(self, "phi", float(self.phi) % 1.0)

    @property
    def exact(self) -> bool:
        return not (isinstance(self.theta, float) or isinstance(self.phi, float))

    def __iter__(self):
        yield self.theta
        yield self.phi


@dataclass(frozen=True)
class AffineMap:
    """Torus map x -> A x + b with A integer and b rational, taken mod 1."""

    matrix: tuple[tuple[int, int], tuple[int, int]]
    offset: tuple[Fraction, Fraction]

    @staticmethod
    def of(matrix, offset) -> "AffineMap":
        (a, b), (c, d) = matrix
        o1, o2 = offset
        return AffineMap(
            ((int(a), int(b)), (int(c), int(d))),
            (_mod1(Fraction(o1)), _mod1(Fraction(o2))),
        )

    @staticmethod
    def identity() -> "AffineMap":
        return AffineMap.of(((1, 0), (0, 1)), (0, 0))

    def det(self) -> int:
        (a, b), (c, d) = self.matrix
        return a * d - b * c

    def is_identity(self) -> bool:
        return self == AffineMap.identity()

    def apply_cover(self, v: tuple[Fraction, Fraction]) -> tuple[Fraction, Fraction]:
        (a, b), (c, d) = self.matrix
        x, y = Fraction(v[0]), Fraction(v[1])
        return (a * x + b * y + self.offset[0], c * x + d * y + self.offset[1])

    def apply(self, p: TorusPoint) -> TorusPoint:
        if not p.exact:
            (a, b), (c, d) = self.matrix
            return TorusPoint(
                a * p.theta + b * p.phi + float(self.offset[0]),
                c * p.theta + d * p.phi + float(self.offset[1]),
            )
        t, f = self.apply_cover((p.theta, p.phi))
        return TorusPoint(t, f)

    def compose(self, other: "AffineMap") -> "AffineMap":
        """self after other: x -> self(other(x))."""
        (a, b), (c, d) = self.matrix
        (e, f), (g, h) = other.matrix
        mat = ((a * e + b * g, a * f + b * h), (c * e + d * g, c * f + d * h))
        off = self.apply_cover(other.offset)
        return AffineMap.of(mat, off)

    def inverse(self) -> "AffineMap":
        (a, b), (c, d) = self.matrix
        det = self.det()
        if det not in (1, -1):
            raise OrbifoldError("matrix is not invertible over the integers")
        inv = ((d // det, -b // det), (-c // det, a // det))
        m = AffineMap.of(inv, (0, 0))
        off = m.apply_cover(self.offset)
        return AffineMap.of(inv, (-off[0], -off[1]))

    def is_orthogonal(self) -> bool:
        (a, b), (c, d) = self.matrix
        return a * a + c * c == 1 and b * b + d * d == 1 and a * b + c * d == 0


class GroupAction:
    """A finite group of affine torus maps; the identity sits at index 0."""

    def __init__(self, elements: Iterable[AffineMap]):
        elems = list(elements)
        if not elems or not elems[0].is_identity():
            raise OrbifoldError("element 0 must be the identity")
        if len(set(elems)) != len(elems):
            raise OrbifoldError("duplicate group elements")
        for g in elems:
            if g.det() not in (1, -1):
                raise OrbifoldError("group matrices must be invertible over Z")
        index = {g: i for i, g in enumerate(elems)}
        for g in elems:
            if g.inverse() not in index:
                raise OrbifoldError("element set is not closed under inverse")
            for h in elems:
                if g.compose(h) not in index:
                    raise OrbifoldError("element set is not closed under composition")
        self.elements = elems
        self._index = index

    def __len__(self) -> int:
        return len(self.elements)

    def index_of(self, g: AffineMap) -> int:
        return self._index[g]

    def inverse_index(self, i: int) -> int:
        return self._index[self.elements[i].inverse()]


DEFAULT_BASEPOINT = (Fraction(1, 8), Fraction(1, 8))


@dataclass(frozen=True)
class OrbifoldPresentation:
    action: GroupAction
    name: str = "orbifold"
    basepoint: tuple[Fraction, Fraction] = DEFAULT_BASEPOINT

    def singular_points_on_grid(self, denominator: int = 24) -> list[TorusPoint]:
        """Exact grid scan for points with nontrivial isotropy (display aid).

        Fixed points of affine torus maps have coordinates with small
        denominators, so a modest grid finds them all for the shipped actions.
        """
        found = []
        for i in range(denominator):
            for j in range(denominator):
                p = TorusPoint(Fraction(i, denominator), Fraction(j, denominator))
                if isotropy_order(p, self) > 1:
                    found.append(p)
        return found


def torus_presentation() -> OrbifoldPresentation:
    return OrbifoldPresentation(GroupAction([AffineMap.identity()]), "torus")


def pillowcase_presentation() -> OrbifoldPresentation:
    """Quotient by the half-turn (theta, phi) -> (-theta, -phi)."""
    flip = AffineMap.of(((-1, 0), (0, -1)), (0, 0))
    return OrbifoldPresentation(GroupAction([AffineMap.identity(), flip]), "pillowcase")


def shifted_torus_presentation() -> OrbifoldPresentation:
    """Free Z2 quotient by the half shift (theta, phi) -> (theta + 1/2, phi)."""
    shift = AffineMap.of(((1, 0), (0, 1)), (Fraction(1, 2), 0))
    return OrbifoldPresentation(GroupAction([AffineMap.identity(), shift]), "shifted_torus")


BUILTIN_PRESENTATIONS = {
    "torus": torus_presentation,
    "pillowcase": pillowcase_presentation,
    "shifted_torus": shifted_torus_presentation,
}


# -- orbits and isotropy ------------------------------------------------------


def orbit(x: TorusPoint, presentation: OrbifoldPresentation) -> set[TorusPoint]:
    if not x.exact:
        raise OrbifoldError("orbit needs an exact point")
    return {g.apply(x) for g in presentation.action.elements}


def isotropy_order(x: TorusPoint, presentation: OrbifoldPresentation) -> int:
    if not x.exact:
        raise OrbifoldError("isotropy needs an exact point")
    return sum(1 for g in presentation.action.elements if g.apply(x) == x)


# -- paths through the quotient ----------------------------------------------

CoverPoint = tuple[Fraction, Fraction]


def _as_cover(p) -> CoverPoint:
    if isinstance(p, TorusPoint):
        return (Fraction(p.theta), Fraction(p.phi))
    return (Fraction(p[0]), Fraction(p[1]))


def _reduce(p: CoverPoint) -> TorusPoint:
    return TorusPoint(p[0], p[1])


@dataclass(frozen=True)
class GPath:
    """Alternating sequence of cover-lifted PL paths and group arrows.

    ``segments[k]`` is a waypoint list in the universal cover; ``arrows[k]``
    is the group element index carrying the end of segment k to the start of
    segment k+1.  Junction compatibility is exact and checked on creation.
    """

    presentation: OrbifoldPresentation
    segments: tuple[tuple[CoverPoint, ...], ...]
    arrows: tuple[int, ...]

    @staticmethod
    def of(presentation, segments: Sequence[Sequence], arrows: Sequence[int] = ()) -> "GPath":
        segs = tuple(tuple(_as_cover(p) for p in seg) for seg in segments)
        arrs = tuple(int(a) for a in arrows)
        if not segs or any(len(s) < 1 for s in segs):
            raise OrbifoldError("each segment needs at least one waypoint")
        if len(arrs) != len(segs) - 1:
            raise OrbifoldError("need exactly one arrow between consecutive segments")
        path = GPath(presentation, segs, arrs)
        for k, a in enumerate(arrs):
            g = presentation.action.elements[a]
            carried = g.apply(_reduce(segs[k][-1]))
            if carried != _reduce(segs[k + 1][0]):
                raise OrbifoldError(f"arrow {k} does not carry segment {k} onto segment {k + 1}")
        return path

    @property
    def start(self) -> TorusPoint:
        return _reduce(self.segments[0][0])

    @property
    def end(self) -> TorusPoint:
        return _reduce(self.segments[-1][-1])

    def is_loop(self) -> bool:
        return self.start == self.end

    def reverse(self) -> "GPath":
        action = self.presentation.action
        segs = tuple(tuple(reversed(s)) for s in reversed(self.segments))
        arrs = tuple(action.inverse_index(a) for a in reversed(self.arrows))
        return GPath(self.presentation, segs, arrs)


def concat(p: GPath, q: GPath) -> GPath:
    """Concatenate two composable paths, inserting the unit arrow in between."""
    if p.presentation is not q.presentation:
        raise OrbifoldError("paths live on different presentations")
    if p.end != q.start:
        raise OrbifoldError("endpoint of the first path does not meet the second")
    return GPath(p.presentation, p.segments + q.segments, p.arrows + (0,) + q.arrows)


@dataclass(frozen=True)
class Generator:
    gen_id: str
    loop: GPath
    arrow_index: int  # 0 for the two torus loops


def fundamental_generators(
    presentation: OrbifoldPresentation, basepoint: CoverPoint | None = None
) -> list[Generator]:
    """Loop generators: the two torus cycles plus one loop per group element.

    For each non-identity k the loop is a straight cover path from the
    basepoint to the nearest lift of k(basepoint), closed by the arrow k^-1.
    Together with the torus cycles these generate the quotient's fundamental
    group through the translation/deck short exact sequence.
    """
    if basepoint is None:
        basepoint = presentation.basepoint
    x0 = (_mod1(Fraction(basepoint[0])), _mod1(Fraction(basepoint[1])))
    if isotropy_order(TorusPoint(*x0), presentation) != 1:
        raise OrbifoldError("basepoint must have trivial isotropy")
    gens = [
        Generator("a", GPath.of(presentation, [[x0, (x0[0] + 1, x0[1])]]), 0),
        Generator("b", GPath.of(presentation, [[x0, (x0[0], x0[1] + 1)]]), 0),
    ]
    for i, g in enumerate(presentation.action.elements):
        if i == 0:
            continue
        target = g.apply(TorusPoint(*x0))
        lift = tuple(_nearest_lift(c, x) for c, x in zip((target.theta, target.phi), x0))
        loop = GPath.of(
            presentation,
            [[x0, lift], [x0]],
            [presentation.action.inverse_index(i)],
        )
        gens.append(Generator(f"k{i}", loop, i))
    return gens


def _nearest_lift(coord: Fraction, anchor: Fraction) -> Fraction:
    """Representative of coord mod 1 with coord - anchor in (-1/2, 1/2]."""
    d = _mod1(coord - anchor)
    if d > Fraction(1, 2):
        d -= 1
    return anchor + d
