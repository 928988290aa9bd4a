"""Leaf classification, the compact/noncompact decomposition, and a tracer.

The linear layer is decided exactly: leaves of a*dtheta + b*dphi close up
iff (a, b) is Q-dependent, and the leaf space of a compact layer is a circle
whose total transverse measure is computed in the symbolic field.  The
numeric tracer integrates the kernel direction field and serves as an
independent oracle for the exact classifier (and draws pictures).
"""

from __future__ import annotations

from dataclasses import dataclass
from math import lcm
from typing import Optional

from . import scalar as sc
from .forms import (
    ClosedForm,
    SurgeredForm,
    FormError,
    PatchedFormError,
    bump_gradient,
    bump_potential,
    invariant_subgroup,
    zeros as form_layer_zeros,
)
from .orbifold import OrbifoldPresentation, TorusPoint


class LeafError(ValueError):
    pass


COMPACT_REGULAR = "CompactRegular"
NONCOMPACT_REGULAR = "NoncompactRegular"
COMPACT_SINGULAR = "CompactSingular"
NONCOMPACT_SINGULAR = "NoncompactSingular"


@dataclass(frozen=True)
class LeafClass:
    leaf_id: str
    kind: str
    zeros: tuple[str, ...] = ()
    components: tuple[tuple[str, bool], ...] = ()  # (component id, compact?)
    representative: object = None  # TorusPoint or a patch locus string
    family: Optional[str] = None  # graph edge / special vertex the class maps to
    component_ref: Optional[str] = None  # hosting noncompact component, if any

    def __post_init__(self):
        singular = self.kind in (COMPACT_SINGULAR, NONCOMPACT_SINGULAR)
        if singular != bool(self.zeros):
            raise LeafError("a leaf is singular exactly when it carries zeros")

    @property
    def compact(self) -> bool:
        return self.kind in (COMPACT_REGULAR, COMPACT_SINGULAR)


@dataclass(frozen=True)
class Decomposition:
    x_c: frozenset[str]
    x_inf_components: tuple[tuple[str, frozenset[str]], ...]
    boundary: tuple[tuple[str, str], ...]  # (leaf id, compact component id)
    restricted_ranks: tuple[tuple[str, Optional[int]], ...]
    flags: tuple[str, ...] = ()

    @property
    def x_inf_empty(self) -> bool:
        return not self.x_inf_components


# -- the linear layer -----------------------------------------------------------


@dataclass(frozen=True)
class LinearStructure:
    """Exact shape of the foliation of a zero-free linear (+ bump) form."""

    rank: int
    compact: bool
    direction: Optional[tuple[int, int]]  # primitive leaf direction on the cover
    content: Optional[sc.SymScalar]  # positive transverse period of the cover circle
    quotient_order: int  # collapsing of the leaf circle by the invariant subgroup
    circumference: Optional[sc.SymScalar]  # content / quotient_order
    invariant_elements: tuple[int, ...]
    reduced: bool  # some group elements do not preserve the form


def linear_structure(form: ClosedForm) -> LinearStructure:
    form_layer_zeros(form)  # enforces the nondominance regime
    a, b = form.linear
    if a.is_zero() and b.is_zero():
        raise FormError("the zero form has no foliation")
    keep = tuple(invariant_subgroup(form))
    reduced = len(keep) < len(form.orbifold.action.elements)
    rank = sc.q_rank([a, b])
    if rank >= 2:
        return LinearStructure(rank, False, None, None, 1, None, keep, reduced)
    content, (m, n) = _content_and_multipliers(a, b)
    if sc.sign(content) < 0:
        content, (m, n) = -content, (-m, -n)
    order = _leaf_circle_quotient_order(form, keep, m, n)
    return LinearStructure(
        rank=1,
        compact=True,
        direction=(n, -m),
        content=content,
        quotient_order=order,
        circumference=content / order,
        invariant_elements=keep,
        reduced=reduced,
    )


def _content_and_multipliers(a: sc.SymScalar, b: sc.SymScalar):
    """Write (a, b) = (m*t, n*t) with m, n coprime integers and t symbolic."""
    if a.is_zero():
        return b, (0, 1)
    if b.is_zero():
        return a, (1, 0)
    r = b.ratio_to(a)
    if r is None:
        raise LeafError("coefficients are Q-independent; no rational direction")
    return a / r.denominator, (r.denominator, r.numerator)


def _leaf_circle_quotient_order(form: ClosedForm, keep, m: int, n: int) -> int:
    """Order of the rotation subgroup the invariant elements induce on the
    leaf circle.  Linear parts contribute nothing (their pullback fixes the
    level functional), so only the translation offsets matter."""
    order = 1
    for i in keep:
        g = form.orbifold.action.elements[i]
        shift = m * g.offset[0] + n * g.offset[1]
        frac = shift - (shift.numerator // shift.denominator)
        order = lcm(order, frac.denominator)
    return order


def classify_leaf(form: ClosedForm, presentation: OrbifoldPresentation, x: TorusPoint) -> LeafClass:
    """Classify the leaf through a point of a zero-free (virgin) form."""
    if isinstance(form, SurgeredForm):
        raise PatchedFormError("points inside surgered models are classified per region")
    structure = linear_structure(form)
    kind = COMPACT_REGULAR if structure.compact else NONCOMPACT_REGULAR
    return LeafClass(
        leaf_id=f"leaf({x.theta},{x.phi})",
        kind=kind,
        representative=x,
        family="e0" if structure.compact else "s0",
    )


def singular_components(leaf: LeafClass) -> list[tuple[str, bool]]:
    if leaf.kind not in (COMPACT_SINGULAR, NONCOMPACT_SINGULAR):
        raise LeafError("regular leaves have no singular components")
    return list(leaf.components)


# -- decomposition ---------------------------------------------------------------


def decompose(model) -> Decomposition:
    """Split the catalog into the compact region, the noncompact components
    and their common boundary, checking the structural invariants."""
    catalog = model.catalog
    if not catalog:
        raise LeafError("leaf catalog is incomplete")
    ids = [leaf.leaf_id for leaf in catalog]
    if len(set(ids)) != len(ids):
        raise LeafError("duplicate leaf ids in catalog")

    x_c = frozenset(l.leaf_id for l in catalog if l.compact)
    comp_sets: dict[str, set[str]] = {cid: set() for cid in model.x_inf_gens}
    for leaf in catalog:
        if leaf.compact:
            continue
        if leaf.component_ref not in comp_sets:
            raise LeafError(f"leaf {leaf.leaf_id} references unknown component {leaf.component_ref}")
        comp_sets[leaf.component_ref].add(leaf.leaf_id)

    boundary = tuple(
        (leaf.leaf_id, comp_id)
        for leaf in catalog
        if leaf.kind == NONCOMPACT_SINGULAR
        for comp_id, compact in leaf.components
        if compact
    )

    flags = []
    ranks = []
    for cid in sorted(comp_sets):
        gens = model.x_inf_gens[cid]
        if not gens:
            flags.append(f"component {cid}: no generator loops survive; rank unavailable")
            ranks.append((cid, None))
            continue
        rank = sc.q_rank([p for _, p in gens])
        ranks.append((cid, rank))
        if rank <= 1:
            flags.append(f"component {cid}: restricted rank {rank} is not > 1")

    covered = set(x_c)
    for s in comp_sets.values():
        if covered & s:
            raise LeafError("compact region and noncompact components overlap")
        covered |= s
    if covered != set(ids):
        raise LeafError("decomposition does not cover the leaf catalog")

    return Decomposition(
        x_c=x_c,
        x_inf_components=tuple((cid, frozenset(comp_sets[cid])) for cid in sorted(comp_sets)),
        boundary=boundary,
        restricted_ranks=tuple(ranks),
        flags=tuple(flags),
    )


# -- local quadratic models -------------------------------------------------------


def count_local_components(n: int, lam: int, group: str = "trivial") -> tuple[int, int, int]:
    """Component counts of the model level sets sum(y_i^2) - sum(y_j^2) = t
    (negative block last, size lam) for t < 0, t = 0, t > 0.

    A level set is a sphere-bundle product: S^(lam-1) x R^(n-lam) below zero
    and S^(n-lam-1) x R^lam above, so the count is 2 when the sphere factor
    is S^0, 0 when it is empty, else 1.  The reflection group folds the two
    sheets together exactly when the S^0 coordinate is the reflected one.
    """
    if not (0 <= lam <= n <= 4):
        raise LeafError("need 0 <= lam <= n <= 4")
    if group not in ("trivial", "z2_reflect_last"):
        raise LeafError(f"unknown group {group!r}")

    def sphere_count(dim: int) -> int:
        if dim < 0:
            return 0
        return 2 if dim == 0 else 1

    below = sphere_count(lam - 1)
    above = sphere_count(n - lam - 1)
    at = 1  # the cone through the origin is connected (a point when definite)
    if group == "z2_reflect_last":
        # the reflected coordinate is y_n: in the negative block iff lam >= 1
        if below == 2 and lam == 1:
            below = 1
        if above == 2 and lam == 0 and n - lam == 1:
            above = 1
    return below, at, above


# -- numeric leaf tracing ----------------------------------------------------------


@dataclass(frozen=True)
class TraceResult:
    verdict: str  # Closed | DenseEvidence | Inconclusive
    return_error: Optional[float] = None
    period_length: Optional[float] = None
    coverage: Optional[float] = None
    steps: int = 0
    reason: str = ""
    polyline: Optional[list] = None

    def __post_init__(self):
        if self.verdict == "Closed" and self.period_length is None:
            raise LeafError("closed traces must report a period length")


def trace_leaf(
    form: ClosedForm,
    presentation: OrbifoldPresentation,
    seed: TorusPoint,
    step: float = 0.01,
    max_steps: int = 1_000_000,
    return_tol: float = 1e-9,
    grid_eps: float = 0.05,
    coverage_threshold: float = 0.99,
    drift_tol: float = 1e-6,
    collect_polyline: bool = False,
) -> TraceResult:
    """Integrate the unit-speed kernel field from the seed on the cover.

    Fourth-order fixed-step integration; boundary crossings wrap mod 1 and
    closure is tested against every form-preserving translate of the seed.
    Verdicts: Closed when the trace returns within tolerance with matching
    direction, DenseEvidence when grid coverage passes the threshold,
    Inconclusive otherwise (including field-degeneracy and drift aborts).
    """
    if isinstance(form, SurgeredForm):
        raise PatchedFormError("surgered models are combinatorial; nothing to trace")
    a_num, b_num = float(form.linear[0]), float(form.linear[1])

    def field(x: float, y: float):
        wx = a_num + 0.0
        wy = b_num + 0.0
        if form.bumps:
            gx, gy = bump_gradient(form, x % 1.0, y % 1.0)
            wx += gx
            wy += gy
        norm = (wx * wx + wy * wy) ** 0.5
        if norm < 1e-8:
            return None
        return wy / norm, -wx / norm

    def rk4(px: float, py: float, h: float):
        k1 = field(px, py)
        if k1 is None:
            return None
        k2 = field(px + 0.5 * h * k1[0], py + 0.5 * h * k1[1])
        if k2 is None:
            return None
        k3 = field(px + 0.5 * h * k2[0], py + 0.5 * h * k2[1])
        if k3 is None:
            return None
        k4 = field(px + h * k3[0], py + h * k3[1])
        if k4 is None:
            return None
        return (
            px + h / 6.0 * (k1[0] + 2 * k2[0] + 2 * k3[0] + k4[0]),
            py + h / 6.0 * (k1[1] + 2 * k2[1] + 2 * k3[1] + k4[1]),
        )

    def level(px: float, py: float) -> float:
        value = a_num * px + b_num * py
        if form.bumps:
            value += _bump_potential_numeric(form, px % 1.0, py % 1.0)
        return value

    sx, sy = float(seed.theta), float(seed.phi)
    v0 = field(sx, sy)
    if v0 is None:
        return TraceResult("Inconclusive", reason="field degenerate at seed", steps=0)

    targets = _closure_targets(form, presentation, sx, sy, v0)
    ncells = max(2, round(1.0 / grid_eps))
    visited = [[False] * ncells for _ in range(ncells)]
    visited[int(sx * ncells) % ncells][int(sy * ncells) % ncells] = True
    marked = 1
    total_cells = ncells * ncells

    polyline = [(sx % 1.0, sy % 1.0)] if collect_polyline else None
    stride = 1  # doubled with thinning whenever the polyline outgrows its cap
    px, py = sx, sy
    level0 = level(px, py)
    arc = 0.0
    capture = 1.5 * step

    for n in range(1, max_steps + 1):
        nxt = rk4(px, py, step)
        if nxt is None:
            return TraceResult("Inconclusive", reason="field degenerate along trace", steps=n)
        px, py = nxt
        arc += step
        if collect_polyline and n % stride == 0:
            polyline.append((px % 1.0, py % 1.0))
            if len(polyline) > 200_000:
                del polyline[::2]
                stride *= 2
        cx, cy = int((px % 1.0) * ncells) % ncells, int((py % 1.0) * ncells) % ncells
        if not visited[cx][cy]:
            visited[cx][cy] = True
            marked += 1

        if arc > 3.0 * step:
            hit = _try_close(field, rk4, px, py, targets, capture, return_tol)
            if hit is not None:
                err, extra = hit
                if abs(level(px, py) - level0) > drift_tol:
                    return TraceResult(
                        "Inconclusive", reason="level drift exceeds tolerance", steps=n
                    )
                return TraceResult(
                    "Closed",
                    return_error=err,
                    period_length=arc + extra,
                    steps=n,
                    polyline=polyline,
                )

        if n % 1024 == 0:
            if abs(level(px, py) - level0) > drift_tol:
                return TraceResult("Inconclusive", reason="level drift exceeds tolerance", steps=n)
            if marked / total_cells >= coverage_threshold:
                return TraceResult(
                    "DenseEvidence",
                    coverage=marked / total_cells,
                    steps=n,
                    polyline=polyline,
                )

    if marked / total_cells >= coverage_threshold:
        return TraceResult(
            "DenseEvidence", coverage=marked / total_cells, steps=max_steps, polyline=polyline
        )
    return TraceResult(
        "Inconclusive",
        reason="step budget exhausted",
        coverage=marked / total_cells,
        steps=max_steps,
        polyline=polyline,
    )


def _bump_potential_numeric(form: ClosedForm, x: float, y: float) -> float:
    from .orbifold import orbit as _orbit

    total = 0.0
    for term in form.bumps:
        for copy in _orbit(term.center, form.orbifold):
            dx = (x - float(copy.theta) + 0.5) % 1.0 - 0.5
            dy = (y - float(copy.phi) + 0.5) % 1.0 - 0.5
            s = (dx * dx + dy * dy) / float(term.radius) ** 2
            if s < 1.0:
                total += float(term.amplitude) * (1.0 - s) ** 4
    return total


def _closure_targets(form, presentation, sx, sy, v0):
    """Seed translates under the form-preserving subgroup, with the pushed
    leaf direction at each; returning to any of them closes the quotient leaf."""
    targets = []
    for i in invariant_subgroup(form):
        g = presentation.action.elements[i]
        (m00, m01), (m10, m11) = g.matrix
        tx = (m00 * sx + m01 * sy + float(g.offset[0])) % 1.0
        ty = (m10 * sx + m11 * sy + float(g.offset[1])) % 1.0
        tv = (m00 * v0[0] + m01 * v0[1], m10 * v0[0] + m11 * v0[1])
        targets.append((tx, ty, tv))
    return targets


def _try_close(field, rk4, px, py, targets, capture, return_tol):
    wx, wy = px % 1.0, py % 1.0
    v = field(px, py)
    if v is None:
        return None
    for tx, ty, tv in targets:
        dx = (wx - tx + 0.5) % 1.0 - 0.5
        dy = (wy - ty + 0.5) % 1.0 - 0.5
        if dx * dx + dy * dy > capture * capture:
            continue
        if abs(v[0] * tv[0] + v[1] * tv[1]) < 0.9:
            continue
        # slide along the flow to the closest approach (locally linear)
        s = -(dx * v[0] + dy * v[1])
        qx, qy = (px, py) if abs(s) < 1e-300 else rk4(px, py, s) or (px, py)
        rx = (qx % 1.0 - tx + 0.5) % 1.0 - 0.5
        ry = (qy % 1.0 - ty + 0.5) % 1.0 - 0.5
        err = (rx * rx + ry * ry) ** 0.5
        if err < return_tol:
            return err, s
    return None
