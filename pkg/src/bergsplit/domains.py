"""Planar domains used throughout the package.

Every domain is an open subset of the complex plane.  Six concrete kinds are
supported: disks, half planes, sectors, quarter planes, strips and bounded
convex polygons, plus a generic intersection of half planes that covers the
in-between shapes the splitting pipelines produce (half-strips, truncated
wedges and the like).

Conventions
-----------
* A half plane is ``{z : Re(exp(-i*theta) * z) > c}``; ``theta`` is the angle
  of the inward unit normal and ``c`` the offset of the boundary line.
* Sector angles live in ``(-pi, pi]`` with ``a < b``; the sector is
  ``{vertex + r*exp(i*phi) : r > 0, a < phi < b}``.
* Membership is always tested against the *open* set; boundary points are
  excluded.
* Distances between half-plane-described sets are computed on their closures.
"""

from __future__ import annotations

import cmath
import math
from dataclasses import dataclass
from typing import Callable, Iterable, Optional, Sequence

import numpy as np
import shapely

from .errors import EmptyRegion, NotConvex, UnsupportedGeometry

TWO_PI = 2.0 * math.pi

# Radius of the bounding box used when unbounded convex pieces are handed to
# shapely for distance queries.  Large enough that any realistically placed
# geometry attains its distance well inside the box, small enough that the
# box corners do not cost floating-point accuracy.
_BOX_RADIUS = 1.0e6

_ANGLE_TOL = 1.0e-12
_GEOM_TOL = 1.0e-9


def wrap_angle(x: float) -> float:
    """Reduce an angle to the interval (-pi, pi]."""
    if -math.pi < x <= math.pi:
        return x
    y = math.fmod(x + math.pi, TWO_PI)
    if y <= 0.0:
        y += TWO_PI
    return y - math.pi


def _unit_dir(theta: float) -> complex:
    """exp(i*theta) with components snapped to exact 0 / +-1.

    Half planes with axis-aligned normals are ubiquitous here (quadrants,
    squares, strips); without snapping, the ~1e-16 tilt of cos(pi/2) turns
    exactly-parallel boundary lines into lines that cross inside the clipping
    box, producing spurious slivers in set-difference computations.
    """
    c, s = math.cos(theta), math.sin(theta)
    if abs(c) < 1.0e-15:
        c = 0.0
    elif abs(c) > 1.0 - 1.0e-15:
        c = math.copysign(1.0, c)
    if abs(s) < 1.0e-15:
        s = 0.0
    elif abs(s) > 1.0 - 1.0e-15:
        s = math.copysign(1.0, s)
    return complex(c, s)


def _offset(theta: float, point: complex) -> float:
    """Boundary offset of the line through ``point`` with normal angle theta."""
    return (_unit_dir(theta).conjugate() * point).real


# ---------------------------------------------------------------------------
# domain kinds
# ---------------------------------------------------------------------------


@dataclass(frozen=True)
class HalfPlane:
    """Open half plane {z : Re(exp(-i*theta) z) > c}."""

    theta: float
    c: float = 0.0

    def signed(self, z):
        """Signed boundary coordinate; positive inside, zero on the line."""
        z = np.asarray(z, dtype=complex)
        return (np.conj(self.normal()) * z).real - self.c

    def contains(self, z):
        return self.signed(z) > 0.0

    def normal(self) -> complex:
        return _unit_dir(self.theta)

    def boundary_foot(self) -> complex:
        """The boundary point closest to the origin."""
        return self.normal() * self.c

    def closed_complement(self) -> "HalfPlane":
        """Half plane whose *closure* is the complement of this one."""
        return HalfPlane(wrap_angle(self.theta + math.pi), -self.c)

    def halfplanes(self):
        return (self,)

    def is_bounded(self) -> bool:
        return False


@dataclass(frozen=True)
class Disk:
    center: complex
    radius: float

    def __post_init__(self):
        if not self.radius > 0.0:
            raise ValueError("disk radius must be positive")

    def contains(self, z):
        z = np.asarray(z, dtype=complex)
        return np.abs(z - self.center) < self.radius

    def halfplanes(self):
        raise UnsupportedGeometry("a disk is not an intersection of half planes")

    def is_bounded(self) -> bool:
        return True


@dataclass(frozen=True)
class Sector:
    """Open sector with vertex ``vertex`` and angles a < b in (-pi, pi]."""

    vertex: complex
    a: float
    b: float

    def __post_init__(self):
        if not (-math.pi - _ANGLE_TOL <= self.a < self.b <= math.pi + _ANGLE_TOL):
            raise ValueError("sector angles must satisfy -pi <= a < b <= pi")

    @property
    def opening(self) -> float:
        return self.b - self.a

    def contains(self, z):
        z = np.asarray(z, dtype=complex)
        w = z - self.vertex
        ang = np.angle(w)
        return (ang > self.a) & (ang < self.b) & (w != 0)

    def halfplanes(self):
        if self.opening > math.pi + _ANGLE_TOL:
            raise UnsupportedGeometry(
                "sector opening exceeds pi; not an intersection of half planes"
            )
        return _sector_halfplanes(self.vertex, self.a, self.b)

    def is_bounded(self) -> bool:
        return False


@dataclass(frozen=True)
class Quarter:
    """Right-angle sector: vertex plus angles (orientation, orientation + pi/2)."""

    vertex: complex
    orientation: float = 0.0

    def contains(self, z):
        z = np.asarray(z, dtype=complex)
        w = z - self.vertex
        rel = np.mod(np.angle(w) - self.orientation, TWO_PI)
        return (rel > 0.0) & (rel < 0.5 * math.pi) & (w != 0)

    def halfplanes(self):
        return _sector_halfplanes(self.vertex, self.orientation,
                                  self.orientation + 0.5 * math.pi)

    def as_sector(self) -> Sector:
        a = wrap_angle(self.orientation)
        b = a + 0.5 * math.pi
        if b > math.pi + _ANGLE_TOL:
            raise UnsupportedGeometry("quarter straddles the angle cut")
        return Sector(self.vertex, a, min(b, math.pi))

    def is_bounded(self) -> bool:
        return False


@dataclass(frozen=True)
class Strip:
    """Open strip {z : c1 < Re(exp(-i*theta) z) < c2}."""

    theta: float
    c1: float
    c2: float

    def __post_init__(self):
        if not self.c1 < self.c2:
            raise ValueError("strip requires c1 < c2")

    def contains(self, z):
        z = np.asarray(z, dtype=complex)
        s = (np.conj(_unit_dir(self.theta)) * z).real
        return (s > self.c1) & (s < self.c2)

    def halfplanes(self):
        return (HalfPlane(self.theta, self.c1),
                HalfPlane(wrap_angle(self.theta + math.pi), -self.c2))

    def is_bounded(self) -> bool:
        return False


@dataclass(frozen=True)
class Polygon:
    """Bounded convex polygon, vertices in counterclockwise order."""

    vertices: tuple

    def __init__(self, vertices: Sequence[complex]):
        verts = tuple(complex(v) for v in vertices)
        if len(verts) < 3:
            raise NotConvex("polygon needs at least three vertices")
        n = len(verts)
        scale = max(abs(v) for v in verts) + 1.0
        for k in range(n):
            e1 = verts[(k + 1) % n] - verts[k]
            e2 = verts[(k + 2) % n] - verts[(k + 1) % n]
            cross = (e1.conjugate() * e2).imag
            if cross <= _GEOM_TOL * scale * scale:
                raise NotConvex(
                    "vertices must describe a strictly convex polygon in "
                    "counterclockwise order"
                )
        object.__setattr__(self, "vertices", verts)

    def contains(self, z):
        z = np.asarray(z, dtype=complex)
        inside = np.ones(z.shape, dtype=bool)
        for h in self.halfplanes():
            inside &= h.signed(z) > 0.0
        return inside

    def halfplanes(self):
        out = []
        n = len(self.vertices)
        for k in range(n):
            p, q = self.vertices[k], self.vertices[(k + 1) % n]
            d = (q - p) / abs(q - p)
            normal = 1j * d  # inward for counterclockwise order
            theta = wrap_angle(cmath.phase(normal))
            out.append(HalfPlane(theta, _offset(theta, p)))
        return tuple(out)

    def is_bounded(self) -> bool:
        return True


@dataclass(frozen=True)
class ConvexIntersection:
    """Intersection of finitely many open half planes."""

    planes: tuple

    def __init__(self, planes: Iterable[HalfPlane]):
        object.__setattr__(self, "planes", tuple(planes))
        if not self.planes:
            raise ValueError("need at least one half plane")

    def contains(self, z):
        z = np.asarray(z, dtype=complex)
        inside = np.ones(z.shape, dtype=bool)
        for h in self.planes:
            inside &= h.signed(z) > 0.0
        return inside

    def halfplanes(self):
        return self.planes

    def is_bounded(self) -> bool:
        return not recession_arcs(self.planes)


class PieceUnion:
    """Union of convex half-plane intersections.

    The splitting pipelines occasionally need a non-convex open set built
    from a few convex pieces (a polygon with an attached half-strip, say).
    Pieces may overlap; only membership, piecewise distances, boundedness
    and sampling are supported, never a single ``halfplanes()`` view.
    """

    def __init__(self, pieces):
        regions = []
        for p in pieces:
            if isinstance(p, (list, tuple)):
                regions.append(ConvexIntersection(p))
            else:
                regions.append(p)
        if not regions:
            raise ValueError("need at least one piece")
        self.regions = tuple(regions)
        self.pieces = tuple(tuple(r.halfplanes()) for r in regions)

    def contains(self, z):
        z = np.asarray(z, dtype=complex)
        inside = np.zeros(z.shape, dtype=bool)
        for r in self.regions:
            inside |= r.contains(z)
        return inside

    def is_bounded(self) -> bool:
        return all(not recession_arcs(p) for p in self.pieces)


Domain = (Disk, HalfPlane, Sector, Quarter, Strip, Polygon, ConvexIntersection)


@dataclass(frozen=True)
class DomainDifference:
    """Set difference ``left \\ right`` of two domains."""

    left: object
    right: object


def difference(a, b) -> DomainDifference:
    return DomainDifference(a, b)


def contains(domain, z):
    return domain.contains(z)


def _sector_halfplanes(vertex, a, b):
    t_lo = wrap_angle(a + 0.5 * math.pi)
    t_hi = wrap_angle(b - 0.5 * math.pi)
    return (HalfPlane(t_lo, _offset(t_lo, vertex)),
            HalfPlane(t_hi, _offset(t_hi, vertex)))


# canonical domains ---------------------------------------------------------

UPPER_HALF_PLANE = HalfPlane(0.5 * math.pi, 0.0)
RIGHT_HALF_PLANE = HalfPlane(0.0, 0.0)
FIRST_QUADRANT = Quarter(0.0, 0.0)
UNIT_DISK = Disk(0.0, 1.0)


# ---------------------------------------------------------------------------
# half-plane region analysis
# ---------------------------------------------------------------------------


def region_scale(planes: Sequence[HalfPlane]) -> float:
    s = 1.0
    for h in planes:
        s = max(s, abs(h.c))
    for v in region_vertices(planes):
        s = max(s, abs(v))
    return s


def region_vertices(planes: Sequence[HalfPlane]) -> np.ndarray:
    """Vertices of the closed intersection, enumerated from constraint pairs."""
    planes = list(planes)
    n = len(planes)
    pts = []
    for i in range(n):
        for j in range(i + 1, n):
            ni, nj = planes[i].normal(), planes[j].normal()
            det = (ni.conjugate() * nj).imag
            if abs(det) < 1.0e-12:
                continue
            # solve Re(conj(n) z) = c for both constraints
            ci, cj = planes[i].c, planes[j].c
            x = (ci * nj.imag - cj * ni.imag) / det
            y = (cj * ni.real - ci * nj.real) / det
            pts.append(complex(x, y))
    if not pts:
        return np.zeros(0, dtype=complex)
    pts = np.asarray(pts, dtype=complex)
    scale = 1.0 + float(np.max(np.abs(pts)))
    keep = []
    for p in pts:
        feas = True
        for h in planes:
            if h.signed(p) < -1.0e-9 * scale:
                feas = False
                break
        if not feas:
            continue
        if any(abs(p - q) <= 1.0e-9 * scale for q in keep):
            continue
        keep.append(p)
    if not keep:
        return np.zeros(0, dtype=complex)
    keep = np.asarray(keep, dtype=complex)
    center = keep.mean()
    order = np.argsort(np.angle(keep - center))
    return keep[order]


def _intersect_arc(arcs, lo2, hi2):
    out = []
    for lo1, hi1 in arcs:
        for shift in (-TWO_PI, 0.0, TWO_PI):
            lo = max(lo1, lo2 + shift)
            hi = min(hi1, hi2 + shift)
            if hi >= lo - 1.0e-13:
                out.append((lo, min(hi, lo + TWO_PI)))
    # merge overlaps
    out.sort()
    merged = []
    for lo, hi in out:
        if merged and lo <= merged[-1][1] + 1.0e-13:
            merged[-1] = (merged[-1][0], max(merged[-1][1], hi))
        else:
            merged.append((lo, hi))
    return merged


def recession_arcs(planes: Sequence[HalfPlane]):
    """Angular arcs of directions along which the region is unbounded.

    Returns a list of closed arcs ``(lo, hi)`` (possibly degenerate points)
    such that ``{r e^{i phi} : r > 0, phi in arc}`` stays inside the region
    translated to any of its points.  An empty list means the region is
    bounded.
    """
    arcs = [(-math.pi, math.pi)]
    for h in planes:
        arcs = _intersect_arc(arcs, h.theta - 0.5 * math.pi, h.theta + 0.5 * math.pi)
        if not arcs:
            return []
    # canonicalize into (-pi, pi] starts
    canon = []
    for lo, hi in arcs:
        width = hi - lo
        lo = wrap_angle(lo)
        canon.append((lo, lo + width))
    canon.sort()
    return canon


def region_interior_point(planes: Sequence[HalfPlane], min_depth: float = 0.0,
                          depth_cap: Optional[float] = None):
    """A point well inside the region (Chebyshev-style), or raise EmptyRegion.

    Among points attaining (nearly) the maximum inscribed depth, the one
    closest to the origin in the 1-norm is returned, so unbounded regions get
    a reproducible anchor at their "near end" instead of an arbitrary point
    far along a recession direction.  ``depth_cap`` trades clearance for
    closeness: a capped depth lets the anchor sit near the finite part of an
    unbounded region rather than deep along its recession cone.
    """
    from scipy.optimize import linprog

    planes = list(planes)
    scale = region_scale(planes)
    bound = 10.0 * scale + 10.0
    rows = []
    b_ub = []
    for h in planes:
        n = h.normal()
        rows.append([-n.real, -n.imag, 1.0])
        b_ub.append(-h.c)
    res = linprog(
        c=[0.0, 0.0, -1.0],
        A_ub=np.asarray(rows),
        b_ub=np.asarray(b_ub),
        bounds=[(-bound, bound), (-bound, bound), (0.0, bound)],
        method="highs",
    )
    if not res.success or res.x[2] <= max(min_depth, 1.0e-12 * scale):
        raise EmptyRegion("half-plane intersection has empty interior")
    depth = float(res.x[2])
    if depth_cap is not None:
        depth = min(depth, depth_cap)

    # second pass: keep 99% of the depth, pull toward the origin
    rows2 = []
    b2 = []
    for h in planes:
        n = h.normal()
        rows2.append([-n.real, -n.imag, 0.0, 0.0])
        b2.append(-h.c - 0.99 * depth)
    rows2 += [[1.0, 0.0, -1.0, 0.0], [-1.0, 0.0, -1.0, 0.0],
              [0.0, 1.0, 0.0, -1.0], [0.0, -1.0, 0.0, -1.0]]
    b2 += [0.0, 0.0, 0.0, 0.0]
    res2 = linprog(
        c=[0.0, 0.0, 1.0, 1.0],
        A_ub=np.asarray(rows2),
        b_ub=np.asarray(b2),
        bounds=[(-bound, bound), (-bound, bound), (0.0, bound), (0.0, bound)],
        method="highs",
    )
    if res2.success:
        return complex(res2.x[0], res2.x[1]), 0.99 * depth
    return complex(res.x[0], res.x[1]), depth


def clip_to_polygon(planes: Sequence[HalfPlane], box_radius: float = _BOX_RADIUS):
    """Sutherland-Hodgman clip of a large box against all half planes.

    Returns the vertex list (counterclockwise, possibly empty) of the closed
    region truncated to the box.
    """
    r = box_radius
    poly = [complex(-r, -r), complex(r, -r), complex(r, r), complex(-r, r)]
    for h in planes:
        if not poly:
            return []
        out = []
        n = len(poly)
        sgn = [float(h.signed(p)) for p in poly]
        for k in range(n):
            p, q = poly[k], poly[(k + 1) % n]
            sp, sq = sgn[k], sgn[(k + 1) % n]
            if sp >= 0.0:
                out.append(p)
                if sq < 0.0:
                    out.append(p + (q - p) * (sp / (sp - sq)))
            elif sq >= 0.0:
                out.append(p + (q - p) * (sp / (sp - sq)))
        poly = out
    return poly


def _shapely_polygon(planes: Sequence[HalfPlane], box_radius: float = _BOX_RADIUS):
    verts = clip_to_polygon(planes, box_radius)
    if len(verts) < 3:
        return None
    coords = [(v.real, v.imag) for v in verts]
    poly = shapely.Polygon(coords)
    # measure-zero slivers contribute nothing to a closure of an open set
    if poly.area <= 0.0:
        return None
    return poly


def _expr_pieces(expr):
    """Closed convex pieces (half-plane lists) covering a domain or difference."""
    if isinstance(expr, PieceUnion):
        return [list(p) for p in expr.pieces]
    if isinstance(expr, DomainDifference):
        base = list(expr.left.halfplanes())
        pieces = []
        for h in expr.right.halfplanes():
            piece = base + [h.closed_complement()]
            # keep only pieces with genuine interior; degenerate slivers do
            # not contribute to the closure of the (open) difference
            try:
                region_interior_point(piece, min_depth=1.0e-7 * region_scale(piece))
            except EmptyRegion:
                continue
            pieces.append(piece)
        return pieces
    if isinstance(expr, Disk):
        raise UnsupportedGeometry("set distances involving disks are not supported")
    return [list(expr.halfplanes())]


def set_distance(a, b) -> float:
    """Distance between the closures of two domains / domain differences.

    Both arguments may be any half-plane-representable domain or a
    :class:`DomainDifference` of such domains.  The computation reduces each
    set to convex pieces and takes the minimum pairwise piece distance.
    """
    pa = [p for p in (_shapely_polygon(hp) for hp in _expr_pieces(a)) if p is not None]
    pb = [p for p in (_shapely_polygon(hp) for hp in _expr_pieces(b)) if p is not None]
    if not pa or not pb:
        raise EmptyRegion("set_distance requires nonempty sets")
    best = math.inf
    for qa in pa:
        for qb in pb:
            d = qa.distance(qb)
            best = min(best, d)
            if best == 0.0:
                return 0.0
    return float(best)


def distance_to_region(expr, z):
    """Pointwise distance from z (array) to the closure of a domain/difference."""
    pieces = [p for p in (_shapely_polygon(hp) for hp in _expr_pieces(expr))
              if p is not None]
    z = np.asarray(z, dtype=complex)
    pts = shapely.points(z.real.ravel(), z.imag.ravel())
    if not pieces:
        raise EmptyRegion("distance_to_region requires a nonempty set")
    d = shapely.distance(pieces[0], pts)
    for piece in pieces[1:]:
        d = np.minimum(d, shapely.distance(piece, pts))
    return d.reshape(z.shape)


def support_value(planes: Sequence[HalfPlane], direction: complex) -> float:
    """sup of Re(conj(u) z) over the region; +inf when unbounded that way."""
    u = direction / abs(direction)
    psi = cmath.phase(u)
    for lo, hi in recession_arcs(planes):
        # max of cos(psi - t) over t in [lo, hi]
        t = min(max(psi, lo), hi)
        best = math.cos(psi - t)
        for shift in (-TWO_PI, TWO_PI):
            t = min(max(psi + shift, lo), hi)
            best = max(best, math.cos(psi + shift - t))
        if best > 1.0e-12:
            return math.inf
    verts = region_vertices(planes)
    cands = list(verts)
    if not cands:
        # vertex-free regions (half planes, strips): the boundary feet of the
        # active constraints are feasible and carry the supremum
        scale = region_scale(planes)
        for h in planes:
            foot = h.boundary_foot()
            if all(g.signed(foot) >= -1.0e-9 * scale for g in planes):
                cands.append(foot)
    if not cands:
        raise EmptyRegion("support_value needs a nonempty region")
    return max(((u.conjugate()) * v).real for v in cands)


def exterior_point(regions, margin: float = 1.0, n_dirs: int = 720):
    """A point at distance >= margin from every region in the list.

    Scans support values over a direction grid, picks the middle of the widest
    run of directions in which all regions are bounded, and steps out by
    ``margin``.  Raises :class:`NoExteriorPoint` when the union of the regions
    reaches out in every direction.
    """
    from .errors import NoExteriorPoint

    region_planes = [list(r) for r in regions]
    angles = np.linspace(-math.pi, math.pi, n_dirs, endpoint=False)
    sup = np.full(n_dirs, math.inf)
    for k, ang in enumerate(angles):
        u = cmath.exp(1j * ang)
        s = -math.inf
        for planes in region_planes:
            s = max(s, support_value(planes, u))
            if s == math.inf:
                break
        sup[k] = s
    finite = np.isfinite(sup)
    if not finite.any():
        raise NoExteriorPoint("the union is unbounded in every direction")
    # widest circular run of finite support directions
    ext = np.concatenate([finite, finite])
    best_len, best_start, run = 0, 0, 0
    for k in range(2 * n_dirs):
        if ext[k]:
            run = min(run + 1, n_dirs)
            start = k - run + 1
            if run > best_len and start < n_dirs:
                best_len, best_start = run, start
        else:
            run = 0
    mid = (best_start + best_len // 2) % n_dirs
    u = cmath.exp(1j * angles[mid])
    z0 = u * (sup[mid] + margin)
    return z0


def _circle_gaps(arcs):
    """Open angular gaps left uncovered by a set of closed arcs on the circle.

    Arcs are ``(lo, hi)`` with ``hi >= lo``; widths of ``2*pi`` or more cover
    everything.  Returns gaps as ``(lo, hi)`` pairs with ``hi > lo`` (one may
    wrap past ``pi``); the full circle comes back as a single ``2*pi`` gap.
    """
    ivs = []
    for lo, hi in arcs:
        width = hi - lo
        if width >= TWO_PI - 1.0e-12:
            return []
        start = lo % TWO_PI
        ivs.append((start, start + width))
    if not ivs:
        return [(-math.pi, math.pi)]
    ivs = sorted(ivs + [(lo + TWO_PI, hi + TWO_PI) for lo, hi in ivs])
    merged = [ivs[0]]
    for lo, hi in ivs[1:]:
        if lo <= merged[-1][1] + 1.0e-12:
            merged[-1] = (merged[-1][0], max(merged[-1][1], hi))
        else:
            merged.append((lo, hi))
    if merged[-1][1] - merged[0][0] >= 2.0 * TWO_PI - 1.0e-12 and len(merged) == 1:
        return []
    gaps = []
    seen = set()
    for (a1, b1), (a2, _) in zip(merged, merged[1:]):
        if a2 <= b1 + 1.0e-12:
            continue
        key = (round((b1 % TWO_PI) / 1.0e-9), round((a2 - b1) / 1.0e-9))
        if key in seen:
            continue
        seen.add(key)
        gaps.append((b1, a2))
    return gaps


def recession_gap_point(regions, margin: float = 1.0):
    """A point at distance >= margin from every region, found along a ray.

    Complements :func:`exterior_point`: when several unbounded regions fan
    out so that *every* direction has infinite support, a valid exterior
    point can still exist in a direction that is not a recession direction
    of any region — the distance to each region then grows linearly along
    that ray.  The widest such angular gap is probed with doubling radii.
    Raises :class:`NoExteriorPoint` when the recession cones jointly cover
    the whole circle.
    """
    from .errors import NoExteriorPoint

    region_planes = [list(r) for r in regions]
    arcs = []
    for planes in region_planes:
        arcs.extend(recession_arcs(planes))
    gaps = _circle_gaps(arcs)
    if not gaps:
        raise NoExteriorPoint(
            "the recession directions of the union cover every direction")
    lo, hi = max(gaps, key=lambda g: g[1] - g[0])
    u = cmath.exp(0.5j * (lo + hi))
    shims = [ConvexIntersection(planes) for planes in region_planes]
    r = margin + max(region_scale(planes) for planes in region_planes)
    for _ in range(60):
        z0 = r * u
        d = min(float(distance_to_region(s, np.asarray([z0]))[0])
                for s in shims)
        if d >= margin:
            return z0
        r *= 2.0
    raise NoExteriorPoint(
        "no exterior point found at finite radius along the recession gap")


def radial_profile(planes: Sequence[HalfPlane], center: complex):
    """Radial boundary function of a convex region seen from an inside point.

    Returns ``(rho, kinks)`` where ``rho(phi)`` gives the distance from
    ``center`` to the boundary along direction ``phi`` (``inf`` along
    recession directions) and ``kinks`` lists angles at which ``rho`` is not
    smooth.
    """
    planes = list(planes)
    thetas = np.array([h.theta for h in planes])
    depths = np.array([float(h.signed(center)) for h in planes])
    if np.any(depths < 0.0):
        raise ValueError("radial_profile requires a point inside the region")

    def rho(phi):
        phi = np.asarray(phi, dtype=float)
        cosv = np.cos(phi[..., None] - thetas[None, :])
        with np.errstate(divide="ignore", invalid="ignore"):
            r = np.where(cosv < -1.0e-14, depths[None, :] / (-cosv), np.inf)
        return np.min(r, axis=-1)

    kinks = [float(np.angle(v - center)) for v in region_vertices(planes)]
    for lo, hi in recession_arcs(planes):
        kinks.extend([wrap_angle(lo), wrap_angle(hi)])
    return rho, sorted(set(kinks))


# ---------------------------------------------------------------------------
# JSON (de)serialization
# ---------------------------------------------------------------------------


def _c2pair(z: complex):
    return [float(np.real(z)), float(np.imag(z))]


def _pair2c(p) -> complex:
    return complex(float(p[0]), float(p[1]))


def domain_to_dict(d):
    if isinstance(d, Disk):
        return {"kind": "disk", "center": _c2pair(d.center), "radius": d.radius}
    if isinstance(d, HalfPlane):
        return {"kind": "half-plane", "theta": d.theta, "offset": d.c}
    if isinstance(d, Sector):
        return {"kind": "sector", "vertex": _c2pair(d.vertex), "a": d.a, "b": d.b}
    if isinstance(d, Quarter):
        return {"kind": "quarter", "vertex": _c2pair(d.vertex),
                "orientation": d.orientation}
    if isinstance(d, Strip):
        return {"kind": "strip", "theta": d.theta, "c1": d.c1, "c2": d.c2}
    if isinstance(d, Polygon):
        return {"kind": "polygon", "vertices": [_c2pair(v) for v in d.vertices]}
    if isinstance(d, ConvexIntersection):
        return {"kind": "intersection",
                "halfplanes": [{"theta": h.theta, "offset": h.c} for h in d.planes]}
    raise UnsupportedGeometry(f"cannot serialize {type(d).__name__}")


def domain_from_dict(obj):
    kind = obj.get("kind")
    if kind == "disk":
        return Disk(_pair2c(obj["center"]), float(obj["radius"]))
    if kind == "half-plane":
        return HalfPlane(float(obj["theta"]), float(obj.get("offset", 0.0)))
    if kind == "sector":
        return Sector(_pair2c(obj["vertex"]), float(obj["a"]), float(obj["b"]))
    if kind == "quarter":
        return Quarter(_pair2c(obj["vertex"]), float(obj.get("orientation", 0.0)))
    if kind == "strip":
        return Strip(float(obj["theta"]), float(obj["c1"]), float(obj["c2"]))
    if kind == "polygon":
        return Polygon([_pair2c(v) for v in obj["vertices"]])
    if kind == "intersection":
        return ConvexIntersection(
            HalfPlane(float(h["theta"]), float(h.get("offset", 0.0)))
            for h in obj["halfplanes"]
        )
    raise UnsupportedGeometry(f"unknown domain kind {kind!r}")
