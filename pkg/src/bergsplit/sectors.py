"""Recursive splitting of sector functions into half-plane components.

A sector with opening ``theta < pi`` is the intersection of the two half
planes bounded by its edges.  Each doubling step maps the current sector
onto the right-angle sector by a power map, splits there across the edge
half planes, and pulls the two parts back; the parts live on sectors whose
opening is twice the parent's.  After ``N`` uniform rounds — the smallest
``N`` with ``2^N theta > 2 pi`` — every leaf sector contains one of the two
edge half planes of the original, so regrouping the leaves gives the two
components.

Everything runs in normalized coordinates (vertex at the origin, lower edge
along the positive axis).  Angles are tracked unwrapped and clamped to
``[-pi, pi]``; a clamped child is the restriction of the pulled-back part
to the representable sector.  Once a node reaches an edge of that window,
one of its children coincides with the node itself, and the doubling
degenerates to a pass-through: the node function is that side of the split
and the other side is zero.  Pass-through steps cost nothing and add no
error.

Closed-form bookkeeping: transported half-plane kernels stay closed-form
through a doubling whenever the power map carries the node's sector onto the
kernel's half plane.  In that case the transported function is an exact
multiple of the quarter kernel and the step costs no quadrature.  Otherwise
the step extends, projects, and compresses like any other function.
"""

from __future__ import annotations

import cmath
import math
from collections import namedtuple
from dataclasses import dataclass, field

import numpy as np

from .approx import pole_expansion
from .domains import HalfPlane, Quarter, Sector, FIRST_QUADRANT, _offset, \
    _unit_dir, distance_to_region, wrap_angle
from .errors import BranchCutViolation, OpeningOutOfRange
from .evaluators import PoleSum, PolynomialScale, Sum, Transported, Weight
from .kernels import Kernel
from .maps import AffineMap, PowerMap
from .projection import as_kernel_multiple, split_quarter

TWO_PI = 2.0 * math.pi
_ANGLE_TOL = 1.0e-9

_ZERO = Sum([])

#: Angle frame of a sector that straddles the branch point and therefore
#: has no :class:`Sector` representation; ``b`` may exceed ``pi``.
SectorFrame = namedtuple("SectorFrame", ["vertex", "a", "b"])


def transport(g, map, p: float = 2.0) -> Transported:
    """Pull g back along a conformal map, preserving the p-norm.

    Returns the evaluator ``(g o map) * (map') ** (2/p)``; the map sends the
    new domain onto g's domain, and the norm of the result over the new
    domain equals the norm of ``g`` over the image.
    """
    return Transported(g, map, p)


def recursion_depth(theta: float) -> int:
    """Least N with 2^N * theta strictly above a full turn."""
    if not 0.0 < theta <= math.pi + _ANGLE_TOL:
        raise OpeningOutOfRange(
            f"sector splitting needs an opening in (0, pi], got {theta}"
        )
    n = 1
    while not 2.0 ** n * theta > TWO_PI:
        n += 1
    return n


def leaf_angles(theta: float, level: int, k: int):
    """Normalized angles of tree node k at the given level (clamped)."""
    return (max(-math.pi, -k * theta),
            min(math.pi, (2.0 ** level - k) * theta))


class TransportedKernel:
    """c * k_pole(chi(z)) * chi'(z) for a half-plane kernel and a power map.

    These are the closed-form node functions of the recursion; ``chi`` maps
    the node's sector into ``hplane``.
    """

    def __init__(self, coeff: complex, hplane: HalfPlane, pole: complex,
                 chi: PowerMap):
        self.coeff = complex(coeff)
        self.hplane = hplane
        self.pole = complex(pole)
        self.chi = chi
        self._kernel = Kernel(hplane, pole)
        self.decay = chi.transported_decay(2.0, 2.0)

    def __call__(self, z):
        z = np.asarray(z, dtype=complex)
        return self.coeff * self._kernel(self.chi.forward(z)) * self.chi.deriv(z)


@dataclass
class SectorNode:
    """One node of the doubling tree, in normalized coordinates.

    ``kind`` labels the node function: "kernel" for closed forms,
    "surrogate" for compressed projections, "zero" for the vanishing side
    of a pass-through, "function" for an opaque caller evaluator.
    ``approx`` marks lineages that have been through at least one
    projection step.
    """

    level: int
    index: int
    a: float
    b: float
    fn: object
    kind: str
    target: int = -1        # leaf assignment: 0 / 1, -1 for internal nodes
    approx: bool = False

    @property
    def opening(self) -> float:
        return self.b - self.a


@dataclass
class SectorDoubling:
    """Outcome of a single opening-doubling step."""

    original: object
    sector: object
    parts: tuple            # two evaluators on the widened sectors
    domains: tuple          # the widened sectors, original coordinates
    plan: list = field(default_factory=list)
    exact: bool = False

    def residual(self, z):
        z = np.asarray(z, dtype=complex)
        return self.parts[0](z) + self.parts[1](z) - self.original(z)


@dataclass
class SectorSplit:
    """Outcome of the recursive sector split."""

    original: object
    sector: object
    parts: tuple            # two evaluators on the edge half planes
    domains: tuple          # the edge half planes, original coordinates
    leaves: list
    depth: int
    plan: list = field(default_factory=list)
    exact: bool = False

    def residual(self, z):
        z = np.asarray(z, dtype=complex)
        return self.parts[0](z) + self.parts[1](z) - self.original(z)

    def group_sizes(self):
        return (sum(1 for lf in self.leaves if lf.target == 0),
                sum(1 for lf in self.leaves if lf.target == 1))


def _check_image(map, a: float, b: float, region, label: str):
    """Sample the sector (a, b) and verify the map lands inside ``region``."""
    ang = np.linspace(a, b, 9)[1:-1]
    rad = np.logspace(-2.0, 2.0, 7)
    z = np.exp(1j * ang)[:, None] * rad[None, :]
    w = map.forward(z).ravel()
    for h in region.halfplanes():
        bad = h.signed(w) < -1.0e-9 * (1.0 + np.abs(w))
        if np.any(bad):
            raise BranchCutViolation(
                f"{label}: mapped sample leaves the target region "
                f"(worst offset {float(np.min(h.signed(w))):.2e})"
            )


def _exact_quarter_form(node: SectorNode, psi: PowerMap):
    """Recognize node functions that transport to exact quarter kernels.

    Returns (coefficient, pole-in-quarter) or None.  Two shapes qualify: an
    explicit quarter-kernel multiple whose sector is the node itself, and a
    TransportedKernel whose map carries the node sector onto its half plane.
    """
    fn = node.fn
    km = as_kernel_multiple(fn)
    if km is not None and isinstance(km[1].domain, Quarter):
        q = km[1].domain
        if q.vertex == 0 and abs(wrap_angle(q.orientation - node.a)) < _ANGLE_TOL \
                and abs(node.opening - 0.5 * math.pi) < _ANGLE_TOL:
            c, k = km
            # psi is a pure rotation here; rotate pole and coefficient along
            u = _unit_dir(node.a)
            return c * u, k.pole * np.conj(u)
        return None
    if not isinstance(fn, TransportedKernel):
        return None
    chi = fn.chi
    beta = cmath.phase(complex(fn.chi.b_post))
    lo = chi.kappa * (node.a - chi.a_pre) + beta
    hi = chi.kappa * (node.b - chi.a_pre) + beta
    t = fn.hplane.theta
    onto = any(
        abs(lo - (t - 0.5 * math.pi) + TWO_PI * m) < _ANGLE_TOL
        and abs(hi - (t + 0.5 * math.pi) + TWO_PI * m) < _ANGLE_TOL
        for m in (-1, 0, 1)
    )
    if not onto or fn.hplane.c != 0.0:
        return None
    zeta = complex(chi.inverse().forward(fn.pole))
    nu = complex(psi.forward(zeta))
    d_phi = complex(chi.deriv(zeta)) / complex(psi.deriv(zeta))
    return fn.coeff / np.conj(d_phi), nu


def _double(node: SectorNode, *, rel_tol: float, surrogate_tol: float,
            seed: int, plan: list):
    """Split one node across the doubled sectors; returns the two children."""
    a, b, phi = node.a, node.b, node.opening
    up_spec = (node.index, a, min(math.pi, b + phi))
    dn_spec = (node.index + 2 ** node.level, max(-math.pi, a - phi), b)
    clamp_flags = (b + phi > math.pi + _ANGLE_TOL,
                   a - phi < -math.pi - _ANGLE_TOL)

    def record(rule, children):
        plan.append({
            "level": node.level,
            "index": node.index,
            "sector": [a, b],
            "rule": rule,
            "children": [{"index": c.index, "sector": [c.a, c.b],
                          "clamped": bool(flag), "kind": c.kind}
                         for c, flag in zip(children, clamp_flags)],
        })

    # pass-through: once the node sector touches an edge of the angle
    # window, the child on that side coincides with the node, so the node
    # function is that side of the split and the other side is zero
    if b >= math.pi - _ANGLE_TOL or a <= -math.pi + _ANGLE_TOL:
        keep = 0 if b >= math.pi - _ANGLE_TOL else 1
        kept_kind = node.kind if node.kind != "root" else "function"
        children = []
        for side, (k, ca, cb) in enumerate((up_spec, dn_spec)):
            if side == keep:
                children.append(SectorNode(node.level + 1, k, ca, cb,
                                           node.fn, kept_kind,
                                           approx=node.approx))
            else:
                children.append(SectorNode(node.level + 1, k, ca, cb,
                                           _ZERO, "zero"))
        record("restriction", children)
        return children

    kappa = 0.5 * math.pi / phi
    psi = PowerMap(a_pre=a, kappa=kappa, branch_center=0.5 * phi,
                   target=FIRST_QUADRANT)
    _check_image(psi, a, b, FIRST_QUADRANT, "forward doubling map")

    exact = _exact_quarter_form(node, psi)
    if exact is not None:
        coeff, nu = exact
        g = Sum([Kernel(FIRST_QUADRANT, nu)], [coeff])
    else:
        g = Transported(node.fn, psi.inverse())

    qsplit = split_quarter(g, FIRST_QUADRANT, compressed=exact is None,
                           rel_tol=rel_tol, surrogate_tol=surrogate_tol,
                           seed=seed)

    # parts[0] lives on the lower-edge half plane of the quarter, whose
    # pullback extends the parent upward; parts[1] extends it downward
    children = []
    for (k, ca, cb), part, hw in zip((up_spec, dn_spec), qsplit.parts,
                                     qsplit.domains):
        center = 0.5 * ((ca - a) + (cb - a))
        psi_side = PowerMap(a_pre=a, kappa=kappa, branch_center=center,
                            source=Sector(0.0, ca, cb), target=hw)
        _check_image(psi_side, ca, cb, hw, "pullback map")
        if qsplit.exact:
            cpart, kern = as_kernel_multiple(part)
            fn = TransportedKernel(cpart, kern.domain, kern.pole, psi_side)
            kind, approx = "kernel", node.approx
        else:
            fn = Transported(part, psi_side)
            kind, approx = "surrogate", True
        children.append(SectorNode(node.level + 1, k, ca, cb, fn, kind,
                                   approx=approx))
    record("kernel-additivity" if qsplit.exact else "extend-project",
           children)
    return children


def _sector_data(sector):
    if isinstance(sector, Quarter):
        return sector.vertex, wrap_angle(sector.orientation), 0.5 * math.pi
    if isinstance(sector, Sector):
        return sector.vertex, sector.a, sector.opening
    raise OpeningOutOfRange(
        f"expected a sector or quarter, got {type(sector).__name__}"
    )


def _pair_frame(h1: HalfPlane, h2: HalfPlane):
    """Vertex, lower-edge angle, opening, and order of a half-plane pair.

    The final flag says whether the caller's (h1, h2) order is (upper edge,
    lower edge), i.e. swapped relative to the canonical orientation.
    """
    if not isinstance(h1, HalfPlane) or not isinstance(h2, HalfPlane):
        raise OpeningOutOfRange(
            "expected two half planes bounding the sector"
        )
    t1, t2 = h1.theta, h2.theta
    d = wrap_angle(t2 - t1)
    s = math.sin(d)
    if abs(s) < 1.0e-12:
        raise OpeningOutOfRange(
            "the half-plane boundaries are parallel; their intersection is "
            "a strip or half plane, not a sector"
        )
    x = (h1.c * math.sin(t2) - h2.c * math.sin(t1)) / s
    y = (h2.c * math.cos(t1) - h1.c * math.cos(t2)) / s
    vertex = complex(x, y)
    if d > 0:
        return vertex, wrap_angle(t2 - 0.5 * math.pi), math.pi - d, True
    return vertex, wrap_angle(t1 - 0.5 * math.pi), math.pi + d, False


def _frame_sector(vertex, a0: float, theta: float):
    """Best domain record for a sector frame; SectorFrame when it straddles."""
    a_w = wrap_angle(a0)
    if a_w + theta <= math.pi + 1.0e-12:
        return Sector(vertex, a_w, min(math.pi, a_w + theta))
    return SectorFrame(vertex, a_w, a_w + theta)


def _kernel_root(f, vertex, a0: float, theta: float, rotate: bool):
    """Root evaluator for f = c * (quarter kernel at this frame), or None.

    With ``rotate`` the result lives in the fully normalized frame (vertex
    at the origin, lower edge on the positive axis); otherwise only the
    vertex is moved to the origin.
    """
    if abs(theta - 0.5 * math.pi) >= _ANGLE_TOL:
        return None
    km = as_kernel_multiple(f)
    if km is None or not isinstance(km[1].domain, Quarter):
        return None
    c, k = km
    q = k.domain
    if abs(complex(q.vertex) - complex(vertex)) > 1.0e-12 * (1.0 + abs(vertex)):
        return None
    if abs(wrap_angle(q.orientation - a0)) > _ANGLE_TOL:
        return None
    if rotate:
        u = _unit_dir(a0)
        return Sum([Kernel(Quarter(0.0, 0.0), np.conj(u) * (k.pole - vertex))],
                   [c * u])
    return Sum([Kernel(Quarter(0.0, q.orientation), k.pole - vertex)], [c])


def double_sector(f, sector, *, rel_tol: float = 1.0e-8,
                  surrogate_tol: float = 3.0e-7,
                  seed: int = 20260814) -> SectorDoubling:
    """Split f across the two sectors of doubled opening.

    For a sector with angles (a, b), the parts live on the widened sectors
    (a, min(pi, 2b - a)) and (max(-pi, 2a - b), b) at the same vertex.  When
    a widened child coincides with the sector itself — the opening already
    touches the angle window on that side — the split is the exact
    pass-through (f, 0) or (0, f).
    """
    vertex, a0, theta = _sector_data(sector)
    if a0 + theta > math.pi + _ANGLE_TOL:
        raise OpeningOutOfRange(
            "the sector straddles the negative axis, where the doubling "
            "clamps; rotate it into the (-pi, pi] window first"
        )
    root_fn = _kernel_root(f, vertex, a0, theta, rotate=False)
    if root_fn is None:
        root_fn = f if vertex == 0 else Transported(f, AffineMap(1.0, vertex))
    plan: list = []
    node = SectorNode(0, 0, a0, a0 + theta, root_fn, "root")
    kids = _double(node, rel_tol=rel_tol, surrogate_tol=surrogate_tol,
                   seed=seed, plan=plan)
    back = AffineMap(1.0, -vertex)
    parts = tuple(k.fn if vertex == 0 else Transported(k.fn, back)
                  for k in kids)
    domains = tuple(Sector(vertex, k.a, k.b) for k in kids)
    return SectorDoubling(
        original=f, sector=sector, parts=parts, domains=domains, plan=plan,
        exact=not any(k.approx for k in kids),
    )


def _rational_split(f, vertex: complex, a0: float, theta: float, domains):
    """Pole-assignment split for rational inputs, or None.

    Each pole of the expansion must stay clear of at least one of the two
    edge half planes; the pole then goes whole to the component living on a
    half plane it avoids.  Leftover simple-pole mass in the first bucket
    would decay too slowly for the half-plane square norm, so it is
    rebalanced through a canceling pair of simple poles at a point behind
    the vertex that both closed half planes avoid; the pair drops out of
    the reconstruction identically.
    """
    expansion = pole_expansion(f)
    if expansion is None:
        return None
    terms, const = expansion
    if const != 0:
        return None
    buckets = ([], [])
    for p, m, c in terms:
        margin = 1.0e-9 * (1.0 + abs(p) + abs(vertex))
        d0, d1 = (float(h.signed(p)) for h in domains)
        if d0 <= -margin and d1 <= -margin:
            buckets[0 if d0 <= d1 else 1].append((p, m, c))
        elif d0 <= -margin:
            buckets[0].append((p, m, c))
        elif d1 <= -margin:
            buckets[1].append((p, m, c))
        else:
            return None  # pole inside or hugging the sector: not splittable
    mass = sum(c for _, m, c in buckets[0] if m == 1)
    if mass != 0:
        rho = math.sqrt(2.0) * (1.0 + abs(vertex))
        q = vertex - rho * _unit_dir(a0 + 0.5 * theta)
        buckets[0].append((q, 1, -mass))
        buckets[1].append((q, 1, mass))
    note = {"rule": "rational-bucket",
            "poles": (len(buckets[0]), len(buckets[1])),
            "rebalanced": bool(mass != 0)}
    return (PoleSum(buckets[0]), PoleSum(buckets[1])), note


def split_sector(f, sector, upper=None, *, rel_tol: float = 1.0e-8,
                 surrogate_tol: float = 3.0e-7,
                 seed: int = 20260814, fast: bool = False) -> SectorSplit:
    """Split f on a sector (opening below pi) into edge half-plane parts.

    The sector is given either as a :class:`Sector`/:class:`Quarter`, or as
    the two half planes whose intersection it is — then the parts come back
    in the caller's order.  Returns a :class:`SectorSplit` with
    ``f = parts[0] + parts[1]`` on the sector and ``parts[i]`` in the
    square-norm space of ``domains[i]``.

    With ``fast=True``, an input whose pole expansion is available (a
    rational surrogate, possibly shifted and summed) is split exactly by
    assigning whole poles to components, skipping the doubling recursion;
    inputs that cannot be expanded fall through to the recursion.
    """
    if upper is not None:
        vertex, a0, theta, swapped = _pair_frame(sector, upper)
        caller_domains = (sector, upper)
    else:
        vertex, a0, theta = _sector_data(sector)
        swapped, caller_domains = False, None
    if not _ANGLE_TOL < theta < math.pi - _ANGLE_TOL:
        raise OpeningOutOfRange(
            f"splitting needs a sector opening in (0, pi), got {theta:.6g}; "
            "an opening of pi or more is a half plane or bigger"
        )

    # the two edge half planes in original coordinates
    t1 = wrap_angle(a0 + 0.5 * math.pi)
    t2 = wrap_angle(a0 + theta - 0.5 * math.pi)
    edge_domains = (HalfPlane(t1, _offset(t1, vertex)),
                    HalfPlane(t2, _offset(t2, vertex)))

    if fast:
        bucketed = _rational_split(f, complex(vertex), a0, theta,
                                   edge_domains)
        if bucketed is not None:
            parts, note = bucketed
            if swapped:
                parts = parts[::-1]
            return SectorSplit(
                original=f,
                sector=sector if caller_domains is None
                else _frame_sector(vertex, a0, theta),
                parts=parts,
                domains=caller_domains if caller_domains is not None
                else edge_domains,
                leaves=[],
                depth=0,
                plan=[note],
                exact=True,
            )

    depth = recursion_depth(theta)

    # normalize: zeta = exp(-i a0) (z - vertex), an isometric change of frame
    u = _unit_dir(a0)
    to_original = AffineMap(u, vertex)
    to_normal = to_original.inverse()
    root_fn = _kernel_root(f, vertex, a0, theta, rotate=True)
    if root_fn is None:
        root_fn = Transported(f, to_original)

    plan: list = []
    nodes = [SectorNode(0, 0, 0.0, theta, root_fn, "root")]
    for _ in range(depth):
        nxt = []
        for node in nodes:
            nxt.extend(_double(node, rel_tol=rel_tol,
                               surrogate_tol=surrogate_tol, seed=seed,
                               plan=plan))
        nodes = sorted(nxt, key=lambda nd: nd.index)

    group_cut = 2 ** (depth - 1)
    for leaf in nodes:
        leaf.target = 0 if leaf.index < group_cut else 1

    domains = edge_domains

    parts = []
    for target in (0, 1):
        terms = [leaf.fn for leaf in nodes if leaf.target == target]
        parts.append(Transported(Sum(terms, [1.0] * len(terms)), to_normal))
    parts = tuple(parts)

    if swapped:
        parts = parts[::-1]
        for leaf in nodes:
            leaf.target = 1 - leaf.target
    if caller_domains is not None:
        domains = caller_domains

    return SectorSplit(
        original=f,
        sector=sector if caller_domains is None
        else _frame_sector(vertex, a0, theta),
        parts=parts,
        domains=domains,
        leaves=nodes,
        depth=depth,
        plan=plan,
        exact=not any(leaf.approx for leaf in nodes),
    )


def shift_point(sector, upper=None) -> complex:
    """Deweighting shift z0 for a sector: a point on the anti-bisector ray.

    Sits at distance sqrt(2) * (1 + |vertex|) behind the vertex, so both the
    closed sector and the closures of its edge half planes keep a uniform
    distance from z0 (at least rho * sin(opening / 2) for the half planes).
    """
    if upper is not None:
        vertex, a0, theta, _ = _pair_frame(sector, upper)
    else:
        vertex, a0, theta = _sector_data(sector)
    rho = math.sqrt(2.0) * (1.0 + abs(complex(vertex)))
    return complex(vertex) - rho * _unit_dir(a0 + 0.5 * theta)


class _Wedge:
    """Minimal region shim for distance queries on a raw sector frame."""

    def __init__(self, planes):
        self._planes = list(planes)

    def halfplanes(self):
        return list(self._planes)


def split_sector_weighted(f, sector, upper=None, weight=None, *,
                          rel_tol: float = 1.0e-8,
                          surrogate_tol: float = 3.0e-7,
                          seed: int = 20260814,
                          fast: bool = False) -> SectorSplit:
    """Split f lying in the weighted space of the sector.

    ``weight`` is a :class:`Weight` or a plain integer N (meaning the
    standard weight of that order at p = 2).  On a sector, the weight
    (1 + |z|^(2p))^(-N) is comparable to |z - z0|^(-2pN) for any z0
    separated from the closed sector, so dividing by (z - z0)^(pN) moves f
    to the unweighted space, where the recursive split applies; multiplying
    back afterwards keeps the components in the weighted spaces of their
    half planes because z0 avoids those closures too (it sits on the
    anti-bisector ray, see :func:`shift_point`).
    """
    if weight is None and isinstance(upper, (int, Weight)):
        upper, weight = None, upper
    if weight is None:
        raise TypeError("split_sector_weighted needs a weight "
                        "(an integer order or a Weight)")
    if not isinstance(weight, Weight):
        weight = Weight(int(weight))
    m = weight.p * weight.N
    if abs(m - round(m)) > 1.0e-12:
        raise ValueError(
            f"weight exponent p*N = {m} must be an integer to shift by a "
            "polynomial factor"
        )
    m = int(round(m))
    if m == 0:
        return split_sector(f, sector, upper, rel_tol=rel_tol,
                            surrogate_tol=surrogate_tol, seed=seed,
                            fast=fast)

    if upper is not None:
        vertex, a0, theta, _ = _pair_frame(sector, upper)
    else:
        vertex, a0, theta = _sector_data(sector)
    z0 = shift_point(sector, upper)
    t1 = wrap_angle(a0 + 0.5 * math.pi)
    t2 = wrap_angle(a0 + theta - 0.5 * math.pi)
    wedge = _Wedge([HalfPlane(t1, _offset(t1, vertex)),
                    HalfPlane(t2, _offset(t2, vertex))])
    gap = float(distance_to_region(wedge, np.asarray([z0]))[0])
    assert gap > 0.0, f"shift point {z0:.6g} touches the closed sector"

    # divide by (z - z0)^m; collapse the factor against an input that is
    # itself a polynomial scale about the same point
    if isinstance(f, PolynomialScale) \
            and abs(f.z0 - z0) <= 1.0e-12 * (1.0 + abs(z0)):
        inner, k = f.inner, f.k - m
    else:
        inner, k = f, -m
    shifted = inner if k == 0 else PolynomialScale(inner, z0, k)

    split = split_sector(shifted, sector, upper, rel_tol=rel_tol,
                         surrogate_tol=surrogate_tol, seed=seed, fast=fast)
    split.parts = tuple(PolynomialScale(p, z0, m) for p in split.parts)
    split.original = f
    split.plan.append({
        "rule": "polynomial-shift",
        "detail": f"divide by (z - z0)^{m}, z0 = {z0:.6g}, split unweighted, "
                  "multiply back",
    })
    return split
