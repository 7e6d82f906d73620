"""Cutoff blending and the planar Cauchy transform.

Splitting a function across two overlapping domains runs through the
classical correction scheme: blend the function with a smooth cutoff, then
repair the holomorphy defect of each blend by a Cauchy transform of the
shared dbar density.  The blend step is exact algebra; all the analysis
lives in the transform, which is evaluated by adaptive quadrature with
charts anchored at the evaluation point so the polar Jacobian absorbs the
Cauchy singularity.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field

import numpy as np

from . import domains as dom
from .errors import NoExteriorPoint, NotSeparated
from .evaluators import Lambda, Sum, PolynomialScale, decay_of
from .quadrature import integrate

# max of (d/dt) smoothstep on [0,1]; attained at t = 1/2
SMOOTHSTEP_SLOPE = 1.875


def smoothstep(t):
    """Quintic ramp 6t^5 - 15t^4 + 10t^3, clamped to [0, 1] outside."""
    t = np.clip(np.asarray(t, dtype=float), 0.0, 1.0)
    return t * t * t * (t * (6.0 * t - 15.0) + 10.0)


class Cutoff:
    """Smooth indicator-like function for an overlapping pair of domains.

    ``chi = smoothstep(d2 / (d1 + d2))`` where ``d_i(z)`` is the distance
    from ``z`` to the closure of ``omega_i`` minus the other domain.  Then
    ``chi = 0`` on ``omega2 \\ omega1`` and ``chi = 1`` on ``omega1 \\
    omega2``, and the whole transition happens across the overlap.  Since
    distances are 1-Lipschitz, ``|grad chi| <= 1.875 / delta`` with
    ``delta`` the distance between the two difference sets; the bound is
    recorded as :attr:`grad_bound`.  A pair whose differences touch
    (``delta = 0``) is rejected.
    """

    def __init__(self, omega1, omega2):
        self.omega1 = omega1
        self.omega2 = omega2
        self._init_sets(dom.difference(omega1, omega2),
                        dom.difference(omega2, omega1))

    @classmethod
    def from_sets(cls, set1, set2):
        """Cutoff built directly from the two difference sets.

        Callers whose domains are unions or other non-convex shapes can
        hand over the difference sets themselves; anything accepted by the
        distance helpers works.  ``chi = 1`` near ``set1``.
        """
        chi = cls.__new__(cls)
        chi.omega1 = chi.omega2 = None
        chi._init_sets(set1, set2)
        return chi

    def _init_sets(self, set1, set2):
        self._set1 = set1
        self._set2 = set2
        delta = dom.set_distance(set1, set2)
        if delta <= 0.0:
            raise NotSeparated(
                "the domain differences touch; no smooth cutoff with a "
                "finite gradient bound exists"
            )
        self.delta = float(delta)
        self.grad_bound = SMOOTHSTEP_SLOPE / self.delta

    def __call__(self, z):
        z = np.asarray(z, dtype=complex)
        d1 = dom.distance_to_region(self._set1, z)
        d2 = dom.distance_to_region(self._set2, z)
        return smoothstep(d2 / (d1 + d2))

    def dbar(self, z, step: float = 1.0e-6):
        """(d/dx + i d/dy)/2 of the cutoff by central differences."""
        z = np.asarray(z, dtype=complex)
        cx = (self(z + step) - self(z - step)) / (2.0 * step)
        cy = (self(z + 1j * step) - self(z - 1j * step)) / (2.0 * step)
        return 0.5 * (cx + 1j * cy)

    def grad_norm(self, z, step: float = 1.0e-6):
        # chi is real-valued, so |grad chi| = 2 |dbar chi|
        return 2.0 * np.abs(self.dbar(z, step))


class CauchyTransform:
    """u(z) = (1/pi) * area integral of density(s) / (z - s) over a region.

    With this sign convention ``dbar u = density`` pointwise wherever the
    density is continuous (``dbar (1/(pi z))`` is the Dirac delta), so the
    transform repairs a dbar defect equal to the density.  Evaluation at a
    point inside the region anchors the quadrature charts there, letting
    the polar Jacobian cancel the singularity of the Cauchy factor.
    Computed values are cached; the transform is typically re-evaluated at
    the same points by finite-difference checks and residual grids.
    """

    def __init__(self, density, region, *, rel_tol: float = 1.0e-6,
                 abs_tol: float = 1.0e-10, max_cells: int = 20000,
                 r_cap: float | None = None):
        self.density = density
        self.region = region
        self.rel_tol = float(rel_tol)
        self.abs_tol = float(abs_tol)
        self.max_cells = int(max_cells)
        # a union support (pairwise disjoint pieces) is integrated piecewise
        if isinstance(region, dom.PieceUnion):
            self.regions = tuple(region.regions)
        elif isinstance(region, (list, tuple)):
            self.regions = tuple(region)
        else:
            self.regions = (region,)
        self._geoms = []
        scales = []
        for r in self.regions:
            if isinstance(r, dom.Disk):
                planes = None
                scales.append(abs(r.center) + r.radius)
            else:
                planes = list(r.halfplanes())
                scales.append(dom.region_scale(planes))
            self._geoms.append(planes)
        self._scale = max(scales)
        bounded = all(r.is_bounded() for r in self.regions)
        if r_cap is None:
            # pure geometry for bounded supports; a generous but finite cap
            # otherwise (densities met here decay fast up their strips)
            r_cap = math.inf if bounded else 60.0 * self._scale
        self.r_cap = float(r_cap)
        self.decay = 1.0  # |u| ~ mass / (pi |z|) in the far field
        self._cache = {}

    def __call__(self, z):
        z = np.asarray(z, dtype=complex)
        flat = z.ravel()
        out = np.empty(flat.shape, dtype=complex)
        for k, zk in enumerate(flat):
            out[k] = self._at(complex(zk))
        return out.reshape(z.shape)

    def _at(self, z: complex) -> complex:
        hit = self._cache.get(z)
        if hit is not None:
            return hit
        density = self.density

        def integrand(s):
            return density(s) / (z - s)

        total = 0.0 + 0.0j
        for region, planes in zip(self.regions, self._geoms):
            if planes is None:
                depth = region.radius - abs(z - region.center)
            else:
                depth = min(float(h.signed(z)) for h in planes)
            origin = z if depth > 1.0e-9 * self._scale else None
            res = integrate(integrand, region, rel_tol=self.rel_tol,
                            abs_tol=self.abs_tol, max_cells=self.max_cells,
                            decay=decay_of(density) + 1.0,
                            r_cap=self.r_cap, origin=origin)
            total += complex(res.value)
        val = total / math.pi
        self._cache[z] = val
        return val


def cauchy_transform(density, region, **kwargs) -> CauchyTransform:
    """Convenience constructor for :class:`CauchyTransform`."""
    return CauchyTransform(density, region, **kwargs)


@dataclass
class SeparatedSplit:
    """Outcome of a two-domain cutoff-and-correct split.

    ``parts[i]`` is holomorphic on ``domains[i]`` and the two parts sum to
    the input exactly on the overlap (the correction enters the two parts
    with opposite signs, so reconstruction cancels algebraically).  Each
    part gains one order of weight relative to the space the input lived
    in; the increment is recorded in the plan for bookkeeping by callers.
    """

    parts: tuple
    domains: tuple
    cutoff: Cutoff
    correction: CauchyTransform
    density: object
    overlap: object
    original: object = None
    plan: dict = field(default_factory=dict)

    def __iter__(self):
        return iter(self.parts)

    def residual(self, z):
        z = np.asarray(z, dtype=complex)
        return self.original(z) - self.parts[0](z) - self.parts[1](z)


def split_separated(f, omega1, omega2, *, rel_tol: float = 1.0e-6,
                    r_cap: float | None = None, max_cells: int = 20000,
                    sets=None, overlap=None) -> SeparatedSplit:
    """Split ``f`` on ``omega1 & omega2`` into parts holomorphic on each.

    Requires the difference sets ``omega1 \\ omega2`` and ``omega2 \\
    omega1`` to lie at positive distance.  The parts are ``f * (1 - chi) -
    u`` and ``f * chi + u`` where ``u`` is the Cauchy transform of ``v = -f
    * dbar(chi)``; ``v`` vanishes outside the overlap (the cutoff is
    constant past it within each domain) and is integrated over the
    overlap only.  ``rel_tol`` controls the per-point quadrature of ``u``.

    When the domains are not plain convex regions the caller can pass the
    difference sets and the overlap explicitly: ``sets=(set1, set2)`` feeds
    :meth:`Cutoff.from_sets`, and ``overlap`` may be a region or a list of
    pairwise disjoint convex regions covering ``omega1 & omega2``.
    """
    chi = Cutoff(omega1, omega2) if sets is None else Cutoff.from_sets(*sets)
    if overlap is None:
        overlap = dom.ConvexIntersection(
            tuple(omega1.halfplanes()) + tuple(omega2.halfplanes()))
    elif isinstance(overlap, (list, tuple)):
        overlap = dom.PieceUnion(overlap)
    bounded = overlap.is_bounded()

    def v_fn(s):
        s = np.asarray(s, dtype=complex)
        out = np.zeros(s.shape, dtype=complex)
        mask = overlap.contains(s)
        if mask.any():
            sm = s[mask]
            out[mask] = -f(sm) * chi.dbar(sm)
        return out

    # |dbar chi| is only bounded, not decaying, along an unbounded overlap,
    # so v inherits the decay of f alone
    v = Lambda(v_fn, decay=math.inf if bounded else decay_of(f))
    u = CauchyTransform(v, overlap, rel_tol=rel_tol, r_cap=r_cap,
                        max_cells=max_cells)

    def blend(keep_low: bool):
        def fn(z):
            z = np.asarray(z, dtype=complex)
            out = np.zeros(z.shape, dtype=complex)
            mask = overlap.contains(z)
            if mask.any():
                zm = z[mask]
                w = chi(zm)
                out[mask] = f(zm) * ((1.0 - w) if keep_low else w)
            return out

        return Lambda(fn, decay=math.inf if bounded else decay_of(f))

    f1 = Sum([blend(True), u], [1.0, -1.0])
    f2 = Sum([blend(False), u], [1.0, 1.0])
    plan = {
        "rule": "cutoff-correction",
        "delta": chi.delta,
        "grad_bound": chi.grad_bound,
        "weight_increment": 1,
        "rel_tol": rel_tol,
    }
    return SeparatedSplit((f1, f2), (omega1, omega2), chi, u, v, overlap,
                          original=f, plan=plan)


def deweight(f1, f2, omega1, omega2, m: int, *, z0: complex | None = None,
             margin: float | None = None):
    """Divide both parts by (z - z0)^(2m), undoing m orders of weight.

    ``z0`` is placed outside the closed union of the two domains, along the
    direction in which the union's support function leaves the widest gap,
    so both quotients stay holomorphic and the polynomial growth matches
    the weight exactly.  Returns ``(g1, g2, z0)``.  Raises
    :class:`NoExteriorPoint` when the union recedes in every direction.
    """
    m = int(m)
    if m < 0:
        raise ValueError("weight order must be nonnegative")
    if m == 0:
        return f1, f2, None
    regions = [list(omega1.halfplanes()), list(omega2.halfplanes())]
    if z0 is None:
        if margin is None:
            margin = 1.0 + 0.5 * max(dom.region_scale(r) for r in regions)
        try:
            z0 = dom.exterior_point(regions, margin=margin)
        except NoExteriorPoint:
            z0 = dom.recession_gap_point(regions, margin=margin)
    z0 = complex(z0)
    gap = min(float(dom.distance_to_region(o, np.array([z0]))[0])
              for o in (omega1, omega2))
    if gap <= 0.0:
        raise NoExteriorPoint(
            "the deweighting point must keep a positive distance from both "
            "domains"
        )
    return (PolynomialScale(f1, z0, -2 * m),
            PolynomialScale(f2, z0, -2 * m), z0)
