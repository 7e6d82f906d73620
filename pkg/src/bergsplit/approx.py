"""Rational surrogate compression of expensive evaluators.

The splitting pipelines chain quadrature-backed operators; evaluating those
compositions directly would nest quadratures.  Instead, each expensive stage
is sampled on its domain and replaced by an adaptive rational interpolant
(AAA), validated on held-out points and checked for spurious poles inside
the domain.

For unbounded domains the function is fitted in the compactifying variable
w = z/(z + s), with -s a point well outside the domain, after factoring out
an explicit (z + s)^-q tail so the surrogate inherits the declared decay
exponent exactly.
"""

from __future__ import annotations

import math
import warnings
from typing import Optional

import numpy as np
from scipy.interpolate import AAA

from . import domains as dom
from .errors import CompressionError, NoExteriorPoint
from .evaluators import (Const, PoleSum, PolynomialScale, Rational,
                         Restriction, Sum, decay_of)
from .kernels import Kernel


class Surrogate:
    """Rational stand-in for a compressed evaluator."""

    def __init__(self, aaa, shift: Optional[complex], q: float, domain,
                 fit_error: float):
        self._aaa = aaa
        self.shift = shift  # None for bounded domains (fit directly in z)
        self.q = float(q)
        self.domain = domain
        self.fit_error = float(fit_error)
        self.decay = q if shift is not None else (
            math.inf if domain.is_bounded() else 0.0)

    def __call__(self, z):
        z = np.asarray(z, dtype=complex)
        if self.shift is None:
            return self._aaa(z.ravel()).reshape(z.shape)
        zs = z + self.shift
        w = z / zs
        return self._aaa(w.ravel()).reshape(z.shape) * zs ** (-self.q)

    @property
    def support_points(self):
        return self._aaa.support_points

    def poles(self):
        """Surrogate poles mapped back to the z plane."""
        pw = self._aaa.poles()
        if self.shift is None:
            return pw
        keep = np.abs(1.0 - pw) > 1e-13
        return self.shift * pw[keep] / (1.0 - pw[keep])


def _sample_points(domain, n, rng, r_max: float = 1.0e3, cluster=None):
    """Points spread over the domain, log-spanning the radial extent.

    ``r_max`` bounds the sampling radius in units of the domain scale; when
    the sampled values carry quadrature noise, a tighter window keeps the
    tail factor from amplifying that noise into the fit.

    ``cluster`` marks a boundary point where the function may have an
    algebraic branch singularity (a transported corner).  A third of the
    budget is then spent on a log-spaced fan shrinking into that point, so
    the interpolant sees the power-law behaviour across many decades and
    can chase it with geometrically clustered poles.
    """
    if cluster is not None:
        # Fan of geometrically spaced radii shrinking into the marked point:
        # that clustering is what the greedy interpolant needs to resolve a
        # corner exponent, and a fixed layout keeps the fit quality from
        # fluctuating with the draw.  Depth 1e-3 covers the evaluation range
        # a few decades past any interior margin without stretching the
        # sampled value range so far that AAA's relative stopping rule goes
        # slack elsewhere.
        k = max(8, n // 2)
        scale = max(_domain_scale(domain), 1e-12)
        radii = scale * np.logspace(-3.0, 0.0, max(12, k // 6))
        golden = math.pi * (math.sqrt(5.0) - 1.0)
        angles = np.mod(golden * np.arange(64), 2.0 * math.pi) - math.pi
        cand = complex(cluster) + radii[None, :] * np.exp(1j * angles[:, None])
        inside = domain.contains(cand.ravel()).reshape(cand.shape)
        fan = []
        per_radius = max(1, int(math.ceil(k / radii.size)))
        for j in range(radii.size):
            hits = cand[inside[:, j], j]
            fan.extend(hits[:per_radius].tolist())
        fan = np.asarray(fan[:k], dtype=complex)
        rest = _sample_points(domain, n - len(fan), rng, r_max)
        return rng.permutation(np.concatenate([fan, rest]))

    if isinstance(domain, dom.PieceUnion):
        k = len(domain.regions)
        shares = np.full(k, n // k)
        shares[: n % k] += 1
        parts = [_sample_points(r, int(m), rng, r_max)
                 for r, m in zip(domain.regions, shares) if m > 0]
        return rng.permutation(np.concatenate(parts))

    if isinstance(domain, dom.Disk):
        u = rng.uniform(0.0, 1.0, n)
        t = rng.uniform(-math.pi, math.pi, n)
        return domain.center + domain.radius * np.sqrt(u) * 0.999 * np.exp(1j * t)

    if isinstance(domain, dom.Sector) and domain.opening > math.pi:
        t = rng.uniform(domain.a + 1e-6, domain.b - 1e-6, n)
        r = np.exp(rng.uniform(math.log(1e-2), math.log(r_max), n))
        return domain.vertex + r * (1.0 + abs(domain.vertex)) * np.exp(1j * t)

    planes = list(domain.halfplanes())
    scale = dom.region_scale(planes)
    # cap the anchor depth so unbounded regions are sampled near their finite
    # geometry, not deep along a recession direction
    origin, depth = dom.region_interior_point(planes, depth_cap=scale)
    rho, _ = dom.radial_profile(planes, origin)
    scale = max(scale, depth)
    pts = []
    target = n
    while len(pts) < target:
        m = 2 * (target - len(pts)) + 16
        t = rng.uniform(-math.pi, math.pi, m)
        extent = np.minimum(rho(t), r_max * scale)
        mode = rng.integers(0, 2, m)
        # mode 0: uniform-in-area core samples; mode 1: log-spread tail samples
        r0 = extent * np.sqrt(rng.uniform(0.0, 1.0, m)) * 0.9995
        r1 = np.exp(rng.uniform(math.log(1e-3 * scale),
                                np.log(np.maximum(extent, 2e-3 * scale)), m))
        r = np.where(mode == 0, r0, np.minimum(r1, extent * 0.9995))
        z = origin + r * np.exp(1j * t)
        z = z[domain.contains(z)]
        pts.extend(z.tolist())
    return np.asarray(pts[:target], dtype=complex)


def compress(f, domain, *, decay: Optional[float] = None, tol: float = 1.0e-9,
             max_terms: int = 120, n_samples: int = 800,
             r_max: float = 1.0e3, cluster=None,
             seed: int = 20260814) -> Surrogate:
    """Fit a validated rational surrogate for ``f`` on ``domain``.

    Raises :class:`CompressionError` when the held-out relative error stays
    above ``tol`` or the interpolant keeps poles inside the domain.  A failed
    draw is retried once with fresh samples: the greedy interpolant's quality
    fluctuates with where the random nodes land, so one redraw absorbs most
    borderline misses.
    """
    rng = np.random.default_rng(seed)
    q = decay_of(f) if decay is None else float(decay)
    bounded = domain.is_bounded()

    if not bounded:
        if q < 0:
            raise CompressionError(
                "cannot compress a growing function on an unbounded domain"
            )
        margin = 1.0 + _domain_scale(domain)
        if isinstance(domain, dom.Sector) and domain.opening > math.pi:
            ext = _wide_sector_exterior(domain, margin)
        elif isinstance(domain, dom.PieceUnion):
            ext = dom.recession_gap_point([list(p) for p in domain.pieces],
                                          margin=margin)
        else:
            try:
                ext = dom.exterior_point([list(domain.halfplanes())],
                                         margin=margin)
            except NoExteriorPoint:
                ext = dom.recession_gap_point([list(domain.halfplanes())],
                                              margin=margin)

    last_err = math.inf
    for _attempt in range(2):
        z_all = _sample_points(domain, n_samples + n_samples // 3, rng, r_max,
                               cluster=cluster)
        z_fit, z_val = z_all[:n_samples], z_all[n_samples:]

        if bounded:
            shift = None
            w_fit = z_fit
            g_fit = np.asarray(f(z_fit), dtype=complex)
        else:
            shift = -complex(ext)
            w_fit = z_fit / (z_fit + shift)
            g_fit = np.asarray(f(z_fit), dtype=complex) * (z_fit + shift) ** q

        bad = ~np.isfinite(g_fit)
        if bad.any():
            raise CompressionError(
                "function evaluated non-finite at sample points")

        f_val = np.asarray(f(z_val), dtype=complex)
        val_scale = 1.0 + np.abs(f_val)

        # chase the fit down to roughly the noise floor of the samples, but
        # no further: a too-tight rtol makes AAA spend its terms on noise
        ladder = sorted({max(1.0e-13, tol * f_rel)
                         for f_rel in (1e-3, 1e-2, 1e-1)})
        for rtol in ladder:
            try:
                with warnings.catch_warnings():
                    warnings.simplefilter("ignore")
                    aaa = AAA(w_fit, g_fit, rtol=rtol, max_terms=max_terms)
            except Exception:
                continue
            sur = Surrogate(aaa, shift, q, domain, math.nan)
            poles = sur.poles()
            clearance = _pole_clearance(domain, poles)
            if clearance <= 1e-9 * (1.0 + _domain_scale(domain)):
                continue
            err = float(np.max(np.abs(sur(z_val) - f_val) / val_scale))
            last_err = min(last_err, err)
            if err <= tol:
                sur.fit_error = err
                return sur
    raise CompressionError(
        f"surrogate validation failed (best held-out error {last_err:.3e})"
    )


def _domain_scale(domain) -> float:
    if isinstance(domain, dom.Disk):
        return abs(domain.center) + domain.radius
    if isinstance(domain, dom.Sector) and domain.opening > math.pi:
        return 1.0 + abs(domain.vertex)
    if isinstance(domain, dom.PieceUnion):
        return max(dom.region_scale(list(p)) for p in domain.pieces)
    return dom.region_scale(list(domain.halfplanes()))


def _wide_sector_exterior(sector, margin: float) -> complex:
    """Point at distance >= margin from a sector with opening above pi."""
    gap = 2.0 * math.pi - sector.opening
    if gap < 1e-3:
        raise CompressionError("sector complement is too thin for an exterior point")
    mid = dom.wrap_angle(0.5 * (sector.a + sector.b) + math.pi)
    r = margin / math.sin(min(0.5 * gap, 0.5 * math.pi))
    return sector.vertex + r * complex(math.cos(mid), math.sin(mid))


def _pole_clearance(domain, poles) -> float:
    if len(poles) == 0:
        return math.inf
    inside = domain.contains(poles)
    if np.any(inside):
        return -1.0
    if isinstance(domain, dom.Disk):
        return float(np.min(np.abs(poles - domain.center) - domain.radius))
    if isinstance(domain, dom.Sector) and domain.opening > math.pi:
        # distance to the two edge rays and the vertex
        w = poles - domain.vertex
        d = np.abs(w)
        for ang in (domain.a, domain.b):
            e = np.exp(1j * ang)
            t = np.maximum((np.conj(e) * w).real, 0.0)
            d = np.minimum(d, np.abs(w - t * e))
        return float(np.min(d))
    return float(np.min(dom.distance_to_region(domain, poles)))


# ---------------------------------------------------------------------------
# exact pole expansions
#
# Many stage outputs are rational once compressed: a surrogate, shifted by
# (z - z0)^k factors and summed.  Flattening such a tree into an explicit
# pole expansion lets the sector splitter assign whole poles to components
# instead of running the doubling recursion.  ``pole_expansion`` returns
# (terms, constant) with terms = [(pole, order, coeff), ...], or None when
# the input is not recognisably rational; callers fall back to the general
# machinery in that case.

def _merge_terms(terms):
    out = []
    for p, m, c in terms:
        for i, (p2, m2, c2) in enumerate(out):
            if m2 == m and abs(p2 - p) <= 1e-13 * (1.0 + abs(p) + abs(p2)):
                out[i] = (p2, m2, c2 + c)
                break
        else:
            out.append((complex(p), int(m), complex(c)))
    return [(p, m, c) for p, m, c in out if c != 0]


def _rational_terms(f: Rational):
    num, den = f.num.copy(), f.den.copy()
    if num.size > den.size:
        return None  # polynomial part of positive degree
    const = 0.0 + 0.0j
    if num.size == den.size:
        const = complex(num[-1] / den[-1])
        num = np.trim_zeros(num - const * den, "b")
        if num.size == 0:
            return [], const
    roots = np.roots(den[::-1])
    if roots.size == 0:
        return None
    scale = 1.0 + float(np.max(np.abs(roots)))
    for i in range(roots.size):
        gap = np.abs(roots - roots[i])
        gap[i] = np.inf
        if float(np.min(gap)) < 1e-8 * scale:
            return None  # repeated denominator root: residues unreliable
    dprime = Rational._polyder(den)
    terms = []
    for p in roots:
        pz = np.asarray([p], dtype=complex)
        res = Rational._horner(num, pz)[0] / Rational._horner(dprime, pz)[0]
        terms.append((complex(p), 1, complex(res)))
    return terms, const


def _scale_terms(terms, const, z0, k):
    """Expand ((z - z0)^k) * (const + sum c/(z-p)^m) back into pole terms."""
    z0 = complex(z0)
    if k < 0:
        big_k = -k
        out = []
        if const != 0:
            out.append((z0, big_k, const))
        for p, m, c in terms:
            if abs(p - z0) <= 1e-13 * (1.0 + abs(p) + abs(z0)):
                out.append((p, m + big_k, c))
                continue
            # 1/((z-a)^m (z-b)^K) split across both poles
            a, b = p, z0
            for t in range(m):
                coef = (math.comb(big_k - 1 + t, t) * (-1) ** t
                        / (a - b) ** (big_k + t))
                out.append((a, m - t, c * coef))
            for t in range(big_k):
                coef = (math.comb(m - 1 + t, t) * (-1) ** t
                        / (b - a) ** (m + t))
                out.append((b, big_k - t, c * coef))
        return out, 0.0 + 0.0j
    # positive power: only exact when every pole sits at z0 deep enough
    if const != 0:
        return None
    out = []
    new_const = 0.0 + 0.0j
    for p, m, c in terms:
        if abs(p - z0) > 1e-13 * (1.0 + abs(p) + abs(z0)):
            return None
        if m - k > 0:
            out.append((p, m - k, c))
        elif m - k == 0:
            new_const += c
        else:
            return None
    return out, new_const


def _verify_terms(fn, terms, const, center, radius, vscale) -> bool:
    """Spot check fn == const + sum of pole terms on two rings."""
    angles = np.exp(1j * (2.0 * math.pi * np.arange(8) / 8 + 0.31))
    zs = np.concatenate([center + radius * angles,
                         center + 2.7 * radius * angles])
    pole_pos = np.asarray([p for p, _, _ in terms], dtype=complex)
    if pole_pos.size:
        clear = np.min(np.abs(zs[:, None] - pole_pos[None, :]), axis=1)
        zs = zs[clear > 1e-6 * radius]
        if zs.size == 0:
            return False
    ref = np.asarray(fn(zs), dtype=complex)
    got = np.full(zs.shape, const, dtype=complex)
    for p, m, c in terms:
        got = got + c * (zs - p) ** (-m)
    tol = 1e-7 * max(1.0, vscale, float(np.max(np.abs(ref))))
    return bool(np.all(np.abs(got - ref) <= tol))


def _kernel_terms(kern):
    """Exact pole expansion of a closed-form reproducing kernel.

    All three kernel geometries are rational in z with poles at reflections
    of the kernel base point, so they feed the exact splitting path without
    a surrogate fit.
    """
    d = kern.domain
    lam = kern.pole
    if isinstance(dom.Disk, type) and isinstance(d, dom.Disk):
        a = np.conj(lam - d.center) / d.radius
        if abs(a) < 1.0e-14:
            return [], 1.0 / (math.pi * d.radius**2)
        zp = d.center + d.radius / a
        return [(zp, 2, 1.0 / (math.pi * a * a))], 0.0 + 0.0j
    if isinstance(d, dom.HalfPlane):
        u = dom._unit_dir(d.theta)
        # 1 / (pi (conj(u) z + u conj(lam) - 2c)^2): double pole at the
        # mirror image of lam across the boundary line.
        zp = u * (2.0 * d.c - u * np.conj(lam))
        return [(complex(zp), 2, 1.0 / (math.pi * np.conj(u) ** 2))], 0.0 + 0.0j
    if isinstance(d, dom.Quarter):
        u = dom._unit_dir(d.orientation)
        mu = np.conj(np.conj(u) * (lam - d.vertex))
        # -4 w mu / (pi (w - mu)^2 (w + mu)^2) with w = conj(u)(z - v):
        # partial fractions in z; the simple-pole coefficients vanish
        # identically (the kernel decays like |z|^-3).
        a = d.vertex + u * mu
        b = d.vertex - u * mu
        C = -4.0 * mu / (math.pi * np.conj(u) ** 3)
        na, nb = C * u * mu, -C * u * mu
        terms = [
            (complex(a), 2, complex(na / (a - b) ** 2)),
            (complex(a), 1, complex(C / (a - b) ** 2 - 2.0 * na / (a - b) ** 3)),
            (complex(b), 2, complex(nb / (b - a) ** 2)),
            (complex(b), 1, complex(C / (b - a) ** 2 - 2.0 * nb / (b - a) ** 3)),
        ]
        top = max(abs(c) * (1.0 + abs(p)) for p, _, c in terms)
        return [t for t in terms if abs(t[2]) > 1.0e-14 * top], 0.0 + 0.0j
    return None


def _near(a, b) -> bool:
    return abs(a - b) <= 1e-4 * (1.0 + abs(a) + abs(b))


def _collapse_poles(fn, poles, residues, const, tail, vscale):
    """Term list for the rational ``fn`` from approximate pole data.

    Well separated poles keep their residues.  A tight group of poles is
    how the interpolant renders a genuine multiple pole, and the individual
    residues inside such a group are unreliable (huge, canceling); each
    group is collapsed to a stack at its centroid and the stack coefficients
    are re-read off a small ring around it by least squares.  ``tail``
    optionally forces a stack of known order at a known point.
    """
    groups = []  # [centroid, [(pole, residue), ...]]
    for p, r in zip(poles, residues):
        for g in groups:
            if _near(p, g[0]):
                g[1].append((complex(p), complex(r)))
                g[0] = sum(pp for pp, _ in g[1]) / len(g[1])
                break
        else:
            groups.append([complex(p), [(complex(p), complex(r))]])

    stacks = {}  # centroid -> order, refitted jointly
    if tail is not None:
        p_tail, q_tail = tail
        kept = []
        for g in groups:
            if _near(g[0], p_tail):
                q_tail += len(g[1])  # group riding on the tail point
            else:
                kept.append(g)
        groups = kept
        stacks[complex(p_tail)] = q_tail
    terms = []
    for centroid, members in groups:
        if len(members) == 1:
            terms.append((members[0][0], 1, members[0][1]))
        else:
            stacks[complex(centroid)] = len(members)

    if stacks:
        anchors = np.asarray(list(stacks) + [p for p, _, _ in terms],
                             dtype=complex)
        rows, cols_at = [], []
        pts = []
        for p, kmax in stacks.items():
            others = anchors[~np.isclose(anchors, p)]
            radius = 0.05 * (1.0 + abs(p))
            if others.size:
                radius = min(radius,
                             0.25 * float(np.min(np.abs(others - p))))
            m = 4 * kmax + 8
            ring = p + radius * np.exp(
                1j * (2.0 * math.pi * np.arange(m) / m + 0.23))
            pts.append(ring)
        pts = np.concatenate(pts)
        rhs = np.asarray(fn(pts), dtype=complex) - const
        for p, _, c in terms:
            rhs = rhs - c / (pts - p)
        unknowns = [(p, j) for p, kmax in stacks.items()
                    for j in range(1, kmax + 1)]
        design = np.stack([(pts - p) ** (-j) for p, j in unknowns], axis=1)
        row_scale = 1.0 / (1.0 + np.abs(rhs))
        coef, *_ = np.linalg.lstsq(design * row_scale[:, None],
                                   rhs * row_scale, rcond=None)
        floor = 1e-13 * max(1.0, vscale)
        terms.extend((p, j, complex(c))
                     for (p, j), c in zip(unknowns, coef) if abs(c) > floor)
    return terms


def _surrogate_terms(sur: Surrogate):
    aaa = sur._aaa
    try:
        pw = np.asarray(aaa.poles(), dtype=complex)
        rw = np.asarray(aaa.residues(), dtype=complex)
    except Exception:
        return None
    vals = np.asarray(aaa.support_values, dtype=complex)
    vscale = float(np.max(np.abs(vals[np.isfinite(vals)]), initial=1.0))
    scale = _domain_scale(sur.domain)

    if sur.shift is None:
        wsum = complex(np.sum(aaa.weights))
        if abs(wsum) < 1e-12 * float(np.sum(np.abs(aaa.weights))):
            return None
        const = complex(np.sum(aaa.weights * vals) / wsum)
        terms = _collapse_poles(sur, pw, rw, const, None, vscale)
        radius = 2.0 * (1.0 + scale + float(np.max(np.abs(pw), initial=0.0)))
        if not _verify_terms(sur, terms, const, 0.0, radius, vscale):
            return None
        return _merge_terms(terms), const

    q = sur.q
    qi = int(round(q))
    if qi < 0 or abs(q - qi) > 1e-9:
        return None
    s = complex(sur.shift)
    tail_pole = -s
    keep = np.abs(1.0 - pw) > 1e-13
    if np.any(~keep) and float(np.max(np.abs(rw[~keep]), initial=0.0)) \
            > 1e-11 * vscale:
        return None  # genuine pole at infinity: the input grows
    zp = s * pw[keep] / (1.0 - pw[keep])
    # residue transported through w = z/(z+s) and the (z+s)^-q tail factor
    coeffs = rw[keep] * (zp + s) ** (2.0 - q) / s

    const = 0.0 + 0.0j
    if qi == 0:
        const = complex(aaa(np.asarray([1.0 + 0.0j]))[0])

    tail = (tail_pole, qi) if qi > 0 else None
    terms = _collapse_poles(sur, zp, coeffs, const, tail, vscale)
    radius = 2.0 * (1.0 + abs(tail_pole) + scale
                    + float(np.max(np.abs(zp), initial=0.0)))
    if not _verify_terms(sur, terms, const, tail_pole, radius, vscale):
        return None
    return _merge_terms(terms), const


def pole_expansion(f):
    """Flatten ``f`` to (pole terms, constant), or None if not rational.

    Walks the evaluator tree produced by the splitting stages.  The result
    is exact up to the surrogate fit error wherever a compressed stage
    appears; a built-in spot check rejects expansions that do not reproduce
    the input, so a None return is the only failure mode.
    """
    if isinstance(f, PoleSum):
        return list(f.terms), f.constant
    if isinstance(f, Const):
        return [], f.value
    if isinstance(f, Rational):
        return _rational_terms(f)
    if isinstance(f, Restriction):
        return pole_expansion(f.inner)
    if isinstance(f, Sum):
        terms = []
        const = 0.0 + 0.0j
        for coeff, t in zip(f.coeffs, f.terms):
            if coeff == 0:
                continue
            sub = pole_expansion(t)
            if sub is None:
                return None
            terms.extend((p, m, coeff * c) for p, m, c in sub[0])
            const += coeff * sub[1]
        return _merge_terms(terms), const
    if isinstance(f, PolynomialScale):
        sub = pole_expansion(f.inner)
        if sub is None:
            return None
        if f.k == 0:
            return sub
        scaled = _scale_terms(sub[0], sub[1], f.z0, f.k)
        if scaled is None:
            return None
        return _merge_terms(scaled[0]), scaled[1]
    if isinstance(f, Surrogate):
        return _surrogate_terms(f)
    if isinstance(f, Kernel):
        return _kernel_terms(f)
    return None
