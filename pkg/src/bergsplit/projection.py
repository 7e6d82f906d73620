"""Orthogonal projection onto half-plane Bergman spaces, and the splitter
for right-angle sectors built from it.

The splitter rests on the additive kernel identity: the quarter-plane kernel
is the sum of the kernels of its two edge half planes.  Extending f by zero
to each half plane and projecting therefore yields components that sum back
to f on the quarter, each living in the half-plane space.

Kernel multiples bypass quadrature: projecting the zero-extended quarter
kernel gives the corresponding half-plane kernel with the same pole and
coefficient, exactly.
"""

from __future__ import annotations

import threading
from dataclasses import dataclass, field
from typing import Optional

import numpy as np

from .approx import compress
from .domains import HalfPlane, Quarter
from .errors import UnsupportedGeometry
from .evaluators import Sum, ZeroExtension, decay_of
from .kernels import Kernel
from .quadrature import integrate


def trivial_extension(f, domain) -> ZeroExtension:
    """Extend f by zero outside ``domain`` (the inclusion into larger spaces)."""
    return ZeroExtension(f, domain)


class BergmanProjection:
    """Pointwise evaluator of the orthogonal projection of g onto A^2(domain).

    Each evaluation point costs one adaptive area integral; computed values
    are cached, so repeated grid evaluations are cheap after the first pass.
    """

    def __init__(self, g, domain, *, support=None, rel_tol: float = 1.0e-9,
                 abs_tol: float = 1.0e-13, max_cells: int = 20000):
        if not isinstance(domain, (HalfPlane, Quarter)):
            raise UnsupportedGeometry(
                "projection needs a domain with a closed-form kernel"
            )
        self.g = g
        self.domain = domain
        # integrating a zero-extension over the full domain would make the
        # integrand jump at the support boundary; integrating over the
        # support itself keeps it smooth
        self.support = domain if support is None else support
        self.rel_tol = rel_tol
        self.abs_tol = abs_tol
        self.max_cells = max_cells
        self.decay = 2.0 if isinstance(domain, HalfPlane) else 3.0
        self._cache = {}
        self._lock = threading.Lock()
        self._q = decay_of(g) + self.decay

    def _value_at(self, z: complex) -> complex:
        k_z = Kernel(self.domain, z)
        g = self.g

        def integrand(s):
            return np.asarray(g(s), dtype=complex) * np.conj(k_z(s))

        res = integrate(integrand, self.support, rel_tol=self.rel_tol,
                        abs_tol=self.abs_tol, decay=self._q,
                        max_cells=self.max_cells)
        return complex(res.value)

    def __call__(self, z):
        z = np.asarray(z, dtype=complex)
        flat = z.ravel()
        out = np.empty(flat.shape, dtype=complex)
        pending = []
        with self._lock:
            for i, zi in enumerate(flat):
                key = complex(zi)
                if key in self._cache:
                    out[i] = self._cache[key]
                else:
                    pending.append((i, key))
        for i, key in pending:
            val = self._value_at(key)
            with self._lock:
                self._cache.setdefault(key, val)
            out[i] = val
        return out.reshape(z.shape)


def as_kernel_multiple(f):
    """Recognize c * Kernel structures; returns (c, kernel) or None."""
    if isinstance(f, Kernel):
        return 1.0 + 0.0j, f
    if isinstance(f, Sum):
        pairs = [(c, t) for c, t in zip(f.coeffs, f.terms) if c != 0]
        if len(pairs) == 1 and isinstance(pairs[0][1], Kernel):
            return complex(pairs[0][0]), pairs[0][1]
    return None


@dataclass
class QuarterSplit:
    """Outcome of splitting a quarter-plane function across its edges."""

    original: object        # the function that was split
    parts: tuple            # two evaluators, one per half plane
    domains: tuple          # the two half planes
    exact: bool             # True when the kernel fast path applied
    plan: list = field(default_factory=list)

    def residual(self, z):
        """f1 + f2 minus the original, evaluated pointwise."""
        z = np.asarray(z, dtype=complex)
        return self.parts[0](z) + self.parts[1](z) - self.original(z)


def split_quarter(f, quarter: Quarter, *, compressed: bool = True,
                  rel_tol: float = 1.0e-9, surrogate_tol: float = 1.0e-8,
                  seed: int = 20260814) -> QuarterSplit:
    """Split f in A^2 of a right-angle sector into half-plane components.

    Returns a :class:`QuarterSplit` whose parts satisfy
    ``f = parts[0] + parts[1]`` on the quarter, with ``parts[i]`` in the
    square-norm space of ``domains[i]``.
    """
    h_lower, h_upper = quarter.halfplanes()
    plan = []

    km = as_kernel_multiple(f)
    if km is not None and isinstance(km[1].domain, Quarter) \
            and km[1].domain == quarter:
        c, k = km
        parts = (Sum([Kernel(h_lower, k.pole)], [c]),
                 Sum([Kernel(h_upper, k.pole)], [c]))
        plan.append({
            "rule": "kernel-additivity",
            "detail": "quarter kernel splits exactly into edge half-plane "
                      "kernels with the same pole and coefficient",
        })
        return QuarterSplit(f, parts, (h_lower, h_upper), True, plan)

    parts = []
    for h in (h_lower, h_upper):
        proj = BergmanProjection(f, h, support=quarter, rel_tol=rel_tol)
        plan.append({
            "rule": "extend-project",
            "detail": f"zero-extend to {h} and project onto its square-norm "
                      "space",
        })
        if compressed:
            # sample within a moderate window: the samples carry quadrature
            # noise, and the compactified fit would blow far-field errors up
            # by the square of the radius.  The corner is a branch point of
            # anything transported onto the quarter, so cluster samples there.
            sur = compress(proj, h, decay=2.0, tol=surrogate_tol,
                           n_samples=256, r_max=30.0, cluster=quarter.vertex,
                           seed=seed)
            plan.append({
                "rule": "surrogate",
                "detail": f"replace projection by a rational surrogate "
                          f"(held-out error {sur.fit_error:.2e})",
            })
            parts.append(sur)
        else:
            parts.append(proj)
    return QuarterSplit(f, tuple(parts), (h_lower, h_upper), False, plan)
