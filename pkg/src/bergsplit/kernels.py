"""Closed-form reproducing kernels on disks, half planes and quarter planes.

All kernels are for the unweighted square-norm space on the domain.  The
quarter-plane kernel factors the difference of squares as a product, which
keeps the evaluation stable when z approaches the reflected pole.
"""

from __future__ import annotations

import math

import numpy as np

from .domains import Disk, HalfPlane, Quarter, _unit_dir
from .errors import PoleDomainMismatch, UnsupportedGeometry
from .evaluators import Lambda


class Kernel:
    """Reproducing kernel k_pole of a domain, as a vectorized evaluator."""

    def __init__(self, domain, pole: complex):
        pole = complex(pole)
        if not domain.contains(pole):
            raise PoleDomainMismatch(
                f"pole {pole} does not lie in the open domain {domain}"
            )
        self.domain = domain
        self.pole = pole
        if isinstance(domain, Disk):
            self.decay = 0.0
        elif isinstance(domain, HalfPlane):
            self.decay = 2.0
        elif isinstance(domain, Quarter):
            self.decay = 3.0
        else:
            raise UnsupportedGeometry(
                f"no closed-form kernel for {type(domain).__name__}"
            )

    def __call__(self, z):
        return _pair_eval(self.domain, self.pole, np.asarray(z, dtype=complex))

    def __repr__(self):
        return f"Kernel({self.domain!r}, pole={self.pole!r})"


def _pair_eval(d, lam, z):
    """k_lam(z) with numpy broadcasting across both arguments."""
    if isinstance(d, Disk):
        a = np.conj((lam - d.center) / d.radius) * ((z - d.center) / d.radius)
        return 1.0 / (math.pi * d.radius ** 2 * (1.0 - a) ** 2)
    if isinstance(d, HalfPlane):
        u = _unit_dir(d.theta)
        s = np.conj(u) * z + u * np.conj(lam) - 2.0 * d.c
        return 1.0 / (math.pi * s * s)
    # quarter plane: rotate/translate onto {0 < arg w < pi/2}
    u = _unit_dir(d.orientation)
    w = np.conj(u) * (z - d.vertex)
    mu = np.conj(np.conj(u) * (lam - d.vertex))
    return -4.0 * w * mu / (math.pi * ((w - mu) * (w + mu)) ** 2)


def kernel_matrix(domain, poles, z):
    """Evaluate k_pole(z) for every pole/point pair.

    Returns an array of shape ``(len(poles), len(z))``; both arguments are
    flattened.  Poles are not membership-checked, so callers can also use
    this to evaluate at reflected or boundary points.
    """
    poles = np.asarray(poles, dtype=complex).reshape(-1, 1)
    z = np.asarray(z, dtype=complex).reshape(1, -1)
    return _pair_eval(domain, poles, z)


def kernel(domain, pole: complex) -> Kernel:
    return Kernel(domain, pole)


def transported_kernel(map, pole: complex, target_kernel=None):
    """Kernel of the map's source domain obtained from its target domain.

    For a biholomorphism phi from source onto target, the square-norm kernel
    transports as ``k_pole(z) = k'_{phi(pole)}(phi(z)) phi'(z) conj(phi'(pole))``
    where k' is the target kernel.  ``target_kernel`` may be passed when the
    target domain has no closed form.
    """
    pole = complex(pole)
    w_pole = complex(map.forward(pole))
    if target_kernel is None:
        if map.target is None:
            raise UnsupportedGeometry("map carries no target domain")
        target_kernel = Kernel(map.target, w_pole)
    d_pole = np.conj(complex(map.deriv(pole)))

    def fn(z):
        z = np.asarray(z, dtype=complex)
        return target_kernel(map.forward(z)) * map.deriv(z) * d_pole

    decay = map.transported_decay(getattr(target_kernel, "decay", 0.0), 2.0)
    return Lambda(fn, decay=decay)
