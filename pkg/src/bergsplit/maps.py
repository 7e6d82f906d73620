"""Conformal maps used to move functions between domains.

Each map provides ``forward(z)``, ``deriv(z)`` (both vectorized), an
``inverse()`` map, and ``transported_decay(inner_decay, p)`` describing how
the decay exponent of a pulled-back function behaves at infinity.  ``source``
and ``target`` are optional domain annotations carried along for reporting.
"""

from __future__ import annotations

import cmath
import math
from dataclasses import dataclass
from typing import Optional

import numpy as np

from .domains import _unit_dir


@dataclass(frozen=True)
class AffineMap:
    """z -> alpha*z + beta with alpha != 0."""

    alpha: complex
    beta: complex = 0.0
    source: Optional[object] = None
    target: Optional[object] = None

    def __post_init__(self):
        if self.alpha == 0:
            raise ValueError("affine map needs alpha != 0")

    def forward(self, z):
        return self.alpha * np.asarray(z, dtype=complex) + self.beta

    def deriv(self, z):
        z = np.asarray(z, dtype=complex)
        return np.full(z.shape, complex(self.alpha))

    def inverse(self) -> "AffineMap":
        return AffineMap(1.0 / self.alpha, -self.beta / self.alpha,
                         source=self.target, target=self.source)

    def transported_decay(self, inner_decay: float, p: float) -> float:
        return inner_decay


@dataclass(frozen=True)
class MoebiusMap:
    """z -> (a z + b) / (c z + d) with nonzero determinant."""

    a: complex
    b: complex
    c: complex
    d: complex
    source: Optional[object] = None
    target: Optional[object] = None

    def __post_init__(self):
        if self.a * self.d - self.b * self.c == 0:
            raise ValueError("Moebius map needs ad - bc != 0")

    def forward(self, z):
        z = np.asarray(z, dtype=complex)
        return (self.a * z + self.b) / (self.c * z + self.d)

    def deriv(self, z):
        z = np.asarray(z, dtype=complex)
        det = self.a * self.d - self.b * self.c
        return det / (self.c * z + self.d) ** 2

    def inverse(self) -> "MoebiusMap":
        return MoebiusMap(self.d, -self.b, -self.c, self.a,
                          source=self.target, target=self.source)

    def transported_decay(self, inner_decay: float, p: float) -> float:
        if self.c == 0:
            return inner_decay
        # phi(inf) is finite; without knowing the inner function there, only
        # the derivative factor can be counted on
        return 0.0


@dataclass(frozen=True)
class PowerMap:
    """z -> b_post * (exp(-i a_pre) z) ** kappa on a chosen branch.

    ``branch_center`` fixes the branch: the argument of ``exp(-i a_pre) z``
    is taken in ``(branch_center - pi, branch_center + pi]``.  Points whose
    argument falls near the ends of that interval sit on the branch cut, so
    callers must arrange ``a_pre``/``branch_center`` to keep their domain
    away from it.
    """

    a_pre: float
    kappa: float
    b_post: complex = 1.0
    branch_center: float = 0.0
    source: Optional[object] = None
    target: Optional[object] = None

    def __post_init__(self):
        if self.kappa <= 0:
            raise ValueError("power map needs kappa > 0")
        if self.b_post == 0:
            raise ValueError("power map needs b_post != 0")

    def _is_integer(self) -> bool:
        return abs(self.kappa - round(self.kappa)) < 1.0e-12

    def _rotated(self, z):
        return np.conj(_unit_dir(self.a_pre)) * np.asarray(z, dtype=complex)

    def _branch_log(self, w):
        # log with argument in (branch_center - pi, branch_center + pi]
        psi = self.branch_center
        ang = np.angle(w * cmath.exp(-1j * psi)) + psi
        with np.errstate(divide="ignore"):
            return np.log(np.abs(w)) + 1j * ang

    def forward(self, z):
        w = self._rotated(z)
        if self._is_integer():
            return self.b_post * w ** int(round(self.kappa))
        out = np.zeros(np.shape(w), dtype=complex)
        nz = w != 0
        out[nz] = self.b_post * np.exp(self.kappa * self._branch_log(w[nz]))
        return out

    def deriv(self, z):
        w = self._rotated(z)
        u = np.conj(_unit_dir(self.a_pre))
        k = self.kappa
        if self._is_integer():
            return self.b_post * k * w ** (int(round(k)) - 1) * u
        out = np.zeros(np.shape(w), dtype=complex)
        nz = w != 0
        out[nz] = self.b_post * k * np.exp((k - 1.0) * self._branch_log(w[nz])) * u
        if k < 1.0:
            out[~nz] = np.inf
        return out

    def inverse(self) -> "PowerMap":
        # w = b (e^{-ia} z)^k  =>  z = e^{ia} (w/b)^{1/k}
        return PowerMap(
            a_pre=cmath.phase(self.b_post),
            kappa=1.0 / self.kappa,
            b_post=cmath.exp(1j * self.a_pre) / abs(self.b_post) ** (1.0 / self.kappa),
            branch_center=self.kappa * self.branch_center,
            source=self.target,
            target=self.source,
        )

    def transported_decay(self, inner_decay: float, p: float) -> float:
        if inner_decay == math.inf:
            return math.inf
        return inner_decay * self.kappa - (self.kappa - 1.0) * 2.0 / p


def square_map(**kwargs) -> PowerMap:
    """The map z -> z^2."""
    return PowerMap(a_pre=0.0, kappa=2.0, **kwargs)


def cayley_map(**kwargs) -> MoebiusMap:
    """z -> (z - i)/(z + i), taking the upper half plane onto the unit disk."""
    from .domains import UNIT_DISK, UPPER_HALF_PLANE

    kwargs.setdefault("source", UPPER_HALF_PLANE)
    kwargs.setdefault("target", UNIT_DISK)
    return MoebiusMap(1.0, -1.0j, 1.0, 1.0j, **kwargs)
