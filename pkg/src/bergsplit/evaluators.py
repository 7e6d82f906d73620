"""Function objects passed between the splitting stages.

Everything here is a callable mapping a numpy array of complex points to
complex values.  Two optional pieces of metadata ride along:

``decay``
    A float ``q`` such that ``|f(z)| = O(|z|^-q)`` for large ``|z|``.  The
    quadrature engine uses it to bound truncated tails over unbounded
    domains.  ``0.0`` means "no decay known".

``derivative()``
    Returns another evaluator for f'.  Only the node types that can produce
    an exact derivative implement it.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

from .errors import UnsupportedGeometry


@dataclass(frozen=True)
class Weight:
    """Radial weight (1 + |z|^(2p))^(-N) attached to a Bergman norm."""

    N: int = 0
    p: float = 2.0

    def __call__(self, z):
        if self.N == 0:
            z = np.asarray(z)
            return np.ones(z.shape, dtype=float)
        z = np.asarray(z, dtype=complex)
        return (1.0 + np.abs(z) ** (2.0 * self.p)) ** (-self.N)

    def raised(self, k: int) -> "Weight":
        return Weight(self.N + k, self.p)

    @property
    def decay(self) -> float:
        """Decay exponent of the weight itself."""
        return 2.0 * self.p * self.N


UNWEIGHTED = Weight(0)


def decay_of(f) -> float:
    return float(getattr(f, "decay", 0.0))


def derivative_of(f):
    deriv = getattr(f, "derivative", None)
    if deriv is None:
        raise UnsupportedGeometry(
            f"{type(f).__name__} does not support exact differentiation"
        )
    return deriv()


class Lambda:
    """Wrap a plain vectorized callable, attaching decay metadata."""

    def __init__(self, fn, decay: float = 0.0, deriv=None):
        self._fn = fn
        self.decay = decay
        self._deriv = deriv

    def __call__(self, z):
        return self._fn(np.asarray(z, dtype=complex))

    def derivative(self):
        if self._deriv is None:
            raise UnsupportedGeometry("no derivative attached to this function")
        return self._deriv


class Const:
    def __init__(self, value: complex):
        self.value = complex(value)
        self.decay = 0.0 if self.value != 0 else math.inf

    def __call__(self, z):
        z = np.asarray(z, dtype=complex)
        return np.full(z.shape, self.value)

    def derivative(self):
        return Const(0.0)


class Rational:
    """Ratio of polynomials in z, coefficients in increasing degree order."""

    def __init__(self, num, den=(1.0,)):
        self.num = np.trim_zeros(np.asarray(num, dtype=complex), "b")
        self.den = np.trim_zeros(np.asarray(den, dtype=complex), "b")
        if self.den.size == 0:
            raise ZeroDivisionError("zero denominator polynomial")
        if self.num.size == 0:
            self.num = np.zeros(1, dtype=complex)
        self.decay = float((self.den.size - 1) - (self.num.size - 1))
        if np.all(self.num == 0):
            self.decay = math.inf

    @staticmethod
    def _horner(coeffs, z):
        acc = np.zeros(z.shape, dtype=complex)
        for c in coeffs[::-1]:
            acc = acc * z + c
        return acc

    def __call__(self, z):
        z = np.asarray(z, dtype=complex)
        return self._horner(self.num, z) / self._horner(self.den, z)

    @staticmethod
    def _polyder(coeffs):
        n = coeffs.size
        if n <= 1:
            return np.zeros(1, dtype=complex)
        return coeffs[1:] * np.arange(1, n)

    @staticmethod
    def _polymul(a, b):
        return np.convolve(a, b)

    def derivative(self) -> "Rational":
        num = (self._polymul(self._polyder(self.num), self.den)
               - self._polymul(self.num, self._polyder(self.den)))
        den = self._polymul(self.den, self.den)
        return Rational(num, den)


class PoleSum:
    """Finite pole expansion: constant + sum of c / (z - p)^m terms.

    ``terms`` is an iterable of (pole, order, coefficient) triples.  This is
    the normal form the fast splitting path works with; keeping it as its own
    node (rather than a Sum of Rationals) makes regrouping cheap.
    """

    def __init__(self, terms, constant: complex = 0.0):
        cleaned = []
        for pole, order, coeff in terms:
            order = int(order)
            if order < 1:
                raise ValueError("pole orders must be >= 1")
            coeff = complex(coeff)
            if coeff != 0:
                cleaned.append((complex(pole), order, coeff))
        self.terms = tuple(cleaned)
        self.constant = complex(constant)
        if self.constant != 0:
            self.decay = 0.0
        elif self.terms:
            self.decay = float(min(order for _, order, _ in self.terms))
        else:
            self.decay = math.inf

    def __call__(self, z):
        z = np.asarray(z, dtype=complex)
        out = np.full(z.shape, self.constant)
        for pole, order, coeff in self.terms:
            out = out + coeff * (z - pole) ** (-order)
        return out

    def poles(self):
        return np.asarray([p for p, _, _ in self.terms], dtype=complex)

    def derivative(self) -> "PoleSum":
        return PoleSum([(p, m + 1, -m * c) for p, m, c in self.terms])


class TrigSeries:
    """c0 + sum_k s_k sin(k z) + sum_k c_k cos(k z) with integer frequencies."""

    def __init__(self, sin_coeffs=(), cos_coeffs=(), constant: complex = 0.0):
        self.sin_coeffs = np.asarray(sin_coeffs, dtype=complex)
        self.cos_coeffs = np.asarray(cos_coeffs, dtype=complex)
        self.constant = complex(constant)
        self.decay = 0.0

    def __call__(self, z):
        z = np.asarray(z, dtype=complex)
        out = np.full(z.shape, self.constant)
        for k, c in enumerate(self.sin_coeffs, start=1):
            if c != 0:
                out = out + c * np.sin(k * z)
        for k, c in enumerate(self.cos_coeffs, start=1):
            if c != 0:
                out = out + c * np.cos(k * z)
        return out

    def derivative(self) -> "TrigSeries":
        # (sin kz)' = k cos kz, (cos kz)' = -k sin kz
        ks = np.arange(1, self.sin_coeffs.size + 1)
        kc = np.arange(1, self.cos_coeffs.size + 1)
        return TrigSeries(
            sin_coeffs=-kc * self.cos_coeffs,
            cos_coeffs=ks * self.sin_coeffs,
            constant=0.0,
        )

class Sum:
    """Weighted sum of evaluators."""

    def __init__(self, terms, coeffs=None):
        self.terms = list(terms)
        self.coeffs = ([1.0] * len(self.terms) if coeffs is None
                       else [complex(c) for c in coeffs])
        if len(self.coeffs) != len(self.terms):
            raise ValueError("coefficient/term count mismatch")
        self.decay = min((decay_of(t) for t in self.terms), default=math.inf)

    def __call__(self, z):
        z = np.asarray(z, dtype=complex)
        out = np.zeros(z.shape, dtype=complex)
        for c, t in zip(self.coeffs, self.terms):
            if c != 0:
                out = out + c * t(z)
        return out

    def derivative(self) -> "Sum":
        return Sum([derivative_of(t) for t in self.terms], self.coeffs)


class PolynomialScale:
    """(z - z0)^k times an inner evaluator; k may be negative."""

    def __init__(self, inner, z0: complex, k: int):
        self.inner = inner
        self.z0 = complex(z0)
        self.k = int(k)
        self.decay = decay_of(inner) - self.k if decay_of(inner) != math.inf else math.inf

    def __call__(self, z):
        z = np.asarray(z, dtype=complex)
        return (z - self.z0) ** self.k * self.inner(z)

    def derivative(self):
        terms = [PolynomialScale(self.inner, self.z0, self.k - 1),
                 PolynomialScale(derivative_of(self.inner), self.z0, self.k)]
        return Sum(terms, [self.k, 1.0])


class ZeroExtension:
    """Extend a function by zero outside its domain of definition."""

    def __init__(self, inner, domain):
        self.inner = inner
        self.domain = domain
        self.decay = math.inf if domain.is_bounded() else decay_of(inner)

    def __call__(self, z):
        z = np.asarray(z, dtype=complex)
        out = np.zeros(z.shape, dtype=complex)
        mask = self.domain.contains(z)
        if mask.any():
            out[mask] = self.inner(z[mask])
        return out


class Restriction:
    """Mark a function as considered on a smaller domain (evaluation unchanged)."""

    def __init__(self, inner, domain):
        self.inner = inner
        self.domain = domain
        self.decay = decay_of(inner)

    def __call__(self, z):
        return self.inner(np.asarray(z, dtype=complex))

    def derivative(self):
        return Restriction(derivative_of(self.inner), self.domain)


class Transported:
    """Pullback isometry g -> (g o phi) * (phi')^(2/p)."""

    def __init__(self, inner, map, p: float = 2.0):
        self.inner = inner
        self.map = map
        self.p = float(p)
        self.decay = map.transported_decay(decay_of(inner), self.p)

    def __call__(self, z):
        z = np.asarray(z, dtype=complex)
        w = self.map.forward(z)
        dw = self.map.deriv(z)
        if self.p == 2.0:
            jac = dw
        else:
            jac = dw ** (2.0 / self.p)
        return self.inner(w) * jac


class SegmentAntiderivative:
    """F(z) = value0 + integral of f along the straight segment anchor -> z.

    The integrand must be holomorphic on a convex neighbourhood of the
    segments used, so the path integral only depends on endpoints.  Gauss
    panels of fixed order are laid along each segment; panel count grows with
    segment length.
    """

    _order = 24

    def __init__(self, integrand, anchor: complex, value0: complex = 0.0,
                 panel_length: float = 0.75):
        self.integrand = integrand
        self.anchor = complex(anchor)
        self.value0 = complex(value0)
        self.panel_length = float(panel_length)
        self.decay = 0.0
        x, w = np.polynomial.legendre.leggauss(self._order)
        self._nodes = 0.5 * (x + 1.0)
        self._weights = 0.5 * w

    def __call__(self, z):
        z = np.asarray(z, dtype=complex)
        flat = z.ravel()
        d = flat - self.anchor
        n_panels = np.maximum(1, np.ceil(np.abs(d) / self.panel_length).astype(int))
        out = np.full(flat.shape, self.value0)
        for m in np.unique(n_panels):
            sel = n_panels == m
            zs = flat[sel]
            # m panels of Gauss nodes along each segment
            starts = (np.arange(m) / m)[None, :, None]
            t = starts + self._nodes[None, None, :] / m
            pts = self.anchor + (zs - self.anchor)[:, None, None] * t
            vals = self.integrand(pts.ravel()).reshape(pts.shape)
            integral = np.sum(vals * self._weights[None, None, :], axis=(1, 2)) / m
            out[sel] = self.value0 + (zs - self.anchor) * integral
        return out.reshape(z.shape)

    def derivative(self):
        return self.integrand


def product_rule_derivative(f, g, fprime=None, gprime=None):
    """Evaluator for (f*g)' given the factor derivatives."""
    fp = fprime if fprime is not None else derivative_of(f)
    gp = gprime if gprime is not None else derivative_of(g)

    def fn(z):
        z = np.asarray(z, dtype=complex)
        return fp(z) * g(z) + f(z) * gp(z)

    return Lambda(fn, decay=min(decay_of(f), decay_of(g)))
