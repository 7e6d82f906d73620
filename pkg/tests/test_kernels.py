import math

import numpy as np
import pytest

from bergsplit.domains import (
    FIRST_QUADRANT,
    RIGHT_HALF_PLANE,
    UNIT_DISK,
    UPPER_HALF_PLANE,
    Disk,
    HalfPlane,
    Quarter,
    Strip,
)
from bergsplit.errors import PoleDomainMismatch, UnsupportedGeometry
from bergsplit.kernels import Kernel, kernel, transported_kernel
from bergsplit.maps import AffineMap, PowerMap, cayley_map
from bergsplit.quadrature import inner_product, norm

from conftest import random_points


def quadrant_points(rng, n=200, box=3.0):
    z = random_points(rng, 4 * n, box=box)
    z = z[(z.real > 1e-3) & (z.imag > 1e-3)]
    return z[:n]


def test_pole_must_be_inside():
    with pytest.raises(PoleDomainMismatch):
        kernel(UNIT_DISK, 2.0)
    with pytest.raises(PoleDomainMismatch):
        kernel(UPPER_HALF_PLANE, -1j)
    with pytest.raises(UnsupportedGeometry):
        kernel(Strip(0.0, 0.0, 1.0), 0.5)


def test_disk_kernel_values():
    k = kernel(UNIT_DISK, 0.0)
    assert complex(k(np.array(0.0))) == pytest.approx(1 / math.pi)
    # scaling: disk of radius R has k_c(c) = 1/(pi R^2)
    k2 = kernel(Disk(1j, 2.0), 1j)
    assert complex(k2(np.array(1j))) == pytest.approx(1 / (4 * math.pi))


def test_half_plane_kernel_canonical_forms(rng):
    z = random_points(rng, 300)
    zu = z[z.imag > 0.01][:80]
    lam = 0.7 + 1.3j
    ku = kernel(UPPER_HALF_PLANE, lam)
    expect = -1.0 / (math.pi * (zu - np.conj(lam)) ** 2)
    assert np.allclose(ku(zu), expect, rtol=1e-14)

    zr = z[z.real > 0.01][:80]
    lam = 1.5 - 0.4j
    kr = kernel(RIGHT_HALF_PLANE, lam)
    expect = 1.0 / (math.pi * (zr + np.conj(lam)) ** 2)
    assert np.allclose(kr(zr), expect, rtol=1e-14)


def test_tilted_half_plane_kernel_reproduces(rng):
    h = HalfPlane(0.7, -0.3)
    lam = h.boundary_foot() + 1.2 * h.normal()
    k = kernel(h, lam)
    # reproducing property at the pole: <k, k> = k(lam) = squared norm
    val = norm(k, h, rel_tol=1e-9)
    assert val ** 2 == pytest.approx(complex(k(np.array(lam))).real, rel=1e-7)


def test_quarter_kernel_squared_norm_is_kernel_diagonal():
    lam = np.exp(1j * math.pi / 4)
    k = kernel(FIRST_QUADRANT, lam)
    diag = complex(k(np.array(lam)))
    assert diag == pytest.approx(1 / math.pi, rel=1e-14)
    val = norm(k, FIRST_QUADRANT, rel_tol=1e-9)
    assert val ** 2 == pytest.approx(1 / math.pi, rel=1e-7)


def test_half_plane_kernels_sum_to_quarter_kernel(rng):
    lam = 0.8 + 0.6j
    kq = kernel(FIRST_QUADRANT, lam)
    ku = kernel(UPPER_HALF_PLANE, lam)
    kr = kernel(RIGHT_HALF_PLANE, lam)
    z = quadrant_points(rng, 500)
    resid = ku(z) + kr(z) - kq(z)
    scale = np.maximum(1.0, np.abs(kq(z)))
    assert np.max(np.abs(resid) / scale) < 1e-14


def test_translated_rotated_quarter_kernel(rng):
    q = Quarter(1 - 1j, math.pi / 2)
    lam = 1 - 1j + 1.5 * np.exp(1j * (math.pi / 2 + 0.5))
    k = kernel(q, lam)
    # transport from the canonical quadrant by the rigid motion
    move = AffineMap(np.exp(1j * math.pi / 2), 1 - 1j)
    k0 = kernel(FIRST_QUADRANT, complex(move.inverse().forward(lam)))
    z = 1 - 1j + np.exp(1j * math.pi / 2) * quadrant_points(rng, 200)
    inv = move.inverse()
    expect = k0(inv.forward(z)) * inv.deriv(z) * np.conj(complex(inv.deriv(lam)))
    assert np.allclose(k(z), expect, rtol=1e-13)


def test_cayley_transport_matches_half_plane_kernel(rng):
    lam = 0.4 + 1.1j
    kt = transported_kernel(cayley_map(), lam)
    ku = kernel(UPPER_HALF_PLANE, lam)
    z = random_points(rng, 400)
    z = z[z.imag > 0.01]
    assert np.allclose(kt(z), ku(z), rtol=1e-13)
    # diagonal value at i: |phi'(i)|^2 / pi = 1/(4 pi)
    kt_i = transported_kernel(cayley_map(), 1j)
    assert complex(kt_i(np.array(1j))) == pytest.approx(1 / (4 * math.pi), rel=1e-14)


def test_square_transport_matches_quarter_kernel(rng):
    # z -> z^2 maps the first quadrant onto the upper half plane
    m = PowerMap(a_pre=0.0, kappa=2.0, source=FIRST_QUADRANT,
                 target=UPPER_HALF_PLANE)
    lam = np.exp(1j * math.pi / 4)
    kt = transported_kernel(m, lam)
    kq = kernel(FIRST_QUADRANT, lam)
    z = quadrant_points(rng, 300)
    assert np.allclose(kt(z), kq(z), rtol=1e-13)
    assert complex(kt(np.array(lam))).real == pytest.approx(1 / math.pi, rel=1e-14)
    assert kt.decay == pytest.approx(3.0)


def test_reproducing_property_on_test_functions(rng):
    # f analytic on the upper half plane with decay: f(z) = 1/(z+2i)^2
    from bergsplit.evaluators import Lambda

    f = Lambda(lambda z: (z + 2j) ** -2.0, decay=2.0)
    lam = -0.3 + 0.8j
    k = kernel(UPPER_HALF_PLANE, lam)
    res = inner_product(f, k, UPPER_HALF_PLANE, rel_tol=1e-10)
    assert complex(res.value) == pytest.approx(complex(f(np.array(lam))), rel=1e-8)
