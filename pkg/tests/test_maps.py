import math

import numpy as np
import pytest

from bergsplit.domains import UNIT_DISK, UPPER_HALF_PLANE, Sector
from bergsplit.maps import AffineMap, MoebiusMap, PowerMap, cayley_map, square_map

from conftest import random_points


def test_affine_round_trip(rng):
    m = AffineMap(2.0 - 1j, 0.5j)
    z = random_points(rng, 100)
    w = m.forward(z)
    assert np.allclose(m.inverse().forward(w), z, rtol=0, atol=1e-13)
    assert np.allclose(m.deriv(z), 2.0 - 1j)
    with pytest.raises(ValueError):
        AffineMap(0.0)


def test_moebius_round_trip_and_deriv(rng):
    m = MoebiusMap(2.0, 1j, 1.0, 3.0)
    z = random_points(rng, 100)
    w = m.forward(z)
    assert np.allclose(m.inverse().forward(w), z, rtol=0, atol=1e-12)
    h = 1e-6
    fd = (m.forward(z + h) - m.forward(z - h)) / (2 * h)
    assert np.allclose(m.deriv(z), fd, rtol=1e-8, atol=1e-8)
    with pytest.raises(ValueError):
        MoebiusMap(1.0, 2.0, 2.0, 4.0)


def test_cayley_maps_half_plane_to_disk(rng):
    m = cayley_map()
    assert m.source is UPPER_HALF_PLANE and m.target is UNIT_DISK
    z = random_points(rng, 200)
    z = z[z.imag > 0]
    assert np.all(np.abs(m.forward(z)) < 1)
    assert m.forward(1j) == pytest.approx(0.0)
    assert complex(m.deriv(np.array(1j))) == pytest.approx(-0.5j)


def test_square_map_is_plain_power():
    m = square_map()
    z = np.array([1.5 + 0.25j, -2j, 3.0])
    assert np.allclose(m.forward(z), z ** 2)
    assert np.allclose(m.deriv(z), 2 * z)


def test_power_map_branch_center():
    # kappa=1/2 on a sector that crosses the negative real axis: choosing the
    # branch centre inside the sector keeps the image connected
    m = PowerMap(a_pre=0.0, kappa=0.5, branch_center=math.pi)
    up = np.exp(1j * (math.pi - 0.1))
    dn = np.exp(1j * (math.pi + 0.1))  # same physical ray as exp(-i(pi-0.1))ish
    wu, wd = complex(m.forward(np.array(up))), complex(m.forward(np.array(dn)))
    # both land near i, on the same branch
    assert abs(wu - wd) < 0.2
    assert abs(wu - 1j) < 0.1

    principal = PowerMap(a_pre=0.0, kappa=0.5, branch_center=0.0)
    wd2 = complex(principal.forward(np.array(np.exp(-1j * (math.pi - 0.1)))))
    # principal branch puts the lower point near -i instead
    assert abs(wd2 + 1j) < 0.1


def test_power_map_round_trip(rng):
    m = PowerMap(a_pre=0.3, kappa=1.7, b_post=2.0j, branch_center=0.2)
    # stay well inside the branch: points with arg(e^{-ia} z) near 0.2
    r = rng.uniform(0.5, 2.0, 50)
    t = rng.uniform(-0.8, 0.8, 50) + 0.2
    z = r * np.exp(1j * (t + 0.3))
    w = m.forward(z)
    assert np.allclose(m.inverse().forward(w), z, rtol=1e-12, atol=1e-12)
    h = 1e-7
    fd = (m.forward(z * (1 + h)) - m.forward(z * (1 - h))) / (2 * h * z)
    assert np.allclose(m.deriv(z), fd, rtol=1e-6, atol=1e-8)


def test_power_map_sector_image():
    s = Sector(0.0, math.pi / 4, math.pi / 2)
    m = PowerMap(a_pre=math.pi / 4, kappa=2.0, branch_center=0.0)
    pts = np.array([0.5 * np.exp(1j * 0.9), 2.0 * np.exp(1j * 1.3)])
    assert s.contains(pts).all()
    w = m.forward(pts)
    # doubled sector: angles 0..pi/2 (after the pre-rotation)
    assert np.all((np.angle(w) > 0) & (np.angle(w) < math.pi / 2 + 1e-12))


def test_transported_decay():
    assert AffineMap(2.0).transported_decay(3.0, 2.0) == 3.0
    assert MoebiusMap(1, -1j, 1, 1j).transported_decay(3.0, 2.0) == 0.0
    assert MoebiusMap(2, 1, 0, 1).transported_decay(3.0, 2.0) == 3.0
    # kernel decay 2 through z->z^2 becomes 2*2 - 1 = 3
    assert square_map().transported_decay(2.0, 2.0) == pytest.approx(3.0)
