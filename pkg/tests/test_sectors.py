import math

import numpy as np
import pytest

from bergsplit.domains import (
    FIRST_QUADRANT,
    UPPER_HALF_PLANE,
    HalfPlane,
    Quarter,
    Sector,
)
from bergsplit.errors import OpeningOutOfRange
from bergsplit.evaluators import PolynomialScale, Sum, Transported, Weight
from bergsplit.kernels import Kernel, kernel
from bergsplit.maps import AffineMap, PowerMap
from bergsplit.quadrature import integrate
from bergsplit.sectors import (
    double_sector,
    leaf_angles,
    recursion_depth,
    shift_point,
    split_sector,
    split_sector_weighted,
    transport,
)


def sector_grid(vertex=0.0, a=0.0, theta=0.5 * math.pi, n_r=10, n_t=7,
                margin=0.05):
    r = np.linspace(0.15, 2.4, n_r)
    t = np.linspace(a + margin, a + theta - margin, n_t)
    return (complex(vertex) + r[:, None] * np.exp(1j * t[None, :])).ravel()


# ---------------------------------------------------------------- bookkeeping


def test_recursion_depth_values():
    assert recursion_depth(math.pi / 3) == 3
    assert recursion_depth(math.pi / 2) == 3
    assert recursion_depth(0.9 * math.pi) == 2
    assert recursion_depth(math.pi) == 2
    assert recursion_depth(2 * math.pi / 3) == 2


def test_recursion_depth_is_minimal():
    for theta in (0.11, 0.4, 1.0, 2.2, 3.1):
        n = recursion_depth(theta)
        assert 2.0 ** n * theta > 2.0 * math.pi
        assert 2.0 ** (n - 1) * theta <= 2.0 * math.pi


@pytest.mark.parametrize("theta", [0.0, -0.3, math.pi + 0.01])
def test_recursion_depth_rejects_bad_openings(theta):
    with pytest.raises(OpeningOutOfRange):
        recursion_depth(theta)


def test_leaf_angles_formula():
    # leaf k at the final level spans (-k theta, (2^N - k) theta), clamped
    # to the principal window
    assert leaf_angles(math.pi / 2, 3, 0) == (0.0, math.pi)
    assert leaf_angles(math.pi / 2, 3, 4) == (-math.pi, math.pi)
    a, b = leaf_angles(math.pi / 3, 3, 7)
    assert (a, b) == (-math.pi, pytest.approx(math.pi / 3))
    a, b = leaf_angles(0.9 * math.pi, 2, 1)
    assert a == pytest.approx(-0.9 * math.pi)
    assert b == math.pi


# ------------------------------------------------------------- exact splits


def test_quarter_kernel_split_is_exact():
    f = Sum([Kernel(Quarter(0.0, 0.0), 1.0 + 0.7j)], [1.3 - 0.4j])
    split = split_sector(f, Quarter(0.0, 0.0))

    assert split.exact
    assert split.depth == 3
    assert len(split.leaves) == 8
    assert split.group_sizes() == (4, 4)
    assert all(leaf.kind != "surrogate" for leaf in split.leaves)
    assert {e["rule"] for e in split.plan} <= {"kernel-additivity",
                                               "restriction"}

    z = sector_grid()
    res = np.asarray(f(z)) - np.asarray(split.parts[0](z)) \
        - np.asarray(split.parts[1](z))
    assert np.abs(res).max() < 1e-12
    np.testing.assert_allclose(np.abs(split.residual(z)), np.abs(res),
                               atol=1e-15)


def test_split_away_from_origin_stays_exact():
    v = 0.8 - 0.4j
    q = Quarter(v, -0.25 * math.pi)
    pole = v + 1.2 * np.exp(1j * (0.5 - 0.25 * math.pi))
    f = Sum([Kernel(q, pole)], [0.5 + 2.0j])
    split = split_sector(f, q)

    assert split.exact
    z = sector_grid(vertex=v, a=-0.25 * math.pi)
    assert np.abs(split.residual(z)).max() < 1e-10

    # the edge half planes are anchored at the vertex, not the origin
    for h in split.domains:
        assert h.contains(np.asarray([v + 0.3 * np.exp(1j * 0.0)])).all()


def test_groups_collect_contiguous_leaf_ranges():
    f = kernel(Quarter(0.0, 0.0), 0.6 + 0.6j)
    split = split_sector(f, Quarter(0.0, 0.0))
    targets = [leaf.target for leaf in split.leaves]
    assert targets == [0, 0, 0, 0, 1, 1, 1, 1]
    assert [leaf.index for leaf in split.leaves] == list(range(8))


# ------------------------------------------------------------ honest splits


def test_third_pi_split_shape(third_pi_split):
    f, sec, split = third_pi_split
    assert split.depth == 3
    assert len(split.leaves) == 8
    assert split.group_sizes() == (4, 4)
    assert not split.exact
    # 1 + 2 + 4 doublings recorded, one entry each
    assert len(split.plan) == 7


def test_third_pi_split_reconstructs(third_pi_split):
    f, sec, split = third_pi_split
    z = sector_grid(a=0.0, theta=math.pi / 3)
    want = np.asarray(f(z))
    res = np.abs(split.residual(z))
    assert res.max() / np.abs(want).max() < 1e-4


def test_third_pi_leaves_match_angle_formula(third_pi_split):
    _, _, split = third_pi_split
    for leaf in split.leaves:
        a, b = leaf_angles(math.pi / 3, split.depth, leaf.index)
        assert leaf.a == pytest.approx(a, abs=1e-12)
        assert leaf.b == pytest.approx(b, abs=1e-12)


def test_wide_sector_split(wide_split):
    f, sec, split = wide_split
    assert split.depth == 2
    assert len(split.leaves) == 4
    assert split.group_sizes() == (2, 2)

    z = sector_grid(a=0.0, theta=0.9 * math.pi, n_t=9)
    res = np.abs(split.residual(z))
    assert res.max() / np.abs(np.asarray(f(z))).max() < 1e-4


def test_wide_split_plan_marks_clamped_children(wide_split):
    _, _, split = wide_split
    root = split.plan[0]
    assert root["level"] == 0 and root["rule"] == "extend-project"
    up, down = root["children"]
    assert up["clamped"] and up["sector"] == [0.0, math.pi]
    assert not down["clamped"]
    assert down["sector"][0] == pytest.approx(-0.9 * math.pi)
    for entry in split.plan:
        assert {"level", "index", "sector", "rule", "children"} <= set(entry)


def test_leaf_sectors_contain_the_original(wide_split, rng):
    _, sec, split = wide_split
    r = np.sqrt(rng.uniform(0.0, 9.0, 1000))
    t = rng.uniform(sec.a + 1e-9, sec.b - 1e-9, 1000)
    for leaf in split.leaves:
        assert leaf.a <= t.min() and t.max() <= leaf.b
        dom = Sector(0.0, leaf.a, min(math.pi, leaf.b))
        inside = dom.contains(r * np.exp(1j * np.clip(t, leaf.a + 1e-9,
                                                      min(math.pi, leaf.b) - 1e-9)))
        assert inside.all()


def test_parts_extend_beyond_the_sector(wide_split):
    # each part is a function on its own half plane, not just the sector
    _, _, split = wide_split
    h1, h2 = split.domains
    z1 = np.array([3.0 * np.exp(1j * 0.97 * math.pi), 0.4 + 2.5j])
    z2 = np.array([1.5 - 0.2j, 2.0 * np.exp(-1j * 0.08 * math.pi)])
    assert h1.contains(z1).all()
    assert h2.contains(z2).all()
    assert np.isfinite(np.asarray(split.parts[0](z1))).all()
    assert np.isfinite(np.asarray(split.parts[1](z2))).all()


# ------------------------------------------------------------ doubling


def test_double_quarter_kernel():
    f = Sum([Kernel(Quarter(0.0, 0.0), 1.2 + 0.9j)], [1.0])
    d = double_sector(f, Sector(0.0, 0.0, 0.5 * math.pi))
    assert d.exact
    assert [(s.a, s.b) for s in d.domains] == [
        (0.0, math.pi), (-0.5 * math.pi, 0.5 * math.pi)]
    z = sector_grid()
    assert np.abs(d.residual(z)).max() < 1e-12


def test_double_rotated_sector():
    f = Sum([Kernel(Quarter(0.0, -0.25 * math.pi), 1.2 - 0.3j)], [1.0])
    d = double_sector(f, Sector(0.0, -0.25 * math.pi, 0.25 * math.pi))
    assert d.exact
    assert d.domains[0].a == pytest.approx(-0.25 * math.pi)
    assert d.domains[0].b == pytest.approx(0.75 * math.pi)
    assert d.domains[1].a == pytest.approx(-0.75 * math.pi)
    z = sector_grid(a=-0.25 * math.pi)
    assert np.abs(d.residual(z)).max() < 1e-12


def test_double_clamps_wide_child():
    # opening 3pi/4: the upward child would reach 3pi/2, so it clamps to pi
    f = Sum([Kernel(HalfPlane(0.5 * math.pi, 0.0), 1.1 * np.exp(0.375j * math.pi))],
            [1.0])
    d = double_sector(f, Sector(0.0, 0.0, 0.75 * math.pi),
                      rel_tol=1e-6, surrogate_tol=1e-4)
    assert not d.exact
    assert (d.domains[0].a, d.domains[0].b) == (0.0, math.pi)
    assert d.domains[1].a == pytest.approx(-0.75 * math.pi)
    assert d.domains[1].b == pytest.approx(0.75 * math.pi)
    z = sector_grid(a=0.0, theta=0.75 * math.pi)
    rel = np.abs(d.residual(z)).max() / np.abs(np.asarray(f(z))).max()
    assert rel < 5e-3


def test_double_rejects_straddling_sector():
    f = kernel(Quarter(0.0, 0.75 * math.pi), -1.2 + 0.2j)
    with pytest.raises(OpeningOutOfRange):
        double_sector(f, Quarter(0.0, 0.75 * math.pi))


# ------------------------------------------------------- half-plane pair API


def test_pair_form_matches_quarter_and_keeps_order():
    f = kernel(Quarter(0.0, 0.0), 0.9 + 0.8j)
    h1 = HalfPlane(0.5 * math.pi, 0.0)
    h2 = HalfPlane(0.0, 0.0)
    s12 = split_sector(f, h1, h2)
    s21 = split_sector(f, h2, h1)

    assert s12.domains == (h1, h2)
    assert s21.domains == (h2, h1)
    assert isinstance(s12.sector, Sector)
    assert s12.sector.opening == pytest.approx(0.5 * math.pi)

    z = sector_grid()
    np.testing.assert_allclose(np.asarray(s12.parts[0](z)),
                               np.asarray(s21.parts[1](z)), rtol=1e-12)
    assert np.abs(s12.residual(z)).max() < 1e-12


def test_pair_form_rejects_parallel_edges():
    f = kernel(UPPER_HALF_PLANE, 1j)
    with pytest.raises(OpeningOutOfRange):
        split_sector(f, HalfPlane(0.5 * math.pi, 0.0),
                     HalfPlane(0.5 * math.pi, 1.0))
    with pytest.raises(OpeningOutOfRange):
        split_sector(f, HalfPlane(0.5 * math.pi, 0.0),
                     HalfPlane(-0.5 * math.pi, 0.0))


def test_split_rejects_half_plane_opening():
    f = kernel(UPPER_HALF_PLANE, 1j)
    with pytest.raises(OpeningOutOfRange):
        split_sector(f, Sector(0.0, 0.0, math.pi))


# ------------------------------------------------------------- shift point


def test_shift_point_for_the_standard_quarter():
    z0 = shift_point(Sector(0.0, 0.0, 0.5 * math.pi))
    assert abs(z0 - (-1.0 - 1.0j)) < 1e-12
    # same frame given as half planes
    z0p = shift_point(HalfPlane(0.5 * math.pi, 0.0), HalfPlane(0.0, 0.0))
    assert abs(z0p - z0) < 1e-12
    # stays a unit away from both closed edge half planes
    assert -z0.imag >= 1.0 - 1e-12
    assert -z0.real >= 1.0 - 1e-12


def test_shift_point_scales_with_vertex():
    v = 3.0 + 2.0j
    sec = Sector(v, 0.2, 0.2 + 0.6)
    z0 = shift_point(sec)
    assert abs(abs(z0 - v) - math.sqrt(2.0) * (1.0 + abs(v))) < 1e-12
    # sits behind the vertex on the anti-bisector
    assert abs(np.angle(z0 - v) - (0.5 + math.pi)) % (2 * math.pi) < 1e-9


# ---------------------------------------------------------- weighted splits


def test_weighted_split_order_zero_delegates():
    f = kernel(Quarter(0.0, 0.0), 1.0 + 1.0j)
    ws = split_sector_weighted(f, Quarter(0.0, 0.0), Weight(0))
    assert all(e["rule"] != "polynomial-shift" for e in ws.plan)
    assert ws.exact


def test_weighted_split_reconstructs_pointwise():
    sec = Sector(0.0, 0.0, 0.5 * math.pi)
    z0 = shift_point(sec)
    base = Sum([Kernel(Quarter(0.0, 0.0), 1.0 + 0.8j)], [1.0])
    f = PolynomialScale(base, z0, 2)  # weighted-space member, order N=1

    ws = split_sector_weighted(f, sec, Weight(1))
    assert ws.exact
    assert ws.original is f
    assert ws.plan[-1]["rule"] == "polynomial-shift"
    for part in ws.parts:
        assert isinstance(part, PolynomialScale)
        assert part.k == 2 and abs(part.z0 - z0) < 1e-12

    z = sector_grid()
    res = np.asarray(f(z)) - np.asarray(ws.parts[0](z)) \
        - np.asarray(ws.parts[1](z))
    assert np.abs(res).max() / np.abs(np.asarray(f(z))).max() < 1e-8

    # plain integer weight means the same thing
    ws2 = split_sector_weighted(f, sec, 1)
    np.testing.assert_allclose(np.asarray(ws2.parts[0](z)),
                               np.asarray(ws.parts[0](z)), rtol=1e-12)


def test_weighted_split_argument_validation():
    f = kernel(Quarter(0.0, 0.0), 1.0 + 1.0j)
    with pytest.raises(TypeError):
        split_sector_weighted(f, Quarter(0.0, 0.0))
    with pytest.raises(ValueError):
        split_sector_weighted(f, Quarter(0.0, 0.0), Weight(1, p=1.5))


# -------------------------------------------------------------- transport


def test_transport_values_and_exponent():
    g = kernel(UPPER_HALF_PLANE, 2j)
    phi = AffineMap(np.exp(0.3j), 0.7 - 0.2j)
    tg = transport(g, phi)
    assert isinstance(tg, Transported)
    z = np.array([0.5 + 1.0j, -1.0 + 2.0j])
    np.testing.assert_allclose(
        np.asarray(tg(z)),
        np.asarray(g(phi.forward(z))) * np.asarray(phi.deriv(z)))

    # p = 4 uses the 2/p-th power of the derivative
    tg4 = transport(g, phi, p=4.0)
    np.testing.assert_allclose(
        np.asarray(tg4(z)),
        np.asarray(g(phi.forward(z))) * np.asarray(phi.deriv(z)) ** 0.5)


def test_transport_is_an_isometry():
    # pull a half-plane kernel back to the quarter and integrate its square
    lam = 2j
    g = kernel(UPPER_HALF_PLANE, lam)
    psi = PowerMap(a_pre=0.0, kappa=2.0, branch_center=0.25 * math.pi,
                   target=UPPER_HALF_PLANE)
    tg = transport(g, psi)

    norm2 = integrate(lambda z: np.abs(np.asarray(tg(z))) ** 2,
                      FIRST_QUADRANT, rel_tol=1e-8, decay=6.0)
    want = float(np.real(np.asarray(g(np.array([lam])))[0]))  # k_lam(lam)
    assert abs(norm2.value.real - want) / want < 1e-6
