"""Cutoff, Cauchy transform, and two-domain splitting."""

import numpy as np
import pytest

from bergsplit import domains as dom
from bergsplit.dbar import (CauchyTransform, Cutoff, deweight, smoothstep,
                            split_separated)
from bergsplit.errors import NoExteriorPoint, NotSeparated
from bergsplit.evaluators import Const, Rational


def _fd_dbar(fn, pts, h=1.0e-4):
    return 0.5 * ((fn(pts + h) - fn(pts - h)) / (2.0 * h)
                  + 1j * (fn(pts + 1j * h) - fn(pts - 1j * h)) / (2.0 * h))


def overlapping_strips():
    """Vertical half strip {0<x<1, y>0} and its rotation about (1+i)/2."""
    s1 = dom.ConvexIntersection([dom.HalfPlane(0.0, 0.0),
                                 dom.HalfPlane(np.pi, -1.0),
                                 dom.HalfPlane(0.5 * np.pi, 0.0)])
    s2 = dom.ConvexIntersection([dom.HalfPlane(0.0, 0.0),
                                 dom.HalfPlane(np.pi, -1.0),
                                 dom.HalfPlane(-0.5 * np.pi, -1.0)])
    return s1, s2


def test_smoothstep_endpoints_and_midpoint():
    assert smoothstep(0.0) == 0.0
    assert smoothstep(1.0) == 1.0
    assert smoothstep(0.5) == 0.5
    # clamped outside the unit interval
    assert smoothstep(-3.0) == 0.0 and smoothstep(7.0) == 1.0


def test_smoothstep_is_c2_with_slope_peak_at_half():
    t = np.linspace(0.0, 1.0, 2001)
    slope = np.gradient(smoothstep(t), t)
    assert abs(slope.max() - 1.875) < 1.0e-4
    assert np.argmax(slope) == 1000
    # flat to second order at both ends
    assert abs(slope[1]) < 1.0e-5 and abs(slope[-2]) < 1.0e-5


class TestCutoff:
    def test_constant_on_each_difference_set(self):
        s1, s2 = overlapping_strips()
        chi = Cutoff(s1, s2)
        assert chi.delta == pytest.approx(1.0, abs=1e-12)
        up = np.array([0.5 + 1.3j, 0.2 + 2.0j, 0.9 + 1.01j])
        down = np.array([0.5 - 0.2j, 0.2 - 2.0j, 0.9 - 0.01j])
        assert np.all(chi(up) == 1.0)
        assert np.all(chi(down) == 0.0)

    def test_profile_follows_distance_ratio(self):
        s1, s2 = overlapping_strips()
        chi = Cutoff(s1, s2)
        # on the overlap's vertical midline the two distances are y and 1-y
        y = np.array([0.1, 0.25, 0.5, 0.9])
        assert chi(0.5 + 1j * y) == pytest.approx(smoothstep(y), abs=1e-12)

    def test_gradient_bound_is_recorded_and_respected(self):
        s1, s2 = overlapping_strips()
        chi = Cutoff(s1, s2)
        assert chi.grad_bound == pytest.approx(1.875 / chi.delta)
        xs, ys = np.meshgrid(np.linspace(0.03, 0.97, 17),
                             np.linspace(0.03, 0.97, 17))
        g = chi.grad_norm(xs + 1j * ys)
        assert g.max() <= chi.grad_bound * (1.0 + 1.0e-6)
        # the bound is nearly attained along the midline
        assert g.max() > 0.9 * chi.grad_bound

    def test_touching_differences_are_rejected(self):
        with pytest.raises(NotSeparated):
            Cutoff(dom.UPPER_HALF_PLANE, dom.RIGHT_HALF_PLANE)


class TestCauchyTransform:
    def test_unit_density_on_disk_gives_conjugate_inside(self):
        u = CauchyTransform(Const(1.0), dom.UNIT_DISK, rel_tol=1e-8)
        pts = np.array([0.0, 0.3 + 0.4j, -0.55j, 0.62 - 0.11j])
        assert u(pts) == pytest.approx(np.conj(pts), abs=1e-10)

    def test_unit_density_on_disk_gives_reciprocal_outside(self):
        u = CauchyTransform(Const(1.0), dom.UNIT_DISK, rel_tol=1e-8)
        pts = np.array([2.0, 1.5j, -1.2 + 0.9j])
        assert u(pts) == pytest.approx(1.0 / pts, abs=1e-10)

    def test_dbar_matches_density_by_finite_differences(self):
        u = CauchyTransform(Const(1.0), dom.UNIT_DISK, rel_tol=1e-8)
        xs, ys = np.meshgrid(np.linspace(-0.4, 0.4, 3),
                             np.linspace(-0.4, 0.4, 3))
        err = np.abs(_fd_dbar(u, xs + 1j * ys) - 1.0)
        assert err.max() < 1.0e-3

    def test_dbar_vanishes_off_the_support(self):
        u = CauchyTransform(Const(1.0), dom.UNIT_DISK, rel_tol=1e-8)
        err = np.abs(_fd_dbar(u, np.array([2.0 + 1.0j, -1.8j])))
        assert err.max() < 1.0e-6

    def test_nonconstant_density_dbar(self):
        dens = Const(0.0)

        def f(s):
            return s.real + 2j * s.imag  # deliberately non-holomorphic

        from bergsplit.evaluators import Lambda
        dens = Lambda(f)
        u = CauchyTransform(dens, dom.UNIT_DISK, rel_tol=1e-8)
        pts = np.array([0.15 + 0.1j, -0.2 - 0.25j])
        err = np.abs(_fd_dbar(u, pts) - dens(pts))
        assert err.max() < 1.0e-3


@pytest.fixture(scope="module")
def strip_split():
    s1, s2 = overlapping_strips()
    f = Rational([1.0], [-(2.0 + 0.5j), 1.0])  # pole right of the overlap
    return f, s1, s2, split_separated(f, s1, s2, rel_tol=1e-8)


class TestSplitSeparated:
    def test_reconstruction_is_exact_on_the_overlap(self, strip_split):
        f, s1, s2, sp = strip_split
        grid = (np.linspace(0.15, 0.85, 5)[:, None]
                + 1j * np.linspace(0.15, 0.85, 5)[None, :]).ravel()
        assert np.max(np.abs(sp.residual(grid))) < 1.0e-14

    def test_parts_are_holomorphic_on_their_domains(self, strip_split):
        f, s1, s2, sp = strip_split
        f1, f2 = sp.parts
        # interior points, including ones outside the overlap
        p1 = np.array([0.5 + 0.4j, 0.3 + 1.6j, 0.7 + 0.8j])
        p2 = np.array([0.5 + 0.6j, 0.3 - 0.9j, 0.7 + 0.2j])
        assert np.max(np.abs(_fd_dbar(f1, p1))) < 1.0e-3
        assert np.max(np.abs(_fd_dbar(f2, p2))) < 1.0e-3

    def test_parts_vanish_deep_in_the_far_difference(self, strip_split):
        # beyond the overlap the blend is zero and only the correction
        # remains, which dies off like 1/|z|
        f, s1, s2, sp = strip_split
        far = np.array([0.5 + 60.0j])
        assert abs(sp.parts[0](far)[0]) < 0.02
        assert sp.parts[0].decay == pytest.approx(1.0)

    def test_plan_records_the_separation_and_weight_step(self, strip_split):
        f, s1, s2, sp = strip_split
        assert sp.plan["rule"] == "cutoff-correction"
        assert sp.plan["delta"] == pytest.approx(1.0, abs=1e-12)
        assert sp.plan["weight_increment"] == 1

    def test_rejects_non_separated_pair(self):
        f = Const(1.0)
        with pytest.raises(NotSeparated):
            split_separated(f, dom.UPPER_HALF_PLANE, dom.RIGHT_HALF_PLANE)


class TestDeweight:
    def test_round_trip_and_exterior_point(self, strip_split):
        f, s1, s2, sp = strip_split
        g1, g2, z0 = deweight(sp.parts[0], sp.parts[1], s1, s2, 1)
        assert float(dom.distance_to_region(s1, np.array([z0]))[0]) >= 1.0
        assert float(dom.distance_to_region(s2, np.array([z0]))[0]) >= 1.0
        pts = np.array([0.3 + 0.3j, 0.7 + 0.6j])
        back = g1(pts) * (pts - z0) ** 2
        assert back == pytest.approx(sp.parts[0](pts), rel=1e-12)

    def test_order_zero_is_identity(self, strip_split):
        f, s1, s2, sp = strip_split
        g1, g2, z0 = deweight(sp.parts[0], sp.parts[1], s1, s2, 0)
        assert g1 is sp.parts[0] and g2 is sp.parts[1] and z0 is None

    def test_union_covering_all_directions_is_rejected(self):
        f1 = f2 = Const(0.0)
        lower = dom.HalfPlane(-0.5 * np.pi, -1.0)
        with pytest.raises(NoExteriorPoint):
            deweight(f1, f2, dom.UPPER_HALF_PLANE, lower, 1)
