"""Curve/domain construction, validation, and sampling."""

import numpy as np
import pytest

import hejhal_lab as hl
from hejhal_lab import geometry
from hejhal_lab.errors import (CurveNesting, DegenerateCurve, HoleCollision,
                               SelfIntersectingCurve, UnderResolved)

from conftest import load_config


def test_circle_eval_and_orientation():
    c = hl.CurveParam.circle(center=1.0 + 1.0j, radius=2.0)
    t = np.array([0.0, np.pi / 2, np.pi])
    assert np.allclose(c.eval(t), 1.0 + 1.0j + 2.0 * np.exp(1j * t))
    assert np.allclose(c.eval(t, 1), 2.0j * np.exp(1j * t))
    assert c.orientation() > 0
    assert c.reversed().orientation() < 0


def test_complex_parameter_is_analytic_continuation():
    c = hl.CurveParam.circle(center=0.2j, radius=1.5)
    t = np.linspace(0.0, 2.0 * np.pi, 7) + 0.05j
    assert np.allclose(c.eval(t), 0.2j + 1.5 * np.exp(1j * t), atol=1e-14)
    # real parameters stay real-path values
    assert np.allclose(c.eval(t.real), c.eval(t - 0.05j), atol=1e-14)


def test_build_domain_fixes_orientations():
    outer = hl.CurveParam.circle(radius=1.0).reversed()       # clockwise
    inner = hl.CurveParam.circle(radius=0.3)                  # counterclockwise
    dom = hl.build_domain(outer, [inner])
    assert dom.curves[0].orientation() > 0
    assert dom.curves[1].orientation() < 0


def test_self_intersecting_loop_rejected():
    # limacon with an inner loop: e^{it} + 0.9 e^{2it}
    loop = hl.CurveParam.from_pairs([(0, 0.0, 0.0), (1, 1.0, 0.0),
                                     (2, 0.9, 0.0)])
    with pytest.raises(SelfIntersectingCurve):
        hl.build_domain(loop)


def test_touching_curves_rejected():
    outer = hl.CurveParam.circle(radius=1.0)
    tangent = hl.CurveParam.circle(center=0.5, radius=0.5)    # touches |z|=1
    with pytest.raises(SelfIntersectingCurve):
        hl.build_domain(outer, [tangent])


def test_hole_outside_outer_rejected():
    outer = hl.CurveParam.circle(radius=1.0)
    outside = hl.CurveParam.circle(center=3.0, radius=0.3)
    with pytest.raises(CurveNesting):
        hl.build_domain(outer, [outside])


def test_nested_holes_rejected():
    outer = hl.CurveParam.circle(radius=2.0)
    hole = hl.CurveParam.circle(center=0.0, radius=0.8)
    inside_hole = hl.CurveParam.circle(center=0.0, radius=0.3)
    with pytest.raises(CurveNesting):
        hl.build_domain(outer, [hole, inside_hole])


def test_degenerate_speed_rejected():
    # z(t) = 2 cos t traverses a segment; |z'| vanishes at t = 0, pi
    flat = hl.CurveParam.from_pairs([(1, 1.0, 0.0), (-1, 1.0, 0.0)])
    with pytest.raises(DegenerateCurve):
        hl.build_domain(flat)


def test_config_roundtrip(dom_blob3):
    dom2 = hl.domain_from_config(dom_blob3.to_config())
    t = np.linspace(0.0, 2.0 * np.pi, 21)
    for c1, c2 in zip(dom_blob3.curves, dom2.curves):
        assert np.allclose(c1.eval(t), c2.eval(t), atol=1e-14)


def test_config_role_validation():
    circle = [[0, 0.0, 0.0], [1, 1.0, 0.0]]
    with pytest.raises(ValueError):
        hl.domain_from_config({"curves": [{"role": "inner", "coeffs": circle}]})
    with pytest.raises(ValueError):
        hl.domain_from_config({"curves": [{"role": "outer", "coeffs": circle},
                                          {"role": "outer", "coeffs": circle}]})
    with pytest.raises(ValueError):
        hl.domain_from_config({"curves": [{"role": "boundary",
                                           "coeffs": circle}]})


def test_contains_and_boundary_distance(dom_annulus):
    pts = np.array([0.7, 0.7j, -0.6, 0.3, 1.2, 0.0])
    inside = dom_annulus.contains(pts)
    assert list(inside) == [True, True, True, False, False, False]
    d = dom_annulus.boundary_distance(np.array([0.7, 0.8]))
    assert np.allclose(d, [0.2, 0.2], atol=1e-8)


def test_interior_points_have_clearance(ws_annulus_small):
    pts = ws_annulus_small.interior_points(32, margin=0.05)
    assert pts.size == 32
    assert ws_annulus_small.domain.contains(pts).all()
    clearance = 0.05 * ws_annulus_small.domain.diameter
    assert ws_annulus_small.domain.boundary_distance(pts).min() >= clearance - 1e-12
    # deterministic for a fixed seed
    again = ws_annulus_small.interior_points(32, margin=0.05)
    assert np.array_equal(pts, again)


def test_radius_schedule_halves():
    sched = hl.radius_schedule(0.4, 5)
    assert np.allclose(sched, [0.4, 0.2, 0.1, 0.05, 0.025])


def test_shrinking_hole_family(dom_disk):
    fams = list(hl.shrinking_hole_family(dom_disk, [0.0, 0.0, 0.0],
                                         hl.radius_schedule(0.3, 3)))
    assert len(fams) == 3
    assert all(d.n == 2 for d in fams)
    radii = [max(abs(c) for c in d.curves[1].coeffs) for d in fams]
    assert np.allclose(radii, [0.3, 0.15, 0.075])


def test_shrinking_hole_collision(dom_disk):
    with pytest.raises(HoleCollision):
        list(hl.shrinking_hole_family(dom_disk, [0.9], [0.5]))


def test_boundary_grid_resolution_guards(dom_annulus):
    with pytest.raises(UnderResolved):
        geometry.sample_boundary(dom_annulus, 63)     # odd
    with pytest.raises(UnderResolved):
        geometry.sample_boundary(dom_annulus, 8)      # below 4 (2 deg + 1)
    grid = geometry.sample_boundary(dom_annulus, [64, 32])
    assert grid.total == 96


def test_boundary_grid_closes_curves(dom_blob3):
    grid = geometry.sample_boundary(dom_blob3, 64)
    # counterclockwise outer plus clockwise holes: total signed area of the
    # boundary equals the domain area, and each curve's dz sums to zero
    for sl in grid.slices:
        assert abs(grid.cw[sl].sum()) < 1e-12
    area = float(np.sum((np.conj(grid.z) * grid.cw).imag) / 2.0)
    assert area > 0
