"""Spectral quadrature, trigonometric interpolation, and Cauchy evaluation."""

import numpy as np
import pytest

from hejhal_lab import geometry, quadrature
from hejhal_lab.errors import MeasureMismatch, TooCloseToBoundary

RNG = np.random.default_rng(2024)


def test_integrate_closed_perimeter_and_winding(dom_annulus):
    grid = geometry.sample_boundary(dom_annulus, 64)
    ones = np.ones(grid.total)
    perim = quadrature.integrate_closed(grid, ones, measure="ds")
    assert np.isclose(float(np.real(perim)), 2.0 * np.pi * 1.5, atol=1e-12)
    # closed curves: integral of dz vanishes, integral of dz/z counts winding
    assert abs(quadrature.integrate_closed(grid, ones, measure="dz")) < 1e-13
    w = quadrature.integrate_closed(grid, 1.0 / grid.z, measure="dz")
    # outer counterclockwise + inner clockwise each circle the origin once
    assert np.isclose(w / (2.0j * np.pi), 0.0, atol=1e-12)


def test_measure_mismatch_raised(dom_annulus):
    grid = geometry.sample_boundary(dom_annulus, 32)
    f = quadrature.boundary_function(grid, np.ones(grid.total), measure="dz")
    with pytest.raises(MeasureMismatch):
        quadrature.integrate_closed(grid, f, measure="ds")


def test_spectral_derivative_exact_on_trig_polynomials(dom_annulus):
    grid = geometry.sample_boundary(dom_annulus, 64)
    vals = np.empty(grid.total, dtype=np.complex128)
    expect = np.empty_like(vals)
    for sl, N in zip(grid.slices, grid.Ns):
        t = 2.0 * np.pi * np.arange(N) / N
        vals[sl] = np.cos(3 * t) + 2.0j * np.sin(5 * t)
        expect[sl] = -3 * np.sin(3 * t) + 10.0j * np.cos(5 * t)
    got = quadrature.spectral_derivative(grid, vals)
    assert np.abs(got - expect).max() < 1e-12


def test_fourier_interp_and_upsample_exact():
    N = 32
    t = 2.0 * np.pi * np.arange(N) / N
    f = lambda s: np.exp(3j * s) + 2.0 * np.cos(4 * s) - 1.0j
    vals = f(t)
    s = RNG.uniform(0.0, 2.0 * np.pi, 17)
    assert np.abs(quadrature.fourier_interp(vals, s) - f(s)).max() < 1e-13
    up = quadrature.fourier_upsample(vals, 4)
    t4 = 2.0 * np.pi * np.arange(4 * N) / (4 * N)
    assert np.abs(up - f(t4)).max() < 1e-13


def test_cauchy_eval_reproduces_analytic_function(dom_annulus):
    # the plain rule needs five grid spacings of clearance from both circles,
    # which in this thin annulus only exists near the midline at higher N
    grid = geometry.sample_boundary(dom_annulus, 192)
    f = lambda z: z ** 3 - 2.0 / z + 0.5j   # analytic on the closed annulus
    pts = np.array([0.75, -0.75j, 0.74 * np.exp(2.0j)])
    got = quadrature.cauchy_eval(grid, f(grid.z), pts)
    assert np.abs(got - f(pts)).max() < 1e-12
    d1 = quadrature.cauchy_eval(grid, f(grid.z), pts, m=1)
    assert np.abs(d1 - (3.0 * pts ** 2 + 2.0 / pts ** 2)).max() < 1e-10


def test_cauchy_eval_clearance_guard(dom_annulus):
    grid = geometry.sample_boundary(dom_annulus, 64)
    with pytest.raises(TooCloseToBoundary):
        quadrature.cauchy_eval(grid, np.ones(grid.total),
                               np.array([0.999999]))


def test_close_evaluation_ladder_matches_analytic(dom_annulus):
    # CauchyDensity must stay accurate far inside the clearance radius of
    # the plain rule, down to its own documented floor
    grid = geometry.sample_boundary(dom_annulus, 96)
    f = lambda z: np.exp(z) + 1.0 / z
    dens = f(grid.z)
    cd = quadrature.CauchyDensity(grid, dens, pole_order=1)
    for dist in (3e-2, 3e-3, 5e-4):
        pts = np.array([(1.0 - dist) * np.exp(0.3j),
                        (0.5 + dist) * np.exp(-1.1j)])
        got = cd(pts) / (2.0j * np.pi)
        assert np.abs(got - f(pts)).max() < 1e-9, f"dist={dist}"


def test_close_evaluation_floor_guard(dom_annulus):
    grid = geometry.sample_boundary(dom_annulus, 64)
    cd = quadrature.CauchyDensity(grid, np.ones(grid.total), pole_order=1)
    with pytest.raises(TooCloseToBoundary):
        cd(np.array([1.0 - 1e-12]))


def test_second_order_pole_close_evaluation(dom_annulus):
    grid = geometry.sample_boundary(dom_annulus, 96)
    f = lambda z: z ** 2 + 3.0 / z
    cd = quadrature.CauchyDensity(grid, f(grid.z), pole_order=2)
    pts = np.array([(1.0 - 2e-3) * np.exp(1.9j)])
    got = cd(pts) / (2.0j * np.pi)
    assert np.abs(got - (2.0 * pts - 3.0 / pts ** 2)).max() < 1e-8


def test_arc_integration_exact_polynomial(ws_annulus_small):
    arc = ws_annulus_small.arc(1)
    val = arc.integrate(arc.zq ** 2)
    a, b = arc.z0, arc.z1
    assert np.isclose(val, (b ** 3 - a ** 3) / 3.0, atol=1e-12)
