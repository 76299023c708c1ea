"""Szego/Garabedian kernels, the projection, and the extremal map."""

import numpy as np
import pytest

from hejhal_lab import _kernels_py, geometry, szego

import oracles


def test_disk_szego_closed_form(ws_disk):
    w = 0.3 + 0.2j
    fld = ws_disk.field(w)
    assert np.abs(fld.trace - oracles.disk_szego(ws_disk.grid.z, w)).max() < 1e-12
    pts = np.array([0.0, 0.5j, -0.6 + 0.1j])
    assert np.abs(fld.szego(pts) - oracles.disk_szego(pts, w)).max() < 1e-12
    assert np.abs(fld.szego_dz(pts)
                  - np.conj(w) / (2 * np.pi * (1 - pts * np.conj(w)) ** 2)).max() < 1e-11


def test_disk_garabedian_closed_form(ws_disk):
    w = -0.25 + 0.4j
    fld = ws_disk.field(w)
    pts = np.array([0.55, -0.3j, 0.2 + 0.6j])
    assert np.abs(fld.garabedian(pts) - oracles.disk_garabedian(pts, w)).max() < 1e-12
    assert np.abs(fld.garabedian_dz(pts)
                  + 1.0 / (2 * np.pi * (pts - w) ** 2)).max() < 1e-11


def test_annulus_szego_series(ws_annulus):
    w = 0.65 * np.exp(0.7j)
    fld = ws_annulus.field(w)
    pts = np.array([0.55, 0.8j, -0.7, 0.6 * np.exp(-1.2j)])
    assert np.abs(fld.szego(pts) - oracles.annulus_szego(pts, w)).max() < 1e-11
    assert float(np.real(fld.at_param())) > 0


def test_kerzman_stein_matrix_structure(dom_blob3):
    grid = geometry.sample_boundary(dom_blob3, 64)
    sqrtw = np.sqrt(np.abs(grid.cw))
    A = _kernels_py.assemble_ks(grid.z, grid.T, sqrtw)
    # skew-Hermitian with exactly zero diagonal
    assert np.abs(A + A.conj().T).max() < 1e-14
    assert np.abs(np.diag(A)).max() == 0.0


def test_kerzman_stein_vanishes_on_circle(dom_disk):
    grid = geometry.sample_boundary(dom_disk, 64)
    sqrtw = np.sqrt(np.abs(grid.cw))
    A = _kernels_py.assemble_ks(grid.z, grid.T, sqrtw)
    assert np.abs(A).max() < 1e-14


def test_ahlfors_map_disk_is_identity(ws_disk):
    amap = szego.ahlfors_map(ws_disk.szego, 0.0)
    pts = np.array([0.3, -0.5j, 0.4 + 0.4j, 0.85])
    assert np.abs(amap(pts) - pts).max() < 1e-10
    assert abs(amap.fprime_at_a() - 1.0) < 1e-10


def test_ahlfors_map_annulus_properties(ws_annulus):
    a = 0.7
    amap = szego.ahlfors_map(ws_annulus.szego, a)
    # total winding of the boundary trace equals the connectivity
    # (argument principle: the map takes every unit-circle value n times)
    tr = amap.boundary_trace()
    total = 0.0
    for sl in ws_annulus.grid.slices:
        vals = tr[sl]
        dphase = np.angle(np.roll(vals, -1) / vals)   # closed loop per curve
        total += dphase.sum() / (2.0 * np.pi)
    assert abs(total - 2.0) < 1e-8
    # f(a) = 0 (evaluate just off a to dodge the L pole at a itself)
    near = a + 1e-3
    assert abs(amap(np.array([near]))[0]) < 5e-3
    # normalization f'(a) = 2 pi S(a, a) > 0
    assert amap.fprime_at_a() > 0


def test_szego_projection_idempotent_on_hardy_space(ws_disk):
    grid = ws_disk.grid
    analytic = grid.z ** 3 - 0.4 * grid.z + 0.1j
    proj = szego.szego_projection(grid, analytic)
    assert np.abs(proj.values - analytic).max() < 1e-11
    # conj(z^k), k >= 1, projects to zero on the circle
    anti = np.conj(grid.z) ** 2
    proj0 = szego.szego_projection(grid, anti)
    assert np.abs(proj0.values).max() < 1e-11


def test_solver_conditioning_reported(ws_annulus_small):
    assert ws_annulus_small.szego.rcond > 1e-8
    fld = ws_annulus_small.field(0.7)
    assert fld.residual is None or fld.residual < 1e-10
