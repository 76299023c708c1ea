"""Handle-cycle periods on the doubled surface and the lambda matrix."""

import numpy as np
import pytest

import hejhal_lab as hl
from hejhal_lab import periods
from hejhal_lab.errors import WTooCloseToCut

import oracles


def test_dF_periods_topological(ws_annulus_small):
    # the period of dF_j along the j-th handle cycle is exactly 2
    val = hl.beta_period_dF(ws_annulus_small, 1, 1)
    assert abs(val - 2.0) < 1e-8


def test_dF_periods_kronecker(ws_blob3):
    for j in (1, 2):
        for k in (1, 2):
            val = hl.beta_period_dF(ws_blob3, j, k)
            assert abs(val - 2.0 * (j == k)) < 1e-6, (j, k)


def test_kappa_periods_vanish(ws_annulus):
    # needs the production resolution: the cut-field continuation floor at
    # N = 64 sits near 2e-4, at N = 256 below 1e-11 (spectral decay)
    for w in (0.62 * np.exp(1.0j), 0.8j, -0.71, 0.67 * np.exp(2.1j)):
        val = hl.beta_period_kappa(ws_annulus, 1, w)
        assert abs(val) < 1e-9, w


def test_sigma_periods_nonzero_and_rank(ws_annulus_small):
    s, rank = hl.sigma_span_rank(ws_annulus_small)
    assert rank == 1
    assert s[0] > 1e-6


def test_sigma_rank_full_on_three_connected(ws_blob3):
    s, rank = hl.sigma_span_rank(ws_blob3)
    assert rank == 2
    assert s[-1] > 1e-8 * s[0]


def test_H_period_linear_in_fprime(ws_annulus):
    # the H-form period at w equals 2 sum_i lambda_ji conj(F_i'(w))
    lam = hl.lambda_from_fit(ws_annulus)
    w = 0.72 * np.exp(0.5j)
    per = periods.beta_period_H(ws_annulus, 1, w)
    fp = ws_annulus.fprime_matrix(np.array([w]))[0, 0]
    predicted = 2.0 * lam.matrix[0, 0] * np.conj(fp)
    assert abs(per - predicted) < 1e-4 * abs(predicted)


def test_lambda_fit_matches_series_value(ws_annulus):
    lam = hl.lambda_from_fit(ws_annulus)
    assert lam.matrix.shape == (1, 1)
    rel = abs(lam.matrix[0, 0] - oracles.ANNULUS_LAMBDA11) / oracles.ANNULUS_LAMBDA11
    assert rel < 1e-6
    assert lam.asymmetry <= 1e-12
    assert lam.residual < 1e-8


def test_lambda_methods_agree(ws_annulus):
    lam_fit = hl.lambda_from_fit(ws_annulus)
    lam_H = hl.lambda_from_periods(ws_annulus, "H")
    rel = abs(lam_fit.matrix[0, 0] - lam_H.matrix[0, 0]) / lam_fit.matrix[0, 0]
    assert rel < 1e-4


def test_lambda_disk_is_empty(ws_disk):
    lam = hl.lambda_from_fit(ws_disk)
    assert lam.m == 0
    assert lam.eigenvalues().size == 0
    assert lam.residual < 1e-8          # pure identity residual on the disk


def test_cut_gradient_purely_imaginary(ws_annulus):
    val = periods.cut_gradient_integral(ws_annulus, 1, 0.8j)
    assert abs(val.real) < 1e-8


def test_period_vector_validation(ws_annulus_small):
    with pytest.raises(ValueError):
        hl.period_vector(ws_annulus_small, "dF")          # j missing
    with pytest.raises(ValueError):
        hl.period_vector(ws_annulus_small, "kappa")       # w missing
    with pytest.raises(ValueError):
        hl.period_vector(ws_annulus_small, "nonsense", w=0.8j)
    vec = hl.period_vector(ws_annulus_small, "sigma", w=0.8j)
    assert vec.values.shape == (1,)
    assert vec.form == "sigma"


def test_w_on_cut_rejected(ws_annulus_small):
    arc = ws_annulus_small.arc(1)
    mid = 0.5 * (arc.z0 + arc.z1)
    with pytest.raises(WTooCloseToCut):
        hl.beta_period_kappa(ws_annulus_small, 1, mid)


def test_workspace_resolution_floor(dom_annulus):
    ws = hl.Workspace(dom_annulus, N=64)
    assert max(ws.grid.Ns) == 64
    assert ws.m == 1
    assert ws.safe_distance() > 0
