"""Periods of kernel one-forms along the handle cycles of the double.

An n-connected domain doubles to a compact surface of genus n-1.  Each
handle cycle beta_j is realised concretely as a cut sigma_j (a straight arc
from the outer boundary to inner curve j) traversed on the front sheet and
back along its mirror copy on the back sheet.  Since the back sheet carries
the conjugate structure, every period computed here takes the form

    int_{beta_j} = int_{sigma_j} front(z) dz  +  conj( int_{sigma_j} back(z) dz )

with (front, back) integrand pairs

    dF_k          :  F_k'        and  F_k'          (so the period is real),
    kappa_w       :  K(., w)     and  Lambda(., w),
    sigma_w       :  S(., w)^2   and  L(., w)^2,

where K and Lambda are the Bergman kernel and its adjoint, S and L the
Szego and Garabedian kernels, and F_k' twice the z-derivative of the k-th
harmonic measure.  The combination H = kappa - 4 pi sigma is holomorphic in
w and linear in the conjugated F_j'(w); its coefficients recover the lambda
matrix of the kernel identity K = 4 pi S^2 + sum lambda_ij F_i' conj(F_j').

A Workspace object bundles the boundary grid, the cut system and the lazily
constructed solvers so that repeated period evaluations share all dense
factorizations.
"""

from __future__ import annotations

from dataclasses import dataclass, field as _dc_field

import numpy as np
from numpy.polynomial import chebyshev as _cheb

from . import geometry, laplace, szego
from .errors import (
    CutConstructionFailed,
    RankDeficientSamples,
    UnderResolved,
    WTooCloseToCut,
)
from .quadrature import SPACING_FACTOR

__all__ = [
    "Workspace",
    "PeriodVector",
    "LambdaMatrix",
    "beta_period_dF",
    "beta_period_kappa",
    "beta_period_sigma",
    "beta_period_H",
    "period_vector",
    "lambda_from_periods",
    "sigma_span_rank",
    "cut_gradient_integral",
]

# Sign convention for the back-sheet half of a cycle.  With the slit
# traversed forward on the front sheet and backward on the mirror sheet the
# two contributions add as front + conj(back); the convention is pinned by
# the requirement that the kappa period of the Bergman kernel vanishes.
BACKSIDE_SIGN = 1.0

# Minimum nodes per curve for the double cut-integral method: its accuracy
# near the cut endpoints is governed by the continuation window (a few grid
# spacings), so it solves on at least this resolution regardless of the
# caller's grid.
DOUBLE_FLOOR_N = 512


def _two_sided(front_integral, back_integral):
    return front_integral + BACKSIDE_SIGN * np.conj(back_integral)


# --------------------------------------------------------------------------
# workspace
# --------------------------------------------------------------------------

class Workspace:
    """Shared solver state for period computations on one domain.

    Bundles the boundary grid, the cut system sigma_j (with slid copies
    sigma~_j), the Dirichlet and Szego boundary solvers, the harmonic
    measures, and bounded caches of Green's functions (keyed by pole) and
    Szego fields (keyed by parameter point).
    """

    MAX_GREEN_CACHE = 48
    MAX_FIELD_CACHE = 96

    def __init__(self, domain, N=geometry.DEFAULT_N, cuts=None, grid=None):
        self.domain = domain
        self.grid = grid if grid is not None else geometry.sample_boundary(domain, N)
        if cuts is None and domain.n > 1:
            cuts = geometry.build_cuts(domain)
        self.cuts = cuts
        self._dirichlet = None
        self._szego = None
        self._fine_szego = None
        self._measures = None
        self._green = {}
        self._fields = {}

    # -- lazily built solvers ------------------------------------------------

    @property
    def n(self):
        return self.domain.n

    @property
    def m(self):
        """Genus of the double = number of inner curves."""
        return self.domain.n - 1

    @property
    def dirichlet(self):
        if self._dirichlet is None:
            self._dirichlet = laplace.dirichlet_solver(self.grid)
        return self._dirichlet

    @property
    def szego(self):
        if self._szego is None:
            self._szego = szego.szego_solver(self.grid)
        return self._szego

    @property
    def fine_szego(self):
        """Szego solver on a doubled grid, for parameters near the boundary."""
        if self._fine_szego is None:
            fine = geometry.BoundaryGrid(self.domain, [2 * N for N in self.grid.Ns])
            self._fine_szego = szego.SzegoSolver(fine)
        return self._fine_szego

    @property
    def measures(self):
        if self._measures is None:
            self._measures = laplace.harmonic_measures(self.dirichlet)
        return self._measures

    def green(self, w):
        w = complex(w)
        if w not in self._green:
            if len(self._green) >= self.MAX_GREEN_CACHE:
                self._green.pop(next(iter(self._green)))
            self._green[w] = laplace.GreenFunction(self.dirichlet, w)
        return self._green[w]

    def field(self, a):
        a = complex(a)
        if a not in self._fields:
            if len(self._fields) >= self.MAX_FIELD_CACHE:
                self._fields.pop(next(iter(self._fields)))
            self._fields[a] = self.szego.field(a)
        return self._fields[a]

    def fprime_matrix(self, points):
        """F_j'(points) stacked as an (n-1, len(points)) array."""
        pts = np.asarray(points, dtype=np.complex128).ravel()
        if self.m == 0:
            return np.empty((0, pts.size), dtype=np.complex128)
        return np.vstack([hm.fprime(pts) for hm in self.measures])

    def safe_distance(self):
        """Distance from the boundary beyond which interior evaluation and
        parameter placement on the base grid are fully resolved."""
        return SPACING_FACTOR * float(self.grid.h_max.max())

    def interior_points(self, count, margin=0.05, seed=42):
        return geometry.interior_samples(
            self.domain, count, margin=margin, seed=seed, cuts=self.cuts)

    # -- cut access ----------------------------------------------------------

    def arc(self, j, slid=False):
        """Cut arc sigma_j (or its slid copy), j = 1..n-1."""
        self._require_cuts()
        if not 1 <= j <= self.m:
            raise IndexError(f"cut index {j} outside 1..{self.m}")
        return (self.cuts.slid if slid else self.cuts.arcs)[j - 1]

    def _require_cuts(self):
        if self.cuts is None:
            raise CutConstructionFailed(
                "domain is simply connected: no cuts, no handle cycles")


def _guard_w(ws, arc, w, margin=None):
    if margin is None:
        margin = 0.02 * ws.domain.diameter
    d = float(np.min(np.abs(arc.zq - complex(w))))
    dist_end = min(abs(complex(w) - arc.z0), abs(complex(w) - arc.z1))
    if min(d, dist_end) < margin:
        raise WTooCloseToCut(
            f"parameter point {w} lies {min(d, dist_end):.3e} from the cut "
            f"(need >= {margin:.3e}); move it or shrink the margin")


# --------------------------------------------------------------------------
# individual periods
# --------------------------------------------------------------------------

def beta_period_dF(ws, j, k, slid=False):
    """Period of dF_j = F_j' dz along beta_k; equals 2 * delta_jk.

    Both sheet halves contribute the same real part, so the period is
    2 Re int_{sigma_k} F_j' dz.
    """
    arc = ws.arc(k, slid=slid)
    hm = ws.measures[j - 1]
    front = arc.integrate(hm.fprime(arc.zq))
    val = _two_sided(front, front)
    return float(np.real(val))


def beta_period_kappa(ws, j, w, margin=None):
    """Period of the Bergman-kernel form kappa_w = K(., w) dz along beta_j.

    Vanishes for every interior w; the back-sheet trace of kappa_w is the
    adjoint-kernel form Lambda(., w) dz.
    """
    arc = ws.arc(j)
    _guard_w(ws, arc, w, margin)
    gf = ws.green(w)
    front = arc.integrate(gf.bergman(arc.zq))
    back = arc.integrate(gf.adjoint(arc.zq))
    return complex(_two_sided(front, back))


def beta_period_sigma(ws, j, w, margin=None):
    """Period of the squared Szego kernel form S(., w)^2 dz along beta_j.

    The back-sheet trace is the squared Garabedian kernel form L(., w)^2 dz.
    """
    arc = ws.arc(j)
    _guard_w(ws, arc, w, margin)
    fld = ws.field(w)
    front = arc.integrate(fld.szego(arc.zq) ** 2)
    back = arc.integrate(fld.garabedian(arc.zq) ** 2)
    return complex(_two_sided(front, back))


def beta_period_H(ws, j, w, margin=None):
    """Period of H_w = (K(., w) - 4 pi S(., w)^2) dz along beta_j.

    H_w is the part of the Bergman kernel spanned by the F_i', so its
    periods are linear in conj(F'(w)):

        P_j(w) = 2 sum_i lambda_ji conj(F_i'(w)).
    """
    kappa = beta_period_kappa(ws, j, w, margin)
    sig = beta_period_sigma(ws, j, w, margin)
    return complex(kappa - 4.0 * np.pi * sig)


def cut_gradient_integral(ws, j, w, margin=None):
    """int_{sigma_j} dG_w/dz dz along the cut (front sheet only).

    For the Green's function this integral is purely imaginary: its real
    part is half the increment of G_w along the cut, which vanishes because
    both endpoints lie on the boundary where G_w = 0.
    """
    arc = ws.arc(j)
    _guard_w(ws, arc, w, margin)
    gf = ws.green(w)
    return complex(arc.integrate(gf.dz(arc.zq)))


@dataclass(frozen=True)
class PeriodVector:
    """All beta_j periods of one one-form, j = 1..n-1."""

    form: str                      # "dF", "kappa", "sigma", or "H"
    values: np.ndarray             # complex, shape (n-1,)
    param: complex | None = None   # parameter point w (None for dF)
    index: int | None = None       # differential index j (dF only)


def period_vector(ws, form, w=None, j=None, margin=None):
    """Assemble the vector of beta_k periods of one form over all cycles."""
    m = ws.m
    if form == "dF":
        if j is None:
            raise ValueError("period_vector(form='dF') needs the index j")
        vals = np.array([beta_period_dF(ws, j, k) for k in range(1, m + 1)],
                        dtype=np.complex128)
        return PeriodVector("dF", vals, index=j)
    if w is None:
        raise ValueError(f"period_vector(form={form!r}) needs the point w")
    fn = {"kappa": beta_period_kappa,
          "sigma": beta_period_sigma,
          "H": beta_period_H}.get(form)
    if fn is None:
        raise ValueError(f"unknown form {form!r}")
    vals = np.array([fn(ws, k, w, margin) for k in range(1, m + 1)],
                    dtype=np.complex128)
    return PeriodVector(form, vals, param=complex(w))


# --------------------------------------------------------------------------
# lambda matrix
# --------------------------------------------------------------------------

@dataclass(frozen=True)
class LambdaMatrix:
    """Real symmetric coefficient matrix of the kernel identity.

    `matrix` is symmetrized; `asymmetry` is the largest absolute entry of
    the raw matrix minus its transpose, a consistency diagnostic of the
    underlying computation.  `residual` is the relative least-squares
    residual where the method produces one.
    """

    matrix: np.ndarray
    method: str
    asymmetry: float
    residual: float | None = None
    info: dict = _dc_field(default_factory=dict)

    @property
    def m(self):
        return self.matrix.shape[0]

    def eigenvalues(self):
        if self.m == 0:
            return np.empty(0)
        return np.linalg.eigvalsh(self.matrix)


def _symmetrized(raw, method, residual=None, info=None):
    raw = np.asarray(raw, dtype=float)
    asym = float(np.max(np.abs(raw - raw.T))) if raw.size else 0.0
    return LambdaMatrix(0.5 * (raw + raw.T), method, asym, residual,
                        dict(info or {}))


def lambda_from_periods(ws, method="H", w_samples=None, count=None,
                        margin=0.05, seed=42):
    """Lambda matrix from periods of kernel forms along the handle cycles.

    method "H":      least-squares fit of P_j(w) = 2 sum_i lambda_ji
                     conj(F_i'(w)) over interior sample points w.
    method "double": direct double cut integrals of the squared Szego
                     kernel,
                     lambda_ij = -2 pi Re int_{out_i} conj(p_j(z)) dz with
                     p_j(z) = int_{sigma_j} S(w, z)^2 dw
                              + conj(int_{sigma_j} L(w, z)^2 dw),
                     where out_i is sigma_i for i != j and the slid copy
                     sigma~_i on the diagonal (the inner and outer cut must
                     not intersect).

    The double method solves near the cut endpoints, where the continuation
    window is set by the grid spacing; it therefore enforces a floor of
    DOUBLE_FLOOR_N nodes per curve (solving on an internally refined
    workspace when the caller's grid is coarser), which also makes its
    result stable under grid refinement of the caller.
    """
    ws._require_cuts()
    m = ws.m
    if method == "H":
        return _lambda_H(ws, w_samples, count, margin, seed)
    if method == "double":
        if w_samples is not None or count is not None:
            raise ValueError("the double-integral method takes no samples")
        if min(ws.grid.Ns) < DOUBLE_FLOOR_N:
            ws = Workspace(ws.domain,
                           N=[max(n, DOUBLE_FLOOR_N) for n in ws.grid.Ns])
            ws._require_cuts()
        return _lambda_double(ws)
    raise ValueError(f"unknown method {method!r}")


def _lambda_H(ws, w_samples, count, margin, seed):
    m = ws.m
    if w_samples is None:
        if count is None:
            count = max(6, 4 * m)
        w_samples = ws.interior_points(count, margin=margin, seed=seed)
    w_samples = np.asarray(w_samples, dtype=np.complex128).ravel()
    if w_samples.size < 2 * m:
        raise RankDeficientSamples(
            f"{w_samples.size} samples cannot determine {m} columns "
            f"(need at least {2 * m})")

    coeff = 2.0 * np.conj(ws.fprime_matrix(w_samples)).T   # (nw, m)
    periods = np.empty((w_samples.size, m), dtype=np.complex128)
    for iw, w in enumerate(w_samples):
        periods[iw] = period_vector(ws, "H", w=w).values

    A = np.vstack([coeff.real, coeff.imag])                # (2 nw, m)
    B = np.vstack([periods.real, periods.imag])            # (2 nw, m)
    sv = np.linalg.svd(A, compute_uv=False)
    if sv[0] == 0.0 or sv[-1] < 1e-10 * sv[0]:
        raise RankDeficientSamples(
            f"sample points give rank-deficient F' data "
            f"(singular value ratio {sv[-1] / max(sv[0], 1e-300):.3e})")
    X, *_ = np.linalg.lstsq(A, B, rcond=None)
    raw = X.T                                              # lambda_ji = X[i, j]
    fitres = np.linalg.norm(A @ X - B) / max(np.linalg.norm(B), 1e-300)
    return _symmetrized(raw, "H-periods", residual=float(fitres),
                        info={"samples": w_samples, "coeff_sv": sv})


# -- double cut integrals ---------------------------------------------------

def _cut_fields(ws, arc):
    """Szego and Garabedian values S(z_t, w_q), L(z_t, w_q) for quadrature
    nodes w_q on the arc, evaluated by three tiers of accuracy:

    distance >= d_safe          : base-grid solve,
    d_safe/2 <= distance < d_safe: doubled-grid solve,
    distance <  d_safe/2        : polynomial continuation in the arc
                                  parameter from the resolved nodes.

    Returns a callable evaluating both value tables at given z targets.
    """
    d = ws.domain.boundary_distance(arc.zq)
    d_safe = ws.safe_distance()
    tier1 = d >= d_safe
    tier2 = (~tier1) & (d >= 0.5 * d_safe)
    tier3 = ~(tier1 | tier2)
    n_res = int(np.count_nonzero(tier1 | tier2))
    if n_res < 8:
        raise UnderResolved(
            f"only {n_res} of {arc.zq.size} cut quadrature nodes are "
            f"resolvable at this grid size")

    x = 2.0 * arc.tau - 1.0
    resolved = tier1 | tier2

    def evaluate(z_targets):
        nq, nt = arc.zq.size, z_targets.size
        VS = np.empty((nq, nt), dtype=np.complex128)
        VL = np.empty((nq, nt), dtype=np.complex128)
        for q in np.flatnonzero(tier1):
            fld = ws.szego.field(arc.zq[q])
            VS[q] = fld.szego(z_targets)
            VL[q] = fld.garabedian(z_targets)
        for q in np.flatnonzero(tier2):
            fld = ws.fine_szego.field(arc.zq[q])
            VS[q] = fld.szego(z_targets)
            VL[q] = fld.garabedian(z_targets)
        if np.any(tier3):
            deg = int(min(14, n_res - 4))
            if deg < 3:
                raise UnderResolved("too few resolved nodes for continuation "
                                    "along the cut")
            for V in (VS, VL):
                coef = _cheb.chebfit(x[resolved], V[resolved], deg)
                V[tier3] = _cheb.chebval(x[tier3], coef).T
        return VS, VL

    return evaluate


def _lambda_double(ws):
    m = ws.m
    raw = np.empty((m, m))
    for j in range(1, m + 1):
        inner = ws.arc(j)
        outers = [ws.arc(i, slid=(i == j)) for i in range(1, m + 1)]
        z_targets = np.concatenate([a.zq for a in outers])
        VS, VL = _cut_fields(ws, inner)(z_targets)
        # p_j(z_t): S(w, z) = conj(S(z, w)) and L(w, z)^2 = L(z, w)^2
        front = inner.dz * (inner.wq[:, None] * np.conj(VS) ** 2).sum(axis=0)
        back = inner.dz * (inner.wq[:, None] * VL ** 2).sum(axis=0)
        p = front + BACKSIDE_SIGN * np.conj(back)
        pos = 0
        for i, arc_out in enumerate(outers, start=1):
            seg = p[pos:pos + arc_out.zq.size]
            pos += arc_out.zq.size
            integral = arc_out.dz * np.sum(arc_out.wq * np.conj(seg))
            raw[i - 1, j - 1] = -2.0 * np.pi * float(np.real(integral))
    return _symmetrized(raw, "double-periods")


# --------------------------------------------------------------------------
# span of the sigma periods
# --------------------------------------------------------------------------

def sigma_span_rank(ws, w_samples=None, count=None, margin=0.05, seed=42,
                    rtol=1e-8, diagnostics=False):
    """Singular values and rank of the sigma-period vectors over sample w.

    Stacks the vectors (int_{beta_j} S(., w)^2-form)_j for interior sample
    points w and reports the numerical rank of their complex span.  With
    diagnostics=True also returns the rank of their span over the reals
    (viewing C^(n-1) as R^(2n-2)).
    """
    ws._require_cuts()
    m = ws.m
    if w_samples is None:
        if count is None:
            count = max(8, 4 * m)
        w_samples = ws.interior_points(count, margin=margin, seed=seed)
    w_samples = np.asarray(w_samples, dtype=np.complex128).ravel()

    rows = np.vstack([period_vector(ws, "sigma", w=w).values
                      for w in w_samples])
    s = np.linalg.svd(rows, compute_uv=False)
    rank = int(np.count_nonzero(s > rtol * s[0])) if s.size and s[0] > 0 else 0
    if not diagnostics:
        return s, rank
    real_rows = np.hstack([rows.real, rows.imag])
    rs = np.linalg.svd(real_rows, compute_uv=False)
    real_rank = (int(np.count_nonzero(rs > rtol * rs[0]))
                 if rs.size and rs[0] > 0 else 0)
    return s, rank, {"real_singular_values": rs, "real_rank": real_rank,
                     "samples": w_samples, "rows": rows}
