"""Dirichlet problems, harmonic measures, and the Green function.

The solver represents a harmonic function as a double-layer potential plus
one logarithmic source inside each hole,

    u(p) = (1/2pi) oint mu(zeta) Im[d zeta / (zeta - p)]
           + sum_j s_j ln|p - q_j|,

collocated at the boundary nodes (jump relation u = mu/2 + PV + logs) with
one auxiliary moment condition per inner curve to fix the layer's null
space.  The resulting dense system is LU-factored once per grid and shared
by every right-hand side, including the finite-difference family used for
parameter derivatives of the Green function.
"""

import weakref

import numpy as np
from scipy.linalg import get_lapack_funcs, lu_factor, lu_solve

from ._backend import kernels
from .errors import IllConditioned, PoleTargetCollision
from .quadrature import CauchyDensity, spectral_derivative

_POLE_TOL = 1e-10
_SOLVER_CACHE = weakref.WeakKeyDictionary()


def dirichlet_solver(grid):
    """Per-grid cached solver (one LU factorisation per grid)."""
    if grid not in _SOLVER_CACHE:
        _SOLVER_CACHE[grid] = DirichletSolver(grid)
    return _SOLVER_CACHE[grid]


class DirichletSolver:
    """Shared-factorisation Dirichlet solver on a fixed boundary grid."""

    def __init__(self, grid, sources=None, rcond_floor=1e-12):
        self.grid = grid
        dom = grid.domain
        T = grid.total
        m = dom.n - 1

        if sources is None:
            sources = []
            for c in dom.inners:
                has0 = np.nonzero(c.ks == 0)[0]
                sources.append(complex(c.coeffs[has0[0]]) if has0.size else 0j)
        self.sources = np.asarray(sources, dtype=np.complex128)
        if self.sources.size != m:
            raise ValueError("need one interior source point per inner curve")
        for j, q in enumerate(self.sources):
            sl = grid.slices[j + 1]
            wind = np.sum(grid.cw[sl] / (grid.z[sl] - q)) / (2.0j * np.pi)
            if abs(wind + 1.0) > 0.25:      # inner curves run clockwise
                raise ValueError(
                    f"source point {q} does not lie inside inner curve {j + 1}")

        # smooth double-layer kernel; the diagonal is the curvature limit
        diag = np.empty(T)
        for ci, (curve, N, sl) in enumerate(zip(dom.curves, grid.Ns, grid.slices)):
            t = grid.t[ci]
            diag[sl] = np.imag(curve.eval(t, 2) / (2.0 * curve.eval(t, 1))) / N
        M = kernels.assemble_double_layer(grid.z, grid.cw, diag)

        A = np.zeros((T + m, T + m))
        A[:T, :T] = M
        A[np.arange(T), np.arange(T)] += 0.5
        for j in range(m):
            A[:T, T + j] = np.log(np.abs(grid.z - self.sources[j]))
            sl = grid.slices[j + 1]
            A[T + j, sl] = grid.w[sl]
        self._anorm = np.linalg.norm(A, 1)
        self._lu = lu_factor(A, overwrite_a=True)
        self._rcond = None
        self._rcond_floor = rcond_floor

    @property
    def rcond(self):
        """Reciprocal condition estimate of the collocation matrix."""
        if self._rcond is None:
            gecon = get_lapack_funcs("gecon", (self._lu[0],))
            self._rcond, info = gecon(self._lu[0], self._anorm)
            if info != 0:
                raise IllConditioned("condition estimation failed")
        return float(self._rcond)

    def _check_conditioning(self):
        if self.rcond < self._rcond_floor:
            raise IllConditioned(
                f"collocation matrix has rcond {self.rcond:.2e} "
                f"(floor {self._rcond_floor:.0e})")

    def solve(self, data):
        """Solve one Dirichlet problem; data is node values or a callable."""
        g = np.asarray(data(self.grid.z) if callable(data) else data)
        return self.solve_many(g.reshape(-1, 1))[0]

    def solve_many(self, data_columns):
        """Solve a batch of problems sharing the factorisation."""
        G = np.asarray(data_columns)
        T = self.grid.total
        if G.shape[0] != T:
            raise ValueError("data must be sampled on the boundary nodes")
        self._check_conditioning()
        m = self.sources.size
        rhs = np.zeros((T + m, G.shape[1]), dtype=G.dtype)
        rhs[:T] = G
        X = lu_solve(self._lu, rhs)
        return [DirichletSolution(self, X[:T, k], X[T:, k], G[:, k])
                for k in range(G.shape[1])]


class DirichletSolution:
    """One solved Dirichlet problem; evaluators stay accurate near the
    boundary via graded close evaluation.  Densities may be complex (linear
    combinations of solved problems), in which case u is interpreted by
    complex linearity."""

    def __init__(self, solver, mu, s, data=None):
        self.solver = solver
        self.mu = mu
        self.s = np.asarray(s)
        self.data = data
        self._cd = {}
        self._du_trace = None

    def combine(self, other, ca, cb):
        """ca * self + cb * other as a (possibly complex) density."""
        return DirichletSolution(self.solver, ca * self.mu + cb * other.mu,
                                 ca * self.s + cb * other.s)

    def _cauchy(self, p, conj_mu=False):
        key = (p, conj_mu)
        if key not in self._cd:
            dens = np.conj(self.mu) if conj_mu else self.mu
            self._cd[key] = CauchyDensity(self.solver.grid, dens, pole_order=p)
        return self._cd[key]

    def _logsum(self, pts, power=0):
        out = np.zeros(pts.shape, dtype=np.complex128)
        for sj, qj in zip(self.s, self.solver.sources):
            d = pts - qj
            if power == 0:
                out += sj * np.log(np.abs(d))
            elif power == 1:
                out += sj / (2.0 * d)
            else:
                out -= sj / (2.0 * d ** 2)
        return out

    def u(self, points):
        """Value of the harmonic function (complex for combined densities)."""
        pts = np.asarray(points, dtype=np.complex128)
        C = self._cauchy(1)(pts)
        if np.iscomplexobj(self.mu):
            Cc = self._cauchy(1, conj_mu=True)(pts)
            val = (C - np.conj(Cc)) / (4.0j * np.pi)
        else:
            val = C.imag / (2.0 * np.pi)
        out = val + self._logsum(pts, 0)
        return out if np.iscomplexobj(self.mu) or self.s.size else out.real

    def du_dz(self, points):
        """d/dz of the function (the anti-analytic part drops out)."""
        pts = np.asarray(points, dtype=np.complex128)
        return self._cauchy(2)(pts) / (4.0j * np.pi) + self._logsum(pts, 1)

    def d2u_dz2(self, points):
        pts = np.asarray(points, dtype=np.complex128)
        return self._cauchy(3)(pts) / (2.0j * np.pi) + self._logsum(pts, 2)

    def du_dz_trace(self):
        """Interior boundary limit of du/dz at the grid nodes.

        Integrating the differentiated layer potential by parts turns it
        into a Cauchy integral of the arclength derivative of the density,
        whose one-sided boundary limit is given exactly by the half-jump
        relation.  This avoids off-boundary extrapolation entirely and
        retains spectral accuracy.
        """
        if self._du_trace is None:
            from .szego import cauchy_boundary_apply
            grid = self.solver.grid
            mu = np.asarray(self.mu, dtype=np.complex128)
            gamma_prime = grid.speed * grid.T
            dmu = spectral_derivative(grid, mu) / gamma_prime
            trace = 0.5 * cauchy_boundary_apply(grid, dmu)
            self._du_trace = trace + self._logsum(grid.z, 1)
        return self._du_trace

    def boundary_trace(self):
        """Node values of u reassembled from the solved density: the
        half-jump plus the smooth double-layer kernel plus the sources."""
        grid = self.solver.grid
        trace = 0.5 * np.asarray(self.mu, dtype=np.complex128)
        diag = np.empty(grid.total)
        for ci, (curve, N, sl) in enumerate(zip(grid.domain.curves, grid.Ns,
                                                grid.slices)):
            t = grid.t[ci]
            diag[sl] = np.imag(curve.eval(t, 2) / (2.0 * curve.eval(t, 1))) / N
        M = kernels.assemble_double_layer(grid.z, grid.cw, diag)
        trace = trace + M @ self.mu + self._logsum(grid.z, 0)
        return trace

    def boundary_residual(self):
        """Max deviation of the re-evaluated boundary trace from the data."""
        if self.data is None:
            raise ValueError("no data recorded for this solution")
        return float(np.abs(self.boundary_trace() - self.data).max())


def solve_dirichlet(grid, data):
    """One Dirichlet solve on the per-grid cached solver."""
    return dirichlet_solver(grid).solve(data)


# --------------------------------------------------------------------------
# harmonic measure
# --------------------------------------------------------------------------

class HarmonicMeasure:
    """Harmonic measure omega_j of boundary curve j, with the derivative
    F_j' = 2 d omega_j / dz of its multi-valued analytic completion."""

    def __init__(self, solution, index):
        self.solution = solution
        self.index = index

    def omega(self, points):
        return np.real(self.solution.u(points))

    def fprime(self, points):
        return 2.0 * self.solution.du_dz(points)

    def fprime_trace(self):
        """Exact interior boundary trace of F_j' at the grid nodes."""
        return 2.0 * self.solution.du_dz_trace()

    def fprime2(self, points):
        return 2.0 * self.solution.d2u_dz2(points)


def _as_solver(grid_or_solver):
    if isinstance(grid_or_solver, DirichletSolver):
        return grid_or_solver
    return dirichlet_solver(grid_or_solver)


def harmonic_measure(grid_or_solver, j):
    """Harmonic measure of curve j (0 = outer): data 1 there, 0 elsewhere."""
    solver = _as_solver(grid_or_solver)
    grid = solver.grid
    data = np.zeros(grid.total)
    data[grid.slices[j]] = 1.0
    return HarmonicMeasure(solver.solve(data), j)


def harmonic_measures(grid_or_solver):
    """All inner-curve harmonic measures omega_1..omega_{n-1} in one batch."""
    solver = _as_solver(grid_or_solver)
    grid = solver.grid
    m = grid.n_curves - 1
    data = np.zeros((grid.total, m))
    for j in range(m):
        data[grid.slices[j + 1], j] = 1.0
    sols = solver.solve_many(data)
    return [HarmonicMeasure(s, j + 1) for j, s in enumerate(sols)]


# --------------------------------------------------------------------------
# Green function
# --------------------------------------------------------------------------

class GreenFunction:
    """Green function G(. , w) and its z- and w-derivatives for fixed w.

    The pole is handled in closed form; the smooth correction solves one
    Dirichlet problem.  Mixed second derivatives in w use Richardson-refined
    central differences applied to the solved densities, so each evaluator
    remains a single layer potential (accurate near the boundary).
    """

    def __init__(self, solver, w, h_rel=1e-4):
        self.solver = solver
        self.w = complex(w)
        dom = solver.grid.domain
        if not dom.contains([self.w])[0]:
            raise ValueError(f"parameter point {self.w} is not in the domain")
        self.h = h_rel * dom.diameter
        h = self.h
        offs = np.array([0.0, h, -h, h / 2, -h / 2,
                         1j * h, -1j * h, 1j * h / 2, -1j * h / 2])
        zb = solver.grid.z
        data = np.log(np.abs(zb[:, None] - (self.w + offs)[None, :]))
        sols = solver.solve_many(data)
        self.sol0 = sols[0]
        # Richardson central difference: (4 D_{h/2} - D_h) / 3
        wx = sols[3].combine(sols[4], 4.0 / (3.0 * h), -4.0 / (3.0 * h)) \
            .combine(sols[1].combine(sols[2], 1.0 / (6.0 * h), -1.0 / (6.0 * h)),
                     1.0, -1.0)
        wy = sols[7].combine(sols[8], 4.0 / (3.0 * h), -4.0 / (3.0 * h)) \
            .combine(sols[5].combine(sols[6], 1.0 / (6.0 * h), -1.0 / (6.0 * h)),
                     1.0, -1.0)
        self.sol_dw = wx.combine(wy, 0.5, -0.5j)      # d/dw
        self.sol_dwbar = wx.combine(wy, 0.5, 0.5j)    # d/dw-bar

    def _guard(self, pts):
        tol = _POLE_TOL * self.solver.grid.domain.diameter
        if np.any(np.abs(pts - self.w) < tol):
            raise PoleTargetCollision(
                f"evaluation point coincides with the pole at {self.w}")

    def value(self, points):
        pts = np.asarray(points, dtype=np.complex128)
        self._guard(pts)
        return np.real(self.sol0.u(pts)) - np.log(np.abs(pts - self.w))

    def dz(self, points):
        pts = np.asarray(points, dtype=np.complex128)
        self._guard(pts)
        return self.sol0.du_dz(pts) - 0.5 / (pts - self.w)

    def dzbar(self, points):
        return np.conj(self.dz(points))

    def dn(self, points, normals):
        """Directional derivative along the given unit normals."""
        return 2.0 * np.real(np.asarray(normals) * self.dz(points))

    def dzdw(self, points):
        pts = np.asarray(points, dtype=np.complex128)
        self._guard(pts)
        return self.sol_dw.du_dz(pts) - 0.5 / (pts - self.w) ** 2

    # exact boundary traces (interior limits at the grid nodes) -----------

    def value_trace(self):
        """Boundary values of G: zero up to the collocation residual."""
        return np.real(self.sol0.boundary_trace()) - self.sol0.data

    def dz_trace(self):
        """Interior boundary trace of dG/dz at the grid nodes."""
        zb = self.solver.grid.z
        return self.sol0.du_dz_trace() - 0.5 / (zb - self.w)

    def dn_trace(self):
        """Outward normal derivative of G at the grid nodes."""
        return 2.0 * np.real(self.solver.grid.nu * self.dz_trace())

    def bergman_trace(self):
        """Boundary trace of K(., w) taken from inside."""
        return -(2.0 / np.pi) * self.sol_dwbar.du_dz_trace()

    def adjoint_trace(self):
        """Boundary trace of the companion kernel Lambda(., w)."""
        zb = self.solver.grid.z
        return (1.0 / np.pi) / (zb - self.w) ** 2 \
            - (2.0 / np.pi) * self.sol_dw.du_dz_trace()

    def dzdwbar(self, points):
        pts = np.asarray(points, dtype=np.complex128)
        return self.sol_dwbar.du_dz(pts)

    # kernel functions -----------------------------------------------------

    def bergman(self, points):
        """K(z, w): reproducing kernel for square-integrable derivatives."""
        return -(2.0 / np.pi) * self.dzdwbar(points)

    def adjoint(self, points):
        """The symmetric companion kernel with the double pole at w."""
        pts = np.asarray(points, dtype=np.complex128)
        self._guard(pts)
        return (1.0 / np.pi) / (pts - self.w) ** 2 \
            - (2.0 / np.pi) * self.sol_dw.du_dz(pts)


def green_derivatives(grid_or_solver, w, points, which=("G",), normals=None):
    """Convenience wrapper: dict of requested Green-function fields at fixed
    parameter w.  Recognised keys: G, dz, dzbar, dzdw, dzdwbar, dn, K,
    Lambda ("dn" needs unit normals at the points)."""
    gf = GreenFunction(_as_solver(grid_or_solver), w)
    out = {}
    for key in which:
        if key == "G":
            out[key] = gf.value(points)
        elif key == "dz":
            out[key] = gf.dz(points)
        elif key == "dzbar":
            out[key] = gf.dzbar(points)
        elif key == "dzdw":
            out[key] = gf.dzdw(points)
        elif key == "dzdwbar":
            out[key] = gf.dzdwbar(points)
        elif key == "dn":
            if normals is None:
                raise ValueError("dn request requires unit normals")
            out[key] = gf.dn(points, normals)
        elif key == "K":
            out[key] = gf.bergman(points)
        elif key == "Lambda":
            out[key] = gf.adjoint(points)
        else:
            raise ValueError(f"unknown field {key!r}")
    return out


def bergman_kernels(grid_or_solver, w, points):
    """(K(z, w), Lambda(z, w)) at the given points for fixed w."""
    gf = GreenFunction(_as_solver(grid_or_solver), w)
    return gf.bergman(points), gf.adjoint(points)
