"""Szego kernel, Garabedian companion, Szego projection, Ahlfors map.

The boundary values of S(. , a) solve a second-kind integral equation whose
operator is the skew-Hermitian commutator of the Cauchy projection with its
adjoint.  Weighting by sqrt(arclength weight) keeps the discrete operator
exactly skew-Hermitian, so one LU factorisation serves both the kernel
solves and the adjoint (projection) solves, and the system is uniformly
well conditioned (eigenvalues 1 + i t).
"""

import weakref

import numpy as np
from scipy.linalg import get_lapack_funcs, lu_factor, lu_solve
from scipy.sparse.linalg import LinearOperator, gmres

from ._backend import kernels
from .errors import NonConvergent
from .quadrature import BoundaryFunction, CauchyDensity, spectral_derivative

_GMRES_CUTOFF = 3000      # switch to iterative solves above this many nodes
_SOLVER_CACHE = weakref.WeakKeyDictionary()


def szego_solver(grid):
    """Per-grid cached solver (one factorisation per grid)."""
    if grid not in _SOLVER_CACHE:
        _SOLVER_CACHE[grid] = SzegoSolver(grid)
    return _SOLVER_CACHE[grid]


def cauchy_boundary_apply(grid, values, chunk=256):
    """Boundary-to-boundary Cauchy (analytic projection onto traces of
    holomorphic functions when applied to such traces): the principal value
    plus half-jump operator, discretised with the singularity-subtraction
    trapezoid rule."""
    x = np.asarray(values, dtype=np.complex128)
    T = grid.total
    xp = spectral_derivative(grid, x)
    dt = np.concatenate([np.full(N, 2.0 * np.pi / N) for N in grid.Ns])
    out = x + xp * dt * (1.0 / (2.0j * np.pi))
    for lo in range(0, T, chunk):
        hi = min(lo + chunk, T)
        D = grid.z[:, None] - grid.z[None, lo:hi]        # z_k - z_i
        np.fill_diagonal(D[lo:hi, :], np.inf)
        out[lo:hi] += np.sum((x[:, None] - x[None, lo:hi]) * grid.cw[:, None]
                             / D, axis=0) / (2.0j * np.pi)
    return out


class SzegoSolver:
    """Factorised boundary solver for Szego data on a fixed grid."""

    def __init__(self, grid, mode="auto"):
        self.grid = grid
        self.sqrtw = np.sqrt(grid.w)
        if mode == "auto":
            mode = "gmres" if grid.total > _GMRES_CUTOFF else "lu"
        self.mode = mode
        self._B = kernels.assemble_ks(grid.z, grid.T, self.sqrtw)
        self._rcond = None
        if mode == "lu":
            A = self._B.copy()
            A[np.arange(grid.total), np.arange(grid.total)] += 1.0
            self._anorm = np.linalg.norm(A, 1)
            self._lu = lu_factor(A, overwrite_a=True)
        elif mode != "gmres":
            raise ValueError(f"unknown mode {mode!r}")

    @property
    def rcond(self):
        """Reciprocal condition estimate of I + B (spectrum 1 + i t)."""
        if self._rcond is None:
            if self.mode == "lu":
                gecon = get_lapack_funcs("gecon", (self._lu[0],))
                self._rcond = float(gecon(self._lu[0], self._anorm)[0])
            else:
                # skew-Hermitian B: cond(I+B) = sqrt(1 + s_max^2) with
                # s_max <= ||B||_1; a cheap guaranteed bound
                s = np.linalg.norm(self._B, 1)
                self._rcond = 1.0 / np.sqrt(1.0 + s * s)
        return self._rcond

    def _iter_solve(self, rhs, sign):
        T = self.grid.total
        op = LinearOperator(
            (T, T), dtype=np.complex128,
            matvec=lambda v: v + sign * (self._B @ v))
        sol, info = gmres(op, rhs, rtol=1e-13, atol=0.0, restart=80,
                          maxiter=400)
        if info != 0:
            raise NonConvergent(f"boundary solve stalled (gmres info {info})")
        return sol

    def _solve_plus(self, rhs_w):
        """(I + B) y = rhs in the weighted variables."""
        if self.mode == "lu":
            return lu_solve(self._lu, rhs_w)
        return self._iter_solve(rhs_w, +1.0)

    def _solve_minus(self, rhs_w):
        """(I - B) y = rhs; B is skew-Hermitian so this is the adjoint LU."""
        if self.mode == "lu":
            return lu_solve(self._lu, rhs_w, trans=2)
        return self._iter_solve(rhs_w, -1.0)

    def field(self, a):
        """Boundary trace of S(. , a) for an interior parameter point a."""
        a = complex(a)
        g = self.grid
        c_a = np.conj(g.T / (g.z - a) / (2.0j * np.pi))
        rhs = self.sqrtw * c_a
        y = self._solve_plus(rhs)
        fld = SzegoField(self, a, y / self.sqrtw)
        fld._weighted = (y, rhs)
        return fld

    def project(self, values):
        """Szego projection of boundary values onto holomorphic traces."""
        x = self._solve_minus(self.sqrtw * np.asarray(values,
                                                      dtype=np.complex128))
        return cauchy_boundary_apply(self.grid, x / self.sqrtw)


class SzegoField:
    """S(. , a) with interior evaluators for S, S', and the Garabedian
    companion L (simple pole at a, residue 1/(2 pi))."""

    def __init__(self, solver, a, trace):
        self.solver = solver
        self.a = a
        self.trace = trace            # S(zeta, a) at the boundary nodes
        self._cd = {}
        self._weighted = None

    @property
    def grid(self):
        return self.solver.grid

    @property
    def residual(self):
        """Post-solve residual of the second-kind equation (inf-norm)."""
        if self._weighted is None:
            return None
        y, rhs = self._weighted
        return float(np.abs(y + self.solver._B @ y - rhs).max())

    @property
    def rcond(self):
        return self.solver.rcond

    def garabedian_trace(self):
        """L(zeta, a) on the boundary: conj(S) ds = (1/i) L dz there."""
        return 1.0j * np.conj(self.trace) * np.conj(self.grid.T)

    def _cauchy(self, which, p):
        key = (which, p)
        if key not in self._cd:
            if which == "S":
                dens = self.trace
            else:
                g = self.grid
                dens = self.garabedian_trace() - 1.0 / (2.0 * np.pi * (g.z - self.a))
            self._cd[key] = CauchyDensity(self.grid, dens, pole_order=p)
        return self._cd[key]

    def szego(self, points):
        """S(z, a) at interior points."""
        pts = np.asarray(points, dtype=np.complex128)
        return self._cauchy("S", 1)(pts) / (2.0j * np.pi)

    def szego_dz(self, points):
        pts = np.asarray(points, dtype=np.complex128)
        return self._cauchy("S", 2)(pts) / (2.0j * np.pi)

    def garabedian(self, points):
        """L(z, a) at interior points (pole subtracted before the Cauchy
        integral, then restored)."""
        pts = np.asarray(points, dtype=np.complex128)
        smooth = self._cauchy("L", 1)(pts) / (2.0j * np.pi)
        return smooth + 1.0 / (2.0 * np.pi * (pts - self.a))

    def garabedian_dz(self, points):
        pts = np.asarray(points, dtype=np.complex128)
        smooth = self._cauchy("L", 2)(pts) / (2.0j * np.pi)
        return smooth - 1.0 / (2.0 * np.pi * (pts - self.a) ** 2)

    def at_param(self):
        """S(a, a) > 0, the reproducing value at the parameter point."""
        return self.szego(np.array([self.a]))[0]


class AhlforsMap:
    """f = S(. , a) / L(. , a): the n-to-1 analytic map to the unit disk
    with f(a) = 0 and f'(a) = 2 pi S(a, a) > 0."""

    def __init__(self, field):
        self.field = field
        self.a = field.a

    def __call__(self, points):
        return self.field.szego(points) / self.field.garabedian(points)

    def boundary_trace(self):
        """|f| = 1 on the boundary; returned as node values."""
        S = self.field.trace
        L = self.field.garabedian_trace()
        return S / L

    def fprime_at_a(self):
        return 2.0 * np.pi * self.field.at_param()


def ahlfors_map(solver, a):
    return AhlforsMap(solver.field(a))


class GarabedianField:
    """Boundary values of L(. , a) plus the regular part
    R(z, a) = L(z, a) - 1/(2 pi (z - a)) for interior evaluation."""

    def __init__(self, szego_field):
        self.szego_field = szego_field
        self.a = szego_field.a
        self.trace = szego_field.garabedian_trace()

    @property
    def grid(self):
        return self.szego_field.grid

    def regular_trace(self):
        g = self.grid
        return self.trace - 1.0 / (2.0 * np.pi * (g.z - self.a))

    def regular(self, points):
        pts = np.asarray(points, dtype=np.complex128)
        return self.szego_field.garabedian(pts) \
            - 1.0 / (2.0 * np.pi * (pts - self.a))

    def __call__(self, points):
        return self.szego_field.garabedian(points)


# --------------------------------------------------------------------------
# module-level operations on the per-grid cached solver
# --------------------------------------------------------------------------

def solve_szego(grid, a):
    """Boundary trace of S(. , a) on the cached per-grid solver."""
    return szego_solver(grid).field(a)


def garabedian_boundary(szego_field):
    """Garabedian companion of a solved Szego field."""
    return GarabedianField(szego_field)


def interior_kernel_eval(field, points, which="S"):
    """Interior values of S or L from a solved field."""
    if which == "S":
        return field.szego(points)
    if which == "L":
        return field.garabedian(points)
    raise ValueError(f"unknown kernel {which!r}")


def szego_projection(grid, f):
    """Orthogonal projection of boundary values onto holomorphic traces."""
    vals = f.values if isinstance(f, BoundaryFunction) else np.asarray(f)
    out = szego_solver(grid).project(vals)
    measure = f.measure if isinstance(f, BoundaryFunction) else "ds"
    return BoundaryFunction(grid, out, measure)


def ahlfors_eval(grid, a, points):
    """Ahlfors map values; exactly 0 at the parameter point itself."""
    fmap = AhlforsMap(solve_szego(grid, a))
    pts = np.asarray(points, dtype=np.complex128)
    scalar = pts.ndim == 0
    pts = np.atleast_1d(pts)
    out = np.empty(pts.shape, dtype=np.complex128)
    at_a = np.abs(pts - complex(a)) < 1e-14 * grid.domain.diameter
    out[at_a] = 0.0
    if np.any(~at_a):
        out[~at_a] = fmap(pts[~at_a])
    return out[0] if scalar else out
