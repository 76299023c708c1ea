"""Domain geometry: Fourier curves, boundary grids, cut systems, sampling.

A domain is bounded by n smooth Jordan curves, each given as a finite Fourier
series gamma(t) = sum_k c_k e^{ikt} on [0, 2pi).  The outer curve is stored
counterclockwise and the inner curves clockwise, so the concatenated boundary
winds once around every interior point (the standard orientation).
"""

from dataclasses import dataclass, field

import numpy as np
from numpy.polynomial.legendre import leggauss
from scipy.stats import qmc

from ._backend import kernels
from .errors import (
    CurveNesting,
    CutConstructionFailed,
    DegenerateCurve,
    HoleCollision,
    MarginTooLarge,
    SelfIntersectingCurve,
    UnderResolved,
)

DEFAULT_N = 256


# --------------------------------------------------------------------------
# curves
# --------------------------------------------------------------------------

@dataclass(frozen=True, eq=False)
class CurveParam:
    """Closed curve given by Fourier coefficients c_k, k = -M..M."""

    ks: np.ndarray          # integer wavenumbers, ascending
    coeffs: np.ndarray      # complex coefficients, same length

    def __post_init__(self):
        ks = np.asarray(self.ks, dtype=int)
        cs = np.asarray(self.coeffs, dtype=np.complex128)
        if ks.size != cs.size or ks.size == 0:
            raise ValueError("ks and coeffs must have equal nonzero length")
        order = np.argsort(ks)
        object.__setattr__(self, "ks", ks[order])
        object.__setattr__(self, "coeffs", cs[order])

    @classmethod
    def from_pairs(cls, pairs):
        """Build from [[k, re, im], ...] triples (the JSON wire format)."""
        pairs = list(pairs)
        ks = [int(p[0]) for p in pairs]
        cs = [complex(p[1], p[2]) for p in pairs]
        if len(set(ks)) != len(ks):
            raise ValueError("duplicate wavenumber in curve coefficients")
        return cls(np.array(ks), np.array(cs))

    @classmethod
    def circle(cls, center=0.0, radius=1.0, ccw=True):
        k = 1 if ccw else -1
        return cls(np.array([0, k]), np.array([complex(center), complex(radius)]))

    def to_pairs(self):
        return [[int(k), float(c.real), float(c.imag)]
                for k, c in zip(self.ks, self.coeffs)]

    @property
    def degree(self):
        return int(np.max(np.abs(self.ks)))

    def eval(self, t, deriv=0):
        """gamma(t) or its deriv-th parameter derivative at points t.

        Complex t is accepted and evaluates the analytic continuation of
        the parametrisation (the Fourier sum is entire in t).
        """
        t = np.asarray(t)
        t = t.astype(np.complex128 if np.iscomplexobj(t) else np.float64)
        phase = np.exp(1j * np.outer(t.ravel(), self.ks))
        c = self.coeffs * (1j * self.ks) ** deriv
        return (phase @ c).reshape(t.shape)

    def orientation(self):
        """+1 for counterclockwise, -1 for clockwise (signed-area test)."""
        area = np.pi * np.sum(self.ks * np.abs(self.coeffs) ** 2)
        if area == 0.0:
            raise DegenerateCurve("curve encloses zero signed area")
        return 1 if area > 0 else -1

    def reversed(self):
        """Same point set traversed the other way (t -> -t)."""
        return CurveParam(-self.ks, self.coeffs)

    def _validate(self, tol_geom):
        M = self.degree
        P = max(256, 8 * (2 * M + 1))
        t = 2.0 * np.pi * np.arange(P) / P
        z = self.eval(t)
        sp = np.abs(self.eval(t, 1))
        if sp.max() == 0.0 or sp.min() < 1e-10 * sp.max():
            raise DegenerateCurve(
                f"parametrisation speed vanishes (min |gamma'| = {sp.min():.3e})")
        # simplicity: well-separated parameters must give well-separated points
        sep = max(3, P // 16)
        d = np.abs(z[None, :] - z[:, None])
        idx = np.arange(P)
        circ = np.abs(idx[None, :] - idx[:, None])
        circ = np.minimum(circ, P - circ)
        mask = circ >= sep
        if d[mask].min() < tol_geom:
            raise SelfIntersectingCurve(
                f"distinct parameters map to nearly identical points "
                f"(min gap {d[mask].min():.3e} < {tol_geom:.3e})")
        # simplicity: the sampled boundary polygon must not cross itself.  A
        # crossing that survives refinement is a genuine self-intersection; one
        # that vanishes was an artifact of the chord approximation.
        if _polygon_crosses(z):
            Pf = 4 * P
            tf = 2.0 * np.pi * np.arange(Pf) / Pf
            if _polygon_crosses(self.eval(tf)):
                raise SelfIntersectingCurve(
                    "curve crosses itself (sampled polygon has a proper "
                    "self-intersection that persists under refinement)")
        return z


def _polygon_crosses(z):
    """True if the closed polygon through ``z`` has a proper self-crossing.

    Edges i and j cross properly when each separates the endpoints of the
    other (strict orientation tests), so tangential grazes and the shared
    endpoints of adjacent edges do not trigger.  Row-chunked to keep the
    pairwise orientation tables small.
    """
    P = z.size
    a = z
    d = np.roll(z, -1) - z
    idx = np.arange(P)
    chunk = max(1, 2_000_000 // P)
    for lo in range(0, P, chunk):
        ai = a[lo:lo + chunk, None]
        di = d[lo:lo + chunk, None]
        ii = idx[lo:lo + chunk, None]
        # orientation of edge j's endpoints about edge i, and vice versa
        o1 = (np.conj(di) * (a[None, :] - ai)).imag
        o2 = (np.conj(di) * (a[None, :] + d[None, :] - ai)).imag
        o3 = (np.conj(d[None, :]) * (ai - a[None, :])).imag
        o4 = (np.conj(d[None, :]) * (ai + di - a[None, :])).imag
        proper = (o1 * o2 < 0.0) & (o3 * o4 < 0.0)
        circ = np.abs(idx[None, :] - ii)
        circ = np.minimum(circ, P - circ)
        if np.any(proper & (circ > 1)):
            return True
    return False


def _winding(curve_z, curve_cw, points):
    """Winding number of a sampled closed curve about each point (float)."""
    s = kernels.cauchy_powersum(np.asarray(points, dtype=np.complex128).ravel(),
                                curve_z, np.ones(curve_z.size), curve_cw, 1)
    return (s / (2.0j * np.pi)).real


def _dense_sample(curve, n=1024):
    n = max(n, 8 * (2 * curve.degree + 1))
    t = 2.0 * np.pi * np.arange(n) / n
    z = curve.eval(t)
    cw = curve.eval(t, 1) * (2.0 * np.pi / n)
    return t, z, cw


# --------------------------------------------------------------------------
# domain
# --------------------------------------------------------------------------

@dataclass(frozen=True, eq=False)
class Domain:
    """Bounded n-connected domain: one outer curve plus n-1 inner curves."""

    outer: CurveParam
    inners: tuple = ()
    _cache: dict = field(default_factory=dict, repr=False, compare=False)

    @property
    def n(self):
        return 1 + len(self.inners)

    @property
    def curves(self):
        return (self.outer,) + tuple(self.inners)

    def _dense(self):
        if "dense" not in self._cache:
            self._cache["dense"] = [_dense_sample(c) for c in self.curves]
        return self._cache["dense"]

    @property
    def diameter(self):
        if "diam" not in self._cache:
            z = self._dense()[0][1]
            self._cache["diam"] = float(
                (z.real.max() - z.real.min()) ** 2 + (z.imag.max() - z.imag.min()) ** 2
            ) ** 0.5
        return self._cache["diam"]

    def boundary_nodes(self):
        """Concatenated dense boundary samples (z, cw) for winding/distance."""
        zs = np.concatenate([d[1] for d in self._dense()])
        cs = np.concatenate([d[2] for d in self._dense()])
        return zs, cs

    def contains(self, points):
        z, cw = self.boundary_nodes()
        w = _winding(z, cw, points)
        return np.abs(w - 1.0) < 0.25

    def boundary_distance(self, points):
        z, _ = self.boundary_nodes()
        return kernels.min_dist(np.asarray(points, dtype=np.complex128).ravel(), z)

    def to_config(self):
        curves = [{"role": "outer", "coeffs": self.outer.to_pairs()}]
        curves += [{"role": "inner", "coeffs": c.to_pairs()} for c in self.inners]
        return {"curves": curves}


def build_domain(outer, inners=(), tol_geom=None):
    """Validate curves, fix orientations, and assemble a Domain.

    The outer curve is made counterclockwise and each inner curve clockwise
    (reversing the parametrisation where needed).  Raises
    SelfIntersectingCurve / CurveNesting / DegenerateCurve on bad input.
    """
    curves = [outer] + list(inners)
    # provisional diameter for the simplicity tolerance
    pts = np.concatenate([c.eval(np.linspace(0.0, 2.0 * np.pi, 64, endpoint=False))
                          for c in curves])
    diam = float(np.ptp(pts.real) ** 2 + np.ptp(pts.imag) ** 2) ** 0.5
    if tol_geom is None:
        tol_geom = 1e-10 * diam

    if outer.orientation() < 0:
        outer = outer.reversed()
    inners = tuple(c.reversed() if c.orientation() > 0 else c for c in inners)

    samples = [c._validate(tol_geom) for c in [outer, *inners]]

    # pairwise disjoint closures
    for i in range(len(samples)):
        for j in range(i + 1, len(samples)):
            dmin = kernels.min_dist(samples[i], samples[j]).min()
            if dmin < tol_geom:
                raise SelfIntersectingCurve(
                    f"curves {i} and {j} nearly touch (gap {dmin:.3e})")

    # nesting: inners strictly inside outer, pairwise exterior
    dense = [_dense_sample(c, 2048) for c in [outer, *inners]]
    for j in range(1, len(dense)):
        w = _winding(dense[0][1], dense[0][2], dense[j][1])
        if not np.all(np.abs(w - 1.0) < 0.3):
            raise CurveNesting(f"inner curve {j} is not inside the outer curve")
    for i in range(1, len(dense)):
        for j in range(1, len(dense)):
            if i == j:
                continue
            w = _winding(dense[i][1], dense[i][2], dense[j][1])
            if not np.all(np.abs(w) < 0.3):
                raise CurveNesting(f"inner curves {i} and {j} are nested")

    return Domain(outer, inners)


def domain_from_config(cfg):
    """Domain from the JSON wire format {"curves": [{role, coeffs}, ...]}."""
    outer = None
    inners = []
    for entry in cfg["curves"]:
        curve = CurveParam.from_pairs(entry["coeffs"])
        role = entry.get("role", "inner")
        if role == "outer":
            if outer is not None:
                raise ValueError("more than one outer curve in config")
            outer = curve
        elif role == "inner":
            inners.append(curve)
        else:
            raise ValueError(f"unknown curve role {role!r}")
    if outer is None:
        raise ValueError("config declares no outer curve")
    return build_domain(outer, inners)


# --------------------------------------------------------------------------
# boundary grid
# --------------------------------------------------------------------------

class BoundaryGrid:
    """Equispaced-parameter trapezoid grid on every boundary curve.

    Per node: position z, exact tangent vector gamma', unit tangent T, speed,
    arclength weight w = (2 pi / N) |gamma'|, outward normal nu = -i T, and
    complex weight cw = gamma' * (2 pi / N) (so that sum f*cw approximates
    the contour integral of f dz).
    """

    def __init__(self, domain, Ns):
        self.domain = domain
        self.Ns = tuple(int(N) for N in Ns)
        zs, dzs, ts = [], [], []
        for curve, N in zip(domain.curves, self.Ns):
            if N % 2 or N <= 0:
                raise UnderResolved(f"N = {N} must be a positive even integer")
            if N < 4 * (2 * curve.degree + 1):
                raise UnderResolved(
                    f"N = {N} under-resolves a degree-{curve.degree} curve "
                    f"(need at least {4 * (2 * curve.degree + 1)})")
            t = 2.0 * np.pi * np.arange(N) / N
            ts.append(t)
            zs.append(curve.eval(t))
            dzs.append(curve.eval(t, 1))
        self.t = ts
        self.z = np.concatenate(zs)
        dz = np.concatenate(dzs)
        self.speed = np.abs(dz)
        self.T = dz / self.speed
        self.nu = -1j * self.T
        scale = np.concatenate([np.full(N, 2.0 * np.pi / N) for N in self.Ns])
        self.w = scale * self.speed
        self.cw = scale * dz
        offsets = np.concatenate([[0], np.cumsum(self.Ns)])
        self.slices = [slice(int(a), int(b)) for a, b in zip(offsets[:-1], offsets[1:])]
        self.total = int(offsets[-1])
        self.arclengths = np.array([self.w[s].sum() for s in self.slices])
        self.h_max = np.array([
            2.0 * np.pi / N * self.speed[s].max()
            for N, s in zip(self.Ns, self.slices)])
        self._fine_cache = {}

    @property
    def n_curves(self):
        return len(self.Ns)

    def curve_values(self, values, ci):
        return np.asarray(values)[self.slices[ci]]

    def fine_nodes(self, ci, level):
        """Geometry of the 4**level-times upsampled grid on curve ci."""
        key = (ci, level)
        if key not in self._fine_cache:
            N = self.Ns[ci] * 4 ** level
            t = 2.0 * np.pi * np.arange(N) / N
            curve = self.domain.curves[ci]
            z = curve.eval(t)
            cw = curve.eval(t, 1) * (2.0 * np.pi / N)
            self._fine_cache[key] = (z, cw)
            # bound total cached nodes, evicting oldest entries first but
            # never the entry being served (a single request may exceed the
            # budget on its own and then simply lives alone)
            while (len(self._fine_cache) > 1
                   and sum(v[0].size
                           for v in self._fine_cache.values()) > 8_000_000):
                oldest = next(k for k in self._fine_cache if k != key)
                self._fine_cache.pop(oldest)
        return self._fine_cache[key]


def sample_boundary(domain, N=DEFAULT_N):
    """BoundaryGrid with N nodes per curve (or a per-curve sequence of N)."""
    if np.isscalar(N):
        Ns = [int(N)] * domain.n
    else:
        Ns = list(N)
        if len(Ns) != domain.n:
            raise ValueError("one N per boundary curve required")
    return BoundaryGrid(domain, Ns)


# --------------------------------------------------------------------------
# cut system
# --------------------------------------------------------------------------

_GL_CACHE = {}


def _gl(order):
    if order not in _GL_CACHE:
        x, w = leggauss(order)
        _GL_CACHE[order] = (x, w)
    return _GL_CACHE[order]


class CutArc:
    """Straight open arc from a point of the outer curve to inner curve j.

    Carries composite Gauss-Legendre nodes in the segment parameter
    tau in [0, 1]; integrals of f dz along the arc are sum(f(zq) * dz * wq).
    """

    def __init__(self, z0, z1, inner_index, t_outer, t_inner,
                 panels=8, order=16):
        self.z0 = complex(z0)
        self.z1 = complex(z1)
        self.inner_index = inner_index
        self.t_outer = float(t_outer)
        self.t_inner = float(t_inner)
        self.panels = int(panels)
        self.order = int(order)
        x, w = _gl(order)
        edges = np.linspace(0.0, 1.0, self.panels + 1)
        taus, wq = [], []
        for a, b in zip(edges[:-1], edges[1:]):
            taus.append(0.5 * (a + b) + 0.5 * (b - a) * x)
            wq.append(0.5 * (b - a) * w)
        self.tau = np.concatenate(taus)
        self.wq = np.concatenate(wq)
        self.zq = self.z0 + (self.z1 - self.z0) * self.tau
        self.dz = self.z1 - self.z0          # dz/dtau, constant for a segment
        self.length = abs(self.dz)

    def with_panels(self, panels):
        return CutArc(self.z0, self.z1, self.inner_index,
                      self.t_outer, self.t_inner, panels, self.order)

    def point(self, tau):
        return self.z0 + (self.z1 - self.z0) * np.asarray(tau)

    def integrate(self, fvals):
        """integral of f dz with f sampled on the arc nodes."""
        return np.sum(np.asarray(fvals) * self.wq) * self.dz


class CutSystem:
    """Arcs sigma_j joining the outer curve to each inner curve, plus a slid
    copy sigma~_j used for cut-independence checks and diagonal double
    periods."""

    def __init__(self, arcs, slid):
        self.arcs = tuple(arcs)
        self.slid = tuple(slid)

    def __len__(self):
        return len(self.arcs)

    def all_nodes(self):
        return np.concatenate([a.zq for a in self.arcs + self.slid])


def _segment_ok(domain, z0, z1, skip_curves, tol_cut):
    """Is the open segment z0-z1 inside the domain with clearance tol_cut?

    skip_curves maps curve index -> endpoint tau, where closeness is allowed.
    """
    tau = np.linspace(0.0, 1.0, 160)[1:-1]
    pts = z0 + (z1 - z0) * tau
    if not np.all(domain.contains(pts)):
        return False
    seglen = abs(z1 - z0)
    for ci, (_, zc, _) in enumerate(domain._dense()):
        d = kernels.min_dist(pts, zc)
        if ci in skip_curves:
            # near the endpoint on this curve the segment legitimately
            # approaches it; require clearance proportional to the distance
            # from that endpoint along the segment
            end_tau = skip_curves[ci]
            along = np.abs(tau - end_tau) * seglen
            ok = d > np.minimum(tol_cut, 0.5 * along)
        else:
            ok = d > tol_cut
        if not np.all(ok):
            return False
    return True


def _arcs_disjoint(a, b, tol_cut):
    return kernels.min_dist(a.zq, b.zq).min() > tol_cut


def build_cuts(domain, anchors="auto", panels=8, order=16,
               slide=0.3, tol_cut=None, max_tries=40):
    """Construct the cut system (and its slid copy) for an n-connected domain.

    Anchors default to nearest-point pairs between the outer curve and each
    inner curve; on validation failure the anchor parameters are rotated by
    deterministic offsets and construction is retried.
    """
    if domain.n < 2:
        raise CutConstructionFailed("cuts require at least one inner curve")
    if tol_cut is None:
        tol_cut = 1e-3 * domain.diameter

    dense = domain._dense()
    t_out, z_out, _ = dense[0]

    base_anchors = []
    if anchors == "auto":
        for j in range(1, domain.n):
            tj, zj, _ = dense[j]
            d = np.abs(z_out[:, None] - zj[None, :])
            i0, i1 = np.unravel_index(int(np.argmin(d)), d.shape)
            base_anchors.append((t_out[i0], tj[i1]))
    else:
        base_anchors = [(float(a), float(b)) for a, b in anchors]
        if len(base_anchors) != domain.n - 1:
            raise CutConstructionFailed("need one anchor pair per inner curve")

    offs = [0.0]
    for k in range(1, max_tries):
        offs += [0.13 * k, -0.13 * k]

    def _make(j, d_out, d_in):
        t0 = base_anchors[j - 1][0] + d_out
        t1 = base_anchors[j - 1][1] + d_in
        z0 = complex(domain.curves[0].eval(np.array([t0]))[0])
        z1 = complex(domain.curves[j].eval(np.array([t1]))[0])
        return CutArc(z0, z1, j, t0, t1, panels, order)

    arcs = []
    for j in range(1, domain.n):
        placed = None
        for off in offs:
            cand = _make(j, off, -off)
            if not _segment_ok(domain, cand.z0, cand.z1,
                               {0: 0.0, j: 1.0}, tol_cut):
                continue
            if all(_arcs_disjoint(cand, a, tol_cut) for a in arcs):
                placed = cand
                break
        if placed is None:
            raise CutConstructionFailed(f"no admissible cut found for inner curve {j}")
        arcs.append(placed)

    slid = []
    for j, arc in enumerate(arcs, start=1):
        placed = None
        for s_in in (-1.0, 1.0):
            for extra in offs:
                cand = _make(j, arc.t_outer - base_anchors[j - 1][0] + slide + extra,
                             arc.t_inner - base_anchors[j - 1][1] + s_in * slide + extra)
                if not _segment_ok(domain, cand.z0, cand.z1,
                                   {0: 0.0, j: 1.0}, tol_cut):
                    continue
                if not _arcs_disjoint(cand, arc, tol_cut):
                    continue
                if all(_arcs_disjoint(cand, a, tol_cut) for a in slid):
                    placed = cand
                    break
            if placed is not None:
                break
        if placed is None:
            raise CutConstructionFailed(f"no admissible slid cut for inner curve {j}")
        slid.append(placed)

    return CutSystem(arcs, slid)


# --------------------------------------------------------------------------
# sampling and families
# --------------------------------------------------------------------------

def interior_samples(domain, count, margin=0.05, seed=42, cuts=None,
                     max_draws=200000):
    """Low-discrepancy interior points with clearance margin * diameter from
    the boundary (and from every cut when a CutSystem is given)."""
    if count <= 0:
        return np.empty(0, dtype=np.complex128)
    clearance = margin * domain.diameter
    zb, _ = domain.boundary_nodes()
    lo = complex(zb.real.min(), zb.imag.min())
    hi = complex(zb.real.max(), zb.imag.max())
    cut_nodes = cuts.all_nodes() if cuts is not None else None

    sampler = qmc.Halton(d=2, scramble=True, seed=seed)
    out = []
    drawn = 0
    batch = max(256, 4 * count)
    while len(out) < count:
        if drawn >= max_draws or (drawn >= 5000 and not out):
            raise MarginTooLarge(
                f"could not place {count} samples at margin {margin} "
                f"({len(out)} found after {drawn} draws)")
        u = sampler.random(batch)
        drawn += batch
        pts = (lo.real + u[:, 0] * (hi.real - lo.real)
               + 1j * (lo.imag + u[:, 1] * (hi.imag - lo.imag)))
        pts = pts[domain.contains(pts)]
        if pts.size:
            pts = pts[domain.boundary_distance(pts) >= clearance]
        if pts.size and cut_nodes is not None:
            pts = pts[kernels.min_dist(pts, cut_nodes) >= clearance]
        out.extend(pts.tolist())
    return np.array(out[:count], dtype=np.complex128)


def shrinking_hole_family(base_domain, centers, radii):
    """Domains obtained by adding one circular hole per step.

    centers is either a sequence of hole centers (one per step) or a pair
    (start, end) interpolated linearly; radii is the per-step radius schedule
    (e.g. r0 * 2**-s).  Raises HoleCollision when a hole would touch or leave
    the base domain.
    """
    radii = [float(r) for r in radii]
    if len(centers) == 2 and not np.iterable(centers[0]) and len(radii) != 2:
        a, b = complex(centers[0]), complex(centers[1])
        f = np.linspace(0.0, 1.0, len(radii))
        centers = [a + (b - a) * fi for fi in f]
    centers = [complex(c) for c in centers]
    if len(centers) != len(radii):
        raise ValueError("need one center per radius")
    family = []
    for c, r in zip(centers, radii):
        if r <= 0:
            raise HoleCollision(f"nonpositive hole radius {r}")
        hole = CurveParam.circle(c, r, ccw=False)
        try:
            family.append(build_domain(
                base_domain.outer, list(base_domain.inners) + [hole]))
        except (SelfIntersectingCurve, CurveNesting) as exc:
            raise HoleCollision(
                f"hole at {c} with radius {r} collides with the domain") from exc
    return family


def radius_schedule(r0, steps):
    """Geometric shrink schedule r0 * 2**-s, s = 0..steps-1."""
    return [r0 * 2.0 ** (-s) for s in range(steps)]
