"""Continuum conformal data for union-of-squares domains.

Each lattice domain has an associated open region built from unit squares.
The Brownian quantities on that region (Green's function g, boundary angle
theta, and the disk-map derivative at the origin) are approximated by
five-point Dirichlet solves on a refinement of the lattice by an even
factor m; the polygon boundary then lies exactly on grid lines, so nodes on
it carry Dirichlet data and the only error is the scheme's own truncation,
which Richardson extrapolation across two levels reduces.

Boundary angles come from harmonic measure seen from the origin: the
measure of the arc from a reference edge to a point equals the angle
difference divided by 2*pi.  Only angle differences are meaningful; the
anchor is the cycle's starting edge.

Closed forms for the unit disk and the rectangle, the normalized crossing
determinant Lambda, its long-rectangle asymptotics, and disk Moebius maps
complete the module.
"""

from __future__ import annotations

import cmath
import math
import warnings
from dataclasses import dataclass

import numpy as np

from ._linsys import AbsorbedSystem
from .errors import (
    BadOrdering,
    BadOrderingWarning,
    BadParameter,
    CoincidentAngles,
    CoincidentPoints,
    NonPositiveLength,
    OriginMissing,
    OutOfRange,
    OutsideDisk,
    PointOutsideDomain,
    SolveFailure,
)
from .lattice import LatticeDomain, boundary, dual_segment_corners

DEFAULT_MESH_LEVELS = (2, 4)
_SERIES_RELTOL = 1e-15


# ---------------------------------------------------------------------------
# refined-grid machinery
# ---------------------------------------------------------------------------

class RefinedSystem:
    """Five-point system on the m-refined grid of a domain's square union.

    Interior nodes are unknowns; nodes on the boundary polygon carry
    Dirichlet data.  Node coordinates are integers in units of 1/m.
    """

    def __init__(self, domain: LatticeDomain, m: int, tolerance: float = 1e-12):
        if m < 2 or m % 2:
            raise ValueError("refinement factor must be even and >= 2")
        self.domain = domain
        self.m = m
        x0, y0, x1, y1 = domain.bounding_box
        half = m // 2
        i0, j0 = m * x0 - half, m * y0 - half
        ii = np.arange(i0, m * x1 + half + 1)
        jj = np.arange(j0, m * y1 + half + 1)
        qx, sx = np.divmod(ii + half, m)
        qy, sy = np.divmod(jj + half, m)
        strx = (sx == 0)[:, None]  # node sits on a vertical square wall
        stry = (sy == 0)[None, :]
        qx = qx[:, None]
        qy = qy[None, :]

        grid = domain._grid
        off = domain._off

        def member(ax, ay):
            gx = ax - off[0]
            gy = ay - off[1]
            ok = ((gx >= 0) & (gx < grid.shape[0])
                  & (gy >= 0) & (gy < grid.shape[1]))
            out = np.zeros(np.broadcast(ax, ay).shape, dtype=bool)
            gxo = np.broadcast_to(gx, out.shape)[ok]
            gyo = np.broadcast_to(gy, out.shape)[ok]
            out[ok] = grid[gxo, gyo]
            return out

        interior = member(qx, qy)
        interior &= member(qx - 1, qy) | ~strx
        interior &= member(qx, qy - 1) | ~stry
        interior &= member(qx - 1, qy - 1) | ~(strx & stry)
        self.sys = AbsorbedSystem(interior, (i0, j0), tolerance)

        # aggregate absorbed contacts by boundary node
        node_ids: dict[tuple[int, int], int] = {}
        contact_node = np.empty(self.sys.contact_cell.shape, dtype=np.int64)
        for k, (cx, cy) in enumerate(zip(self.sys.contact_x.tolist(),
                                         self.sys.contact_y.tolist())):
            contact_node[k] = node_ids.setdefault((cx, cy), len(node_ids))
        self._contact_node = contact_node
        self.nodes = list(node_ids.keys())

        # map boundary nodes to (cycle edge index, fraction along segment)
        cycle = boundary(domain).ccw_cycle
        self.cycle_len = len(cycle)
        assign: dict[tuple[int, int], list[tuple[int, int]]] = {}
        for c, edge in enumerate(cycle):
            (ax, ay), (bx, by) = dual_segment_corners(edge)
            a = (round(ax * m), round(ay * m))
            step = ((round(bx * m) - a[0]) // m, (round(by * m) - a[1]) // m)
            for t in range(m + 1):
                node = (a[0] + step[0] * t, a[1] + step[1] * t)
                assign.setdefault(node, []).append((c, t))
        self._segment_of = assign
        self._cache: dict = {}

    # -- solves ------------------------------------------------------------

    def node_position(self, node) -> tuple[float, float]:
        return (node[0] / self.m, node[1] / self.m)

    def log_abs_solution(self) -> np.ndarray:
        """Harmonic extension of log|y| from the boundary polygon."""
        u = self._cache.get("log_abs")
        if u is None:
            r = np.hypot(self.sys.contact_x / self.m, self.sys.contact_y / self.m)
            u = self.sys.solve(self.sys.dirichlet_rhs(np.log(r)))
            self._cache["log_abs"] = u
        return u

    def node_masses(self, source: tuple[float, float]) -> np.ndarray:
        """Harmonic measure from a point, aggregated per boundary node."""
        si = round(source[0] * self.m)
        sj = round(source[1] * self.m)
        if (abs(si - source[0] * self.m) > 1e-9
                or abs(sj - source[1] * self.m) > 1e-9):
            raise PointOutsideDomain(f"{source} is not on the 1/{self.m} grid")
        u = self.sys.unit_row((si, sj))
        mass = np.zeros(len(self.nodes))
        np.add.at(mass, self._contact_node, self.sys.exit_mass(u))
        return mass

    # -- boundary angles -----------------------------------------------------

    def segment_masses(self) -> np.ndarray:
        """Harmonic measure from the origin per unit boundary segment."""
        seg = self._cache.get("segment_masses")
        if seg is None:
            if not self.domain.origin_included:
                raise OriginMissing("boundary angles are anchored at the origin")
            mass = self.node_masses((0.0, 0.0))
            seg = np.zeros(self.cycle_len)
            for node, mu in zip(self.nodes, mass.tolist()):
                refs = self._segment_of[node]
                w = mu / len(refs)
                for (c, _) in refs:
                    seg[c] += w
            self._cache["segment_masses"] = seg
        return seg

    def segment_angles(self) -> tuple[np.ndarray, np.ndarray]:
        """(cumulative angle at segment start, angle mass of segment)."""
        seg = self.segment_masses()
        total = seg.sum()
        ang = seg * (2.0 * math.pi / total)
        return np.concatenate([[0.0], np.cumsum(ang)[:-1]]), ang

    def node_angles(self) -> dict[tuple[int, int], float]:
        """Angle of each boundary node, linear within its segment."""
        th = self._cache.get("node_angles")
        if th is None:
            start, ang = self.segment_angles()
            th = {}
            for node, refs in self._segment_of.items():
                c, t = refs[0]
                th[node] = start[c] + ang[c] * (t / self.m)
            self._cache["node_angles"] = th
        return th


def _refined(domain: LatticeDomain, m: int, tolerance: float = 1e-12) -> RefinedSystem:
    key = ("refined", m, tolerance)
    rs = domain._cache.get(key)
    if rs is None:
        rs = RefinedSystem(domain, m, tolerance)
        domain._cache[key] = rs
    return rs


def continuum_green(domain: LatticeDomain, x, m: int,
                    tolerance: float = 1e-12) -> float:
    """g(x) = harmonic extension of log|y| minus log|x|, at refinement m."""
    if x[0] == 0 and x[1] == 0:
        raise PointOutsideDomain("g is evaluated away from the origin pole")
    rs = _refined(domain, m, tolerance)
    i = round(x[0] * m)
    j = round(x[1] * m)
    if abs(i - x[0] * m) > 1e-9 or abs(j - x[1] * m) > 1e-9:
        raise PointOutsideDomain(f"{x} is not on the 1/{m} grid")
    u = rs.log_abs_solution()
    return float(u[rs.sys.index_of((i, j))]) - 0.5 * math.log(x[0] ** 2 + x[1] ** 2)


def theta_boundary(domain: LatticeDomain, m: int,
                   tolerance: float = 1e-12) -> dict:
    """Boundary angle per outer point; differences are the meaningful part.

    Each outer point gets the mean of its segments' midpoint angles (its
    segments are consecutive along the cycle except in slit geometries,
    where the average over edges mirrors the neighbour-average convention).
    """
    rs = _refined(domain, m, tolerance)
    start, ang = rs.segment_angles()
    cycle = boundary(domain).ccw_cycle
    mids: dict = {}
    for c, (_, y) in enumerate(cycle):
        mids.setdefault(y, []).append(start[c] + 0.5 * ang[c])
    out = {}
    for y, angles in mids.items():
        if max(angles) - min(angles) > math.pi:  # wrapped around the anchor
            angles = [a + 2.0 * math.pi if a < math.pi else a for a in angles]
        out[y] = math.fsum(angles) / len(angles) % (2.0 * math.pi)
    return out


def map_deriv_at_0(domain: LatticeDomain, m: int, radii=(1, 2, 4),
                   tolerance: float = 1e-12) -> float:
    """Disk-map derivative at 0 from g(x) + log|x| extrapolated to x -> 0.

    Samples the four axis points at each radius and fits a line in |x|, as
    the residual there is proportional to |x|.
    """
    vals = _axis_values(domain, m, radii, tolerance)
    alpha = _linear_intercept(radii, vals)
    return math.exp(-alpha)


def _axis_values(domain, m, radii, tolerance) -> list[float]:
    rs = _refined(domain, m, tolerance)
    u = rs.log_abs_solution()
    out = []
    for r in radii:
        pts = ((r, 0), (-r, 0), (0, r), (0, -r))
        g = [float(u[rs.sys.index_of((px * m, py * m))]) - math.log(r)
             for (px, py) in pts]
        out.append(math.fsum(g) / 4.0 + math.log(r))
    return out


def _linear_intercept(xs, ys) -> float:
    A = np.vstack([np.ones(len(xs)), np.asarray(xs, dtype=float)]).T
    coef, *_ = np.linalg.lstsq(A, np.asarray(ys, dtype=float), rcond=None)
    return float(coef[0])


@dataclass
class ConformalData:
    """Numerically computed continuum data for one domain."""

    domain: LatticeDomain
    mesh_levels: tuple[int, ...]
    g_values: dict
    theta_boundary: dict
    f_prime_at_0: float
    error_estimate: dict

    def __post_init__(self):
        for x, g in self.g_values.items():
            if g <= 0.0:
                raise SolveFailure(f"g({x}) = {g} is not positive")
        inrad = self.domain.inradius_exact()
        if inrad > 1.0:
            lo = 1.0 / (4.0 * (inrad + 1.0))
            hi = 1.0 / (inrad - 1.0) if inrad > 1.0 else math.inf
            if not (lo <= self.f_prime_at_0 <= hi):
                raise SolveFailure(
                    f"f'(0) = {self.f_prime_at_0} outside growth bounds "
                    f"[{lo}, {hi}] for inradius {inrad}")


def conformal_data(domain: LatticeDomain, sample_points=(),
                   mesh_levels=DEFAULT_MESH_LEVELS,
                   tolerance: float = 1e-12) -> ConformalData:
    """g at sample points, boundary angles, and f'(0), Richardson-refined.

    With two or more mesh levels the last two are combined assuming
    second-order error; the difference between levels is reported as the
    error estimate.  Angles come from the finest level.
    """
    levels = tuple(sorted(mesh_levels))
    samples = [tuple(p) for p in sample_points]
    radii = (1, 2, 4)
    g_by_level = []
    v_by_level = []
    for m in levels:
        g_by_level.append([continuum_green(domain, p, m, tolerance)
                           for p in samples])
        v_by_level.append(_axis_values(domain, m, radii, tolerance))

    def combine(coarse, fine, mc, mf):
        w = (mf / mc) ** 2
        return [f + (f - c) / (w - 1.0) for c, f in zip(coarse, fine)]

    if len(levels) >= 2:
        g_best = combine(g_by_level[-2], g_by_level[-1], levels[-2], levels[-1])
        v_best = combine(v_by_level[-2], v_by_level[-1], levels[-2], levels[-1])
        g_err = max((abs(a - b) for a, b in zip(g_by_level[-2], g_by_level[-1])),
                    default=0.0)
        v_err = max(abs(a - b) for a, b in zip(v_by_level[-2], v_by_level[-1]))
    else:
        g_best, v_best = g_by_level[-1], v_by_level[-1]
        g_err = v_err = math.nan

    f_prime = math.exp(-_linear_intercept(radii, v_best))
    return ConformalData(
        domain=domain,
        mesh_levels=levels,
        g_values=dict(zip(samples, g_best)),
        theta_boundary=theta_boundary(domain, levels[-1], tolerance),
        f_prime_at_0=f_prime,
        error_estimate={"g": g_err, "f_prime": v_err},
    )


def interior_map_angle(domain: LatticeDomain, points, m: int,
                       tolerance: float = 1e-12) -> dict:
    """Angle (and modulus) of the disk map at interior grid points.

    Uses the conformal-martingale identity: the map value at x equals the
    harmonic-measure average of the boundary phase seen from x.
    """
    rs = _refined(domain, m, tolerance)
    th = rs.node_angles()
    phases = np.exp(1j * np.array([th[n] for n in rs.nodes]))
    out = {}
    for p in points:
        mass = rs.node_masses((float(p[0]), float(p[1])))
        f = complex(np.sum(mass * phases))
        out[tuple(p)] = (cmath.phase(f) % (2.0 * math.pi), abs(f))
    return out


# ---------------------------------------------------------------------------
# closed forms: disk and rectangle
# ---------------------------------------------------------------------------

def disk_green(x: complex, y: complex) -> float:
    """g(x, y) = log|conj(y) x - 1| - log|y - x| on the unit disk."""
    x = complex(x)
    y = complex(y)
    if abs(x) >= 1.0 or abs(y) >= 1.0:
        raise OutsideDisk("both points must lie inside the unit disk")
    if x == y:
        raise CoincidentPoints("Green's function has a pole at x = y")
    return math.log(abs(y.conjugate() * x - 1.0)) - math.log(abs(y - x))


def disk_excursion_kernel(theta: float, theta_p: float) -> float:
    """Boundary excursion kernel of the unit disk in angle coordinates."""
    c = 1.0 - math.cos(theta_p - theta)
    if c <= 1e-300:
        raise CoincidentAngles("angles coincide modulo 2*pi")
    return 1.0 / (2.0 * math.pi * c)


def rect_excursion_kernel(L: float, q: float, q_p: float) -> float:
    """Series (2/pi) sum n sin(nq) sin(nq') / sinh(nL) across the rectangle.

    Summation stops once the sine-free term envelope n / sinh(nL) falls
    below 1e-15 of the partial sum (individual terms can vanish exactly at
    rational multiples of pi, so the envelope drives truncation).
    """
    if L <= 0.0:
        raise NonPositiveLength("rectangle length must be positive")
    total = 0.0
    for n in range(1, 1_000_000):
        nL = n * L
        if nL > 700.0:
            break
        envelope = n / math.sinh(nL)
        total += envelope * math.sin(n * q) * math.sin(n * q_p)
        if envelope < _SERIES_RELTOL * abs(total):
            break
    return 2.0 / math.pi * total


def rect_interior_kernel(L: float, r: float, q: float, q_p: float) -> float:
    """Interior-to-far-side kernel of the rectangle at depth r."""
    if L <= 0.0:
        raise NonPositiveLength("rectangle length must be positive")
    if not 0.0 < r < L:
        raise OutOfRange("need 0 < r < L")
    total = 0.0
    for n in range(1, 1_000_000):
        if n * L > 700.0:
            break
        envelope = math.sinh(n * r) / math.sinh(n * L)
        total += envelope * math.sin(n * q) * math.sin(n * q_p)
        if envelope < _SERIES_RELTOL * abs(total):
            break
    return 2.0 / math.pi * total


# ---------------------------------------------------------------------------
# crossing determinant Lambda and its asymptotics
# ---------------------------------------------------------------------------

def _check_ccw(angles: list[float]) -> bool:
    """True iff the angles are strictly increasing counterclockwise."""
    a = np.unwrap(np.asarray(angles, dtype=float) % (2.0 * math.pi))
    rel = (a - a[0]) % (2.0 * math.pi)
    return bool(np.all(np.diff(rel) > 0.0))


def lambda_disk(theta_x, theta_y) -> float:
    """Normalized determinant of disk excursion kernels.

    Entry (j, l) is (1 - cos(tx_j - ty_j)) / (1 - cos(tx_j - ty_l)); the
    value is the non-crossing probability factor and is conformally
    invariant.  A violated counterclockwise ordering only warns, since the
    determinant itself is defined regardless.
    """
    tx = [float(t) for t in theta_x]
    ty = [float(t) for t in theta_y]
    k = len(tx)
    if len(ty) != k:
        raise ValueError("need equally many x and y angles")
    if not _check_ccw(tx + ty[::-1]):
        warnings.warn("angles are not in counterclockwise order x1..xk,yk..y1",
                      BadOrderingWarning, stacklevel=2)
    mat = np.empty((k, k))
    for j in range(k):
        dj = 1.0 - math.cos(tx[j] - ty[j])
        if dj <= 1e-300:
            raise CoincidentAngles("diagonal pair coincides")
        for l in range(k):
            dl = 1.0 - math.cos(tx[j] - ty[l])
            if dl <= 1e-300:
                raise CoincidentAngles("angle pair coincides")
            mat[j, l] = dj / dl
    return float(np.linalg.det(mat))


def _ordered_q(q) -> list[float]:
    qs = [float(v) for v in q]
    if not all(0.0 < v < math.pi for v in qs):
        raise BadOrdering("side coordinates must lie in (0, pi)")
    if any(b >= a for a, b in zip(qs, qs[1:])):
        raise BadOrdering("side coordinates must be strictly decreasing")
    return qs


def prop15_leading(k: int, q, q_p, L: float) -> float:
    """Leading long-rectangle term of Lambda with decay exp(-k(k-1)L/2)."""
    qs = _ordered_q(q)
    qps = _ordered_q(q_p)
    if len(qs) != k or len(qps) != k:
        raise ValueError("need k coordinates per side")
    ls = np.arange(1, k + 1)
    du = float(np.linalg.det(np.sin(np.outer(qs, ls))))
    dv = float(np.linalg.det(np.sin(np.outer(qps, ls))))
    denom = math.prod(math.sin(v) for v in qs + qps)
    return (math.factorial(k) * du * dv / denom
            * math.exp(-k * (k - 1) * L / 2.0))


def lambda_rect_exact(k: int, q, q_p, L: float) -> float:
    """Exact Lambda across the rectangle from the separated-variable series."""
    qs = _ordered_q(q)
    qps = _ordered_q(q_p)
    if len(qs) != k or len(qps) != k:
        raise ValueError("need k coordinates per side")
    mat = np.empty((k, k))
    for j in range(k):
        diag = rect_excursion_kernel(L, qs[j], qps[j])
        for l in range(k):
            mat[j, l] = rect_excursion_kernel(L, qs[j], qps[l]) / diag
    return float(np.linalg.det(mat))


# ---------------------------------------------------------------------------
# disk Moebius maps
# ---------------------------------------------------------------------------

@dataclass(frozen=True)
class MobiusMap:
    """Disk automorphism z -> e^{i phi} (z - a) / (1 - conj(a) z)."""

    a: complex
    phi: float = 0.0

    def __post_init__(self):
        if abs(self.a) >= 1.0:
            raise BadParameter("pole parameter must satisfy |a| < 1")

    def apply(self, z: complex) -> complex:
        return cmath.exp(1j * self.phi) * (z - self.a) / (1.0 - self.a.conjugate() * z)

    def angle(self, theta: float) -> float:
        return cmath.phase(self.apply(cmath.exp(1j * theta))) % (2.0 * math.pi)


def mobius_disk(a: complex, phi: float = 0.0) -> MobiusMap:
    return MobiusMap(complex(a), float(phi))


def covariance_check(transform: MobiusMap, theta_x, theta_y,
                     tol: float = 1e-9) -> bool:
    """True iff Lambda is unchanged (within tol) under the automorphism."""
    before = lambda_disk(theta_x, theta_y)
    after = lambda_disk([transform.angle(t) for t in theta_x],
                        [transform.angle(t) for t in theta_y])
    return abs(after - before) <= tol
