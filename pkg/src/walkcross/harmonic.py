"""Random-walk Green's function, Poisson kernel, and excursion kernel.

All quantities come from sparse absorbed-walk solves on the domain:

* G_A(x, y): expected visits to y before leaving A, for a walk from x.
* h_A(x, y) = (1/4) sum_{(z,y) edge} G_A(x, z): exit distribution on the
  outer boundary (last-exit decomposition).
* h_bd(x, y): walk from boundary x steps into A and leaves at y; computable
  either from the double last-exit sum over Green values or from first-step
  averaging of h_A, and the two routes must agree.

A rational-arithmetic mode (exact_* functions) inverts the absorbed system
with Fractions for small domains, giving machine-exact oracles for tests.
"""

from __future__ import annotations

from dataclasses import dataclass
from fractions import Fraction

import numpy as np

from . import lattice
from ._linsys import AbsorbedSystem
from ._walk import philox_stream, run_until_exit, walk_grid
from .errors import (
    DuplicatePoint,
    MissingNeighbor,
    NotBoundary,
    OriginMissing,
    PointOutsideDomain,
    SamePoint,
)
from .lattice import STEPS, LatticeDomain, Point, boundary
from .potential import potential_a

DEFAULT_TOLERANCE = 1e-12


@dataclass
class HarmonicField:
    """Real-valued function on a domain's points or on its outer boundary."""

    domain: LatticeDomain
    values: dict[Point, float]

    def __getitem__(self, p: Point) -> float:
        return self.values[p]

    def __len__(self) -> int:
        return len(self.values)


@dataclass
class HittingMatrix:
    """k x k matrix of excursion-kernel values with its point labels."""

    rows: tuple[Point, ...]
    cols: tuple[Point, ...]
    entries: np.ndarray

    def __post_init__(self):
        if np.any(self.entries < -1e-13) or np.any(self.entries >= 1.0):
            raise ValueError("hitting-matrix entries must lie in [0, 1)")


def _system(domain: LatticeDomain, tolerance: float = DEFAULT_TOLERANCE) -> AbsorbedSystem:
    key = ("linsys", tolerance)
    sys = domain._cache.get(key)
    if sys is None:
        sys = AbsorbedSystem(domain._grid, domain._off, tolerance)
        domain._cache[key] = sys
    return sys


def green_row(domain: LatticeDomain, x: Point,
              tolerance: float = DEFAULT_TOLERANCE) -> HarmonicField:
    """G_A(x, .) over the whole domain from one absorbed solve."""
    if x not in domain:
        raise PointOutsideDomain(f"{x} not in domain")
    sys = _system(domain, tolerance)
    u = sys.unit_row(x)
    values = {(int(px), int(py)): float(v)
              for px, py, v in zip(sys.site_x, sys.site_y, u)}
    return HarmonicField(domain, values)


def green_via_potential(domain: LatticeDomain, x: Point,
                        tolerance: float = DEFAULT_TOLERANCE) -> float:
    """G_A(x, 0) computed as the harmonic extension of the potential kernel.

    Independent route to :func:`green_row` (up to the shared solver): solve
    the Dirichlet problem with boundary data a(y), subtract a(x).
    """
    if not domain.origin_included:
        raise OriginMissing("potential route needs the origin in the domain")
    if x not in domain:
        raise PointOutsideDomain(f"{x} not in domain")
    sys = _system(domain, tolerance)
    data = np.array([potential_a((bx, by))
                     for bx, by in zip(sys.contact_x, sys.contact_y)])
    u = sys.solve(sys.dirichlet_rhs(data))
    return float(u[sys.index_of(x)]) - potential_a(x)


def poisson_kernel(domain: LatticeDomain, x: Point,
                   tolerance: float = DEFAULT_TOLERANCE) -> HarmonicField:
    """Exit distribution h_A(x, .) on the outer boundary; sums to 1."""
    if x not in domain:
        raise PointOutsideDomain(f"{x} not in domain")
    sys = _system(domain, tolerance)
    u = sys.unit_row(x)
    return HarmonicField(domain, _exit_distribution(sys, u))


def _exit_distribution(sys: AbsorbedSystem, u: np.ndarray) -> dict[Point, float]:
    mass = sys.exit_mass(u)
    agg: dict[Point, float] = {}
    for bx, by, m in zip(sys.contact_x.tolist(), sys.contact_y.tolist(),
                         mass.tolist()):
        key = (bx, by)
        agg[key] = agg.get(key, 0.0) + m
    return agg


def _inner_neighbors(domain: LatticeDomain, x: Point) -> list[Point]:
    return [q for q in ((x[0] + dx, x[1] + dy) for dx, dy in STEPS) if q in domain]


def excursion_kernel(domain: LatticeDomain, x: Point, y: Point,
                     method: str = "green",
                     tolerance: float = DEFAULT_TOLERANCE) -> float:
    """Boundary-to-boundary kernel h_bd(x, y).

    ``method="green"`` uses the double last-exit sum
    (1/16) sum_{(w,x)} sum_{(z,y)} G_A(w, z); ``method="first-step"`` uses
    (1/4) sum_{(w,x)} h_A(w, y).
    """
    bd = boundary(domain)
    if x not in bd.outer or y not in bd.outer:
        raise NotBoundary(f"{x} and {y} must be outer boundary points")
    if x == y:
        raise SamePoint("excursion kernel needs two distinct boundary points")
    ws = _inner_neighbors(domain, x)
    if method == "first-step":
        return sum(poisson_kernel(domain, w, tolerance).values.get(y, 0.0)
                   for w in ws) / 4.0
    if method != "green":
        raise ValueError(f"unknown method {method!r}")
    zs = _inner_neighbors(domain, y)
    total = 0.0
    for w in ws:
        row = green_row(domain, w, tolerance)
        total += sum(row[z] for z in zs)
    return total / 16.0


def excursion_matrix(domain: LatticeDomain, xs, ys,
                     tolerance: float = DEFAULT_TOLERANCE) -> HittingMatrix:
    """Matrix [h_bd(x_j, y_l)] with one solve per distinct inner neighbour."""
    xs = tuple(tuple(p) for p in xs)
    ys = tuple(tuple(p) for p in ys)
    pts = xs + ys
    if len(set(pts)) != len(pts):
        raise DuplicatePoint("matrix points must be distinct")
    bd = boundary(domain)
    for p in pts:
        if p not in bd.outer:
            raise NotBoundary(f"{p} is not an outer boundary point")
    w_sets = [_inner_neighbors(domain, x) for x in xs]
    z_sets = [_inner_neighbors(domain, y) for y in ys]
    rows = {w: green_row(domain, w, tolerance)
            for w in sorted({w for ws in w_sets for w in ws})}
    k = len(xs)
    entries = np.zeros((k, k))
    for j in range(k):
        for l in range(k):
            entries[j, l] = sum(rows[w][z]
                                for w in w_sets[j] for z in z_sets[l]) / 16.0
    return HittingMatrix(xs, ys, entries)


def discrete_laplacian(field: HarmonicField, x: Point) -> float:
    """(1/4) sum over unit steps e of (F(x+e) - F(x))."""
    vals = field.values
    if x not in vals:
        raise MissingNeighbor(f"{x} not in field support")
    total = 0.0
    for dx, dy in STEPS:
        q = (x[0] + dx, x[1] + dy)
        if q not in vals:
            raise MissingNeighbor(f"neighbour {q} not in field support")
        total += vals[q] - vals[x]
    return total / 4.0


def sample_exit_walk(domain: LatticeDomain, x: Point, rng_seed: int):
    """Walk from x until the first point off the domain; deterministic in seed."""
    from .lerw import WalkPath

    if x not in domain:
        raise PointOutsideDomain(f"{x} not in domain")
    rt = walk_grid(domain)
    rng = philox_stream(rng_seed)
    sites = [rt.flatten(x)]
    run_until_exit(rt, sites[0], rng, sites)
    return WalkPath(tuple(rt.unflatten(i) for i in sites))


def exit_distribution_mc(domain: LatticeDomain, x: Point, n_samples: int,
                         rng_seed: int) -> dict[Point, float]:
    """Empirical exit frequencies from an interior start (MC oracle for h_A)."""
    from ._walk import StreamFamily

    if x not in domain:
        raise PointOutsideDomain(f"{x} not in domain")
    rt = walk_grid(domain)
    start = rt.flatten(x)
    flat = rt.flat
    deltas = rt.deltas
    family = StreamFamily(rng_seed)
    counts: dict[int, int] = {}
    for i in range(n_samples):
        rng = family.stream(i)
        pos = start
        steps: list = []
        cursor = 0
        while flat[pos]:
            if cursor == len(steps):
                steps = rng.integers(0, 4, size=64).tolist()
                cursor = 0
            pos += deltas[steps[cursor]]
            cursor += 1
        counts[pos] = counts.get(pos, 0) + 1
    return {rt.unflatten(i): c / n_samples for i, c in sorted(counts.items())}


# -- rational-arithmetic exact mode (small domains, test oracles) --------------

def exact_green_matrix(domain: LatticeDomain):
    """Full Green's matrix as Fractions via Gauss-Jordan on (I - P/4).

    Intended for domains of a few dozen points; cost grows cubically.
    """
    pts = sorted(domain.points)
    n = len(pts)
    idx = {p: i for i, p in enumerate(pts)}
    quarter = Fraction(1, 4)
    aug = [[Fraction(0)] * (2 * n) for _ in range(n)]
    for i, p in enumerate(pts):
        aug[i][i] = Fraction(1)
        aug[i][n + i] = Fraction(1)
        for dx, dy in STEPS:
            q = (p[0] + dx, p[1] + dy)
            if q in idx:
                aug[i][idx[q]] -= quarter
    for col in range(n):
        piv = next(r for r in range(col, n) if aug[r][col] != 0)
        aug[col], aug[piv] = aug[piv], aug[col]
        inv = Fraction(1) / aug[col][col]
        aug[col] = [v * inv for v in aug[col]]
        for r in range(n):
            if r != col and aug[r][col] != 0:
                f = aug[r][col]
                aug[r] = [a - f * b for a, b in zip(aug[r], aug[col])]
    green = {pts[i]: {pts[j]: aug[i][n + j] for j in range(n)} for i in range(n)}
    return green


def exact_poisson_row(domain: LatticeDomain, x: Point) -> dict[Point, Fraction]:
    """h_A(x, .) with exact rational arithmetic."""
    green = exact_green_matrix(domain)
    quarter = Fraction(1, 4)
    out: dict[Point, Fraction] = {}
    for (z, y) in boundary(domain).edges:
        out[y] = out.get(y, Fraction(0)) + quarter * green[x][z]
    return out


def exact_excursion(domain: LatticeDomain, x: Point, y: Point) -> Fraction:
    """h_bd(x, y) with exact rational arithmetic."""
    green = exact_green_matrix(domain)
    ws = _inner_neighbors(domain, x)
    zs = _inner_neighbors(domain, y)
    total = Fraction(0)
    for w in ws:
        for z in zs:
            total += green[w][z]
    return total / 16
