"""Finite simply connected subsets of the square lattice.

A domain is a finite set of integer points that is connected under
nearest-neighbour adjacency and whose complement is also connected.  Each
domain carries its three boundary notions (outer points, inner points,
boundary edges) and the counterclockwise cycle of boundary edges tracing the
union-of-squares polygon that surrounds the point set.
"""

from __future__ import annotations

import math
from collections import deque
from dataclasses import dataclass

import numpy as np

from .errors import Empty, NotConnected, NotSimplyConnected, OriginMissing

Point = tuple[int, int]

STEPS: tuple[Point, ...] = ((1, 0), (0, 1), (-1, 0), (0, -1))

# Directed dual segment of a boundary edge, in doubled (half-integer) corner
# coordinates, oriented so the domain interior stays on the left.
_DUAL_SEGMENT = {
    (1, 0): ((1, -1), (1, 1)),
    (0, 1): ((1, 1), (-1, 1)),
    (-1, 0): ((-1, 1), (-1, -1)),
    (0, -1): ((-1, -1), (1, -1)),
}


@dataclass(frozen=True)
class BoundaryData:
    """Boundary structures of a lattice domain.

    ``edges`` are ordered pairs (inside, outside); ``ccw_cycle`` lists every
    edge exactly once, ordered counterclockwise along the union-of-squares
    polygon, starting at the edge with the lexicographically smallest
    (outside, inside) pair.
    """

    outer: frozenset[Point]
    inner: frozenset[Point]
    edges: frozenset[tuple[Point, Point]]
    ccw_cycle: tuple[tuple[Point, Point], ...]

    def cycle_position(self, edge: tuple[Point, Point]) -> int:
        return self.ccw_cycle.index(edge)


class LatticeDomain:
    """Validated finite simply connected subset of the square lattice.

    Immutable after construction; membership queries run against a dense
    boolean grid over the bounding box.  Use :func:`build_domain` or one of
    the generators instead of calling the constructor directly.
    """

    def __init__(self, points: frozenset[Point]):
        self.points = points
        xs = [p[0] for p in points]
        ys = [p[1] for p in points]
        self.bounding_box = (min(xs), min(ys), max(xs), max(ys))
        self.origin_included = (0, 0) in points
        x0, y0, x1, y1 = self.bounding_box
        # two-cell margin so any single step from A or its outer boundary
        # stays on the grid
        self._off = (x0 - 2, y0 - 2)
        grid = np.zeros((x1 - x0 + 5, y1 - y0 + 5), dtype=bool)
        for (x, y) in points:
            grid[x - self._off[0], y - self._off[1]] = True
        self._grid = grid
        self._boundary: BoundaryData | None = None
        self._cache: dict = {}

    # membership ---------------------------------------------------------

    def __contains__(self, p: Point) -> bool:
        x = p[0] - self._off[0]
        y = p[1] - self._off[1]
        if 0 <= x < self._grid.shape[0] and 0 <= y < self._grid.shape[1]:
            return bool(self._grid[x, y])
        return False

    def __len__(self) -> int:
        return len(self.points)

    def __iter__(self):
        return iter(sorted(self.points))

    def __repr__(self) -> str:
        return f"LatticeDomain({len(self.points)} points, bbox={self.bounding_box})"

    # metrics --------------------------------------------------------------

    def inradius_exact(self) -> float:
        """min |z| over excluded z, as a real number."""
        if not self.origin_included:
            raise OriginMissing("inradius is measured from the origin")
        best = math.inf
        for (x, y) in boundary(self).outer:
            best = min(best, x * x + y * y)
        return math.sqrt(best)

    def radius_exact(self) -> float:
        if not self.origin_included:
            raise OriginMissing("radius is measured from the origin")
        return math.sqrt(max(x * x + y * y for (x, y) in self.points))


def build_domain(points) -> LatticeDomain:
    """Validate a point set and return the corresponding domain.

    Connectivity of the set is checked by flood fill; simple connectivity by
    flood filling the complement over the bounding box inflated by one ring,
    treating everything outside as a single region.
    """
    pts = frozenset((int(x), int(y)) for (x, y) in points)
    if not pts:
        raise Empty("domain needs at least one point")

    # connectivity of the set
    seen = {next(iter(sorted(pts)))}
    queue = deque(seen)
    while queue:
        x, y = queue.popleft()
        for dx, dy in STEPS:
            q = (x + dx, y + dy)
            if q in pts and q not in seen:
                seen.add(q)
                queue.append(q)
    if len(seen) != len(pts):
        raise NotConnected(f"{len(pts) - len(seen)} points unreachable from the first")

    # connectivity of the complement over the inflated bounding box
    x0 = min(p[0] for p in pts) - 1
    y0 = min(p[1] for p in pts) - 1
    x1 = max(p[0] for p in pts) + 1
    y1 = max(p[1] for p in pts) + 1
    start = (x0, y0)
    seen_c = {start}
    queue = deque([start])
    while queue:
        x, y = queue.popleft()
        for dx, dy in STEPS:
            q = (x + dx, y + dy)
            if x0 <= q[0] <= x1 and y0 <= q[1] <= y1 and q not in pts and q not in seen_c:
                seen_c.add(q)
                queue.append(q)
    n_complement = (x1 - x0 + 1) * (y1 - y0 + 1) - len(pts)
    if len(seen_c) != n_complement:
        raise NotSimplyConnected("complement is disconnected: the set encloses a hole")

    return LatticeDomain(pts)


# -- generators ---------------------------------------------------------------

def lattice_disk(n: int) -> LatticeDomain:
    """Lattice disk {z : |z| <= n}; lattice_disk(1) is the 5-point plus."""
    if n < 1:
        raise ValueError("n must be >= 1")
    pts = [(x, y) for x in range(-n, n + 1) for y in range(-n, n + 1)
           if x * x + y * y <= n * n]
    return build_domain(pts)


def square_domain(n: int) -> LatticeDomain:
    """Square {z : max(|x|, |y|) <= n}."""
    if n < 1:
        raise ValueError("n must be >= 1")
    return build_domain([(x, y) for x in range(-n, n + 1) for y in range(-n, n + 1)])


def plus_domain(n: int = 1) -> LatticeDomain:
    """Plus shape with four arms of length n."""
    if n < 1:
        raise ValueError("n must be >= 1")
    pts = {(0, 0)}
    for k in range(1, n + 1):
        pts.update({(k, 0), (-k, 0), (0, k), (0, -k)})
    return build_domain(pts)


# -- boundary -----------------------------------------------------------------

def boundary(domain: LatticeDomain) -> BoundaryData:
    """Outer/inner/edge boundaries plus the counterclockwise edge cycle."""
    if domain._boundary is not None:
        return domain._boundary

    edges = []
    for p in sorted(domain.points):
        for dx, dy in STEPS:
            q = (p[0] + dx, p[1] + dy)
            if q not in domain:
                edges.append((p, q))

    # corner -> edge map in doubled coordinates; each corner is entered and
    # left exactly once because diagonal pinch corners would disconnect the
    # complement and are rejected at validation
    start_of = {}
    seg = {}
    for (p, q) in edges:
        d = (q[0] - p[0], q[1] - p[1])
        (sx, sy), (ex, ey) = _DUAL_SEGMENT[d]
        a = (2 * p[0] + sx, 2 * p[1] + sy)
        b = (2 * p[0] + ex, 2 * p[1] + ey)
        if a in start_of:
            raise NotSimplyConnected("boundary polygon self-touches")
        start_of[a] = (p, q)
        seg[(p, q)] = (a, b)

    anchor = min(edges, key=lambda e: (e[1], e[0]))
    cycle = [anchor]
    cur = seg[anchor][1]
    while cur != seg[anchor][0]:
        nxt = start_of[cur]
        cycle.append(nxt)
        cur = seg[nxt][1]
    if len(cycle) != len(edges):
        raise NotSimplyConnected("boundary polygon is not a single closed loop")

    data = BoundaryData(
        outer=frozenset(q for (_, q) in edges),
        inner=frozenset(p for (p, _) in edges),
        edges=frozenset(edges),
        ccw_cycle=tuple(cycle),
    )
    domain._boundary = data
    return data


def dual_segment_corners(edge: tuple[Point, Point]) -> tuple[tuple[float, float], tuple[float, float]]:
    """Endpoints of the unit dual segment of a boundary edge (ccw-directed)."""
    (p, q) = edge
    d = (q[0] - p[0], q[1] - p[1])
    (sx, sy), (ex, ey) = _DUAL_SEGMENT[d]
    return ((p[0] + sx / 2, p[1] + sy / 2), (p[0] + ex / 2, p[1] + ey / 2))


def inradius(domain: LatticeDomain) -> int:
    """Distance from the origin to the nearest excluded point, floored."""
    return int(math.floor(domain.inradius_exact() + 1e-12))


def radius(domain: LatticeDomain) -> int:
    """Distance from the origin to the farthest included point, floored."""
    return int(math.floor(domain.radius_exact() + 1e-12))


# -- domain files -------------------------------------------------------------

def save_domain(domain: LatticeDomain, path, header: str | None = None) -> None:
    """Write one `x y` pair per line; `#` starts a comment."""
    with open(path, "w", encoding="ascii") as fh:
        if header:
            for line in header.splitlines():
                fh.write(f"# {line}\n")
        for (x, y) in sorted(domain.points):
            fh.write(f"{x} {y}\n")


def load_domain(path) -> LatticeDomain:
    """Read and validate a domain file (one `x y` pair per line)."""
    pts = []
    with open(path, "r", encoding="ascii") as fh:
        for raw in fh:
            line = raw.split("#", 1)[0].strip()
            if not line:
                continue
            parts = line.split()
            if len(parts) != 2:
                raise ValueError(f"bad domain file line: {raw!r}")
            pts.append((int(parts[0]), int(parts[1])))
    return build_domain(pts)
