"""Shared test utilities: randomized domains and cached experiment domains."""

from __future__ import annotations

import numpy as np

from walkcross import build_domain, lattice_disk, square_domain
from walkcross.lattice import LatticeDomain


def random_domain(rng: np.random.Generator, max_points: int = 500,
                  max_halfwidth: int = 12) -> LatticeDomain:
    """Random union of integer rectangles through the origin.

    Every rectangle contains (0, 0), so pairwise intersections are connected
    and the union is simply connected by construction; no rejection needed.
    """
    while True:
        pts = set()
        for _ in range(int(rng.integers(2, 7))):
            x0 = -int(rng.integers(0, max_halfwidth))
            x1 = int(rng.integers(0, max_halfwidth))
            y0 = -int(rng.integers(0, max_halfwidth))
            y1 = int(rng.integers(0, max_halfwidth))
            pts.update((x, y) for x in range(x0, x1 + 1)
                       for y in range(y0, y1 + 1))
        if len(pts) <= max_points:
            return build_domain(pts)


_domain_cache: dict = {}


def cached_disk(n: int) -> LatticeDomain:
    """Shared disk instances so solver factorizations are reused across tests."""
    key = ("disk", n)
    if key not in _domain_cache:
        _domain_cache[key] = lattice_disk(n)
    return _domain_cache[key]


def cached_square(n: int) -> LatticeDomain:
    key = ("square", n)
    if key not in _domain_cache:
        _domain_cache[key] = square_domain(n)
    return _domain_cache[key]
