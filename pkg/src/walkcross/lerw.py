"""Loop erasure and Monte Carlo estimation of multi-walk crossing events.

Loop erasure removes cycles chronologically: the erased path follows, from
each retained site, the step taken after that site's last visit.  The
crossing event for k boundary pairs requires each walk to step straight
into the domain, leave it exactly at its partner point, and (from the
second walk on) avoid every site of the previously erased paths.  Walks are
driven by a counter-based Philox generator; each sample owns a jump-derived
stream, so estimates merge associatively across any partition of the
sample indices.
"""

from __future__ import annotations

import math
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass, field

from ._walk import StreamFamily, philox_stream, run_until_exit, walk_grid
from .errors import (
    BadOrdering,
    DuplicatePoint,
    EmptyPath,
    IsolatedBoundaryPoint,
    NotBoundary,
)
from .lattice import STEPS, LatticeDomain, Point, boundary


def _validate_steps(sites: tuple[Point, ...]):
    if not sites:
        raise EmptyPath("a path needs at least one site")
    for a, b in zip(sites, sites[1:]):
        if abs(a[0] - b[0]) + abs(a[1] - b[1]) != 1:
            raise ValueError(f"non-unit step {a} -> {b}")


@dataclass(frozen=True)
class WalkPath:
    """Nearest-neighbour lattice path."""

    sites: tuple[Point, ...]

    def __post_init__(self):
        _validate_steps(self.sites)

    def __len__(self) -> int:
        return len(self.sites)


@dataclass(frozen=True)
class SawPath:
    """Self-avoiding nearest-neighbour lattice path."""

    sites: tuple[Point, ...]

    def __post_init__(self):
        _validate_steps(self.sites)
        if len(set(self.sites)) != len(self.sites):
            raise ValueError("path revisits a site")

    def __len__(self) -> int:
        return len(self.sites)


def _erase(seq: list) -> list:
    """Chronological loop erasure over any hashable site encoding.

    Index jumps: j0 is the last visit to seq[0]; from a retained index j,
    the next retained index is the last visit to seq[j + 1].
    """
    last = {}
    for i, s in enumerate(seq):
        last[s] = i
    j = last[seq[0]]
    out = [seq[j]]
    end = len(seq) - 1
    while j < end:
        j = last[seq[j + 1]]
        out.append(seq[j])
    return out


def loop_erase(path: WalkPath) -> SawPath:
    """Loop-erased part of a walk path; keeps both endpoints' values."""
    if isinstance(path, WalkPath):
        sites = list(path.sites)
    else:
        sites = [tuple(p) for p in path]
        if not sites:
            raise EmptyPath("a path needs at least one site")
    return SawPath(tuple(_erase(sites)))


def sample_lerw(domain: LatticeDomain, x: Point, rng_seed: int):
    """Loop-erased excursion from a boundary point.

    The walk takes a free first step (it may leave immediately), then runs
    until its first site off the domain.  Returns (SawPath, exit point).
    """
    bd = boundary(domain)
    x = tuple(x)
    if x not in bd.outer or not any(
            (x[0] + dx, x[1] + dy) in domain for dx, dy in STEPS):
        raise IsolatedBoundaryPoint(f"{x} is not a boundary point touching the domain")
    rt = walk_grid(domain)
    rng = philox_stream(rng_seed)
    start = rt.flatten(x)
    first = start + rt.deltas[int(rng.integers(0, 4))]
    sites = [start, first]
    if rt.flat[first]:
        run_until_exit(rt, first, rng, sites)
    erased = [rt.unflatten(i) for i in _erase(sites)]
    return SawPath(tuple(erased)), erased[-1]


@dataclass(frozen=True)
class CrossingConfig:
    """k boundary starts and k boundary targets in counterclockwise order.

    The listed order x1..xk, yk..y1 must be counterclockwise along the
    boundary cycle; the verified cycle positions are kept as a certificate.
    """

    domain: LatticeDomain
    xs: tuple[Point, ...]
    ys: tuple[Point, ...]
    ordering: tuple[int, ...] = field(default=())

    def __post_init__(self):
        xs = tuple(tuple(p) for p in self.xs)
        ys = tuple(tuple(p) for p in self.ys)
        object.__setattr__(self, "xs", xs)
        object.__setattr__(self, "ys", ys)
        if len(xs) != len(ys) or not xs:
            raise ValueError("need equally many starts and targets")
        pts = xs + ys
        if len(set(pts)) != len(pts):
            raise DuplicatePoint("crossing points must be distinct")
        bd = boundary(self.domain)
        pos = {}
        for p in pts:
            edges = [i for i, (_, y) in enumerate(bd.ccw_cycle) if y == p]
            if not edges:
                raise NotBoundary(f"{p} is not an outer boundary point")
            pos[p] = min(edges)
        seq = [pos[p] for p in xs + ys[::-1]]
        rel = [(s - seq[0]) % len(bd.ccw_cycle) for s in seq]
        if any(b <= a for a, b in zip(rel, rel[1:])):
            raise BadOrdering(
                "points must be listed counterclockwise as x1..xk,yk..y1")
        object.__setattr__(self, "ordering", tuple(seq))

    @property
    def k(self) -> int:
        return len(self.xs)


def _runtime(cfg: CrossingConfig):
    rt = walk_grid(cfg.domain)
    return (rt, [rt.flatten(p) for p in cfg.xs], [rt.flatten(p) for p in cfg.ys])


def _event(rt, xs_flat, ys_flat, rng) -> bool:
    flat = rt.flat
    deltas = rt.deltas
    k = len(xs_flat)
    forbidden: set[int] = set()
    for i in range(k):
        start = xs_flat[i]
        pos = start + deltas[int(rng.integers(0, 4))]
        if not flat[pos]:
            return False  # first step must enter the domain
        sites = [start, pos]
        append = sites.append
        steps: list = []
        cursor = 0
        while flat[pos]:
            if cursor == len(steps):
                steps = rng.integers(0, 4, size=64).tolist()
                cursor = 0
            pos += deltas[steps[cursor]]
            cursor += 1
            append(pos)
        if pos != ys_flat[i]:
            return False
        if i and not forbidden.isdisjoint(sites):
            return False
        if i < k - 1:
            forbidden.update(_erase(sites))
    return True


def crossing_event_sample(cfg: CrossingConfig, rng_seed: int) -> bool:
    """One sample of the crossing event; deterministic in the seed."""
    rt, xs_flat, ys_flat = _runtime(cfg)
    return _event(rt, xs_flat, ys_flat, philox_stream(rng_seed))


def crossing_probability_mc(cfg: CrossingConfig, n_samples: int, rng_seed: int,
                            threads: int = 1):
    """Sample mean of the crossing event over counter-split streams.

    Returns (estimate, binomial standard error).  Sample i always uses
    stream i of the seed, so the result is independent of how the index
    range is chunked, ordered, or spread over threads.
    """
    if n_samples < 1:
        raise ValueError("need at least one sample")
    rt, xs_flat, ys_flat = _runtime(cfg)

    def count(lo: int, hi: int) -> int:
        family = StreamFamily(rng_seed)
        hits = 0
        for i in range(lo, hi):
            if _event(rt, xs_flat, ys_flat, family.stream(i)):
                hits += 1
        return hits

    if threads > 1:
        chunk = -(-n_samples // threads)
        bounds = [(lo, min(lo + chunk, n_samples))
                  for lo in range(0, n_samples, chunk)]
        with ThreadPoolExecutor(max_workers=threads) as pool:
            hits = sum(pool.map(lambda b: count(*b), bounds))
    else:
        hits = count(0, n_samples)
    p = hits / n_samples
    return p, math.sqrt(p * (1.0 - p) / n_samples)


def exit_distribution_mc(domain: LatticeDomain, x: Point, n_samples: int,
                         rng_seed: int) -> dict:
    """Empirical exit frequencies of the boundary-start walk (MC oracle).

    Matches the excursion kernel plus the immediate-exit mass (1/4 per
    off-domain neighbour of x) in the large-sample limit.
    """
    rt = walk_grid(domain)
    start = rt.flatten(tuple(x))
    flat = rt.flat
    deltas = rt.deltas
    family = StreamFamily(rng_seed)
    counts: dict[int, int] = {}
    for i in range(n_samples):
        rng = family.stream(i)
        pos = start + deltas[int(rng.integers(0, 4))]
        if flat[pos]:
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
