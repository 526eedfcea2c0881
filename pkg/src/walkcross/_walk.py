"""Flat-grid runtime for stepping simple random walks on a domain.

Positions are flattened indices into the domain's margin-padded boolean
grid; the two-cell margin guarantees that one step from any point of the
domain or its outer boundary stays on the grid, so the step loop needs no
bounds checks.

Randomness is a Philox4x64 counter-based generator keyed by the 64-bit
seed.  Stream i starts at counter i * 2^128 (the generator's jump size), so
sample streams are reproducible under any partition or processing order of
the stream indices.  ``StreamFamily`` repositions one shared generator per
stream, which is much cheaper than constructing bit generators per sample.
"""

from __future__ import annotations

import numpy as np

_CHUNK = 64


class WalkGrid:
    """Cached flat membership view of a domain grid (list for fast lookup)."""

    def __init__(self, domain):
        grid = domain._grid
        self.flat = grid.ravel().tolist()
        self.row = grid.shape[1]
        self.off = domain._off
        # step order fixed: +x, -x, +y, -y
        self.deltas = (self.row, -self.row, 1, -1)

    def flatten(self, p) -> int:
        return (p[0] - self.off[0]) * self.row + (p[1] - self.off[1])

    def unflatten(self, i: int):
        x, y = divmod(i, self.row)
        return (x + self.off[0], y + self.off[1])


def walk_grid(domain) -> WalkGrid:
    rt = domain._cache.get("walkgrid")
    if rt is None:
        rt = WalkGrid(domain)
        domain._cache["walkgrid"] = rt
    return rt


def philox_stream(seed: int, stream: int = 0) -> np.random.Generator:
    """Independent generator for (seed, stream); streams are 2^128 apart."""
    bg = np.random.Philox(key=seed)
    if stream:
        bg = bg.jumped(stream)
    return np.random.Generator(bg)


class StreamFamily:
    """Cheap access to the (seed, stream) generators of one seed.

    ``stream(i)`` repositions the shared generator at counter i * 2^128 and
    clears all buffered state, producing draws identical to
    ``philox_stream(seed, i)``.
    """

    def __init__(self, seed: int):
        self._bg = np.random.Philox(key=seed)
        self.generator = np.random.Generator(self._bg)

    def stream(self, index: int) -> np.random.Generator:
        st = self._bg.state
        st["state"]["counter"][:] = 0
        st["state"]["counter"][2] = index
        st["buffer_pos"] = 4
        st["has_uint32"] = 0
        st["uinteger"] = 0
        self._bg.state = st
        return self.generator


def run_until_exit(rt: WalkGrid, pos: int, rng, out: list) -> int:
    """Step from ``pos`` (inside the domain) until the first site off it.

    Visited sites (including the exit) are appended to ``out``; the exit's
    flat index is returned.
    """
    flat = rt.flat
    deltas = rt.deltas
    append = out.append
    while True:
        for s in rng.integers(0, 4, size=_CHUNK).tolist():
            pos += deltas[s]
            append(pos)
            if not flat[pos]:
                return pos
