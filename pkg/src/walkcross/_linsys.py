"""Absorbed five-point systems (I - P/4) on masked grids.

One class serves both the unit-lattice solves and the refined continuum
solves: sites are the True cells of a boolean grid, the walk is killed on
the first step off the mask.  Systems up to a size threshold are factorized
with SuperLU; larger ones are solved with classical AMG-preconditioned CG
(pyamg).  Both backends are deterministic; every solve is residual-checked.
"""

from __future__ import annotations

import numpy as np
import scipy.sparse as sp
import scipy.sparse.linalg as spla

from .errors import PointOutsideDomain, SolveFailure

#: above this many unknowns SuperLU fill-in gets expensive; switch to AMG
_DIRECT_LIMIT = 150_000

_SHIFTS = ((1, 0), (-1, 0), (0, 1), (0, -1))


class AbsorbedSystem:
    """(I - P/4) over the True cells of ``mask``.

    ``offset`` maps grid indices to site coordinates:
    site = (ix + offset[0], iy + offset[1]).
    """

    def __init__(self, mask: np.ndarray, offset: tuple[int, int],
                 tolerance: float = 1e-12):
        self.mask = mask
        self.offset = offset
        self.tolerance = tolerance
        self.n = int(mask.sum())

        idx = np.full(mask.shape, -1, dtype=np.int64)
        idx[mask] = np.arange(self.n)
        self._idx = idx
        ix, iy = np.nonzero(mask)
        self.site_x = ix + offset[0]
        self.site_y = iy + offset[1]

        rows = []
        cols = []
        cx = []  # absorbed contacts: interior cell index
        ex = []  # absorbed contacts: exterior site coords
        ey = []
        for dx, dy in _SHIFTS:
            inner = np.zeros_like(mask)
            nbr_in = np.zeros_like(mask)
            src = _shifted_view(mask, dx, dy)
            inner[src[0]] = mask[src[0]] & mask[src[1]]
            nbr_in[src[0]] = mask[src[0]] & ~mask[src[1]]
            # off-mask neighbours reached by stepping off the grid edge
            edge = _edge_cells(mask, dx, dy)
            nbr_in |= edge
            a, b = np.nonzero(inner)
            rows.append(idx[a, b])
            cols.append(idx[a + dx, b + dy])
            a, b = np.nonzero(nbr_in)
            cx.append(idx[a, b])
            ex.append(a + dx + offset[0])
            ey.append(b + dy + offset[1])

        r = np.concatenate(rows)
        c = np.concatenate(cols)
        data = np.full(r.shape, -0.25)
        eye_r = np.arange(self.n)
        self.matrix = sp.coo_matrix(
            (np.concatenate([data, np.ones(self.n)]),
             (np.concatenate([r, eye_r]), np.concatenate([c, eye_r]))),
            shape=(self.n, self.n)).tocsc()
        self.contact_cell = np.concatenate(cx)
        self.contact_x = np.concatenate(ex)
        self.contact_y = np.concatenate(ey)
        self._lu = None
        self._amg = None
        self.backend = "splu" if self.n <= _DIRECT_LIMIT else "pyamg-cg"

    # -- indexing ----------------------------------------------------------

    def index_of(self, site) -> int:
        x = site[0] - self.offset[0]
        y = site[1] - self.offset[1]
        if not (0 <= x < self.mask.shape[0] and 0 <= y < self.mask.shape[1]):
            raise PointOutsideDomain(f"{site} is not an interior site")
        i = self._idx[x, y]
        if i < 0:
            raise PointOutsideDomain(f"{site} is not an interior site")
        return int(i)

    # -- solving -----------------------------------------------------------

    def solve(self, b: np.ndarray) -> np.ndarray:
        if self.backend == "splu":
            if self._lu is None:
                self._lu = spla.splu(self.matrix, permc_spec="MMD_AT_PLUS_A")
            x = self._lu.solve(b)
        else:
            import pyamg

            if self._amg is None:
                self._amg = pyamg.ruge_stuben_solver(self.matrix.tocsr())
            x = self._amg.solve(b, tol=self.tolerance * 1e-2, accel="cg",
                                maxiter=400)
        scale = np.linalg.norm(b)
        if scale == 0.0:
            return np.zeros_like(b)
        res = np.linalg.norm(self.matrix @ x - b) / scale
        if res > self.tolerance:
            # one step of iterative refinement before giving up
            if self.backend == "splu":
                x = x + self._lu.solve(b - self.matrix @ x)
                res = np.linalg.norm(self.matrix @ x - b) / scale
            if res > self.tolerance:
                raise SolveFailure(f"residual {res:.3e} above {self.tolerance:.1e}")
        return x

    def unit_row(self, site) -> np.ndarray:
        """Green's row: solve with a unit source at ``site``."""
        b = np.zeros(self.n)
        b[self.index_of(site)] = 1.0
        return self.solve(b)

    def dirichlet_rhs(self, values: np.ndarray) -> np.ndarray:
        """RHS for the harmonic extension of exterior data.

        ``values[k]`` is the boundary datum at exterior site
        (contact_x[k], contact_y[k]).
        """
        b = np.zeros(self.n)
        np.add.at(b, self.contact_cell, 0.25 * values)
        return b

    def exit_mass(self, u: np.ndarray) -> np.ndarray:
        """Per-contact absorption mass (u[cell]/4) for a Green's row u."""
        return 0.25 * u[self.contact_cell]


def _shifted_view(mask, dx, dy):
    """Index pairs (center slice, neighbour slice) for a unit shift."""
    sl = [slice(None), slice(None)]
    sn = [slice(None), slice(None)]
    if dx == 1:
        sl[0], sn[0] = slice(0, -1), slice(1, None)
    elif dx == -1:
        sl[0], sn[0] = slice(1, None), slice(0, -1)
    if dy == 1:
        sl[1], sn[1] = slice(0, -1), slice(1, None)
    elif dy == -1:
        sl[1], sn[1] = slice(1, None), slice(0, -1)
    return tuple(sl), tuple(sn)


def _edge_cells(mask, dx, dy):
    """Cells whose (dx, dy) neighbour falls off the grid."""
    out = np.zeros_like(mask)
    if dx == 1:
        out[-1, :] = mask[-1, :]
    elif dx == -1:
        out[0, :] = mask[0, :]
    elif dy == 1:
        out[:, -1] = mask[:, -1]
    else:
        out[:, 0] = mask[:, 0]
    return out
