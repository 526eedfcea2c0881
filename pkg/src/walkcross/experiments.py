"""Crossing determinants and the numerical comparison experiments.

The determinant of the boundary excursion matrix equals the probability of
the ordered non-intersecting crossing event, so Monte Carlo estimates of
that event cross-check the solver; the normalized (conditional) determinant
is the conformally invariant part and is compared against its disk form
built from computed boundary angles.

Angular-gap preconditions: the estimates being tested degrade as paired
boundary points approach each other, with a stated validity gap of
n^(-1/16) log^2 n.  That expression exceeds pi for every feasible n, so the
gate used here is min(n^(-1/16) log^2 n, pi/3): it keeps the asymptotic
form, still rejects degenerate nearly-equal pairs, and admits the
quarter-turn and half-turn configurations the experiments use.
"""

from __future__ import annotations

import math

import numpy as np

from . import lattice
from .continuum import (
    conformal_data,
    interior_map_angle,
    lambda_disk,
    lambda_rect_exact,
    prop15_leading,
    theta_boundary,
)
from .errors import AngularGapTooSmall, ZeroDiagonal
from .harmonic import excursion_kernel, excursion_matrix, green_row, poisson_kernel
from .lerw import CrossingConfig
from .potential import K0, k_x
from .report import ExperimentReport

_TWO_OVER_PI = 2.0 / math.pi


# ---------------------------------------------------------------------------
# determinants
# ---------------------------------------------------------------------------

def crossing_det(cfg: CrossingConfig, tolerance: float = 1e-12) -> float:
    """Determinant of the excursion hitting matrix for the configuration.

    For exact kernels this equals the probability of the ordered
    non-intersecting crossing event; here it is the determinant of the
    computed matrix.
    """
    return float(np.linalg.det(
        excursion_matrix(cfg.domain, cfg.xs, cfg.ys, tolerance).entries))


def conditional_det(cfg: CrossingConfig, tolerance: float = 1e-12) -> float:
    """Determinant with rows normalized by their diagonal entries.

    Equals crossing_det divided by the product of diagonal kernels: the
    conditional probability of mutual avoidance given the exits match.
    """
    mat = excursion_matrix(cfg.domain, cfg.xs, cfg.ys, tolerance).entries
    diag = np.diag(mat)
    if np.any(diag <= 0.0):
        raise ZeroDiagonal("conditional determinant needs positive diagonal")
    return float(np.linalg.det(mat / diag[:, None]))


def det_perturbation_bound(k: int, eps: float, sup_b: float) -> float:
    """Bound for |det[b(1+delta)] - det[b]| when |delta| <= eps entrywise."""
    return ((1.0 + eps) ** k - 1.0) * k ** (k / 2.0) * sup_b ** k


# ---------------------------------------------------------------------------
# point selection
# ---------------------------------------------------------------------------

def angular_gap_threshold(n: int) -> float:
    """Desk-scale angular-gap gate; see the module docstring."""
    return min(n ** (-1.0 / 16.0) * math.log(n) ** 2, math.pi / 3.0)


def _circular_gap(a: float, b: float) -> float:
    d = abs(a - b) % (2.0 * math.pi)
    return min(d, 2.0 * math.pi - d)


def select_boundary_points(theta_map: dict, targets) -> list:
    """Snap target angles to the nearest boundary points (distinct)."""
    chosen = []
    taken = set()
    for t in targets:
        t = t % (2.0 * math.pi)
        best = min((p for p in sorted(theta_map) if p not in taken),
                   key=lambda p: (_circular_gap(theta_map[p], t), p))
        chosen.append(best)
        taken.add(best)
    return chosen


def _make_domain(family, n: int) -> lattice.LatticeDomain:
    if callable(family):
        return family(n)
    if family == "disk":
        return lattice.lattice_disk(n)
    if family == "square":
        return lattice.square_domain(n)
    raise ValueError(f"unknown domain family {family!r}")


def _family_label(family) -> str:
    return family if isinstance(family, str) else getattr(family, "__name__", "custom")


def _base_metadata(family, n_list, mesh_levels, tolerance) -> dict:
    return {
        "family": _family_label(family),
        "n_list": ",".join(str(n) for n in n_list),
        "mesh_levels": ",".join(str(m) for m in mesh_levels),
        "solver": "splu<=150000 unknowns, pyamg-cg above",
        "solver_tolerance": tolerance,
    }


# ---------------------------------------------------------------------------
# experiments
# ---------------------------------------------------------------------------

def excursion_ratio_experiment(family="disk", n_list=(16, 32, 64),
                               targets=(0.0, math.pi),
                               mesh_levels=(2, 4),
                               tolerance: float = 1e-12) -> ExperimentReport:
    """Boundary excursion kernel against its conformal prediction (thm11).

    Per n, compares h_bd(x, y) with
    (pi/2) h(0,x) h(0,y) / (1 - cos(theta_x - theta_y)) for a snapped pair
    of boundary points, and reports the ratio.
    """
    rows = []
    for n in n_list:
        domain = _make_domain(family, n)
        theta = theta_boundary(domain, max(mesh_levels), tolerance)
        x, y = select_boundary_points(theta, targets)
        gap = _circular_gap(theta[x], theta[y])
        gate = angular_gap_threshold(n)
        if gap < gate:
            raise AngularGapTooSmall(f"gap {gap:.4f} below gate {gate:.4f} at n={n}")
        h0 = poisson_kernel(domain, (0, 0), tolerance)
        lhs = excursion_kernel(domain, x, y, tolerance=tolerance)
        rhs = (math.pi / 2.0) * h0[x] * h0[y] / (1.0 - math.cos(theta[x] - theta[y]))
        rows.append({
            "n": n, "x": f"({x[0]};{x[1]})", "y": f"({y[0]};{y[1]})",
            "theta_gap": gap, "lhs": lhs, "rhs": rhs,
            "ratio": lhs / rhs, "ratio_error": abs(lhs / rhs - 1.0),
        })
    meta = _base_metadata(family, n_list, mesh_levels, tolerance)
    meta["targets"] = ";".join(repr(float(t)) for t in targets)
    return ExperimentReport(
        "thm11",
        ("n", "x", "y", "theta_gap", "lhs", "rhs", "ratio", "ratio_error"),
        rows, meta)


def green_conformal_experiment(family="disk", n_list=(8, 16, 32, 64),
                               x_list=((1, 0),), mesh_levels=(2, 4),
                               tolerance: float = 1e-12) -> ExperimentReport:
    """Walk Green's function against continuum conformal data (thm12).

    Per n, compares G(0) with (2/pi)(-log f'(0)) + k0 and, for each sample
    x, G(x) with (2/pi) g(x) + k_x.
    """
    rows = []
    for n in n_list:
        domain = _make_domain(family, n)
        row0 = green_row(domain, (0, 0), tolerance)
        cd = conformal_data(domain, x_list, mesh_levels, tolerance)
        lhs = row0[(0, 0)]
        rhs = _TWO_OVER_PI * (-math.log(cd.f_prime_at_0)) + K0
        rows.append({"n": n, "point": "origin", "lhs": lhs, "rhs": rhs,
                     "abs_error": abs(lhs - rhs)})
        for x in x_list:
            x = tuple(x)
            lhs = row0[x]
            rhs = _TWO_OVER_PI * cd.g_values[x] + k_x(x)
            rows.append({"n": n, "point": f"({x[0]};{x[1]})", "lhs": lhs,
                         "rhs": rhs, "abs_error": abs(lhs - rhs)})
    return ExperimentReport(
        "thm12", ("n", "point", "lhs", "rhs", "abs_error"), rows,
        _base_metadata(family, n_list, mesh_levels, tolerance))


def conditional_det_experiment(family="disk", n_list=(16, 32, 64),
                               targets=(0.25 * math.pi, 0.75 * math.pi,
                                        1.25 * math.pi, 1.75 * math.pi),
                               mesh_levels=(2, 4),
                               tolerance: float = 1e-12) -> ExperimentReport:
    """Conditional crossing determinant against its disk form (cor14).

    Targets are listed counterclockwise as x1, x2, y2, y1.
    """
    rows = []
    for n in n_list:
        domain = _make_domain(family, n)
        theta = theta_boundary(domain, max(mesh_levels), tolerance)
        pts = select_boundary_points(theta, targets)
        xs = pts[:2]
        ys = [pts[3], pts[2]]
        tx = [theta[p] for p in xs]
        ty = [theta[p] for p in ys]
        gap = min(_circular_gap(tx[0], ty[0]), _circular_gap(tx[-1], ty[-1]))
        gate = angular_gap_threshold(n)
        if gap < gate:
            raise AngularGapTooSmall(f"gap {gap:.4f} below gate {gate:.4f} at n={n}")
        cfg = CrossingConfig(domain, tuple(xs), tuple(ys))
        lhs_mat = excursion_matrix(domain, cfg.xs, cfg.ys, tolerance).entries
        diag = np.diag(lhs_mat)
        if np.any(diag <= 0.0):
            raise ZeroDiagonal("conditional determinant needs positive diagonal")
        lhs_norm = lhs_mat / diag[:, None]
        lhs = float(np.linalg.det(lhs_norm))
        k = len(xs)
        rhs_norm = np.empty((k, k))
        for j in range(k):
            dj = 1.0 - math.cos(tx[j] - ty[j])
            for l in range(k):
                rhs_norm[j, l] = dj / (1.0 - math.cos(tx[j] - ty[l]))
        rhs = float(np.linalg.det(rhs_norm))
        eps = float(np.max(np.abs(lhs_norm / rhs_norm - 1.0)))
        bound = det_perturbation_bound(k, eps, float(np.max(np.abs(rhs_norm))))
        rows.append({"n": n, "theta_gap": gap, "lhs": lhs, "rhs": rhs,
                     "abs_difference": abs(lhs - rhs),
                     "entry_eps": eps, "perturbation_bound": bound})
    meta = _base_metadata(family, n_list, mesh_levels, tolerance)
    meta["targets"] = ";".join(repr(float(t)) for t in targets)
    return ExperimentReport(
        "cor14",
        ("n", "theta_gap", "lhs", "rhs", "abs_difference", "entry_eps",
         "perturbation_bound"),
        rows, meta)


def interior_green_ratio_experiment(family="disk", n_list=(16, 32, 64),
                                    offset: int = 2, mesh_levels=(2, 4),
                                    tolerance: float = 1e-12) -> ExperimentReport:
    """Two-point Green's values near the boundary (prop316).

    Compares G(x, y) against (pi/2) G(x) G(y) / (1 - cos(theta_x - theta_y))
    for antipodal interior points at radius n - offset, with interior angles
    from the harmonic-measure average of the boundary phase.
    """
    rows = []
    for n in n_list:
        domain = _make_domain(family, n)
        x = (n - offset, 0)
        y = (-(n - offset), 0)
        angles = interior_map_angle(domain, (x, y), max(mesh_levels), tolerance)
        gap = _circular_gap(angles[x][0], angles[y][0])
        gate = angular_gap_threshold(n)
        if gap < gate:
            raise AngularGapTooSmall(f"gap {gap:.4f} below gate {gate:.4f} at n={n}")
        row0 = green_row(domain, (0, 0), tolerance)
        lhs = green_row(domain, x, tolerance)[y]
        rhs = ((math.pi / 2.0) * row0[x] * row0[y]
               / (1.0 - math.cos(angles[x][0] - angles[y][0])))
        rows.append({"n": n, "theta_gap": gap, "lhs": lhs, "rhs": rhs,
                     "ratio": lhs / rhs, "ratio_error": abs(lhs / rhs - 1.0)})
    meta = _base_metadata(family, n_list, mesh_levels, tolerance)
    meta["radial_offset"] = offset
    return ExperimentReport(
        "prop316",
        ("n", "theta_gap", "lhs", "rhs", "ratio", "ratio_error"),
        rows, meta)


def rect_lambda_experiment(k: int = 2,
                           q=(2.0 * math.pi / 3.0, math.pi / 3.0),
                           q_p=None, L_list=(3.0, 4.0, 5.0, 6.0)) -> ExperimentReport:
    """Exact rectangle determinant against its long-rectangle leading term."""
    if q_p is None:
        q_p = q
    rows = []
    for L in L_list:
        exact = lambda_rect_exact(k, q, q_p, L)
        lead = prop15_leading(k, q, q_p, L)
        rows.append({
            "L": float(L), "lambda_exact": exact, "lambda_leading": lead,
            "ratio": exact / lead,
            "log_lambda_exact": math.log(exact),
            "log_lambda_leading": math.log(lead),
        })
    meta = {
        "k": k,
        "q": ";".join(repr(float(v)) for v in q),
        "q_prime": ";".join(repr(float(v)) for v in q_p),
        "L_list": ",".join(repr(float(L)) for L in L_list),
    }
    return ExperimentReport(
        "prop15",
        ("L", "lambda_exact", "lambda_leading", "ratio", "log_lambda_exact",
         "log_lambda_leading"),
        rows, meta)


#: CLI experiment ids
EXPERIMENTS = {
    "thm11": excursion_ratio_experiment,
    "thm12": green_conformal_experiment,
    "cor14": conditional_det_experiment,
    "prop316": interior_green_ratio_experiment,
    "prop15": rect_lambda_experiment,
}
