import cmath
import math

import mpmath as mp
import numpy as np
import pytest

from helpers import cached_disk, cached_square
from walkcross import (
    conformal_data,
    continuum_green,
    covariance_check,
    disk_excursion_kernel,
    disk_green,
    interior_map_angle,
    lambda_disk,
    lambda_rect_exact,
    map_deriv_at_0,
    mobius_disk,
    prop15_leading,
    rect_excursion_kernel,
    rect_interior_kernel,
    theta_boundary,
)
from walkcross.continuum import RefinedSystem
from walkcross.errors import (
    BadOrdering,
    BadOrderingWarning,
    BadParameter,
    CoincidentAngles,
    CoincidentPoints,
    NonPositiveLength,
    OutOfRange,
    OutsideDisk,
    PointOutsideDomain,
)

Q2 = (2.0 * math.pi / 3.0, math.pi / 3.0)


def rect_kernel_oracle(L, q, qp, terms=3000, dps=30):
    """Independent high-precision evaluation of the rectangle series."""
    with mp.workdps(dps):
        s = mp.fsum(mp.mpf(n) * mp.sin(n * q) * mp.sin(n * qp) / mp.sinh(n * L)
                    for n in range(1, terms))
        return float(2 / mp.pi * s)


# -- refined-grid solves --------------------------------------------------------

def test_refinement_must_be_even():
    with pytest.raises(ValueError):
        RefinedSystem(cached_disk(2), 3)


def test_continuum_green_disk_halfway():
    # polygon radius of the digital disk is close to 32.5, so g at radius
    # 16.25 is close to log 2 (the sawtooth capacity shifts it by a few %)
    g = continuum_green(cached_disk(32), (16.25, 0.0), 4)
    assert abs(g - math.log(2.0)) < 0.05


def test_continuum_green_vanishes_at_boundary():
    g = continuum_green(cached_disk(16), (16.0, 0.0), 4)
    assert 0.0 < g < 0.1


def test_continuum_green_off_grid_rejected():
    with pytest.raises(PointOutsideDomain):
        continuum_green(cached_disk(4), (0.3, 0.0), 2)
    with pytest.raises(PointOutsideDomain):
        continuum_green(cached_disk(4), (7.0, 0.0), 2)


def test_green_plus_logabs_consistency():
    # g(x) + log|x| is nearly constant near the centre (map-derivative form)
    d = cached_disk(16)
    v2 = continuum_green(d, (2.0, 0.0), 4) + math.log(2.0)
    v4 = continuum_green(d, (4.0, 0.0), 4) + math.log(4.0)
    assert abs(v4 - v2) <= 8.0 / 16.0


def test_mesh_refinement_is_cauchy():
    d = cached_disk(8)
    g = {m: continuum_green(d, (4.0, 0.0), m) for m in (2, 4, 8)}
    assert abs(g[4] - g[8]) < abs(g[2] - g[8])


def test_map_deriv_square_exact_value():
    # conformal radius of the square with half-side a is a*sqrt(2)/I,
    # I = int_0^1 dt/sqrt(1-t^4); the union of squares of square_domain(n)
    # is exactly the square with half-side n + 1/2
    with mp.workdps(30):
        coef = float(mp.sqrt(2) / mp.quad(lambda t: 1 / mp.sqrt(1 - t**4), [0, 1]))
    target = 1.0 / (coef * 8.5)
    cd = conformal_data(cached_square(8), (), (2, 4))
    assert abs(cd.f_prime_at_0 / target - 1.0) < 0.01


def test_map_deriv_disk_heuristic():
    # effective radius of the digital disk approaches n + 1/2 for larger n
    for n in (16, 32):
        fp = map_deriv_at_0(cached_disk(n), 4)
        assert abs(fp * (n + 0.5) - 1.0) < 0.05


def test_map_deriv_growth_bound():
    for n in (8, 16, 32):
        fp = map_deriv_at_0(cached_disk(n), 2)
        assert abs(-math.log(fp) - math.log(n)) <= math.log(4.0) + 0.2


def test_conformal_data_fields():
    d = cached_disk(8)
    cd = conformal_data(d, ((1, 0), (2, 0)), (2, 4))
    assert cd.mesh_levels == (2, 4)
    assert all(g > 0 for g in cd.g_values.values())
    assert cd.error_estimate["g"] < 0.02
    inrad = d.inradius_exact()
    assert 1.0 / (4.0 * (inrad + 1.0)) <= cd.f_prime_at_0 <= 1.0 / (inrad - 1.0)


# -- boundary angles -------------------------------------------------------------

def test_theta_antipodal_disk():
    th = theta_boundary(cached_disk(32), 4)
    gap = abs(th[(33, 0)] - th[(-33, 0)])
    assert abs(min(gap, 2 * math.pi - gap) - math.pi) < 0.05


def test_theta_quarter_turns():
    th = theta_boundary(cached_disk(32), 4)
    pts = [(33, 0), (0, 33), (-33, 0), (0, -33)]
    for a, b in zip(pts, pts[1:] + pts[:1]):
        d = (th[b] - th[a]) % (2.0 * math.pi)
        assert abs(d - math.pi / 2.0) < 0.05


def test_theta_cyclically_monotone_total_two_pi():
    rs = RefinedSystem(cached_disk(8), 4)
    start, ang = rs.segment_angles()
    assert np.all(ang > 0)
    assert abs(start[-1] + ang[-1] - 2.0 * math.pi) < 1e-9
    assert np.all(np.diff(start) > 0)


def test_interior_map_angle_consistency():
    d = cached_disk(8)
    vals = interior_map_angle(d, ((6, 0), (0, 6)), 4)
    t1, mod1 = vals[(6, 0)]
    t2, mod2 = vals[(0, 6)]
    assert abs((t2 - t1) % (2.0 * math.pi) - math.pi / 2.0) < 0.02
    g = continuum_green(d, (6.0, 0.0), 4)
    assert abs(mod1 - math.exp(-g)) < 0.02
    assert abs(mod1 - mod2) < 1e-6


# -- closed forms -----------------------------------------------------------------

def test_disk_green_from_origin():
    assert abs(disk_green(0.0, 0.3 + 0.4j) + math.log(0.5)) < 1e-12


def test_disk_green_example():
    assert abs(disk_green(0.5, -0.5) - math.log(1.25)) < 1e-12


def test_disk_green_symmetry():
    a, b = 0.3 + 0.2j, -0.1 + 0.6j
    assert abs(disk_green(a, b) - disk_green(b, a)) < 1e-12


def test_disk_green_errors():
    with pytest.raises(OutsideDisk):
        disk_green(1.2, 0.0)
    with pytest.raises(CoincidentPoints):
        disk_green(0.2, 0.2)


def test_disk_excursion_values():
    assert abs(disk_excursion_kernel(0.0, math.pi) - 1.0 / (4 * math.pi)) < 1e-14
    assert abs(disk_excursion_kernel(0.0, math.pi / 2) - 1.0 / (2 * math.pi)) < 1e-14
    assert abs(disk_excursion_kernel(1.0, 2.5)
               - disk_excursion_kernel(2.5, 1.0)) < 1e-14
    with pytest.raises(CoincidentAngles):
        disk_excursion_kernel(1.0, 1.0 + 2 * math.pi)


def test_disk_excursion_integrates_like_arc_measure():
    # numeric quadrature over theta' away from the singularity is finite and
    # symmetric around the base point
    thetas = np.linspace(0.2, 2 * math.pi - 0.2, 2001)
    vals = np.array([disk_excursion_kernel(0.0, t) for t in thetas])
    total = np.trapezoid(vals, thetas)
    assert 0.0 < total < math.inf
    assert abs(vals[0] - vals[-1]) < 1e-12


def test_rect_excursion_against_oracle():
    for (L, q, qp) in ((math.pi, math.pi / 2, math.pi / 2),
                       (2.0, 1.0, 2.0), (1.0, 0.7, 2.2)):
        assert abs(rect_excursion_kernel(L, q, qp)
                   - rect_kernel_oracle(L, q, qp)) < 1e-13


def test_rect_excursion_zero_terms_do_not_truncate():
    # sin(n*pi/2) vanishes for even n; the envelope rule must keep summing
    got = rect_excursion_kernel(math.pi, math.pi / 2, math.pi / 2)
    assert abs(got - 0.055433823036118435) < 1e-12


def test_rect_excursion_large_L_asymptotic():
    for L in (7.0, 9.0):
        lead = 4.0 / math.pi * math.exp(-L) * math.sin(1.0) * math.sin(2.0)
        rel = rect_excursion_kernel(L, 1.0, 2.0) / lead - 1.0
        assert abs(rel) < 4.0 * math.exp(-L)


def test_rect_excursion_symmetry_and_errors():
    assert abs(rect_excursion_kernel(2.0, 0.8, 1.9)
               - rect_excursion_kernel(2.0, 1.9, 0.8)) < 1e-15
    with pytest.raises(NonPositiveLength):
        rect_excursion_kernel(0.0, 1.0, 2.0)


def test_rect_interior_kernel():
    assert rect_interior_kernel(3.0, 1e-12, 1.0, 2.0) < 1e-10
    fd = rect_interior_kernel(3.0, 1e-6, 1.0, 2.0) / 1e-6
    assert abs(fd / rect_excursion_kernel(3.0, 1.0, 2.0) - 1.0) < 1e-9
    assert abs(rect_interior_kernel(3.0, 1.2, 0.5, 2.0)
               - rect_interior_kernel(3.0, 1.2, 2.0, 0.5)) < 1e-15
    with pytest.raises(OutOfRange):
        rect_interior_kernel(3.0, 3.5, 1.0, 2.0)


# -- Lambda determinant ------------------------------------------------------------

def test_lambda_disk_k1():
    assert lambda_disk([0.3], [2.0]) == 1.0


def test_lambda_disk_k2_closed_form():
    lam = lambda_disk((0.0, math.pi / 2), (1.5 * math.pi, math.pi))
    assert abs(lam - 0.75) < 1e-14


def test_lambda_disk_rotation_invariance():
    tx, ty = (0.2, 1.1), (5.0, 3.3)
    base = lambda_disk(tx, ty)
    for shift in (0.7, 2.9):
        assert abs(lambda_disk([t + shift for t in tx],
                               [t + shift for t in ty]) - base) < 1e-12


def test_lambda_disk_warns_on_bad_ordering():
    with pytest.warns(BadOrderingWarning):
        lambda_disk((0.0, 2.0), (1.0, 3.0))  # interleaved, not ccw


def test_lambda_disk_in_unit_interval_fuzz():
    rng = np.random.default_rng(23)
    for _ in range(60):
        k = int(rng.integers(1, 4))
        angles = np.sort(rng.uniform(0.0, 2.0 * math.pi, size=2 * k))
        if np.min(np.diff(angles, append=angles[0] + 2 * math.pi)) < 0.15:
            continue
        tx = angles[:k]
        ty = angles[k:][::-1]
        lam = lambda_disk(tx, ty)
        assert 0.0 < lam <= 1.0 + 1e-12


def test_prop15_leading_k1():
    assert abs(prop15_leading(1, [1.0], [2.0], 5.0) - 1.0) < 1e-14


def test_prop15_leading_k2_anchor():
    for L in (3.0, 6.0):
        assert abs(prop15_leading(2, Q2, Q2, L)
                   - 8.0 * math.exp(-L)) < 1e-12


def test_prop15_rejects_bad_ordering():
    with pytest.raises(BadOrdering):
        prop15_leading(2, (math.pi / 3, 2 * math.pi / 3), Q2, 3.0)
    with pytest.raises(BadOrdering):
        prop15_leading(2, (2 * math.pi / 3, -0.1), Q2, 3.0)


def test_lambda_rect_k1():
    assert abs(lambda_rect_exact(1, [1.0], [2.0], 4.0) - 1.0) < 1e-14


def test_lambda_rect_matches_independent_oracle():
    def oracle(L):
        with mp.workdps(40):
            qs = [2 * mp.pi / 3, mp.pi / 3]
            M = mp.matrix(2, 2)
            for j in range(2):
                d = mp.fsum(mp.mpf(n) * mp.sin(n * qs[j]) * mp.sin(n * qs[j])
                            / mp.sinh(n * L) for n in range(1, 2000))
                for l in range(2):
                    s = mp.fsum(mp.mpf(n) * mp.sin(n * qs[j]) * mp.sin(n * qs[l])
                                / mp.sinh(n * L) for n in range(1, 2000))
                    M[j, l] = s / d
            return float(mp.det(M))

    for L in (3.0, 6.0):
        assert abs(lambda_rect_exact(2, Q2, Q2, L) - oracle(L)) < 1e-12


def test_lambda_rect_true_deviation_order():
    # the exact determinant sits below its leading term by 4 e^{-L} (1 + o(1)):
    # the diagonal kernels carry a relative 1 + 2 e^{-L} correction each
    for L in (5.0, 6.0, 8.0):
        rel = lambda_rect_exact(2, Q2, Q2, L) / (8.0 * math.exp(-L)) - 1.0
        assert -4.0 * math.exp(-L) * 1.1 < rel < -4.0 * math.exp(-L) * 0.9


def test_lambda_rect_log_slope():
    l3 = math.log(lambda_rect_exact(2, Q2, Q2, 3.0))
    l4 = math.log(lambda_rect_exact(2, Q2, Q2, 4.0))
    # slope approaches the crossing exponent 1 from below at rate 4 e^{-L}
    assert abs((l3 - l4) - 1.0) < 4.0 * math.exp(-3.0)


# -- Moebius maps -------------------------------------------------------------------

def test_mobius_identity():
    m = mobius_disk(0.0, 0.0)
    for t in (0.1, 2.0, 5.5):
        assert abs(m.angle(t) - t % (2 * math.pi)) < 1e-12


def test_mobius_rotation_only():
    m = mobius_disk(0.0, math.pi / 3)
    tx, ty = (0.3, 1.4), (5.5, 4.0)
    assert covariance_check(m, tx, ty, tol=1e-13)


def test_mobius_random_pole():
    m = mobius_disk(0.5 * cmath.exp(0.3j), 1.1)
    assert covariance_check(m, (0.3, 1.4), (5.5, 4.0), tol=1e-9)


def test_mobius_rejects_outside_pole():
    with pytest.raises(BadParameter):
        mobius_disk(1.0 + 0.0j)


def test_mobius_preserves_circle():
    m = mobius_disk(0.4 - 0.2j, 0.9)
    z = m.apply(cmath.exp(1j * 0.7))
    assert abs(abs(z) - 1.0) < 1e-12
