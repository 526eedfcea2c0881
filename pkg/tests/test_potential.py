import math

import mpmath as mp
import pytest

from walkcross import K0, PotentialConstants, k_x, potential_a
from walkcross.errors import ZeroPoint

DIHEDRAL = [
    lambda x, y: (x, y), lambda x, y: (-x, y), lambda x, y: (x, -y),
    lambda x, y: (-x, -y), lambda x, y: (y, x), lambda x, y: (-y, x),
    lambda x, y: (y, -x), lambda x, y: (-y, -x),
]


def test_value_at_origin():
    assert potential_a((0, 0)) == 0.0


def test_neighbour_value():
    assert potential_a((1, 0)) == 1.0


def test_diagonal_value():
    assert abs(potential_a((1, 1)) - 4.0 / math.pi) < 1e-10


def test_known_axis_value():
    # one harmonicity step from the diagonal: a(2,0) = 4 - 8/pi
    assert abs(potential_a((2, 0)) - (4.0 - 8.0 / math.pi)) < 1e-12


def test_k0_formula():
    with mp.workdps(40):
        exact = (2 * mp.euler + 3 * mp.log(2)) / mp.pi
    assert abs(K0 - float(exact)) < 1e-12
    assert 1.029 < K0 < 1.030
    assert PotentialConstants().k0 == K0


def test_far_field_form():
    r = 100.0
    assert abs(potential_a((100, 0)) - (2 / math.pi * math.log(r) + K0)) < 1e-4


def test_harmonicity_inside_radius_30():
    for x in range(-30, 31):
        for y in range(-30, 31):
            if x * x + y * y > 900 or (x, y) == (0, 0):
                continue
            resid = sum(potential_a((x + dx, y + dy))
                        for dx, dy in ((1, 0), (-1, 0), (0, 1), (0, -1)))
            resid = resid / 4.0 - potential_a((x, y))
            assert abs(resid) < 1e-10, (x, y, resid)


def test_laplacian_at_origin():
    lap = sum(potential_a(e) for e in ((1, 0), (-1, 0), (0, 1), (0, -1))) / 4.0
    assert abs(lap - 1.0) < 1e-12


def test_dihedral_symmetry():
    for (x, y) in ((3, 1), (17, 5), (60, 41), (120, 7)):
        base = potential_a((x, y))
        for sym in DIHEDRAL:
            assert potential_a(sym(x, y)) == base


def test_deviation_decays_monotonically():
    devs = [abs(potential_a((r, 0)) - (2 / math.pi * math.log(r) + K0))
            for r in (10, 20, 40, 80)]
    assert all(a > b for a, b in zip(devs, devs[1:]))
    assert devs[-1] < 1e-5  # leading deviation is cos(4t)/(6 pi r^2)


def test_branches_agree_at_crossover():
    # exact-table values just inside the cutoff against the expansion
    from walkcross.potential import _expansion

    worst = 0.0
    for x in range(90, 101):
        for y in range(0, x + 1):
            if x * x + y * y < 90 * 90:
                continue
            worst = max(worst, abs(potential_a((x, y)) - _expansion(x, y)))
    assert worst < 1e-7  # observed ~1e-12


def test_k_x_values():
    assert abs(k_x((1, 0)) - (K0 - 1.0)) < 1e-12
    expected = K0 + math.log(2.0) / math.pi - 4.0 / math.pi
    assert abs(k_x((1, 1)) - expected) < 1e-12


def test_k_x_vanishes_far_away():
    assert abs(k_x((10_000, 0))) < 1e-6
    assert abs(k_x((7071, 7071))) < 1e-6


def test_k_x_rejects_origin():
    with pytest.raises(ZeroPoint):
        k_x((0, 0))
