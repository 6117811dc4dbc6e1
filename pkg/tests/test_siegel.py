import cmath
import math

import numpy as np
import pytest

from poincarelab import QuadMap, find_cycle
from poincarelab.errors import BadParams, OutOfDomain, ResonantAngle
from poincarelab.siegel import (
    RotationAngle,
    build_cycle_siegel_map,
    build_siegel_map,
    conjugacy_residual,
    cycle_local_poly,
    h_eval,
    h_inverse,
    h_inverse_many,
    p_inverse_on_disk,
    siegel_coefficients,
    siegel_radius_estimate,
    sub_siegel_sample,
)

GAMMA_GOLD = (math.sqrt(5) - 1) / 2


def test_golden_angle_value():
    g = RotationAngle.golden()
    assert abs(g.gamma - GAMMA_GOLD) < 1e-16
    assert abs(g.lam - cmath.exp(2j * math.pi * GAMMA_GOLD)) < 1e-15
    assert abs(abs(g.lam) - 1.0) < 1e-15


def test_small_divisors_match_sine_formula(golden_angle):
    # |lam^n - lam| = 2 |sin(pi (n-1) gamma)| on the unit circle
    lam = golden_angle.lam
    for n in range(2, 60):
        lhs = abs(lam**n - lam)
        rhs = 2.0 * abs(math.sin(math.pi * (n - 1) * golden_angle.gamma))
        assert abs(lhs - rhs) < 1e-12


def test_second_coefficient_closed_form(golden_angle, golden_siegel):
    lam = golden_angle.lam
    b2 = golden_siegel.series_h.coeffs[2]
    assert abs(b2 - 1.0 / (lam * lam - lam)) < 1e-15


def test_resonant_angle_rejected():
    qm = QuadMap(kind="lambda", param=cmath.exp(2j * math.pi / 3))
    with pytest.raises(ResonantAngle):
        siegel_coefficients(qm, 32)


def test_recurrence_residual_small(golden_map, golden_siegel):
    """Plugging the series back into the conjugacy, coefficient by
    coefficient, leaves only roundoff."""
    h = golden_siegel.series_h
    lam = golden_map.param
    N = h.coeffs.size - 1
    scale = np.abs(h.coeffs).max()
    worst = 0.0
    for n in range(2, N // 2):
        conv = np.dot(h.coeffs[1:n], h.coeffs[n - 1 : 0 : -1])
        worst = max(worst, abs(lam**n * h.coeffs[n] - lam * h.coeffs[n] - conv))
    assert worst < 1e-13 * scale


def test_radius_estimate_consistent(golden_siegel):
    est = golden_siegel.radius_info
    assert est.value > 0.25
    assert not est.inconclusive
    # the two estimators agree within a factor of two
    assert est.value <= est.root_estimate * 2.0
    assert est.root_estimate <= est.value * 2.0


def test_conjugacy_residual_on_sub_disk(golden_siegel):
    r = 0.5 * golden_siegel.radius_hat
    assert conjugacy_residual(golden_siegel, r, n_angles=256) < 1e-10


def test_h_roundtrip_inside_disk(golden_siegel):
    r = 0.4 * golden_siegel.radius_hat
    zs = r * np.exp(2j * np.pi * np.arange(64) / 64.0)
    for z in zs:
        w = h_eval(golden_siegel, complex(z))
        back = h_inverse(golden_siegel, w)
        assert abs(back - z) < 1e-10


def test_h_inverse_many_matches_scalar(golden_siegel):
    r = 0.35 * golden_siegel.radius_hat
    zs = r * np.exp(2j * np.pi * np.arange(16) / 16.0)
    ws = np.array([h_eval(golden_siegel, complex(z)) for z in zs])
    got = h_inverse_many(golden_siegel, ws)
    want = np.array([h_inverse(golden_siegel, complex(w)) for w in ws])
    assert np.max(np.abs(got - want)) < 1e-12


def test_h_eval_domain_bound(golden_siegel):
    bad = 1.01 * golden_siegel.sub_fraction * golden_siegel.radius_hat
    with pytest.raises(OutOfDomain):
        h_eval(golden_siegel, bad + 0j)


def test_conjugacy_functional_equation(golden_map, golden_angle, golden_siegel):
    lam = golden_angle.lam
    r = 0.4 * golden_siegel.radius_hat
    worst = 0.0
    for k in range(48):
        z = r * cmath.exp(2j * math.pi * k / 48.0)
        lhs = h_eval(golden_siegel, lam * z)
        rhs = golden_map(h_eval(golden_siegel, z))
        worst = max(worst, abs(lhs - rhs) / (1 + abs(rhs)))
    assert worst < 1e-10


def test_p_inverse_identity_and_one_step(golden_map, golden_siegel):
    w = complex(h_eval(golden_siegel, 0.1 + 0.05j))
    assert abs(p_inverse_on_disk(golden_siegel, w, 0) - w) < 1e-13
    u = p_inverse_on_disk(golden_siegel, w, 1)
    assert abs(golden_map(u) - w) < 1e-12


def test_p_inverse_preserves_conjugated_modulus(golden_siegel):
    w = h_eval(golden_siegel, 0.12 - 0.03j)
    m0 = abs(h_inverse(golden_siegel, w))
    for k in [1, 5, 20, 50]:
        u = p_inverse_on_disk(golden_siegel, w, k)
        assert abs(abs(h_inverse(golden_siegel, u)) - m0) < 1e-10


def test_sub_siegel_sample_reproducible_and_inside(golden_siegel):
    a = sub_siegel_sample(golden_siegel, 512, seed=7)
    b = sub_siegel_sample(golden_siegel, 512, seed=7)
    assert np.array_equal(a, b)
    c = sub_siegel_sample(golden_siegel, 512, seed=8)
    assert not np.array_equal(a, c)
    bound = golden_siegel.sub_fraction * golden_siegel.radius_hat
    pre = h_inverse_many(golden_siegel, a)
    assert np.max(np.abs(pre)) <= bound * (1 + 1e-12)


def test_sub_disk_forward_invariance(golden_map, golden_siegel):
    """P maps the sampled sub-disk into itself (rotation in h coordinates)."""
    pts = sub_siegel_sample(golden_siegel, 256, seed=3)
    img = np.array([golden_map(complex(w)) for w in pts])
    pre = h_inverse_many(golden_siegel, img)
    bound = golden_siegel.sub_fraction * golden_siegel.radius_hat
    assert np.max(np.abs(pre)) <= bound * (1 + 1e-9)


def test_liouville_angle_shrinks_radius(golden_angle):
    """A rapidly-approximable rotation number gives a smaller certified disk."""
    bad = RotationAngle.from_cf((1, 30, 1, 500, 1, 1, 1, 1, 1, 1, 1, 1, 1, 1))
    qm_bad = QuadMap(kind="lambda", param=bad.lam)
    qm_gold = QuadMap(kind="lambda", param=golden_angle.lam)
    h_bad = siegel_coefficients(qm_bad, 128)
    h_gold = siegel_coefficients(qm_gold, 128)
    est_bad = siegel_radius_estimate(h_bad, lam=bad.lam)
    est_gold = siegel_radius_estimate(h_gold, lam=golden_angle.lam)
    assert est_bad.value < est_gold.value


def test_cycle_local_poly_fixed_point():
    qm = QuadMap(kind="c", param=-0.5 + 0.1j)
    zeta = (1 - cmath.sqrt(1 - 4 * qm.param)) / 2
    poly = cycle_local_poly(qm, zeta, 1)
    # P(zeta + u) - zeta = mu u + u^2
    assert abs(poly[0]) < 1e-14
    assert abs(poly[1] - 2 * zeta) < 1e-13
    assert abs(poly[2] - 1.0) < 1e-13


def test_cycle_local_poly_matches_composition():
    qm = QuadMap(kind="c", param=-1.0 + 0.15j)
    cyc = find_cycle(qm, 2, seed=0.1j)
    zeta = cyc.points[0]
    poly = cycle_local_poly(qm, zeta, 2)
    for u in [1e-3, 1e-3j, (1 + 1j) * 5e-4]:
        direct = qm(qm(zeta + u)) - zeta
        horner = 0j
        for a in poly[::-1]:
            horner = horner * u + a
        assert abs(horner - direct) < 1e-10 * (1 + abs(direct))


def test_build_cycle_siegel_map_fixed_point_case(golden_angle):
    # c chosen so the finite fixed point has multiplier exactly lam
    lam = golden_angle.lam
    c = lam / 2 - lam * lam / 4
    qm = QuadMap(kind="c", param=c)
    cyc = find_cycle(qm, 1, seed=lam / 2)
    sm = build_cycle_siegel_map(qm, cyc, golden_angle, N=64)
    assert sm.period == 1
    assert sm.radius_hat > 0
    assert sm.conj_residual < 1e-10


def test_angle_requires_irrational_in_unit_interval():
    with pytest.raises(BadParams):
        RotationAngle(gamma=1.5)
    with pytest.raises(BadParams):
        RotationAngle(gamma=0.0)
