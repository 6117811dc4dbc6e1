import math

import numpy as np
import pytest

from poincarelab.errors import BadParams, NoCertificate
from poincarelab.sets import (
    annulus_budget,
    certified_bound,
    density_estimate,
    disk_pack,
    make_custom_set,
    make_empty_set,
    make_powerlaw_set,
    make_sector_set,
    safety_factor,
    set_from_json,
    set_to_json,
)


def test_empty_set_everything_zero():
    S = make_empty_set()
    assert not S.membership(1 + 1j)
    assert certified_bound(S, 10.0) == 0.0
    est = density_estimate(S, 5.0, samples=2000, seed=1)
    assert est.value == 0.0


def test_powerlaw_membership_deterministic():
    a = make_powerlaw_set(10.0, 0.5, seed=2)
    b = make_powerlaw_set(10.0, 0.5, seed=2)
    rng = np.random.default_rng(0)
    pts = 50.0 * (rng.uniform(-1, 1, 400) + 1j * rng.uniform(-1, 1, 400))
    hits_a = [a.membership(complex(p)) for p in pts]
    hits_b = [b.membership(complex(p)) for p in pts]
    assert hits_a == hits_b
    assert any(hits_a)  # the set is not empty at this C


def test_powerlaw_seed_changes_layout():
    a = make_powerlaw_set(10.0, 0.5, seed=2)
    c = make_powerlaw_set(10.0, 0.5, seed=3)
    rng = np.random.default_rng(1)
    pts = 30.0 * (rng.uniform(-1, 1, 600) + 1j * rng.uniform(-1, 1, 600))
    ha = [a.membership(complex(p)) for p in pts]
    hc = [c.membership(complex(p)) for p in pts]
    assert ha != hc


@pytest.mark.parametrize("r", [2.0, 5.0, 20.0, 100.0])
def test_powerlaw_monte_carlo_respects_certificate(r):
    S = make_powerlaw_set(10.0, 0.5, seed=2)
    est = density_estimate(S, r, samples=20000, seed=11)
    cert = certified_bound(S, r)
    assert est.value <= cert + 3.0 * est.std_error
    assert cert <= 1.0 + 1e-12


def test_annulus_budget_split():
    """Each annulus gets area density C r^-delta times a safety factor;
    packed disks never exceed their budget."""
    S = make_powerlaw_set(10.0, 0.5, seed=2)
    for j in range(1, 8):
        centers, radii = disk_pack(S, j)
        used = float(np.sum(np.pi * np.asarray(radii) ** 2))
        assert used <= annulus_budget(S, j) * (1 + 1e-9)
        inner, outer = 2.0 ** (j - 1), 2.0 ** (j + 1)
        mags = np.abs(np.asarray(centers))
        if mags.size:
            assert np.all(mags + np.asarray(radii) <= outer * (1 + 1e-12))
            assert np.all(mags - np.asarray(radii) >= inner * (1 - 1e-12) - 1e-12)


def test_safety_factor_range():
    for delta in [0.1, 0.5, 1.0, 1.5, 1.9]:
        F = safety_factor(delta)
        assert 0 < F < 1


def test_sector_set_certificate_and_membership():
    S = make_sector_set(4.0, 0.8)
    est = density_estimate(S, 50.0, samples=20000, seed=4)
    cert = certified_bound(S, 50.0)
    assert est.value <= cert + 3.0 * est.std_error
    assert cert <= 4.0 * 50.0 ** (-0.8) + 1e-12


def test_custom_set_without_certificate():
    S = make_custom_set(lambda z: z.real > 0)
    assert S.membership(1 + 0j) and not S.membership(-1 + 0j)
    with pytest.raises(NoCertificate):
        certified_bound(S, 3.0)
    est = density_estimate(S, 3.0, samples=5000, seed=9)
    assert abs(est.value - 0.5) < 5 * est.std_error + 0.02


def test_density_estimate_parameter_validation():
    S = make_empty_set()
    with pytest.raises(BadParams):
        density_estimate(S, -1.0, samples=2000, seed=0)
    with pytest.raises(BadParams):
        density_estimate(S, 1.0, samples=10, seed=0)


def test_powerlaw_parameter_validation():
    with pytest.raises(BadParams):
        make_powerlaw_set(-1.0, 0.5, seed=0)
    with pytest.raises(BadParams):
        make_powerlaw_set(10.0, 0.0, seed=0)
    with pytest.raises(BadParams):
        make_powerlaw_set(10.0, 2.0, seed=0)


def test_json_roundtrip_powerlaw_exact():
    S = make_powerlaw_set(7.0, 0.9, seed=13)
    S2 = set_from_json(set_to_json(S))
    rng = np.random.default_rng(6)
    pts = 40.0 * (rng.uniform(-1, 1, 300) + 1j * rng.uniform(-1, 1, 300))
    for p in pts:
        assert S.membership(complex(p)) == S2.membership(complex(p))
    assert certified_bound(S, 17.0) == certified_bound(S2, 17.0)


def test_json_roundtrip_empty_and_sector():
    for S in [make_empty_set(), make_sector_set(3.0, 0.6)]:
        S2 = set_from_json(set_to_json(S))
        assert S2.kind == S.kind
        for p in [1 + 1j, -2 + 0.5j, 10j]:
            assert S.membership(p) == S2.membership(p)


def test_json_rejects_unknown_kind():
    with pytest.raises(BadParams):
        set_from_json('{"kind": "fractal-lace", "C": 1.0}')


def test_custom_set_descriptor_roundtrip_fails():
    # the descriptor serializes, but the predicate cannot be rebuilt
    S = make_custom_set(lambda z: abs(z) < 2)
    text = set_to_json(S)
    with pytest.raises(BadParams):
        set_from_json(text)
