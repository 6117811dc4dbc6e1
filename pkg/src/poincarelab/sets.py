"""Borel sets with certified power-law density decay, plus Monte Carlo
density estimation.

The built-in adversarial sets are unions, over the dyadic annuli
A_j = {2^j <= |z| < 2^{j+1}}, of regions whose area inside A_j is exactly

    area_j = F(delta) * min(1, C * 2^{-j*delta}) * |A_j|,

with safety factor F(delta) = (1 - 2^{delta-2}) / 3.  Summing the geometric
series over j <= log2(r) and comparing with r^{2-delta} shows

    dens(S, D_r) <= C * r^{-delta}   for every r >= 1,

and the annuli start at |z| = 1, so the bound is trivial below that.  Disk
placement inside an annulus is pseudo-random but fully determined by
(seed, j); overlap between disks only removes area, so the certificate is
one-sided safe no matter how the rejection sampling goes.
"""

from __future__ import annotations

import json
import math
from dataclasses import dataclass, field
from typing import Callable, Optional

import numpy as np

from .errors import BadParams, NoCertificate

SAMPLE_BLOCK = 1 << 16
_PACK_TRIES = 200
_OVERLAP_TOL = 0.10
TWO_PI = 2.0 * math.pi


def safety_factor(delta: float) -> float:
    """F(delta) making the annulus budgets certify C*r^{-delta} for all r>=1."""
    return (1.0 - 2.0 ** (delta - 2.0)) / 3.0


def _annulus_area(j: int) -> float:
    return 3.0 * math.pi * 4.0**j


def _lens_area(d: float, r1: float, r2: float) -> float:
    """Area of intersection of two disks with center distance d."""
    if d >= r1 + r2:
        return 0.0
    if d <= abs(r1 - r2):
        rm = min(r1, r2)
        return math.pi * rm * rm
    # standard two-circle lens
    a1 = r1 * r1 * math.acos((d * d + r1 * r1 - r2 * r2) / (2.0 * d * r1))
    a2 = r2 * r2 * math.acos((d * d + r2 * r2 - r1 * r1) / (2.0 * d * r2))
    tri = 0.5 * math.sqrt(
        max(0.0, (-d + r1 + r2) * (d + r1 - r2) * (d - r1 + r2) * (d + r1 + r2))
    )
    return a1 + a2 - tri


@dataclass(frozen=True)
class DensityEstimate:
    value: float
    std_error: float
    samples: int


@dataclass(frozen=True)
class SetModel:
    kind: str  # Empty | PowerLawDisks | AnnularSectors | Custom
    membership: Callable[[complex], bool]
    bulk: Optional[Callable[[np.ndarray], np.ndarray]] = None
    certificate: Optional[tuple] = None  # (C, delta)
    C: Optional[float] = None
    delta: Optional[float] = None
    seed: Optional[int] = None
    # annulus index -> (centers, radii); shared cache, filled lazily
    _packs: dict = field(default_factory=dict, repr=False, compare=False)

    def contains(self, z) -> bool:
        return bool(self.membership(complex(z)))

    def contains_many(self, z: np.ndarray) -> np.ndarray:
        z = np.asarray(z, dtype=complex)
        if self.bulk is not None:
            return np.asarray(self.bulk(z), dtype=bool)
        return np.array([self.membership(complex(w)) for w in z.ravel()]).reshape(z.shape)


def _budget(C: float, delta: float, j: int) -> float:
    return safety_factor(delta) * min(1.0, C * 2.0 ** (-j * delta)) * _annulus_area(j)


def _pack_annulus(C: float, delta: float, seed: int, j: int):
    """Disk pack for annulus j: full disks of radius 2^j/8 plus one smaller
    disk so the placed area matches the budget exactly."""
    budget = _budget(C, delta, j)
    rad = 2.0**j / 8.0
    full_area = math.pi * rad * rad
    n_full = int(budget // full_area)
    rem = budget - n_full * full_area
    radii = [rad] * n_full
    if rem > 0.0:
        radii.append(math.sqrt(rem / math.pi))
    rng = np.random.default_rng(np.random.SeedSequence([int(seed) & (2**63 - 1), j]))
    centers = []
    placed_r = []
    lo_band, hi_band = 2.0**j, 2.0 ** (j + 1)
    for r_i in radii:
        chosen = None
        for _ in range(_PACK_TRIES):
            mod = rng.uniform(lo_band + r_i, hi_band - r_i)
            ang = rng.uniform(0.0, TWO_PI)
            cand = mod * complex(math.cos(ang), math.sin(ang))
            overlap = 0.0
            for c_k, r_k in zip(centers, placed_r):
                overlap += _lens_area(abs(cand - c_k), r_i, r_k)
                if overlap > _OVERLAP_TOL * math.pi * r_i * r_i:
                    break
            if overlap <= _OVERLAP_TOL * math.pi * r_i * r_i:
                chosen = cand
                break
        if chosen is None:
            # give up on separation; overlap only lowers the true density
            mod = rng.uniform(lo_band + r_i, hi_band - r_i)
            ang = rng.uniform(0.0, TWO_PI)
            chosen = mod * complex(math.cos(ang), math.sin(ang))
        centers.append(chosen)
        placed_r.append(r_i)
    return np.array(centers, dtype=complex), np.array(placed_r, dtype=float)


def disk_pack(S: SetModel, j: int):
    """(centers, radii) of the disks the set places in annulus j."""
    if S.kind != "PowerLawDisks":
        raise BadParams("disk_pack only applies to PowerLawDisks sets")
    if j not in S._packs:
        S._packs[j] = _pack_annulus(S.C, S.delta, S.seed, j)
    return S._packs[j]


def annulus_budget(S: SetModel, j: int) -> float:
    if S.certificate is None:
        raise NoCertificate("set carries no density certificate")
    return _budget(S.certificate[0], S.certificate[1], j)


def make_empty_set() -> SetModel:
    return SetModel(
        kind="Empty",
        membership=lambda z: False,
        bulk=lambda z: np.zeros(np.shape(z), dtype=bool),
        certificate=(0.0, 1.0),
        C=0.0,
        delta=1.0,
    )


def make_powerlaw_set(C: float, delta: float, seed: int) -> SetModel:
    if not (C > 0.0):
        raise BadParams("C must be positive")
    if not (0.0 < delta < 2.0):
        raise BadParams("delta must lie in (0, 2)")
    packs: dict = {}

    def pack(j: int):
        if j not in packs:
            packs[j] = _pack_annulus(C, delta, seed, j)
        return packs[j]

    def member(z: complex) -> bool:
        a = abs(z)
        if a < 1.0 or not math.isfinite(a):
            return False
        j = int(math.floor(math.log2(a)))
        centers, radii = pack(j)
        if len(centers) == 0:
            return False
        return bool(np.any(np.abs(z - centers) <= radii))

    def member_bulk(z: np.ndarray) -> np.ndarray:
        z = np.asarray(z, dtype=complex)
        flat = z.ravel()
        out = np.zeros(flat.shape, dtype=bool)
        a = np.abs(flat)
        ok = (a >= 1.0) & np.isfinite(a)
        if np.any(ok):
            jj = np.floor(np.log2(a[ok])).astype(int)
            idx_ok = np.nonzero(ok)[0]
            for j in np.unique(jj):
                centers, radii = pack(int(j))
                if len(centers) == 0:
                    continue
                sel = idx_ok[jj == j]
                pts = flat[sel]
                hit = np.any(
                    np.abs(pts[:, None] - centers[None, :]) <= radii[None, :], axis=1
                )
                out[sel] = hit
        return out.reshape(z.shape)

    return SetModel(
        kind="PowerLawDisks",
        membership=member,
        bulk=member_bulk,
        certificate=(float(C), float(delta)),
        C=float(C),
        delta=float(delta),
        seed=int(seed),
        _packs=packs,
    )


def make_sector_set(C: float, delta: float) -> SetModel:
    """Deterministic wedge variant: in annulus j, the sector 0 <= arg z < phi_j
    with phi_j = 2*pi*F(delta)*min(1, C*2^{-j*delta}). Same certificate."""
    if not (C > 0.0):
        raise BadParams("C must be positive")
    if not (0.0 < delta < 2.0):
        raise BadParams("delta must lie in (0, 2)")
    F = safety_factor(delta)

    def phi(j):
        return TWO_PI * F * min(1.0, C * 2.0 ** (-j * delta))

    def member(z: complex) -> bool:
        a = abs(z)
        if a < 1.0 or not math.isfinite(a):
            return False
        j = int(math.floor(math.log2(a)))
        ang = math.atan2(z.imag, z.real) % TWO_PI
        return ang < phi(j)

    def member_bulk(z: np.ndarray) -> np.ndarray:
        z = np.asarray(z, dtype=complex)
        flat = z.ravel()
        out = np.zeros(flat.shape, dtype=bool)
        a = np.abs(flat)
        ok = (a >= 1.0) & np.isfinite(a)
        if np.any(ok):
            jj = np.floor(np.log2(a[ok])).astype(int)
            ang = np.mod(np.angle(flat[ok]), TWO_PI)
            phis = TWO_PI * F * np.minimum(1.0, C * 2.0 ** (-jj * delta))
            out[np.nonzero(ok)[0]] = ang < phis
        return out.reshape(z.shape)

    return SetModel(
        kind="AnnularSectors",
        membership=member,
        bulk=member_bulk,
        certificate=(float(C), float(delta)),
        C=float(C),
        delta=float(delta),
    )


def make_custom_set(predicate: Callable[[complex], bool],
                    certificate: Optional[tuple] = None,
                    bulk: Optional[Callable] = None) -> SetModel:
    cert = None
    if certificate is not None:
        cert = (float(certificate[0]), float(certificate[1]))
    return SetModel(kind="Custom", membership=predicate, bulk=bulk, certificate=cert,
                    C=cert[0] if cert else None, delta=cert[1] if cert else None)


def certified_bound(S: SetModel, r: float) -> float:
    """min(1, C * r^{-delta}) from the certificate."""
    if S.certificate is None:
        raise NoCertificate("set carries no density certificate")
    C, delta = S.certificate
    if C == 0.0:
        return 0.0
    return min(1.0, C * float(r) ** (-delta))


def density_estimate(S: SetModel, r: float, samples: int, seed: int) -> DensityEstimate:
    """Monte Carlo density of S in the disk of radius r.

    Samples are drawn in fixed blocks with per-block substreams of
    (seed, block), so the result depends only on (seed, samples).
    """
    if not (r > 0.0):
        raise BadParams("r must be positive")
    if samples < 1000:
        raise BadParams("samples must be >= 1000")
    seed = int(seed) & (2**63 - 1)
    hits = 0
    done = 0
    block_index = 0
    while done < samples:
        n = min(SAMPLE_BLOCK, samples - done)
        rng = np.random.default_rng(np.random.SeedSequence([seed, block_index]))
        u = rng.random(n)
        v = rng.random(n)
        z = r * np.sqrt(u) * np.exp(1j * TWO_PI * v)
        hits += int(np.count_nonzero(S.contains_many(z)))
        done += n
        block_index += 1
    p = hits / samples
    return DensityEstimate(
        value=p,
        std_error=math.sqrt(p * (1.0 - p) / samples),
        samples=samples,
    )


def set_to_json(S: SetModel) -> str:
    payload = {"kind": S.kind, "C": S.C, "delta": S.delta, "seed": S.seed}
    return json.dumps(payload, indent=2)


def set_from_json(text: str) -> SetModel:
    d = json.loads(text)
    kind = d.get("kind")
    if kind == "Empty":
        return make_empty_set()
    if kind == "PowerLawDisks":
        return make_powerlaw_set(d["C"], d["delta"], d["seed"])
    if kind == "AnnularSectors":
        return make_sector_set(d["C"], d["delta"])
    raise BadParams(f"cannot rebuild set of kind {kind!r} from JSON")
