"""Preimages of Siegel-disk points under an entire Poincare function.

The key objects: one inverse branch g0 of f, realized by Newton continuation
along straight segments in the linearizing coordinate of the Siegel disk
(segments stay inside the disk by convexity, so the path never approaches a
component boundary), and the derived orbit of preimages

    z(k) = mu^k * g0( P^{-k}(w) ),   k = 0, 1, 2, ...

whose k-th member is a genuine solution of f(z) = w of modulus about
|mu|^k * |g0(...)|.  Verification of f(z(k)) = w always pulls back exactly k
levels, so every intermediate value lies in the bounded sub-Siegel disk and
the check never overflows.

Also here: brute-force counting of all preimages in a disk by the argument
principle, and an empirical density-transfer probe for thin target sets.
"""

from __future__ import annotations

import csv
import io
import json
import math
import threading
from dataclasses import dataclass, field
from typing import Optional

import numpy as np

from .dyncore import QuadMap
from .errors import (
    BadParams,
    ContinuationLost,
    NoCertificate,
    NoConvergence,
    NotFound,
    OverflowSentinel,
)
from .poincare import PoincareMap, eval_on_circle, poincare_derivative_eval, poincare_eval
from .sets import SetModel, certified_bound
from .siegel import SiegelMap, h_eval, h_inverse, p_inverse_on_disk, sub_siegel_sample

NEWTON_TOL = 1e-12
NEWTON_ITERS = 60
CACHE_RESIDUAL = 1e-10
_GRID_MODULI = 24
_GRID_ANGLES = 32
_MAX_SEGMENT_STEPS = 512
TWO_PI = 2.0 * math.pi


@dataclass
class InverseBranch:
    pm: PoincareMap
    sm: SiegelMap
    base_point: complex
    _cache: dict = field(default_factory=dict, repr=False)
    _lock: threading.Lock = field(default_factory=threading.Lock, repr=False)

    @property
    def center(self) -> complex:
        return self.sm.center_value

    def c1(self) -> float:
        """sup |g0| over everything continued so far (the ambient radius
        constant for the orbit points)."""
        with self._lock:
            vals = [abs(self.base_point)] + [abs(z) for z in self._cache.values()]
        return max(vals)

    def cache_pairs(self):
        with self._lock:
            return list(self._cache.items())


@dataclass(frozen=True)
class OrbitPoint:
    k: int
    z: complex
    in_S: bool
    residual: float


@dataclass(frozen=True)
class PreimageReport:
    w: complex
    r: float
    orbit_points: list  # of OrbitPoint
    argument_count: Optional[int]
    notes: str = ""


def _newton_solve(pm: PoincareMap, target: complex, seed: complex) -> complex:
    """Damped Newton on f(z) = target from the given seed; NoConvergence on
    failure."""
    z = complex(seed)
    scale = 1.0 + abs(target)
    res = abs(poincare_eval(pm, z) - target)
    for _ in range(NEWTON_ITERS):
        if res <= NEWTON_TOL * scale:
            return z
        d = poincare_derivative_eval(pm, z)
        if abs(d) < 1e-14:
            raise NoConvergence("derivative vanished during Newton refinement")
        step = (poincare_eval(pm, z) - target) / d
        t = 1.0
        for _ in range(40):
            cand = z - t * step
            cand_res = abs(poincare_eval(pm, cand) - target)
            if cand_res < res:
                z, res = cand, cand_res
                break
            t *= 0.5
        else:
            break
    if res <= NEWTON_TOL * scale:
        return z
    raise NoConvergence(f"Newton stalled at residual {res:.3e}")


def find_base_preimage(pm: PoincareMap, sm: SiegelMap) -> InverseBranch:
    """Solve f(z) = Siegel center from a coarse polar grid over D_{20 r0};
    keep the smallest-modulus solution (ties: smallest angle)."""
    if pm.map != sm.map:
        raise BadParams("Poincare and Siegel structures built from different maps")
    center = sm.center_value
    scale = 1.0 + abs(center)
    for grid_radius in (20.0 * pm.r0, 40.0 * pm.r0):
        roots = []
        moduli = np.geomspace(0.05 * grid_radius, grid_radius, _GRID_MODULI)
        angles = np.arange(_GRID_ANGLES) * (TWO_PI / _GRID_ANGLES)
        for m in moduli:
            for a in angles:
                seed = m * complex(math.cos(a), math.sin(a))
                try:
                    z = _newton_solve(pm, center, seed)
                except (NoConvergence, OverflowSentinel):
                    continue
                if abs(z) < 1e-12:
                    continue  # f(0) = z0 is off-center by construction
                if all(abs(z - r) > 1e-6 * (1.0 + abs(r)) for r in roots):
                    roots.append(z)
        if roots:
            roots.sort(key=lambda z: (abs(z), math.atan2(z.imag, z.real) % TWO_PI))
            base = roots[0]
            if abs(poincare_eval(pm, base) - center) > CACHE_RESIDUAL * scale:
                continue
            ib = InverseBranch(pm=pm, sm=sm, base_point=base)
            ib._cache[complex(center)] = base
            return ib
    raise NotFound("no base preimage found on the search grid (after one enlargement)")


def branch_continue(ib: InverseBranch, w: complex) -> complex:
    """g0(w) for w in the sub-Siegel disk, by segment continuation in the
    linearizing coordinate from the center to w."""
    w = complex(w)
    with ib._lock:
        hit = ib._cache.get(w)
    if hit is not None:
        return hit
    u_w = h_inverse(ib.sm, w)  # membership check happens here
    steps = 8
    last_err = None
    while steps <= _MAX_SEGMENT_STEPS:
        try:
            z = ib.base_point
            for t in np.linspace(0.0, 1.0, steps + 1)[1:]:
                target = h_eval(ib.sm, t * u_w)
                z_next = _newton_solve(ib.pm, target, z)
                if abs(z_next - z) > 1.0 * (1.0 + abs(z)):
                    raise ContinuationLost(
                        f"continuation jump {abs(z_next - z):.3e} at t={t:.3f}"
                    )
                z = z_next
            with ib._lock:
                ib._cache[w] = z
            return z
        except (ContinuationLost, NoConvergence) as exc:
            last_err = exc
            steps *= 2
    raise ContinuationLost(f"segment continuation failed at {steps//2} steps: {last_err}")


def orbit_preimages(ib: InverseBranch, w: complex, k_max: int):
    """[(k, mu^k * g0(P^{-k} w))] for 0 <= k <= k_max."""
    if k_max < 0:
        raise BadParams("k_max must be >= 0")
    out = []
    for k in range(k_max + 1):
        wk = p_inverse_on_disk(ib.sm, w, k)
        g = branch_continue(ib, wk)
        out.append((k, ib.pm.mu**k * g))
    return out


def verify_orbit_point(ib: InverseBranch, w: complex, k: int, z: complex) -> float:
    """|f(z) - w| via exactly-k pullback (bounded intermediates), relative
    to 1 + |w|."""
    u = z / ib.pm.mu**k
    val = poincare_eval(ib.pm, u)
    for _ in range(k):
        val = ib.pm.map(val)
    return abs(val - w) / (1.0 + abs(w))


def argument_principle_count(pm: PoincareMap, w: complex, r: float) -> int:
    """Number of solutions of f(z) = w in D_r, with multiplicity, by the
    winding integral (1/2pi) Int Re[ f'(z) z / (f(z)-w) ] dtheta with node
    doubling until two consecutive estimates settle on one integer."""
    if r <= 0.0:
        raise BadParams("r must be positive")
    w = complex(w)
    r_eff = float(r)
    for attempt in range(2):
        _, f_vals, _ = eval_on_circle(pm, r_eff, 1 << 10)
        if float(np.min(np.abs(f_vals - w))) > 1e-6 * (1.0 + abs(w)):
            break
        if attempt == 0:
            r_eff *= 1.01
        else:
            raise BadParams(f"a preimage of {w} sits on |z| = {r_eff}")
    prev = None
    n = 1 << 10
    while n <= (1 << 18):
        z, f_vals, df_vals = eval_on_circle(pm, r_eff, n)
        est = float(np.mean(np.real(df_vals * z / (f_vals - w))))
        if prev is not None:
            k = round(est)
            if abs(est - k) < 1e-3 and abs(prev - k) < 1e-3:
                return int(k)
        prev = est
        n *= 2
    raise NoConvergence(
        f"argument principle did not settle by 2^18 nodes (last {prev:.6f})"
    )


def koebe_density_transfer(ib: InverseBranch, S: SetModel, k: int,
                           samples: int, seed: int):
    """(hit fraction of k-th orbit preimages landing in S, certified ambient
    bound at the enclosing radius |mu|^k * C1)."""
    if S.certificate is None:
        raise NoCertificate("density transfer needs a certified set")
    if k < 0:
        raise BadParams("k must be >= 0")
    ws = sub_siegel_sample(ib.sm, samples, seed)
    pts = []
    for w in ws:
        wk = p_inverse_on_disk(ib.sm, complex(w), k)
        pts.append(ib.pm.mu**k * branch_continue(ib, wk))
    pts = np.array(pts, dtype=complex)
    hits = int(np.count_nonzero(S.contains_many(pts)))
    radius = abs(ib.pm.mu) ** k * ib.c1()
    return hits / len(pts), certified_bound(S, radius)


def build_preimage_report(ib: InverseBranch, S: SetModel, w: complex, r: float,
                          k_max: int, with_count: bool = True) -> PreimageReport:
    pts = []
    for k, z in orbit_preimages(ib, w, k_max):
        res = verify_orbit_point(ib, w, k, z)
        pts.append(OrbitPoint(k=k, z=z, in_S=S.contains(z), residual=res))
    count = None
    notes = "orbit preimages via linearizing-coordinate continuation"
    if with_count:
        count = argument_principle_count(ib.pm, w, r)
        notes += "; disk count via argument principle"
    return PreimageReport(w=complex(w), r=float(r), orbit_points=pts,
                          argument_count=count, notes=notes)


def report_to_csv(report: PreimageReport) -> str:
    buf = io.StringIO()
    writer = csv.writer(buf, lineterminator="\n")
    writer.writerow(["k", "re z", "im z", "|z|", "in_S", "residual"])
    for p in report.orbit_points:
        writer.writerow([p.k, repr(float(p.z.real)), repr(float(p.z.imag)),
                         repr(float(abs(p.z))), int(p.in_S),
                         repr(float(p.residual))])
    return buf.getvalue()


def report_to_json(report: PreimageReport) -> str:
    payload = {
        "w": [report.w.real, report.w.imag],
        "r": report.r,
        "argument_count": report.argument_count,
        "notes": report.notes,
        "orbit_points": [
            {"k": p.k, "z": [p.z.real, p.z.imag], "abs_z": abs(p.z),
             "in_S": p.in_S, "residual": p.residual}
            for p in report.orbit_points
        ],
    }
    return json.dumps(payload, indent=2)
