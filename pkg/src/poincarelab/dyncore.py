"""Quadratic maps in two normal forms, with fixed points, cycles, multipliers.

Two parameterizations of the same family are used throughout:

* lambda form   P(w) = lambda*w + w**2   (fixed point at 0 with multiplier
  lambda; the second fixed point sits at 1-lambda with multiplier 2-lambda)
* c form        P(z) = z**2 + c

They are affinely conjugate: z = w + lambda/2 sends the lambda form to the
c form with c = lambda/2 - lambda**2/4.  Both are kept because the lambda
form is the natural chart for linearization at the origin while the c form
is the standard chart for parameter-plane work.

All map evaluation accepts numpy arrays transparently; nothing here
allocates state, so instances are safe to share across worker threads.
"""

from __future__ import annotations

import cmath
import math
from dataclasses import dataclass

import numpy as np

from .errors import BadParams, NoConvergence, NotRepelling

NEWTON_MAX_ITER = 200
NEWTON_MAX_HALVINGS = 60
CYCLE_RTOL = 1e-12


@dataclass(frozen=True)
class QuadMap:
    """One quadratic map in either normal form.

    kind is "lambda" or "c"; param is the single complex parameter.
    """

    kind: str
    param: complex

    def __post_init__(self):
        if self.kind not in ("lambda", "c"):
            raise BadParams(f"unknown map kind {self.kind!r}")

    @classmethod
    def lambda_form(cls, lam: complex) -> "QuadMap":
        return cls("lambda", complex(lam))

    @classmethod
    def c_form(cls, c: complex) -> "QuadMap":
        return cls("c", complex(c))

    def __call__(self, z):
        if self.kind == "lambda":
            return self.param * z + z * z
        return z * z + self.param

    def deriv(self, z):
        if self.kind == "lambda":
            return self.param + 2.0 * z
        return 2.0 * z

    def local_poly(self, zeta: complex) -> np.ndarray:
        """Taylor coefficients of P(zeta + u) - P(zeta) in u: [0, P'(zeta), 1]."""
        return np.array([0.0, self.deriv(zeta), 1.0], dtype=complex)

    def to_c_form(self) -> tuple["QuadMap", complex]:
        """Return (c-form map, shift) with conj(w) = w + shift."""
        if self.kind == "c":
            return self, 0.0 + 0.0j
        lam = self.param
        c = lam / 2.0 - lam * lam / 4.0
        return QuadMap.c_form(c), lam / 2.0

    def to_lambda_form(self, fixed_point: complex) -> tuple["QuadMap", complex]:
        """Return (lambda-form map, shift) conjugating at the given fixed point.

        conj(z) = z - fixed_point; the lambda parameter is the multiplier
        2*fixed_point of the chosen fixed point.
        """
        if self.kind == "lambda":
            return self, 0.0 + 0.0j
        lam = 2.0 * fixed_point
        return QuadMap.lambda_form(lam), -fixed_point


def fixed_points(qmap: QuadMap) -> tuple[complex, complex]:
    """Both finite fixed points.

    lambda form: (0, 1-lambda).  c form: ((1+s)/2, (1-s)/2) with s the
    principal square root of 1-4c.  A double fixed point is returned twice.
    """
    if qmap.kind == "lambda":
        return 0.0 + 0.0j, 1.0 - qmap.param
    s = cmath.sqrt(1.0 - 4.0 * qmap.param)
    return (1.0 + s) / 2.0, (1.0 - s) / 2.0


def multiplier_at(qmap: QuadMap, z: complex) -> complex:
    """Derivative of the map at a point (the multiplier when z is periodic)."""
    return complex(qmap.deriv(z))


@dataclass(frozen=True)
class Cycle:
    """A period-q orbit: points[i+1] = P(points[i]), with its multiplier."""

    points: tuple
    period: int
    multiplier: complex

    def min_gap(self) -> float:
        """Smallest pairwise distance between cycle points (inf for q=1)."""
        q = len(self.points)
        if q < 2:
            return math.inf
        return min(
            abs(self.points[i] - self.points[j])
            for i in range(q)
            for j in range(i + 1, q)
        )


def _iterate_with_deriv(qmap: QuadMap, z: complex, q: int) -> tuple[complex, complex]:
    w, d = z, 1.0 + 0.0j
    for _ in range(q):
        d = d * qmap.deriv(w)
        w = qmap(w)
    return w, d


def find_cycle(qmap: QuadMap, q: int, seed: complex) -> Cycle:
    """Damped Newton on P^q(z) - z from the given seed.

    The returned orbit starts at the converged point; period is q as
    requested, which callers needing primitivity must check via min_gap().
    Raises NoConvergence after NEWTON_MAX_ITER iterations.
    """
    if q < 1:
        raise BadParams("cycle period must be >= 1")
    z = complex(seed)
    fz, dz = _iterate_with_deriv(qmap, z, q)
    res = fz - z
    for _ in range(NEWTON_MAX_ITER):
        scale = 1.0 + abs(z)
        if abs(res) < CYCLE_RTOL * 1e-2 * scale:
            break
        denom = dz - 1.0
        if abs(denom) < 1e-300:
            raise NoConvergence("degenerate Newton step: (P^q)' == 1 at iterate")
        step = -res / denom
        # damping: halve until the residual actually drops
        for _ in range(NEWTON_MAX_HALVINGS):
            z_new = z + step
            fz_new, dz_new = _iterate_with_deriv(qmap, z_new, q)
            res_new = fz_new - z_new
            if abs(res_new) < abs(res):
                break
            step /= 2.0
        else:
            raise NoConvergence("damping exhausted without residual decrease")
        z, fz, dz, res = z_new, fz_new, dz_new, res_new
    else:
        raise NoConvergence(f"cycle Newton did not converge from seed {seed}")

    pts = []
    w = z
    for _ in range(q):
        pts.append(w)
        w = qmap(w)
    mult = 1.0 + 0.0j
    for p in pts:
        mult *= qmap.deriv(p)
    cyc = Cycle(points=tuple(pts), period=q, multiplier=complex(mult))
    for p in pts:
        if abs(_iterate_with_deriv(qmap, p, q)[0] - p) >= CYCLE_RTOL * (1.0 + abs(p)):
            raise NoConvergence("cycle residual check failed after Newton")
    return cyc


def order_from_multiplier(mu: complex) -> float:
    """Growth order log 2 / log |mu| of the linearizer at a repelling point."""
    a = abs(mu)
    if a <= 1.0:
        raise NotRepelling(f"|mu| = {a} <= 1")
    return math.log(2.0) / math.log(a)


def repelling_fixed_point(qmap: QuadMap) -> tuple[complex, complex]:
    """The distinguished repelling fixed point and its multiplier.

    For the lambda form this is 1-lambda (multiplier 2-lambda).  For the c
    form it is the root (1 + sqrt(1-4c))/2 on the principal branch, which
    depends continuously on c along real parameter paths into [-2, 1/4).
    Raises NotRepelling when the multiplier fails |mu| > 1.
    """
    if qmap.kind == "lambda":
        z = 1.0 - qmap.param
    else:
        z = (1.0 + cmath.sqrt(1.0 - 4.0 * qmap.param)) / 2.0
    mu = multiplier_at(qmap, z)
    if abs(mu) <= 1.0:
        raise NotRepelling(f"fixed point {z} has |mu| = {abs(mu)} <= 1")
    return z, mu
