"""Poincare functions: entire solutions of P(f(z)) = f(mu z) at a repelling
fixed point, evaluated everywhere by functional-equation pullback.

The local series f(z) = z0 + z + a2 z^2 + ... converges on a small disk; the
functional equation then extends f to the whole plane:

    f(z) = P^k( f(z / mu^k) ),   k = ceil( log(|z|/r0) / log|mu| ),

so the series is only ever evaluated where it is both certified and well
conditioned, and the escape dynamics of P do the rest.  Values grow like
exp(|z|^rho) with
rho = log 2 / log |mu|, which overflows doubles almost immediately; the
log-modulus path switches to tracking log|u| once iterates pass 1e100
(the dropped correction term is below 1e-98 per step, compounding to far
less than the 1e-6 contract over any realistic depth).

r0 caps the radius handed to the truncated series.  Two effects limit it:
the tail certificate (truncation) and the majorant sum |a_n| r^n
(cancellation, which eats eps * majorant in absolute error).  r0 takes the
smaller of the two bounds; see conditioning_radius.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

from ._linearize import conjugacy_coeffs
from .dyncore import QuadMap, multiplier_at, order_from_multiplier, repelling_fixed_point
from .errors import BadParams, NotRepelling, OverflowSentinel
from .series import TruncatedSeries, make_series, series_derivative, series_eval

OVERFLOW_BOUND = 1e290
LOG_SWITCH = 1e100
CIRCLE_SAMPLES = 512
TWO_PI = 2.0 * math.pi
# Horner roundoff at radius r is ~eps * sum |a_n| r^n; keep that majorant small
# enough that base-level evaluations carry ~3e-12 absolute error before the
# pullback squarings amplify it.
EVAL_ROUNDOFF_TARGET = 3e-12


@dataclass(frozen=True)
class PoincareMap:
    map: QuadMap
    z0: complex
    mu: complex
    series_f: TruncatedSeries  # center 0, coeffs[0]=z0, coeffs[1]=1
    r0: float  # pullback base radius

    @property
    def series_df(self) -> TruncatedSeries:
        return series_derivative(self.series_f)


@dataclass(frozen=True)
class OrderEstimate:
    rho_hat: float
    samples: list  # (log r, log log M(r)) pairs actually used in the fit
    rho_formula: float
    residual: float


def poincare_coefficients(qmap: QuadMap, z0: complex, N: int) -> TruncatedSeries:
    """Series of f at a repelling fixed point z0: a0=z0, a1=1, and
    a_n = (sum_{i+j=n} a_i a_j)/(mu^n - mu) for the quadratic local form."""
    if N < 1:
        raise BadParams("N must be >= 1")
    if abs(qmap(z0) - z0) > 1e-9 * (1.0 + abs(z0)):
        raise BadParams(f"{z0} is not a fixed point of the map")
    mu = multiplier_at(qmap, z0)
    if abs(mu) <= 1.0:
        raise NotRepelling(f"|mu| = {abs(mu)} <= 1 at z0 = {z0}")
    local = np.array([0.0, mu, 1.0], dtype=complex)
    b = conjugacy_coeffs(local, N)
    coeffs = b.copy()
    coeffs[0] = z0
    return make_series(coeffs)


def _log_majorant(coeffs: np.ndarray, r: float) -> float:
    """log of sum |a_n| r^n, computed in log space so large r cannot overflow."""
    with np.errstate(divide="ignore"):
        t = np.log(np.abs(coeffs)) + np.arange(len(coeffs)) * math.log(r)
    m = float(np.max(t))
    if not math.isfinite(m):
        return m
    return m + math.log(float(np.sum(np.exp(t - m))))


def conditioning_radius(series: TruncatedSeries, scale: float) -> float:
    """Largest radius at which Horner evaluation of the series keeps its
    roundoff, eps * majorant(r), below EVAL_ROUNDOFF_TARGET * scale.

    The tail certificate bounds truncation error, not cancellation: the
    majorant can exceed |f| by many orders of magnitude well inside the
    certified radius once the series is long, and evaluation loses exactly
    those digits.  Monotone bisection in log r."""
    log_cap = math.log(EVAL_ROUNDOFF_TARGET * scale / np.finfo(float).eps)
    hi = series.safe_radius
    if _log_majorant(series.coeffs, hi) <= log_cap:
        return hi
    lo = hi * 1e-9
    if _log_majorant(series.coeffs, lo) > log_cap:
        return lo
    llo, lhi = math.log(lo), math.log(hi)
    for _ in range(80):
        mid = 0.5 * (llo + lhi)
        if _log_majorant(series.coeffs, math.exp(mid)) <= log_cap:
            llo = mid
        else:
            lhi = mid
    return math.exp(llo)


def build_poincare_map(qmap: QuadMap, z0: complex | None = None, N: int = 64) -> PoincareMap:
    """Construct the Poincare map at z0 (default: the distinguished repelling
    fixed point).

    r0 is half the certified series radius, further capped by the
    conditioning radius: pulling back one extra level costs a factor ~2 in
    error amplification but shrinks the series majorant by orders of
    magnitude, so depth is cheap and cancellation is not."""
    if z0 is None:
        z0, _ = repelling_fixed_point(qmap)
    series = poincare_coefficients(qmap, z0, N)
    mu = multiplier_at(qmap, z0)
    if not math.isfinite(series.safe_radius):
        raise BadParams("series certificate unexpectedly unbounded")
    r0 = min(0.5 * series.safe_radius,
             conditioning_radius(series, 1.0 + abs(z0)))
    return PoincareMap(map=qmap, z0=complex(z0), mu=complex(mu),
                       series_f=series, r0=r0)


def pullback_depth(pm: PoincareMap, abs_z: float) -> int:
    """Smallest k with |z|/|mu|^k <= r0 (ceiling, never floor)."""
    if abs_z <= pm.r0:
        return 0
    return max(0, math.ceil(math.log(abs_z / pm.r0) / math.log(abs(pm.mu))))


def _eval_core(pm: PoincareMap, z, k: int):
    u = series_eval(pm.series_f, np.asarray(z, dtype=complex) / pm.mu**k)
    u = np.asarray(u, dtype=complex)
    with np.errstate(over="ignore", invalid="ignore"):
        for _ in range(k):
            u = pm.map(u)
            m = np.max(np.abs(u))
            if not np.isfinite(m) or m > OVERFLOW_BOUND:
                raise OverflowSentinel(
                    "iterate exceeded 1e290; use log_modulus_eval for growth queries"
                )
    return u


def poincare_eval(pm: PoincareMap, z: complex, depth: int | None = None) -> complex:
    """f(z) anywhere in the plane (depth is normally chosen automatically;
    forcing a larger depth is allowed and must not change the value)."""
    k = pullback_depth(pm, abs(z)) if depth is None else int(depth)
    if depth is not None and k < pullback_depth(pm, abs(z)):
        raise BadParams("forced depth too small for |z|")
    return complex(_eval_core(pm, z, k))


def poincare_eval_many(pm: PoincareMap, z: np.ndarray) -> np.ndarray:
    """Vector evaluation, grouping points by pullback depth."""
    z = np.asarray(z, dtype=complex)
    flat = z.ravel()
    depths = np.array([pullback_depth(pm, a) for a in np.abs(flat)])
    out = np.empty(len(flat), dtype=complex)
    for k in np.unique(depths):
        idx = depths == k
        out[idx] = _eval_core(pm, flat[idx], int(k))
    return out.reshape(z.shape)


def poincare_derivative_eval(pm: PoincareMap, z: complex, depth: int | None = None) -> complex:
    """f'(z) by the chain rule through the pullback."""
    k = pullback_depth(pm, abs(z)) if depth is None else int(depth)
    zk = complex(z) / pm.mu**k
    u = complex(series_eval(pm.series_f, zk))
    d = complex(series_eval(pm.series_df, zk)) / pm.mu**k
    for _ in range(k):
        d = pm.map.deriv(u) * d
        u = pm.map(u)
        if not (np.isfinite(abs(u)) and np.isfinite(abs(d))) or max(abs(u), abs(d)) > OVERFLOW_BOUND:
            raise OverflowSentinel("derivative pullback exceeded 1e290")
    return d


def _circle(pm: PoincareMap, r: float, n: int):
    theta = np.arange(n) * (TWO_PI / n)
    return r * np.exp(1j * theta)


def eval_on_circle(pm: PoincareMap, r: float, n: int = CIRCLE_SAMPLES):
    """(z, f(z), f'(z)) on |z|=r, all at the circle's common pullback depth."""
    z = _circle(pm, r, n)
    k = pullback_depth(pm, r)
    zk = z / pm.mu**k
    u = series_eval(pm.series_f, zk)
    d = series_eval(pm.series_df, zk) / pm.mu**k
    with np.errstate(over="ignore", invalid="ignore"):
        for _ in range(k):
            d = pm.map.deriv(u) * d
            u = pm.map(u)
            m = np.max(np.abs(u))
            if not np.isfinite(m) or m > OVERFLOW_BOUND:
                raise OverflowSentinel("circle evaluation exceeded 1e290")
    return z, u, d


def log_modulus_circle(pm: PoincareMap, r: float, n: int = CIRCLE_SAMPLES) -> np.ndarray:
    """log|f| on |z|=r with the overflow-safe doubling path."""
    z = _circle(pm, r, n)
    k = pullback_depth(pm, r)
    u = np.asarray(series_eval(pm.series_f, z / pm.mu**k), dtype=complex)
    with np.errstate(divide="ignore"):
        logmod = np.log(np.abs(u))
    live = np.abs(u) <= LOG_SWITCH
    for _ in range(k):
        logmod[~live] *= 2.0
        ul = pm.map(u[live])
        u[live] = ul
        with np.errstate(divide="ignore"):
            logmod[live] = np.log(np.abs(ul))
        newly_big = live.copy()
        newly_big[live] = np.abs(ul) > LOG_SWITCH
        live &= ~newly_big
    return logmod


def log_modulus_eval(pm: PoincareMap, z: complex) -> float:
    """log|f(z)|, accurate to 1e-6 whenever |f(z)| > 1; never overflows.

    Past |u| = 1e100 the iteration tracks L = log|u| and doubles it, which
    drops a correction smaller than |param|/|u| <= 1e-98 per step.
    """
    k = pullback_depth(pm, abs(z))
    u = complex(series_eval(pm.series_f, complex(z) / pm.mu**k))
    L = math.log(abs(u)) if u != 0 else -math.inf
    live = abs(u) <= LOG_SWITCH
    for _ in range(k):
        if live:
            u = pm.map(u)
            L = math.log(abs(u)) if u != 0 else -math.inf
            if abs(u) > LOG_SWITCH:
                live = False
        else:
            L *= 2.0
    return L


def functional_equation_residual(pm: PoincareMap, z: complex) -> float:
    """|P(f(z)) - f(mu z)| / (1 + |f(mu z)|) at one point."""
    fz = poincare_eval(pm, z)
    fmz = poincare_eval(pm, pm.mu * z)
    return abs(pm.map(fz) - fmz) / (1.0 + abs(fmz))


def check_functional_equation(pm: PoincareMap, radii=None, n: int = 256):
    """Residuals of P(f(z)) = f(mu z) on test circles.

    Returns (max pointwise relative residual, max absolute residual,
    sup |f| over the circles' images).
    """
    if radii is None:
        radii = [0.5 * pm.r0, 5.0 * pm.r0, 50.0 * pm.r0]
    worst_rel = 0.0
    worst_abs = 0.0
    sup_f = 0.0
    for r in radii:
        z = _circle(pm, r, n)
        fz = poincare_eval_many(pm, z)
        fmz = poincare_eval_many(pm, pm.mu * z)
        resid = np.abs(pm.map(fz) - fmz)
        worst_rel = max(worst_rel, float(np.max(resid / (1.0 + np.abs(fmz)))))
        worst_abs = max(worst_abs, float(np.max(resid)))
        sup_f = max(sup_f, float(np.max(np.abs(fmz))))
    return worst_rel, worst_abs, sup_f


def order_estimate(pm: PoincareMap, k_max: int) -> OrderEstimate:
    """Least-squares slope of log log M(r) against log r on geometric radii
    r = |mu|^k r0, k = 5..k_max (the first five radii are transient and are
    not sampled). M(r) is the max over 512 circle points of |f|."""
    if k_max < 10:
        raise BadParams("k_max must be >= 10")
    abs_mu = abs(pm.mu)
    logs = []
    for k in range(5, k_max + 1):
        r = abs_mu**k * pm.r0
        log_m = float(np.max(log_modulus_circle(pm, r)))
        if log_m <= 0.0:
            continue
        logs.append((math.log(r), math.log(log_m)))
    if len(logs) < 4:
        raise BadParams("too few usable radii for an order fit")
    x = np.array([p[0] for p in logs])
    y = np.array([p[1] for p in logs])
    slope, intercept = np.polyfit(x, y, 1)
    fit = slope * x + intercept
    residual = float(np.sqrt(np.mean((y - fit) ** 2)))
    return OrderEstimate(
        rho_hat=float(slope),
        samples=logs,
        rho_formula=order_from_multiplier(pm.mu),
        residual=residual,
    )
