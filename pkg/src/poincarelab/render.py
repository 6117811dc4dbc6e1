"""Static images: domain coloring (binary PPM) and marker plots (SVG).

Everything here is deterministic: pixel colors are pure functions of the
inputs and SVG floats are printed with fixed precision, so equal inputs give
byte-identical files.
"""

from __future__ import annotations

import math
from typing import Iterable

import numpy as np

from .errors import BadParams
from .poincare import PoincareMap, log_modulus_circle, poincare_eval_many
from .sets import SetModel, disk_pack
from .siegel import SiegelMap, h_eval, sub_siegel_sample

TWO_PI = 2.0 * math.pi


def _hsv_to_rgb(h: np.ndarray, s: np.ndarray, v: np.ndarray) -> np.ndarray:
    """Vectorized HSV -> RGB, all components in [0, 1]."""
    h6 = (h % 1.0) * 6.0
    i = np.floor(h6).astype(int) % 6
    f = h6 - np.floor(h6)
    p = v * (1.0 - s)
    q = v * (1.0 - s * f)
    t = v * (1.0 - s * (1.0 - f))
    r = np.choose(i, [v, q, p, p, t, v])
    g = np.choose(i, [t, v, v, q, p, p])
    b = np.choose(i, [p, p, t, v, v, q])
    return np.stack([r, g, b], axis=-1)


def ppm_bytes(rgb: np.ndarray) -> bytes:
    """P6 image from an (h, w, 3) float array in [0, 1]."""
    if rgb.ndim != 3 or rgb.shape[2] != 3:
        raise BadParams("rgb array must have shape (h, w, 3)")
    h, w, _ = rgb.shape
    data = np.clip(np.round(rgb * 255.0), 0, 255).astype(np.uint8)
    return b"P6\n" + f"{w} {h}\n255\n".encode("ascii") + data.tobytes()


def _grid(r: float, size: int) -> np.ndarray:
    xs = np.linspace(-r, r, size)
    ys = np.linspace(r, -r, size)  # top row = +imag
    return xs[None, :] + 1j * ys[:, None]


def domain_coloring_ppm(pm: PoincareMap, r: float, size: int = 512) -> bytes:
    """Phase-and-modulus coloring of the Poincare function on the square
    circumscribing D_r."""
    z = _grid(r, size)
    f = poincare_eval_many(pm, z)
    with np.errstate(divide="ignore"):
        logm = np.log(np.abs(f))
    logm[~np.isfinite(logm)] = -30.0
    hue = (np.angle(f) / TWO_PI) % 1.0
    band = (logm / math.log(2.0)) % 1.0
    val = 0.35 + 0.55 * band
    sat = np.full_like(val, 0.85)
    outside = np.abs(z) > r
    rgb = _hsv_to_rgb(hue, sat, val)
    rgb[outside] = 0.08
    return ppm_bytes(rgb)


def siegel_scatter_ppm(sm: SiegelMap, size: int = 512, samples: int = 4000,
                       seed: int = 7) -> bytes:
    """Sampled sub-Siegel disk (light dots) with its boundary image (bright)
    on a dark background."""
    pts = sub_siegel_sample(sm, samples, seed)
    theta = np.arange(720) * (TWO_PI / 720)
    boundary = np.array([
        h_eval(sm, sm.sub_fraction * sm.radius_hat * complex(math.cos(t), math.sin(t)))
        for t in theta
    ])
    allpts = np.concatenate([pts, boundary])
    span = 1.3 * float(np.max(np.abs(allpts - sm.center_value))) + 1e-12
    img = np.full((size, size, 3), 0.06)

    def paint(zs, color):
        xi = np.clip(((zs.real - sm.center_value.real) / span + 1.0) * 0.5 * (size - 1), 0, size - 1).astype(int)
        yi = np.clip((1.0 - ((zs.imag - sm.center_value.imag) / span + 1.0) * 0.5) * (size - 1), 0, size - 1).astype(int)
        img[yi, xi] = color

    paint(pts, (0.55, 0.75, 0.95))
    paint(boundary, (1.0, 0.85, 0.3))
    return ppm_bytes(img)


def _svg_header(width: int, height: int, r: float):
    return (
        f'<svg xmlns="http://www.w3.org/2000/svg" width="{width}" height="{height}" '
        f'viewBox="{-1.05 * r:.6e} {-1.05 * r:.6e} {2.1 * r:.6e} {2.1 * r:.6e}">\n'
        f'<rect x="{-1.05 * r:.6e}" y="{-1.05 * r:.6e}" width="{2.1 * r:.6e}" '
        f'height="{2.1 * r:.6e}" fill="#101018"/>\n'
    )


def orbit_svg(points: Iterable[complex], S: SetModel | None, r: float,
              width: int = 800) -> str:
    """Orbit preimage markers inside D_r over the set's disks.

    Each orbit point becomes one element with class "marker", so the marker
    count equals the number of points passed in. The y axis is flipped so the
    picture matches mathematical orientation.
    """
    pts = [complex(p) for p in points]
    parts = [_svg_header(width, width, r)]
    parts.append(
        f'<circle cx="0" cy="0" r="{r:.6e}" fill="none" '
        f'stroke="#3050a0" stroke-width="{0.004 * r:.6e}"/>\n'
    )
    if S is not None and S.kind == "PowerLawDisks":
        j_hi = max(0, int(math.floor(math.log2(max(2.0, r)))))
        for j in range(j_hi + 1):
            centers, radii = disk_pack(S, j)
            for c, rad in zip(centers, radii):
                if abs(c) - rad > r:
                    continue
                parts.append(
                    f'<circle cx="{c.real:.6e}" cy="{-c.imag:.6e}" r="{rad:.6e}" '
                    f'fill="#808890" fill-opacity="0.45"/>\n'
                )
    marker_r = 0.012 * r
    for p in pts:
        parts.append(
            f'<circle class="marker" cx="{p.real:.6e}" cy="{-p.imag:.6e}" '
            f'r="{marker_r:.6e}" fill="#ffcc40" stroke="#805000" '
            f'stroke-width="{0.25 * marker_r:.6e}"/>\n'
        )
    parts.append("</svg>\n")
    return "".join(parts)


def orbit_ppm(points: Iterable[complex], S: SetModel | None, r: float,
              size: int = 512) -> bytes:
    """Raster variant of the orbit view."""
    z = _grid(r, size)
    img = np.full((size, size, 3), 0.06)
    inside = np.abs(z) <= r
    img[inside] = (0.10, 0.12, 0.20)
    if S is not None:
        hits = S.contains_many(z) & inside
        img[hits] = (0.50, 0.53, 0.58)
    marker_r = max(1.5 * (2.0 * r / size), 0.008 * r)
    for p in points:
        img[np.abs(z - complex(p)) <= marker_r] = (1.0, 0.8, 0.25)
    return ppm_bytes(img)


def domain_coloring_svg(pm: PoincareMap, r: float, cells: int = 64) -> str:
    """Coarse vector version of the domain coloring (one rect per cell)."""
    z = _grid(r, cells)
    f = poincare_eval_many(pm, z)
    with np.errstate(divide="ignore"):
        logm = np.log(np.abs(f))
    logm[~np.isfinite(logm)] = -30.0
    hue = (np.angle(f) / TWO_PI) % 1.0
    val = 0.35 + 0.55 * ((logm / math.log(2.0)) % 1.0)
    rgb = np.clip(_hsv_to_rgb(hue, np.full_like(val, 0.85), val) * 255.0, 0, 255)
    step = 2.0 * r / cells
    parts = [_svg_header(800, 800, r)]
    for i in range(cells):
        for j in range(cells):
            cc = rgb[i, j].astype(int)
            x = -r + j * step
            y = -r + i * step
            parts.append(
                f'<rect x="{x:.6e}" y="{y:.6e}" width="{step:.6e}" '
                f'height="{step:.6e}" fill="#{cc[0]:02x}{cc[1]:02x}{cc[2]:02x}"/>\n'
            )
    parts.append("</svg>\n")
    return "".join(parts)


def siegel_scatter_svg(sm: SiegelMap, samples: int = 1500, seed: int = 7) -> str:
    """Vector scatter of the sub-Siegel disk with its boundary image."""
    pts = sub_siegel_sample(sm, samples, seed)
    theta = np.arange(360) * (TWO_PI / 360)
    boundary = np.array([
        h_eval(sm, sm.sub_fraction * sm.radius_hat * complex(math.cos(t), math.sin(t)))
        for t in theta
    ])
    span = 1.3 * float(np.max(np.abs(np.concatenate([pts, boundary]) - sm.center_value))) + 1e-12
    parts = [_svg_header(800, 800, span)]
    dot = 0.006 * span
    for p in pts:
        q = complex(p) - sm.center_value
        parts.append(
            f'<circle cx="{q.real:.6e}" cy="{-q.imag:.6e}" r="{dot:.6e}" '
            f'fill="#8cc0f0"/>\n'
        )
    for p in boundary:
        q = complex(p) - sm.center_value
        parts.append(
            f'<circle cx="{q.real:.6e}" cy="{-q.imag:.6e}" r="{dot:.6e}" '
            f'fill="#ffd84d"/>\n'
        )
    parts.append("</svg>\n")
    return "".join(parts)


def growth_curve_svg(pm: PoincareMap, k_max: int, width: int = 800) -> str:
    """log log M(r) against log r on geometric radii, as a polyline."""
    if k_max < 6:
        raise BadParams("k_max must be >= 6")
    abs_mu = abs(pm.mu)
    pts = []
    for k in range(1, k_max + 1):
        r = abs_mu**k * pm.r0
        m = float(np.max(log_modulus_circle(pm, r)))
        if m > 0:
            pts.append((math.log(r), math.log(m)))
    if len(pts) < 2:
        raise BadParams("not enough usable radii for a growth curve")
    xs = [p[0] for p in pts]
    ys = [p[1] for p in pts]
    x0, x1 = min(xs), max(xs)
    y0, y1 = min(ys), max(ys)
    span_x = (x1 - x0) or 1.0
    span_y = (y1 - y0) or 1.0
    coords = " ".join(
        f"{(x - x0) / span_x * width:.2f},{(1.0 - (y - y0) / span_y) * width * 0.6:.2f}"
        for x, y in pts
    )
    return (
        f'<svg xmlns="http://www.w3.org/2000/svg" width="{width}" '
        f'height="{int(width * 0.6)}">\n'
        f'<rect width="100%" height="100%" fill="#101018"/>\n'
        f'<polyline points="{coords}" fill="none" stroke="#ffcc40" '
        f'stroke-width="2"/>\n</svg>\n'
    )
