"""Command-line entry point.

Subcommands: poincare, siegel, preimages, exceptional, littlewood, chebyshev,
density, render.  Every run is fully determined by (command, flags, seed);
reruns with equal flags produce byte-identical CSV/JSON/PPM/SVG files (no
timestamps anywhere).  Exit codes: 0 ok, 2 usage or precondition violation,
3 numeric failure (stderr carries the module error name verbatim), 4
evaluation budget exceeded.  POINCARE_LAB_THREADS mirrors --threads.
"""

from __future__ import annotations

import argparse
import csv
import io
import json
import math
import os
import re
import sys
from dataclasses import dataclass
from pathlib import Path

import numpy as np

from . import chebfamily, exceptional, littlewood, preimage, render
from .dyncore import QuadMap
from .errors import BadParams, OutOfDomain, PoincareLabError
from .poincare import build_poincare_map, poincare_eval, pullback_depth
from .sets import (
    certified_bound,
    density_estimate,
    make_empty_set,
    make_powerlaw_set,
    make_sector_set,
    set_to_json,
)
from .series import series_to_json
from .siegel import RotationAngle, build_siegel_map, sub_siegel_sample


@dataclass(frozen=True)
class RunConfig:
    command: str
    params: dict
    seed: int
    threads: int
    out_dir: Path


def _parse_complex(text: str) -> complex:
    parts = text.split(",")
    try:
        if len(parts) == 1:
            return complex(float(parts[0]), 0.0)
        if len(parts) == 2:
            return complex(float(parts[0]), float(parts[1]))
    except ValueError:
        pass
    raise BadParams(f"cannot parse complex number from {text!r}; expected RE,IM")


def _angle_from_flag(text: str) -> RotationAngle:
    if text == "golden":
        return RotationAngle.golden()
    try:
        g = float(text)
    except ValueError:
        raise BadParams(f"--lambda-gamma takes 'golden' or a number in (0,1), got {text!r}")
    return RotationAngle(g)


def _build_map(args):
    """(QuadMap, RotationAngle | None) from --lambda-gamma / --c flags."""
    lg = getattr(args, "lambda_gamma", None)
    c = getattr(args, "c", None)
    if lg is not None and c is not None:
        raise BadParams("give either --lambda-gamma or --c, not both")
    if lg is not None:
        angle = _angle_from_flag(lg)
        return QuadMap(kind="lambda", param=angle.lam), angle
    if c is not None:
        return QuadMap(kind="c", param=_parse_complex(c)), None
    raise BadParams("map spec required; usage: --lambda-gamma G | --c RE,IM")


def _threads(args) -> int:
    t = getattr(args, "threads", None)
    if t is None:
        t = int(os.environ.get("POINCARE_LAB_THREADS", "1"))
    if t == 0:
        t = os.cpu_count() or 1
    return max(1, int(t))


def _out_dir(args) -> Path:
    d = Path(getattr(args, "out_dir", "."))
    d.mkdir(parents=True, exist_ok=True)
    return d


def _build_set(args):
    kind = getattr(args, "set", None) or "empty"
    if kind == "empty":
        return make_empty_set()
    if kind == "powerlaw":
        return make_powerlaw_set(args.C, args.delta, args.seed)
    if kind == "sectors":
        return make_sector_set(args.C, args.delta)
    raise BadParams(f"unknown set kind {kind!r}; choose empty, powerlaw, or sectors")


def _write(path: Path, payload) -> Path:
    if isinstance(payload, bytes):
        path.write_bytes(payload)
    else:
        path.write_text(payload)
    return path


# ---------------------------------------------------------------- commands


def cmd_poincare(args) -> int:
    qmap, angle = _build_map(args)
    pm = build_poincare_map(qmap, N=args.terms)
    out = _out_dir(args)
    provenance = {
        "command": "poincare",
        "map_kind": qmap.kind,
        "param": [qmap.param.real, qmap.param.imag],
        "terms": args.terms,
        "z0": [pm.z0.real, pm.z0.imag],
        "mu": [pm.mu.real, pm.mu.imag],
    }
    series_path = _write(out / "poincare_series.json",
                         series_to_json(pm.series_f, provenance))
    if args.eval:
        points = [_parse_complex(p) for p in args.eval.split(";") if p]
    else:
        points = [5.0 * pm.r0 * complex(math.cos(t), math.sin(t))
                  for t in np.linspace(0.0, 2.0 * math.pi, 9)[:-1]]
    buf = io.StringIO()
    writer = csv.writer(buf, lineterminator="\n")
    writer.writerow(["re z", "im z", "re f(z)", "im f(z)",
                     "residual = |P(f(z))-f(mu z)|/(1+|f(mu z)|)"])
    for z in points:
        fz = poincare_eval(pm, z)
        fmz = poincare_eval(pm, pm.mu * z)
        resid = abs(qmap(fz) - fmz) / (1.0 + abs(fmz))
        writer.writerow([repr(z.real), repr(z.imag), repr(fz.real),
                         repr(fz.imag), repr(resid)])
    table_path = _write(out / "poincare_eval.csv", buf.getvalue())
    print(f"poincare: z0={pm.z0} mu={pm.mu} r0={pm.r0:.6g} "
          f"safe_radius={pm.series_f.safe_radius:.6g}")
    print(f"wrote {series_path} and {table_path}")
    return 0


def cmd_siegel(args) -> int:
    lg = getattr(args, "lambda_gamma", None)
    if lg is None:
        raise BadParams("siegel needs --lambda-gamma G")
    angle = _angle_from_flag(lg)
    qmap = QuadMap(kind="lambda", param=angle.lam)
    sm = build_siegel_map(angle, N=args.terms)
    out = _out_dir(args)
    provenance = {"command": "siegel", "gamma": angle.gamma, "terms": args.terms}
    series_path = _write(out / "siegel_series.json",
                         series_to_json(sm.series_h, provenance))
    info = {
        "gamma": angle.gamma,
        "lambda": [angle.lam.real, angle.lam.imag],
        "radius_hat": sm.radius_hat,
        "root_estimate": sm.radius_info.root_estimate,
        "residual_estimate": sm.radius_info.residual_estimate,
        "inconclusive": sm.radius_info.inconclusive,
        "sub_fraction": sm.sub_fraction,
        "conjugacy_residual": sm.conj_residual,
    }
    info_path = _write(out / "siegel_info.json", json.dumps(info, indent=2))
    print(f"siegel: gamma={angle.gamma:.12g} radius_hat={sm.radius_hat:.6g} "
          f"conjugacy_residual={sm.conj_residual:.3e}")
    print(f"wrote {series_path} and {info_path}")
    return 0


def cmd_preimages(args) -> int:
    qmap, angle = _build_map(args)
    pm = build_poincare_map(qmap, N=args.terms)
    w = _parse_complex(args.w)
    S = _build_set(args)
    out = _out_dir(args)
    count = preimage.argument_principle_count(pm, w, args.r)
    print(f"argument principle count of f(z)={w} in D_{args.r:g}: {count}")
    if angle is None:
        print("orbit preimages need a Siegel map (--lambda-gamma); skipped")
        return 0
    sm = build_siegel_map(angle, N=args.siegel_terms)
    ib = preimage.find_base_preimage(pm, sm)
    try:
        report = preimage.build_preimage_report(ib, S, w, args.r, args.kmax)
    except OutOfDomain:
        print(f"w={w} lies outside the sub-Siegel disk; orbit preimages skipped")
        return 0
    inside = sum(1 for p in report.orbit_points if abs(p.z) <= args.r)
    print(f"orbit preimages with |z| <= {args.r:g}: {inside} "
          f"(of {len(report.orbit_points)} computed; count >= orbit is "
          f"{'OK' if count >= inside else 'VIOLATED'})")
    csv_path = _write(out / "preimage_report.csv", preimage.report_to_csv(report))
    json_path = _write(out / "preimage_report.json", preimage.report_to_json(report))
    print(f"wrote {csv_path} and {json_path}")
    return 0


def cmd_exceptional(args) -> int:
    S = _build_set(args)  # validate set flags before heavy work
    lg = getattr(args, "lambda_gamma", None) or "golden"
    angle = _angle_from_flag(lg)
    qmap = QuadMap(kind="lambda", param=angle.lam)
    pm = build_poincare_map(qmap, N=args.terms)
    sm = build_siegel_map(angle, N=args.siegel_terms)
    ib = preimage.find_base_preimage(pm, sm)
    report = exceptional.exceptional_survey(
        ib, S, w_count=args.samples, k_max=args.kmax, seed=args.seed,
        threads=_threads(args),
    )
    out = _out_dir(args)
    json_path = _write(out / "exceptional_report.json",
                       exceptional.report_to_json(report))
    csv_path = _write(out / "exceptional_ratio_table.csv",
                      exceptional.ratio_table_csv(report))
    proxies = [p for p in exceptional.liminf_proxies(report) if not math.isnan(p)]
    med = float(np.median(proxies)) if proxies else math.nan
    print(f"exceptional: target 1/log|mu| = {report.target:.6f}, "
          f"median liminf proxy = {med:.6f}, "
          f"escape fraction = {exceptional.escape_fraction(report):.3f}")
    print(f"wrote {json_path} and {csv_path}")
    return 0


def cmd_littlewood(args) -> int:
    threads = _threads(args)
    if args.family == "iterates":
        c = _parse_complex(args.c) if args.c is not None else complex(-1.0, 0.0)
        estimates = littlewood.iterate_family_integrals(
            c, args.nmax, args.tol, threads=threads)
        label = f"iterates of z^2 + ({c})"
    elif args.family == "monomials":
        degrees = [2**j for j in range(0, args.nmax + 1)]
        estimates = [
            littlewood.disk_integral(littlewood.monomial_evaluator(n),
                                     tol=args.tol, threads=threads)
            for n in degrees
        ]
        label = "monomials z^n"
    else:
        raise BadParams(f"unknown family {args.family!r}; choose iterates or monomials")
    out = _out_dir(args)
    csv_path = _write(out / "littlewood.csv", littlewood.family_csv(estimates))
    print(f"littlewood ({label}): {len(estimates)} integrals, "
          f"max degree {estimates[-1].degree}")
    code = 0
    if any(e.budget_exceeded for e in estimates):
        print("evaluation budget exceeded; Monte Carlo fallback used", file=sys.stderr)
        code = 4
    try:
        fit = littlewood.exponent_fit(estimates)
        fit_payload = {
            "slope": fit.slope,
            "alpha_hat": fit.alpha_hat,
            "residual": fit.residual,
            "pairs": fit.pairs,
        }
        fit_path = _write(out / "littlewood_fit.json",
                          json.dumps(fit_payload, indent=2))
        print(f"fit: slope={fit.slope:.6f} alpha_hat={fit.alpha_hat:.6f}")
        print(f"wrote {csv_path} and {fit_path}")
    except PoincareLabError:
        print(f"wrote {csv_path} (too few degrees for an exponent fit)")
    return code


def cmd_chebyshev(args) -> int:
    q_list = [int(x) for x in args.q.split(",") if x]
    if args.gamma_cf:
        cf = [int(x) for x in args.gamma_cf.split(",") if x]
        angle = RotationAngle.from_cf(cf)
    else:
        angle = chebfamily.family_angle()
    report = chebfamily.family_report(q_list, angle, series_terms=args.terms)
    out = _out_dir(args)
    buf = io.StringIO()
    writer = csv.writer(buf, lineterminator="\n")
    writer.writerow(["q", "c_super_re", "c_parab_re", "c_parab_im",
                     "c_siegel_re", "c_siegel_im", "z_re", "z_im",
                     "mu_re", "mu_im", "|mu|", "rho = log2/log|mu|",
                     "siegel_linearizer_residual", "max_multiplier_residual",
                     "error"])
    for row in report.rows:
        if row.error is None:
            writer.writerow([
                row.q, repr(float(row.c_super)),
                repr(float(row.c_parabolic.real)), repr(float(row.c_parabolic.imag)),
                repr(float(row.c_siegel.real)), repr(float(row.c_siegel.imag)),
                repr(float(row.z_fixed.real)), repr(float(row.z_fixed.imag)),
                repr(float(row.mu.real)), repr(float(row.mu.imag)),
                repr(float(abs(row.mu))), repr(float(row.rho)),
                repr(float(row.siegel_residual)), repr(float(row.mult_residual)),
                "",
            ])
        else:
            writer.writerow([row.q] + [""] * 13 + [row.error])
    csv_path = _write(out / "chebyshev_family.csv", buf.getvalue())
    payload = {
        "gamma": report.gamma,
        "limits": report.limits,
        "rows": [
            {
                "q": row.q,
                "c_super": row.c_super,
                "c_parabolic": None if row.c_parabolic is None
                else [row.c_parabolic.real, row.c_parabolic.imag],
                "c_siegel": None if row.c_siegel is None
                else [row.c_siegel.real, row.c_siegel.imag],
                "z_fixed": None if row.z_fixed is None
                else [row.z_fixed.real, row.z_fixed.imag],
                "mu": None if row.mu is None else [row.mu.real, row.mu.imag],
                "abs_mu": None if row.mu is None else abs(row.mu),
                "rho": row.rho,
                "siegel_residual": row.siegel_residual,
                "mult_residual": row.mult_residual,
                "error": row.error,
            }
            for row in report.rows
        ],
    }
    json_path = _write(out / "chebyshev_family.json", json.dumps(payload, indent=2))
    for row in report.rows:
        if row.error is None:
            print(f"q={row.q}: c_super={row.c_super:.9f} "
                  f"|mu|={abs(row.mu):.6f} rho={row.rho:.6f}")
        else:
            print(f"q={row.q}: {row.error}")
    print(f"wrote {csv_path} and {json_path}")
    return 0


def cmd_density(args) -> int:
    S = _build_set(args)
    est = density_estimate(S, args.r, args.samples, args.seed)
    out = _out_dir(args)
    payload = {
        "set": json.loads(set_to_json(S)),
        "r": args.r,
        "value": est.value,
        "std_error": est.std_error,
        "samples": est.samples,
        "certified_bound": certified_bound(S, args.r)
        if S.certificate is not None else None,
    }
    path = _write(out / "density.json", json.dumps(payload, indent=2))
    bound = payload["certified_bound"]
    bound_text = f", certified bound {bound:.6g}" if bound is not None else ""
    print(f"density in D_{args.r:g}: {est.value:.6g} "
          f"+/- {3.0 * est.std_error:.2g} (3 sigma){bound_text}")
    print(f"wrote {path}")
    return 0


def cmd_render(args) -> int:
    path = Path(args.out)
    if not path.is_absolute():
        path = _out_dir(args) / path
    fmt = path.suffix.lower()
    if fmt not in (".ppm", ".svg"):
        raise BadParams(f"unknown image format {fmt!r}; use .ppm or .svg")
    lg = getattr(args, "lambda_gamma", None)
    c = getattr(args, "c", None)
    if lg is None and c is None:
        args.lambda_gamma = "golden"
    qmap, angle = _build_map(args)

    if args.what == "domain":
        pm = build_poincare_map(qmap, N=args.terms)
        r = args.r if args.r is not None else 4.0 * pm.r0
        payload = (render.domain_coloring_ppm(pm, r, args.size) if fmt == ".ppm"
                   else render.domain_coloring_svg(pm, r))
    elif args.what == "siegel":
        if angle is None:
            raise BadParams("render --what siegel needs --lambda-gamma")
        sm = build_siegel_map(angle, N=args.siegel_terms)
        payload = (render.siegel_scatter_ppm(sm, args.size, args.samples, args.seed)
                   if fmt == ".ppm"
                   else render.siegel_scatter_svg(sm, min(args.samples, 2000), args.seed))
    elif args.what == "orbit":
        if angle is None:
            raise BadParams("render --what orbit needs --lambda-gamma")
        pm = build_poincare_map(qmap, N=args.terms)
        sm = build_siegel_map(angle, N=args.siegel_terms)
        ib = preimage.find_base_preimage(pm, sm)
        w = complex(sub_siegel_sample(sm, 1, args.seed)[0])
        pts = [z for _, z in preimage.orbit_preimages(ib, w, args.kmax)]
        S = _build_set(args) if getattr(args, "set", None) else None
        r = args.r if args.r is not None else 1.05 * max(abs(z) for z in pts)
        payload = (render.orbit_svg(pts, S, r) if fmt == ".svg"
                   else render.orbit_ppm(pts, S, r, args.size))
    else:
        raise BadParams(f"unknown --what {args.what!r}")
    path.parent.mkdir(parents=True, exist_ok=True)
    _write(path, payload)
    print(f"wrote {path}")
    return 0


# ---------------------------------------------------------------- parser


def _add_map_flags(p: argparse.ArgumentParser):
    p.add_argument("--lambda-gamma", dest="lambda_gamma", metavar="G",
                   help="rotation number in (0,1), or 'golden'")
    p.add_argument("--c", metavar="RE,IM", help="parameter of z^2 + c")


def _add_set_flags(p: argparse.ArgumentParser):
    p.add_argument("--set", choices=["empty", "powerlaw", "sectors"],
                   help="target set model")
    p.add_argument("--C", type=float, default=10.0, help="density constant C")
    p.add_argument("--delta", type=float, default=0.5,
                   help="density decay exponent in (0,2)")


def _add_common(p: argparse.ArgumentParser):
    p.add_argument("--seed", type=int, default=1)
    p.add_argument("--threads", type=int, default=None,
                   help="worker threads (0 = auto); POINCARE_LAB_THREADS mirrors this")
    p.add_argument("--out-dir", default=".", help="directory for output files")


def _build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="poincarelab",
        description="Poincare functions, Siegel disks, preimage counting, "
                    "spherical-derivative integrals.",
    )
    sub = parser.add_subparsers(dest="command", required=True)

    p = sub.add_parser("poincare", help="series + functional-equation table")
    _add_map_flags(p)
    p.add_argument("--terms", type=int, default=64)
    p.add_argument("--eval", metavar="RE,IM;RE,IM;...",
                   help="points to evaluate (semicolon separated)")
    _add_common(p)
    p.set_defaults(handler=cmd_poincare)

    p = sub.add_parser("siegel", help="Siegel linearizer series + radius")
    _add_map_flags(p)
    p.add_argument("--terms", type=int, default=256)
    _add_common(p)
    p.set_defaults(handler=cmd_siegel)

    p = sub.add_parser("preimages", help="orbit preimages vs argument-principle count")
    _add_map_flags(p)
    p.add_argument("--w", required=True, metavar="RE,IM")
    p.add_argument("--r", type=float, required=True)
    p.add_argument("--kmax", type=int, default=10)
    p.add_argument("--terms", type=int, default=64)
    p.add_argument("--siegel-terms", dest="siegel_terms", type=int, default=256)
    _add_set_flags(p)
    _add_common(p)
    p.set_defaults(handler=cmd_preimages)

    p = sub.add_parser("exceptional", help="liminf-count survey over sampled w")
    _add_map_flags(p)
    _add_set_flags(p)
    p.add_argument("--kmax", type=int, default=30)
    p.add_argument("--samples", type=int, default=50)
    p.add_argument("--terms", type=int, default=64)
    p.add_argument("--siegel-terms", dest="siegel_terms", type=int, default=256)
    _add_common(p)
    p.set_defaults(handler=cmd_exceptional)

    p = sub.add_parser("littlewood", help="spherical-derivative disk integrals")
    p.add_argument("--family", choices=["iterates", "monomials"], default="iterates")
    p.add_argument("--c", metavar="RE,IM")
    p.add_argument("--nmax", type=int, default=10)
    p.add_argument("--tol", type=float, default=1e-4)
    _add_common(p)
    p.set_defaults(handler=cmd_littlewood)

    p = sub.add_parser("chebyshev", help="parameter family pipeline near c=-2")
    p.add_argument("--q", default="1,2,3", metavar="Q1,Q2,...")
    p.add_argument("--gamma-cf", dest="gamma_cf", metavar="A1,A2,...",
                   help="continued-fraction terms of the Siegel rotation number")
    p.add_argument("--terms", type=int, default=64)
    _add_common(p)
    p.set_defaults(handler=cmd_chebyshev)

    p = sub.add_parser("density", help="Monte Carlo density vs certificate")
    _add_set_flags(p)
    p.add_argument("--r", type=float, required=True)
    p.add_argument("--samples", type=int, default=100_000)
    _add_common(p)
    p.set_defaults(handler=cmd_density)

    p = sub.add_parser("render", help="PPM/SVG images")
    p.add_argument("--what", choices=["domain", "siegel", "orbit"], required=True)
    _add_map_flags(p)
    _add_set_flags(p)
    p.add_argument("--r", type=float, default=None)
    p.add_argument("--kmax", type=int, default=10)
    p.add_argument("--samples", type=int, default=4000)
    p.add_argument("--size", type=int, default=512)
    p.add_argument("--terms", type=int, default=64)
    p.add_argument("--siegel-terms", dest="siegel_terms", type=int, default=256)
    p.add_argument("--out", required=True)
    _add_common(p)
    p.set_defaults(handler=cmd_render)

    return parser


_NEG_NUMBER = re.compile(r"^-\d|^-\.\d")


def _merge_negative_values(argv):
    """Join '--flag -2,0' into '--flag=-2,0' so argparse keeps the value."""
    out = []
    i = 0
    while i < len(argv):
        tok = argv[i]
        nxt = argv[i + 1] if i + 1 < len(argv) else None
        if (tok.startswith("--") and "=" not in tok and nxt is not None
                and _NEG_NUMBER.match(nxt)):
            out.append(f"{tok}={nxt}")
            i += 2
        else:
            out.append(tok)
            i += 1
    return out


def main(argv=None) -> int:
    parser = _build_parser()
    if argv is None:
        argv = sys.argv[1:]
    try:
        args = parser.parse_args(_merge_negative_values(list(argv)))
    except SystemExit as exc:
        return int(exc.code) if exc.code is not None else 0
    try:
        return args.handler(args)
    except BadParams as exc:
        print(f"BadParams: {exc}", file=sys.stderr)
        return 2
    except PoincareLabError as exc:
        print(f"{type(exc).__name__}: {exc}", file=sys.stderr)
        return 3


def console_main() -> None:
    sys.exit(main())
