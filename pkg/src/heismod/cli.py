"""Command-line entry point: ``heismod <command> ...`` prints a JSON report.

Exit status is 0 when every check passes, 1 when some check fails and 2 on
bad arguments or malformed input.
"""

from __future__ import annotations

import argparse
import json
import os
import sys
import time
from typing import Optional, Sequence

import numpy as np

from .checks import Check
from .errors import CharacteristicPoint, HeisError, KOutOfRange, SpecParse, UnknownMap
from .logchart import phi
from .maps import beltrami, contact_residuals
from .modulus import (SphericalRing, cone_density, cone_foliation, cone_leaf_measure,
                      curve_density, density_integral, graph_psi_surface, mean_distortion_2,
                      modulus_cones_closed_form, modulus_foliation, psi_terms, ring_samples,
                      verify_main_theorem)
from .numerics import Rect
from .registry import make_map
from .report import Report, write_csv
from .stretch import stretch_distortion, stretch_map
from .surfaces import (cone_patch, gauge_sphere_patch, horizontal_area, horizontal_area_integral,
                       horizontal_normal, integrate_flow, plane_t0)

QUAD_RTOL = 1e-6
FD_RTOL = 1e-5


class UsageError(Exception):
    pass


def _ring(a: float, b: float) -> SphericalRing:
    if not (0 < a < b):
        raise UsageError(f"need 0 < a < b, got a={a}, b={b}")
    return SphericalRing(a, b)


def _tolerances(report: Report) -> None:
    report.inputs.setdefault("quad_rtol", QUAD_RTOL)
    report.inputs.setdefault("fd_rtol", FD_RTOL)


def cmd_mod_cones(a: float, b: float, quad_n: Optional[int] = None,
                  csv_path: Optional[str] = None) -> Report:
    ring = _ring(a, b)
    rep = Report("mod-cones", {"a": a, "b": b, "quad_n": quad_n})
    closed = modulus_cones_closed_form(ring)
    leaf = modulus_foliation(cone_foliation(ring), quad_n)
    direct = density_integral(cone_density(ring), ring, 4.0 / 3.0, quad_n)
    rep.results.update(closed_form=closed, leaf_quadrature=leaf, direct_3d=direct,
                       rel_err_leaf=abs(leaf / closed - 1), rel_err_direct=abs(direct / closed - 1),
                       rel_err_leaf_direct=abs(leaf / direct - 1))
    rep.add(Check.close("leaf_vs_closed", closed, leaf, QUAD_RTOL))
    rep.add(Check.close("direct_vs_closed", closed, direct, QUAD_RTOL))
    rep.add(Check.close("leaf_vs_direct", direct, leaf, QUAD_RTOL))
    if csv_path:
        psi = np.linspace(-np.pi / 2, np.pi / 2, 203)[1:-1]
        write_csv(csv_path, ["psi", "leaf_measure_density"], zip(psi, cone_leaf_measure(psi)))
    return rep


def cmd_verify_stretch(k: float, a: float, b: float, quad_n: Optional[int] = None,
                       samples: int = 1000, seed: int = 0,
                       csv_path: Optional[str] = None) -> Report:
    ring = _ring(a, b)
    rep = Report("verify-stretch", {"k": k, "a": a, "b": b, "quad_n": quad_n,
                                    "samples": samples, "seed": seed})
    thm = verify_main_theorem(k, ring, quad_n, samples, seed)
    rep.results.update(thm.values)
    rep.checks.extend(thm.checks)
    m2 = mean_distortion_2(stretch_map(k), curve_density(ring), ring, quad_n)
    rep.results["mean_dist_2"] = m2
    rep.add(Check.close("mean_dist_2", k ** -3.0, m2, 1e-5))
    if csv_path:
        psi = np.linspace(-np.pi / 2, np.pi / 2, 203)[1:-1]
        write_csv(csv_path, ["psi", "leaf_distortion"], zip(psi, stretch_distortion(k, psi)))
    return rep


def cmd_contact_check(map_name: str, samples: int = 1000, seed: int = 0, a: float = 1.0,
                      b: float = float(np.e), fd: Optional[float] = None,
                      csv_path: Optional[str] = None) -> Report:
    ring = _ring(a, b)
    f = make_map(map_name)
    if fd is not None:
        f = f.with_fd(fd)
    rep = Report("contact-check", {"map": map_name, "samples": samples, "seed": seed,
                                   "a": a, "b": b, "fd_step": fd})
    q = ring_samples(ring, samples, seed)
    p = phi(q)
    r1, r2, lam = contact_residuals(f, p)
    a1, a2 = np.abs(r1), np.abs(r2)
    K = beltrami(f, p).K
    rep.results.update(max_r1=a1.max(), mean_r1=a1.mean(), max_r2=a2.max(), mean_r2=a2.mean(),
                       lambda_min=lam.min(), lambda_max=lam.max(), K_max=K.max(), K_mean=K.mean())
    rep.add(Check.at_most("max_r1", 1e-6, float(a1.max())))
    rep.add(Check.at_most("max_r2", 1e-6, float(a2.max())))
    same_sign = bool(np.all(lam > 0) or np.all(lam < 0))
    rep.add(Check("lambda_sign_consistent", 1.0, float(same_sign), 0.0, same_sign))
    if csv_path:
        write_csv(csv_path, ["xi", "psi", "eta", "abs_r1", "abs_r2", "lambda", "K"],
                  zip(q.xi, q.psi, q.eta, a1, a2, lam, K))
    return rep


# -- surface specs ------------------------------------------------------------

def parse_surface_spec(spec: dict):
    """(patch, ring or None) from a surface spec object."""
    if not isinstance(spec, dict) or "type" not in spec:
        raise SpecParse("surface spec must be an object with a 'type'")
    kind = spec["type"]
    params = spec.get("params", {}) or {}
    ring = None
    if "ring" in spec:
        try:
            ring = SphericalRing(float(spec["ring"]["a"]), float(spec["ring"]["b"]))
        except (KeyError, TypeError, ValueError) as exc:
            raise SpecParse(f"bad ring: {exc}") from None
    try:
        if kind == "cone":
            ring = ring or SphericalRing(1.0, float(np.e))
            return cone_patch(float(params.get("psi", 0.0)), ring.leaf_domain()), ring
        if kind == "graph-psi":
            ring = ring or SphericalRing(1.0, float(np.e))
            fn = psi_terms(float(params.get("psi0", 0.0)), params.get("terms", []))
            return graph_psi_surface(ring, fn), ring
        if kind == "plane-t0":
            h = float(params.get("half_width", 1.0))
            return plane_t0(Rect(-h, h, -h, h)), ring
        if kind == "gauge-sphere":
            xi0 = 2.0 * np.log(float(params["radius"])) if "radius" in params \
                else float(params.get("xi0", 0.0))
            return gauge_sphere_patch(xi0), ring
    except (KeyError, TypeError, ValueError) as exc:
        if isinstance(exc, HeisError):
            raise SpecParse(str(exc)) from None
        raise SpecParse(f"bad params for {kind!r}: {exc}") from None
    raise SpecParse(f"unknown surface type {kind!r}")


def cmd_surface(spec_file: str, rho: str = "none", quad_n: Optional[int] = None,
                grid: int = 21, flow: int = 0, flow_steps: int = 200, flow_h: float = 1e-2,
                csv_path: Optional[str] = None) -> Report:
    try:
        with open(spec_file, encoding="utf-8") as fh:
            spec = json.load(fh)
    except (OSError, json.JSONDecodeError) as exc:
        raise SpecParse(f"cannot read {spec_file}: {exc}") from None
    s, ring = parse_surface_spec(spec)
    rep = Report("surface", {"spec": spec, "rho": rho, "quad_n": quad_n, "grid": grid})
    U, V = s.domain.grid(grid, inclusive=True)
    interior = s.domain.contains(U, V)
    char = horizontal_normal(s, U[interior], V[interior]).is_characteristic
    char_uv = list(zip(U[interior][char], V[interior][char]))
    rep.results["characteristic_count"] = len(char_uv)
    for i, (u, v) in enumerate(char_uv):
        rep.results[f"characteristic_{i}_u"] = u
        rep.results[f"characteristic_{i}_v"] = v
    # ||N^h|| is not smooth across characteristic points and may vanish on the
    # patch edges, so cut there and use edge-graded nodes
    pieces = _split(s.domain, char_uv[0]) if char_uv else [s.domain]
    graded = bool(char_uv) or spec["type"] == "gauge-sphere"
    rep.results["horizontal_area"] = sum(
        horizontal_area(s, r, n=quad_n, rtol=QUAD_RTOL, graded=graded) for r in pieces)
    if rho != "none":
        if ring is None:
            raise SpecParse("a density needs a ring in the spec")
        dens = cone_density(ring) if rho == "rho23" else curve_density(ring)
        val = sum(horizontal_area_integral(dens, s, r, n=quad_n, rtol=QUAD_RTOL, graded=graded)
                  for r in pieces)
        rep.results["rho_integral"] = val
        rep.add(Check.at_least("admissible", 1.0, val, 1e-9))
    if flow:
        rows = []
        us = np.linspace(s.domain.u0, s.domain.u1, flow + 2)[1:-1]
        v0 = 0.5 * (s.domain.v0 + s.domain.v1) + 0.1 * (s.domain.v1 - s.domain.v0)
        for i, u in enumerate(us):
            try:
                line = integrate_flow(s, (u, v0), flow_steps, flow_h)
            except CharacteristicPoint:
                continue
            pts = s(line.points[:, 0], line.points[:, 1])
            for (uu, vv), x, y, t in zip(line.points, pts.x, pts.y, pts.t):
                rows.append((i, uu, vv, x, y, t))
        rep.results["flow_lines"] = len({r[0] for r in rows})
        if csv_path:
            write_csv(csv_path, ["line", "u", "v", "x", "y", "t"], rows)
    return rep


def _split(rect: Rect, uv) -> list:
    u, v = uv
    return [Rect(rect.u0, u, rect.v0, v), Rect(u, rect.u1, rect.v0, v),
            Rect(rect.u0, u, v, rect.v1), Rect(u, rect.u1, v, rect.v1)]


# -- argument handling ----------------------------------------------------------

def build_parser() -> argparse.ArgumentParser:
    p = argparse.ArgumentParser(prog="heismod", description=__doc__.splitlines()[0])
    sub = p.add_subparsers(dest="command", required=True)

    def common(sp):
        sp.add_argument("--quad-n", type=int, default=None,
                        help="Gauss-Legendre order (default: $HEISMOD_QUAD_N or 64)")
        sp.add_argument("--csv", default=None, help="write plot data to this CSV file")

    sp = sub.add_parser("mod-cones", help="modulus of the cone foliation, three ways")
    sp.add_argument("--a", type=float, default=1.0)
    sp.add_argument("--b", type=float, default=float(np.e))
    common(sp)

    sp = sub.add_parser("verify-stretch", help="all computable quantities for the stretch f_k")
    sp.add_argument("--k", type=float, required=True)
    sp.add_argument("--a", type=float, default=1.0)
    sp.add_argument("--b", type=float, default=float(np.e))
    sp.add_argument("--samples", type=int, default=1000)
    sp.add_argument("--seed", type=int, default=0)
    common(sp)

    sp = sub.add_parser("contact-check", help="contact residuals of a registered map")
    sp.add_argument("--map", dest="map_name", required=True)
    sp.add_argument("--samples", type=int, default=1000)
    sp.add_argument("--seed", type=int, default=0)
    sp.add_argument("--a", type=float, default=1.0)
    sp.add_argument("--b", type=float, default=float(np.e))
    sp.add_argument("--fd", type=float, default=None, help="use finite differences with this step")
    common(sp)

    sp = sub.add_parser("surface", help="horizontal area, characteristic points, admissibility")
    sp.add_argument("spec_file")
    sp.add_argument("--rho", choices=["none", "rho23", "rho2"], default="none")
    sp.add_argument("--grid", type=int, default=21)
    sp.add_argument("--flow", type=int, default=0, help="number of flow lines to trace")
    sp.add_argument("--flow-steps", type=int, default=200)
    sp.add_argument("--flow-h", type=float, default=1e-2)
    common(sp)
    return p


def run(args: argparse.Namespace) -> Report:
    if args.quad_n is not None and args.quad_n < 2:
        raise UsageError("--quad-n must be at least 2")
    if args.command == "mod-cones":
        return cmd_mod_cones(args.a, args.b, args.quad_n, args.csv)
    if args.command == "verify-stretch":
        return cmd_verify_stretch(args.k, args.a, args.b, args.quad_n, args.samples,
                                  args.seed, args.csv)
    if args.command == "contact-check":
        return cmd_contact_check(args.map_name, args.samples, args.seed, args.a, args.b,
                                 args.fd, args.csv)
    return cmd_surface(args.spec_file, args.rho, args.quad_n, args.grid, args.flow,
                       args.flow_steps, args.flow_h, args.csv)


def main(argv: Optional[Sequence[str]] = None) -> int:
    parser = build_parser()
    args = parser.parse_args(argv)
    t0 = time.perf_counter()
    try:
        rep = run(args)
    except (UsageError, KOutOfRange, UnknownMap, SpecParse) as exc:
        msg = exc.args[0] if exc.args else str(exc)
        print(f"heismod {args.command}: error: {msg}", file=sys.stderr)
        return 2
    rep.runtime_ms = int(round(1000 * (time.perf_counter() - t0)))
    _tolerances(rep)
    if os.environ.get("HEISMOD_QUAD_N"):
        rep.inputs["env_quad_n"] = os.environ["HEISMOD_QUAD_N"]
    sys.stdout.write(rep.to_json() + "\n")
    return 0 if rep.passed else 1


if __name__ == "__main__":
    sys.exit(main())
