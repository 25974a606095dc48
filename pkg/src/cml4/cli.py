"""Command-line front end: ``cml4 <subcommand> ...``.

Exit codes: 0 when the verdict is true (or the command succeeded), 1 when a
verdict is false, 2 on usage or configuration errors.
"""
from __future__ import annotations

import argparse
import json
import os
import sys
from fractions import Fraction
from pathlib import Path

import numpy as np

from . import explore, lorenz, verify
from .domains import BRANCHES
from .export import region_from_json, region_to_json, region_to_obj
from .geometry import GeometryError, parse_fraction
from .regions import REGION_NAMES, NotBuildable, build_region
from .symmetry import GENERATORS, full_group, orbit_of_region, word

EXIT_OK, EXIT_FALSE, EXIT_USAGE = 0, 1, 2


class UsageError(Exception):
    pass


def rational(text: str) -> Fraction:
    """Exact ``p/q`` or finite decimal."""
    try:
        return parse_fraction(text)
    except (ValueError, ZeroDivisionError):
        raise argparse.ArgumentTypeError(f"not a rational number: {text!r}") from None


def positive_int(text: str) -> int:
    try:
        n = int(text)
    except ValueError:
        raise argparse.ArgumentTypeError(f"not an integer: {text!r}") from None
    if n <= 0:
        raise argparse.ArgumentTypeError(f"must be positive: {text!r}")
    return n


def _common_flags() -> argparse.ArgumentParser:
    # SUPPRESS lets the flags appear before or after the subcommand
    p = argparse.ArgumentParser(add_help=False)
    p.add_argument("--json", action="store_true", default=argparse.SUPPRESS,
                   help="compact machine-readable JSON on stdout")
    p.add_argument("--quiet", action="store_true", default=argparse.SUPPRESS,
                   help="print nothing; only the exit code matters")
    p.add_argument("--threads", type=positive_int, default=argparse.SUPPRESS,
                   help="parallelism cap (default: available CPUs)")
    return p


def _sim_flags(p: argparse.ArgumentParser, steps: int, burn_in: int, orbits: int):
    p.add_argument("--steps", type=positive_int, default=steps)
    p.add_argument("--burn-in", type=int, default=burn_in)
    p.add_argument("--orbits", type=positive_int, default=orbits)
    p.add_argument("--seed", type=int, default=0)
    p.add_argument("--margin", type=float, default=1e-12, help="singularity margin")
    p.add_argument("--tolerance", type=float, default=1e-9, help="membership tolerance")


def build_parser() -> argparse.ArgumentParser:
    common = _common_flags()
    parser = argparse.ArgumentParser(
        prog="cml4", parents=[common],
        description="Exact invariant-set verification for four globally coupled doubling maps.",
    )
    sub = parser.add_subparsers(dest="command", required=True, metavar="COMMAND")

    p = sub.add_parser("verify", parents=[common], help="verify an invariant-set proposition at a rational eps")
    p.add_argument("which", choices=["prop1", "prop2"])
    p.add_argument("--eps", type=rational, required=True, help="coupling as p/q or decimal")

    p = sub.add_parser("critical-values", parents=[common], help="bracket and evaluate the critical couplings")
    p.add_argument("--tol", type=float, default=1e-12, help="bisection width for eps*")
    p.add_argument("--n-max", type=positive_int, default=5, help="number of eps_n values")
    p.add_argument("--dps", type=positive_int, default=40, help="decimal digits")

    p = sub.add_parser("simulate", parents=[common], help="float orbit occupancy statistics (CSV)")
    p.add_argument("--eps", type=float, required=True)
    _sim_flags(p, 10_000, 1_000, 100)
    p.add_argument("--start-region", choices=list(REGION_NAMES), default=None,
                   help="rejection-sample starts inside this region (default: uniform on the cube)")
    p.add_argument("--track", choices=["all", "S"], default="all",
                   help="'S' only scores membership in S, which is faster")
    p.add_argument("--out", type=Path, help="CSV output path (default: stdout)")

    p = sub.add_parser("scan", parents=[common], help="occupancy summary over an eps grid")
    p.add_argument("--eps-from", type=float, required=True)
    p.add_argument("--eps-to", type=float, required=True)
    p.add_argument("--eps-points", type=positive_int, default=10)
    _sim_flags(p, 10_000, 1_000, 100)
    p.add_argument("--start-region", choices=list(REGION_NAMES), default=None)
    p.add_argument("--out", type=Path, help="per-orbit CSV output path")

    p = sub.add_parser("faces", parents=[common], help="dynamics on an invariant face of the cube")
    p.add_argument("--face", choices=sorted(explore.FACES), required=True)
    p.add_argument("--eps", type=rational, required=True)
    _sim_flags(p, 20_000, 2_000, 200)
    p.add_argument("--grid", type=positive_int, default=32)
    p.add_argument("--compare-eps", type=rational,
                   help="also list stabilizer types present at --eps but absent at this coupling")
    p.add_argument("--check-polygon", type=Path,
                   help="region JSON (2D) to check exactly for invariance on the face")

    p = sub.add_parser("export", parents=[common], help="write a region as exact JSON or an OBJ mesh")
    p.add_argument("--region", choices=list(REGION_NAMES), required=True)
    p.add_argument("--eps", type=rational, required=True)
    p.add_argument("--format", choices=["obj", "json"], default="json")
    p.add_argument("--image", default="", help="symmetry word applied first, e.g. S0 or S3S4")
    p.add_argument("--out", type=Path, help="output path (default: stdout)")

    sub.add_parser("domain-table", parents=[common], help="the 26 branches with inequalities and offsets")

    p = sub.add_parser("symmetry-table", parents=[common], help="generators and their 48-element closure")
    p.add_argument("--orbit-eps", type=rational, help="also report the orbit of A at this eps")

    p = sub.add_parser("lorenz", parents=[common], help="the one-dimensional Lorenz map")
    p.add_argument("--eps", type=rational, required=True)
    p.add_argument("--eval", type=rational, dest="value", help="point to evaluate")
    p.add_argument("--iterate", type=int, default=1, help="number of iterations for --eval")
    p.add_argument("--components", action="store_true", help="mixing components and their cycle check")
    p.add_argument("--critical", type=positive_int, default=3, help="print eps_1 .. eps_n")
    return parser


# ---------------------------------------------------------------------------
# handlers return (payload, verdict); payload is JSON-able or a string


def _threads(args) -> int:
    return getattr(args, "threads", None) or os.cpu_count() or 1


def cmd_verify(args):
    which = 1 if args.which == "prop1" else 2
    rep = verify.proposition_report(which, args.eps, threads=_threads(args))
    return rep.to_json(), rep.verdict


def cmd_critical_values(args):
    cv = verify.critical_values(args.tol, args.n_max, args.dps)
    return cv.to_json(), cv.ordering_holds() and cv.radical_agrees()


def _sim_config(args, eps: float, **extra) -> explore.SimulationConfig:
    try:
        return explore.SimulationConfig(
            eps=eps, steps=args.steps, burn_in=args.burn_in, orbit_count=args.orbits,
            rng_seed=args.seed, singularity_margin=args.margin, tolerance=args.tolerance, **extra,
        )
    except ValueError as e:
        raise UsageError(str(e)) from None


def _table_output(args, csv_text: str, summary):
    if args.out:
        args.out.write_text(csv_text)
        return summary
    if getattr(args, "json", False):
        return summary
    return csv_text


def cmd_simulate(args):
    if not 0 <= args.eps < 0.5:
        raise UsageError("eps must lie in [0, 1/2)")
    cfg = _sim_config(args, args.eps, start_region=args.start_region, track=args.track)
    recs, _ = explore.simulate_batch(cfg)
    row = explore.summarize(args.eps, recs)
    return _table_output(args, explore.records_to_csv(args.eps, recs), row.to_json()), True


def cmd_scan(args):
    grid = np.linspace(args.eps_from, args.eps_to, args.eps_points)
    if grid.min() < 0 or grid.max() >= 0.5:
        raise UsageError("eps grid must lie in [0, 1/2)")
    cfg = _sim_config(args, float(grid[0]), start_region=args.start_region)
    rows, csv_text = explore.scan_eps([float(e) for e in grid], cfg, threads=_threads(args))
    return _table_output(args, csv_text, [r.to_json() for r in rows]), True


def cmd_faces(args):
    cfg = _sim_config(args, float(args.eps))
    rep = explore.face_dynamics(args.face, float(args.eps), cfg, grid=args.grid)
    out = rep.to_json()
    ok = rep.fixed_coordinate_max == 0.0
    if args.compare_eps is not None:
        cmp = explore.emerging_face_types(args.face, float(args.compare_eps), float(args.eps), cfg, grid=args.grid)
        out["compared_to"] = float(args.compare_eps)
        out["new_types"] = cmp["new_types"]
    if args.check_polygon:
        region = region_from_json(args.check_polygon.read_text())
        if region.dim != 2:
            raise UsageError("--check-polygon expects a 2D region")
        chk = explore.check_face_polygon_invariance(region, args.face, args.eps)
        out["polygon_check"] = chk
        ok = ok and chk["holds"]
    return out, ok


def cmd_export(args):
    region = build_region(args.region, args.eps)
    if args.image:
        from .symmetry import apply_to_region

        region = apply_to_region(word(args.image), region)
    text = region_to_obj(region) if args.format == "obj" else region_to_json(region)
    if args.out:
        args.out.write_text(text)
        return {"written": str(args.out), "members": region.labels}, True
    return text, True


def cmd_domain_table(args):
    return {"branches": [b.to_json() for b in BRANCHES]}, True


def cmd_symmetry_table(args):
    G = full_group()
    out = {"generators": [S.to_json() for S in GENERATORS], "group": G.to_json()}
    if args.orbit_eps is not None:
        out["orbit_of_A"] = orbit_of_region(build_region("A", args.orbit_eps), G).to_json()
    return out, True


def cmd_lorenz(args):
    L = lorenz.LorenzMap(args.eps)
    out = {
        "eps": str(L.eps),
        "domain": L.domain.to_json(),
        "p_star": str(lorenz.p_star(L.eps)),
        "eps_n": [str(lorenz.critical_eps(n, 20)) for n in range(1, args.critical + 1)],
        "two_component_window": lorenz.in_two_component_window(L.eps),
        "third_iterate_condition": lorenz.third_iterate_condition(L.eps),
    }
    if args.value is not None:
        out["orbit"] = [str(v) for v in _lorenz_orbit(L, args.value, args.iterate)]
    ok = True
    if args.components:
        C1, C2 = lorenz.mixing_components(L.eps)
        out["components"] = {"C1": [I.to_json() for I in C1], "C2": [I.to_json() for I in C2]}
        out["cycle"] = lorenz.component_cycle(L.eps)
        ok = all(out["cycle"].values())
    return out, ok


def _lorenz_orbit(L, v, n):
    pts = [v]
    for _ in range(n):
        pts.append(L(pts[-1]))
    return pts


HANDLERS = {
    "verify": cmd_verify,
    "critical-values": cmd_critical_values,
    "simulate": cmd_simulate,
    "scan": cmd_scan,
    "faces": cmd_faces,
    "export": cmd_export,
    "domain-table": cmd_domain_table,
    "symmetry-table": cmd_symmetry_table,
    "lorenz": cmd_lorenz,
}


def dispatch(args: argparse.Namespace, stdout=None) -> int:
    stdout = stdout or sys.stdout
    try:
        payload, verdict = HANDLERS[args.command](args)
    except (UsageError, NotBuildable, GeometryError, lorenz.LorenzError, ValueError) as e:
        print(f"cml4 {args.command}: error: {e}", file=sys.stderr)
        return EXIT_USAGE
    if not getattr(args, "quiet", False):
        if isinstance(payload, str):
            stdout.write(payload if payload.endswith("\n") else payload + "\n")
        elif getattr(args, "json", False):
            stdout.write(json.dumps(payload, sort_keys=True, separators=(",", ":")) + "\n")
        else:
            stdout.write(json.dumps(payload, indent=2) + "\n")
    return EXIT_OK if verdict else EXIT_FALSE


def main(argv=None) -> int:
    parser = build_parser()
    try:
        args = parser.parse_args(argv)
    except SystemExit as e:
        return int(e.code) if e.code is not None else EXIT_OK
    return dispatch(args)


if __name__ == "__main__":
    sys.exit(main())
