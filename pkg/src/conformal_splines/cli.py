"""Batch command line front end.

Exit codes: 0 success, 1 numerical failure, 2 input error.
"""

from __future__ import annotations

import argparse
import logging
import sys
from pathlib import Path

import numpy as np

from . import geometry, io
from .conformal import induced_metric, qc_summary, quasi_conformal_error
from .diagnostics import (
    TubeSpec,
    circle_curve,
    conservation_report,
    flux_class,
    generate_tube,
    kernel_dimension,
    leibniz_residual,
    spherical_curve,
    torus_knot,
    tube_invariants,
    vertex_cycle,
)
from .errors import ConformalSplineError, NumericalFailure, ParseError, ValidationError
from .solver import newton_solve, solve_report
from .willmore import willmore_energy

EXIT_OK, EXIT_NUMERICAL, EXIT_INPUT = 0, 1, 2
CHECK_TOL = 1e-9
LEIBNIZ_TOL = 1e-12

logger = logging.getLogger("conformal_splines")


def _emit(report: dict, as_json: bool) -> None:
    sys.stdout.write(io.format_report_json(report) if as_json else io.format_report(report))


def _mesh_summary(f, surface) -> dict:
    return {
        "vertices": surface.n_vertices,
        "edges": surface.n_edges,
        "faces": surface.n_faces,
        "genus": surface.genus,
        "boundary_components": surface.n_boundary_components,
    }


# -- subcommands ------------------------------------------------------------------------


def cmd_solve(args) -> int:
    path = Path(args.scene)
    try:
        text = path.read_text()
    except OSError as exc:
        raise ParseError(f"cannot read scene: {exc.strerror}", None, path) from None
    config = io.parse_scene(text, path.parent, path)
    scene = io.load_scene(config)
    surface, cons = scene.surface, scene.constraints

    failure = None
    try:
        state = newton_solve(surface, scene.f, cons, config.solver)
    except NumericalFailure as exc:
        failure, state = exc, exc.state
        if state is None:
            raise

    f = state.f
    report = {
        "config": config.resolved(),
        "mesh": _mesh_summary(f, surface),
        "solver": solve_report(state),
        "history": [[s, c] for s, c in state.history],
        "energy": {"willmore": willmore_energy(surface, f).total, "area": geometry.area(surface, f)},
        "fluxes": {str(v): state.fluxes[v] for v in sorted(state.fluxes)},
    }
    if surface.is_closed:
        report["energy"]["volume"] = geometry.volume(surface, f)
    if state.fluxes:
        total = np.sum([state.fluxes[v] for v in state.fluxes], axis=0)
        scale = max(float(np.linalg.norm(state.fluxes[v])) for v in state.fluxes)
        report["balancing"] = {"flux_sum": total, "max_flux": scale}
    q = quasi_conformal_error(surface, f, scene.reference_metric)
    s = qc_summary(q)
    report["quasi_conformal"] = {k: s[k] for k in ("min", "mean", "median", "max")}
    if failure is not None:
        report["failure"] = {"type": type(failure).__name__, "message": str(failure)}

    if config.output_mesh is not None:
        io.write_obj(config.output_mesh, f, surface)
    if config.output_multipliers is not None and state.q is not None:
        io.write_edge_table(config.output_multipliers, state.q, surface)
    if config.output_report is not None:
        io.write_report(config.output_report, report)
    if config.output_json is not None:
        Path(config.output_json).write_text(io.format_report_json(report))
    if not args.quiet:
        _emit(report, args.json)
    if failure is not None:
        print(f"error: {failure}", file=sys.stderr)
        return EXIT_NUMERICAL
    return EXIT_OK


def cmd_energy(args) -> int:
    f, surface = io.read_obj(args.mesh)
    w = willmore_energy(surface, f)
    interior = np.flatnonzero(surface.is_interior_vertex)
    wi = w.integrand[interior] if len(interior) else np.zeros(1)
    report = {
        "mesh": _mesh_summary(f, surface),
        "willmore": {
            "total": w.total,
            "vertex_min": float(wi.min()),
            "vertex_min_at": int(interior[np.argmin(wi)]) if len(interior) else None,
            "vertex_max": float(wi.max()),
            "vertex_max_at": int(interior[np.argmax(wi)]) if len(interior) else None,
            "degenerate_edges": w.degenerate_count,
        },
    }
    _emit(report, args.json)
    return EXIT_OK


def cmd_check(args) -> int:
    f, surface = io.read_obj(args.mesh)
    rng = np.random.default_rng(args.seed)
    cons = conservation_report(surface, f)
    phi = rng.normal(size=surface.n_vertices)
    leib = max(
        leibniz_residual(surface, phi, rng.normal(size=surface.n_edges)),
        leibniz_residual(surface, phi, rng.normal(size=(surface.n_edges, 3))),
    )
    kern = kernel_dimension(surface)
    ok_cons = all(cons[k] <= CHECK_TOL for k in ("tau", "sigma", "rho", "zeta"))
    ok_leib = leib <= LEIBNIZ_TOL
    ok_kern = (not kern["checked"]) or kern["dimension"] == kern["expected"]
    report = {
        "mesh": _mesh_summary(f, surface),
        "conservation": cons,
        "leibniz": {"residual": leib},
        "kernel": kern,
        "tolerances": {"conservation": CHECK_TOL, "leibniz": LEIBNIZ_TOL},
        "passed": {"conservation": ok_cons, "leibniz": ok_leib, "kernel": ok_kern},
    }
    _emit(report, args.json)
    if not (ok_cons and ok_leib and ok_kern):
        print("error: self-test failed", file=sys.stderr)
        return EXIT_NUMERICAL
    return EXIT_OK


def _reference_metric(path: Path, surface) -> np.ndarray:
    if path.suffix.lower() == ".obj":
        g, ref_surface = io.read_obj(path)
        if not np.array_equal(ref_surface.faces, surface.faces):
            raise ValidationError(f"{path}: connectivity differs from the mesh")
        return induced_metric(surface, g)
    return io.read_edge_table(path, surface)


def cmd_qc_error(args) -> int:
    f, surface = io.read_obj(args.mesh)
    lam_ref = _reference_metric(Path(args.reference), surface)
    s = qc_summary(quasi_conformal_error(surface, f, lam_ref), bins=args.bins)
    _emit({"mesh": _mesh_summary(f, surface), "quasi_conformal": s}, args.json)
    return EXIT_OK


CURVES = {"circle": circle_curve, "torus-knot": torus_knot, "spherical": spherical_curve}


def _read_curve(path: Path) -> np.ndarray:
    rows = []
    for ln, raw in enumerate(path.read_text().splitlines(), start=1):
        s = raw.split("#", 1)[0].strip()
        if not s:
            continue
        try:
            xyz = [float(t) for t in s.split()]
        except ValueError:
            raise ParseError("expected 'x y z'", ln, path) from None
        if len(xyz) != 3:
            raise ParseError("expected 'x y z'", ln, path)
        rows.append(xyz)
    return np.array(rows, dtype=float).reshape(-1, 3)


def cmd_tube(args) -> int:
    if args.centerline is not None:
        c = _read_curve(Path(args.centerline))
    else:
        c = CURVES[args.curve](args.samples)
    spec = TubeSpec(c, args.thickness, m=args.m, n=args.n)
    inv = tube_invariants(spec)
    report = {
        "tube": {"samples": len(c), "thickness": args.thickness, "m": args.m, "n": args.n},
        "invariants": {k: getattr(inv, k) for k in inv.__dataclass_fields__},
    }
    if args.output is not None:
        f, surface = generate_tube(spec)
        io.write_obj(args.output, f, surface)
        report["mesh"] = _mesh_summary(f, surface)
        report["mesh"]["area"] = geometry.area(surface, f)
        report["mesh"]["volume"] = geometry.volume(surface, f)
    _emit(report, args.json)
    return EXIT_OK


def read_cycles(path: Path, surface) -> list[list[int]]:
    """One cycle per line: face indices, or ``vertex v`` for the cycle around ``v``."""
    cycles = []
    for ln, raw in enumerate(path.read_text().splitlines(), start=1):
        s = raw.split("#", 1)[0].strip()
        if not s:
            continue
        tok = s.split()
        try:
            if tok[0] == "vertex" and len(tok) == 2:
                v = int(tok[1])
                if not 0 <= v < surface.n_vertices:
                    raise ValidationError(f"{path}:{ln}: unknown vertex {v}")
                cycles.append(vertex_cycle(surface, v))
            else:
                ids = [int(t) for t in tok]
                if any(not 0 <= i < surface.n_faces for i in ids):
                    raise ValidationError(f"{path}:{ln}: unknown face index")
                cycles.append(ids)
        except ValueError:
            raise ParseError("expected face indices or 'vertex v'", ln, path) from None
    return cycles


def cmd_flux_report(args) -> int:
    f, surface = io.read_obj(args.mesh)
    q = io.read_edge_table(args.multipliers, surface) if args.multipliers else np.zeros(surface.n_edges)
    cycles = read_cycles(Path(args.cycles), surface)
    vals = flux_class(surface, f, q, cycles)
    report = {
        "mesh": _mesh_summary(f, surface),
        "cycles": [{"length": len(c), "flux": v} for c, v in zip(cycles, vals)],
        "sum": vals.sum(axis=0) if len(vals) else np.zeros(3),
    }
    _emit(report, args.json)
    return EXIT_OK


# -- entry point ------------------------------------------------------------------------


def build_parser() -> argparse.ArgumentParser:
    p = argparse.ArgumentParser(prog="conformal-splines", description="Conformally constrained Willmore surfaces.")
    p.add_argument("-v", "--verbose", action="store_true", help="log solver iterations to stderr")
    sub = p.add_subparsers(dest="command", required=True)

    def add(name, fn, help):
        s = sub.add_parser(name, help=help)
        s.add_argument("--json", action="store_true", help="structured output instead of key-value lines")
        s.set_defaults(func=fn)
        return s

    s = add("solve", cmd_solve, "run the constrained Newton solver on a scene file")
    s.add_argument("scene")
    s.add_argument("--quiet", action="store_true", help="do not print the report")

    s = add("energy", cmd_energy, "total discrete Willmore energy and per-vertex extremes")
    s.add_argument("mesh")

    s = add("check", cmd_check, "conservation law, Leibniz rule and kernel dimension self-tests")
    s.add_argument("mesh")
    s.add_argument("--seed", type=int, default=0)

    s = add("qc-error", cmd_qc_error, "quasi-conformal error against a reference metric")
    s.add_argument("mesh")
    s.add_argument("--reference", required=True, help="OBJ with the same connectivity, or an 'i j log-length' table")
    s.add_argument("--bins", type=int, default=16)

    s = add("tube", cmd_tube, "tube mesh around a closed curve and its thin-tube invariants")
    g = s.add_mutually_exclusive_group()
    g.add_argument("--curve", choices=sorted(CURVES), default="circle")
    g.add_argument("--centerline", help="file with one 'x y z' sample per line")
    s.add_argument("--samples", type=int, default=128)
    s.add_argument("--thickness", type=float, default=0.1)
    s.add_argument("-m", type=int, default=16, help="vertices per ring")
    s.add_argument("-n", type=int, default=None, help="number of rings (resamples the curve)")
    s.add_argument("--output", help="write the tube mesh as OBJ")

    s = add("flux-report", cmd_flux_report, "flux integrals over dual cycles")
    s.add_argument("mesh")
    s.add_argument("--multipliers", help="'i j q' table written by solve (default: zero)")
    s.add_argument("--cycles", required=True, help="one cycle per line: face indices or 'vertex v'")
    return p


def main(argv: list[str] | None = None) -> int:
    parser = build_parser()
    args = parser.parse_args(argv)
    logging.basicConfig(level=logging.DEBUG if args.verbose else logging.WARNING, format="%(message)s")
    try:
        return args.func(args)
    except NumericalFailure as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_NUMERICAL
    except (ConformalSplineError, OSError, ValueError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_INPUT


run_cli = main


if __name__ == "__main__":
    sys.exit(main())
