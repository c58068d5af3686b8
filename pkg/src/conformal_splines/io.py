"""OBJ meshes, sidecar edge tables, scene files and reports.

All numbers are written with the shortest decimal that round-trips
(``repr(float)``), so output is byte-identical for identical inputs.
"""

from __future__ import annotations

import json
from dataclasses import dataclass, field
from pathlib import Path

import numpy as np

from .conformal import ConformalClass, extended_cross_ratio, induced_metric
from .errors import (
    MeshError,
    NonTriangleFace,
    ParseError,
    UnbalancedFlux,
    ValidationError,
)
from .mesh import SimplicialSurface, build_surface
from .solver import ConstraintSet, ScaleConstraint, SolverOptions

SCENE_HEADER = "conformal-spline-scene"
SCENE_VERSION = 1
CONFORMAL_SOURCES = ("from-mesh", "from-reference", "file", "none")


def fmt(x: float) -> str:
    return repr(float(x))


# -- OBJ -----------------------------------------------------------------------


def _face_index(token: str, n_vertices: int, line: int, path) -> int:
    head = token.split("/", 1)[0]
    try:
        k = int(head)
    except ValueError:
        raise ParseError(f"bad face index {token!r}", line, path) from None
    if k == 0:
        raise ParseError("face index 0 is not valid in OBJ", line, path)
    # negative indices count back from the most recent vertex
    i = k - 1 if k > 0 else n_vertices + k
    if not 0 <= i < n_vertices:
        raise ParseError(f"face index {k} refers to a missing vertex", line, path)
    return i


def parse_obj(text: str, path=None) -> tuple[np.ndarray, np.ndarray]:
    verts: list[list[float]] = []
    faces: list[list[int]] = []
    for ln, raw in enumerate(text.splitlines(), start=1):
        s = raw.split("#", 1)[0].strip()
        if not s:
            continue
        tok = s.split()
        if tok[0] == "v":
            if len(tok) < 4:
                raise ParseError("vertex record needs three coordinates", ln, path)
            try:
                xyz = [float(t) for t in tok[1:4]]
            except ValueError:
                raise ParseError("vertex coordinate is not a number", ln, path) from None
            if not all(np.isfinite(xyz)):
                raise ParseError("vertex coordinate is not finite", ln, path)
            verts.append(xyz)
        elif tok[0] == "f":
            idx = [_face_index(t, len(verts), ln, path) for t in tok[1:]]
            if len(idx) != 3:
                raise NonTriangleFace(f"face with {len(idx)} vertices (triangles only)", ln, path)
            faces.append(idx)
        # other records (vn, vt, o, g, s, usemtl, ...) carry nothing we use
    if not faces:
        raise ParseError("no faces", None, path)
    return np.array(verts, dtype=float).reshape(-1, 3), np.array(faces, dtype=np.int64)


def read_obj(path) -> tuple[np.ndarray, SimplicialSurface]:
    path = Path(path)
    try:
        text = path.read_text()
    except OSError as exc:
        raise ParseError(f"cannot read mesh: {exc.strerror}", None, path) from None
    f, faces = parse_obj(text, path)
    try:
        surface = build_surface(faces, len(f))
    except MeshError as exc:
        raise ValidationError(f"{path}: {exc}") from exc
    return f, surface


def format_obj(f: np.ndarray, surface: SimplicialSurface) -> str:
    f = np.asarray(f, dtype=float)
    lines = [f"v {fmt(x)} {fmt(y)} {fmt(z)}" for x, y, z in f]
    lines += [f"f {i + 1} {j + 1} {k + 1}" for i, j, k in surface.faces]
    return "\n".join(lines) + "\n"


def write_obj(path, f: np.ndarray, surface: SimplicialSurface) -> None:
    Path(path).write_text(format_obj(f, surface))


# -- sidecar edge tables -------------------------------------------------------------


def read_edge_table(path, surface: SimplicialSurface) -> np.ndarray:
    """Per-edge values from ``i j value`` lines; every edge exactly once, ``i < j``."""
    path = Path(path)
    try:
        text = path.read_text()
    except OSError as exc:
        raise ParseError(f"cannot read edge table: {exc.strerror}", None, path) from None
    out = np.full(surface.n_edges, np.nan)
    for ln, raw in enumerate(text.splitlines(), start=1):
        s = raw.split("#", 1)[0].strip()
        if not s:
            continue
        tok = s.split()
        if len(tok) != 3:
            raise ParseError("expected 'i j value'", ln, path)
        try:
            i, j, val = int(tok[0]), int(tok[1]), float(tok[2])
        except ValueError:
            raise ParseError("expected 'i j value'", ln, path) from None
        if not i < j:
            raise ParseError(f"edge ({i}, {j}) is not in canonical order i < j", ln, path)
        try:
            e = surface.edge_index(i, j)
        except (KeyError, IndexError, ValueError):
            raise ParseError(f"({i}, {j}) is not a mesh edge", ln, path) from None
        if not np.isnan(out[e]):
            raise ParseError(f"edge ({i}, {j}) listed twice", ln, path)
        if not np.isfinite(val):
            raise ParseError("value is not finite", ln, path)
        out[e] = val
    missing = np.flatnonzero(np.isnan(out))
    if len(missing):
        a, b = surface.edges[missing[0]]
        raise ValidationError(f"{path}: edge ({a}, {b}) missing ({len(missing)} edges uncovered)")
    return out


def format_edge_table(values: np.ndarray, surface: SimplicialSurface) -> str:
    return "".join(f"{i} {j} {fmt(v)}\n" for (i, j), v in zip(surface.edges, values))


def write_edge_table(path, values: np.ndarray, surface: SimplicialSurface) -> None:
    Path(path).write_text(format_edge_table(values, surface))


# -- scene files ---------------------------------------------------------------------


@dataclass
class SceneConfig:
    mesh: Path
    reference_metric: Path | None = None
    conformal: str = "from-mesh"
    conformal_file: Path | None = None
    boundary_rows: bool | list[bool] = True
    objective: str = "willmore"
    points: dict[int, np.ndarray | None] = field(default_factory=dict)
    fluxes: dict[int, np.ndarray] = field(default_factory=dict)
    scales: list[ScaleConstraint] = field(default_factory=list)
    area: float | str | None = None
    volume: float | str | None = None
    identify: list[tuple[int, int]] = field(default_factory=list)
    solver: SolverOptions = field(default_factory=SolverOptions)
    output_mesh: Path | None = None
    output_report: Path | None = None
    output_json: Path | None = None
    output_multipliers: Path | None = None

    def resolved(self) -> dict:
        """Every setting with defaults filled in, for echoing into reports."""
        pts = {
            str(v): ("current" if p is None else [float(x) for x in p]) for v, p in sorted(self.points.items())
        }
        return {
            "mesh": str(self.mesh),
            "reference_metric": None if self.reference_metric is None else str(self.reference_metric),
            "conformal": self.conformal,
            "conformal_file": None if self.conformal_file is None else str(self.conformal_file),
            "boundary_rows": self.boundary_rows,
            "objective": self.objective,
            "points": pts,
            "fluxes": {str(v): [float(x) for x in p] for v, p in sorted(self.fluxes.items())},
            "scales": [[s.vertex, float(s.value), s.mode] for s in self.scales],
            "area": self.area,
            "volume": self.volume,
            "identify": [list(p) for p in self.identify],
            "solver": {k: getattr(self.solver, k) for k in SolverOptions.__dataclass_fields__},
            "output": {
                "mesh": None if self.output_mesh is None else str(self.output_mesh),
                "report": None if self.output_report is None else str(self.output_report),
                "json": None if self.output_json is None else str(self.output_json),
                "multipliers": None if self.output_multipliers is None else str(self.output_multipliers),
            },
        }


@dataclass
class Scene:
    config: SceneConfig
    f: np.ndarray
    surface: SimplicialSurface
    reference_metric: np.ndarray
    constraints: ConstraintSet


_SOLVER_KEYS = {
    "tol": ("tol", float),
    "tol-constraint": ("tol_constraint", float),
    "max-iters": ("max_iters", int),
    "damping-initial": ("damping_initial", float),
    "damping-max": ("damping_max", float),
}


def _floats(tok: list[str], n: int, ln: int, path) -> list[float]:
    if len(tok) != n:
        raise ParseError(f"expected {n} numbers", ln, path)
    try:
        vals = [float(t) for t in tok]
    except ValueError:
        raise ParseError("expected numbers", ln, path) from None
    if not all(np.isfinite(vals)):
        raise ParseError("numbers must be finite", ln, path)
    return vals


def _int(t: str, ln: int, path) -> int:
    try:
        return int(t)
    except ValueError:
        raise ParseError(f"expected a vertex index, got {t!r}", ln, path) from None


def parse_scene(text: str, base: Path, path=None) -> SceneConfig:
    """Parse scene text; relative paths resolve against ``base``."""
    lines = []
    for ln, raw in enumerate(text.splitlines(), start=1):
        s = raw.split("#", 1)[0].strip()
        if s:
            lines.append((ln, s.split()))
    if not lines or lines[0][1][:1] != [SCENE_HEADER]:
        raise ParseError(f"missing '{SCENE_HEADER} {SCENE_VERSION}' header", lines[0][0] if lines else 1, path)
    ln0, head = lines[0]
    if len(head) != 2 or head[1] != str(SCENE_VERSION):
        raise ParseError(f"unsupported scene version {' '.join(head[1:])!r}", ln0, path)

    cfg: dict = {}
    cfg_points: dict[int, np.ndarray | None] = {}
    fluxes: dict[int, np.ndarray] = {}
    scales: list[ScaleConstraint] = []
    identify: list[tuple[int, int]] = []
    solver = SolverOptions()
    outputs: dict[str, Path] = {}
    seen: set[str] = set()
    block: str | None = None
    block_line = 0

    def once(key: str, ln: int) -> None:
        if key in seen:
            raise ParseError(f"'{key}' given twice", ln, path)
        seen.add(key)

    def measure(tok: list[str], key: str, ln: int) -> float | str:
        if tok == ["current"]:
            return "current"
        return _floats(tok, 1, ln, path)[0]

    for ln, tok in lines[1:]:
        key, args = tok[0], tok[1:]
        if block is None:
            if key in ("constraints", "solver", "output"):
                if args:
                    raise ParseError(f"'{key}' opens a block and takes no arguments", ln, path)
                once(key, ln)
                block, block_line = key, ln
            elif key == "end":
                raise ParseError("'end' outside a block", ln, path)
            elif key == "mesh" or key == "reference-metric":
                if len(args) != 1:
                    raise ParseError(f"'{key}' takes one path", ln, path)
                once(key, ln)
                cfg[key] = base / args[0]
            elif key == "conformal":
                once(key, ln)
                if not args or args[0] not in CONFORMAL_SOURCES:
                    raise ParseError(f"conformal source must be one of {', '.join(CONFORMAL_SOURCES)}", ln, path)
                if args[0] == "file":
                    if len(args) != 2:
                        raise ParseError("'conformal file' takes one path", ln, path)
                    cfg["conformal_file"] = base / args[1]
                elif len(args) != 1:
                    raise ParseError(f"'conformal {args[0]}' takes no further arguments", ln, path)
                cfg["conformal"] = args[0]
            elif key == "boundary-rows":
                once(key, ln)
                if not args or any(a not in ("on", "off") for a in args):
                    raise ParseError("boundary-rows takes 'on' or 'off', once or per component", ln, path)
                sw = [a == "on" for a in args]
                cfg["boundary_rows"] = sw[0] if len(sw) == 1 else sw
            elif key == "objective":
                once(key, ln)
                if len(args) != 1:
                    raise ParseError("'objective' takes one name", ln, path)
                cfg["objective"] = args[0]
            else:
                raise ParseError(f"unknown key {key!r}", ln, path)
        elif key == "end":
            if args:
                raise ParseError("'end' takes no arguments", ln, path)
            block = None
        elif block == "constraints":
            if key == "point":
                if len(args) not in (1, 4):
                    raise ParseError("'point v [x y z]' expected", ln, path)
                v = _int(args[0], ln, path)
                if v in cfg_points:
                    raise ValidationError(f"{path or 'scene'}:{ln}: vertex {v} point-constrained twice")
                cfg_points[v] = None if len(args) == 1 else np.array(_floats(args[1:], 3, ln, path))
            elif key == "flux":
                if len(args) != 4:
                    raise ParseError("'flux v x y z' expected", ln, path)
                v = _int(args[0], ln, path)
                if v in fluxes:
                    raise ValidationError(f"{path or 'scene'}:{ln}: vertex {v} flux-constrained twice")
                fluxes[v] = np.array(_floats(args[1:], 3, ln, path))
            elif key == "scale":
                if len(args) not in (2, 3):
                    raise ParseError("'scale v value [vertex|link]' expected", ln, path)
                mode = args[2] if len(args) == 3 else "vertex"
                if mode not in ("vertex", "link"):
                    raise ParseError(f"unknown scale mode {mode!r}", ln, path)
                scales.append(ScaleConstraint(_int(args[0], ln, path), _floats(args[1:2], 1, ln, path)[0], mode))
            elif key in ("area", "volume"):
                once(key, ln)
                cfg[key] = measure(args, key, ln)
            elif key == "identify":
                if len(args) != 2:
                    raise ParseError("'identify a b' expected", ln, path)
                identify.append((_int(args[0], ln, path), _int(args[1], ln, path)))
            else:
                raise ParseError(f"unknown constraint {key!r}", ln, path)
        elif block == "solver":
            if key not in _SOLVER_KEYS or len(args) != 1:
                raise ParseError(f"unknown solver setting {key!r}", ln, path)
            name, typ = _SOLVER_KEYS[key]
            try:
                setattr(solver, name, typ(args[0]))
            except ValueError:
                raise ParseError(f"bad value for {key}", ln, path) from None
        elif block == "output":
            if key not in ("mesh", "report", "json", "multipliers") or len(args) != 1:
                raise ParseError(f"unknown output {key!r}", ln, path)
            outputs[key] = base / args[0]
    if block is not None:
        raise ParseError(f"block '{block}' is not closed with 'end'", block_line, path)
    if "mesh" not in cfg:
        raise ValidationError(f"{path or 'scene'}: no mesh given")

    return SceneConfig(
        mesh=cfg["mesh"],
        reference_metric=cfg.get("reference-metric"),
        conformal=cfg.get("conformal", "from-mesh"),
        conformal_file=cfg.get("conformal_file"),
        boundary_rows=cfg.get("boundary_rows", True),
        objective=cfg.get("objective", "willmore"),
        points=cfg_points,
        fluxes=fluxes,
        scales=scales,
        area=cfg.get("area"),
        volume=cfg.get("volume"),
        identify=identify,
        solver=solver,
        output_mesh=outputs.get("mesh"),
        output_report=outputs.get("report"),
        output_json=outputs.get("json"),
        output_multipliers=outputs.get("multipliers"),
    )


def load_scene(config: SceneConfig) -> Scene:
    """Read the referenced files and build a validated constraint set."""
    from . import geometry

    f, surface = read_obj(config.mesh)
    if config.reference_metric is not None:
        lam_ref = read_edge_table(config.reference_metric, surface)
    else:
        lam_ref = induced_metric(surface, f)
    if config.conformal == "from-mesh":
        cls = extended_cross_ratio(surface, induced_metric(surface, f))
    elif config.conformal == "from-reference":
        if config.reference_metric is None:
            raise ValidationError("conformal from-reference needs a reference-metric file")
        cls = extended_cross_ratio(surface, lam_ref)
    elif config.conformal == "file":
        cls = ConformalClass(read_edge_table(config.conformal_file, surface), source="user")
    else:
        cls = None

    for v in config.points:
        if not 0 <= v < surface.n_vertices:
            raise ValidationError(f"point constraint on unknown vertex {v}")
    points = {v: (f[v].copy() if p is None else np.asarray(p, dtype=float)) for v, p in config.points.items()}

    def measured(value, fn):
        return fn(surface, f) if value == "current" else value

    if config.volume is not None and not surface.is_closed:
        raise ValidationError("a volume constraint needs a closed surface")
    constraints = ConstraintSet(
        objective=config.objective,
        conformal=cls,
        boundary_rows=config.boundary_rows,
        points=points,
        fluxes=dict(config.fluxes),
        scales=list(config.scales),
        reference_metric=lam_ref if config.scales else None,
        area=measured(config.area, geometry.area) if config.area is not None else None,
        volume=measured(config.volume, geometry.volume) if config.volume is not None else None,
        identify=list(config.identify),
    )
    try:
        constraints.validate(surface)
    except UnbalancedFlux as exc:
        raise ValidationError(str(exc)) from exc
    return Scene(config, f, surface, lam_ref, constraints)


def read_scene(path) -> SceneConfig:
    """Parse and validate a scene file (the referenced mesh is read to check indices)."""
    path = Path(path)
    try:
        text = path.read_text()
    except OSError as exc:
        raise ParseError(f"cannot read scene: {exc.strerror}", None, path) from None
    config = parse_scene(text, path.parent, path)
    load_scene(config)
    return config


# -- reports ---------------------------------------------------------------------------


def _plain(x):
    """Convert numpy values to plain Python for serialization."""
    if isinstance(x, dict):
        return {str(k): _plain(v) for k, v in x.items()}
    if isinstance(x, (list, tuple)):
        return [_plain(v) for v in x]
    if isinstance(x, np.ndarray):
        return _plain(x.tolist())
    if isinstance(x, (np.bool_, bool)):
        return bool(x)
    if isinstance(x, np.integer):
        return int(x)
    if isinstance(x, (np.floating, float)):
        return float(x)
    return x


def _text_value(v) -> str:
    if v is None:
        return "none"
    if isinstance(v, bool):
        return "true" if v else "false"
    if isinstance(v, float):
        return fmt(v)
    if isinstance(v, list):
        if not v:
            return "[]"
        return " ".join(_text_value(x) for x in v)
    return str(v)


def _text_lines(d: dict, prefix: str = "") -> list[str]:
    out = []
    for k, v in d.items():
        name = f"{prefix}{k}"
        if isinstance(v, dict):
            out += _text_lines(v, name + ".")
        elif isinstance(v, list) and v and isinstance(v[0], (list, dict)):
            for i, item in enumerate(v):
                if isinstance(item, dict):
                    out += _text_lines(item, f"{name}.{i}.")
                else:
                    out.append(f"{name}.{i} {_text_value(item)}")
        else:
            out.append(f"{name} {_text_value(v)}")
    return out


def format_report(report: dict) -> str:
    """Line-oriented ``dotted.key value`` text."""
    return "\n".join(_text_lines(_plain(report))) + "\n"


def format_report_json(report: dict) -> str:
    return json.dumps(_plain(report), indent=2, allow_nan=True) + "\n"


def write_report(path, report: dict) -> None:
    path = Path(path)
    text = format_report_json(report) if path.suffix == ".json" else format_report(report)
    path.write_text(text)
