from __future__ import annotations

import json
from pathlib import Path

import numpy as np
import pytest
from hypothesis import given
from hypothesis import strategies as st

from conformal_splines import build_surface, io, shapes
from conformal_splines.errors import NonTriangleFace, ParseError, ValidationError
from conformal_splines.solver import SolverOptions

from conftest import make, random_closed

# -- OBJ ------------------------------------------------------------------------------


@given(st.integers(0, 10_000))
def test_obj_round_trip_bit_identical(seed):
    f, s = random_closed(seed, 30)
    f = f * np.random.default_rng(seed).uniform(1e-3, 1e3)
    g, faces = io.parse_obj(io.format_obj(f, s))
    assert np.array_equal(g, f) and np.array_equal(faces, s.faces)


def test_obj_file_round_trip(tmp_path, tet):
    f, s = tet
    io.write_obj(tmp_path / "t.obj", f, s)
    g, t = io.read_obj(tmp_path / "t.obj")
    assert np.array_equal(g, f) and np.array_equal(t.faces, s.faces)


def test_obj_index_forms():
    text = "v 0 0 0\nv 1 0 0\nv 0 1 0\nvt 0 0\nvn 0 0 1\nf 1/1/1 2//1 -1\n"
    f, faces = io.parse_obj(text)
    assert f.shape == (3, 3) and faces.tolist() == [[0, 1, 2]]


def test_obj_quad_rejected():
    with pytest.raises(NonTriangleFace) as info:
        io.parse_obj("v 0 0 0\nv 1 0 0\nv 1 1 0\nv 0 1 0\nf 1 2 3 4\n")
    assert info.value.line == 5


@pytest.mark.parametrize(
    "text,line",
    [
        ("v 0 0\n", 1),
        ("v 0 0 x\n", 1),
        ("v 0 0 nan\n", 1),
        ("v 0 0 0\nv 1 0 0\nv 0 1 0\n\nf 1 2 4\n", 5),
        ("v 0 0 0\nv 1 0 0\nv 0 1 0\nf 0 1 2\n", 4),
        ("v 0 0 0\nv 1 0 0\nv 0 1 0\nf 1 a 3\n", 4),
    ],
)
def test_obj_parse_errors_carry_line(text, line):
    with pytest.raises(ParseError) as info:
        io.parse_obj(text)
    assert info.value.line == line


def test_obj_without_faces():
    with pytest.raises(ParseError):
        io.parse_obj("v 0 0 0\n")


def test_obj_nonmanifold_is_validation_error(tmp_path):
    p = tmp_path / "bad.obj"
    p.write_text("v 0 0 0\nv 1 0 0\nv 0 1 0\nv 0 0 1\nv 1 1 1\nf 1 2 3\nf 2 1 4\nf 1 2 5\n")
    with pytest.raises(ValidationError):
        io.read_obj(p)


def test_missing_file_is_parse_error(tmp_path):
    with pytest.raises(ParseError):
        io.read_obj(tmp_path / "nope.obj")


# -- edge tables ----------------------------------------------------------------------


def test_edge_table_round_trip(tmp_path, tet, rng):
    _, s = tet
    q = rng.normal(size=s.n_edges)
    io.write_edge_table(tmp_path / "q.txt", q, s)
    assert np.array_equal(io.read_edge_table(tmp_path / "q.txt", s), q)


@pytest.mark.parametrize(
    "body,exc",
    [
        ("1 0 0.5\n", ParseError),
        ("0 1\n", ParseError),
        ("0 1 x\n", ParseError),
        ("0 9 0.5\n", ParseError),
        ("0 1 0.5\n0 1 0.5\n", ParseError),
        ("0 1 inf\n", ParseError),
        ("0 1 0.5\n", ValidationError),
    ],
)
def test_edge_table_errors(tmp_path, tet, body, exc):
    _, s = tet
    p = tmp_path / "q.txt"
    p.write_text(body)
    with pytest.raises(exc):
        io.read_edge_table(p, s)


# -- scenes ---------------------------------------------------------------------------


@pytest.fixture
def sphere_dir(tmp_path):
    f, s = make(shapes.icosphere(1))
    io.write_obj(tmp_path / "sphere.obj", f, s)
    return tmp_path


def scene(body: str) -> str:
    return f"{io.SCENE_HEADER} {io.SCENE_VERSION}\nmesh sphere.obj\n{body}"


def test_minimal_scene_defaults(sphere_dir):
    c = io.parse_scene(scene(""), sphere_dir)
    assert c.mesh == sphere_dir / "sphere.obj"
    assert c.conformal == "from-mesh" and c.objective == "willmore" and c.boundary_rows is True
    assert c.solver == SolverOptions()
    r = c.resolved()
    assert r["points"] == {} and r["output"]["mesh"] is None
    assert set(r["solver"]) == set(SolverOptions.__dataclass_fields__)
    sc = io.load_scene(c)
    assert sc.surface.n_vertices == 42 and sc.constraints.conformal is not None


def test_full_scene(sphere_dir):
    text = scene(
        """# comment
objective willmore
constraints
  point 0
  point 3 0 0 1.2   # pulled
  flux 5 0 0 1
  flux 7 0 0 -1
  scale 1 0.25 link
  area current
end
solver
  tol 1e-8
  max-iters 50
end
output
  mesh out.obj
  report out.txt
end
"""
    )
    c = io.parse_scene(text, sphere_dir)
    assert c.points[0] is None and c.points[3].tolist() == [0.0, 0.0, 1.2]
    assert c.scales[0].mode == "link" and c.area == "current"
    assert c.solver.tol == 1e-8 and c.solver.max_iters == 50
    assert c.output_mesh == sphere_dir / "out.obj"
    sc = io.load_scene(c)
    assert np.array_equal(sc.constraints.points[0], sc.f[0])
    assert sc.constraints.area == pytest.approx(4 * np.pi, rel=0.1)


@pytest.mark.parametrize(
    "body",
    [
        "bogus 1\n",
        "constraints\npoint 0\n",
        "constraints\nflux 0 1 2\nend\n",
        "constraints\nscale 0 1 sideways\nend\n",
        "solver\ntol abc\nend\n",
        "output\nplot x.png\nend\n",
        "conformal sideways\n",
        "end\n",
    ],
)
def test_scene_parse_errors(sphere_dir, body):
    with pytest.raises(ParseError):
        io.parse_scene(scene(body), sphere_dir)


def test_scene_header_required(sphere_dir):
    with pytest.raises(ParseError):
        io.parse_scene("mesh sphere.obj\n", sphere_dir)
    with pytest.raises(ParseError):
        io.parse_scene(f"{io.SCENE_HEADER} 99\nmesh sphere.obj\n", sphere_dir)


def test_point_and_flux_conflict(sphere_dir):
    c = io.parse_scene(scene("constraints\npoint 2\nflux 2 0 0 1\nend\n"), sphere_dir)
    with pytest.raises(ValidationError):
        io.load_scene(c)


def test_flux_balancing_at_load(sphere_dir):
    ok = io.parse_scene(scene("constraints\nflux 0 0 0 1\nflux 3 0 0 -1\nend\n"), sphere_dir)
    io.load_scene(ok)
    bad = io.parse_scene(scene("constraints\nflux 0 0 0 1\nend\n"), sphere_dir)
    with pytest.raises(ValidationError):
        io.load_scene(bad)


def test_scene_unknown_vertex(sphere_dir):
    c = io.parse_scene(scene("constraints\npoint 500\nend\n"), sphere_dir)
    with pytest.raises(ValidationError):
        io.load_scene(c)


def test_read_scene_missing(tmp_path):
    with pytest.raises(ParseError):
        io.read_scene(tmp_path / "nope.scene")


# -- reports --------------------------------------------------------------------------


def test_report_text_format():
    rep = {"a": {"b": 0.1, "c": [1, 2.5], "d": []}, "ok": np.bool_(True), "n": None, "rows": [[1, 2], [3, 4]]}
    assert io.format_report(rep) == "a.b 0.1\na.c 1 2.5\na.d []\nok true\nn none\nrows.0 1 2\nrows.1 3 4\n"


@given(st.floats(allow_nan=False, allow_infinity=False))
def test_report_floats_round_trip(x):
    line = io.format_report({"x": np.float64(x)})
    assert float(line.split()[1]) == x
    assert json.loads(io.format_report_json({"x": np.float64(x)}))["x"] == x


def test_write_report_picks_format(tmp_path):
    rep = {"a": np.arange(3)}
    io.write_report(tmp_path / "r.json", rep)
    io.write_report(tmp_path / "r.txt", rep)
    assert json.loads((tmp_path / "r.json").read_text()) == {"a": [0, 1, 2]}
    assert (tmp_path / "r.txt").read_text() == "a 0 1 2\n"
