from __future__ import annotations

import json
import subprocess
import sys

import numpy as np
import pytest

from conformal_splines import io, shapes
from conformal_splines.cli import EXIT_INPUT, EXIT_NUMERICAL, EXIT_OK, main

from conftest import make
from scenes import ICOSAHEDRON


def run(capsys, *argv):
    code = main([str(a) for a in argv])
    out = capsys.readouterr()
    return code, out.out, out.err


def values(text: str) -> dict:
    return dict(line.split(" ", 1) for line in text.splitlines())


@pytest.fixture
def grid_scene(tmp_path):
    f, s = make(shapes.grid(6, 6))
    io.write_obj(tmp_path / "grid.obj", f, s)
    pts = "\n".join(f"  point {v}" for v in shapes.grid_corners(6, 6))
    (tmp_path / "grid.scene").write_text(
        f"{io.SCENE_HEADER} {io.SCENE_VERSION}\nmesh grid.obj\nconstraints\n{pts}\nend\n"
        "solver\n  tol 1e-10\n  tol-constraint 1e-10\nend\n"
        "output\n  mesh out.obj\n  report out.txt\n  json out.json\n  multipliers q.txt\nend\n"
    )
    return tmp_path


@pytest.fixture
def pulled_scene(tmp_path):
    f, s = make(shapes.icosphere(2))
    io.write_obj(tmp_path / "sphere.obj", f, s)
    pts = "\n".join(
        f"  point {v} " + " ".join(io.fmt(x) for x in 1.3 * f[v]) if v in (0, 3) else f"  point {v}" for v in ICOSAHEDRON
    )
    (tmp_path / "pulled.scene").write_text(
        f"{io.SCENE_HEADER} {io.SCENE_VERSION}\nmesh sphere.obj\nconstraints\n{pts}\nend\n"
        "output\n  mesh out.obj\n  report out.txt\nend\n"
    )
    return tmp_path


def test_energy_tetrahedron(tmp_path, tet, capsys):
    f, s = tet
    io.write_obj(tmp_path / "tet.obj", f, s)
    code, out, _ = run(capsys, "energy", tmp_path / "tet.obj")
    v = values(out)
    assert code == EXIT_OK
    assert abs(float(v["willmore.total"])) <= 1e-10
    assert v["mesh.vertices"] == "4" and v["mesh.genus"] == "0"


def test_energy_json(tmp_path, capsys):
    f, s = make(shapes.icosphere(1))
    f[0] *= 1.3
    io.write_obj(tmp_path / "s.obj", f, s)
    code, out, _ = run(capsys, "energy", tmp_path / "s.obj", "--json")
    rep = json.loads(out)
    assert code == EXIT_OK and rep["willmore"]["total"] > 0
    assert rep["willmore"]["vertex_max"] >= rep["willmore"]["vertex_min"]


def test_check_passes(tmp_path, capsys):
    f, s = make(shapes.icosphere(2))
    f = f + 0.05 * np.random.default_rng(0).normal(size=f.shape)
    io.write_obj(tmp_path / "s.obj", f, s)
    code, out, _ = run(capsys, "check", tmp_path / "s.obj")
    v = values(out)
    assert code == EXIT_OK
    assert v["passed.conservation"] == v["passed.leibniz"] == v["passed.kernel"] == "true"


def test_solve_flat_grid(grid_scene, capsys):
    code, out, _ = run(capsys, "solve", grid_scene / "grid.scene")
    v = values(out)
    assert code == EXIT_OK
    assert v["solver.converged"] == "true" and int(v["solver.iterations"]) <= 2
    assert (grid_scene / "out.txt").read_text() == out
    rep = json.loads((grid_scene / "out.json").read_text())
    assert rep["config"]["solver"]["tol"] == 1e-10
    assert rep["solver"]["residual_norm"] < 1e-10
    g, _ = io.read_obj(grid_scene / "out.obj")
    assert g.shape == (49, 3)
    assert (grid_scene / "q.txt").exists()


def test_solve_is_byte_deterministic(pulled_scene, capsys):
    outputs = []
    for _ in range(2):
        code, out, _ = run(capsys, "solve", pulled_scene / "pulled.scene")
        assert code == EXIT_OK
        outputs.append((out, (pulled_scene / "out.obj").read_bytes(), (pulled_scene / "out.txt").read_bytes()))
    assert outputs[0] == outputs[1]


def test_numerical_failure_exit_code(pulled_scene, capsys):
    text = (pulled_scene / "pulled.scene").read_text() + "solver\n  max-iters 1\nend\n"
    (pulled_scene / "short.scene").write_text(text)
    code, out, err = run(capsys, "solve", pulled_scene / "short.scene")
    assert code == EXIT_NUMERICAL
    assert values(out)["failure.type"] == "MaxIterations"
    assert "error:" in err
    assert (pulled_scene / "out.obj").exists()


@pytest.mark.parametrize(
    "argv",
    [
        ["energy", "missing.obj"],
        ["solve", "missing.scene"],
        ["solve", "bad.scene"],
        ["energy", "quad.obj"],
    ],
)
def test_input_error_exit_code(tmp_path, capsys, argv):
    (tmp_path / "bad.scene").write_text("not a scene\n")
    (tmp_path / "quad.obj").write_text("v 0 0 0\nv 1 0 0\nv 1 1 0\nv 0 1 0\nf 1 2 3 4\n")
    code, _, err = run(capsys, argv[0], tmp_path / argv[1])
    assert code == EXIT_INPUT and err.startswith("error:")


def test_qc_error_against_itself(tmp_path, capsys):
    f, s = make(shapes.icosphere(1))
    io.write_obj(tmp_path / "s.obj", f, s)
    code, out, _ = run(capsys, "qc-error", tmp_path / "s.obj", "--reference", tmp_path / "s.obj", "--bins", 4)
    v = values(out)
    assert code == EXIT_OK and float(v["quasi_conformal.max"]) == pytest.approx(1.0, abs=1e-12)


def test_qc_error_connectivity_mismatch(tmp_path, capsys):
    f, s = make(shapes.icosphere(1))
    g, t = make(shapes.icosphere(2))
    io.write_obj(tmp_path / "a.obj", f, s)
    io.write_obj(tmp_path / "b.obj", g, t)
    code, _, _ = run(capsys, "qc-error", tmp_path / "a.obj", "--reference", tmp_path / "b.obj")
    assert code == EXIT_INPUT


def test_tube_command(tmp_path, capsys):
    code, out, _ = run(capsys, "tube", "--curve", "circle", "--samples", 64, "--thickness", 0.1, "--output", tmp_path / "t.obj")
    v = values(out)
    assert code == EXIT_OK and v["invariants.theta"] == "0.0"
    assert float(v["invariants.im_tau"]) == pytest.approx(float(v["invariants.length"]) / 0.1, rel=1e-12)
    _, t = io.read_obj(tmp_path / "t.obj")
    assert t.genus == 1


def test_flux_report(grid_scene, capsys):
    assert run(capsys, "solve", grid_scene / "grid.scene", "--quiet")[0] == EXIT_OK
    (grid_scene / "cycles.txt").write_text("vertex 24\n")
    code, out, _ = run(
        capsys, "flux-report", grid_scene / "out.obj", "--multipliers", grid_scene / "q.txt", "--cycles", grid_scene / "cycles.txt"
    )
    assert code == EXIT_OK
    flux = np.array(values(out)["cycles.0.flux"].split(), dtype=float)
    assert np.abs(flux).max() < 1e-8


def test_module_entry_point():
    r = subprocess.run([sys.executable, "-m", "conformal_splines", "--help"], capture_output=True, text=True)
    assert r.returncode == 0 and "flux-report" in r.stdout
