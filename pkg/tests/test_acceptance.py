"""Acceptance criteria, each at its stated tolerance.

Tests are named ``test_criterion_NN_*``; the session summary prints one
PASS/FAIL line per criterion (see ``conftest.pytest_terminal_summary``).
"""

from __future__ import annotations

import time

import numpy as np
import pytest

from conformal_splines import geometry, io, shapes
from conformal_splines.cli import main
from conformal_splines.conformal import (
    conformal_rescale,
    cross_ratio_matrix,
    induced_metric,
    quasi_conformal_error,
    scale_factors,
)
from conformal_splines.dec import d_dual1
from conformal_splines.diagnostics import (
    TubeSpec,
    circle_curve,
    conservation_report,
    generate_tube,
    kernel_dimension,
    leibniz_residual,
    spherical_curve,
    tube_invariants,
)
from conformal_splines.quaternion import edge_circle_data
from conformal_splines.solver import SolverOptions, newton_solve, qd_vertex_sums
from conformal_splines.willmore import willmore_energy, willmore_flux

from conftest import make, random_annulus, random_closed, random_disk
from scenes import ICOSAHEDRON, flat_grid, icosphere_points, ornament, permute, scale_region

IDS = ("tau", "sigma", "rho", "zeta")


def bounded_meshes():
    return [random_disk(seed) for seed in range(6)] + [random_annulus(seed) for seed in range(6)]


# -- 1 --------------------------------------------------------------------------------


def test_criterion_01_conservation_identities():
    start = time.perf_counter()
    worst = 0.0
    for seed in range(20):
        f, s = random_closed(seed, 500)
        assert s.n_vertices == 500
        rep = conservation_report(s, f)
        worst = max(worst, *(rep[k] for k in IDS))
    elapsed = time.perf_counter() - start
    print(f"max relative residual {worst:.3e}, {elapsed:.2f} s")
    assert worst <= 1e-9
    assert elapsed < 10.0


# -- 2 --------------------------------------------------------------------------------


def test_criterion_02_gradient_finite_differences():
    f, s = random_closed(2, 200)
    grad = d_dual1(s, willmore_flux(s, f))
    rng = np.random.default_rng(2)
    h = 1e-5
    worst = 0.0
    for _ in range(50):
        v = rng.normal(size=f.shape)
        v /= np.linalg.norm(v)
        fd = (willmore_energy(s, f + h * v).total - willmore_energy(s, f - h * v).total) / (2 * h)
        lin = float(np.sum(grad * v))
        worst = max(worst, abs(fd - lin) / abs(lin))
    print(f"max relative difference {worst:.3e}")
    assert worst <= 1e-5


# -- 3 --------------------------------------------------------------------------------


def test_criterion_03_regular_tetrahedron(tet):
    f, s = tet
    w = willmore_energy(s, f)
    assert np.abs(w.beta - 2 * np.pi / 3).max() <= 1e-12
    assert abs(w.total) <= 1e-10


def test_criterion_03_planar_delaunay_grid():
    f, s = make(shapes.grid(8, 8))
    w = willmore_energy(s, f)
    assert np.abs(w.integrand[s.is_interior_vertex]).max() <= 1e-9


def test_criterion_03_concircular_quad():
    cd = edge_circle_data([0, 0, 0], [1, 0, 0], [1, 1, 0], [0, 1, 0])
    assert abs(cd.beta) < 1e-7 and cd.degenerate


# -- 4 --------------------------------------------------------------------------------


def test_criterion_04_kernel_dimension():
    for f, s in bounded_meshes():
        assert s.n_edges <= 300
        k = kernel_dimension(s, rtol=1e-9)
        assert k["checked"] and k["dimension"] == k["expected"]


def test_criterion_04_rescaling_both_directions():
    rng = np.random.default_rng(4)
    for f, s in bounded_meshes():
        lam = induced_metric(s, f)
        C = cross_ratio_matrix(s)
        u = 0.01 * rng.normal(size=s.n_vertices)
        for vs in s.boundary_vertex_sets:
            u[vs] = 0.01 * rng.normal()
        assert np.abs(C @ conformal_rescale(s, lam, u) - C @ lam).max() <= 1e-12
        w = u.copy()
        w[s.boundary_vertex_sets[0][0]] += 0.005
        assert np.abs((C @ conformal_rescale(s, lam, w) - C @ lam)[s.boundary_edges]).max() > 1e-3


# -- 5 --------------------------------------------------------------------------------


def test_criterion_05_multiplier_sums():
    rng = np.random.default_rng(5)
    meshes = [random_closed(seed, 100) for seed in range(5)] + bounded_meshes()
    for f, s in meshes:
        q = cross_ratio_matrix(s).T @ rng.normal(size=s.n_edges)
        vsum, bsum = qd_vertex_sums(s, q)
        assert np.abs(vsum).max(initial=0.0) <= 1e-12
        assert np.abs(bsum).max(initial=0.0) <= 1e-12


# -- 6 --------------------------------------------------------------------------------


def test_criterion_06_leibniz_rule():
    rng = np.random.default_rng(6)
    meshes = [random_closed(seed, 100) for seed in range(5)] + bounded_meshes()
    for f, s in meshes:
        phi = rng.normal(size=s.n_vertices)
        assert leibniz_residual(s, phi, rng.normal(size=s.n_edges)) <= 1e-12
        assert leibniz_residual(s, phi, rng.normal(size=(s.n_edges, 3))) <= 1e-12


# -- 7 --------------------------------------------------------------------------------


def test_criterion_07_flat_grid():
    f, s, cons = flat_grid()
    st = newton_solve(s, f, cons, SolverOptions(tol=1e-10, tol_constraint=1e-10))
    print(f"flat grid: {st.iterations} iterations, residual {st.residual_norm:.3e}")
    assert st.converged and st.iterations <= 2 and st.residual_norm < 1e-10


def _check_balanced_solve(s, cons, st):
    nus = np.array([st.fluxes[v] for v in sorted(st.fluxes)])
    scale = np.abs(nus).max()
    total = np.linalg.norm(nus.sum(axis=0))
    print(f"{st.iterations} iterations, EL residual {st.stationarity_norm:.3e}, flux sum {total:.3e}, max flux {scale:.3e}")
    assert st.converged and st.stationarity_norm < 1e-6
    assert total <= 1e-8 * scale or scale == 0.0


def test_criterion_07_icosphere_points():
    f, s, cons = icosphere_points(2)
    _check_balanced_solve(s, cons, newton_solve(s, f, cons))


@pytest.mark.slow
def test_criterion_07_pulled_icosphere_2562_vertices():
    f, s, cons = icosphere_points(4, 1.3)
    assert s.n_vertices <= 5000
    start = time.perf_counter()
    st = newton_solve(s, f, cons)
    elapsed = time.perf_counter() - start
    print(f"{s.n_vertices} vertices, {elapsed:.1f} s")
    _check_balanced_solve(s, cons, st)
    assert max(np.abs(nu).max() for nu in st.fluxes.values()) > 1.0
    assert elapsed < 300.0


# -- 8 --------------------------------------------------------------------------------


def test_criterion_08_zero_scale_region():
    f, s, cons, region = scale_region()
    opts = SolverOptions()
    st = newton_solve(s, f, cons, opts)
    lam = induced_metric(s, st.f)
    inside = np.all(np.isin(s.edges, region), axis=1)
    dev = np.abs(lam - cons.reference_metric)[inside].max()
    u = scale_factors(s, lam, cons.reference_metric)
    print(f"{st.iterations} iterations, max |u| in region {np.abs(u[region]).max():.3e}, edge deviation {dev:.3e}")
    assert st.converged
    assert np.abs(u[region]).max() <= opts.tol_constraint
    assert dev <= opts.tol_constraint


@pytest.mark.slow
def test_criterion_08_link_mode_ornament():
    f, s, half = ornament(4, 0.5)
    st = newton_solve(s, f, half)
    _, _, full = ornament(4, 1.0)
    st = newton_solve(s, st.f, full)
    q = quasi_conformal_error(s, st.f, full.reference_metric)
    link = np.any(np.isin(s.faces, ICOSAHEDRON), axis=1)
    ratio = q[link].max() / np.median(q)
    print(f"{st.iterations} iterations after continuation, max Q in link region / median Q = {ratio:.3f}")
    assert st.converged
    assert ratio <= 1.5


# -- 9 --------------------------------------------------------------------------------


def test_criterion_09_circle_tube_area_volume():
    R, a = 1.0, 0.1
    spec = TubeSpec(circle_curve(256, R), a, m=64)
    f, s = generate_tube(spec)
    inv = tube_invariants(spec)
    L = 2 * np.pi * R
    assert geometry.area(s, f) == pytest.approx(2 * np.pi * a * L, rel=0.02)
    assert geometry.volume(s, f) == pytest.approx(np.pi * a**2 * L, rel=0.02)
    assert inv.area == pytest.approx(2 * np.pi * a * L, rel=0.02)
    assert inv.volume == pytest.approx(np.pi * a**2 * L, rel=0.02)


def test_criterion_09_planar_torsion():
    t = 2 * np.pi * np.arange(120) / 120
    wavy = np.stack([2 * np.cos(t), np.sin(t) + 0.3 * np.sin(3 * t), np.zeros_like(t)], axis=1)
    for c in (circle_curve(64), wavy):
        assert tube_invariants(TubeSpec(c, 0.05)).theta == 0.0


def test_criterion_09_spherical_torsion():
    theta = tube_invariants(TubeSpec(spherical_curve(1024), 0.05)).theta
    assert abs((theta + np.pi) % (2 * np.pi) - np.pi) <= 1e-3


def test_criterion_09_im_tau():
    a = 0.2
    inv = tube_invariants(TubeSpec(circle_curve(100, 1.5), a))
    assert abs(inv.im_tau - inv.length / a) <= 1e-12 * inv.im_tau


# -- 10 -------------------------------------------------------------------------------


def test_criterion_10_cli_byte_identical(tmp_path, capsys):
    f, s = make(shapes.icosphere(2))
    io.write_obj(tmp_path / "sphere.obj", f, s)
    pts = "\n".join(
        f"point {v} " + " ".join(io.fmt(x) for x in 1.3 * f[v]) if v in (0, 3) else f"point {v}" for v in ICOSAHEDRON
    )
    (tmp_path / "s.scene").write_text(
        f"{io.SCENE_HEADER} {io.SCENE_VERSION}\nmesh sphere.obj\nconstraints\n{pts}\nend\n"
        "output\nmesh out.obj\nreport out.txt\njson out.json\nmultipliers q.txt\nend\n"
    )
    runs = []
    for _ in range(2):
        assert main(["solve", str(tmp_path / "s.scene")]) == 0
        out = capsys.readouterr().out
        runs.append([out] + [(tmp_path / n).read_bytes() for n in ("out.obj", "out.txt", "out.json", "q.txt")])
    assert runs[0] == runs[1]


def test_criterion_10_permutation():
    f, s, cons = icosphere_points(2, 1.3)
    opts = SolverOptions(tol=1e-10, tol_constraint=1e-12)
    a = newton_solve(s, f, cons, opts)
    perm = np.random.default_rng(10).permutation(len(f))
    g, t, c2 = permute(f, s, cons, perm)
    b = newton_solve(t, g, c2, opts)
    diff = np.abs(b.f[perm] - a.f).max()
    print(f"max difference up to permutation {diff:.3e}")
    assert diff <= 1e-10
