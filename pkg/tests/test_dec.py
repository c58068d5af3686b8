from __future__ import annotations

import numpy as np
from hypothesis import given
from hypothesis import strategies as st

from conformal_splines import build_surface
from conformal_splines.dec import (
    average,
    average_adjoint,
    circulation,
    d_dual1,
    d_primal0,
    multiply_edge0,
    wedge,
)
from conformal_splines.diagnostics import leibniz_residual

from conftest import random_annulus, random_closed, random_disk


def test_d_of_constant_vanishes(tet):
    _, s = tet
    assert np.all(d_primal0(s, np.full(4, 3.5)) == 0.0)


def test_d_of_index_on_triangle():
    s = build_surface([[0, 1, 2]], 3)
    d = d_primal0(s, np.arange(3.0))
    assert d[s.edge_index(0, 1)] == 1.0


def test_dd_vanishes_around_faces(tet, rng):
    _, s = tet
    d = d_primal0(s, rng.normal(size=4))
    total = (s.face_edge_signs * d[s.face_edges]).sum(axis=1)
    assert np.abs(total).max() < 1e-14


def test_d_dual1_zero_form(tet):
    _, s = tet
    assert np.all(d_dual1(s, np.zeros((6, 3))) == 0.0)


@given(st.integers(0, 10_000))
def test_d_dual1_sums_to_zero_on_closed(seed):
    _, s = random_closed(seed, n=40)
    tau = np.random.default_rng(seed).normal(size=(s.n_edges, 3))
    assert np.abs(d_dual1(s, tau).sum(axis=0)).max() < 1e-12


def test_d_dual1_brute_force(rng):
    f, s = random_closed(3, n=60)
    c = rng.normal(size=3)
    e = s.edges
    tau = (f[e[:, 0]] + f[e[:, 1]]) @ c
    brute = np.zeros(s.n_vertices)
    for k, (i, j) in enumerate(e):
        brute[i] += tau[k]  # halfedge i -> j carries +tau on the canonical edge
        brute[j] -= tau[k]
    assert np.abs(d_dual1(s, tau) - brute).max() < 1e-13


def test_average_examples():
    s = build_surface([[0, 1, 2]], 3)
    assert np.allclose(average(s, np.full(3, 2.0)), 2.0)
    u = np.array([0.0, 2.0, 5.0])
    assert average(s, u)[s.edge_index(0, 1)] == 1.0


@given(st.integers(0, 10_000))
def test_average_adjoint_identity(seed):
    rng = np.random.default_rng(seed)
    _, s = random_closed(seed % 7, n=30)
    u = rng.normal(size=s.n_vertices)
    w = rng.normal(size=s.n_edges)
    lhs = average(s, u) @ w
    rhs = u @ average_adjoint(s, w)
    assert abs(lhs - rhs) <= 1e-13 * (abs(lhs) + 1.0)


def test_wedge_zero_and_orientation(rng):
    a = rng.normal(size=(5, 3))
    b = rng.normal(size=(5, 3))
    assert np.all(wedge(np.zeros(5), b) == 0.0)
    for pairing in ("dot", "cross"):
        assert np.array_equal(wedge(a, b, pairing), wedge(-a, -b, pairing))
    x = rng.normal(size=5)
    assert np.array_equal(wedge(x, b), wedge(-x, -b))


def _leibniz_pieces(s, phi, alpha):
    lhs = d_dual1(s, multiply_edge0(average(s, phi), alpha))
    rhs = phi[:, None] * d_dual1(s, alpha) + average_adjoint(s, wedge(d_primal0(s, phi), alpha))
    return lhs, rhs


@given(st.integers(0, 10_000), st.sampled_from(["closed", "disk", "annulus"]))
def test_leibniz_rule(seed, kind):
    rng = np.random.default_rng(seed)
    _, s = {"closed": lambda: random_closed(seed, 50), "disk": lambda: random_disk(seed), "annulus": lambda: random_annulus(seed)}[kind]()
    phi = rng.normal(size=s.n_vertices)
    alpha = rng.normal(size=(s.n_edges, 3))
    lhs, rhs = _leibniz_pieces(s, phi, alpha)
    assert np.abs(lhs - rhs).max() <= 1e-12 * np.abs(lhs).max()
    assert leibniz_residual(s, phi, alpha[:, 0]) <= 1e-12


def test_circulation_around_vertex_is_d_dual1(rng):
    _, s = random_closed(5, n=40)
    tau = rng.normal(size=(s.n_edges, 3))
    d = d_dual1(s, tau)
    for v in (0, 7, 13):
        assert np.abs(circulation(s, tau, s.vertex_face_cycle(v)) - d[v]).max() < 1e-13
