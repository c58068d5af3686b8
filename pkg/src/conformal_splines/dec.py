"""Discrete exterior calculus on a :class:`SimplicialSurface`.

Forms are plain numpy arrays with a trailing payload axis for vector values:

* primal 0-forms and dual 2-forms: one row per vertex,
* primal and dual 1-forms: one row per canonical edge, holding the value on
  the halfedge ``lo -> hi`` (the value on ``hi -> lo`` is its negative),
* edge 0-forms and edge 2-forms: one row per edge, no orientation.
"""

from __future__ import annotations

import numpy as np

from .mesh import SimplicialSurface


def d_primal0(surface: SimplicialSurface, phi: np.ndarray) -> np.ndarray:
    """``(d phi)_ij = phi_j - phi_i`` on canonical edges."""
    phi = np.asarray(phi, dtype=float)
    e = surface.edges
    return phi[e[:, 1]] - phi[e[:, 0]]


def d_dual1(surface: SimplicialSurface, tau: np.ndarray) -> np.ndarray:
    """Sum a dual 1-form over the halfedges leaving each vertex."""
    tau = np.asarray(tau, dtype=float)
    return surface.vertex_edge_incidence @ tau


def average(surface: SimplicialSurface, u: np.ndarray) -> np.ndarray:
    """Vertex values averaged onto edges, ``(u_i + u_j) / 2``."""
    u = np.asarray(u, dtype=float)
    e = surface.edges
    return 0.5 * (u[e[:, 0]] + u[e[:, 1]])


def average_adjoint(surface: SimplicialSurface, s: np.ndarray) -> np.ndarray:
    """Adjoint of :func:`average`: half the sum of incident edge values."""
    s = np.asarray(s, dtype=float)
    return 0.5 * (abs(surface.vertex_edge_incidence) @ s)


def wedge(alpha: np.ndarray, beta: np.ndarray, pairing: str = "product") -> np.ndarray:
    """Edgewise product of a primal and a dual 1-form.

    ``pairing`` selects how payloads combine: ``"product"`` (scalar times
    scalar or scalar times vector), ``"dot"`` or ``"cross"`` for two vector
    forms. Both factors flip sign under edge reversal, so the result is an
    unoriented edge 2-form.
    """
    alpha = np.asarray(alpha, dtype=float)
    beta = np.asarray(beta, dtype=float)
    if pairing == "product":
        if alpha.ndim == 1 and beta.ndim == 2:
            return alpha[:, None] * beta
        if alpha.ndim == 2 and beta.ndim == 1:
            return alpha * beta[:, None]
        return alpha * beta
    if pairing == "dot":
        return np.einsum("ei,ei->e", alpha, beta)
    if pairing == "cross":
        return np.cross(alpha, beta)
    raise ValueError(f"unknown pairing {pairing!r}")


def multiply_edge0(phi_e: np.ndarray, alpha: np.ndarray) -> np.ndarray:
    """Product of an edge 0-form with a dual 1-form (``(phi alpha)_ij``)."""
    phi_e = np.asarray(phi_e, dtype=float)
    alpha = np.asarray(alpha, dtype=float)
    if alpha.ndim == 2 and phi_e.ndim == 1:
        return phi_e[:, None] * alpha
    return phi_e * alpha


def circulation(surface: SimplicialSurface, omega: np.ndarray, face_cycle) -> np.ndarray:
    """Integrate a dual 1-form along a closed chain of faces.

    Consecutive faces must share an edge. Crossing from one face into the
    next adds the form's value on the shared edge, oriented as the halfedge
    appears in the face being entered; walking counterclockwise around a
    vertex (see :meth:`SimplicialSurface.vertex_face_cycle`) therefore gives
    :func:`d_dual1` at that vertex.
    """
    from .errors import OpenChain

    omega = np.asarray(omega, dtype=float)
    cycle = [int(f) for f in face_cycle]
    if len(cycle) < 2:
        raise OpenChain("a dual cycle needs at least two faces")
    total = np.zeros(omega.shape[1:])
    faces = surface.faces
    for a, b in zip(cycle, cycle[1:] + cycle[:1]):
        shared = set(faces[a].tolist()) & set(faces[b].tolist())
        if a == b or len(shared) != 2:
            raise OpenChain(f"faces {a} and {b} do not share an edge")
        fb = faces[b].tolist()
        # the halfedge of the shared edge as oriented inside face b
        for c in range(3):
            t, h = fb[c], fb[(c + 1) % 3]
            if t in shared and h in shared:
                break
        e = surface.edge_index(t, h)
        total = total + (1.0 if t < h else -1.0) * omega[e]
    return total
