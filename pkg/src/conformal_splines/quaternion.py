"""Quaternion arithmetic on arrays and the circle/sphere kernel built on it.

Quaternions are arrays with a trailing axis of length 4 ordered
``(real, i, j, k)``. Vectors of R^3 are identified with imaginary
quaternions.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .errors import CoincidentPoints, DegenerateTriangle

# |sin beta| below this flags a degenerate (concircular) edge configuration
DEGENERACY_EPS = 1e-6
COLLINEAR_TOL = 1e-12


def qmul(p: np.ndarray, q: np.ndarray) -> np.ndarray:
    p = np.asarray(p, dtype=float)
    q = np.asarray(q, dtype=float)
    pw, pv = p[..., 0], p[..., 1:]
    qw, qv = q[..., 0], q[..., 1:]
    w = pw * qw - np.einsum("...i,...i->...", pv, qv)
    v = pw[..., None] * qv + qw[..., None] * pv + np.cross(pv, qv)
    return np.concatenate([w[..., None], v], axis=-1)


def pure(v: np.ndarray) -> np.ndarray:
    v = np.asarray(v, dtype=float)
    return np.concatenate([np.zeros(v.shape[:-1] + (1,)), v], axis=-1)


def conj(q: np.ndarray) -> np.ndarray:
    q = np.asarray(q, dtype=float)
    return np.concatenate([q[..., :1], -q[..., 1:]], axis=-1)


def qnorm(q: np.ndarray) -> np.ndarray:
    return np.linalg.norm(q, axis=-1)


def qinv(q: np.ndarray) -> np.ndarray:
    q = np.asarray(q, dtype=float)
    return conj(q) / np.einsum("...i,...i->...", q, q)[..., None]


def vinv(x: np.ndarray) -> np.ndarray:
    """Quaternionic inverse of an imaginary quaternion, ``-x / |x|^2``."""
    x = np.asarray(x, dtype=float)
    return -x / np.einsum("...i,...i->...", x, x)[..., None]


def unit(x: np.ndarray) -> np.ndarray:
    x = np.asarray(x, dtype=float)
    return x / np.linalg.norm(x, axis=-1, keepdims=True)


def product_of_units(*vectors: np.ndarray) -> np.ndarray:
    """Quaternion product of the normalized vectors, in order."""
    q = pure(unit(vectors[0]))
    for v in vectors[1:]:
        q = qmul(q, pure(unit(v)))
    return q


def circumcircle_tangent(fi, fj, fk) -> np.ndarray:
    """Unit tangent at ``fi`` of the circle through ``fi, fj, fk`` (in that order).

    Computed as the product of the normalized edge vectors around the
    triangle, which is an imaginary unit quaternion.
    """
    fi, fj, fk = (np.asarray(x, dtype=float) for x in (fi, fj, fk))
    a, b, c = fj - fi, fk - fj, fi - fk
    lmax = np.max(np.stack([np.linalg.norm(x, axis=-1) for x in (a, b, c)]), axis=0)
    area2 = np.linalg.norm(np.cross(a, -c), axis=-1)
    if np.any(0.5 * area2 < COLLINEAR_TOL * lmax**2):
        raise DegenerateTriangle("points are collinear")
    return product_of_units(a, b, c)[..., 1:]


@dataclass(frozen=True)
class EdgeCircleData:
    """Circle intersection data for a batch of edge stencils.

    ``normal_i`` and ``normal_j`` are the unit normals of the sphere through
    the four stencil points at the edge endpoints; they are zero where
    ``degenerate`` is set. ``h`` is that sphere's mean curvature.
    """

    beta: np.ndarray
    normal_i: np.ndarray
    normal_j: np.ndarray
    h: np.ndarray
    degenerate: np.ndarray
    sin_beta: np.ndarray


def edge_circle_data(fi, fl, fj, fk, eps: float = DEGENERACY_EPS) -> EdgeCircleData:
    """Intersection angle of the circles ``(fi, fj, fk)`` and ``(fj, fi, fl)``.

    Inputs broadcast over leading axes. The angle is taken from the real part
    of the normalized cross ratio ``df_il df_lj df_jk df_ki``; its imaginary
    part gives the sphere normal at ``fi`` and the cyclically shifted product
    gives the normal at ``fj``.
    """
    fi, fl, fj, fk = (np.asarray(x, dtype=float) for x in (fi, fl, fj, fk))
    a, b, c, d = fl - fi, fj - fl, fk - fj, fi - fk
    e = fj - fi
    for x in (a, b, c, d, e):
        if np.any(np.linalg.norm(x, axis=-1) == 0.0):
            raise CoincidentPoints("stencil contains coincident points")

    q = product_of_units(a, b, c, d)
    qs = product_of_units(c, d, a, b)
    beta = np.arccos(np.clip(-q[..., 0], -1.0, 1.0))
    sin_i = np.linalg.norm(q[..., 1:], axis=-1)
    sin_j = np.linalg.norm(qs[..., 1:], axis=-1)
    degenerate = np.abs(np.sin(beta)) < eps
    safe_i = np.where(degenerate, 1.0, sin_i)
    safe_j = np.where(degenerate, 1.0, sin_j)
    ni = np.where(degenerate[..., None], 0.0, q[..., 1:] / safe_i[..., None])
    nj = np.where(degenerate[..., None], 0.0, qs[..., 1:] / safe_j[..., None])
    h = 2.0 * np.einsum("...i,...i->...", ni, vinv(e))
    return EdgeCircleData(beta=beta, normal_i=ni, normal_j=nj, h=h, degenerate=degenerate, sin_beta=sin_i)
