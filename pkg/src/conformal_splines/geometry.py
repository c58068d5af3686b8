"""Total area and enclosed volume with first and second derivatives."""

from __future__ import annotations

import numpy as np
import scipy.sparse as sp

from .errors import SurfaceHasBoundary
from .mesh import SimplicialSurface
from .willmore import assemble_point_hessian


def _skew(v: np.ndarray) -> np.ndarray:
    z = np.zeros(v.shape[:-1])
    return np.stack(
        [
            np.stack([z, -v[..., 2], v[..., 1]], axis=-1),
            np.stack([v[..., 2], z, -v[..., 0]], axis=-1),
            np.stack([-v[..., 1], v[..., 0], z], axis=-1),
        ],
        axis=-2,
    )


def area(surface: SimplicialSurface, f: np.ndarray) -> float:
    f = np.asarray(f, dtype=float)
    fi, fj, fk = (f[surface.faces[:, c]] for c in range(3))
    return float(0.5 * np.linalg.norm(np.cross(fj - fi, fk - fi), axis=1).sum())


def volume(surface: SimplicialSurface, f: np.ndarray) -> float:
    if not surface.is_closed:
        raise SurfaceHasBoundary("enclosed volume needs a closed surface")
    f = np.asarray(f, dtype=float)
    fi, fj, fk = (f[surface.faces[:, c]] for c in range(3))
    return float(np.einsum("ij,ij->i", fi, np.cross(fj, fk)).sum() / 6.0)


def area_gradient(surface: SimplicialSurface, f: np.ndarray) -> np.ndarray:
    f = np.asarray(f, dtype=float)
    fi, fj, fk = (f[surface.faces[:, c]] for c in range(3))
    n = np.cross(fj - fi, fk - fi)
    nhat = n / np.linalg.norm(n, axis=1, keepdims=True)
    # d|N|/2 wrt each corner: 0.5 * nhat x (opposite edge, oriented)
    g = np.stack([np.cross(nhat, fk - fj), np.cross(nhat, fi - fk), np.cross(nhat, fj - fi)], axis=1) * 0.5
    out = np.zeros_like(f)
    np.add.at(out, surface.faces.reshape(-1), g.reshape(-1, 3))
    return out


def volume_gradient(surface: SimplicialSurface, f: np.ndarray) -> np.ndarray:
    if not surface.is_closed:
        raise SurfaceHasBoundary("enclosed volume needs a closed surface")
    f = np.asarray(f, dtype=float)
    fi, fj, fk = (f[surface.faces[:, c]] for c in range(3))
    g = np.stack([np.cross(fj, fk), np.cross(fk, fi), np.cross(fi, fj)], axis=1) / 6.0
    out = np.zeros_like(f)
    np.add.at(out, surface.faces.reshape(-1), g.reshape(-1, 3))
    return out


def area_hessian(surface: SimplicialSurface, f: np.ndarray) -> sp.csr_matrix:
    f = np.asarray(f, dtype=float)
    fi, fj, fk = (f[surface.faces[:, c]] for c in range(3))
    e1, e2 = fj - fi, fk - fi
    n = np.cross(e1, e2)
    nn = np.linalg.norm(n, axis=1)
    nhat = n / nn[:, None]
    # dN/de1 = -[e2]x, dN/de2 = [e1]x
    dN = [-_skew(e2), _skew(e1)]
    proj = (np.eye(3) - nhat[:, :, None] * nhat[:, None, :]) / nn[:, None, None]
    He = np.zeros((surface.n_faces, 2, 2, 3, 3))
    for x in range(2):
        for y in range(2):
            He[:, x, y] = np.swapaxes(dN[x], 1, 2) @ proj @ dN[y]
    # second derivative of N is the Levi-Civita symbol contracted with nhat
    cross = -_skew(nhat)
    He[:, 0, 1] += cross
    He[:, 1, 0] += np.swapaxes(cross, 1, 2)
    He *= 0.5
    # e1 = fj - fi, e2 = fk - fi  in points (i, j, k)
    M = np.array([[-1.0, 1.0, 0.0], [-1.0, 0.0, 1.0]])
    Hp = np.einsum("xP,yQ,nxyab->nPQab", M, M, He)
    return assemble_point_hessian(surface.n_vertices, surface.faces, Hp)


def volume_hessian(surface: SimplicialSurface, f: np.ndarray) -> sp.csr_matrix:
    if not surface.is_closed:
        raise SurfaceHasBoundary("enclosed volume needs a closed surface")
    f = np.asarray(f, dtype=float)
    faces = surface.faces
    p = [f[faces[:, c]] for c in range(3)]
    H = np.zeros((len(faces), 3, 3, 3, 3))
    for c in range(3):
        a, b, o = c, (c + 1) % 3, (c + 2) % 3
        # d^2 det / d f_a d f_b = -[f_o]x for cyclic (a, b, o)
        blk = -_skew(p[o]) / 6.0
        H[:, a, b] = blk
        H[:, b, a] = np.swapaxes(blk, 1, 2)
    return assemble_point_hessian(surface.n_vertices, faces, H)


def area_volume(surface: SimplicialSurface, f: np.ndarray, with_volume: bool | None = None):
    """Area, volume and their per-vertex gradients.

    Volume is computed on closed surfaces only; pass ``with_volume=True``
    to demand it (raising ``SurfaceHasBoundary`` on open meshes).
    """
    if with_volume is None:
        with_volume = surface.is_closed
    a, ga = area(surface, f), area_gradient(surface, f)
    if with_volume:
        return a, volume(surface, f), ga, volume_gradient(surface, f)
    return a, None, ga, None
