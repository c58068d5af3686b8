"""Discrete metrics, length (half) cross ratios and conformal scale factors.

Metrics are stored as log edge lengths in canonical edge order.
"""

from __future__ import annotations

from dataclasses import dataclass, field

import numpy as np
import scipy.sparse as sp

from .dec import average
from .errors import DegenerateTriangle, DuplicateRow, TriangleInequalityViolated, ZeroLengthEdge
from .mesh import SimplicialSurface

TRIANGLE_SLACK = 1e-12
QC_BINS = 64


@dataclass(frozen=True)
class ConformalClass:
    """Target log cross ratios: lcr rows on interior edges, lhcr rows on boundary edges.

    ``source`` is ``"mesh"`` when the values were computed from an actual
    metric and ``"user"`` for edited targets that may be infeasible.
    """

    values: np.ndarray
    source: str = "mesh"

    def __post_init__(self):
        v = np.asarray(self.values, dtype=float)
        if not np.all(np.isfinite(v)):
            raise ValueError("conformal class has non-finite entries")
        v.setflags(write=False)
        object.__setattr__(self, "values", v)


def edge_lengths(surface: SimplicialSurface, f: np.ndarray) -> np.ndarray:
    f = np.asarray(f, dtype=float)
    e = surface.edges
    return np.linalg.norm(f[e[:, 1]] - f[e[:, 0]], axis=1)


def induced_metric(surface: SimplicialSurface, f: np.ndarray) -> np.ndarray:
    """Log Euclidean edge lengths of an immersion."""
    ell = edge_lengths(surface, f)
    if np.any(ell == 0.0):
        e = surface.edges[int(np.argmin(ell))]
        raise ZeroLengthEdge(f"edge ({e[0]}, {e[1]}) has zero length")
    return np.log(ell)


def check_triangle_inequality(surface: SimplicialSurface, lam: np.ndarray) -> None:
    """Raise ``TriangleInequalityViolated`` naming the first offending face."""
    ell = np.exp(np.asarray(lam, dtype=float))[surface.face_edges]
    perim = ell.sum(axis=1)
    slack = TRIANGLE_SLACK * perim
    ok = np.all(perim[:, None] - 2.0 * ell > slack[:, None], axis=1)
    if not np.all(ok):
        f = int(np.argmin(ok))
        raise TriangleInequalityViolated(f"face {f} violates the triangle inequality", face=f)


def cross_ratio_matrix(surface: SimplicialSurface) -> sp.csr_matrix:
    """Extended cross ratio operator as an (E x E) sparse matrix.

    Assembled facewise from the 3x3 blocks ``[[0, 1, -1], [-1, 0, 1], [1, -1, 0]]``
    over the face's edges ``(ij, jk, ki)``. Interior rows give log length cross
    ratios, boundary rows log length half cross ratios.
    """
    fe = surface.face_edges
    block = np.array([[0, 1, -1], [-1, 0, 1], [1, -1, 0]], dtype=float)
    rows = np.repeat(fe, 3, axis=1).reshape(-1)
    cols = np.tile(fe, (1, 3)).reshape(-1)
    vals = np.tile(block.reshape(-1), surface.n_faces)
    m = sp.coo_matrix((vals, (rows, cols)), shape=(surface.n_edges, surface.n_edges)).tocsr()
    m.sum_duplicates()
    m.eliminate_zeros()
    return m


def extended_cross_ratio(surface: SimplicialSurface, lam: np.ndarray, source: str = "mesh") -> ConformalClass:
    return ConformalClass(cross_ratio_matrix(surface) @ np.asarray(lam, dtype=float), source=source)


def log_cross_ratio_direct(surface: SimplicialSurface, lam: np.ndarray) -> np.ndarray:
    """Reference evaluation of the extended operator straight from the stencils."""
    lam = np.asarray(lam, dtype=float)
    out = np.zeros(surface.n_edges)
    for row, (i, j, k, l) in zip(surface.interior_edges, surface.stencil):
        e = surface.edge_index
        out[row] = lam[e(i, l)] - lam[e(l, j)] + lam[e(j, k)] - lam[e(k, i)]
    for row, (i, j, k) in zip(surface.boundary_edges, surface.boundary_stencil):
        e = surface.edge_index
        out[row] = lam[e(j, k)] - lam[e(k, i)]
    return out


def conformal_rescale(surface: SimplicialSurface, lam: np.ndarray, u: np.ndarray) -> np.ndarray:
    """``lam + A u``, validated against the triangle inequality."""
    out = np.asarray(lam, dtype=float) + average(surface, u)
    check_triangle_inequality(surface, out)
    return out


def _face_scale_factors(surface: SimplicialSurface, dlam: np.ndarray) -> np.ndarray:
    # per face (ij, jk, ki): u_i = d_ij - d_jk + d_ki and cyclic
    g = dlam[surface.face_edges]
    return np.stack(
        [g[:, 0] - g[:, 1] + g[:, 2], g[:, 1] - g[:, 2] + g[:, 0], g[:, 2] - g[:, 0] + g[:, 1]],
        axis=1,
    )


def scale_factors(surface: SimplicialSurface, lam: np.ndarray, lam_ref: np.ndarray) -> np.ndarray:
    """Vertex scale factors of ``lam`` relative to ``lam_ref``.

    Per-face factors are averaged over the faces incident to each vertex.
    The result is exact when the two metrics are conformally equivalent and
    well defined (but not invertible) otherwise.
    """
    d = np.asarray(lam, dtype=float) - np.asarray(lam_ref, dtype=float)
    uf = _face_scale_factors(surface, d)
    total = np.bincount(surface.faces.reshape(-1), weights=uf.reshape(-1), minlength=surface.n_vertices)
    return total / surface.vertex_face_count


@dataclass(frozen=True)
class ScaleConstraintRows:
    """Rows ``U`` with ``U @ (lam - lam_ref)`` equal to the scale factor at ``vertices``."""

    vertices: np.ndarray
    matrix: sp.csr_matrix
    mode: str = "vertex"
    centers: np.ndarray = field(default_factory=lambda: np.zeros(0, dtype=np.int64))

    def __len__(self) -> int:
        return len(self.vertices)


def scale_row_matrix(surface: SimplicialSurface, vertices) -> sp.csr_matrix:
    vertices = np.asarray(vertices, dtype=np.int64)
    faces = surface.faces
    fe = surface.face_edges
    nfc = surface.vertex_face_count
    rows, cols, vals = [], [], []
    pattern = np.array([1.0, -1.0, 1.0])
    for r, v in enumerate(vertices):
        fidx, corner = np.nonzero(faces == v)
        for f, c in zip(fidx, corner):
            # edges (ij, jk, ki) seen from corner c = i
            es = fe[f, [c, (c + 1) % 3, (c + 2) % 3]]
            rows.extend([r] * 3)
            cols.extend(es.tolist())
            vals.extend((pattern / nfc[v]).tolist())
    m = sp.coo_matrix((vals, (rows, cols)), shape=(len(vertices), surface.n_edges)).tocsr()
    m.sum_duplicates()
    m.eliminate_zeros()
    return m


def scale_rows(surface: SimplicialSurface, vertices, mode: str = "vertex") -> ScaleConstraintRows:
    """Scale-factor constraint rows at vertices, or at their links.

    In ``"link"`` mode every neighbor of each listed vertex gets a row and the
    listed vertex itself does not.
    """
    vertices = [int(v) for v in np.atleast_1d(vertices)]
    if mode == "vertex":
        rows = vertices
        centers = vertices
    elif mode == "link":
        rows, centers = [], []
        for v in vertices:
            for w in surface.neighbors[v]:
                rows.append(int(w))
                centers.append(v)
    else:
        raise ValueError(f"unknown scale constraint mode {mode!r}")
    if len(set(rows)) != len(rows):
        seen = set()
        dup = next(r for r in rows if r in seen or seen.add(r))
        raise DuplicateRow(f"vertex {dup} receives more than one scale constraint row")
    return ScaleConstraintRows(
        vertices=np.array(rows, dtype=np.int64),
        matrix=scale_row_matrix(surface, rows),
        mode=mode,
        centers=np.array(centers, dtype=np.int64),
    )


# -- quasi-conformal error ---------------------------------------------------


def _layout_reference(ell: np.ndarray) -> np.ndarray:
    """Planar coordinates of triangles with edge lengths (ij, jk, ki) as 2x2 edge bases."""
    lij, ljk, lki = ell[:, 0], ell[:, 1], ell[:, 2]
    x = (lij**2 + lki**2 - ljk**2) / (2.0 * lij)
    y = np.sqrt(np.maximum(lki**2 - x**2, 0.0))
    p = np.zeros((len(ell), 2, 2))
    p[:, 0, 0] = lij  # column 0: j - i
    p[:, 0, 1] = x  # column 1: k - i
    p[:, 1, 1] = y
    return p


def quasi_conformal_error(surface: SimplicialSurface, f: np.ndarray, lam_ref: np.ndarray) -> np.ndarray:
    """Per-face ratio of singular values of the map from the reference layout.

    The reference triangle is laid out in the plane from ``exp(lam_ref)``;
    ``Q = 1`` means the face is mapped conformally.
    """
    f = np.asarray(f, dtype=float)
    ell = np.exp(np.asarray(lam_ref, dtype=float))[surface.face_edges]
    ref = _layout_reference(ell)
    fi, fj, fk = (f[surface.faces[:, c]] for c in range(3))
    e1 = fj - fi
    e2 = fk - fi
    n = np.cross(e1, e2)
    area2 = np.linalg.norm(n, axis=1)
    scale = np.maximum(np.linalg.norm(e1, axis=1), np.linalg.norm(e2, axis=1)) ** 2
    ref_area2 = ref[:, 0, 0] * ref[:, 1, 1]
    if np.any(area2 <= 1e-12 * scale) or np.any(ref_area2 <= 1e-12 * ell.max(axis=1) ** 2):
        raise DegenerateTriangle("degenerate face in quasi-conformal error evaluation")
    t1 = e1 / np.linalg.norm(e1, axis=1, keepdims=True)
    t2 = np.cross(n / area2[:, None], t1)
    img = np.zeros_like(ref)
    img[:, 0, 0] = np.einsum("ij,ij->i", e1, t1)
    img[:, 1, 0] = np.einsum("ij,ij->i", e1, t2)
    img[:, 0, 1] = np.einsum("ij,ij->i", e2, t1)
    img[:, 1, 1] = np.einsum("ij,ij->i", e2, t2)
    lin = img @ np.linalg.inv(ref)
    s = np.linalg.svd(lin, compute_uv=False)
    return s[:, 0] / s[:, 1]


def qc_summary(q: np.ndarray, bins: int = QC_BINS) -> dict:
    """Min/mean/max and a fixed-bin histogram over ``[1, max(2, max Q)]``."""
    q = np.asarray(q, dtype=float)
    hi = max(2.0, float(q.max()))
    counts, edges = np.histogram(q, bins=bins, range=(1.0, hi))
    return {
        "min": float(q.min()),
        "mean": float(q.mean()),
        "median": float(np.median(q)),
        "max": float(q.max()),
        "bin_edges": edges,
        "counts": counts,
    }


def kernel_basis_AB(surface: SimplicialSurface) -> np.ndarray:
    """Columns spanning the image of averaging after boundary-constant extension.

    One column per interior vertex and one per boundary component.
    """
    nv = surface.n_vertices
    interior = np.flatnonzero(surface.is_interior_vertex)
    cols = []
    for v in interior:
        u = np.zeros(nv)
        u[v] = 1.0
        cols.append(average(surface, u))
    for vs in surface.boundary_vertex_sets:
        u = np.zeros(nv)
        u[vs] = 1.0
        cols.append(average(surface, u))
    if not cols:
        return np.zeros((surface.n_edges, 0))
    return np.stack(cols, axis=1)
