"""Combinatorics of oriented manifold triangle meshes (with boundary).

Edges are indexed canonically: edge ``e`` joins ``edges[e, 0] < edges[e, 1]``
and edges are sorted lexicographically. A halfedge ``a -> b`` carries sign
``+1`` when ``a < b`` and ``-1`` otherwise.

For an interior edge we use the stencil ``(i, j, k, l)`` with ``i < j`` such
that the edge is adjacent to the oriented faces ``(i, j, k)`` and ``(j, i, l)``.
A boundary edge ``ij`` is oriented so that its single face is ``(i, j, k)``.
"""

from __future__ import annotations

from functools import cached_property

import numpy as np
import scipy.sparse as sp
from scipy.sparse.csgraph import connected_components

from .errors import InconsistentOrientation, IsolatedVertex, MeshError, NonManifoldEdge


def _readonly(a: np.ndarray) -> np.ndarray:
    a.setflags(write=False)
    return a


class SimplicialSurface:
    """Immutable connectivity of an oriented triangle mesh.

    Use :func:`build_surface` to construct one; the constructor does the
    same work and is kept for convenience.
    """

    def __init__(self, faces, vertex_count: int | None = None):
        faces = np.asarray(faces, dtype=np.int64)
        if faces.ndim != 2 or faces.shape[1] != 3:
            raise MeshError(f"faces must have shape (F, 3), got {faces.shape}")
        if vertex_count is None:
            vertex_count = int(faces.max()) + 1 if faces.size else 0
        nv = int(vertex_count)
        if faces.size and (faces.min() < 0 or faces.max() >= nv):
            raise MeshError("face index out of range")
        if np.any(faces[:, 0] == faces[:, 1]) or np.any(faces[:, 1] == faces[:, 2]) or np.any(
            faces[:, 2] == faces[:, 0]
        ):
            raise MeshError("face with repeated vertex")

        nf = len(faces)
        # halfedge h = 3*f + c runs faces[f, c] -> faces[f, (c+1)%3]
        tail = faces.reshape(-1)
        head = np.roll(faces, -1, axis=1).reshape(-1)
        opp = np.roll(faces, -2, axis=1).reshape(-1)

        lo = np.minimum(tail, head)
        hi = np.maximum(tail, head)
        key = lo * nv + hi
        edge_keys, he_edge = np.unique(key, return_inverse=True)
        ne = len(edge_keys)
        edges = np.stack([edge_keys // nv, edge_keys % nv], axis=1)
        he_sign = np.where(tail < head, 1, -1)

        counts = np.bincount(he_edge, minlength=ne)
        if np.any(counts > 2):
            bad = edges[np.argmax(counts > 2)]
            raise NonManifoldEdge(f"edge ({bad[0]}, {bad[1]}) has more than two faces")

        # slot 0: face holding lo->hi, slot 1: face holding hi->lo
        slot = (he_sign < 0).astype(np.int64)
        he_index = -np.ones((ne, 2), dtype=np.int64)
        taken = np.zeros((ne, 2), dtype=np.int64)
        np.add.at(taken, (he_edge, slot), 1)
        if np.any(taken > 1):
            e = int(np.argmax(taken.max(axis=1) > 1))
            raise InconsistentOrientation(
                f"halfedge along edge ({edges[e, 0]}, {edges[e, 1]}) appears twice; "
                "faces are not consistently oriented"
            )
        he_index[he_edge, slot] = np.arange(3 * nf)

        used = np.zeros(nv, dtype=bool)
        used[faces.reshape(-1)] = True
        if not np.all(used):
            raise IsolatedVertex(f"vertex {int(np.argmin(used))} is not contained in any face")

        self.n_vertices = nv
        self.faces = _readonly(faces.copy())
        self.edges = _readonly(edges)
        self.face_edges = _readonly(he_edge.reshape(nf, 3))
        self.face_edge_signs = _readonly(he_sign.reshape(nf, 3))
        self._he_index = _readonly(he_index)
        self._he_opp = opp

        interior = np.all(he_index >= 0, axis=1)
        self.is_interior_edge = _readonly(interior)
        self.is_boundary_edge = _readonly(~interior)
        bverts = np.zeros(nv, dtype=bool)
        bverts[edges[~interior].reshape(-1)] = True
        self.is_boundary_vertex = _readonly(bverts)
        self.is_interior_vertex = _readonly(~bverts)

        ie = np.flatnonzero(interior)
        self.interior_edges = _readonly(ie)
        h0 = he_index[ie, 0]
        h1 = he_index[ie, 1]
        # (i, j, k, l): faces (i, j, k) and (j, i, l)
        self.stencil = _readonly(
            np.stack([edges[ie, 0], edges[ie, 1], opp[h0], opp[h1]], axis=1)
        )

        be = np.flatnonzero(~interior)
        self.boundary_edges = _readonly(be)
        hb = np.where(he_index[be, 0] >= 0, he_index[be, 0], he_index[be, 1])
        self.boundary_stencil = _readonly(np.stack([tail[hb], head[hb], opp[hb]], axis=1))

        self._label_boundary()

    # -- construction helpers ------------------------------------------------

    def _label_boundary(self) -> None:
        nv = self.n_vertices
        be = self.edges[self.boundary_edges]
        labels = -np.ones(nv, dtype=np.int64)
        if len(be):
            g = sp.coo_matrix((np.ones(len(be)), (be[:, 0], be[:, 1])), shape=(nv, nv))
            _, comp = connected_components(g, directed=False)
            bv = np.flatnonzero(self.is_boundary_vertex)
            _, relabel = np.unique(comp[bv], return_inverse=True)
            labels[bv] = relabel
        self.boundary_component = _readonly(labels)
        self.n_boundary_components = int(labels.max()) + 1 if len(be) else 0

    # -- counts ---------------------------------------------------------------

    @property
    def n_edges(self) -> int:
        return len(self.edges)

    @property
    def n_faces(self) -> int:
        return len(self.faces)

    @property
    def euler_characteristic(self) -> int:
        return self.n_vertices - self.n_edges + self.n_faces

    @cached_property
    def n_components(self) -> int:
        nv = self.n_vertices
        e = self.edges
        g = sp.coo_matrix((np.ones(len(e)), (e[:, 0], e[:, 1])), shape=(nv, nv))
        return int(connected_components(g, directed=False)[0])

    @property
    def genus(self) -> int:
        # chi = sum over components of (2 - 2g - b)
        return (2 * self.n_components - self.n_boundary_components - self.euler_characteristic) // 2

    @property
    def is_closed(self) -> bool:
        return self.n_boundary_components == 0

    @property
    def boundary_vertex_sets(self) -> list[np.ndarray]:
        return [np.flatnonzero(self.boundary_component == b) for b in range(self.n_boundary_components)]

    # -- adjacency --------------------------------------------------------------

    @cached_property
    def vertex_face_count(self) -> np.ndarray:
        return _readonly(np.bincount(self.faces.reshape(-1), minlength=self.n_vertices))

    @cached_property
    def vertex_edge_incidence(self) -> sp.csr_matrix:
        """Signed (V x E) incidence: +1 at the tail (lower index), -1 at the head.

        Multiplying an edge form in canonical orientation gives, at each
        vertex, the sum of the values on the halfedges leaving it.
        """
        ne = self.n_edges
        rows = self.edges.T.reshape(-1)
        cols = np.concatenate([np.arange(ne), np.arange(ne)])
        vals = np.concatenate([np.ones(ne), -np.ones(ne)])
        return sp.csr_matrix((vals, (rows, cols)), shape=(self.n_vertices, ne))

    @cached_property
    def neighbors(self) -> list[np.ndarray]:
        nv = self.n_vertices
        e = self.edges
        adj = sp.coo_matrix((np.ones(2 * len(e)), (e.T.reshape(-1), e[:, ::-1].T.reshape(-1))), shape=(nv, nv))
        adj = adj.tocsr()
        return [adj.indices[adj.indptr[v] : adj.indptr[v + 1]].copy() for v in range(nv)]

    def edge_index(self, a: int, b: int) -> int:
        """Canonical index of the edge joining ``a`` and ``b``."""
        lo, hi = (a, b) if a < b else (b, a)
        k = np.searchsorted(self.edges[:, 0] * self.n_vertices + self.edges[:, 1], lo * self.n_vertices + hi)
        if k >= self.n_edges or self.edges[k, 0] != lo or self.edges[k, 1] != hi:
            raise KeyError(f"no edge ({a}, {b})")
        return int(k)

    def edge_indices(self, a, b) -> np.ndarray:
        """Vectorized :meth:`edge_index` for arrays of endpoints."""
        a = np.asarray(a, dtype=np.int64)
        b = np.asarray(b, dtype=np.int64)
        lo, hi = np.minimum(a, b), np.maximum(a, b)
        keys = self.edges[:, 0] * self.n_vertices + self.edges[:, 1]
        want = lo * self.n_vertices + hi
        k = np.searchsorted(keys, want)
        k = np.minimum(k, self.n_edges - 1)
        if np.any(keys[k] != want):
            raise KeyError("some vertex pairs are not edges")
        return k

    @cached_property
    def stencil_halfedges(self) -> tuple[np.ndarray, np.ndarray]:
        """Edges and signs of the halfedges ``il, lj, jk, ki`` around each interior edge."""
        i, j, k, l = self.stencil.T
        tails = np.stack([i, l, j, k], axis=1)
        heads = np.stack([l, j, k, i], axis=1)
        idx = self.edge_indices(tails, heads)
        sign = np.where(tails < heads, 1.0, -1.0)
        return _readonly(idx), _readonly(sign)

    def halfedge_sign(self, a: int, b: int) -> int:
        return 1 if a < b else -1

    def edge_faces(self, e: int) -> tuple[int, int]:
        """Faces holding halfedges ``lo -> hi`` and ``hi -> lo`` (-1 where absent)."""
        h = self._he_index[e]
        return tuple(int(x // 3) if x >= 0 else -1 for x in h)

    def vertex_face_cycle(self, v: int) -> list[int]:
        """Faces around an interior vertex in counterclockwise order.

        Walking from one face to the next crosses the halfedge leaving ``v``
        in its positive direction, so summing a dual 1-form over the crossings
        reproduces its dual exterior derivative at ``v``.
        """
        if self.is_boundary_vertex[v]:
            raise MeshError(f"vertex {v} lies on the boundary")
        start = int(np.flatnonzero(np.any(self.faces == v, axis=1))[0])
        cycle = [start]
        f = start
        while True:
            c = int(np.flatnonzero(self.faces[f] == v)[0])
            # halfedge entering v in f is faces[f, c-1] -> v; cross edge (v, prev)
            w = int(self.faces[f, (c - 1) % 3])
            e = self.edge_index(v, w)
            h = self._he_index[e]
            nxt = [int(x // 3) for x in h if x >= 0 and x // 3 != f][0]
            if nxt == start:
                break
            cycle.append(nxt)
            f = nxt
        return cycle

    def __repr__(self) -> str:
        return (
            f"SimplicialSurface(V={self.n_vertices}, E={self.n_edges}, F={self.n_faces}, "
            f"genus={self.genus}, boundary_components={self.n_boundary_components})"
        )


def build_surface(faces, vertex_count: int | None = None) -> SimplicialSurface:
    """Build full connectivity from consistently oriented vertex triples.

    Raises ``NonManifoldEdge``, ``InconsistentOrientation`` or
    ``IsolatedVertex`` on defective input.
    """
    return SimplicialSurface(faces, vertex_count)
