"""Procedural test meshes: returns ``(positions, faces)`` pairs."""

from __future__ import annotations

import numpy as np
from scipy.spatial import ConvexHull, Delaunay


def tetrahedron() -> tuple[np.ndarray, np.ndarray]:
    """Regular tetrahedron on alternate cube corners (edge length 2 sqrt 2)."""
    f = np.array([[1, 1, 1], [1, -1, -1], [-1, 1, -1], [-1, -1, 1]], dtype=float)
    faces = np.array([[0, 1, 2], [0, 2, 3], [0, 3, 1], [1, 3, 2]])
    return f, _orient_outward(f, faces)


def unit_tetrahedron() -> tuple[np.ndarray, np.ndarray]:
    """Regular tetrahedron with unit edge length."""
    f, faces = tetrahedron()
    return f / (2.0 * np.sqrt(2.0)), faces


def cube() -> tuple[np.ndarray, np.ndarray]:
    """Unit cube [0, 1]^3, two triangles per side, outward oriented."""
    f = np.array([[x, y, z] for x in (0.0, 1.0) for y in (0.0, 1.0) for z in (0.0, 1.0)])
    quads = [[0, 1, 3, 2], [4, 6, 7, 5], [0, 4, 5, 1], [2, 3, 7, 6], [0, 2, 6, 4], [1, 5, 7, 3]]
    faces = []
    for a, b, c, d in quads:
        faces += [[a, b, c], [a, c, d]]
    return f, _orient_outward(f, np.array(faces))


def grid(nx: int, ny: int, spacing: float = 1.0) -> tuple[np.ndarray, np.ndarray]:
    """Planar ``nx`` by ``ny`` grid of squares, each split along the same diagonal."""
    xs, ys = np.meshgrid(np.arange(nx + 1) * spacing, np.arange(ny + 1) * spacing, indexing="xy")
    f = np.stack([xs.ravel(), ys.ravel(), np.zeros(xs.size)], axis=1)

    def vid(i, j):
        return j * (nx + 1) + i

    faces = []
    for j in range(ny):
        for i in range(nx):
            a, b, c, d = vid(i, j), vid(i + 1, j), vid(i + 1, j + 1), vid(i, j + 1)
            faces += [[a, b, c], [a, c, d]]
    return f, np.array(faces)


def grid_corners(nx: int, ny: int) -> list[int]:
    return [0, nx, (nx + 1) * ny, (nx + 1) * (ny + 1) - 1]


def icosahedron() -> tuple[np.ndarray, np.ndarray]:
    t = (1.0 + np.sqrt(5.0)) / 2.0
    f = np.array(
        [
            [-1, t, 0], [1, t, 0], [-1, -t, 0], [1, -t, 0],
            [0, -1, t], [0, 1, t], [0, -1, -t], [0, 1, -t],
            [t, 0, -1], [t, 0, 1], [-t, 0, -1], [-t, 0, 1],
        ],
        dtype=float,
    )
    f /= np.linalg.norm(f, axis=1, keepdims=True)
    faces = np.array(
        [
            [0, 11, 5], [0, 5, 1], [0, 1, 7], [0, 7, 10], [0, 10, 11],
            [1, 5, 9], [5, 11, 4], [11, 10, 2], [10, 7, 6], [7, 1, 8],
            [3, 9, 4], [3, 4, 2], [3, 2, 6], [3, 6, 8], [3, 8, 9],
            [4, 9, 5], [2, 4, 11], [6, 2, 10], [8, 6, 7], [9, 8, 1],
        ]
    )
    return f, _orient_outward(f, faces)


def icosphere(subdivisions: int) -> tuple[np.ndarray, np.ndarray]:
    """Loop-subdivided icosahedron projected to the unit sphere.

    The 12 original icosahedron vertices keep indices 0..11.
    """
    f, faces = icosahedron()
    verts = list(f)
    for _ in range(subdivisions):
        cache: dict[tuple[int, int], int] = {}

        def mid(a, b):
            key = (a, b) if a < b else (b, a)
            if key not in cache:
                p = verts[a] + verts[b]
                verts.append(p / np.linalg.norm(p))
                cache[key] = len(verts) - 1
            return cache[key]

        new = []
        for a, b, c in faces:
            ab, bc, ca = mid(a, b), mid(b, c), mid(c, a)
            new += [[a, ab, ca], [b, bc, ab], [c, ca, bc], [ab, bc, ca]]
        faces = np.array(new)
    return np.array(verts), faces


def random_sphere(n: int, rng: np.random.Generator) -> tuple[np.ndarray, np.ndarray]:
    """Convex hull of ``n`` random points on the unit sphere."""
    p = rng.normal(size=(n, 3))
    p /= np.linalg.norm(p, axis=1, keepdims=True)
    hull = ConvexHull(p)
    return p, _orient_outward(p, hull.simplices)


def random_disk(n: int, rng: np.random.Generator, jitter_z: float = 0.0) -> tuple[np.ndarray, np.ndarray]:
    """Delaunay triangulation of random points in the unit disk (disk topology)."""
    m = max(8, int(np.sqrt(n) * 2))
    t = np.linspace(0.0, 2.0 * np.pi, m, endpoint=False)
    rim = np.stack([np.cos(t), np.sin(t)], axis=1)
    k = max(n - m, 1)
    r = np.sqrt(rng.uniform(0.0, 0.85**2, k))
    a = rng.uniform(0.0, 2.0 * np.pi, k)
    inner = np.stack([r * np.cos(a), r * np.sin(a)], axis=1)
    p2 = np.vstack([rim, inner])
    tri = Delaunay(p2).simplices
    f = np.column_stack([p2, jitter_z * rng.normal(size=len(p2))])
    return f, _orient_ccw(p2, tri)


def random_annulus(
    n_theta: int, n_r: int, rng: np.random.Generator, inner: float = 0.4, jitter: float = 0.2
) -> tuple[np.ndarray, np.ndarray]:
    """Polar annulus grid with jittered vertices and random diagonal choices."""
    rs = np.linspace(inner, 1.0, n_r + 1)
    ts = np.linspace(0.0, 2.0 * np.pi, n_theta, endpoint=False)
    dr = rs[1] - rs[0]
    dt = ts[1] - ts[0]
    pts = []
    for r in rs:
        for t in ts:
            pts.append([r, t])
    pts = np.array(pts)
    pts[:, 0] += jitter * dr * rng.uniform(-0.5, 0.5, len(pts)) * (
        (pts[:, 0] > inner + 1e-9) & (pts[:, 0] < 1.0 - 1e-9)
    )
    pts[:, 1] += jitter * dt * rng.uniform(-0.5, 0.5, len(pts))
    f = np.stack([pts[:, 0] * np.cos(pts[:, 1]), pts[:, 0] * np.sin(pts[:, 1]), np.zeros(len(pts))], axis=1)

    def vid(ir, it):
        return ir * n_theta + (it % n_theta)

    faces = []
    for ir in range(n_r):
        for it in range(n_theta):
            a, b, c, d = vid(ir, it), vid(ir, it + 1), vid(ir + 1, it + 1), vid(ir + 1, it)
            if rng.uniform() < 0.5:
                faces += [[a, b, c], [a, c, d]]
            else:
                faces += [[a, b, d], [b, c, d]]
    return f, np.array(faces)


def strip(nx: int, ny: int, length: float, width: float) -> tuple[np.ndarray, np.ndarray]:
    """Flat rectangular strip ``[0, length] x [0, width]``."""
    f, faces = grid(nx, ny)
    f[:, 0] *= length / nx
    f[:, 1] *= width / ny
    return f, faces


def perturb(f: np.ndarray, rng: np.random.Generator, amount: float) -> np.ndarray:
    return f + amount * rng.normal(size=f.shape)


def _orient_outward(f: np.ndarray, faces: np.ndarray) -> np.ndarray:
    faces = np.array(faces)
    c = f.mean(axis=0)
    a, b, d = f[faces[:, 0]], f[faces[:, 1]], f[faces[:, 2]]
    n = np.cross(b - a, d - a)
    flip = np.einsum("ij,ij->i", n, (a + b + d) / 3.0 - c) < 0
    faces[flip] = faces[flip][:, [0, 2, 1]]
    return faces


def _orient_ccw(p2: np.ndarray, tri: np.ndarray) -> np.ndarray:
    tri = np.array(tri)
    a, b, c = p2[tri[:, 0]], p2[tri[:, 1]], p2[tri[:, 2]]
    cross = (b[:, 0] - a[:, 0]) * (c[:, 1] - a[:, 1]) - (b[:, 1] - a[:, 1]) * (c[:, 0] - a[:, 0])
    flip = cross < 0
    tri[flip] = tri[flip][:, [0, 2, 1]]
    return tri
