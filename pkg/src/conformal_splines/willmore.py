"""Moebius-invariant discrete Willmore energy, its flux form and conservation laws.

The energy is the sum over interior vertices of ``sum_j beta_ij - 2 pi`` where
``beta_ij`` is the intersection angle of the circumcircles of the two faces
at edge ``ij``. Written per edge it is ``sum_e w_e beta_e - 2 pi |V0|`` with
``w_e`` the number of interior endpoints of ``e`` (always 2 on a closed mesh).

Edges whose circle configuration is degenerate (``|sin beta| < 1e-6``)
contribute nothing to the gradient or the Hessian.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np
import scipy.sparse as sp

from .conformal import cross_ratio_matrix
from .dec import average, d_dual1
from .mesh import SimplicialSurface
from .quaternion import EdgeCircleData, edge_circle_data, vinv


@dataclass(frozen=True)
class WillmoreReport:
    integrand: np.ndarray  # per vertex, zero on the boundary
    total: float
    beta: np.ndarray  # per edge, nan on boundary edges
    tau: np.ndarray  # flux form, canonical orientation
    degenerate_count: int


@dataclass(frozen=True)
class ConservationForms:
    tau: np.ndarray
    sigma: np.ndarray
    rho: np.ndarray
    zeta: np.ndarray
    f_mid: np.ndarray
    h: np.ndarray
    H: np.ndarray
    gradient: np.ndarray


def stencil_points(surface: SimplicialSurface, f: np.ndarray):
    f = np.asarray(f, dtype=float)
    i, j, k, l = surface.stencil.T
    return f[i], f[j], f[k], f[l]


def circle_data(surface: SimplicialSurface, f: np.ndarray) -> EdgeCircleData:
    """Circle data for every interior edge, in ``surface.interior_edges`` order."""
    fi, fj, fk, fl = stencil_points(surface, f)
    return edge_circle_data(fi, fl, fj, fk)


def edge_weights(surface: SimplicialSurface) -> np.ndarray:
    """Number of interior endpoints of each interior edge."""
    i, j = surface.stencil[:, 0], surface.stencil[:, 1]
    iv = surface.is_interior_vertex
    return iv[i].astype(float) + iv[j].astype(float)


def _flux_from_circles(surface: SimplicialSurface, f: np.ndarray, cd: EdgeCircleData) -> np.ndarray:
    # d beta_e / d(halfedge vector) for halfedges il, lj, jk, ki of each stencil
    fi, fj, fk, fl = stencil_points(surface, f)
    a, b, c, d = fl - fi, fj - fl, fk - fj, fi - fk
    ni, nj = cd.normal_i, cd.normal_j
    partial = np.stack(
        [np.cross(ni, vinv(a)), np.cross(vinv(b), nj), np.cross(nj, vinv(c)), np.cross(vinv(d), ni)],
        axis=1,
    )
    idx, sign = surface.stencil_halfedges
    w = edge_weights(surface)
    contrib = -(w[:, None, None] * sign[:, :, None]) * partial
    tau = np.zeros((surface.n_edges, 3))
    np.add.at(tau, idx.reshape(-1), contrib.reshape(-1, 3))
    return tau


def willmore_energy(surface: SimplicialSurface, f: np.ndarray) -> WillmoreReport:
    cd = circle_data(surface, f)
    beta = np.full(surface.n_edges, np.nan)
    beta[surface.interior_edges] = cd.beta
    i, j = surface.stencil[:, 0], surface.stencil[:, 1]
    sums = np.bincount(i, cd.beta, surface.n_vertices) + np.bincount(j, cd.beta, surface.n_vertices)
    W = np.where(surface.is_interior_vertex, sums - 2.0 * np.pi, 0.0)
    return WillmoreReport(
        integrand=W,
        total=float(W.sum()),
        beta=beta,
        tau=_flux_from_circles(surface, f, cd),
        degenerate_count=int(cd.degenerate.sum()),
    )


def willmore_flux(surface: SimplicialSurface, f: np.ndarray) -> np.ndarray:
    """Dual 1-form whose dual exterior derivative is the energy gradient.

    Orthogonal to the edge vector on every edge.
    """
    return _flux_from_circles(surface, f, circle_data(surface, f))


def willmore_gradient(surface: SimplicialSurface, f: np.ndarray) -> np.ndarray:
    return d_dual1(surface, willmore_flux(surface, f))


def willmore_flux_closed_form(surface: SimplicialSurface, f: np.ndarray) -> np.ndarray:
    """The flux form written edge by edge from the four neighboring sphere normals.

    ``tau_ij = 2 (n_il^i - n_lj^j + n_jk^j - n_ki^i) x df_ij^{-1}`` where
    ``n_e^p`` is the normal at ``p`` of the sphere through edge ``e``'s stencil.
    Closed meshes only; kept as an independent check of :func:`willmore_flux`.
    """
    f = np.asarray(f, dtype=float)
    cd = circle_data(surface, f)
    ne = surface.n_edges
    n_lo = np.zeros((ne, 3))
    n_hi = np.zeros((ne, 3))
    n_lo[surface.interior_edges] = cd.normal_i
    n_hi[surface.interior_edges] = cd.normal_j
    edges = surface.edges

    def normal_at(e, p):
        return np.where((edges[e, 0] == p)[:, None], n_lo[e], n_hi[e])

    i, j, k, l = surface.stencil.T
    ei = surface.edge_indices
    s = normal_at(ei(i, l), i) - normal_at(ei(l, j), j) + normal_at(ei(j, k), j) - normal_at(ei(k, i), i)
    tau = np.zeros((ne, 3))
    tau[surface.interior_edges] = 2.0 * np.cross(s, vinv(f[j] - f[i]))
    return tau


# -- second derivatives --------------------------------------------------------

# Re(p q r s) for imaginary p, q, r, s as a 4-tensor
_T = np.zeros((3, 3, 3, 3))
for _a in range(3):
    for _b in range(3):
        _T[_a, _a, _b, _b] += 1.0
        _T[_a, _b, _a, _b] -= 1.0
        _T[_a, _b, _b, _a] += 1.0

# halfedge vectors (il, lj, jk, ki) in terms of stencil points (i, j, k, l)
_M = np.array([[-1, 0, 0, 1], [0, 1, 0, -1], [0, -1, 1, 0], [1, 0, -1, 0]], dtype=float)


def _normalize_jacobians(x: np.ndarray):
    r = np.linalg.norm(x, axis=-1)
    u = x / r[..., None]
    eye = np.eye(3)
    J = (eye - u[..., :, None] * u[..., None, :]) / r[..., None, None]
    return r, u, J


def beta_derivatives(fi, fj, fk, fl):
    """Gradient (n, 4, 3) and Hessian (n, 4, 4, 3, 3) of beta in the points (i, j, k, l)."""
    a, b, c, d = fl - fi, fj - fl, fk - fj, fi - fk
    vecs = [a, b, c, d]
    norms, units, jacs = zip(*(_normalize_jacobians(x) for x in vecs))
    p, q, r, s = units
    w = np.einsum("abcd,na,nb,nc,nd->n", _T, p, q, r, s)
    gu = [
        np.einsum("abcd,nb,nc,nd->na", _T, q, r, s),
        np.einsum("abcd,na,nc,nd->nb", _T, p, r, s),
        np.einsum("abcd,na,nb,nd->nc", _T, p, q, s),
        np.einsum("abcd,na,nb,nc->nd", _T, p, q, r),
    ]
    n = len(w)
    Wuu = np.zeros((n, 4, 4, 3, 3))
    Wuu[:, 0, 1] = np.einsum("abcd,nc,nd->nab", _T, r, s)
    Wuu[:, 0, 2] = np.einsum("abcd,nb,nd->nac", _T, q, s)
    Wuu[:, 0, 3] = np.einsum("abcd,nb,nc->nad", _T, q, r)
    Wuu[:, 1, 2] = np.einsum("abcd,na,nd->nbc", _T, p, s)
    Wuu[:, 1, 3] = np.einsum("abcd,na,nc->nbd", _T, p, r)
    Wuu[:, 2, 3] = np.einsum("abcd,na,nb->ncd", _T, p, q)

    gx = np.stack([np.einsum("nab,nb->na", jacs[x], gu[x]) for x in range(4)], axis=1)
    Hx = np.zeros((n, 4, 4, 3, 3))
    eye = np.eye(3)
    for x in range(4):
        u, g, rr = units[x], gu[x], norms[x]
        gdotu = np.einsum("na,na->n", g, u)
        uu = u[:, :, None] * u[:, None, :]
        Hx[:, x, x] = (
            3.0 * gdotu[:, None, None] * uu
            - gdotu[:, None, None] * eye
            - u[:, :, None] * g[:, None, :]
            - g[:, :, None] * u[:, None, :]
        ) / (rr**2)[:, None, None]
        for y in range(x + 1, 4):
            blk = jacs[x] @ Wuu[:, x, y] @ jacs[y]
            Hx[:, x, y] = blk
            Hx[:, y, x] = np.swapaxes(blk, 1, 2)

    sinb = np.sqrt(np.maximum(1.0 - w * w, 0.0))
    safe = np.where(sinb > 0, sinb, 1.0)
    # beta = arccos(-w)
    gb = gx / safe[:, None, None]
    Hb = Hx / safe[:, None, None, None, None] + (w / safe**3)[:, None, None, None, None] * (
        gx[:, :, None, :, None] * gx[:, None, :, None, :]
    )
    gpts = np.einsum("xP,nxa->nPa", _M, gb)
    Hpts = np.einsum("xP,yQ,nxyab->nPQab", _M, _M, Hb)
    return gpts, Hpts


def assemble_point_hessian(n_vertices: int, verts: np.ndarray, blocks: np.ndarray) -> sp.csr_matrix:
    """Scatter local (m, m, 3, 3) blocks on vertex tuples (n, m) into a 3V x 3V matrix."""
    n, m = verts.shape
    rows = (3 * verts[:, :, None, None, None] + np.arange(3)[None, None, None, :, None]) * np.ones(
        (1, 1, m, 1, 3), dtype=np.int64
    )
    cols = (3 * verts[:, None, :, None, None] + np.arange(3)[None, None, None, None, :]) * np.ones(
        (1, m, 1, 3, 1), dtype=np.int64
    )
    rows = np.broadcast_to(rows, (n, m, m, 3, 3)).reshape(-1)
    cols = np.broadcast_to(cols, (n, m, m, 3, 3)).reshape(-1)
    size = 3 * n_vertices
    mat = sp.coo_matrix((blocks.reshape(-1), (rows, cols)), shape=(size, size)).tocsr()
    mat.sum_duplicates()
    return mat


def willmore_hessian(surface: SimplicialSurface, f: np.ndarray) -> sp.csr_matrix:
    """Second derivative of the energy in the flattened positions ``f.reshape(-1)``."""
    f = np.asarray(f, dtype=float)
    fi, fj, fk, fl = stencil_points(surface, f)
    _, H = beta_derivatives(fi, fj, fk, fl)
    cd = edge_circle_data(fi, fl, fj, fk)
    w = np.where(cd.degenerate, 0.0, edge_weights(surface))
    H = H * w[:, None, None, None, None]
    return assemble_point_hessian(surface.n_vertices, surface.stencil, H)


def willmore_gradient_local(surface: SimplicialSurface, f: np.ndarray) -> np.ndarray:
    """Gradient assembled from per-edge derivatives of beta (no flux form involved)."""
    f = np.asarray(f, dtype=float)
    fi, fj, fk, fl = stencil_points(surface, f)
    g, _ = beta_derivatives(fi, fj, fk, fl)
    cd = edge_circle_data(fi, fl, fj, fk)
    w = np.where(cd.degenerate, 0.0, edge_weights(surface))
    out = np.zeros((surface.n_vertices, 3))
    np.add.at(out, surface.stencil.reshape(-1), (g * w[:, None, None]).reshape(-1, 3))
    return out


# -- conservation laws ---------------------------------------------------------


def conservation_forms(surface: SimplicialSurface, f: np.ndarray, strict: bool = False) -> ConservationForms:
    """Flux forms for translations, scaling, rotations and inversions.

    With ``strict=True`` a surface with boundary is rejected; otherwise the
    forms are computed everywhere and only vertices away from the boundary
    satisfy the identities (see :func:`identity_vertices`).
    """
    from .errors import SurfaceHasBoundary

    if strict and not surface.is_closed:
        raise SurfaceHasBoundary("conservation forms requested in strict mode on a surface with boundary")
    f = np.asarray(f, dtype=float)
    cd = circle_data(surface, f)
    tau = _flux_from_circles(surface, f, cd)
    grad = d_dual1(surface, tau)
    e = surface.edges
    fa, fb = f[e[:, 0]], f[e[:, 1]]
    fm = average(surface, f)
    df = fb - fa
    h = np.zeros(surface.n_edges)
    h[surface.interior_edges] = cd.h
    H = cross_ratio_matrix(surface) @ h
    H[surface.boundary_edges] = 0.0
    sigma = np.einsum("ea,ea->e", fm, tau)
    Hdf = H[:, None] * df
    rho = np.cross(fm, tau) + 0.5 * Hdf
    zeta = (
        0.5 * (np.cross(fa, np.cross(fb, tau)) + np.cross(fb, np.cross(fa, tau)))
        + fm * sigma[:, None]
        + np.cross(fm, Hdf)
    )
    return ConservationForms(tau=tau, sigma=sigma, rho=rho, zeta=zeta, f_mid=fm, h=h, H=H, gradient=grad)


def identity_vertices(surface: SimplicialSurface, depth: int = 2) -> np.ndarray:
    """Vertices at graph distance >= ``depth`` from the boundary (all, if closed)."""
    if surface.is_closed:
        return np.arange(surface.n_vertices)
    near = surface.is_boundary_vertex.copy()
    for _ in range(depth - 1):
        grow = near.copy()
        e = surface.edges
        grow[e[near[e[:, 0]], 1]] = True
        grow[e[near[e[:, 1]], 0]] = True
        near = grow
    return np.flatnonzero(~near)


def conservation_residuals(surface: SimplicialSurface, f: np.ndarray, forms: ConservationForms | None = None) -> dict:
    """Per-vertex residuals of the four identities ``d(form) - rhs``."""
    f = np.asarray(f, dtype=float)
    if forms is None:
        forms = conservation_forms(surface, f)
    g = forms.gradient
    fg = np.einsum("va,va->v", f, g)
    return {
        "tau": d_dual1(surface, forms.tau) - g,
        "sigma": d_dual1(surface, forms.sigma) - fg,
        "rho": d_dual1(surface, forms.rho) - np.cross(f, g),
        "zeta": d_dual1(surface, forms.zeta) - (np.cross(f, np.cross(f, g)) + f * fg[:, None]),
    }
