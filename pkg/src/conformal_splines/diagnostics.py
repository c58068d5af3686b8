"""Post-hoc certificates and experiment generators.

* conservation law residuals of the Willmore flux forms,
* flux integrals of ``tau - mu`` over dual cycles (balancing at a solution),
* tube meshes around closed space curves and their thin-tube invariants.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .conformal import cross_ratio_matrix
from .dec import average, average_adjoint, circulation, d_dual1, d_primal0, multiply_edge0, wedge
from .errors import DegenerateSample, OpenChain, ValidationError
from .mesh import SimplicialSurface, build_surface
from .solver import extrinsic_stress
from .willmore import conservation_forms, conservation_residuals, identity_vertices

IDENTITIES = ("tau", "sigma", "rho", "zeta")


# -- conservation laws -------------------------------------------------------------


def conservation_report(surface: SimplicialSurface, f: np.ndarray) -> dict:
    """Max residual of each conservation identity, relative to ``|grad W|_inf + 1``.

    On a surface with boundary only vertices at graph distance two or more
    from the boundary are checked.
    """
    f = np.asarray(f, dtype=float)
    forms = conservation_forms(surface, f)
    res = conservation_residuals(surface, f, forms)
    verts = identity_vertices(surface)
    g = forms.gradient[verts]
    scale = (float(np.abs(g).max()) if g.size else 0.0) + 1.0
    out = {}
    for name in IDENTITIES:
        r = np.asarray(res[name])[verts]
        out[name] = float(np.abs(r).max()) / scale if r.size else 0.0
    out["gradient_inf"] = scale - 1.0
    out["vertices_checked"] = int(len(verts))
    return out


# -- self-tests of the discrete operators -----------------------------------------------


def leibniz_residual(surface: SimplicialSurface, phi: np.ndarray, alpha: np.ndarray) -> float:
    """Max of ``|d(phi alpha) - phi d alpha - A*(d phi ^ alpha)|``, relative to the largest term."""
    phi = np.asarray(phi, dtype=float)
    alpha = np.asarray(alpha, dtype=float)
    lhs = d_dual1(surface, multiply_edge0(average(surface, phi), alpha))
    a = (phi[:, None] * d_dual1(surface, alpha)) if alpha.ndim == 2 else phi * d_dual1(surface, alpha)
    b = average_adjoint(surface, wedge(d_primal0(surface, phi), alpha))
    scale = max(float(np.abs(lhs).max()), float(np.abs(a).max()), float(np.abs(b).max()), 1e-300)
    return float(np.abs(lhs - a - b).max()) / scale


KERNEL_CHECK_MAX_EDGES = 3000


def kernel_dimension(surface: SimplicialSurface, rtol: float = 1e-9) -> dict:
    """Numerical kernel dimension of the extended cross ratio operator.

    Compares against the number of interior vertices plus boundary
    components. Uses a dense SVD, so meshes with more than
    ``KERNEL_CHECK_MAX_EDGES`` edges are skipped.
    """
    expected = int(surface.is_interior_vertex.sum()) + surface.n_boundary_components
    if surface.n_edges > KERNEL_CHECK_MAX_EDGES:
        return {"checked": False, "expected": expected, "dimension": None}
    s = np.linalg.svd(cross_ratio_matrix(surface).toarray(), compute_uv=False)
    dim = surface.n_edges - int((s > rtol * s.max()).sum())
    return {"checked": True, "expected": expected, "dimension": dim}


# -- flux classes ----------------------------------------------------------------------


def flux_form(surface: SimplicialSurface, f: np.ndarray, q: np.ndarray) -> np.ndarray:
    """The dual 1-form ``tau - mu`` whose periods are the Willmore fluxes."""
    f = np.asarray(f, dtype=float)
    tau = conservation_forms(surface, f).tau
    return tau - extrinsic_stress(surface, q, f)


def vertex_cycle(surface: SimplicialSurface, v: int) -> list[int]:
    """Dual cycle around an interior vertex (counterclockwise face chain)."""
    return surface.vertex_face_cycle(int(v))


def flux_class(surface: SimplicialSurface, f: np.ndarray, q: np.ndarray, cycles) -> np.ndarray:
    """Integrals of ``tau - mu`` over closed dual chains, one row per cycle.

    A cycle is a list of face indices, consecutive faces sharing an edge.
    Around a single vertex the integral equals ``grad W - d mu`` there, so at
    a converged solution it reproduces the recovered flux of a point
    constraint and vanishes at free vertices.
    """
    omega = flux_form(surface, f, q)
    cycles = list(cycles)
    out = np.zeros((len(cycles), 3))
    for r, cyc in enumerate(cycles):
        cyc = list(cyc)
        if not cyc:
            raise OpenChain("empty dual cycle")
        out[r] = circulation(surface, omega, cyc)
    return out


def balancing_residual(surface: SimplicialSurface, f: np.ndarray, q: np.ndarray, vertices) -> np.ndarray:
    """Sum of the flux integrals around the given vertices."""
    cycles = [vertex_cycle(surface, v) for v in vertices]
    return flux_class(surface, f, q, cycles).sum(axis=0)


# -- tubes -----------------------------------------------------------------------------


@dataclass(frozen=True)
class TubeSpec:
    """Closed centerline samples, thickness and mesh resolution.

    ``centerline`` holds the samples of a closed curve (the first point is
    not repeated at the end). ``thickness`` is a scalar or one value per
    sample. The tube has ``n`` rings of ``m`` vertices; with ``n`` unset one
    ring sits at every sample, otherwise the curve is resampled uniformly in
    arc length by linear interpolation.
    """

    centerline: np.ndarray
    thickness: float | np.ndarray
    m: int = 16
    n: int | None = None

    def validate(self) -> None:
        c = np.asarray(self.centerline, dtype=float)
        if c.ndim != 2 or c.shape[1] != 3 or len(c) < 3:
            raise ValidationError("centerline needs at least three points in R^3")
        if not np.all(np.isfinite(c)):
            raise ValidationError("centerline has non-finite coordinates")
        a = np.broadcast_to(np.asarray(self.thickness, dtype=float), (len(c),))
        if np.any(~np.isfinite(a)) or np.any(a <= 0.0):
            raise ValidationError("thickness must be positive")
        if self.m < 3 or (self.n is not None and self.n < 3):
            raise ValidationError("tube resolutions must be at least 3")
        seg = np.linalg.norm(np.roll(c, -1, axis=0) - c, axis=1)
        if np.any(seg <= 1e-12 * seg.sum()):
            raise DegenerateSample(f"repeated centerline sample at index {int(np.argmin(seg))}")


@dataclass(frozen=True)
class TubeInvariants:
    area: float
    volume: float
    willmore: float
    theta: float  # total torsion, accumulated (Re tau)
    theta_wrapped: float  # RMF monodromy angle in (-pi, pi]
    winding: int
    im_tau: float
    length: float


def _samples(spec: TubeSpec) -> tuple[np.ndarray, np.ndarray]:
    spec.validate()
    c = np.asarray(spec.centerline, dtype=float)
    a = np.broadcast_to(np.asarray(spec.thickness, dtype=float), (len(c),)).copy()
    if spec.n is None or spec.n == len(c):
        return c, a
    closed = np.vstack([c, c[:1]])
    s = np.concatenate([[0.0], np.cumsum(np.linalg.norm(np.diff(closed, axis=0), axis=1))])
    t = np.linspace(0.0, s[-1], spec.n, endpoint=False)
    pts = np.stack([np.interp(t, s, closed[:, d]) for d in range(3)], axis=1)
    return pts, np.interp(t, s, np.append(a, a[0]))


def _reflect(v: np.ndarray, u: np.ndarray) -> np.ndarray:
    return v - 2.0 * (v @ u) / (u @ u) * u


def _unit(v: np.ndarray) -> np.ndarray:
    return v / np.linalg.norm(v)


def _initial_normal(t0: np.ndarray, b0: np.ndarray | None) -> np.ndarray:
    if b0 is not None:
        return b0
    # straight at sample 0: any unit vector orthogonal to the tangent
    e = np.eye(3)[int(np.argmin(np.abs(t0)))]
    return _unit(e - (e @ t0) * t0)


def _vertex_tangents(c: np.ndarray) -> np.ndarray:
    seg = np.roll(c, -1, axis=0) - c
    u = seg / np.linalg.norm(seg, axis=1, keepdims=True)
    t = u + np.roll(u, 1, axis=0)
    norms = np.linalg.norm(t, axis=1, keepdims=True)
    if np.any(norms < 1e-12):
        raise DegenerateSample("centerline reverses direction at a sample")
    return t / norms


def _binormals(c: np.ndarray) -> list[np.ndarray | None]:
    seg = np.roll(c, -1, axis=0) - c
    out: list[np.ndarray | None] = []
    for i in range(len(c)):
        b = np.cross(seg[i - 1], seg[i])
        nb = np.linalg.norm(b)
        out.append(b / nb if nb > 1e-12 * np.linalg.norm(seg[i - 1]) * np.linalg.norm(seg[i]) else None)
    return out


def rotation_minimizing_frames(c: np.ndarray) -> tuple[np.ndarray, np.ndarray, float]:
    """Double-reflection frames at the samples and the closing monodromy angle.

    Returns tangents, first normals (before closure correction) and the
    angle that rotates the normal transported once around back onto the
    initial one, about the initial tangent, in ``(-pi, pi]``.
    """
    t = _vertex_tangents(c)
    n = len(c)
    normals = np.zeros_like(c)
    normals[0] = _initial_normal(t[0], _binormals(c)[0])
    r = normals[0]
    for i in range(n):
        j = (i + 1) % n
        v1 = c[j] - c[i]
        rl = _reflect(r, v1)
        tl = _reflect(t[i], v1)
        v2 = t[j] - tl
        r = _reflect(rl, v2) if v2 @ v2 > 1e-300 else rl
        r = _unit(r - (r @ t[j]) * t[j])
        if j:
            normals[j] = r
    theta = float(np.arctan2(np.cross(r, normals[0]) @ t[0], r @ normals[0]))
    if theta == -np.pi:
        theta = np.pi
    return t, normals, theta


def total_torsion(c: np.ndarray) -> float:
    """Sum of signed angles between consecutive discrete binormals.

    Straight samples (no binormal) are skipped; the sum runs once around
    the closed curve. Binormals are defined up to sign, so a flip at an
    inflection counts as no rotation: each angle is folded into (-pi/2, pi/2].
    """
    c = np.asarray(c, dtype=float)
    seg = np.roll(c, -1, axis=0) - c
    bs = _binormals(c)
    idx = [i for i, b in enumerate(bs) if b is not None]
    total = 0.0
    for a, b in zip(idx, idx[1:] + idx[:1]):
        # the binormal turns about the segment arriving at sample b
        axis = _unit(seg[b - 1])
        ang = float(np.arctan2(np.cross(bs[a], bs[b]) @ axis, bs[a] @ bs[b]))
        if ang > 0.5 * np.pi:
            ang -= np.pi
        elif ang <= -0.5 * np.pi:
            ang += np.pi
        total += ang
    return total


def generate_tube(spec: TubeSpec) -> tuple[np.ndarray, SimplicialSurface]:
    """Outward-oriented torus mesh around the centerline.

    The rotation-minimizing frame is twisted linearly along the curve by the
    monodromy angle so that the rings close up. Self-intersections of the
    tube are not detected.
    """
    c, a = _samples(spec)
    n, m = len(c), spec.m
    t, normals, theta = rotation_minimizing_frames(c)
    seg = np.linalg.norm(np.roll(c, -1, axis=0) - c, axis=1)
    s = np.concatenate([[0.0], np.cumsum(seg)[:-1]])
    twist = theta * s / seg.sum()
    binormals = np.cross(t, normals)
    nrm = np.cos(twist)[:, None] * normals + np.sin(twist)[:, None] * binormals
    bin_ = np.cross(t, nrm)
    phi = 2.0 * np.pi * np.arange(m) / m
    f = (
        c[:, None, :]
        + a[:, None, None] * (np.cos(phi)[None, :, None] * nrm[:, None, :] + np.sin(phi)[None, :, None] * bin_[:, None, :])
    ).reshape(-1, 3)

    k = np.arange(n)[:, None]
    j = np.arange(m)[None, :]
    v00 = k * m + j
    v01 = k * m + (j + 1) % m
    v10 = ((k + 1) % n) * m + j
    v11 = ((k + 1) % n) * m + (j + 1) % m
    faces = np.concatenate(
        [np.stack([v00, v01, v11], axis=-1).reshape(-1, 3), np.stack([v00, v11, v10], axis=-1).reshape(-1, 3)]
    )
    return f, build_surface(faces, n * m)


def discrete_curvature(c: np.ndarray) -> np.ndarray:
    """Turning-angle curvature ``2 sin(theta/2) / ds`` at each sample."""
    seg = np.roll(c, -1, axis=0) - c
    length = np.linalg.norm(seg, axis=1)
    u = seg / length[:, None]
    cosang = np.clip(np.einsum("ia,ia->i", np.roll(u, 1, axis=0), u), -1.0, 1.0)
    ang = np.arccos(cosang)
    ds = 0.5 * (length + np.roll(length, 1))
    return 2.0 * np.sin(0.5 * ang) / ds


def tube_invariants(spec: TubeSpec) -> TubeInvariants:
    """Thin-tube approximations of area, volume, Willmore energy and modulus.

    Integrals use the periodic trapezoid rule on the samples, whose weight
    at a sample is the mean length of its two segments.
    """
    c, a = _samples(spec)
    seg = np.linalg.norm(np.roll(c, -1, axis=0) - c, axis=1)
    ds = 0.5 * (seg + np.roll(seg, 1))
    kappa = discrete_curvature(c)
    _, _, wrapped = rotation_minimizing_frames(c)
    torsion = total_torsion(c)
    winding = int(np.round((torsion - wrapped) / (2.0 * np.pi)))
    return TubeInvariants(
        area=float(2.0 * np.pi * np.sum(a * ds)),
        volume=float(np.pi * np.sum(a**2 * ds)),
        willmore=float(0.5 * np.pi * np.sum((1.0 / a + 0.5 * a * kappa**2) * ds)),
        theta=float(wrapped + 2.0 * np.pi * winding),
        theta_wrapped=wrapped,
        winding=winding,
        im_tau=float(np.sum(ds / a)),
        length=float(seg.sum()),
    )


# -- sample curves ---------------------------------------------------------------------


def circle_curve(n: int, radius: float = 1.0) -> np.ndarray:
    t = 2.0 * np.pi * np.arange(n) / n
    return np.stack([radius * np.cos(t), radius * np.sin(t), np.zeros(n)], axis=1)


def torus_knot(n: int, p: int = 2, q: int = 3, R: float = 2.0, r: float = 1.0) -> np.ndarray:
    t = 2.0 * np.pi * np.arange(n) / n
    rad = R + r * np.cos(q * t)
    return np.stack([rad * np.cos(p * t), rad * np.sin(p * t), r * np.sin(q * t)], axis=1)


def spherical_curve(n: int, lobes: int = 3, amplitude: float = 0.6) -> np.ndarray:
    """Closed non-planar curve on the unit sphere (a wavy latitude)."""
    t = 2.0 * np.pi * np.arange(n) / n
    lat = amplitude * np.sin(lobes * t)
    return np.stack([np.cos(lat) * np.cos(t), np.cos(lat) * np.sin(t), np.sin(lat)], axis=1)
