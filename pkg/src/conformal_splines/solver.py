"""Constrained Willmore (or area) critical points by Newton's method on the KKT system.

Unknowns are the vertex positions and one multiplier per constraint row.
With the Lagrangian ``O(f) - <nu_flux, f> - y . g(f)`` the residual is::

    stationarity = grad O - nu_flux - J^T y
    feasibility  = g(f)

Constraint rows linear in log edge lengths (conformal class, boundary
half cross ratios, scale factors) pull back to vertex forces through the
extrinsic conformal stress: ``J^T y`` restricted to them is ``d mu`` with
``mu`` built from ``q = C^T y_conf + U^T y_scale``. The multipliers of
point constraints are the fluxes at those vertices.
"""

from __future__ import annotations

import logging
from dataclasses import dataclass, field

import numpy as np
import scipy.sparse as sp
import scipy.sparse.linalg as spla

from . import geometry
from .conformal import ConformalClass, cross_ratio_matrix, scale_rows
from .dec import d_dual1
from .errors import (
    DimensionMismatch,
    LineSearchFailure,
    MaxIterations,
    SingularConfiguration,
    SingularKKT,
    UnbalancedFlux,
    ValidationError,
    ZeroLengthEdge,
)
from .mesh import SimplicialSurface
from .willmore import assemble_point_hessian, willmore_gradient, willmore_hessian

logger = logging.getLogger(__name__)

OBJECTIVES = ("willmore", "area")


# -- constraints ---------------------------------------------------------------


@dataclass(frozen=True)
class ScaleConstraint:
    vertex: int
    value: float
    mode: str = "vertex"  # or "link"


@dataclass
class ConstraintSet:
    """Declarative constraints for one solve.

    ``conformal`` is the target class (``None`` disables the conformal
    constraint). ``boundary_rows`` switches the half cross ratio rows on or
    off, either globally or per boundary component. Scale constraints are
    measured against ``reference_metric`` (log edge lengths).
    """

    objective: str = "willmore"
    conformal: ConformalClass | None = None
    boundary_rows: bool | list[bool] = True
    points: dict[int, np.ndarray] = field(default_factory=dict)
    fluxes: dict[int, np.ndarray] = field(default_factory=dict)
    scales: list[ScaleConstraint] = field(default_factory=list)
    reference_metric: np.ndarray | None = None
    area: float | None = None
    volume: float | None = None
    identify: list[tuple[int, int]] = field(default_factory=list)

    def validate(self, surface: SimplicialSurface) -> None:
        nv = surface.n_vertices
        if self.objective not in OBJECTIVES:
            raise ValidationError(f"unknown objective {self.objective!r}")
        for name, d in (("point", self.points), ("flux", self.fluxes)):
            for v, t in d.items():
                if not 0 <= int(v) < nv:
                    raise ValidationError(f"{name} constraint on unknown vertex {v}")
                if np.shape(t) != (3,) or not np.all(np.isfinite(t)):
                    raise ValidationError(f"{name} constraint at vertex {v} needs three finite numbers")
        both = set(map(int, self.points)) & set(map(int, self.fluxes))
        if both:
            raise ValidationError(f"vertex {min(both)} is both point- and flux-constrained")
        for s in self.scales:
            if not 0 <= s.vertex < nv:
                raise ValidationError(f"scale constraint on unknown vertex {s.vertex}")
            if s.mode not in ("vertex", "link"):
                raise ValidationError(f"unknown scale mode {s.mode!r}")
        if self.scales and self.reference_metric is None:
            raise ValidationError("scale constraints need a reference metric")
        if self.reference_metric is not None and np.shape(self.reference_metric) != (surface.n_edges,):
            raise ValidationError("reference metric does not match the edge count")
        if self.conformal is not None and np.shape(self.conformal.values) != (surface.n_edges,):
            raise ValidationError("conformal class does not match the edge count")
        if isinstance(self.boundary_rows, (list, tuple)) and len(self.boundary_rows) != surface.n_boundary_components:
            raise ValidationError("boundary row switches must match the number of boundary components")
        if self.volume is not None and not surface.is_closed:
            raise ValidationError("a volume constraint needs a closed surface")
        for a, b in self.identify:
            if not (0 <= a < nv and 0 <= b < nv) or a == b:
                raise ValidationError(f"bad identification ({a}, {b})")
        balancing_check(self, surface)


def balancing_check(constraints: ConstraintSet, surface: SimplicialSurface, rtol: float = 1e-10) -> dict:
    """Necessary balancing of prescribed fluxes.

    On a closed genus-0 surface without point constraints the prescribed
    fluxes must sum to zero. With point constraints (whose multipliers are
    unknown fluxes) or in higher genus the check is deferred to the solution,
    where :func:`conformal_splines.diagnostics.flux_class` can evaluate it.
    """
    nus = np.array([np.asarray(v, dtype=float) for v in constraints.fluxes.values()]).reshape(-1, 3)
    total = nus.sum(axis=0) if len(nus) else np.zeros(3)
    scale = float(np.linalg.norm(nus, axis=1).sum()) if len(nus) else 0.0
    report = {"sum": total, "scale": scale, "checked": False, "deferred": False}
    if not len(nus):
        return report
    applicable = surface.is_closed and surface.genus == 0 and not constraints.points and not constraints.identify
    if not applicable:
        report["deferred"] = True
        return report
    report["checked"] = True
    if np.linalg.norm(total) > rtol * scale:
        raise UnbalancedFlux(f"prescribed fluxes sum to {total.tolist()} on a sphere; they must vanish")
    return report


# -- stress and quadratic differentials -------------------------------------------


def extrinsic_stress(surface: SimplicialSurface, q: np.ndarray, f: np.ndarray) -> np.ndarray:
    """Dual 1-form ``mu_ij = -q_ij df_ij / |df_ij|^2``."""
    f = np.asarray(f, dtype=float)
    e = surface.edges
    df = f[e[:, 1]] - f[e[:, 0]]
    l2 = np.einsum("ea,ea->e", df, df)
    if np.any(l2 == 0.0):
        raise ZeroLengthEdge("zero-length edge in extrinsic stress")
    return -np.asarray(q, dtype=float)[:, None] * df / l2[:, None]


def active_conformal_rows(surface: SimplicialSurface, boundary_rows) -> np.ndarray:
    rows = surface.is_interior_edge.copy()
    if surface.n_boundary_components:
        if isinstance(boundary_rows, (bool, np.bool_)):
            on = [bool(boundary_rows)] * surface.n_boundary_components
        else:
            on = [bool(x) for x in boundary_rows]
        be = surface.boundary_edges
        comp = surface.boundary_component[surface.edges[be, 0]]
        rows[be] = np.array(on)[comp]
    return np.flatnonzero(rows)


def multiplier_to_qd(surface: SimplicialSurface, lam: np.ndarray, rows: np.ndarray | None = None) -> np.ndarray:
    """Quadratic differential ``q = C^T lam`` over the given (active) rows."""
    C = cross_ratio_matrix(surface)
    if rows is None:
        rows = np.arange(surface.n_edges)
    return C[rows].T @ np.asarray(lam, dtype=float)


def qd_vertex_sums(surface: SimplicialSurface, q: np.ndarray) -> tuple[np.ndarray, np.ndarray]:
    """Vertex sums of ``q`` at interior vertices and per boundary component."""
    sums = abs(surface.vertex_edge_incidence) @ np.asarray(q, dtype=float)
    interior = sums[surface.is_interior_vertex]
    comps = np.array([sums[vs].sum() for vs in surface.boundary_vertex_sets])
    return interior, comps


# -- the KKT system ---------------------------------------------------------------


def _dlog_length(surface: SimplicialSurface, f: np.ndarray) -> sp.csr_matrix:
    """Jacobian (E x 3V) of the log edge lengths."""
    e = surface.edges
    df = f[e[:, 1]] - f[e[:, 0]]
    l2 = np.einsum("ea,ea->e", df, df)
    if np.any(l2 <= 0.0):
        raise SingularConfiguration("zero-length edge encountered")
    g = df / l2[:, None]
    ne = len(e)
    rows = np.repeat(np.arange(ne), 6)
    cols = np.concatenate([3 * e[:, :1] + np.arange(3), 3 * e[:, 1:] + np.arange(3)], axis=1).reshape(-1)
    vals = np.concatenate([-g, g], axis=1).reshape(-1)
    return sp.csr_matrix((vals, (rows, cols)), shape=(ne, 3 * surface.n_vertices))


def _log_length_hessian(surface: SimplicialSurface, f: np.ndarray, q: np.ndarray) -> sp.csr_matrix:
    """``sum_e q_e * Hess(log l_e)`` in the positions."""
    e = surface.edges
    df = f[e[:, 1]] - f[e[:, 0]]
    l2 = np.einsum("ea,ea->e", df, df)
    dh = df / np.sqrt(l2)[:, None]
    He = (np.eye(3) - 2.0 * dh[:, :, None] * dh[:, None, :]) / l2[:, None, None] * q[:, None, None]
    blocks = np.stack([np.stack([He, -He], axis=1), np.stack([-He, He], axis=1)], axis=1)
    return assemble_point_hessian(surface.n_vertices, e, blocks)


class KKTProblem:
    """Residual and Jacobian of the constrained stationarity conditions."""

    def __init__(self, surface: SimplicialSurface, constraints: ConstraintSet):
        constraints.validate(surface)
        self.surface = surface
        self.constraints = constraints
        nv = surface.n_vertices
        self.n_primal = 3 * nv
        C = cross_ratio_matrix(surface)

        blocks: list[tuple[str, int]] = []
        if constraints.conformal is not None:
            self.conf_rows = active_conformal_rows(surface, constraints.boundary_rows)
            self.C_act = C[self.conf_rows]
            self.xi = constraints.conformal.values[self.conf_rows]
        else:
            self.conf_rows = np.zeros(0, dtype=np.int64)
            self.C_act = sp.csr_matrix((0, surface.n_edges))
            self.xi = np.zeros(0)
        blocks.append(("conformal", len(self.conf_rows)))

        self.scale_vertices = np.zeros(0, dtype=np.int64)
        self.scale_targets = np.zeros(0)
        self.U = sp.csr_matrix((0, surface.n_edges))
        if constraints.scales:
            vs, targets, mats = [], [], []
            for mode in ("vertex", "link"):
                group = [s for s in constraints.scales if s.mode == mode]
                if not group:
                    continue
                rows = scale_rows(surface, [s.vertex for s in group], mode=mode)
                value = {s.vertex: s.value for s in group}
                vs.append(rows.vertices)
                targets.append([value[int(c)] for c in rows.centers])
                mats.append(rows.matrix)
            self.scale_vertices = np.concatenate(vs)
            if len(set(self.scale_vertices.tolist())) != len(self.scale_vertices):
                raise ValidationError("scale constraints overlap between vertex and link mode")
            self.scale_targets = np.concatenate([np.asarray(t, dtype=float) for t in targets])
            self.U = sp.vstack(mats).tocsr()
            self.lam_ref = np.asarray(constraints.reference_metric, dtype=float)
        blocks.append(("scale", len(self.scale_vertices)))

        self.point_vertices = np.array(sorted(int(v) for v in constraints.points), dtype=np.int64)
        self.point_targets = np.array(
            [np.asarray(constraints.points[v], dtype=float) for v in self.point_vertices]
        ).reshape(-1, 3)
        blocks.append(("points", 3 * len(self.point_vertices)))
        self.identify = np.array(constraints.identify, dtype=np.int64).reshape(-1, 2)
        blocks.append(("identify", 3 * len(self.identify)))
        blocks.append(("area", 1 if constraints.area is not None else 0))
        blocks.append(("volume", 1 if constraints.volume is not None else 0))

        self.slices: dict[str, slice] = {}
        start = 0
        for name, n in blocks:
            self.slices[name] = slice(start, start + n)
            start += n
        self.n_dual = start

        self.nu_flux = np.zeros((nv, 3))
        for v, nu in constraints.fluxes.items():
            self.nu_flux[int(v)] = np.asarray(nu, dtype=float)

        sel_rows = np.arange(3 * len(self.point_vertices))
        sel_cols = (3 * self.point_vertices[:, None] + np.arange(3)).reshape(-1)
        self._P = sp.csr_matrix((np.ones(len(sel_rows)), (sel_rows, sel_cols)), shape=(len(sel_rows), 3 * nv))
        ni = len(self.identify)
        r = np.arange(3 * ni)
        ca = (3 * self.identify[:, :1] + np.arange(3)).reshape(-1)
        cb = (3 * self.identify[:, 1:] + np.arange(3)).reshape(-1)
        self._I = sp.csr_matrix(
            (np.concatenate([np.ones(3 * ni), -np.ones(3 * ni)]), (np.concatenate([r, r]), np.concatenate([ca, cb]))),
            shape=(3 * ni, 3 * nv),
        )

    # -- pieces -----------------------------------------------------------------

    def split(self, y: np.ndarray) -> dict:
        y = np.asarray(y, dtype=float)
        if y.shape != (self.n_dual,):
            raise DimensionMismatch(f"expected {self.n_dual} multipliers, got {y.shape}")
        return {k: y[s] for k, s in self.slices.items()}

    def objective_gradient(self, f: np.ndarray) -> np.ndarray:
        if self.constraints.objective == "area":
            return geometry.area_gradient(self.surface, f)
        return willmore_gradient(self.surface, f)

    def objective_hessian(self, f: np.ndarray) -> sp.csr_matrix:
        if self.constraints.objective == "area":
            return geometry.area_hessian(self.surface, f)
        return willmore_hessian(self.surface, f)

    def edge_multipliers(self, y: np.ndarray) -> np.ndarray:
        """The edge function ``q = C^T y_conf + U^T y_scale``."""
        parts = self.split(y)
        return self.C_act.T @ parts["conformal"] + self.U.T @ parts["scale"]

    def feasibility(self, f: np.ndarray) -> dict:
        s = self.surface
        f = np.asarray(f, dtype=float)
        e = s.edges
        lam = np.log(np.linalg.norm(f[e[:, 1]] - f[e[:, 0]], axis=1))
        out = {
            "conformal": self.C_act @ lam - self.xi,
            "scale": (self.U @ (lam - self.lam_ref) - self.scale_targets) if len(self.scale_vertices) else np.zeros(0),
            "points": (f[self.point_vertices] - self.point_targets).reshape(-1),
            "identify": (f[self.identify[:, 0]] - f[self.identify[:, 1]]).reshape(-1),
            "area": np.zeros(0),
            "volume": np.zeros(0),
        }
        if self.constraints.area is not None:
            out["area"] = np.array([geometry.area(s, f) - self.constraints.area])
        if self.constraints.volume is not None:
            out["volume"] = np.array([geometry.volume(s, f) - self.constraints.volume])
        return out

    def constraint_jacobian(self, f: np.ndarray) -> sp.csr_matrix:
        f = np.asarray(f, dtype=float)
        D = _dlog_length(self.surface, f)
        rows = [self.C_act @ D, self.U @ D, self._P, self._I]
        if self.constraints.area is not None:
            rows.append(sp.csr_matrix(geometry.area_gradient(self.surface, f).reshape(1, -1)))
        if self.constraints.volume is not None:
            rows.append(sp.csr_matrix(geometry.volume_gradient(self.surface, f).reshape(1, -1)))
        return sp.vstack(rows, format="csr")

    def residual(self, f: np.ndarray, y: np.ndarray) -> tuple[np.ndarray, dict]:
        """Stationarity (V x 3) and feasibility blocks."""
        f = np.asarray(f, dtype=float)
        if f.shape != (self.surface.n_vertices, 3):
            raise DimensionMismatch(f"positions must have shape ({self.surface.n_vertices}, 3)")
        parts = self.split(y)
        q = self.edge_multipliers(y)
        stat = self.objective_gradient(f) - self.nu_flux - d_dual1(self.surface, extrinsic_stress(self.surface, q, f))
        stat[self.point_vertices] -= parts["points"].reshape(-1, 3)
        ni = len(self.identify)
        if ni:
            yi = parts["identify"].reshape(-1, 3)
            np.add.at(stat, self.identify[:, 0], -yi)
            np.add.at(stat, self.identify[:, 1], yi)
        if self.constraints.area is not None:
            stat -= parts["area"][0] * geometry.area_gradient(self.surface, f)
        if self.constraints.volume is not None:
            stat -= parts["volume"][0] * geometry.volume_gradient(self.surface, f)
        return stat, self.feasibility(f)

    def residual_vector(self, f: np.ndarray, y: np.ndarray) -> np.ndarray:
        stat, feas = self.residual(f, y)
        return np.concatenate([stat.reshape(-1)] + [feas[k] for k in self.slices])

    def lagrangian_hessian(self, f: np.ndarray, y: np.ndarray) -> sp.csr_matrix:
        f = np.asarray(f, dtype=float)
        parts = self.split(y)
        H = self.objective_hessian(f)
        q = self.edge_multipliers(y)
        if np.any(q != 0.0):
            H = H - _log_length_hessian(self.surface, f, q)
        if self.constraints.area is not None and parts["area"][0] != 0.0:
            H = H - parts["area"][0] * geometry.area_hessian(self.surface, f)
        if self.constraints.volume is not None and parts["volume"][0] != 0.0:
            H = H - parts["volume"][0] * geometry.volume_hessian(self.surface, f)
        return H.tocsr()

    def kkt_matrix(self, f: np.ndarray, y: np.ndarray) -> sp.csc_matrix:
        """Symmetric saddle matrix ``[[H, J^T], [J, 0]]``.

        It maps ``(df, -dy)`` to the first-order change of
        :meth:`residual_vector` under ``(f + df, y + dy)``.
        """
        H = self.lagrangian_hessian(f, y)
        J = self.constraint_jacobian(f)
        return sp.bmat([[H, J.T], [J, None]], format="csc")


def kkt_residual(surface: SimplicialSurface, constraints: ConstraintSet, f: np.ndarray, y: np.ndarray | None = None):
    problem = KKTProblem(surface, constraints)
    if y is None:
        y = np.zeros(problem.n_dual)
    return problem.residual(f, y)


def assemble_jacobian(surface: SimplicialSurface, constraints: ConstraintSet, f: np.ndarray, y: np.ndarray | None = None):
    problem = KKTProblem(surface, constraints)
    if y is None:
        y = np.zeros(problem.n_dual)
    return problem.kkt_matrix(f, y)


# -- linear algebra ---------------------------------------------------------------


def solve_saddle(
    K: sp.csc_matrix,
    rhs: np.ndarray,
    n_primal: int,
    primal_shift: float = 0.0,
    dual_shift: float = 1e-12,
    tol: float = 1e-10,
    refinements: int = 30,
) -> np.ndarray | None:
    """Solve ``(K + diag(primal_shift I, 0)) x = rhs``; ``None`` signals breakdown.

    Redundant constraint rows make ``K`` singular but consistent; a tiny
    negative shift of the dual block keeps the factorization well defined
    and iterative refinement against the unshifted matrix removes its effect.
    """
    n = K.shape[0]
    shift = np.concatenate([np.full(n_primal, primal_shift), np.zeros(n - n_primal)])
    target = (K + sp.diags(shift)).tocsc()
    scale = max(1.0, abs(K).max())
    reg = target + sp.diags(np.concatenate([np.zeros(n_primal), np.full(n - n_primal, -dual_shift * scale)]))
    reg = reg.tocsc()
    norm_k = abs(target).sum(axis=1).max()
    # symmetric ordering without pivoting is far sparser; fall back to
    # partial pivoting when refinement cannot reach the backward error
    for spec, thresh in (("MMD_AT_PLUS_A", 0.0), ("COLAMD", 1.0)):
        try:
            lu = spla.splu(reg, permc_spec=spec, diag_pivot_thresh=thresh, options={"SymmetricMode": thresh == 0.0})
        except RuntimeError:
            continue
        x = _refine(lu, target, rhs, norm_k, tol, refinements)
        if x is not None:
            return x
    return None


def _refine(lu, target, rhs, norm_k, tol, refinements):
    x = lu.solve(rhs)
    if not np.all(np.isfinite(x)):
        return None
    best, best_err = x, np.inf
    for _ in range(refinements):
        r = rhs - target @ x
        err = np.linalg.norm(r, np.inf) / (norm_k * np.linalg.norm(x, np.inf) + np.linalg.norm(rhs, np.inf) + 1e-300)
        if err < best_err:
            best, best_err = x.copy(), err
        if err <= tol:
            return x
        dx = lu.solve(r)
        if not np.all(np.isfinite(dx)):
            break
        x = x + dx
    return best if best_err <= tol else None


# -- Newton --------------------------------------------------------------------------


@dataclass
class SolverOptions:
    tol: float = 1e-6
    tol_constraint: float = 1e-8
    max_iters: int = 200
    damping_initial: float = 1e-8
    damping_factor: float = 10.0
    damping_max: float = 1e6
    armijo: float = 1e-4
    backtrack: float = 0.5
    max_backtracks: int = 40


@dataclass
class SolverState:
    f: np.ndarray
    multipliers: dict
    stationarity_norm: float
    feasibility_norm: float
    iterations: int
    damping: float
    converged: bool = False
    q: np.ndarray | None = None
    fluxes: dict = field(default_factory=dict)
    history: list = field(default_factory=list)

    @property
    def residual_norm(self) -> float:
        return max(self.stationarity_norm, self.feasibility_norm)


def _norms(problem: KKTProblem, f, y):
    stat, feas = problem.residual(f, y)
    fvec = np.concatenate([feas[k] for k in problem.slices])
    s = float(np.linalg.norm(stat))
    c = float(np.abs(fvec).max()) if fvec.size else 0.0
    return stat, fvec, s, c


def _make_state(problem: KKTProblem, f, y, s, c, it, damping, converged, history) -> SolverState:
    parts = problem.split(y)
    fluxes = {int(v): parts["points"].reshape(-1, 3)[r].copy() for r, v in enumerate(problem.point_vertices)}
    for v, nu in problem.constraints.fluxes.items():
        fluxes[int(v)] = np.asarray(nu, dtype=float)
    return SolverState(
        f=f.copy(),
        multipliers={k: v.copy() for k, v in parts.items()},
        stationarity_norm=s,
        feasibility_norm=c,
        iterations=it,
        damping=damping,
        converged=converged,
        q=problem.edge_multipliers(y),
        fluxes=fluxes,
        history=list(history),
    )


def newton_solve(
    surface: SimplicialSurface,
    f0: np.ndarray,
    constraints: ConstraintSet,
    options: SolverOptions | None = None,
    y0: np.ndarray | None = None,
) -> SolverState:
    """Damped Newton iteration on the full KKT system.

    Terminates when the stationarity residual (Euclidean norm over
    vertices) is below ``tol`` and every constraint residual is below
    ``tol_constraint``. Raises ``MaxIterations``, ``LineSearchFailure`` or
    ``SingularKKT`` carrying the best iterate in ``.state``.
    """
    opts = options or SolverOptions()
    problem = KKTProblem(surface, constraints)
    f = np.array(f0, dtype=float)
    y = np.zeros(problem.n_dual) if y0 is None else np.array(y0, dtype=float)
    n = problem.n_primal
    history = []
    damping = 0.0

    stat, fvec, s, c = _norms(problem, f, y)
    for it in range(opts.max_iters + 1):
        history.append((s, c))
        logger.debug("iteration %d: stationarity %.3e feasibility %.3e", it, s, c)
        if s < opts.tol and c < opts.tol_constraint:
            return _make_state(problem, f, y, s, c, it, damping, True, history)
        if it == opts.max_iters:
            raise MaxIterations(
                f"no convergence after {opts.max_iters} iterations (stationarity {s:.3e}, feasibility {c:.3e})",
                state=_make_state(problem, f, y, s, c, it, damping, False, history),
            )
        F = np.concatenate([stat.reshape(-1), fvec])
        merit = float(F @ F)
        K = problem.kkt_matrix(f, y)

        damping = 0.0
        accepted = False
        while True:
            sol = solve_saddle(K, -F, n, primal_shift=damping)
            if sol is not None:
                df, dy = sol[:n].reshape(-1, 3), -sol[n:]
                t = 1.0
                for _ in range(opts.max_backtracks):
                    try:
                        ft, yt = f + t * df, y + t * dy
                        st, fv, sn, cn = _norms(problem, ft, yt)
                        trial = float(st.reshape(-1) @ st.reshape(-1) + fv @ fv)
                    except (ZeroLengthEdge, SingularConfiguration, FloatingPointError, ValueError):
                        trial = np.inf
                    if np.isfinite(trial) and trial <= (1.0 - 2.0 * opts.armijo * t) * merit:
                        accepted = True
                        break
                    t *= opts.backtrack
                if accepted:
                    logger.debug("accepted step %.3e with damping %.1e", t, damping)
                    f, y, stat, fvec, s, c = ft, yt, st, fv, sn, cn
                    break
            damping = opts.damping_initial if damping == 0.0 else damping * opts.damping_factor
            if damping > opts.damping_max:
                state = _make_state(problem, f, y, s, c, it, damping, False, history)
                if sol is None:
                    raise SingularKKT("KKT factorization failed up to the maximum damping", state=state)
                raise LineSearchFailure("no acceptable step along the damped Newton directions", state=state)
    raise AssertionError("unreachable")


def solve_report(state: SolverState) -> dict:
    return {
        "converged": state.converged,
        "iterations": state.iterations,
        "residual_norm": state.residual_norm,
        "stationarity_norm": state.stationarity_norm,
        "feasibility_norm": state.feasibility_norm,
        "damping": state.damping,
    }
