"""Newton solvers for the two Dirichlet problems of the system.

Both second-order equations are discretized in flux (divergence) form on the
logical grid.  Gradients of the unknown are built at cell-face midpoints
(face-aligned logical difference plus an averaged cross difference, pushed
through the map metric), every face carries the physical area of its two
half-cells, and the nodal residual is the weighted divergence of the face
fluxes.  On tensor-product rectangle grids this collapses to the classical
five-point face-flux scheme with arithmetic face averaging, which is
monotone.

For the potential equation the scheme is variational by construction: the
residual is exactly -1/(node area) times the gradient of the discrete energy
functional, so the discrete Euler-Lagrange identity holds to roundoff.
"""

from __future__ import annotations

from dataclasses import dataclass, field

import numpy as np
import scipy.sparse as sp
import scipy.sparse.linalg as spla

from .crsystem import SolutionPair, u_from_v
from .errors import UndefinedCoefficientError, ZeroARejectedError
from .grid import BoundaryFunction, GridDomain, ScalarField

__all__ = [
    "SolverOptions",
    "SolveReport",
    "flux_primitive",
    "flux_primitive_integral",
    "residual_potential",
    "residual_v",
    "energy_functional",
    "energy_gradient",
    "harmonic_extension",
    "solve_dirichlet_f",
    "solve_dirichlet_v",
]

# Direct sparse factorization up to this many unknowns, iterative above.
_DIRECT_LIMIT = 200_000


@dataclass
class SolverOptions:
    max_newton_iters: int = 25
    newton_tol: float = 1e-9
    damping: float = 1.0
    linear_solver_tol: float = 1e-12
    continuation_steps: int = 4

    def __post_init__(self):
        if not (0.0 < self.damping <= 1.0):
            raise ValueError("damping must lie in (0, 1]")
        if self.newton_tol <= 0 or self.linear_solver_tol <= 0:
            raise ValueError("tolerances must be positive")


@dataclass
class SolveReport:
    converged: bool
    iterations: int
    final_residual: float
    ellipticity_min: float


def flux_primitive(y, v, a: float):
    """Closed-form x-flux A(y, v) of the potential equation.

    A(y, v) = integral_0^v (w^2 + y^2 + a^2)^(-1/2) dw
            = log[(sqrt(v^2 + y^2 + a^2) + v) / sqrt(y^2 + a^2)],

    odd in v with dA/dv = (v^2 + y^2 + a^2)^(-1/2).  Undefined when
    y = a = 0.
    """
    y = np.asarray(y, dtype=float)
    v = np.asarray(v, dtype=float)
    base = y**2 + a**2
    if np.any(base == 0.0):
        raise UndefinedCoefficientError("flux primitive undefined at y = a = 0")
    s = np.sqrt(v**2 + base)
    # evaluate on the cancellation-free side and use oddness
    out = np.where(v >= 0.0, np.log((s + v) / np.sqrt(base)), -np.log((s - v) / np.sqrt(base)))
    if out.ndim == 0:
        return float(out)
    return out


def flux_primitive_integral(y, v, a: float):
    """B(y, v) = integral_0^v A(y, w) dw in closed form:
    B = v A(y, v) - sqrt(v^2 + y^2 + a^2) + sqrt(y^2 + a^2)."""
    y = np.asarray(y, dtype=float)
    v = np.asarray(v, dtype=float)
    s = np.sqrt(v**2 + y**2 + a**2)
    return v * flux_primitive(y, v, a) - s + np.sqrt(y**2 + a**2)


# -- face-based discrete operators -------------------------------------------


class _FaceOperators:
    """Sparse face-gradient operators and quadrature weights for one grid.

    For each face family ('x' faces joining logically horizontal neighbours,
    'y' faces joining vertical neighbours) this holds operators Gx, Gy taking
    nodal values to physical df/dx, df/dy at the face midpoints, the face
    weights (areas of the two adjacent half-cells), the face midpoint y
    coordinates, and a two-point averaging operator onto faces.

    The map metric entering the chain rule is built by applying the *same*
    logical difference stencils to the node coordinates as to the field
    (freestream preservation).  Using the analytic metric instead would leave
    an O(h^2 |map'''| / J) error that blows up where the disc map degenerates
    at the logical corners; with matched stencils the map's own derivative
    error cancels and the face gradients stay second order on the whole grid.
    """

    def __init__(self, dom: GridDomain):
        self.dom = dom
        nx, ny = dom.nx, dom.ny
        n = nx * ny
        cells = dom.cell_areas()

        for family in ("x", "y"):
            dxi, deta, avg, fid = _face_difference_ops(dom, family)
            x_xi = dxi @ dom.x.ravel()
            x_eta = deta @ dom.x.ravel()
            y_xi = dxi @ dom.y.ravel()
            y_eta = deta @ dom.y.ravel()
            jac = x_xi * y_eta - x_eta * y_xi
            gx = sp.diags(y_eta / jac) @ dxi - sp.diags(y_xi / jac) @ deta
            gy = sp.diags(x_xi / jac) @ deta - sp.diags(x_eta / jac) @ dxi
            if family == "x":
                w = np.zeros((nx - 1, ny))
                w[:, 1:] += 0.5 * cells
                w[:, :-1] += 0.5 * cells
                self.x_Gx, self.x_Gy, self.x_avg = gx.tocsr(), gy.tocsr(), avg
                self.x_w = w.ravel()
                self.x_y = avg @ dom.y.ravel()
            else:
                w = np.zeros((nx, ny - 1))
                w[1:, :] += 0.5 * cells
                w[:-1, :] += 0.5 * cells
                self.y_Gx, self.y_Gy, self.y_avg = gx.tocsr(), gy.tocsr(), avg
                self.y_w = w.ravel()
                self.y_y = avg @ dom.y.ravel()

        self._build_dual_mesh()
        self.node_area = dom.node_areas().ravel()
        flat_interior = dom.interior_mask.ravel()
        self.interior_idx = np.flatnonzero(flat_interior)
        self.boundary_idx = np.flatnonzero(~flat_interior)

    def _build_dual_mesh(self):
        """Centroid-dual interfaces for the vertex-centered finite-volume
        divergence.

        Each interior logical edge carries the straight interface joining the
        centroids of its two adjacent cells; the interface normals around an
        interior node close up exactly, so constant fluxes have exactly zero
        discrete divergence on any grid (the property the energy-quadrature
        pairing lacks on curved grids).
        """
        dom = self.dom
        nx, ny = dom.nx, dom.ny
        n = nx * ny
        ccx = 0.25 * (dom.x[:-1, :-1] + dom.x[1:, :-1] + dom.x[:-1, 1:] + dom.x[1:, 1:])
        ccy = 0.25 * (dom.y[:-1, :-1] + dom.y[1:, :-1] + dom.y[:-1, 1:] + dom.y[1:, 1:])

        def nid(i, j):
            return (i * ny + j).ravel()

        # x edges (i, j)-(i+1, j) with both cells: j = 1..ny-2
        i, j = np.meshgrid(np.arange(nx - 1), np.arange(1, ny - 1), indexing="ij")
        dx = ccx[i, j] - ccx[i, j - 1]
        dy = ccy[i, j] - ccy[i, j - 1]
        self.x_nvec = np.column_stack([dy.ravel(), -dx.ravel()])
        # rows of the full x-face family these edges correspond to
        self.x_used = (np.arange((nx - 1) * ny).reshape(nx - 1, ny)[i, j]).ravel()
        ne = len(self.x_used)
        inc_rows = np.concatenate([np.arange(ne), np.arange(ne)])
        inc_cols = np.concatenate([nid(i, j), nid(i + 1, j)])
        inc_vals = np.concatenate([-np.ones(ne), np.ones(ne)])
        self.x_inc = sp.csr_matrix((inc_vals, (inc_rows, inc_cols)), shape=(ne, n))

        # y edges (i, j)-(i, j+1) with both cells: i = 1..nx-2
        i, j = np.meshgrid(np.arange(1, nx - 1), np.arange(ny - 1), indexing="ij")
        dx = ccx[i, j] - ccx[i - 1, j]
        dy = ccy[i, j] - ccy[i - 1, j]
        self.y_nvec = np.column_stack([-dy.ravel(), dx.ravel()])
        self.y_used = (np.arange(nx * (ny - 1)).reshape(nx, ny - 1)[i, j]).ravel()
        ne = len(self.y_used)
        inc_rows = np.concatenate([np.arange(ne), np.arange(ne)])
        inc_cols = np.concatenate([nid(i, j), nid(i, j + 1)])
        inc_vals = np.concatenate([-np.ones(ne), np.ones(ne)])
        self.y_inc = sp.csr_matrix((inc_vals, (inc_rows, inc_cols)), shape=(ne, n))

        # dual-cell area per interior node: shoelace of the centroid quad
        m = dom.node_areas().copy()
        ii, jj = np.meshgrid(np.arange(1, nx - 1), np.arange(1, ny - 1), indexing="ij")
        qx = [ccx[ii - 1, jj - 1], ccx[ii, jj - 1], ccx[ii, jj], ccx[ii - 1, jj]]
        qy = [ccy[ii - 1, jj - 1], ccy[ii, jj - 1], ccy[ii, jj], ccy[ii - 1, jj]]
        area = np.zeros_like(qx[0])
        for k in range(4):
            area += qx[k] * qy[(k + 1) % 4] - qx[(k + 1) % 4] * qy[k]
        m[1:-1, 1:-1] = 0.5 * np.abs(area)
        self.dual_area = m.ravel()


def _face_difference_ops(dom: GridDomain, family: str):
    """Logical d/dxi, d/deta and two-point averaging onto one face family.

    Face-aligned direction: exact two-point difference.  Cross direction:
    mean of the central differences at the two face endpoints, switching to
    one-sided second-order stencils on the first/last row or column.
    """
    nx, ny = dom.nx, dom.ny
    hxi, heta = dom.logical_spacing
    n = nx * ny

    def nid(i, j):
        return (i * ny + j).ravel()

    if family == "x":
        i, j = np.meshgrid(np.arange(nx - 1), np.arange(ny), indexing="ij")
        nf = (nx - 1) * ny
        fid = np.arange(nf).reshape(nx - 1, ny)
        along = [((1, 0), 1.0 / hxi), ((0, 0), -1.0 / hxi)]
        ends = [(0, 0), (1, 0)]
        cross_axis = 1
        h_cross = heta
        cross_n = ny
    else:
        i, j = np.meshgrid(np.arange(nx), np.arange(ny - 1), indexing="ij")
        nf = nx * (ny - 1)
        fid = np.arange(nf).reshape(nx, ny - 1)
        along = [((0, 1), 1.0 / heta), ((0, 0), -1.0 / heta)]
        ends = [(0, 0), (0, 1)]
        cross_axis = 0
        h_cross = hxi
        cross_n = nx

    rows, cols, vals_along, vals_cross = [], [], [], []

    for (di, dj), w in along:
        rows.append(fid.ravel())
        cols.append(nid(i + di, j + dj))
        vals_along.append(np.full(nf, w))
        vals_cross.append(np.zeros(nf))

    cpos = j if cross_axis == 1 else i
    mid = (cpos >= 1) & (cpos <= cross_n - 2)
    lo = cpos == 0
    hi = cpos == cross_n - 1
    # per endpoint: central (+1, -1)/2h inside, one-sided (-3, 4, -1)/2h and
    # (3, -4, 1)/2h on the two extreme rows/columns, all averaged with 1/2
    stencil = [
        (mid, (1, 0.5), (-1, -0.5)),
        (lo, (0, -1.5), (1, 2.0), (2, -0.5)),
        (hi, (0, 1.5), (-1, -2.0), (-2, 0.5)),
    ]
    for de, dj_e in ends:
        for sel, *terms in stencil:
            for off, coef in terms:
                if cross_axis == 1:
                    ii = i + de
                    jj = np.where(sel, j + dj_e + off, j)
                else:
                    ii = np.where(sel, i + de + off, i)
                    jj = j + dj_e
                rows.append(fid.ravel())
                cols.append(nid(ii, jj))
                vals_cross.append(np.where(sel, 0.5 * coef / h_cross, 0.0).ravel())
                vals_along.append(np.zeros(nf))

    rows = np.concatenate(rows)
    cols = np.concatenate(cols)
    dxi_like = sp.csr_matrix((np.concatenate(vals_along), (rows, cols)), shape=(nf, n))
    cross = sp.csr_matrix((np.concatenate(vals_cross), (rows, cols)), shape=(nf, n))

    avg_rows = np.concatenate([fid.ravel(), fid.ravel()])
    e0, e1 = ends
    avg_cols = np.concatenate([nid(i + e0[0], j + e0[1]), nid(i + e1[0], j + e1[1])])
    avg = sp.csr_matrix((np.full(2 * nf, 0.5), (avg_rows, avg_cols)), shape=(nf, n))

    if family == "x":
        return dxi_like, cross, avg, fid
    return cross, dxi_like, avg, fid


def _face_ops(dom: GridDomain) -> _FaceOperators:
    if "face_ops" not in dom._cache:
        ops = _FaceOperators(dom)
        # edge-restricted operators for the finite-volume divergence
        ops.xe_Gx = ops.x_Gx[ops.x_used]
        ops.xe_Gy = ops.x_Gy[ops.x_used]
        ops.xe_avg = ops.x_avg[ops.x_used]
        ops.xe_y = ops.x_y[ops.x_used]
        ops.ye_Gx = ops.y_Gx[ops.y_used]
        ops.ye_Gy = ops.y_Gy[ops.y_used]
        ops.ye_avg = ops.y_avg[ops.y_used]
        ops.ye_y = ops.y_y[ops.y_used]
        dom._cache["face_ops"] = ops
    return dom._cache["face_ops"]


# -- residuals, functional, gradient ------------------------------------------


def _require_nonzero_a(a: float) -> None:
    if a == 0:
        raise ZeroARejectedError("the Dirichlet solvers require a != 0")


def residual_potential(f: ScalarField, a: float) -> ScalarField:
    """Finite-volume residual of the potential equation at interior nodes.

    Flux (A(y, df/dx), 2 df/dy) integrated over the centroid-dual cell of
    each node and divided by the dual area; boundary entries are zeroed.  On
    tensor-product grids this coincides exactly with -(energy gradient) /
    (node area).
    """
    _require_nonzero_a(a)
    ops = _face_ops(f.domain)
    g = _potential_residual_flat(f.values.ravel(), a, ops)
    r = np.zeros_like(g)
    r[ops.interior_idx] = g[ops.interior_idx] / ops.dual_area[ops.interior_idx]
    return ScalarField(f.domain, r.reshape(f.values.shape))


def _potential_residual_flat(f_flat: np.ndarray, a: float, ops: _FaceOperators) -> np.ndarray:
    """Dual-cell flux balance of the potential equation (not yet / area)."""
    fn_x = (
        flux_primitive(ops.xe_y, ops.xe_Gx @ f_flat, a) * ops.x_nvec[:, 0]
        + 2.0 * (ops.xe_Gy @ f_flat) * ops.x_nvec[:, 1]
    )
    fn_y = (
        flux_primitive(ops.ye_y, ops.ye_Gx @ f_flat, a) * ops.y_nvec[:, 0]
        + 2.0 * (ops.ye_Gy @ f_flat) * ops.y_nvec[:, 1]
    )
    return -(ops.x_inc.T @ fn_x + ops.y_inc.T @ fn_y)


def _potential_fv_jacobian(f_flat: np.ndarray, a: float, ops: _FaceOperators) -> sp.csr_matrix:
    dax = 1.0 / np.sqrt((ops.xe_Gx @ f_flat) ** 2 + ops.xe_y**2 + a**2)
    day = 1.0 / np.sqrt((ops.ye_Gx @ f_flat) ** 2 + ops.ye_y**2 + a**2)
    jx = sp.diags(ops.x_nvec[:, 0] * dax) @ ops.xe_Gx + sp.diags(
        2.0 * ops.x_nvec[:, 1]
    ) @ ops.xe_Gy
    jy = sp.diags(ops.y_nvec[:, 0] * day) @ ops.ye_Gx + sp.diags(
        2.0 * ops.y_nvec[:, 1]
    ) @ ops.ye_Gy
    return (-(ops.x_inc.T @ jx + ops.y_inc.T @ jy)).tocsr()


def _energy_gradient_flat(f: ScalarField, a: float, ops: _FaceOperators) -> np.ndarray:
    vals = f.values.ravel()
    fx = ops.x_Gx @ vals
    fy = ops.y_Gy @ vals
    flux_x = flux_primitive(ops.x_y, fx, a)
    return ops.x_Gx.T @ (ops.x_w * flux_x) + ops.y_Gy.T @ (2.0 * ops.y_w * fy)


def energy_functional(f: ScalarField, a: float) -> float:
    """Discrete Dirichlet energy whose stationary points solve the potential
    equation: face-midpoint quadrature of B(y, df/dx) + (df/dy)^2."""
    _require_nonzero_a(a)
    ops = _face_ops(f.domain)
    vals = f.values.ravel()
    fx = ops.x_Gx @ vals
    fy = ops.y_Gy @ vals
    return float(
        np.dot(ops.x_w, flux_primitive_integral(ops.x_y, fx, a))
        + np.dot(ops.y_w, fy**2)
    )


def energy_gradient(f: ScalarField, a: float) -> ScalarField:
    """Exact analytic gradient of :func:`energy_functional` in the interior
    node values (zero on boundary nodes, which are Dirichlet data)."""
    _require_nonzero_a(a)
    ops = _face_ops(f.domain)
    g = _energy_gradient_flat(f, a, ops)
    g[ops.boundary_idx] = 0.0
    return ScalarField(f.domain, g.reshape(f.values.shape))


def residual_v(v: ScalarField, a: float) -> ScalarField:
    """Finite-volume residual of the v-equation at interior nodes.

    Dual-cell balance of the flux ((vbar^2 + y^2 + a^2)^(-1/2) dv/dx,
    2 dv/dy), the coefficient state vbar averaged from the edge endpoints;
    boundary entries are zeroed.
    """
    _require_nonzero_a(a)
    ops = _face_ops(v.domain)
    g = _v_residual_flat(v.values.ravel(), a, ops)
    r = np.zeros_like(g)
    r[ops.interior_idx] = g[ops.interior_idx] / ops.dual_area[ops.interior_idx]
    return ScalarField(v.domain, r.reshape(v.values.shape))


def _v_coefficient(vbar: np.ndarray, yf: np.ndarray, a: float) -> np.ndarray:
    return 1.0 / np.sqrt(vbar**2 + yf**2 + a**2)


def _v_residual_flat(v_flat: np.ndarray, a: float, ops: _FaceOperators) -> np.ndarray:
    cx = _v_coefficient(ops.xe_avg @ v_flat, ops.xe_y, a)
    fn_x = (
        cx * (ops.xe_Gx @ v_flat) * ops.x_nvec[:, 0]
        + 2.0 * (ops.xe_Gy @ v_flat) * ops.x_nvec[:, 1]
    )
    cy = _v_coefficient(ops.ye_avg @ v_flat, ops.ye_y, a)
    fn_y = (
        cy * (ops.ye_Gx @ v_flat) * ops.y_nvec[:, 0]
        + 2.0 * (ops.ye_Gy @ v_flat) * ops.y_nvec[:, 1]
    )
    return -(ops.x_inc.T @ fn_x + ops.y_inc.T @ fn_y)


def _v_jacobian(v_flat: np.ndarray, a: float, ops: _FaceOperators) -> sp.csr_matrix:
    parts = []
    for gx, gy, avg, yv, nvec, inc in (
        (ops.xe_Gx, ops.xe_Gy, ops.xe_avg, ops.xe_y, ops.x_nvec, ops.x_inc),
        (ops.ye_Gx, ops.ye_Gy, ops.ye_avg, ops.ye_y, ops.y_nvec, ops.y_inc),
    ):
        vx = gx @ v_flat
        vbar = avg @ v_flat
        base = vbar**2 + yv**2 + a**2
        c = 1.0 / np.sqrt(base)
        dc = -vbar / base**1.5
        dflux = (
            sp.diags(nvec[:, 0] * c) @ gx
            + sp.diags(nvec[:, 0] * dc * vx) @ avg
            + sp.diags(2.0 * nvec[:, 1]) @ gy
        )
        parts.append(inc.T @ dflux)
    return (-(parts[0] + parts[1])).tocsr()


# -- linear algebra -----------------------------------------------------------


def _solve_linear(mat: sp.csr_matrix, rhs: np.ndarray, tol: float) -> np.ndarray:
    if mat.shape[0] <= _DIRECT_LIMIT:
        return spla.spsolve(mat.tocsc(), rhs)
    ilu = spla.spilu(mat.tocsc(), drop_tol=1e-6, fill_factor=20)
    prec = spla.LinearOperator(mat.shape, ilu.solve)
    sol, info = spla.gmres(mat, rhs, rtol=tol, atol=0.0, M=prec, maxiter=400)
    if info != 0:
        raise RuntimeError(f"iterative linear solve failed (info={info})")
    return sol


def harmonic_extension(domain: GridDomain, phi: BoundaryFunction) -> ScalarField:
    """Discrete harmonic extension of boundary data (the Newton start)."""
    ops = _face_ops(domain)
    n = domain.nx * domain.ny
    lap = -(
        ops.x_inc.T
        @ (sp.diags(ops.x_nvec[:, 0]) @ ops.xe_Gx + sp.diags(ops.x_nvec[:, 1]) @ ops.xe_Gy)
        + ops.y_inc.T
        @ (sp.diags(ops.y_nvec[:, 0]) @ ops.ye_Gx + sp.diags(ops.y_nvec[:, 1]) @ ops.ye_Gy)
    ).tocsr()
    vals = _pinned_values(domain, phi)
    ii = ops.interior_idx
    rhs = -(lap[ii, :][:, ops.boundary_idx] @ vals[ops.boundary_idx])
    vals[ii] = _solve_linear(lap[ii, :][:, ii], rhs, 1e-12)
    return ScalarField(domain, vals.reshape(domain.nx, domain.ny))


def _pinned_values(domain: GridDomain, phi: BoundaryFunction) -> np.ndarray:
    """Full node vector carrying phi on the boundary loop, zero elsewhere."""
    vals = np.zeros(domain.nx * domain.ny)
    bidx = domain.boundary_ij[:, 0] * domain.ny + domain.boundary_ij[:, 1]
    vals[bidx] = phi.samples
    return vals


# -- Newton iteration ---------------------------------------------------------


def _newton(
    vals0: np.ndarray,
    residual_fn,
    jacobian_fn,
    ops: _FaceOperators,
    opts: SolverOptions,
):
    """Damped Newton on interior nodes; residual measured in sup norm."""
    vals = vals0.copy()
    ii = ops.interior_idx
    area_ii = ops.dual_area[ii]

    def res(vflat):
        return residual_fn(vflat)[ii] / area_ii

    r = res(vals)
    rnorm = float(np.max(np.abs(r)))
    iterations = 0
    converged = rnorm <= opts.newton_tol
    while not converged and iterations < opts.max_newton_iters:
        # row-scale by dual areas: equilibrates the system where cells shrink
        jac = sp.diags(1.0 / area_ii) @ jacobian_fn(vals)[ii, :][:, ii]
        delta = _solve_linear(jac.tocsr(), -r, opts.linear_solver_tol)
        step = opts.damping
        best = None
        for _ in range(12):
            trial = vals.copy()
            trial[ii] += step * delta
            rt = res(trial)
            rtnorm = float(np.max(np.abs(rt)))
            if best is None or rtnorm < best[0]:
                best = (rtnorm, trial, rt)
            if rtnorm < rnorm:
                break
            step *= 0.5
        rnorm, vals, r = best
        iterations += 1
        converged = rnorm <= opts.newton_tol
    return vals, iterations, rnorm, converged


def _boundary_scale(phi: BoundaryFunction) -> float:
    return max(1.0, float(np.max(np.abs(phi.samples))))


def _continuation_ladder(a: float, phi: BoundaryFunction, steps: int) -> list[float]:
    """Fibre values to solve through, ending at a; descending for small |a|
    where the equations lose uniform ellipticity."""
    threshold = 0.05 * _boundary_scale(phi)
    if abs(a) >= threshold or steps <= 0:
        return [a]
    sign = 1.0 if a > 0 else -1.0
    ladder = [
        sign * threshold * (abs(a) / threshold) ** (k / steps) for k in range(steps)
    ]
    return ladder + [a]


def _interp_boundary_to_field(domain: GridDomain, phi: BoundaryFunction) -> np.ndarray:
    vals = np.zeros(domain.nx * domain.ny)
    bidx = domain.boundary_ij[:, 0] * domain.ny + domain.boundary_ij[:, 1]
    vals[bidx] = phi.samples
    return vals


def solve_dirichlet_f(
    domain: GridDomain,
    phi: BoundaryFunction,
    a: float,
    opts: SolverOptions | None = None,
    initial_guess: ScalarField | None = None,
) -> tuple[ScalarField, SolveReport]:
    """Solve the potential equation with Dirichlet data phi.

    Returns the solution field (boundary nodes carry phi exactly) and a
    report; ``report.converged`` is False when Newton stalls, in which case
    the best iterate found is returned.
    """
    _require_nonzero_a(a)
    opts = opts or SolverOptions()
    ops = _face_ops(domain)

    if initial_guess is not None:
        vals = initial_guess.values.ravel().copy()
        pinned = _pinned_values(domain, phi)
        vals[ops.boundary_idx] = pinned[ops.boundary_idx]
    else:
        vals = harmonic_extension(domain, phi).values.ravel()

    iterations = 0
    ell_min = np.inf
    for ak in _continuation_ladder(a, phi, opts.continuation_steps):
        vals, its, rnorm, converged = _newton(
            vals,
            lambda w, ak=ak: _potential_residual_flat(w, ak, ops),
            lambda w, ak=ak: _potential_fv_jacobian(w, ak, ops),
            ops,
            opts,
        )
        iterations += its
        fx = ops.x_Gx @ vals
        ell_min = min(ell_min, float(np.min(1.0 / np.sqrt(fx**2 + ops.x_y**2 + ak**2))))
        if not converged:
            break
    f = ScalarField(domain, vals.reshape(domain.nx, domain.ny))
    return f, SolveReport(converged, iterations, rnorm, ell_min)


def solve_dirichlet_v(
    domain: GridDomain,
    phi: BoundaryFunction,
    a: float,
    anchor: tuple[int, int] = (0, 0),
    opts: SolverOptions | None = None,
    initial_guess: ScalarField | None = None,
) -> tuple[SolutionPair, SolveReport]:
    """Solve the v-equation with Dirichlet data phi and reconstruct u.

    u is path-integrated from the solved v and pinned to zero at the anchor
    node; the returned pair is marked verified at the Newton tolerance when
    the solve converged.
    """
    _require_nonzero_a(a)
    opts = opts or SolverOptions()
    ops = _face_ops(domain)

    if initial_guess is not None:
        vals = initial_guess.values.ravel().copy()
        pinned = _pinned_values(domain, phi)
        vals[ops.boundary_idx] = pinned[ops.boundary_idx]
    else:
        vals = harmonic_extension(domain, phi).values.ravel()

    iterations = 0
    ell_min = np.inf
    for ak in _continuation_ladder(a, phi, opts.continuation_steps):
        vals, its, rnorm, converged = _newton(
            vals,
            lambda w, ak=ak: _v_residual_flat(w, ak, ops),
            lambda w, ak=ak: _v_jacobian(w, ak, ops),
            ops,
            opts,
        )
        iterations += its
        vbar = ops.x_avg @ vals
        ell_min = min(ell_min, float(np.min(_v_coefficient(vbar, ops.x_y, a))))
        if not converged:
            break

    v = ScalarField(domain, vals.reshape(domain.nx, domain.ny))
    u = u_from_v(v, a, anchor, defect_tol=np.inf)
    pair = SolutionPair(u, v, a)
    if converged:
        pair.mark_verified(opts.newton_tol)
    return pair, SolveReport(converged, iterations, rnorm, ell_min)
