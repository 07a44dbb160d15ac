"""The nonlinear Cauchy-Riemann system on grids.

A :class:`SolutionPair` holds discrete fields (u, v) on one grid together
with the fibre parameter a.  The system is

    du/dx = dv/dy,        dv/dx = -2 sqrt(v^2 + y^2 + a^2) du/dy,

whose first equation makes v dx + u dy closed, so u, v admit a potential f
with df = v dx + u dy; the second reconstructs u from v up to a constant.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .errors import (
    IdenticalPairsError,
    NonInjectiveMapError,
    PathDependenceError,
    ZeroARejectedError,
)
from .families import AnalyticPair
from .grid import (
    GridDomain,
    RectangleShape,
    ScalarField,
    build_grid,
    field_gradient,
)

__all__ = [
    "SolutionPair",
    "cr_residual",
    "potential_from_pair",
    "pair_from_potential",
    "u_from_v",
    "inverse_pair",
]


@dataclass(eq=False)
class SolutionPair:
    """Fields (u, v) on a shared grid at fibre level a."""

    u: ScalarField
    v: ScalarField
    a: float
    verified: bool = False
    verified_tol: float | None = None

    def __post_init__(self):
        if self.u.domain is not self.v.domain:
            raise ValueError("u and v must share one grid")

    @property
    def domain(self) -> GridDomain:
        return self.u.domain

    @classmethod
    def from_family(cls, family: AnalyticPair, domain: GridDomain, a: float | None = None) -> "SolutionPair":
        if a is None:
            a = family.a if family.a is not None else 0.0
        uu, vv = family.evaluate(domain.x, domain.y)
        return cls(ScalarField(domain, uu), ScalarField(domain, vv), float(a))

    def difference(self, other: "SolutionPair") -> tuple[np.ndarray, np.ndarray]:
        if other.domain is not self.domain:
            raise ValueError("pairs live on different grids")
        return self.u.values - other.u.values, self.v.values - other.v.values

    def mark_verified(self, tol: float) -> "SolutionPair":
        self.verified = True
        self.verified_tol = tol
        return self


def cr_residual(pair: SolutionPair) -> tuple[ScalarField, ScalarField]:
    """Discrete residuals (r1, r2) of the system at interior nodes.

    r1 = du/dx - dv/dy and r2 = dv/dx + 2 sqrt(v^2 + y^2 + a^2) du/dy with
    derivatives from :func:`field_gradient`; boundary entries are zeroed.
    """
    dom = pair.domain
    ux, uy = field_gradient(pair.u)
    vx, vy = field_gradient(pair.v)
    coeff = 2.0 * np.sqrt(pair.v.values**2 + dom.y**2 + pair.a**2)
    r1 = ux.values - vy.values
    r2 = vx.values + coeff * uy.values
    mask = ~dom.interior_mask
    r1[mask] = 0.0
    r2[mask] = 0.0
    return ScalarField(dom, r1), ScalarField(dom, r2)


# -- path integration --------------------------------------------------------


def _edge_integrals(dom: GridDomain, p: np.ndarray, q: np.ndarray):
    """Trapezoid integrals of p dx + q dy over the logical grid edges."""
    dx_xi = dom.x[1:, :] - dom.x[:-1, :]
    dy_xi = dom.y[1:, :] - dom.y[:-1, :]
    ex = 0.5 * (p[1:, :] + p[:-1, :]) * dx_xi + 0.5 * (q[1:, :] + q[:-1, :]) * dy_xi
    dx_eta = dom.x[:, 1:] - dom.x[:, :-1]
    dy_eta = dom.y[:, 1:] - dom.y[:, :-1]
    ey = 0.5 * (p[:, 1:] + p[:, :-1]) * dx_eta + 0.5 * (q[:, 1:] + q[:, :-1]) * dy_eta
    return ex, ey


def path_integral(
    dom: GridDomain,
    p: np.ndarray,
    q: np.ndarray,
    anchor: tuple[int, int] = (0, 0),
    defect_tol: float | None = None,
):
    """Potential of the 1-form p dx + q dy by staircase path integration.

    Integrates along the two canonical column-first / row-first staircase
    paths from the anchor node and averages them.  Returns ``(potential,
    defect)`` where ``defect`` is the largest disagreement between the two
    paths, an audit of closedness of the input form.  When ``defect_tol`` is
    given and exceeded, raises :class:`PathDependenceError`.
    """
    ex, ey = _edge_integrals(dom, p, q)
    i0, j0 = anchor

    # cumulative sums with a leading zero so differences give partial sums
    sx = np.zeros((dom.nx, dom.ny))
    sx[1:, :] = np.cumsum(ex, axis=0)
    sy = np.zeros((dom.nx, dom.ny))
    sy[:, 1:] = np.cumsum(ey, axis=1)

    # column-first: along column i0, then along the row
    fa = (sy[i0, :] - sy[i0, j0])[None, :] + (sx[:, :] - sx[i0, :][None, :])
    # row-first: along row j0, then along the column
    fb = (sx[:, j0] - sx[i0, j0])[:, None] + (sy[:, :] - sy[:, j0][:, None])

    defect = float(np.max(np.abs(fa - fb)))
    if defect_tol is not None and defect > defect_tol:
        raise PathDependenceError(
            f"loop integrals reach {defect:.3e} > tolerance {defect_tol:.3e}; "
            "input is not a solution"
        )
    return 0.5 * (fa + fb), defect


def default_defect_tol(dom: GridDomain, scale: float) -> float:
    """Loop-defect tolerance separating O(h^2) closedness error from O(1)."""
    h = dom.mean_spacing()
    return 50.0 * h**1.5 * max(1.0, scale)


def potential_from_pair(
    pair: SolutionPair,
    anchor: tuple[int, int] = (0, 0),
    defect_tol: float | None = None,
) -> ScalarField:
    """Potential f with df/dx = v, df/dy = u and f(anchor) = 0.

    The input pair must satisfy the first system equation (closedness of
    v dx + u dy); path independence is audited by comparing the two canonical
    staircase paths per node.
    """
    dom = pair.domain
    if defect_tol is None:
        scale = float(np.max(np.abs(pair.u.values)) + np.max(np.abs(pair.v.values)))
        defect_tol = default_defect_tol(dom, scale)
    f, _ = path_integral(dom, pair.v.values, pair.u.values, anchor, defect_tol)
    return ScalarField(dom, f)


def pair_from_potential(f: ScalarField, a: float) -> SolutionPair:
    """Gradient pair (u, v) = (df/dy, df/dx) of a potential."""
    fx, fy = field_gradient(f)
    return SolutionPair(fy, fx, float(a))


def u_from_v(
    v: ScalarField,
    a: float,
    anchor: tuple[int, int] = (0, 0),
    defect_tol: float | None = None,
) -> ScalarField:
    """Reconstruct u from a solution v of the second-order v-equation.

    Uses du/dx = dv/dy and du/dy = -dv/dx / (2 sqrt(v^2 + y^2 + a^2)), path
    integrating from the anchor node where u is pinned to zero.  Requires
    a != 0 (the coefficient degenerates otherwise).
    """
    if a == 0:
        raise ZeroARejectedError("u reconstruction requires a != 0")
    dom = v.domain
    vx, vy = field_gradient(v)
    coeff = 0.5 / np.sqrt(v.values**2 + dom.y**2 + a**2)
    p = vy.values
    q = -coeff * vx.values
    if defect_tol is None:
        scale = float(np.max(np.abs(p)) + np.max(np.abs(q)))
        defect_tol = default_defect_tol(dom, scale)
    u, _ = path_integral(dom, p, q, anchor, defect_tol)
    return ScalarField(dom, u)


# -- inverse solutions -------------------------------------------------------


def _cell_orientations(u: np.ndarray, v: np.ndarray) -> np.ndarray:
    """Signed areas of the two triangles of each image cell, shape (nx-1, ny-1, 2)."""

    def cross(ax, ay, bx, by):
        return ax * by - ay * bx

    du1 = u[1:, :-1] - u[:-1, :-1]
    dv1 = v[1:, :-1] - v[:-1, :-1]
    du2 = u[1:, 1:] - u[:-1, :-1]
    dv2 = v[1:, 1:] - v[:-1, :-1]
    du3 = u[:-1, 1:] - u[:-1, :-1]
    dv3 = v[:-1, 1:] - v[:-1, :-1]
    t1 = 0.5 * cross(du1, dv1, du2, dv2)
    t2 = 0.5 * cross(du2, dv2, du3, dv3)
    return np.stack([t1, t2], axis=-1)


def inverse_pair(
    pair: SolutionPair,
    nx: int | None = None,
    ny: int | None = None,
    jac_rel_threshold: float = 1e-8,
) -> SolutionPair:
    """The inverse solution (u', v') on a grid covering the image (u, v)[S].

    The planar map (x, y) -> (u, v) must be injective with nonsingular
    discrete Jacobian; the inverse assigns u' = x and v' = y at the image
    point (u, v).  Values are resampled onto a rectangle grid over the image
    bounding box by scattered linear interpolation; nodes outside the image
    are flagged invalid (NaN).
    """
    from scipy.interpolate import LinearNDInterpolator
    from scipy.spatial import cKDTree

    dom = pair.domain
    uu, vv = pair.u.values, pair.v.values

    tri = _cell_orientations(uu, vv)
    cell_scale = np.median(np.abs(tri)) + 1e-300
    if np.any(tri > 0) and np.any(tri < 0):
        raise NonInjectiveMapError("image cells fold (mixed orientations)")
    if np.min(np.abs(tri)) < jac_rel_threshold * cell_scale:
        raise NonInjectiveMapError("discrete Jacobian determinant below threshold")

    pts = np.column_stack([uu.ravel(), vv.ravel()])
    span = max(np.ptp(pts[:, 0]), np.ptp(pts[:, 1]))
    d, _ = cKDTree(pts).query(pts, k=2)
    if np.min(d[:, 1]) < 1e-12 * span:
        raise NonInjectiveMapError("duplicate image points")

    if nx is None:
        nx = dom.nx
    if ny is None:
        ny = dom.ny
    new_dom = build_grid(
        RectangleShape(pts[:, 0].min(), pts[:, 0].max(), pts[:, 1].min(), pts[:, 1].max()),
        nx,
        ny,
    )
    interp_x = LinearNDInterpolator(pts, dom.x.ravel())
    interp_y = LinearNDInterpolator(pts, dom.y.ravel())
    up = interp_x(new_dom.x, new_dom.y)
    vp = interp_y(new_dom.x, new_dom.y)
    valid = np.isfinite(up) & np.isfinite(vp)
    return SolutionPair(
        ScalarField(new_dom, np.where(valid, up, np.nan), valid=valid),
        ScalarField(new_dom, np.where(valid, vp, np.nan), valid=valid),
        pair.a,
    )


def require_distinct(p1: SolutionPair, p2: SolutionPair, rel: float = 1e-14) -> None:
    du, dv = p1.difference(p2)
    scale = max(
        np.max(np.abs(p1.u.values)) + np.max(np.abs(p1.v.values)),
        np.max(np.abs(p2.u.values)) + np.max(np.abs(p2.v.values)),
        1.0,
    )
    if np.max(np.abs(du)) <= rel * scale and np.max(np.abs(dv)) <= rel * scale:
        raise IdenticalPairsError("the two solution pairs coincide on the grid")
