"""Planar domains, structured grids, boundary loops and discrete differentiation.

Both supported shapes (axis-aligned rectangle, disc) are discretized as the
image of a uniform logical grid on [-1, 1]^2.  The rectangle uses the affine
map; the disc uses the conformal square-to-disc map

    z(zeta) = exp(-i pi/4) sl(c0 zeta),    zeta = xi + i eta,
    c0 = (1 + i) K_lem / 2,

where sl is the lemniscatic sine, evaluated through Jacobi elliptic functions
at modulus k^2 = 1/2, and K_lem = K(1/2)/sqrt(2) is the half-side of the
conformal square.  This map is analytic on the closed square with derivative

    dz/dzeta = (K_lem / sqrt(2)) sqrt(1 + z^4),

so grid cells stay square-shaped (no shear anywhere) and merely scale down
toward the four logical corners, where the Jacobian vanishes quadratically.
Compared with algebraic square-to-disc maps, that conformal behaviour is what
keeps finite-difference stencils accurate near the boundary.  The centre has
no coordinate singularity (the reason for avoiding polar grids).
"""

from __future__ import annotations

from dataclasses import dataclass, field

import numpy as np
from scipy.special import ellipj, ellipk

from .errors import InvalidShapeError, ResolutionError

__all__ = [
    "RectangleShape",
    "DiscShape",
    "GridDomain",
    "ScalarField",
    "BoundaryFunction",
    "MorseReport",
    "TransverseReport",
    "build_grid",
    "rectangle",
    "disc",
    "field_gradient",
    "classify_morse",
    "classify_transverse",
]

_SQRT2 = np.sqrt(2.0)


@dataclass(frozen=True)
class RectangleShape:
    x0: float
    x1: float
    y0: float
    y1: float

    kind = "rectangle"

    def validate(self) -> None:
        if not (self.x1 > self.x0 and self.y1 > self.y0):
            raise InvalidShapeError(
                f"rectangle needs positive side lengths, got "
                f"[{self.x0}, {self.x1}] x [{self.y0}, {self.y1}]"
            )


@dataclass(frozen=True)
class DiscShape:
    cx: float
    cy: float
    radius: float

    kind = "disc"

    def validate(self) -> None:
        if not self.radius > 0:
            raise InvalidShapeError(f"disc needs positive radius, got {self.radius}")


Shape = RectangleShape | DiscShape


# half-side of the conformal square: K_lem = integral_0^1 dt / sqrt(1 - t^4)
_K_LEM = float(ellipk(0.5)) / _SQRT2
_EXP_M4 = np.exp(-0.25j * np.pi)


def _lemniscatic_sl(w: np.ndarray) -> np.ndarray:
    """Lemniscatic sine sl(w) for complex w via Jacobi functions at m = 1/2.

    Uses sl(w) = sn(sqrt(2) w, k) / (sqrt(2) dn(sqrt(2) w, k)) with k^2 = 1/2
    and the standard real/imaginary-part decomposition of sn and dn (the
    complementary modulus equals k, so one modulus serves both axes).
    """
    u = _SQRT2 * np.real(w)
    v = _SQRT2 * np.imag(w)
    s, c, d, _ = ellipj(u, 0.5)
    s1, c1, d1, _ = ellipj(v, 0.5)
    delta = c1**2 + 0.5 * (s * s1) ** 2
    sn = (s * d1 + 1j * c * d * s1 * c1) / delta
    dn = (d * c1 * d1 - 0.5j * s * c * s1) / delta
    return sn / (_SQRT2 * dn)


def _disc_forward(xi: np.ndarray, eta: np.ndarray) -> tuple[np.ndarray, np.ndarray]:
    """Conformal image of logical (xi, eta) in the closed unit disc."""
    xi = np.asarray(xi, dtype=float)
    eta = np.asarray(eta, dtype=float)
    w = 0.5 * _K_LEM * ((xi - eta) + 1j * (xi + eta))
    z = _EXP_M4 * _lemniscatic_sl(w)
    # the four corners evaluate as 0/0 in the sn/dn split; they map onto the
    # diagonal points of the circle
    corner = (np.abs(xi) == 1.0) & (np.abs(eta) == 1.0)
    if np.any(corner):
        z = np.where(corner, (xi + 1j * eta) / _SQRT2, z)
    bad = ~np.isfinite(z)
    if np.any(bad):
        zc = np.asarray(np.broadcast_arrays((xi + 1j * eta) / np.hypot(xi, eta), z)[0])
        z = np.where(bad, zc, z)
    return np.real(z), np.imag(z)


def _disc_derivative(x: np.ndarray, y: np.ndarray) -> np.ndarray:
    """dz/dzeta of the conformal map, expressed through the image point."""
    z = np.asarray(x, dtype=float) + 1j * np.asarray(y, dtype=float)
    return (_K_LEM / _SQRT2) * np.sqrt(1.0 + z**4)


def _elliptical_inverse_seed(x: np.ndarray, y: np.ndarray) -> tuple[np.ndarray, np.ndarray]:
    """Closed-form inverse of the algebraic elliptical square-to-disc map;
    used only to seed Newton iterations for the conformal inverse."""
    ax = 2.0 + x**2 - y**2
    ay = 2.0 - x**2 + y**2
    xi = 0.5 * (
        np.sqrt(np.maximum(ax + 2.0 * _SQRT2 * x, 0.0))
        - np.sqrt(np.maximum(ax - 2.0 * _SQRT2 * x, 0.0))
    )
    eta = 0.5 * (
        np.sqrt(np.maximum(ay + 2.0 * _SQRT2 * y, 0.0))
        - np.sqrt(np.maximum(ay - 2.0 * _SQRT2 * y, 0.0))
    )
    return np.clip(xi, -1.0, 1.0), np.clip(eta, -1.0, 1.0)


def _disc_inverse(x: np.ndarray, y: np.ndarray) -> tuple[np.ndarray, np.ndarray]:
    """Inverse of the conformal map on the closed unit disc (Newton)."""
    x = np.asarray(x, dtype=float)
    y = np.asarray(y, dtype=float)
    target = x + 1j * y
    xi, eta = _elliptical_inverse_seed(x, y)
    zeta = xi + 1j * eta
    for _ in range(30):
        zx, zy = _disc_forward(np.real(zeta), np.imag(zeta))
        resid = (zx + 1j * zy) - target
        deriv = _disc_derivative(zx, zy)
        # guard the quadratically degenerate corners
        small = np.abs(deriv) < 1e-8
        step = np.where(small, 0.0, resid / np.where(small, 1.0, deriv))
        zeta = zeta - step
        zeta = np.clip(np.real(zeta), -1.0, 1.0) + 1j * np.clip(np.imag(zeta), -1.0, 1.0)
        if np.max(np.abs(step)) < 1e-14:
            break
    return np.real(zeta), np.imag(zeta)


@dataclass(eq=False)
class GridDomain:
    """Logically rectangular grid over a rectangle or disc.

    Node arrays are indexed ``[i, j]`` with ``i`` along the logical xi axis
    and ``j`` along eta.  ``boundary_ij`` walks the boundary once, positively
    oriented, starting at the logical corner (0, 0); ``boundary_theta`` is the
    arc-length-proportional loop parameter in [0, 2 pi).
    """

    shape: Shape
    nx: int
    ny: int
    x: np.ndarray
    y: np.ndarray
    boundary_ij: np.ndarray
    boundary_theta: np.ndarray
    interior_mask: np.ndarray
    _cache: dict = field(default_factory=dict, repr=False)

    # -- basic geometry -------------------------------------------------

    @property
    def n_boundary(self) -> int:
        return len(self.boundary_ij)

    @property
    def logical_spacing(self) -> tuple[float, float]:
        return 2.0 / (self.nx - 1), 2.0 / (self.ny - 1)

    def logical_nodes(self) -> tuple[np.ndarray, np.ndarray]:
        xi = np.linspace(-1.0, 1.0, self.nx)
        eta = np.linspace(-1.0, 1.0, self.ny)
        return np.meshgrid(xi, eta, indexing="ij")

    def boundary_xy(self) -> tuple[np.ndarray, np.ndarray]:
        bi, bj = self.boundary_ij[:, 0], self.boundary_ij[:, 1]
        return self.x[bi, bj], self.y[bi, bj]

    def mean_spacing(self) -> float:
        """Representative physical node spacing (used for zero-search radii)."""
        hxi, heta = self.logical_spacing
        area = float(np.sum(self.cell_areas()))
        ncell = (self.nx - 1) * (self.ny - 1)
        return np.sqrt(area / ncell)

    # -- map metric ------------------------------------------------------

    def map_jacobian(self, xi, eta):
        """Analytic partials (x_xi, x_eta, y_xi, y_eta) at logical points."""
        if isinstance(self.shape, RectangleShape):
            sx = 0.5 * (self.shape.x1 - self.shape.x0)
            sy = 0.5 * (self.shape.y1 - self.shape.y0)
            one = np.ones_like(np.asarray(xi, dtype=float))
            return sx * one, 0.0 * one, 0.0 * one, sy * one
        px, py = _disc_forward(np.asarray(xi, float), np.asarray(eta, float))
        dz = self.shape.radius * _disc_derivative(px, py)
        # conformal: d/deta = i d/dxi
        return np.real(dz), -np.imag(dz), np.imag(dz), np.real(dz)

    def to_physical(self, xi, eta):
        xi = np.asarray(xi, dtype=float)
        eta = np.asarray(eta, dtype=float)
        if isinstance(self.shape, RectangleShape):
            s = self.shape
            return (
                s.x0 + 0.5 * (xi + 1.0) * (s.x1 - s.x0),
                s.y0 + 0.5 * (eta + 1.0) * (s.y1 - s.y0),
            )
        s = self.shape
        px, py = _disc_forward(xi, eta)
        return s.cx + s.radius * px, s.cy + s.radius * py

    def to_logical(self, x, y):
        x = np.asarray(x, dtype=float)
        y = np.asarray(y, dtype=float)
        if isinstance(self.shape, RectangleShape):
            s = self.shape
            return (
                2.0 * (x - s.x0) / (s.x1 - s.x0) - 1.0,
                2.0 * (y - s.y0) / (s.y1 - s.y0) - 1.0,
            )
        s = self.shape
        return _disc_inverse((x - s.cx) / s.radius, (y - s.cy) / s.radius)

    def contains(self, x, y, pad: float = 1e-12) -> np.ndarray:
        if isinstance(self.shape, RectangleShape):
            s = self.shape
            return (
                (x >= s.x0 - pad) & (x <= s.x1 + pad)
                & (y >= s.y0 - pad) & (y <= s.y1 + pad)
            )
        s = self.shape
        return (x - s.cx) ** 2 + (y - s.cy) ** 2 <= (s.radius * (1.0 + pad)) ** 2

    def cell_areas(self) -> np.ndarray:
        """Shoelace areas of the straight-edge logical cells, shape (nx-1, ny-1)."""
        if "cell_areas" not in self._cache:
            x, y = self.x, self.y
            a = 0.5 * np.abs(
                (x[:-1, :-1] - x[1:, 1:]) * (y[1:, :-1] - y[:-1, 1:])
                - (x[1:, :-1] - x[:-1, 1:]) * (y[:-1, :-1] - y[1:, 1:])
            )
            self._cache["cell_areas"] = a
        return self._cache["cell_areas"]

    def node_areas(self) -> np.ndarray:
        """Dual-cell area per node: a quarter of each adjacent cell."""
        if "node_areas" not in self._cache:
            cells = self.cell_areas()
            m = np.zeros((self.nx, self.ny))
            q = 0.25 * cells
            m[:-1, :-1] += q
            m[1:, :-1] += q
            m[:-1, 1:] += q
            m[1:, 1:] += q
            self._cache["node_areas"] = m
        return self._cache["node_areas"]

    # -- interpolation ---------------------------------------------------

    def interpolate(self, values: np.ndarray, x, y) -> np.ndarray:
        """Bilinear-in-logical-space interpolation of node values at (x, y)."""
        xi, eta = self.to_logical(x, y)
        hxi, heta = self.logical_spacing
        fi = np.clip((xi + 1.0) / hxi, 0.0, self.nx - 1 - 1e-12)
        fj = np.clip((eta + 1.0) / heta, 0.0, self.ny - 1 - 1e-12)
        i = fi.astype(int)
        j = fj.astype(int)
        s = fi - i
        t = fj - j
        return (
            values[i, j] * (1 - s) * (1 - t)
            + values[i + 1, j] * s * (1 - t)
            + values[i, j + 1] * (1 - s) * t
            + values[i + 1, j + 1] * s * t
        )


def _boundary_loop(nx: int, ny: int) -> np.ndarray:
    bottom = [(i, 0) for i in range(nx)]
    right = [(nx - 1, j) for j in range(1, ny)]
    top = [(i, ny - 1) for i in range(nx - 2, -1, -1)]
    left = [(0, j) for j in range(ny - 2, 0, -1)]
    return np.array(bottom + right + top + left, dtype=int)


def build_grid(shape: Shape, nx: int, ny: int) -> GridDomain:
    """Build a structured grid with nx*ny nodes over the given shape."""
    shape.validate()
    if nx < 4 or ny < 4:
        raise ResolutionError(f"need nx, ny >= 4, got {nx} x {ny}")

    xi = np.linspace(-1.0, 1.0, nx)
    eta = np.linspace(-1.0, 1.0, ny)
    XI, ETA = np.meshgrid(xi, eta, indexing="ij")

    dom = GridDomain(
        shape=shape,
        nx=nx,
        ny=ny,
        x=np.empty((nx, ny)),
        y=np.empty((nx, ny)),
        boundary_ij=_boundary_loop(nx, ny),
        boundary_theta=np.empty(2 * nx + 2 * ny - 4),
        interior_mask=np.zeros((nx, ny), dtype=bool),
    )
    X, Y = dom.to_physical(XI, ETA)
    dom.x[...] = X
    dom.y[...] = Y
    dom.interior_mask[1:-1, 1:-1] = True

    bx, by = dom.boundary_xy()
    seg = np.hypot(np.diff(np.r_[bx, bx[0]]), np.diff(np.r_[by, by[0]]))
    s = np.concatenate(([0.0], np.cumsum(seg[:-1])))
    dom.boundary_theta[...] = 2.0 * np.pi * s / seg.sum()

    signed_area = 0.5 * np.sum(bx * np.roll(by, -1) - np.roll(bx, -1) * by)
    assert signed_area > 0, "boundary loop must be positively oriented"
    return dom


def rectangle(x0: float, x1: float, y0: float, y1: float, nx: int, ny: int) -> GridDomain:
    return build_grid(RectangleShape(x0, x1, y0, y1), nx, ny)


def disc(cx: float, cy: float, radius: float, nx: int, ny: int) -> GridDomain:
    return build_grid(DiscShape(cx, cy, radius), nx, ny)


@dataclass(eq=False)
class ScalarField:
    """Real values on the nodes of a grid.

    ``valid`` flags nodes belonging to the field's validity set; fields
    produced by resampling operations may leave nodes outside the source
    image undefined (NaN with ``valid=False``).
    """

    domain: GridDomain
    values: np.ndarray
    valid: np.ndarray | None = None

    def __post_init__(self):
        self.values = np.asarray(self.values, dtype=float)
        if self.values.shape != (self.domain.nx, self.domain.ny):
            raise ValueError(
                f"values shape {self.values.shape} does not match grid "
                f"{(self.domain.nx, self.domain.ny)}"
            )
        if self.valid is None:
            if not np.all(np.isfinite(self.values)):
                raise ValueError("field values must be finite on all nodes")
        else:
            if not np.all(np.isfinite(self.values[self.valid])):
                raise ValueError("field values must be finite on valid nodes")

    @classmethod
    def from_callable(cls, domain: GridDomain, fn) -> "ScalarField":
        return cls(domain, np.asarray(fn(domain.x, domain.y), dtype=float))

    def boundary_trace(self) -> "BoundaryFunction":
        bi, bj = self.domain.boundary_ij[:, 0], self.domain.boundary_ij[:, 1]
        return BoundaryFunction(self.domain, self.values[bi, bj].copy())

    def interior_values(self) -> np.ndarray:
        return self.values[self.domain.interior_mask]


@dataclass(eq=False)
class BoundaryFunction:
    """Values on the ordered boundary loop; index arithmetic is cyclic."""

    domain: GridDomain
    samples: np.ndarray

    def __post_init__(self):
        self.samples = np.asarray(self.samples, dtype=float)
        if self.samples.shape != (self.domain.n_boundary,):
            raise ValueError(
                f"expected {self.domain.n_boundary} boundary samples, "
                f"got {self.samples.shape}"
            )

    @classmethod
    def from_theta_callable(cls, domain: GridDomain, fn) -> "BoundaryFunction":
        return cls(domain, np.asarray(fn(domain.boundary_theta), dtype=float))

    @classmethod
    def from_xy_callable(cls, domain: GridDomain, fn) -> "BoundaryFunction":
        bx, by = domain.boundary_xy()
        return cls(domain, np.asarray(fn(bx, by), dtype=float))

    def __sub__(self, other: "BoundaryFunction") -> "BoundaryFunction":
        if other.domain is not self.domain and other.domain.n_boundary != self.domain.n_boundary:
            raise ValueError("boundary functions live on incompatible loops")
        return BoundaryFunction(self.domain, self.samples - other.samples)


# -- discrete differentiation ---------------------------------------------


def _logical_derivative(values: np.ndarray, axis: int, h: float) -> np.ndarray:
    """Second-order logical derivative: central interior, one-sided at edges."""
    v = np.moveaxis(values, axis, 0)
    out = np.empty_like(v)
    out[1:-1] = (v[2:] - v[:-2]) / (2.0 * h)
    out[0] = (-3.0 * v[0] + 4.0 * v[1] - v[2]) / (2.0 * h)
    out[-1] = (3.0 * v[-1] - 4.0 * v[-2] + v[-3]) / (2.0 * h)
    return np.moveaxis(out, 0, axis)


def field_gradient(f: ScalarField) -> tuple[ScalarField, ScalarField]:
    """Discrete (df/dx, df/dy) on all nodes.

    Logical central differences (one-sided second-order at the grid edge) are
    pushed through the map by the chain rule, with the map partials taken as
    the same finite differences of the node coordinates.  That choice makes
    the gradient exact on fields affine in (x, y) on every grid, curved or
    not.
    """
    dom = f.domain
    hxi, heta = dom.logical_spacing
    f_xi = _logical_derivative(f.values, 0, hxi)
    f_eta = _logical_derivative(f.values, 1, heta)
    x_xi = _logical_derivative(dom.x, 0, hxi)
    x_eta = _logical_derivative(dom.x, 1, heta)
    y_xi = _logical_derivative(dom.y, 0, hxi)
    y_eta = _logical_derivative(dom.y, 1, heta)
    jac = x_xi * y_eta - x_eta * y_xi
    fx = (f_xi * y_eta - f_eta * y_xi) / jac
    fy = (f_eta * x_xi - f_xi * x_eta) / jac
    return ScalarField(dom, fx), ScalarField(dom, fy)


# -- boundary data classification ------------------------------------------


@dataclass
class MorseReport:
    is_morse: bool
    maxima: list[float]
    minima: list[float]
    l: int
    flat_segment: bool = False


@dataclass
class TransverseReport:
    is_transverse: bool
    increasing_zeros: list[float]
    decreasing_zeros: list[float]
    l: int
    tangential_zero: bool = False


def classify_morse(phi: BoundaryFunction) -> MorseReport:
    """Classify boundary data by its strict local extrema over the loop.

    Ties between adjacent samples are reported as flat segments and make the
    data non-Morse; no tie-breaking is attempted.
    """
    s = phi.samples
    n = len(s)
    if n < 8:
        raise ResolutionError("need at least 8 boundary samples")
    nxt = np.roll(s, -1)
    if np.any(s == nxt):
        return MorseReport(False, [], [], 0, flat_segment=True)
    prv = np.roll(s, 1)
    theta = phi.domain.boundary_theta
    maxima = theta[(s > prv) & (s > nxt)]
    minima = theta[(s < prv) & (s < nxt)]
    # with no adjacent ties, extrema alternate and counts agree automatically
    return MorseReport(True, sorted(maxima.tolist()), sorted(minima.tolist()), len(maxima))


def classify_transverse(w: BoundaryFunction) -> TransverseReport:
    """Locate transverse zeros of boundary data by sign changes over the loop."""
    s = w.samples
    n = len(s)
    if n < 8:
        raise ResolutionError("need at least 8 boundary samples")
    theta = w.domain.boundary_theta
    increasing: list[float] = []
    decreasing: list[float] = []
    for k in range(n):
        sk = s[k]
        if sk == 0.0:
            before = s[(k - 1) % n]
            after = s[(k + 1) % n]
            if before < 0.0 < after:
                increasing.append(theta[k])
            elif before > 0.0 > after:
                decreasing.append(theta[k])
            else:
                return TransverseReport(False, [], [], 0, tangential_zero=True)
        else:
            after = s[(k + 1) % n]
            if sk * after < 0.0:
                th0, th1 = theta[k], theta[(k + 1) % n]
                if th1 <= th0:
                    th1 += 2.0 * np.pi
                tz = (th0 + (th1 - th0) * sk / (sk - after)) % (2.0 * np.pi)
                if sk < 0.0:
                    increasing.append(tz)
                else:
                    decreasing.append(tz)
    return TransverseReport(
        True, sorted(increasing), sorted(decreasing), len(increasing)
    )


