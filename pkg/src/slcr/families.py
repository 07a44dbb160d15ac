"""Closed-form solution families of the nonlinear Cauchy-Riemann system.

These families serve as oracles throughout the test and acceptance suites:

* ``affine_pair``:    u = alpha x + beta, v = alpha y + gamma, a solution for
                      every fibre parameter a.
* ``catenoid_pair``:  u = y tanh x, v = y^2 sech^2 x / 2 - cosh^2 x / 2,
                      a smooth a = 0 solution (normal bundle of a catenoid).
* ``paraboloid_union_pair``:  u = |y| - cosh(2x)/2, v = -y sinh(2x), an a = 0
                      solution whose du/dy is undefined on y = 0 (two smooth
                      sheets meeting in a curve).
* ``harvey_lawson_pair``:  the one-parameter family (u_a, v_a) describing the
                      Harvey-Lawson family of U(1)-invariant special
                      Lagrangian 3-folds; a T^2-cone at a = 0, smooth for
                      a != 0.

The Harvey-Lawson values are characterized pointwise by

    v^2 + y^2 = (x^2 + u^2) (x^2 + u^2 + 2|a|),      v u + y x = 0,
    u y <= 0,  v x >= 0,

which reduce, after eliminating v, to a cubic in alpha = u^2:

    alpha^3 + (2x^2 + 2|a|) alpha^2 + (x^4 + 2|a| x^2 - y^2) alpha - y^2 x^2 = 0

with exactly one admissible nonnegative root.
"""

from __future__ import annotations

from dataclasses import dataclass
from typing import Callable

import numpy as np

from .errors import NonPositiveScaleError, UndefinedDerivativeError

__all__ = [
    "AnalyticPair",
    "affine_pair",
    "catenoid_pair",
    "paraboloid_union_pair",
    "harvey_lawson_pair",
    "harvey_lawson_eval",
    "harvey_lawson_cubic_coefficients",
    "weighted_homogeneity_check",
]


@dataclass(frozen=True)
class AnalyticPair:
    """A (u, v) solution family with exact evaluators.

    ``evaluate(x, y) -> (u, v)`` works everywhere; ``derivatives(x, y) ->
    (u_x, u_y, v_x, v_y)`` raises :class:`UndefinedDerivativeError` on the
    family's non-smooth set.  ``a`` is the fibre parameter the family solves
    the system for (``None`` means every value of a, as for affine pairs).
    """

    kind: str
    a: float | None
    evaluate: Callable
    derivatives: Callable

    def cr_residual_pointwise(self, x, y, a: float):
        """Residuals (u_x - v_y, v_x + 2 sqrt(v^2+y^2+a^2) u_y) from exact derivatives."""
        x = np.asarray(x, dtype=float)
        y = np.asarray(y, dtype=float)
        u, v = self.evaluate(x, y)
        ux, uy, vx, vy = self.derivatives(x, y)
        r1 = ux - vy
        r2 = vx + 2.0 * np.sqrt(v**2 + y**2 + a**2) * uy
        return r1, r2


def affine_pair(alpha: float, beta: float, gamma: float) -> AnalyticPair:
    def ev(x, y):
        x = np.asarray(x, dtype=float)
        y = np.asarray(y, dtype=float)
        return alpha * x + beta, alpha * y + gamma

    def dv(x, y):
        x = np.asarray(x, dtype=float)
        z = np.zeros_like(x)
        return alpha + z, z, z, alpha + z

    return AnalyticPair("affine", None, ev, dv)


def catenoid_pair() -> AnalyticPair:
    def ev(x, y):
        x = np.asarray(x, dtype=float)
        y = np.asarray(y, dtype=float)
        sech2 = 1.0 / np.cosh(x) ** 2
        return y * np.tanh(x), 0.5 * y**2 * sech2 - 0.5 * np.cosh(x) ** 2

    def dv(x, y):
        x = np.asarray(x, dtype=float)
        y = np.asarray(y, dtype=float)
        t = np.tanh(x)
        sech2 = 1.0 / np.cosh(x) ** 2
        ux = y * sech2
        uy = t
        vx = -(y**2) * sech2 * t - np.cosh(x) * np.sinh(x)
        vy = y * sech2
        return ux, uy, vx, vy

    return AnalyticPair("catenoid", 0.0, ev, dv)


def paraboloid_union_pair() -> AnalyticPair:
    def ev(x, y):
        x = np.asarray(x, dtype=float)
        y = np.asarray(y, dtype=float)
        return np.abs(y) - 0.5 * np.cosh(2.0 * x), -y * np.sinh(2.0 * x)

    def dv(x, y):
        x = np.asarray(x, dtype=float)
        y = np.asarray(y, dtype=float)
        if np.any(y == 0.0):
            raise UndefinedDerivativeError(
                "du/dy of the paraboloid-union pair is undefined on y = 0"
            )
        ux = -np.sinh(2.0 * x)
        uy = np.sign(y)
        vx = -2.0 * y * np.cosh(2.0 * x)
        vy = -np.sinh(2.0 * x)
        return ux, uy, vx, vy

    return AnalyticPair("paraboloid_union", 0.0, ev, dv)


# -- Harvey-Lawson family ----------------------------------------------------


def harvey_lawson_cubic_coefficients(a: float, x, y):
    """Monic-cubic coefficients (c2, c1, c0) for alpha = u^2 at given (x, y)."""
    x = np.asarray(x, dtype=float)
    y = np.asarray(y, dtype=float)
    aa = abs(a)
    c2 = 2.0 * x**2 + 2.0 * aa
    c1 = x**4 + 2.0 * aa * x**2 - y**2
    c0 = -(y**2) * x**2
    return c2, c1, c0


def _positive_cubic_root(c2, c1, c0):
    """The unique nonnegative root of alpha^3 + c2 alpha^2 + c1 alpha + c0.

    A closed-form (trigonometric / Cardano) value seeds a safeguarded
    Newton-bisection polish in extended precision.  The coefficient structure
    (c2 >= 0, c0 <= 0) guarantees the bracket [0, hi]: P(0) = c0 <= 0 and P
    is positive beyond its largest real root.  The safeguard matters in the
    nearly-degenerate regimes (y ~ 0, where the wanted root collides with 0
    and the closed form loses all its digits to cancellation).
    """
    c2 = np.atleast_1d(np.asarray(c2, dtype=float))
    c1 = np.atleast_1d(np.asarray(c1, dtype=float))
    c0 = np.atleast_1d(np.asarray(c0, dtype=float))
    p = c1 - c2**2 / 3.0
    q = c0 - c1 * c2 / 3.0 + 2.0 * c2**3 / 27.0
    disc = (q / 2.0) ** 2 + (p / 3.0) ** 3

    seed = np.empty_like(p)
    trig = disc <= 0.0
    if np.any(trig):
        pt = p[trig]
        qt = q[trig]
        m = 2.0 * np.sqrt(np.maximum(-pt / 3.0, 0.0))
        with np.errstate(invalid="ignore", divide="ignore"):
            arg = np.where(m > 0.0, 3.0 * qt / (pt * np.where(m > 0.0, m, 1.0)), 0.0)
        theta = np.arccos(np.clip(arg, -1.0, 1.0)) / 3.0
        # largest of the three real roots
        seed[trig] = m * np.cos(theta)
    card = ~trig
    if np.any(card):
        qc = q[card]
        sq = np.sqrt(disc[card])
        seed[card] = np.cbrt(-qc / 2.0 + sq) + np.cbrt(-qc / 2.0 - sq)
    seed = np.maximum(seed - c2 / 3.0, 0.0)

    b2 = c2.astype(np.longdouble)
    b1 = c1.astype(np.longdouble)
    b0 = c0.astype(np.longdouble)

    def val_slope(r):
        return ((r + b2) * r + b1) * r + b0, (3.0 * r + 2.0 * b2) * r + b1

    # bracket: P(0) <= 0; expand hi until P(hi) >= 0
    lo = np.zeros_like(b0)
    hi = np.maximum(seed.astype(np.longdouble), np.sqrt(np.abs(b0)) + 1e-30)
    for _ in range(80):
        v, _ = val_slope(hi)
        bad = v < 0.0
        if not np.any(bad):
            break
        hi = np.where(bad, 2.0 * hi + 1e-30, hi)

    # when the small-root estimate -c0/c1 applies it is a far better start
    small = (c1 > 0.0) & (np.abs(c0) < 1e-3 * c1 * np.maximum(c1, 1.0))
    r = np.clip(np.where(small, -b0 / np.where(c1 > 0, b1, 1.0), seed), lo, hi)

    for _ in range(90):
        v, s = val_slope(r)
        lo = np.where(v < 0.0, r, lo)
        hi = np.where(v > 0.0, r, hi)
        with np.errstate(invalid="ignore", divide="ignore"):
            newton = r - np.where(s != 0.0, v / np.where(s != 0.0, s, 1.0), 0.0)
        inside = (newton > lo) & (newton < hi) & (s != 0.0)
        r_next = np.where(inside, newton, 0.5 * (lo + hi))
        if np.all(np.abs(r_next - r) <= 1e-22 * (1.0 + np.abs(r))):
            r = r_next
            break
        r = r_next
    return r.astype(float)


def harvey_lawson_eval(a: float, x, y):
    """Value (u, v) of the Harvey-Lawson family at (x, y); vectorized.

    Negative a is folded through |a| (the system depends on a only through
    a^2).  The sign conventions u y <= 0 and v x >= 0 select the branch.
    """
    scalar = np.isscalar(x) and np.isscalar(y)
    x = np.atleast_1d(np.asarray(x, dtype=float))
    y = np.atleast_1d(np.asarray(y, dtype=float))
    x, y = np.broadcast_arrays(x, y)
    aa = abs(a)

    u = np.zeros(x.shape)
    v = np.zeros(x.shape)

    on_axis = y == 0.0
    if np.any(on_axis):
        xs = x[on_axis]
        v[on_axis] = xs * np.sqrt(xs**2 + 2.0 * aa)

    off = ~on_axis
    if np.any(off):
        xo = x[off]
        yo = y[off]
        c2, c1, c0 = harvey_lawson_cubic_coefficients(aa, xo, yo)
        alpha = _positive_cubic_root(c2, c1, c0)
        # on x = 0 the root y^2 / (|a| + sqrt(a^2 + y^2)) is exact; prefer it
        x0 = xo == 0.0
        if np.any(x0):
            y0 = yo[x0]
            alpha[x0] = y0**2 / (aa + np.sqrt(aa**2 + y0**2))
        uo = -np.sign(yo) * np.sqrt(alpha)
        u[off] = uo
        v[off] = -yo * xo / uo

    if scalar:
        return float(u[0]), float(v[0])
    return u, v


def _hl_derivatives(a: float, x, y):
    """Exact (u_x, u_y, v_x, v_y) by implicit differentiation of the defining
    relations; raises on the a = 0 cone point (0, 0) where the family is only
    continuous."""
    x = np.atleast_1d(np.asarray(x, dtype=float))
    y = np.atleast_1d(np.asarray(y, dtype=float))
    x, y = np.broadcast_arrays(x, y)
    aa = abs(a)
    origin = (x == 0.0) & (y == 0.0)
    if aa == 0.0 and np.any(origin):
        raise UndefinedDerivativeError(
            "Harvey-Lawson a = 0 derivatives are undefined at (0, 0)"
        )

    u, v = harvey_lawson_eval(a, x, y)
    u = np.atleast_1d(u)
    v = np.atleast_1d(v)
    ux = np.empty(x.shape)
    uy = np.empty(x.shape)
    vx = np.empty(x.shape)
    vy = np.empty(x.shape)

    # Differentiate G1 = v^2 + y^2 - (x^2+u^2)(x^2+u^2+2|a|) = 0 and
    # G2 = v u + y x = 0 with respect to x and y and solve the 2x2 systems.
    w = x**2 + u**2 + aa
    off_axis = y != 0.0
    if np.any(off_axis):
        m11 = -4.0 * u * w
        m12 = 2.0 * v
        m21 = v
        m22 = u
        det = m11 * m22 - m12 * m21
        rx1 = 4.0 * x * w
        rx2 = -y
        ry1 = -2.0 * y
        ry2 = -x
        o = off_axis
        ux[o] = (rx1[o] * m22[o] - m12[o] * rx2[o]) / det[o]
        vx[o] = (m11[o] * rx2[o] - rx1[o] * m21[o]) / det[o]
        uy[o] = (ry1[o] * m22[o] - m12[o] * ry2[o]) / det[o]
        vy[o] = (m11[o] * ry2[o] - ry1[o] * m21[o]) / det[o]

    on_axis = ~off_axis
    if np.any(on_axis):
        # u = 0 there; the 2x2 system degenerates but solves directly:
        # v_x = 2 (x^2 + |a|) / sqrt(x^2 + 2|a|), u_y = -1 / sqrt(x^2 + 2|a|).
        xs = x[on_axis]
        s = np.sqrt(xs**2 + 2.0 * aa)
        ux[on_axis] = 0.0
        vy[on_axis] = 0.0
        vx[on_axis] = 2.0 * (xs**2 + aa) / s
        uy[on_axis] = -1.0 / s
    return ux, uy, vx, vy


def harvey_lawson_pair(a: float) -> AnalyticPair:
    return AnalyticPair(
        "harvey_lawson",
        float(a),
        lambda x, y: harvey_lawson_eval(a, x, y),
        lambda x, y: _hl_derivatives(a, x, y),
    )


def weighted_homogeneity_check(samples) -> float:
    """Max deviation of the a = 0 scaling law over (x, y, t) samples.

    Checks u0(t x, t^2 y) = t u0(x, y) and v0(t x, t^2 y) = t^2 v0(x, y);
    each sample needs t > 0.
    """
    worst = 0.0
    for x, y, t in samples:
        if t <= 0:
            raise NonPositiveScaleError(f"scale t must be positive, got {t}")
        u1, v1 = harvey_lawson_eval(0.0, t * x, t * t * y)
        u0, v0 = harvey_lawson_eval(0.0, x, y)
        worst = max(worst, abs(u1 - t * u0) + abs(v1 - t * t * v0))
    return worst
