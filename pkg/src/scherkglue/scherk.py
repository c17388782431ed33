"""The singly periodic tower surface Sigma[theta] and its graph charts.

Sigma[theta] is the zero set of

    F(x, y, z) = cos(x) - cos^2(t) cosh(y/cos t) + sin^2(t) cosh(z/sin t),

periodic in x with period 2 pi, asymptotic to four half planes at
angle theta to the horizontal, and close to a catenoid of scale
sin(theta) near the z-axis.  This module provides the implicit
function, the exact top-sheet chart, Newton-solved graph functions
over the asymptotic wing planes and over the model catenoid, the
collapsed-limit height function log(cosh y - cos x), and the Killing
functions e_i . nu.
"""

from dataclasses import dataclass, field

import numpy as np

from . import catenoid
from .cutoffs import psi

OVERFLOW_LIMIT = 700.0
NEWTON_MAX_ITER = 50
NEWTON_TOL = 1e-13


class ArgumentOverflowError(FloatingPointError):
    pass


class GraphRegimeError(RuntimeError):
    pass


class NewtonStallError(RuntimeError):
    pass


@dataclass
class ScherkParams:
    theta: float
    eps0: float = 0.25
    theta_bar: float = 0.3

    def __post_init__(self):
        if not 0.0 < self.theta < self.theta_bar:
            raise ValueError(f"theta must lie in (0, {self.theta_bar})")

    @property
    def h_s(self):
        """Vertical offset of the asymptotic wing planes."""
        t = self.theta
        return np.sin(t) * np.log(1.0 / np.tan(t) ** 2)

    @property
    def beta_wings(self):
        return (self.theta, np.pi - self.theta)


def F_eval(theta, p, with_gradient=False, with_scale=False):
    """Implicit function of Sigma[theta] and (optionally) its gradient.

    with_scale also returns the magnitude of the cancelling cosh terms,
    the natural unit for round-off in F (F is a difference of terms of
    this size, so |F| cannot be resolved below scale * eps).
    """
    p = np.asarray(p, dtype=float)
    x, y, z = p[..., 0], p[..., 1], p[..., 2]
    ay = y / np.cos(theta)
    az = z / np.sin(theta)
    if np.any(np.abs(ay) > OVERFLOW_LIMIT) or np.any(np.abs(az) > OVERFLOW_LIMIT):
        raise ArgumentOverflowError("argument overflow in cosh")
    t1 = np.cos(theta) ** 2 * np.cosh(ay)
    t2 = np.sin(theta) ** 2 * np.cosh(az)
    F = np.cos(x) - t1 + t2
    out = [F]
    if with_gradient:
        out.append(
            np.stack(
                [-np.sin(x), -np.cos(theta) * np.sinh(ay), np.sin(theta) * np.sinh(az)],
                axis=-1,
            )
        )
    if with_scale:
        out.append(1.0 + t1 + t2)
    return out[0] if len(out) == 1 else tuple(out)


def top_sheet_height(theta, x, y):
    """Height z >= 0 of the upper sheet over (x, y): the largest root of F.

    Closed form: cosh(z/sin t) = (cos^2 t cosh(y/cos t) - cos x)/sin^2 t.
    Returns NaN where the sheet does not exist (inside the neck hole).
    """
    x = np.asarray(x, dtype=float)
    y = np.asarray(y, dtype=float)
    Q = (np.cos(theta) ** 2 * np.cosh(y / np.cos(theta)) - np.cos(x)) / np.sin(theta) ** 2
    with np.errstate(invalid="ignore"):
        return np.sin(theta) * np.arccosh(np.where(Q >= 1.0, Q, np.nan))


def hole_radius(theta, safety=1.0):
    """Radius of the neck hole in the (x, y) plane (where Q = 1 at x = 0)."""
    c2 = np.cos(theta) ** 2
    return safety * np.cos(theta) * np.arccosh((1.0 + np.sin(theta) ** 2) / c2)


def wing_plane(theta, h, x, s):
    """Affine wing plane x e_x + s e_y[beta] + h e_z with beta = theta."""
    x = np.asarray(x, dtype=float)
    s = np.asarray(s, dtype=float)
    out = np.empty(np.broadcast(x, s).shape + (3,))
    out[..., 0] = x
    out[..., 1] = s * np.cos(theta)
    out[..., 2] = s * np.sin(theta) + h
    return out


def wing_graph_newton(params, x, s, f0=None):
    """Solve F(wing_plane + f e_z[theta]) = 0 for f, vectorized Newton.

    Valid for s >= 1 where the surface is a graph over the wing plane;
    the iteration is aborted if any point leaves |f| <= 1.
    """
    theta, h = params.theta, params.h_s
    x = np.asarray(x, dtype=float)
    s = np.asarray(s, dtype=float)
    ez = catenoid.e_z_beta(theta)
    base = wing_plane(theta, h, x, s)
    f = np.zeros(np.broadcast(x, s).shape) if f0 is None else np.array(f0, dtype=float)
    for it in range(NEWTON_MAX_ITER):
        p = base + f[..., None] * ez
        F, grad = F_eval(theta, p, with_gradient=True)
        df = np.einsum("...c,c->...", grad, ez)
        step = F / df
        f = f - step
        if np.any(np.abs(f) > 1.0):
            bad = np.unravel_index(np.argmax(np.abs(f)), f.shape)
            raise GraphRegimeError(f"left graph regime |f| > 1 at grid index {bad}")
        if np.max(np.abs(F)) < NEWTON_TOL:
            break
    else:
        bad = np.unravel_index(np.argmax(np.abs(F)), F.shape)
        raise NewtonStallError(f"Newton stall in wing graph at grid index {bad}")
    return f


@dataclass
class WingGraph:
    params: ScherkParams
    xs: np.ndarray
    ss: np.ndarray
    fW: np.ndarray
    side: int = 1
    residual: float = 0.0
    sup_weighted: float = 0.0  # sup e^s |f_W| / sin(theta)

    @property
    def beta(self):
        return self.params.beta_wings[self.side - 1]


def wing_graph_solve(params, xs, ss, side=1):
    """Wing graph f_W on the tensor grid xs x ss (ss >= 1)."""
    X, S = np.meshgrid(xs, ss, indexing="ij")
    f = wing_graph_newton(params, X, S)
    theta, h = params.theta, params.h_s
    p = wing_plane(theta, h, X, S) + f[..., None] * catenoid.e_z_beta(theta)
    res = float(np.max(np.abs(F_eval(theta, p))))
    sup_w = float(np.max(np.exp(S) * np.abs(f))) / np.sin(theta)
    return WingGraph(
        params=params, xs=np.asarray(xs, dtype=float), ss=np.asarray(ss, dtype=float),
        fW=f, side=side, residual=res, sup_weighted=sup_w,
    )


def _near_axis_F(theta, q, with_gradient=False):
    """Rescaled implicit function whose zero set is Sigma/sin(theta)."""
    q = np.asarray(q, dtype=float)
    x, y, z = q[..., 0], q[..., 1], q[..., 2]
    st, ct = np.sin(theta), np.cos(theta)
    F = np.cos(st * x) - ct**2 * np.cosh(np.tan(theta) * y) + st**2 * np.cosh(z)
    if not with_gradient:
        return F
    grad = np.stack(
        [
            -st * np.sin(st * x),
            -ct**2 * np.tan(theta) * np.sinh(np.tan(theta) * y),
            st**2 * np.sinh(z),
        ],
        axis=-1,
    )
    return F, grad


def near_axis_newton(params, x, s):
    """Solve F(C0 + f nu[C0]) = 0 on the rescaled surface Sigma/sin(theta)."""
    theta = params.theta
    x = np.asarray(x, dtype=float)
    s = np.asarray(s, dtype=float)
    base = catenoid.c0_eval(x, s)
    nu = catenoid.c0_normal(x, s)
    f = np.zeros(np.broadcast(x, s).shape)
    for it in range(NEWTON_MAX_ITER):
        q = base + f[..., None] * nu
        F, grad = _near_axis_F(theta, q, with_gradient=True)
        gnorm = np.linalg.norm(grad, axis=-1)
        df = np.einsum("...c,...c->...", grad, nu)
        f = f - F / df
        if np.max(np.abs(F) / gnorm) < NEWTON_TOL:
            break
    else:
        bad = np.unravel_index(np.argmax(np.abs(F)), F.shape)
        raise NewtonStallError(f"Newton stall in near-axis graph at index {bad}")
    return f


@dataclass
class NearAxisGraph:
    params: ScherkParams
    xs: np.ndarray
    ss: np.ndarray
    fC: np.ndarray
    s_max_c: float
    residual: float = 0.0
    sup_weighted: float = 0.0  # sup |f_C| / (theta^2 cosh^2 s)


def near_axis_smax(params):
    """Half-length of the near-axis chart, arcosh(eps_cat / theta).

    eps_cat is eps0 enlarged when theta is not small enough for the
    neck to fit under the fixed radius (keeps an overlap with the
    planar chart at every desk theta).
    """
    eps_cat = max(params.eps0, 0.65 * wing_inner_radius(params))
    ratio = max(eps_cat / params.theta, 1.02)
    return float(np.arccosh(ratio))


def wing_inner_radius(params):
    """Inner radius of the planar chart: clear of the neck hole."""
    return max(params.eps0 / 2.0, 1.3 * hole_radius(params.theta))


def near_axis_graph_solve(params, xs, ss):
    """Near-axis graph f_C over the model catenoid on xs x ss."""
    X, S = np.meshgrid(xs, ss, indexing="ij")
    f = near_axis_newton(params, X, S)
    q = catenoid.c0_eval(X, S) + f[..., None] * catenoid.c0_normal(X, S)
    F, grad = _near_axis_F(params.theta, q, with_gradient=True)
    res = float(np.max(np.abs(F) / np.linalg.norm(grad, axis=-1)))
    sup_w = float(np.max(np.abs(f) / np.cosh(S) ** 2)) / params.theta**2
    return NearAxisGraph(
        params=params, xs=np.asarray(xs, dtype=float), ss=np.asarray(ss, dtype=float),
        fC=f, s_max_c=float(np.max(np.abs(ss))), residual=res, sup_weighted=sup_w,
    )


def near_axis_map(params, x, s):
    """The chart C = sin(theta) (C0 + f_C nu[C0]) into Sigma (on demand)."""
    f = near_axis_newton(params, x, s)
    q = catenoid.c0_eval(x, s) + f[..., None] * catenoid.c0_normal(x, s)
    return np.sin(params.theta) * q


def f_dot_limit(x, y):
    """Collapsed-limit height log(cosh y - cos x), harmonic off the lattice."""
    x = np.asarray(x, dtype=float)
    y = np.asarray(y, dtype=float)
    arg = np.cosh(y) - np.cos(x)
    if np.any(arg <= 1e-14):
        raise ValueError("at singular point of the limit function")
    return np.log(arg)


def killing_functions(nu):
    """Killing functions phi_i = e_i . nu from a unit normal field."""
    nu = np.asarray(nu, dtype=float)
    return nu[..., 0], nu[..., 1], nu[..., 2]


@dataclass
class PlanarChart:
    """The blended chart W over the punctured cylinder.

    Below the blend band (|s| <= 10) it is the exact vertical-line
    chart of the top sheet; beyond (|s| >= 11) it is exactly the wing
    graph map; the mirror rule W(x, -s) = R_y W(x, s) covers the
    second wing.
    """

    params: ScherkParams
    blend: tuple = (10.0, 11.0)

    def __call__(self, x, s):
        x = np.asarray(x, dtype=float)
        s = np.asarray(s, dtype=float)
        x, s = np.broadcast_arrays(x, s)
        r2 = x**2 + s**2
        r_in = wing_inner_radius(self.params)
        if np.any(r2 < r_in**2 - 1e-12):
            raise ValueError("point inside excluded disc of the planar chart")
        out = self._upper(x, np.abs(s))
        neg = s < 0
        out[neg, 1] = -out[neg, 1]
        return out

    def _upper(self, x, s):
        params = self.params
        theta, h = params.theta, params.h_s
        t = psi(self.blend[0], self.blend[1], s)
        out = np.zeros(x.shape + (3,))
        low = t < 1.0  # vertical-line chart contributes
        high = t > 0.0  # wing graph contributes
        if np.any(low):
            z = top_sheet_height(theta, x[low], s[low])
            out[low] += (1.0 - t[low])[..., None] * np.stack([x[low], s[low], z], axis=-1)
        if np.any(high):
            f = wing_graph_newton(params, x[high], s[high])
            w1 = wing_plane(theta, h, x[high], s[high]) + f[..., None] * catenoid.e_z_beta(theta)
            out[high] += t[high][..., None] * w1
        return out
