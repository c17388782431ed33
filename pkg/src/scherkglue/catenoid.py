"""Conformal parametrizations of catenoids and planes.

The one-parameter family

    kappa[beta](x, s) = rho[beta](s) e_r(x) + sin(beta) s e_z,
    rho[beta](s) = cosh(s) + cos(beta) sinh(s),

interpolates between the flat plane (beta = 0) and the unit catenoid
(beta = pi/2); every member is a conformal minimal immersion with
conformal factor rho[beta].  The renormalized maps

    kt[beta](x, s) = (kappa[beta](tau x, tau s) - kappa[beta](0, 0)) / tau

are the catenoidal ends of the construction, with logarithmic growth
sin(beta)/tau.  e_r follows the convention e_r(t) = sin(t) e_x +
cos(t) e_y.
"""

from dataclasses import dataclass

import numpy as np

from .jets import Jet


def e_r(t):
    t = np.asarray(t, dtype=float)
    return np.stack([np.sin(t), np.cos(t), np.zeros_like(t)], axis=-1)


def e_r_prime(t):
    t = np.asarray(t, dtype=float)
    return np.stack([np.cos(t), -np.sin(t), np.zeros_like(t)], axis=-1)


def e_y_beta(beta):
    return np.array([0.0, np.cos(beta), np.sin(beta)])


def e_z_beta(beta):
    return np.array([0.0, -np.sin(beta), np.cos(beta)])


def rho(beta, s):
    s = np.asarray(s, dtype=float)
    return np.cosh(s) + np.cos(beta) * np.sinh(s)


def rho_prime(beta, s):
    s = np.asarray(s, dtype=float)
    return np.sinh(s) + np.cos(beta) * np.cosh(s)


@dataclass
class CatenoidParams:
    beta: float
    tau: float = 1.0

    def __post_init__(self):
        if not 0.0 <= self.beta <= np.pi:
            raise ValueError("beta must lie in [0, pi]")
        if self.tau <= 0.0:
            raise ValueError("tau must be positive")


def kappa_eval(beta, x, s, with_jet=False):
    """kappa[beta] at (x, s); optionally the exact second-order jet."""
    x = np.asarray(x, dtype=float)
    s = np.asarray(s, dtype=float)
    r = rho(beta, s)[..., None]
    pos = r * e_r(x)
    pos[..., 2] += np.sin(beta) * s
    if not with_jet:
        return pos
    rp = rho_prime(beta, s)[..., None]
    er, erp = e_r(x), e_r_prime(x)
    fx = r * erp
    fs = rp * er
    fs[..., 2] += np.sin(beta)
    fxx = -r * er
    fss = r * er
    fxs = rp * erp
    return pos, (fx, fs, fxx, fss, fxs)


def kappa_jet_closures(beta):
    """Derivative closures of kappa[beta] for jets_from_map analytic mode."""
    def fx(x, s):
        return rho(beta, s)[..., None] * e_r_prime(x)

    def fs(x, s):
        out = rho_prime(beta, s)[..., None] * e_r(x)
        out[..., 2] += np.sin(beta)
        return out

    def fxx(x, s):
        return -rho(beta, s)[..., None] * e_r(x)

    def fss(x, s):
        return rho(beta, s)[..., None] * e_r(x)

    def fxs(x, s):
        return rho_prime(beta, s)[..., None] * e_r_prime(x)

    return fx, fs, fxx, fss, fxs


def kappa_map(beta):
    return lambda x, s: kappa_eval(beta, x, s)


def kappa_tilde_eval(beta, tau, x, s, with_jet=False):
    """Renormalized end (kappa(tau x, tau s) - kappa(0, 0)) / tau."""
    if tau <= 0.0:
        raise ValueError("tau must be positive")
    x = np.asarray(x, dtype=float)
    s = np.asarray(s, dtype=float)
    origin = kappa_eval(beta, 0.0, 0.0)
    if not with_jet:
        return (kappa_eval(beta, tau * x, tau * s) - origin) / tau
    pos, (fx, fs, fxx, fss, fxs) = kappa_eval(beta, tau * x, tau * s, with_jet=True)
    return (pos - origin) / tau, (fx, fs, tau * fxx, tau * fss, tau * fxs)


def kappa_tilde_jet_at(beta, tau, x, s):
    _, (fx, fs, fxx, fss, fxs) = kappa_tilde_eval(beta, tau, x, s, with_jet=True)
    return Jet.from_partials(fx, fs, fxx, fss, fxs)


@dataclass
class FrameAtPoint:
    e1: np.ndarray
    e2: np.ndarray
    e3: np.ndarray
    a: float
    b: float


def frame_eval(beta, x, s):
    """Adapted orthonormal frame along kappa[beta].

    e1 = kappa_x / rho, e2 = kappa_s / rho = a e_r + b e_z and
    e3 = -b e_r + a e_z with a = rho'/rho, b = sin(beta)/rho; the pair
    satisfies a' = b^2, b' = -a b and a^2 + b^2 = 1.
    """
    r = rho(beta, s)
    a = rho_prime(beta, s) / r
    b = np.sin(beta) / r
    er = e_r(x)
    ez = np.array([0.0, 0.0, 1.0])
    return FrameAtPoint(
        e1=e_r_prime(x),
        e2=a * er + b * ez,
        e3=-b * er + a * ez,
        a=float(a),
        b=float(b),
    )


def frame_derivatives(beta, s):
    """Connection matrices T_x, T_s: the components of d(e_i) sit in column i.

    That is, d_x e_i = sum_j (T_x)[j, i] e_j and likewise in s, matching
    d_x e1 = -a e2 + b e3, d_x e2 = a e1, d_x e3 = -b e1,
    d_s e1 = 0, d_s e2 = -b e3, d_s e3 = b e2.
    """
    r = rho(beta, s)
    a = rho_prime(beta, s) / r
    b = np.sin(beta) / r
    Tx = np.array([[0.0, a, -b], [-a, 0.0, 0.0], [b, 0.0, 0.0]])
    Ts = np.array([[0.0, 0.0, 0.0], [0.0, 0.0, b], [0.0, -b, 0.0]])
    return Tx, Ts


def gauss_pullbacks(x, s):
    """Pullbacks (x*, y*, z*) of the sphere coordinates under the Gauss map.

    For the scale-2 catenoid C0 = 2 kappa[pi/2] these are
    x* = sin(x)/cosh(s), y* = cos(x)/cosh(s), z* = -tanh(s); the triple
    is the chosen unit normal and has unit length identically.
    """
    x = np.asarray(x, dtype=float)
    s = np.asarray(s, dtype=float)
    sech = 1.0 / np.cosh(s)
    return np.sin(x) * sech, np.cos(x) * sech, -np.tanh(s)


def c0_eval(x, s):
    """The scale-2 catenoid C0 = 2 kappa[pi/2]."""
    return 2.0 * kappa_eval(np.pi / 2, x, s)


def c0_normal(x, s):
    """Gauss-map normal of C0, components (x*, y*, z*)."""
    xs, ys, zs = gauss_pullbacks(x, s)
    return np.stack([xs, ys, zs], axis=-1)


def fit_log_growth(z, r):
    """Least-squares slope of z against log r (logarithmic growth rate)."""
    L = np.log(np.asarray(r, dtype=float))
    A = np.column_stack([L, np.ones_like(L)])
    coef, *_ = np.linalg.lstsq(A, np.asarray(z, dtype=float), rcond=None)
    return float(coef[0])


def end_log_growth(beta, tau=None, s_window=(5.0, 10.0), n=60):
    """Measured logarithmic growth of the upper end by far-field fit.

    For kappa[beta] the growth is sin(beta); for the renormalized end
    it is sin(beta)/tau, the radius being measured from the end's own
    axis through (0, -1/tau).
    """
    s = np.linspace(*s_window, n)
    x = np.zeros_like(s)
    if tau is None:
        pos = kappa_eval(beta, x, s)
        r = np.hypot(pos[..., 0], pos[..., 1])
    else:
        pos = kappa_tilde_eval(beta, tau, x, s)
        r = np.hypot(pos[..., 0], pos[..., 1] + 1.0 / tau)
    return fit_log_growth(pos[..., 2], r)
