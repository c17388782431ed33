"""Inverses of the flat Laplacian on the cylinder in decaying classes.

Three solvers, in increasing generality:

* solve_R1 inverts Delta for sources with zero meridian average, mode
  by Fourier mode in x with a tridiagonal solve in s and radiation
  closures u' = -|k| u at the truncation ends.

* solve_R2 inverts Delta for general decaying sources at the price of
  a correction supported in a prescribed bounded set D: multiples of
  psi*s and psi (psi = dist(.,dD)^4 inside D) are added to kill the
  total mass and first s-moment, after which the meridian average is
  integrated twice from the decaying side and the rest goes to R1.

* solve_R3 inverts a second-order perturbation L of Delta by Neumann
  iteration u <- R2[D, E - (L - Delta) u].

All residuals quoted by the solvers are with respect to the discrete
operator (spectral in x, three-point in s), measured on interior rows.
"""

from dataclasses import dataclass, field

import numpy as np
from scipy.linalg import solve_banded
from scipy.ndimage import distance_transform_edt

from .fields import CylinderField, meridian_split

RING_TOL = 1e-10


class MeridianAverageError(ValueError):
    pass


class DegenerateDomainError(ValueError):
    pass


class PerturbationTooLargeError(RuntimeError):
    pass


def _mode_solve(Ek, k, h):
    """Tridiagonal solve of u'' - k^2 u = Ek with radiation ends."""
    ns = Ek.shape[0]
    ab = np.zeros((3, ns), dtype=Ek.dtype)
    ab[0, 1:] = 1.0 / h**2
    ab[1, :] = -2.0 / h**2 - k**2
    ab[2, :-1] = 1.0 / h**2
    # ghost elimination for u' = +|k| u at -smax and u' = -|k| u at +smax
    ab[0, 1] = 2.0 / h**2
    ab[1, 0] = -(2.0 + 2.0 * h * abs(k)) / h**2 - k**2
    ab[2, -2] = 2.0 / h**2
    ab[1, -1] = -(2.0 + 2.0 * h * abs(k)) / h**2 - k**2
    return solve_banded((1, 1), ab, Ek)


def solve_R1(E, ring_tol=RING_TOL):
    """Invert the discrete Delta_Omega on zero-meridian-average sources."""
    bar = E.meridian_average()
    scale = max(E.sup(), 1e-300)
    if np.max(np.abs(bar)) > ring_tol * scale:
        raise MeridianAverageError(
            f"meridian average present: sup |bar E| = {np.max(np.abs(bar)):.3e}"
        )
    h = E.hs
    Ehat = np.fft.rfft(E.values, axis=0)
    n_modes = Ehat.shape[0]
    Uhat = np.zeros_like(Ehat)
    for m in range(1, n_modes):
        Uhat[m] = _mode_solve(Ehat[m], m, h)
    u = np.fft.irfft(Uhat, n=E.nx, axis=0)
    u -= u.mean(axis=0)[None, :]  # kill round-off in the zero mode
    return E.like(u)


def residual_interior(u, E):
    """sup |Delta u - E| over interior rows, in units of sup |E|."""
    r = u.laplacian().values - E.values
    denom = max(E.sup(), 1e-300)
    return float(np.max(np.abs(r[:, 2:-2]))) / denom


def distance_field(mask, hx, hs):
    """Distance to the complement of the mask, periodic in x."""
    tiled = np.concatenate([mask, mask, mask], axis=0)
    d = distance_transform_edt(tiled, sampling=(hx, hs))
    n = mask.shape[0]
    return d[n:2 * n]


@dataclass
class R2Result:
    u: CylinderField
    a: float
    b: float
    psi: np.ndarray
    bar_mismatch: float = 0.0
    tail_sup: tuple = (0.0, 0.0)


def _bar_double_integral(Fbar, h):
    """v with exact 3-point v'' = Fbar on interior rows, zero right seed.

    Explicitly v[i] = h^2 sum_{j>i} (j-i) Fbar[j]; the left tail decays
    iff the plain interior sums of Fbar and of j*Fbar vanish, which is
    exactly what the moment corrections of solve_R2 enforce.
    """
    n = Fbar.shape[0]
    v = np.zeros(n)
    for i in range(n - 2, 0, -1):
        v[i - 1] = 2.0 * v[i] - v[i + 1] + h**2 * Fbar[i]
    return v


def _plain_moment(values, weight, hx, hs):
    """h_x h_s sum over all x and interior s rows, matching the bar solve."""
    w = weight[None, 1:-1] if weight.ndim == 1 else weight[:, 1:-1]
    return hx * hs * float(np.sum(values[:, 1:-1] * w))


def solve_R2(D_mask, E, ring_tol=RING_TOL):
    """Invert Delta modulo corrections psi*s, psi supported in D."""
    hx = 2 * np.pi / E.nx
    hs = E.hs
    d = distance_field(np.asarray(D_mask, dtype=bool), hx, hs)
    psi = d**4
    s = E.s
    f = psi * s[None, :]
    g = psi
    ones = np.ones_like(s)
    M = np.array(
        [
            [_plain_moment(f, ones, hx, hs), _plain_moment(g, ones, hx, hs)],
            [_plain_moment(f, s, hx, hs), _plain_moment(g, s, hx, hs)],
        ]
    )
    rhs = -np.array(
        [_plain_moment(E.values, ones, hx, hs), _plain_moment(E.values, s, hx, hs)]
    )
    scale = max(abs(M).max(), 1e-300)
    if abs(np.linalg.det(M)) < 1e-10 * scale**2:
        raise DegenerateDomainError("degenerate domain D: moment matrix singular")
    a, b = np.linalg.solve(M, rhs)
    F = E.like(E.values + a * f + b * g)

    split = meridian_split(F)
    ring = split.ring
    ring.values -= ring.values.mean(axis=0)[None, :]
    u_ring = solve_R1(ring, ring_tol=max(ring_tol, 1e-9))

    vbar = _bar_double_integral(split.bar, hs)
    # left-sided evaluation of the same double integral; the mismatch of
    # the two measures how far the discrete moments are from zero
    vbar_flipped = _bar_double_integral(split.bar[::-1], hs)[::-1]
    mismatch = float(np.max(np.abs(vbar - vbar_flipped)))

    u = E.like(u_ring.values + vbar[None, :])
    tail = (float(np.max(np.abs(u.values[:, :3]))), float(np.max(np.abs(u.values[:, -3:]))))
    return R2Result(u=u, a=a, b=b, psi=psi, bar_mismatch=mismatch, tail_sup=tail)


@dataclass
class R3Result:
    u: CylinderField
    a: float
    b: float
    iterations: int
    update_history: list = field(default_factory=list)
    residual: float = 0.0


def operator_gap(Lop, probe_fields):
    """sup-norm gap of Lop from Delta over a probe basis, per unit probe."""
    gaps = []
    for p in probe_fields:
        g = Lop(p).values - p.laplacian().values
        gaps.append(np.max(np.abs(g[:, 2:-2])) / max(p.sup(), 1e-300))
    return max(gaps)


def solve_R3(Lop, D_mask, E, tol=1e-9, max_iter=200):
    """Neumann iteration for L u = E (on the complement of D) via R2."""
    res = solve_R2(D_mask, E)
    u = res.u
    updates = []
    grow = 0
    scale = max(E.sup(), 1e-300)
    for it in range(1, max_iter + 1):
        gap = Lop(u).values - u.laplacian().values
        res = solve_R2(D_mask, E.like(E.values - gap))
        delta = float(np.max(np.abs(res.u.values - u.values)))
        updates.append(delta)
        u = res.u
        if delta < tol * scale:
            break
        if len(updates) >= 2 and updates[-1] > updates[-2]:
            grow += 1
            if grow >= 5:
                probe = E.like(np.exp(-E.mesh()[1] ** 2))
                raise PerturbationTooLargeError(
                    "perturbation too large: iteration diverges "
                    f"(measured gap {operator_gap(Lop, [probe]):.3e})"
                )
        else:
            grow = 0
    else:
        raise PerturbationTooLargeError("perturbation too large: no convergence")
    outside = ~np.asarray(D_mask, dtype=bool)
    r = (Lop(u).values - E.values)[:, 2:-2]
    r = np.where(outside[:, 2:-2], r, 0.0)
    return R3Result(
        u=u, a=res.a, b=res.b, iterations=it, update_history=updates,
        residual=float(np.max(np.abs(r))) / scale,
    )
