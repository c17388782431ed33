"""Second-order jet calculus for immersions of planar domains into R^3.

A jet packs the first partials (two 3-vectors) and second partials
(four 3-vectors, mixed entries symmetrized on ingest) of a map
(x, s) -> R^3 at one parameter point.  All pointwise geometric
quantities -- metric, dual metric, unit normal, second fundamental
form, mean curvature H = g^{ij} A_ij, Christoffel symbols and the
coefficients of the stability operator Delta_g + |A|^2 -- are evaluated
from the jet alone, so they can be fed either exact derivatives or
finite-difference ones.

Degeneracy of the first-order block is measured by the scale-invariant
ratio

    a(J) = 2 sqrt(det (J1^T J1)) / |J1|^2  in [0, 1],

which is 1 exactly for conformal jets and 0 for rank-deficient ones.
"""

from dataclasses import dataclass

import numpy as np

TOLERANCE_REGULARITY = 1e-6

# Scaling degree of each quantity under J -> c J.
HOMOGENEITY_DEGREES = {
    "g": 2,
    "gInv": -2,
    "nu": 0,
    "H": -1,
    "christoffel": 0,
    "A": 1,
    "normA": -1,
    "laplace_coeffs": -2,
    "stability_coeffs": -2,
}


class DegenerateJetError(ValueError):
    pass


@dataclass
class Jet:
    """First and second partials of an immersion at one point.

    J1 has shape (2, 3): rows are d/dx and d/ds of the map.
    J2 has shape (2, 2, 3): J2[i, j] is the (i, j) second partial.
    """

    J1: np.ndarray
    J2: np.ndarray

    def __post_init__(self):
        self.J1 = np.asarray(self.J1, dtype=float)
        self.J2 = np.asarray(self.J2, dtype=float)
        if self.J1.shape != (2, 3) or self.J2.shape != (2, 2, 3):
            raise ValueError("jet blocks must have shapes (2,3) and (2,2,3)")

    @classmethod
    def from_partials(cls, fx, fs, fxx, fss, fxs, fsx=None):
        """Build a jet, averaging the two mixed partials (C^2 symmetry)."""
        if fsx is None:
            fsx = fxs
        mixed = 0.5 * (np.asarray(fxs, dtype=float) + np.asarray(fsx, dtype=float))
        J1 = np.stack([fx, fs])
        J2 = np.array([[fxx, mixed], [mixed, fss]], dtype=float)
        return cls(J1, J2)

    def scaled(self, c):
        return Jet(c * self.J1, c * self.J2)

    def shifted(self, other, sigma=1.0):
        """Jet J + sigma * E for a perturbation jet E."""
        return Jet(self.J1 + sigma * other.J1, self.J2 + sigma * other.J2)

    def flat(self):
        """All 18 components as one vector (J1 first, row-major)."""
        return np.concatenate([self.J1.ravel(), self.J2.ravel()])

    @classmethod
    def from_flat(cls, v):
        v = np.asarray(v, dtype=float)
        return cls(v[:6].reshape(2, 3), v[6:].reshape(2, 2, 3))


@dataclass
class GeomQuantities:
    g: np.ndarray            # 2x2 metric
    gInv: np.ndarray         # 2x2 dual metric
    nu: np.ndarray           # unit normal
    A: np.ndarray            # 2x2 second fundamental form
    H: float                 # mean curvature, trace of A in g
    normA2: float            # |A|^2 = g^{ik} g^{jl} A_ij A_kl
    christoffel: np.ndarray  # Gamma[k, i, j]
    stability_coeffs: dict   # coefficients of Delta_g + |A|^2


def a_regularity(jet):
    """Degeneracy measure a(J) in [0, 1]; raises on a zero first-order block."""
    J1 = jet.J1 if isinstance(jet, Jet) else np.asarray(jet, dtype=float)
    n2 = np.sum(J1 * J1)
    if n2 <= 0.0:
        raise DegenerateJetError("degenerate jet: |J1| = 0")
    gram = J1 @ J1.T
    det = gram[0, 0] * gram[1, 1] - gram[0, 1] ** 2
    return 2.0 * np.sqrt(max(det, 0.0)) / n2


def geom_from_jet(jet, orientation=1.0, tol=TOLERANCE_REGULARITY):
    """All pointwise geometric quantities of the immersion at this jet.

    orientation flips the normal (and hence A and H) so charts of one
    surface can share a global orientation.
    """
    a = a_regularity(jet)
    if a <= tol:
        raise DegenerateJetError(
            f"near-degenerate parametrization: a-regularity {a:.3e} <= {tol:.1e}"
        )
    J1, J2 = jet.J1, jet.J2
    g = J1 @ J1.T
    gInv = np.linalg.inv(g)
    cross = np.cross(J1[0], J1[1])
    nu = orientation * cross / np.linalg.norm(cross)
    A = np.einsum("ijc,c->ij", J2, nu)
    H = float(np.einsum("ij,ij->", gInv, A))
    normA2 = float(np.einsum("ik,jl,ij,kl->", gInv, gInv, A, A))

    # dg[i][jl] = d_i g_jl expressed through the jet
    dg = np.einsum("ijc,lc->ijl", J2, J1) + np.einsum("jc,ilc->ijl", J1, J2)
    christoffel = 0.5 * np.einsum(
        "kl,ijl->kij", gInv, dg.transpose(1, 0, 2) + dg.transpose(2, 0, 1) - dg.transpose(0, 1, 2)
    )
    # Laplace-Beltrami on scalars: g^{ij} (d_ij u - Gamma^k_ij d_k u)
    first_order = -np.einsum("ij,kij->k", gInv, christoffel)
    stability_coeffs = {
        "second": gInv.copy(),
        "first": first_order,
        "zeroth": normA2,
    }
    return GeomQuantities(
        g=g, gInv=gInv, nu=nu, A=A, H=H, normA2=normA2,
        christoffel=christoffel, stability_coeffs=stability_coeffs,
    )


def jets_from_map(f, xs, ss, mode="finite_difference", h=None, derivatives=None):
    """Jet field of a parametric map sampled on a tensor grid.

    f maps broadcastable arrays (x, s) to points with trailing axis 3.
    In analytic mode, `derivatives` supplies closures (fx, fs, fxx,
    fss, fxs) with the same convention.  Finite differences use
    centered O(h^2) stencils with step h (default: the grid spacing),
    evaluating f off-grid, so boundaries need no one-sided forms.
    """
    xs = np.asarray(xs, dtype=float)
    ss = np.asarray(ss, dtype=float)
    if xs.size < 5 or ss.size < 5:
        raise ValueError("grid too coarse: need at least 5 points per direction")
    X, S = np.meshgrid(xs, ss, indexing="ij")
    if mode == "analytic":
        if derivatives is None:
            raise ValueError("analytic mode requires derivative closures")
        fx, fs, fxx, fss, fxs = (np.asarray(d(X, S), dtype=float) for d in derivatives)
    elif mode == "finite_difference":
        if h is None:
            h = min(xs[1] - xs[0], ss[1] - ss[0])
        f00 = np.asarray(f(X, S), dtype=float)
        fpx = np.asarray(f(X + h, S), dtype=float)
        fmx = np.asarray(f(X - h, S), dtype=float)
        fps = np.asarray(f(X, S + h), dtype=float)
        fms = np.asarray(f(X, S - h), dtype=float)
        fx = (fpx - fmx) / (2 * h)
        fs = (fps - fms) / (2 * h)
        fxx = (fpx - 2 * f00 + fmx) / h**2
        fss = (fps - 2 * f00 + fms) / h**2
        fpp = np.asarray(f(X + h, S + h), dtype=float)
        fpm = np.asarray(f(X + h, S - h), dtype=float)
        fmp = np.asarray(f(X - h, S + h), dtype=float)
        fmm = np.asarray(f(X - h, S - h), dtype=float)
        fxs = (fpp - fpm - fmp + fmm) / (4 * h**2)
    else:
        raise ValueError(f"unknown mode {mode!r}")
    J1 = np.stack([fx, fs], axis=-2)
    J2 = np.stack(
        [np.stack([fxx, fxs], axis=-2), np.stack([fxs, fss], axis=-2)], axis=-3
    )
    return J1, J2


def jet_at(J1_field, J2_field, i, j):
    return Jet(J1_field[i, j], J2_field[i, j])


def _phi_gradient(phi, jet, step):
    """Central-difference gradient of a jet functional in all 18 directions."""
    base = jet.flat()
    grad = np.empty(18)
    for c in range(18):
        e = np.zeros(18)
        e[c] = step
        grad[c] = (phi(Jet.from_flat(base + e)) - phi(Jet.from_flat(base - e))) / (2 * step)
    return grad


def _phi_hessian(phi, jet, step):
    base = jet.flat()
    hess = np.empty((18, 18))
    f0 = phi(jet)
    for c in range(18):
        for d in range(c, 18):
            ec = np.zeros(18)
            ec[c] = step
            ed = np.zeros(18)
            ed[d] = step
            if c == d:
                val = (
                    phi(Jet.from_flat(base + ec)) - 2 * f0 + phi(Jet.from_flat(base - ec))
                ) / step**2
            else:
                val = (
                    phi(Jet.from_flat(base + ec + ed))
                    - phi(Jet.from_flat(base + ec - ed))
                    - phi(Jet.from_flat(base - ec + ed))
                    + phi(Jet.from_flat(base - ec - ed))
                ) / (4 * step**2)
            hess[c, d] = val
            hess[d, c] = val
    return hess


def taylor_remainder(phi, jet, pert, k, tol=TOLERANCE_REGULARITY, n_sigma=11):
    """Order-k Taylor remainder of a jet functional along J + E.

    Returns phi(J+E) minus the Taylor polynomial of order k at J, the
    derivatives being taken by nested central differences with step
    1e-4 |J1| per component.  The whole segment J + sigma E must stay
    a-regular; the first failing sigma is reported otherwise.
    Supported orders: k in {0, 1, 2}.
    """
    if k not in (0, 1, 2):
        raise ValueError("taylor_remainder supports k in {0, 1, 2}")
    for sigma in np.linspace(0.0, 1.0, n_sigma):
        a = a_regularity(jet.shifted(pert, sigma))
        if a <= tol:
            raise DegenerateJetError(
                f"segment leaves regular cone at sigma={sigma:.3f} (a={a:.3e})"
            )
    step = 1e-4 * np.linalg.norm(jet.J1)
    E = pert.flat()
    remainder = phi(jet.shifted(pert)) - phi(jet)
    if k >= 1:
        remainder -= _phi_gradient(phi, jet, step) @ E
    if k >= 2:
        remainder -= 0.5 * E @ _phi_hessian(phi, jet, step) @ E
    return remainder
