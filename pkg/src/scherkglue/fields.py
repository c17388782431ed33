"""Scalar fields on the flat cylinder Omega = R^2 / (x -> x + 2 pi).

A CylinderField samples a function on a tensor grid that is uniform
and periodic in x (no duplicated seam point) and uniform on
[-smax, smax] in s.  Derivatives are spectral in x and second-order
finite differences in s; the same discrete Laplacian is used by every
solver and every residual check so that solver contracts are exact in
the discrete operator.
"""

import struct
from dataclasses import dataclass, field

import numpy as np


@dataclass
class WeightSpec:
    """Weight cosh^rho(s), derivative count j and Hoelder exponent alpha."""

    rho: float = 0.0
    j: int = 0
    alpha: float = 0.5

    def weight_values(self, s):
        return np.cosh(s) ** self.rho


@dataclass
class CylinderField:
    values: np.ndarray
    smax: float
    weight: WeightSpec = field(default_factory=WeightSpec)

    def __post_init__(self):
        self.values = np.asarray(self.values, dtype=float)
        if self.values.ndim != 2:
            raise ValueError("values must be a 2-D array (x index first)")
        if self.values.shape[0] % 2 != 0:
            raise ValueError("N_x must be even")

    @property
    def nx(self):
        return self.values.shape[0]

    @property
    def ns(self):
        return self.values.shape[1]

    @property
    def x(self):
        return -np.pi + 2 * np.pi * np.arange(self.nx) / self.nx

    @property
    def s(self):
        return np.linspace(-self.smax, self.smax, self.ns)

    @property
    def hs(self):
        return 2 * self.smax / (self.ns - 1)

    def mesh(self):
        return np.meshgrid(self.x, self.s, indexing="ij")

    def like(self, values):
        return CylinderField(values, self.smax, self.weight)

    @classmethod
    def from_function(cls, f, nx, ns, smax, weight=None):
        x = -np.pi + 2 * np.pi * np.arange(nx) / nx
        s = np.linspace(-smax, smax, ns)
        X, S = np.meshgrid(x, s, indexing="ij")
        return cls(np.asarray(f(X, S), dtype=float), smax, weight or WeightSpec())

    def copy(self):
        return CylinderField(self.values.copy(), self.smax, self.weight)

    # -- calculus -------------------------------------------------------

    def dx(self, order=1):
        """Spectral x-derivative."""
        k = np.fft.fftfreq(self.nx, d=1.0 / self.nx)
        fac = (1j * k) ** order
        out = np.fft.ifft(fac[:, None] * np.fft.fft(self.values, axis=0), axis=0).real
        return self.like(out)

    def ds(self, order=1):
        """Centered O(h^2) s-derivative, one-sided O(h^2) at the ends."""
        u = self.values
        h = self.hs
        out = np.empty_like(u)
        if order == 1:
            out[:, 1:-1] = (u[:, 2:] - u[:, :-2]) / (2 * h)
            out[:, 0] = (-3 * u[:, 0] + 4 * u[:, 1] - u[:, 2]) / (2 * h)
            out[:, -1] = (3 * u[:, -1] - 4 * u[:, -2] + u[:, -3]) / (2 * h)
        elif order == 2:
            out[:, 1:-1] = (u[:, 2:] - 2 * u[:, 1:-1] + u[:, :-2]) / h**2
            out[:, 0] = (2 * u[:, 0] - 5 * u[:, 1] + 4 * u[:, 2] - u[:, 3]) / h**2
            out[:, -1] = (2 * u[:, -1] - 5 * u[:, -2] + 4 * u[:, -3] - u[:, -4]) / h**2
        else:
            raise ValueError("order must be 1 or 2")
        return self.like(out)

    def laplacian(self):
        """Discrete Delta_Omega: spectral in x plus FD-2 in s."""
        return self.like(self.dx(2).values + self.ds(2).values)

    # -- norms and integrals --------------------------------------------

    def integral(self, weight_values=None):
        """Trapezoid in s, exact uniform sum in x."""
        vals = self.values if weight_values is None else self.values * weight_values
        dx = 2 * np.pi / self.nx
        return dx * np.trapezoid(vals, dx=self.hs, axis=1).sum()

    def sup(self):
        return float(np.max(np.abs(self.values)))

    def meridian_average(self):
        return self.values.mean(axis=0)


@dataclass
class MeridianSplit:
    bar: np.ndarray
    ring: CylinderField


def meridian_split(E):
    """Exact decomposition E = bar(s) + ring with zero row means."""
    bar = E.meridian_average()
    ring = E.like(E.values - bar[None, :])
    return MeridianSplit(bar=bar, ring=ring)


def weighted_norm(u, spec=None, weight_values=None, max_distances=None):
    """Discrete surrogate of the weighted Hoelder norm sup (1/f) ||u||_{j,alpha}.

    Per point: sum of |FD derivatives| of orders 0..j, plus the largest
    Hoelder ratio of the top-order derivatives over axis-aligned
    neighbour pairs at distances h, 2h, ... up to 1; everything divided
    by the weight and sup'ed over the grid.  Returns (norm, seminorm_part).
    """
    spec = spec or u.weight
    w = weight_values if weight_values is not None else spec.weight_values(u.s)[None, :]
    fields = {0: [u]}
    for order in range(1, spec.j + 1):
        prev = fields[order - 1]
        cur = []
        for p in prev:
            cur.append(p.dx())
        cur.append(prev[-1].ds())
        fields[order] = cur
    total = np.zeros_like(u.values)
    for order, fs in fields.items():
        for f in fs:
            total += np.abs(f.values)

    top = fields[spec.j]
    hx = 2 * np.pi / u.nx
    hs = u.hs
    hold = np.zeros_like(u.values)
    for f in top:
        v = f.values
        # x direction: periodic rolls
        nmax = int(np.floor(1.0 / hx))
        dists = range(1, max(nmax, 1) + 1)
        if max_distances is not None:
            dists = list(dists)[:max_distances]
        for d in dists:
            r = np.abs(v - np.roll(v, d, axis=0)) / (d * hx) ** spec.alpha
            np.maximum(hold, r, out=hold)
        # s direction: truncated shifts
        nmax = int(np.floor(1.0 / hs))
        dists = range(1, max(nmax, 1) + 1)
        if max_distances is not None:
            dists = list(dists)[:max_distances]
        for d in dists:
            if d >= u.ns:
                break
            r = np.abs(v[:, d:] - v[:, :-d]) / (d * hs) ** spec.alpha
            np.maximum(hold[:, d:], r, out=hold[:, d:])
            np.maximum(hold[:, :-d], r, out=hold[:, :-d])
    norm = float(np.max((total + hold) / w))
    semi = float(np.max(hold / w))
    return norm, semi


# -- serialization -------------------------------------------------------

_HEADER = struct.Struct("<qqd")


def to_binary(field_, path):
    """Flat layout: int64 nx, int64 ns, float64 smax, then row-major values."""
    with open(path, "wb") as fh:
        fh.write(_HEADER.pack(field_.nx, field_.ns, field_.smax))
        fh.write(np.ascontiguousarray(field_.values, dtype="<f8").tobytes())


def from_binary(path):
    with open(path, "rb") as fh:
        nx, ns, smax = _HEADER.unpack(fh.read(_HEADER.size))
        data = np.frombuffer(fh.read(8 * nx * ns), dtype="<f8").reshape(nx, ns)
    return CylinderField(data.copy(), smax)


def to_csv(field_, path):
    X, S = field_.mesh()
    table = np.column_stack([X.ravel(), S.ravel(), field_.values.ravel()])
    np.savetxt(path, table, delimiter=",", header="x,s,value", comments="")
