"""Smooth cutoff functions used to blend charts and maps.

The basic bump psi0 is increasing, identically 0 left of 1/3 and
identically 1 right of 2/3.  Between the plateaus it is the C^3
polynomial smoothstep 35u^4 - 84u^5 + 70u^6 - 20u^7, which has three
continuous derivatives at the junctions -- enough for every
second-order operator applied here.
"""

import numpy as np


def psi0(t):
    """Increasing cutoff: 0 for t <= 1/3, 1 for t >= 2/3."""
    t = np.asarray(t, dtype=float)
    u = np.clip((t - 1.0 / 3.0) * 3.0, 0.0, 1.0)
    val = u**4 * (35.0 - 84.0 * u + 70.0 * u**2 - 20.0 * u**3)
    return val if val.ndim else float(val)


def psi0_prime(t):
    """Derivative of psi0 with respect to t."""
    t = np.asarray(t, dtype=float)
    u = np.clip((t - 1.0 / 3.0) * 3.0, 0.0, 1.0)
    du = u**3 * (140.0 - 420.0 * u + 420.0 * u**2 - 140.0 * u**3)
    val = 3.0 * du
    return val if val.ndim else float(val)


def psi(a, b, s):
    """Cutoff rescaled to transition between levels a and b: psi0((s-a)/(b-a))."""
    return psi0((np.asarray(s, dtype=float) - a) / (b - a))


def psi_prime(a, b, s):
    return psi0_prime((np.asarray(s, dtype=float) - a) / (b - a)) / (b - a)
