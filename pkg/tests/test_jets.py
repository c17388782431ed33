import numpy as np
import pytest
import sympy as sp
from hypothesis import given, settings
from hypothesis import strategies as st

from scherkglue import catenoid
from scherkglue.jets import (
    HOMOGENEITY_DEGREES,
    DegenerateJetError,
    Jet,
    a_regularity,
    geom_from_jet,
    jet_at,
    jets_from_map,
    taylor_remainder,
)

EX = np.array([1.0, 0.0, 0.0])
EY = np.array([0.0, 1.0, 0.0])
EZ = np.array([0.0, 0.0, 1.0])


def plane_jet():
    return Jet.from_partials(EX, EY, 0 * EX, 0 * EX, 0 * EX)


def random_regular_jet(rng):
    for _ in range(100):
        J1 = rng.normal(size=(2, 3))
        J2 = rng.normal(size=(2, 2, 3))
        J2[0, 1] = J2[1, 0] = 0.5 * (J2[0, 1] + J2[1, 0])
        jet = Jet(J1, J2)
        if a_regularity(jet) > 0.05:
            return jet
    raise RuntimeError("no regular jet found")


# -- a-regularity ---------------------------------------------------------

def test_a_conformal_is_one():
    assert a_regularity(plane_jet()) == pytest.approx(1.0, abs=1e-14)


def test_a_parallel_columns_is_zero():
    jet = Jet.from_partials(EX, 2 * EX, 0 * EX, 0 * EX, 0 * EX)
    assert a_regularity(jet) == pytest.approx(0.0, abs=1e-14)


def test_a_stretched():
    jet = Jet.from_partials(EX, 2 * EY, 0 * EX, 0 * EX, 0 * EX)
    assert a_regularity(jet) == pytest.approx(0.8, abs=1e-14)


def test_a_zero_jet_raises():
    with pytest.raises(DegenerateJetError):
        a_regularity(Jet(np.zeros((2, 3)), np.zeros((2, 2, 3))))


def test_a_bounds_and_scale_invariance():
    rng = np.random.default_rng(0)
    for _ in range(10_000):
        J1 = rng.normal(size=(2, 3))
        if np.linalg.norm(J1) < 1e-3:
            continue
        jet = Jet(J1, np.zeros((2, 2, 3)))
        a = a_regularity(jet)
        assert 0.0 <= a <= 1.0 + 1e-12
        assert a_regularity(jet.scaled(3.7)) == pytest.approx(a, rel=1e-12)


@given(st.floats(0.05, 3.0), st.floats(-3.0, 3.0))
@settings(max_examples=50, deadline=None)
def test_a_conformal_jets_from_kappa(beta_frac, s):
    # analytic jets of conformal immersions detect as exactly conformal
    beta = beta_frac
    jet = catenoid.kappa_tilde_jet_at(beta, 1.0, 0.3, s)
    assert a_regularity(jet) == pytest.approx(1.0, abs=1e-12)


# -- geometric quantities -------------------------------------------------

def test_plane_geometry():
    q = geom_from_jet(plane_jet())
    assert q.H == pytest.approx(0.0, abs=1e-14)
    np.testing.assert_allclose(q.nu, EZ, atol=1e-14)
    np.testing.assert_allclose(q.g, np.eye(2), atol=1e-14)


def test_kappa_is_minimal_at_origin():
    _, parts = catenoid.kappa_eval(np.pi / 2, 0.0, 0.0, with_jet=True)
    q = geom_from_jet(Jet.from_partials(*parts))
    assert q.H == pytest.approx(0.0, abs=1e-13)


def paraboloid_H_oracle():
    # independent symbolic oracle for the graph (x, s) -> (x, s, x^2 + s^2)
    x, s = sp.symbols("x s", real=True)
    phi = sp.Matrix([x, s, x**2 + s**2])
    J1 = [phi.diff(x), phi.diff(s)]
    g = sp.Matrix(2, 2, lambda i, j: J1[i].dot(J1[j]))
    nu = J1[0].cross(J1[1])
    nu = nu / nu.norm()
    second = [[phi.diff(a, b) for b in (x, s)] for a in (x, s)]
    A = sp.Matrix(2, 2, lambda i, j: second[i][j].dot(nu))
    H = sum((g.inv() * A)[i, i] for i in range(2))
    return float(sp.simplify(H.subs({x: 0, s: 0})))


def test_paraboloid_vertex_H():
    expected = paraboloid_H_oracle()
    assert expected == pytest.approx(4.0, abs=1e-12)
    jet = Jet.from_partials(EX, EY, 2 * EZ, 2 * EZ, 0 * EZ)
    q = geom_from_jet(jet)
    assert q.H == pytest.approx(expected, abs=1e-12)


def test_H_equals_trace_ginv_A():
    rng = np.random.default_rng(3)
    for _ in range(50):
        jet = random_regular_jet(rng)
        q = geom_from_jet(jet)
        assert q.H == pytest.approx(np.einsum("ij,ij->", q.gInv, q.A), rel=1e-12)


def test_normal_orthogonality():
    rng = np.random.default_rng(4)
    for _ in range(100):
        jet = random_regular_jet(rng)
        q = geom_from_jet(jet)
        assert abs(np.dot(q.nu, jet.J1[0])) < 1e-12 * np.linalg.norm(jet.J1[0])
        assert abs(np.dot(q.nu, jet.J1[1])) < 1e-12 * np.linalg.norm(jet.J1[1])
        assert np.linalg.norm(q.nu) == pytest.approx(1.0, abs=1e-12)


def test_homogeneity_degrees():
    rng = np.random.default_rng(5)
    jet = random_regular_jet(rng)
    q0 = geom_from_jet(jet)
    for c in (0.5, 2.0, 10.0):
        q1 = geom_from_jet(jet.scaled(c))
        checks = {
            "g": (q1.g, q0.g),
            "gInv": (q1.gInv, q0.gInv),
            "nu": (q1.nu, q0.nu),
            "H": (q1.H, q0.H),
            "christoffel": (q1.christoffel, q0.christoffel),
            "A": (q1.A, q0.A),
            "normA": (np.sqrt(q1.normA2), np.sqrt(q0.normA2)),
        }
        for name, (scaled, base) in checks.items():
            d = HOMOGENEITY_DEGREES[name]
            np.testing.assert_allclose(
                np.asarray(scaled), c**d * np.asarray(base), rtol=1e-11,
                err_msg=f"{name} fails degree {d} at c={c}",
            )


def test_near_degenerate_raises():
    jet = Jet.from_partials(EX, EX + 1e-9 * EY, 0 * EX, 0 * EX, 0 * EX)
    with pytest.raises(DegenerateJetError):
        geom_from_jet(jet)


# -- jet fields from maps -------------------------------------------------

def test_linear_map_fd_jets_are_exact():
    A = np.array([[1.0, 0.2, 0.0], [0.3, 1.0, 0.1]])

    def f(x, s):
        return x[..., None] * A[0] + s[..., None] * A[1]

    xs = np.linspace(-1, 1, 9)
    ss = np.linspace(-1, 1, 9)
    J1, J2 = jets_from_map(f, xs, ss, mode="finite_difference", h=1e-2)
    np.testing.assert_allclose(J2, 0.0, atol=1e-11)
    np.testing.assert_allclose(J1[3, 4], A, atol=1e-12)


def test_fd_vs_analytic_kappa():
    beta = np.pi / 2
    xs = np.linspace(-0.7, 0.7, 7)
    ss = np.linspace(-0.8, 0.8, 7)
    J1f, J2f = jets_from_map(catenoid.kappa_map(beta), xs, ss, h=1e-3)
    J1a, J2a = jets_from_map(
        None, xs, ss, mode="analytic", derivatives=catenoid.kappa_jet_closures(beta)
    )
    assert np.max(np.abs(J1f - J1a)) < 1e-5
    assert np.max(np.abs(J2f - J2a)) < 1e-5


def test_fd_convergence_order():
    beta = 0.9
    xs = np.linspace(-0.5, 0.5, 5)
    ss = np.linspace(-0.5, 0.5, 5)
    J1a, J2a = jets_from_map(
        None, xs, ss, mode="analytic", derivatives=catenoid.kappa_jet_closures(beta)
    )
    errs = []
    for h in (2e-2, 1e-2):
        J1f, J2f = jets_from_map(catenoid.kappa_map(beta), xs, ss, h=h)
        errs.append(max(np.max(np.abs(J1f - J1a)), np.max(np.abs(J2f - J2a))))
    ratio = errs[0] / errs[1]
    assert 3.5 <= ratio <= 4.5


def test_mixed_partials_symmetrized():
    xs = np.linspace(-1, 1, 7)
    ss = np.linspace(-1, 1, 7)
    J1, J2 = jets_from_map(catenoid.kappa_map(0.4), xs, ss, h=1e-3)
    np.testing.assert_allclose(J2[..., 0, 1, :], J2[..., 1, 0, :], atol=1e-14)
    jet = jet_at(J1, J2, 2, 3)
    np.testing.assert_allclose(jet.J2[0, 1], jet.J2[1, 0], atol=1e-14)


# -- Taylor remainders ----------------------------------------------------

def test_remainder_zero_perturbation():
    jet = plane_jet()
    zero = Jet(np.zeros((2, 3)), np.zeros((2, 2, 3)))
    r = taylor_remainder(lambda j: geom_from_jet(j).H, jet, zero, k=1)
    assert r == pytest.approx(0.0, abs=1e-14)


def test_remainder_a_regularity_bound():
    # |R^0| <= C |E1|/|J1| with a modest empirical constant
    rng = np.random.default_rng(7)
    worst = 0.0
    for _ in range(200):
        jet = random_regular_jet(rng)
        if a_regularity(jet) < 0.3:
            continue
        E1 = rng.normal(size=(2, 3))
        E1 *= 0.05 * np.linalg.norm(jet.J1) / np.linalg.norm(E1)
        pert = Jet(E1, np.zeros((2, 2, 3)))
        r = taylor_remainder(a_regularity, jet, pert, k=0)
        worst = max(worst, abs(r) / (np.linalg.norm(E1) / np.linalg.norm(jet.J1)))
    assert worst < 10.0


def _graph_pert(eps):
    return Jet(
        np.array([[0.0, 0.0, eps], [0.0, 0.0, -eps]]),
        eps * np.array([[[0, 0, 1.0], [0, 0, 0.5]], [[0, 0, 0.5], [0, 0, -1.0]]]),
    )


def test_remainder_H_plane_base_is_third_order():
    # Over a plane, H of a graph is odd in the graph function, so the
    # k=1 remainder gains an extra order: halving eps divides it by 8.
    jet = plane_jet()

    def H(j):
        return geom_from_jet(j).H

    rs = [abs(taylor_remainder(H, jet, _graph_pert(eps), k=1)) for eps in (2e-3, 1e-3)]
    ratio = rs[0] / rs[1]
    assert abs(ratio - 8.0) < 0.8


def test_remainder_H_generic_base_is_second_order():
    # on a curved base jet the generic quadratic remainder shows up:
    # halving eps quarters it
    _, parts = catenoid.kappa_eval(np.pi / 2, 0.3, 0.4, with_jet=True)
    jet = Jet.from_partials(*parts)

    def H(j):
        return geom_from_jet(j).H

    rs = [abs(taylor_remainder(H, jet, _graph_pert(eps), k=1)) for eps in (2e-3, 1e-3)]
    ratio = rs[0] / rs[1]
    assert abs(ratio - 4.0) < 0.4
