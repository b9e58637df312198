import numpy as np
import pytest

from pseudofront import potentials as pot
from pseudofront.errors import InvalidCharacteristicData
from pseudofront.expr import Constant, parse_scalar

T = np.linspace(-1, 1, 41)


def legs_equal(a, b, t=T):
    for j in range(-2, 3):
        np.testing.assert_allclose(a.component(j, t), b.component(j, t), atol=1e-15)


def test_noncharacteristic_cuspidal_fixture():
    pair = pot.noncharacteristic_potential(1, 1, 2, 1)
    np.testing.assert_array_equal(pair.chi.component(-1, T)[:, 0], -1.0)
    np.testing.assert_array_equal(pair.chi.component(0, T)[:, 2], -1.0)
    np.testing.assert_array_equal(pair.chi.component(1, T)[:, 0], 1.0)
    assert pair.chi.band == (-1, 1)
    legs_equal(pair.chi, pair.psi)


def test_noncharacteristic_eps_minus_pullback():
    A = parse_scalar("1+t")
    pair = pot.noncharacteristic_potential(A, parse_scalar("1-t"), 2, -1)
    # psi(y) = -eta(-y)
    np.testing.assert_allclose(pair.psi.component(1, T)[:, 0], -(1 - T))
    assert pair.interval_y == (-1.0, 1.0)
    assert pair.metadata["singular_set"] == "y = -1*x"


def test_pseudosphere_potential():
    pair = pot.cuspidal_edge_potential(1, 0)
    assert pair.epsilon == 1
    np.testing.assert_array_equal(pair.chi.component(-1, T)[:, 0], -0.5)
    np.testing.assert_array_equal(pair.chi.component(0, T)[:, 2], 1.0)
    np.testing.assert_array_equal(pair.chi.component(1, T)[:, 0], 0.5)


def test_straight_line_data_has_constant_e1_terms():
    pair = pot.cuspidal_edge_potential(0, 0)
    np.testing.assert_array_equal(pair.chi.component(0, T), 0)
    np.testing.assert_array_equal(pair.chi.component(1, T)[:, 0], 0.5)


def test_constant_data_is_translation_invariant():
    pair = pot.cuspidal_edge_potential(0.6, 0.8)
    for j in (-1, 0, 1):
        c = pair.chi.component(j, T)
        np.testing.assert_array_equal(c, np.broadcast_to(c[0], c.shape))


@pytest.mark.parametrize("branch, eps", [("proof", 1), ("statement", -1)])
def test_epsilon_branches(branch, eps):
    assert pot.cuspidal_edge_potential(1, 0.3, branch=branch).epsilon == eps
    assert pot.cuspidal_edge_potential(1, 1.5, branch=branch).epsilon == -eps


def test_proof_branch_makes_coefficients_positive():
    tau = parse_scalar("2*sin(3*t)")
    pair = pot.cuspidal_edge_potential(1, tau)
    t = np.linspace(-1, 1, 401)
    tv = tau(t)
    epsB = 0.5 * (1 - tv)
    A = pair.metadata["A"](t)
    assert np.all(epsB[tv < 1] > 0)
    assert np.all(A[tv > -1] > 0)
    B = pair.metadata["B"](t)
    # B is positive on the branch the median torsion selects
    assert np.all(B[(tv < 1) == (pair.epsilon == 1)] > 0)


def test_leading_coefficients_vanish_at_unit_torsion():
    for tval, zero in ((-1.0, "chi"), (1.0, "psi")):
        pair = pot.cuspidal_edge_potential(1, Constant(tval), epsilon=1)
        c1, p1 = pair.leading_coefficients(T, T)
        if zero == "chi":
            assert np.all(c1 == 0) and np.all(p1 > 0)
        else:
            assert np.all(p1 == 0) and np.all(c1 > 0)
        semi, regular = pair.regularity_flags(T, T)
        assert np.all(semi) and not np.any(regular)


def test_crossings_are_recorded():
    pair = pot.cuspidal_edge_potential(parse_scalar("t"), parse_scalar("3*t"))
    md = pair.metadata
    assert md["kappa_zeros"] == pytest.approx([0.0], abs=1e-12)
    assert md["tau_plus_one"] == pytest.approx([1 / 3], abs=1e-6)
    assert md["tau_minus_one"] == pytest.approx([-1 / 3], abs=1e-6)
    assert md["torsion_crosses_one"]


def test_boundary_substitution_reproduces_cuspidal_edge():
    kappa, tau = parse_scalar("cos(t)"), parse_scalar("t/2")
    ref = pot.cuspidal_edge_potential(kappa, tau)
    eps = ref.epsilon
    B = eps * 0.5 * (1 - tau)
    got = pot.boundary_potential_from_frame(kappa, (0.5 * (tau + 1), 0), 0, (-B, 0), eps)
    legs_equal(got.chi, ref.chi)
    legs_equal(got.psi, ref.psi)


def test_boundary_substitution_reproduces_noncharacteristic():
    A, B, beta = parse_scalar("1+t"), parse_scalar("1-t"), Constant(2.0)
    for eps in (1, -1):
        ref = pot.noncharacteristic_potential(A, B, beta, eps)
        got = pot.boundary_potential_from_frame(-0.5 * beta, (A, 0), 0, (-B, 0), eps)
        legs_equal(got.chi, ref.chi)
        legs_equal(got.psi, ref.psi)


def test_zero_boundary_data_gives_zero_pair():
    got = pot.boundary_potential_from_frame(0, (0, 0), 0, (0, 0))
    for j in (-1, 0, 1):
        np.testing.assert_array_equal(got.chi.component(j, T), 0)


def test_characteristic_fixtures():
    pair = pot.characteristic_potential(0, 1, parse_scalar("y"))
    assert pair.metadata["kappa_identically_zero"]
    np.testing.assert_array_equal(pair.chi.component(1, T)[:, 0], 1.0)
    np.testing.assert_allclose(pair.psi.component(-1, T), np.stack([np.ones_like(T), T, 0 * T], -1))
    pot.characteristic_potential(1, parse_scalar("y^2"), parse_scalar("y"))


@pytest.mark.parametrize("kappa, alpha, beta, word", [
    (0, 1, "y+1", "beta(0)"),
    (0, 1, "y^2", "beta'(0)"),
    (1, 1, "y", "alpha(0)"),
])
def test_characteristic_precondition_errors(kappa, alpha, beta, word):
    with pytest.raises(InvalidCharacteristicData, match=word.replace("(", r"\(").replace(")", r"\)")):
        pot.characteristic_potential(kappa, alpha, parse_scalar(beta))


def test_band_shape_is_enforced():
    with pytest.raises(ValueError):
        pot.PotentialPair(pot.LoopForm({3: (1, None, None)}), pot.LoopForm({}))
    with pytest.raises(ValueError):
        pot.LoopForm({0: (1, None, None)})
