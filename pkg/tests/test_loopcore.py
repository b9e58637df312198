import numpy as np
import pytest

from pseudofront import loopcore as lc
from pseudofront.errors import DetDrift

E1, E2, E3 = lc.su2_basis()


def test_basis_is_orthonormal():
    basis = (E1, E2, E3)
    gram = np.array([[lc.inner(a, b) for b in basis] for a in basis])
    np.testing.assert_allclose(gram, np.eye(3), atol=1e-15)


def test_basis_is_anti_hermitian_and_trace_free():
    for e in (E1, E2, E3):
        np.testing.assert_allclose(e.conj().T, -e, atol=1e-12)
        assert abs(np.trace(e)) < 1e-12
    assert abs(np.trace(E3)) == 0


def test_commutators_cycle():
    np.testing.assert_allclose(lc.commutator(E1, E2), E3, atol=1e-15)
    np.testing.assert_allclose(lc.commutator(E2, E3), E1, atol=1e-15)
    np.testing.assert_allclose(lc.commutator(E3, E1), E2, atol=1e-15)
    np.testing.assert_allclose(lc.su2_to_vec(lc.commutator(E1, E2)), [0, 0, 1], atol=1e-15)


def test_dictionary_basis_and_round_trip(rng):
    np.testing.assert_array_equal(lc.vec_to_su2([1.0, 0.0, 0.0]), E1)
    v = rng.normal(size=(50, 3))
    np.testing.assert_array_equal(lc.su2_to_vec(lc.vec_to_su2(v)), v)


def test_cross_product_is_commutator(rng):
    v, w = rng.normal(size=(2, 20, 3))
    got = lc.su2_to_vec(lc.commutator(lc.vec_to_su2(v), lc.vec_to_su2(w)))
    np.testing.assert_allclose(got, np.cross(v, w), atol=1e-13)


def test_identity_is_neutral(rng):
    g = lc.random_unipotent_loop(rng, 8, "plus")
    np.testing.assert_array_equal(lc.loop_mul(lc.identity_loop(8), g).coeffs, g.coeffs)


def test_e1_lambda_squared():
    a = lc.loop_from_terms({1: E1}, 4, parity=1)
    sq = lc.loop_mul(a, a)
    np.testing.assert_allclose(sq.coeff(2), -0.25 * np.eye(2), atol=1e-15)
    assert np.count_nonzero(np.abs(sq.coeffs) > 0) == 2
    assert sq.parity == 0


def test_product_matches_pointwise_product(rng):
    a = lc.random_unipotent_loop(rng, 10, "plus", n_factors=2)
    b = lc.random_unipotent_loop(rng, 10, "minus", n_factors=2)
    ab = lc.loop_mul(a, b)
    for lam in (0.7, 1.0, 1.9, 0.3 + 0.4j):
        np.testing.assert_allclose(lc.evaluate(ab, lam),
                                   lc.evaluate(a, lam) @ lc.evaluate(b, lam), atol=1e-12)


def test_truncation_records_tail():
    a = lc.loop_from_terms({3: E1}, 4, parity=1)
    ab = lc.loop_mul(a, a)
    assert np.isclose(ab.tail, np.linalg.norm(E1 @ E1))
    assert np.all(ab.coeffs == 0)


def test_inverse_of_identity_and_diagonal():
    np.testing.assert_array_equal(lc.loop_inverse(lc.identity_loop(3)).coeffs,
                                  lc.identity_loop(3).coeffs)
    th = 0.7
    d = lc.constant_loop(np.diag([np.exp(1j * th), np.exp(-1j * th)]), 3)
    np.testing.assert_allclose(lc.loop_inverse(d).coeff(0),
                               np.diag([np.exp(-1j * th), np.exp(1j * th)]), atol=1e-15)


def test_inverse_multiplies_back(rng):
    g = lc.loop_mul(lc.random_unipotent_loop(rng, 12, "minus", 2),
                    lc.random_unipotent_loop(rng, 12, "plus", 2))
    prod = lc.loop_mul(g, lc.loop_inverse(g))
    assert lc.coeff_distance(prod, lc.identity_loop(12)) <= 1e-9


def test_inverse_rejects_det_drift():
    g = lc.constant_loop(np.diag([1.1, 1.0]), 2)
    with pytest.raises(DetDrift):
        lc.loop_inverse(g)


def test_evaluate_simple():
    np.testing.assert_array_equal(lc.evaluate(lc.constant_loop(E3, 2, "plain"), 7.0), E3)
    np.testing.assert_allclose(lc.evaluate(lc.loop_from_terms({1: E1}, 2, parity=1), 2.0),
                               2 * E1)
    with pytest.raises(ValueError):
        lc.evaluate(lc.identity_loop(2), 0.0)


def test_lambda_derivative_exact_and_fd(rng):
    assert np.all(lc.lambda_derivative(lc.constant_loop(E3, 3)).coeffs == 0)
    d = lc.lambda_derivative(lc.loop_from_terms({1: E1}, 3, parity=1))
    np.testing.assert_array_equal(d.coeff(0), E1)
    g = lc.random_unipotent_loop(rng, 12, "plus")
    h = 1e-5
    fd = (lc.evaluate(g, 1 + h) - lc.evaluate(g, 1 - h)) / (2 * h)
    np.testing.assert_allclose(lc.evaluate(lc.lambda_derivative(g), 1.0), fd, atol=1e-8)


def test_projections_partition(rng):
    c = lc.constant_loop(E3, 3, "plain")
    assert np.all(lc.project_minus(c).coeffs == 0)
    np.testing.assert_array_equal(lc.project_plus(c).coeffs, c.coeffs)
    g = lc.loop_from_terms({1: E1, -1: E1}, 3, parity=1)
    np.testing.assert_array_equal(lc.project_minus(g).coeff(-1), E1)
    np.testing.assert_array_equal(lc.project_plus(g).coeff(1), E1)
    r = lc.random_unipotent_loop(rng, 6, "plus")
    total = lc.loop_add(lc.project_minus(r), lc.project_plus(r))
    np.testing.assert_array_equal(total.coeffs, r.coeffs)


def test_twisting_error_flags_misplaced_entries(rng):
    bad = np.zeros((5, 2, 2), dtype=complex)
    bad[2, 0, 1] = 1.0  # off-diagonal entry at power 0
    assert lc.TwistedLoop(bad, "plain").twisting_error() == 1.0
    g = lc.random_unipotent_loop(rng, 6, "plus")
    assert g.twisting_error() == 0
    assert lc.lambda_derivative(g).twisting_error() == 0


def test_constant_su2_loop_is_unitary_and_det_one(rng):
    q, _ = np.linalg.qr(rng.normal(size=(2, 2)) + 1j * rng.normal(size=(2, 2)))
    q = q / np.sqrt(np.linalg.det(q))
    g = lc.constant_loop(q, 4)
    assert np.max(lc.unitarity_defect(g)) < 1e-12
    assert np.max(lc.det_defect(g)) < 1e-12
    assert np.max(lc.det_defect(lc.random_unipotent_loop(rng, 8, "minus"), 1.7)) < 1e-12
