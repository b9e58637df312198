import numpy as np
from hypothesis import given, strategies as st

from pseudofront import loopcore as lc
from pseudofront.birkhoff import birkhoff_factor
from pseudofront.expr import parse_scalar

seeds = st.integers(0, 2 ** 32 - 1)
finite = st.floats(-5, 5, allow_nan=False)


def rand_loop(seed, N=8, side=None):
    rng = np.random.default_rng(seed)
    side = side or ("plus" if rng.random() < 0.5 else "minus")
    return lc.random_unipotent_loop(rng, N, side, n_factors=2)


@given(seeds, seeds, seeds)
def test_product_is_associative(a, b, c):
    # wide band so nothing is truncated
    x, y, z = (rand_loop(s, 16) for s in (a, b, c))
    left = lc.loop_mul(lc.loop_mul(x, y), z)
    right = lc.loop_mul(x, lc.loop_mul(y, z))
    assert lc.coeff_distance(left, right) <= 1e-12


@given(st.lists(finite, min_size=3, max_size=3))
def test_dictionary_round_trip(v):
    m = lc.vec_to_su2(v)
    np.testing.assert_allclose(lc.su2_to_vec(m), v, atol=1e-15)
    np.testing.assert_allclose(m.conj().T, -m, atol=1e-15)
    assert abs(lc.inner(m, m) - np.dot(v, v)) <= 1e-12 * max(1.0, np.dot(v, v))


@given(seeds, seeds)
def test_products_keep_twisting(a, b):
    x, y = rand_loop(a), rand_loop(b)
    assert lc.loop_mul(x, y).twisting_error() == 0
    assert lc.lambda_derivative(x).twisting_error() == 0
    assert lc.loop_inverse(x).twisting_error() == 0


@given(seeds, seeds, st.floats(0.3, 3.0))
def test_product_matches_pointwise(a, b, lam):
    x, y = rand_loop(a, 16), rand_loop(b, 16)
    np.testing.assert_allclose(lc.evaluate(lc.loop_mul(x, y), lam),
                               lc.evaluate(x, lam) @ lc.evaluate(y, lam), atol=1e-9, rtol=1e-9)


@given(seeds)
def test_projections_sum_to_loop(a):
    g = rand_loop(a)
    total = lc.loop_add(lc.project_minus(g), lc.project_plus(g))
    np.testing.assert_array_equal(total.coeffs, g.coeffs)


@given(seeds)
def test_det_one_is_preserved(a):
    g = lc.loop_mul(rand_loop(a, 12, "minus"), rand_loop(a + 1, 12, "plus"))
    for lam in (0.5, 1.0, 2.0):
        assert np.max(lc.det_defect(g, lam)) <= 1e-10


@given(seeds)
def test_birkhoff_round_trip(a):
    rng = np.random.default_rng(a)
    Lm = lc.random_unipotent_loop(rng, 12, "minus", n_factors=2)
    Lp = lc.random_unipotent_loop(rng, 12, "plus", n_factors=2)
    res = birkhoff_factor(lc.loop_mul(Lm, Lp))
    assert res.residual <= 1e-9
    assert lc.coeff_distance(res.h_minus, Lm) <= 1e-8
    assert lc.coeff_distance(res.h_plus, Lp) <= 1e-8


@given(finite, finite, st.floats(0.1, 3.0))
def test_expression_matches_numpy(a, b, t):
    f = parse_scalar(f"({a!r})*sin(t)^2 - exp(-t)/(({b!r})^2+1) + sqrt(t)*log(t+1)")
    ref = a * np.sin(t) ** 2 - np.exp(-t) / (b * b + 1) + np.sqrt(t) * np.log(t + 1)
    assert abs(f(t) - ref) <= 1e-12 * max(1.0, abs(ref))


@given(st.floats(0.1, 3.0))
def test_symbolic_derivative_matches_difference(t):
    f = parse_scalar("t^3*cos(t) + 1/(1+t^2)")
    h = 1e-5
    fd = (f(t + h) - f(t - h)) / (2 * h)
    assert abs(f.derivative()(t) - fd) <= 1e-6 * max(1.0, abs(fd))
