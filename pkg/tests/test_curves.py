import numpy as np
import pytest
from scipy.integrate import quad

from pseudofront import curves as cv
from pseudofront.errors import DegenerateCurve, UnknownCurve
from pseudofront.verify import kabsch_align


@pytest.fixture(scope="module")
def cylinder():
    return cv.named_curve("cylinder_figure")


def test_circle_radius_two():
    c = cv.curve_from_expressions("2*cos(t)", "2*sin(t)", "0", (0, np.pi))
    np.testing.assert_allclose(c.kappa, 0.5, atol=1e-6)
    np.testing.assert_allclose(c.tau, 0.0, atol=1e-6)
    np.testing.assert_allclose(c.s - c.s[0], 2 * (c.t - c.t[0]), atol=1e-7)
    assert c.unit_speed_error() < 1e-6


def test_helix_closed_form():
    a, b = 1.5, 0.7
    c = cv.curve_from_expressions(f"{a}*cos(t)", f"{a}*sin(t)", f"{b}*t", (-2, 2))
    np.testing.assert_allclose(c.kappa, a / (a * a + b * b), atol=1e-6)
    np.testing.assert_allclose(c.tau, b / (a * a + b * b), atol=1e-6)


def test_frenet_data_is_consistent(cylinder):
    assert cylinder.unit_speed_error() < 1e-6
    assert cylinder.orthonormality_error() < 1e-8
    assert max(cylinder.frenet_residuals()) < 1e-4


def test_cylinder_torsion_and_speed(cylinder):
    t = cylinder.t
    np.testing.assert_allclose(cylinder.tau, -12 * np.cos(t) / (4 * np.cos(t) ** 2 + 41),
                               atol=1e-6)
    for k in (0, 400, 1000, 1700):
        ref = quad(lambda r: np.sqrt(np.cos(r) ** 2 + 9), t[0], t[k], epsabs=1e-12)[0]
        assert cylinder.s[k] - cylinder.s[0] == pytest.approx(ref, abs=1e-6)


def test_named_curves():
    circ = cv.named_curve("circle")
    np.testing.assert_allclose(circ.kappa, 1.0, atol=1e-6)
    np.testing.assert_allclose(circ.tau, 0.0, atol=1e-6)
    dini = cv.named_curve("helix")
    assert dini.kappa[0] ** 2 + dini.tau[0] ** 2 == pytest.approx(1.0, abs=1e-6)
    with pytest.raises(UnknownCurve):
        cv.named_curve("trefoil")


def test_viviani_has_four_unit_torsion_points():
    c = cv.named_curve("viviani")
    assert len(c.tau_unit) + len(c.tau_minus_unit) == 4
    crossings = np.nonzero(np.diff(np.sign(np.abs(c.tau) - 1)))[0]
    assert len(crossings) == 4


def test_degenerate_parametrization_raises():
    with pytest.raises(DegenerateCurve):
        cv.curve_from_expressions("t^2", "t^2", "t^2", (-1, 1))


def test_reconstruction_closes(cylinder):
    gamma, _ = cv.reconstruct_from_frenet(cylinder.s, cylinder.kappa_function(),
                                          cylinder.tau_function())
    assert kabsch_align(gamma, cylinder.gamma).max <= 1e-4


def test_reversal_keeps_torsion_and_mirror_negates_it():
    c = cv.curve_from_expressions("cos(3*t)", "sin(3*t)", "-sin(t)", (-1, 1))
    r = cv.curve_from_expressions("cos(-3*t)", "sin(-3*t)", "-sin(-t)", (-1, 1))
    m = cv.curve_from_expressions("cos(3*t)", "sin(3*t)", "sin(t)", (-1, 1))
    np.testing.assert_allclose(r.kappa, c.kappa[::-1], atol=1e-6)
    np.testing.assert_allclose(r.tau, c.tau[::-1], atol=1e-6)
    np.testing.assert_allclose(m.kappa, c.kappa, atol=1e-6)
    np.testing.assert_allclose(m.tau, -c.tau, atol=1e-6)
    np.testing.assert_allclose(r.B, -c.B[::-1], atol=1e-6)
    assert np.all(c.kappa >= 0)


def test_csv_curve_matches_expression(tmp_path):
    t = np.linspace(0, 2, 201)
    rows = np.column_stack([t, np.cos(t), np.sin(t), 0.5 * t])
    path = tmp_path / "helix.csv"
    np.savetxt(path, rows, delimiter=",", header="t,x,y,z", comments="")
    c = cv.curve_from_csv(str(path))
    np.testing.assert_allclose(c.kappa[50:-50], 1 / 1.25, atol=1e-5)
    np.testing.assert_allclose(c.tau[50:-50], 0.5 / 1.25, atol=1e-5)


def test_cauchy_check_circle_binormal():
    c = cv.named_curve("circle")
    Z = np.tile([0.0, 0.0, 1.0], (len(c.s), 1))
    rep = cv.singular_geometric_cauchy_check(c, Z)
    assert rep["all_hold"]
    np.testing.assert_allclose(rep["Z_speed"], 0.0, atol=1e-12)
    assert np.all(rep["binormal"])


def test_cauchy_check_helix_binormal():
    for a, b, holds in ((0.6, 0.8, True), (0.5, 0.5, False)):
        c = cv.named_curve("helix", {"a": a, "b": b})
        rep = cv.singular_geometric_cauchy_check(c, c.B)
        assert np.all(rep["orthogonal"]) and np.all(rep["derivative_orthogonal"])
        np.testing.assert_allclose(rep["Z_speed"][5:-5], abs(c.tau[0]), atol=1e-6)
        assert rep["all_hold"] == holds


def test_cauchy_check_circle_normal_fails():
    c = cv.named_curve("circle")
    rep = cv.singular_geometric_cauchy_check(c, c.N)
    assert rep["orthogonal"].all()
    assert not rep["derivative_orthogonal"].any()
    assert not rep["binormal"].any()
