import numpy as np
import pytest

from pseudofront import pipeline
from pseudofront import potentials as pot
from pseudofront import singular as sg
from pseudofront.errors import NotOnSingularSet
from pseudofront.expr import Constant, parse_scalar
from pseudofront.frames import GridSpec, build_frame_grid, sym_surface
from pseudofront.pipeline import grid_from_domain


def generate(A, B, eps, domain=(-1, 1, -0.5, 0.5), res=101):
    grid = grid_from_domain(domain, res, "uv", eps)
    return pipeline.run_generate(parse_scalar(A), parse_scalar(B), Constant(2.0), eps, grid,
                                 checks=False)


@pytest.fixture(scope="module")
def swallowtails():
    return {eps: generate("1+t", "1-t" if eps == -1 else "t-1", eps,
                          (-0.8, 0.8, -0.4, 0.4), 81) for eps in (1, -1)}


def diagonal_curve(run):
    return max((c for c in run.singular.curves if not c.characteristic), key=len)


def test_cuspidal_edge_along_the_diagonal():
    run = generate("1", "1", 1)
    assert len(run.singular.curves) == 1
    c = run.singular.curves[0]
    assert np.max(np.abs(c.xy[:, 1] - c.xy[:, 0])) <= 1e-3
    assert set(c.types) == {sg.CUSPIDAL_EDGE}
    assert np.max(np.abs(c.mu)) <= 1e-8


def test_swallowtail_at_origin(swallowtails):
    for eps, run in swallowtails.items():
        c = diagonal_curve(run)
        special = [i for i, t in enumerate(c.types) if t != sg.CUSPIDAL_EDGE]
        assert len(special) == 1
        assert c.types[special[0]] == sg.SWALLOWTAIL
        assert np.hypot(*c.xy[special[0]]) <= 2 * 0.02


def test_vanishing_coefficient_lines_are_higher_order(swallowtails):
    run = swallowtails[-1]
    side = [c for c in run.singular.curves if c.characteristic]
    assert len(side) == 2
    for c in side:
        assert set(c.types) == {sg.HIGHER_ORDER}
        assert not np.any(c.weakly_regular)


def test_classification_invariant_under_swapping_x_and_y(swallowtails):
    for eps, run in swallowtails.items():
        xy, types = run.singular.all_points()
        # A(t) = eps B(-t) here, so exchanging x and y reverses t along the diagonal
        swapped = np.column_stack([-eps * xy[:, 1], -eps * xy[:, 0]])
        for p, t in zip(swapped, types):
            assert sg.classify(p, run.surface) == t


def test_cone_arc_collapses():
    run = generate("1", "1", -1)
    c = diagonal_curve(run)
    assert set(c.types) == {sg.CONE_ARC}
    assert sg.image_diameter(c.image) <= 1e-3


def test_partition_on_fronts(swallowtails):
    c = diagonal_curve(swallowtails[1])
    assert all(t in (sg.CUSPIDAL_EDGE, sg.SWALLOWTAIL) for t in c.types)
    assert np.all(c.weakly_regular)


def test_characteristic_line_along_y_zero():
    grid = GridSpec("xy", (-1, 1), (-1, 1), 101, 101)
    run = pipeline.run_characteristic(Constant(0.0), Constant(1.0), parse_scalar("y"), grid,
                                      checks=False)
    assert len(run.singular.curves) == 1
    c = run.singular.curves[0]
    assert c.characteristic
    assert np.max(np.abs(c.xy[:, 1])) <= 1e-8
    assert set(c.types) == {sg.CUSPIDAL_EDGE}
    diag = sg.characteristic_diagnostics(run.surface, c)
    assert diag["straight_line"] and diag["passes"]


def test_zero_potential_is_a_degenerate_region():
    grid = GridSpec("xy", (-1, 1), (-1, 1), 11, 11)
    surface = sym_surface(build_frame_grid(pot.zero_pair(), grid, 4))
    sing = sg.detect_singular_set(surface)
    assert sing.curves == []
    assert sing.fully_degenerate


def test_regular_point_is_not_singular(pseudosphere):
    with pytest.raises(NotOnSingularSet):
        sg.classify((0.5, 0.1), pseudosphere.surface)


def test_non_characteristic_curve_rejected_by_diagnostics(pseudosphere):
    c = pseudosphere.singular.curves[0]
    with pytest.raises(NotOnSingularSet):
        sg.characteristic_diagnostics(pseudosphere.surface, c)


def test_pseudosphere_singular_curve(pseudosphere):
    curves = pseudosphere.singular.curves
    assert len(curves) == 1
    c = curves[0]
    np.testing.assert_allclose(c.xy[:, 1], c.xy[:, 0], atol=1e-6)
    assert set(c.types) == {sg.CUSPIDAL_EDGE}
    k = len(c) // 2
    assert sg.classify(c.xy[k], pseudosphere.surface) == sg.CUSPIDAL_EDGE


def test_crossing_point_is_degenerate():
    from conftest import uv_box
    run = pipeline.run_cauchy(parse_scalar("t"), Constant(0.5), uv_box(101), checks=False)
    pts = run.singular.degenerate_points
    assert len(pts) == 1 and np.hypot(*pts[0]) <= 1e-6
    xy, types = run.singular.all_points()
    at0 = [t for p, t in zip(xy, types) if np.hypot(*p) <= 1e-6]
    assert at0 and set(at0) == {sg.DEGENERATE}
    others = {t for p, t in zip(xy, types) if np.hypot(*p) > 1e-6}
    assert others == {sg.CUSPIDAL_EDGE}


def test_tolerances_replace():
    tol = sg.Tolerances().replace(zero_tol=1e-3, weak_tol=None)
    assert tol.zero_tol == 1e-3 and tol.weak_tol == 1e-6
