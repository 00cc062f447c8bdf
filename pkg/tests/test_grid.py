import math

import numpy as np
import pytest

from conftest import BOX_INNER, BOX_OUTER
from zaremba.domains import INNER, OUTER, DomainSpec, build_comparison_annulus
from zaremba.eigensolvers import rayleigh_quotient, solve_torsion
from zaremba.eigensolvers.grid import GridProblem, richardson, solve_grid_eigen, solve_grid_torsion
from zaremba.eigensolvers.radial import RadialProblem, solve_radial_torsion
from zaremba.errors import AlignmentError, InvalidInput, UnsupportedDimension
from zaremba.geometry import Ball, Box


def test_unit_square_dirichlet():
    res = solve_grid_eigen(GridProblem(Box(np.zeros(2), np.ones(2)), None, OUTER, 1 / 64))
    assert res.tau == pytest.approx(2 * math.pi**2, rel=1e-2)
    assert np.all(res.u > 0)
    assert res.residual <= 1e-6


def test_rectangle_dirichlet():
    res = solve_grid_eigen(GridProblem(Box(np.zeros(2), np.array([1.0, 2.0])), None, OUTER, 1 / 32))
    assert res.tau == pytest.approx(math.pi**2 * 1.25, rel=1e-2)


def test_second_order_convergence():
    box = Box(np.zeros(2), np.ones(2))
    taus = [solve_grid_eigen(GridProblem(box, None, OUTER, h)).tau for h in (1 / 8, 1 / 16, 1 / 32)]
    chk = richardson(taus[0], taus[1], finest=taus[2])
    assert chk.observed_order == pytest.approx(2.0, abs=0.1)
    assert abs(taus[1] - taus[2]) <= 4 * abs(taus[2] - chk.extrapolated)
    assert abs(chk.extrapolated - 2 * math.pi**2) < abs(taus[2] - 2 * math.pi**2)


def test_quotient_of_eigenvector_is_eigenvalue():
    prob = GridProblem(Box.centered((1.0, 1.5)), Box.centered((0.5, 0.25)), INNER, 0.125)
    res = solve_grid_eigen(prob)
    assert rayleigh_quotient(res.u, prob.mesh) == pytest.approx(res.tau, rel=1e-6)
    assert rayleigh_quotient(3 * res.u, prob.mesh) == pytest.approx(rayleigh_quotient(res.u, prob.mesh), rel=1e-12)


def test_direct_and_cg_agree():
    prob = GridProblem(Box.centered((1.0, 1.0, 1.0)), Box.centered((0.5, 0.5, 0.5)), OUTER, 0.125)
    a = solve_grid_eigen(prob, method="direct")
    b = solve_grid_eigen(prob, method="cg")
    assert a.tau == pytest.approx(b.tau, rel=1e-7)


def test_nested_boxes_alignment():
    outer, inner = Box.centered(BOX_OUTER), Box.centered(BOX_INNER)
    GridProblem(outer, inner, INNER, 0.05)
    GridProblem(outer, inner, INNER, 0.025)
    with pytest.raises(AlignmentError):
        GridProblem(outer, inner, INNER, 0.03)


def test_grid_problem_validation():
    with pytest.raises(InvalidInput):
        GridProblem(Ball.centered(1.0, 2), None, OUTER, 0.1)
    with pytest.raises(UnsupportedDimension):
        GridProblem(Box(np.zeros(4), np.ones(4)), None, OUTER, 0.5)
    with pytest.raises(InvalidInput):
        GridProblem(Box(np.zeros(2), np.ones(2)), None, OUTER, 0.0)
    with pytest.raises(InvalidInput):
        solve_grid_eigen(GridProblem(Box(np.zeros(2), np.ones(2)), None, OUTER, 0.25), method="gmres")


@pytest.mark.parametrize("side", [OUTER, INNER])
def test_torsion_identity(side):
    prob = GridProblem(Box.centered((1.0, 0.75, 0.5)), Box.centered((0.5, 0.25, 0.25)), side, 0.0625)
    res = solve_grid_torsion(prob)
    assert abs(res.T - res.integral_u) / res.T <= 1e-10
    assert np.all(res.u >= 0)


def test_cube_torsion_dominates_outer_annulus():
    spec = DomainSpec(Box.centered((1.0, 1.0, 1.0)), Box.centered((0.5, 0.5, 0.5)), OUTER)
    A = build_comparison_annulus(spec, "AO")
    T_ann = solve_radial_torsion(RadialProblem.from_annulus(A, 2.0, 2.0)).T
    T_dom = solve_torsion(GridProblem.from_domain(spec, 0.125)).T
    assert T_ann <= T_dom


def test_nested_boxes_torsion_dominates_tilde_annulus(boxes_inner_spec):
    A = build_comparison_annulus(boxes_inner_spec, "AItilde")
    T_ann = solve_radial_torsion(RadialProblem.from_annulus(A, 2.0, 2.0)).T
    T_dom = solve_grid_torsion(GridProblem.from_domain(boxes_inner_spec, 0.05)).T
    assert T_ann <= T_dom
