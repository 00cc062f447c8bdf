import pytest

from zaremba.domains import INNER, OUTER, DomainSpec, build_comparison_annulus, profile_inner, profile_outer
from zaremba.eigensolvers import web_function_bound
from zaremba.eigensolvers.grid import GridProblem, solve_grid_eigen
from zaremba.eigensolvers.radial import RadialProblem, solve_radial_eigen
from zaremba.errors import InvalidPairing
from zaremba.geometry import Ball, Box

SAMPLES = 10**6


def annulus_result(A, p=2.0, q=2.0, nodes=512):
    return solve_radial_eigen(RadialProblem.from_annulus(A, p, q, nodes))


@pytest.mark.parametrize("side", [OUTER, INNER])
def test_concentric_transplant_returns_annulus_value(side):
    spec = DomainSpec(Ball.centered(2.0, 2), Ball.centered(1.0, 2), side)
    A = build_comparison_annulus(spec, "AO" if side == OUTER else "AI")
    res = annulus_result(A)
    prof = profile_outer(spec, A, 64, SAMPLES, 1) if side == OUTER else profile_inner(spec, A, 2.0, 64, SAMPLES, 1)
    # exact in the continuum; the profile is MC-backed, so agreement is at sampling accuracy
    assert web_function_bound(prof, res, 2.0, 2.0) == pytest.approx(res.tau, rel=5e-3)


def test_squares_outer_sandwich():
    spec = DomainSpec(Box.centered((2.0, 2.0)), Box.centered((0.5, 0.5)), OUTER)
    A = build_comparison_annulus(spec, "AO")
    res = annulus_result(A)
    web = web_function_bound(profile_outer(spec, A, 64, SAMPLES, 2), res, 2.0, 2.0)
    tau_dom = solve_grid_eigen(GridProblem.from_domain(spec, 0.0625)).tau
    assert tau_dom <= web <= res.tau * (1 + 1e-3)


@pytest.mark.parametrize("p,q", [(2.0, 1.0), (2.0, 1.5), (1.5, 1.5), (3.0, 2.0), (3.0, 3.0)])
def test_nested_boxes_bound_below_tilde_annulus(boxes_inner_spec, p, q):
    A = build_comparison_annulus(boxes_inner_spec, "AItilde")
    res = annulus_result(A, p, q)
    web = web_function_bound(profile_inner(boxes_inner_spec, A, p, 64, SAMPLES, 3), res, p, q)
    assert 0 < web <= res.tau * (1 + 1e-3)


def test_squares_inner_near_equality():
    # s = 4 + 2 pi delta = S on delta < 1.5, so g and G coincide there
    spec = DomainSpec(Box.centered((2.0, 2.0)), Box.centered((0.5, 0.5)), INNER)
    A = build_comparison_annulus(spec, "AItilde")
    res = annulus_result(A)
    web = web_function_bound(profile_inner(spec, A, 2.0, 64, SAMPLES, 3), res, 2.0, 2.0)
    tau_dom = solve_grid_eigen(GridProblem.from_domain(spec, 0.0625)).tau
    assert tau_dom <= web
    assert web == pytest.approx(res.tau, rel=5e-3)


def test_pairing_errors(boxes_inner_spec):
    A = build_comparison_annulus(boxes_inner_spec, "AItilde")
    prof = profile_inner(boxes_inner_spec, A, 2.0, 32, 10**5, 4)
    other = annulus_result(build_comparison_annulus(boxes_inner_spec, "AI"))
    with pytest.raises(InvalidPairing):
        web_function_bound(prof, other, 2.0, 2.0)
    flipped = RadialProblem(3, 2.0, 2.0, A.r, A.R, OUTER, 512)
    with pytest.raises(InvalidPairing):
        web_function_bound(prof, solve_radial_eigen(flipped), 2.0, 2.0)
