import math

import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from zaremba.errors import InvalidDelta, InvalidInput, InvalidStencil, UnsupportedDimension
from zaremba.geometry import Ball, Box, inradius, quermassintegrals, reference_ball
from zaremba.nagy import (
    InequalityReport,
    check_alexandrov_fenchel,
    check_inner_derivative,
    check_nagy_inner,
    check_nagy_outer,
    random_convex_polytope,
)


def test_cube_alexandrov_fenchel_chain(unit_cube):
    rep = check_alexandrov_fenchel(unit_cube)
    np.testing.assert_allclose(rep.extra["chain"], [0.620350, 0.690988, 0.75], atol=1e-6)
    assert rep.passed
    assert min(s.slack for s in rep.samples) > 1e-3


@pytest.mark.parametrize("n", [2, 3, 5])
def test_ball_chain_is_flat(n):
    rep = check_alexandrov_fenchel(Ball.centered(1.7, n))
    np.testing.assert_allclose(rep.extra["chain"], 1.7, rtol=1e-14)
    assert rep.passed
    assert max(abs(s.slack) for s in rep.samples) <= 1e-12


def test_nagy_inner_square(unit_square):
    rep = check_nagy_inner(unit_square, [0.25])
    s = rep.samples[0]
    assert s.lhs == pytest.approx(2.0, abs=1e-12)
    assert s.rhs == pytest.approx(4 - math.pi / 2, abs=1e-12)
    assert s.rhs == pytest.approx(2.42920, abs=1e-5)
    assert rep.passed


def test_nagy_inner_cube(unit_cube):
    s = check_nagy_inner(unit_cube, [0.3]).samples[0]
    assert s.lhs == pytest.approx(0.96, abs=1e-12)
    R = math.sqrt(6 / (4 * math.pi))
    assert s.rhs == pytest.approx(4 * math.pi * (R - 0.3) ** 2, abs=1e-12)
    assert s.rhs == pytest.approx(1.92104, abs=1e-5)


def test_nagy_inner_ball_equality():
    rep = check_nagy_inner(Ball.centered(1.0, 3), [0.1, 0.5, 0.9])
    assert rep.passed
    assert max(abs(s.slack) for s in rep.samples) <= 1e-12


def test_nagy_inner_rejects_delta(unit_square):
    with pytest.raises(InvalidDelta):
        check_nagy_inner(unit_square, [0.5])
    with pytest.raises(InvalidDelta):
        check_nagy_inner(unit_square, [0.0])


def test_reverse_outer_cube(unit_cube):
    s = check_nagy_outer(unit_cube, [1.0], "reverse_perimeter").samples[0]
    assert s.lhs == pytest.approx(6 + 10 * math.pi, abs=1e-12)
    assert s.lhs == pytest.approx(37.41593, abs=1e-5)
    R = reference_ball(unit_cube, "perimeter").radius
    assert s.rhs == pytest.approx(4 * math.pi * (R + 1) ** 2, abs=1e-12)
    # 4 pi (1.690988)^2 = 35.9328; the slack is checked against this closed form
    assert s.slack == pytest.approx((6 + 10 * math.pi) - 4 * math.pi * 1.690988**2, abs=1e-4)


def test_quermass_outer_cube(unit_cube):
    rep = check_nagy_outer(unit_cube, [1.0], "quermass")
    s = rep.samples[0]
    assert s.rhs == pytest.approx(4 * math.pi * 1.75**2, abs=1e-12)
    assert s.rhs == pytest.approx(38.48451, abs=1e-5)
    assert rep.passed and s.slack > 0


def test_quermass_outer_square_is_identity(unit_square):
    rep = check_nagy_outer(unit_square, [0.7], "quermass")
    s = rep.samples[0]
    assert s.lhs == pytest.approx(4 + 1.4 * math.pi, abs=1e-12)
    assert abs(s.slack) <= 1e-12
    assert rep.equality and rep.passed


def test_quermass_slack_at_zero(unit_cube):
    s = check_nagy_outer(unit_cube, [0.0], "quermass").samples[0]
    W = quermassintegrals(unit_cube)
    assert s.slack == pytest.approx(4 * math.pi * (W[2] / W[3]) ** 2 - W.perimeter, abs=1e-12)
    assert check_nagy_outer(Ball.centered(1.0, 3), [0.0], "quermass").samples[0].slack == pytest.approx(0, abs=1e-12)


def test_reverse_perimeter_planar_unsupported(unit_square):
    with pytest.raises(UnsupportedDimension):
        check_nagy_outer(unit_square, [1.0], "reverse_perimeter")
    with pytest.raises(InvalidInput):
        check_nagy_outer(unit_square, [1.0], "bogus")


def test_inner_derivative_cube(unit_cube):
    rep = check_inner_derivative(unit_cube, [0.1])
    s = rep.samples[0]
    assert s.lhs == pytest.approx(19.2, abs=1e-4)
    assert s.rhs == pytest.approx(15.07964, abs=1e-5)
    assert rep.passed


def test_inner_derivative_ball_equality():
    rep = check_inner_derivative(Ball.centered(1.0, 3), [0.2, 0.5, 0.8])
    assert max(abs(s.slack) for s in rep.samples) <= 1e-6


def test_inner_derivative_stencil_error(unit_cube):
    with pytest.raises(InvalidStencil):
        check_inner_derivative(unit_cube, [0.495], h=0.01)


def test_random_polytope_determinism_and_minimal():
    a = random_convex_polytope(3, 4, 2024)
    b = random_convex_polytope(3, 4, 2024)
    np.testing.assert_array_equal(a.normals, b.normals)
    np.testing.assert_array_equal(a.offsets, b.offsets)
    assert len(a.vertices) == 4


def test_random_polygon_many_facets_is_nearly_round():
    rep = check_alexandrov_fenchel(random_convex_polytope(2, 64, 9))
    assert rep.passed
    assert max(s.slack for s in rep.samples) <= 1e-2


def test_random_polytope_rejects_bad_arguments():
    with pytest.raises(InvalidInput):
        random_convex_polytope(3, 3, 0)
    with pytest.raises(UnsupportedDimension):
        random_convex_polytope(4, 8, 0)


def test_equality_report_verdict():
    rep = InequalityReport("x", "x", 1e-9, equality=True)
    rep.add(0, 1.0, 1.0, 2e-9)
    assert not rep.passed and rep.verdict == "fail"


@settings(max_examples=60, deadline=None)
@given(seed=st.integers(0, 2**63 - 1), facets=st.integers(4, 14))
def test_random_3d_polytopes_satisfy_all_checks(seed, facets):
    K = random_convex_polytope(3, facets, seed)
    assert check_alexandrov_fenchel(K).passed
    assert check_nagy_inner(K).passed
    rev = check_nagy_outer(K, mode="reverse_perimeter")
    assert rev.passed and rev.min_slack > 1e-9
    assert check_nagy_outer(K, mode="quermass").passed
    assert check_inner_derivative(K).passed


@settings(max_examples=60, deadline=None)
@given(seed=st.integers(0, 2**63 - 1), facets=st.integers(3, 14))
def test_random_polygons_satisfy_all_checks(seed, facets):
    K = random_convex_polytope(2, facets, seed)
    assert check_alexandrov_fenchel(K).passed
    assert check_nagy_inner(K).passed
    q = check_nagy_outer(K, mode="quermass")
    assert q.passed and max(abs(s.slack) for s in q.samples) <= 1e-12
    assert check_inner_derivative(K).passed


def test_boxes_in_higher_dimension_keep_af_chain():
    box = Box(np.zeros(5), np.array([1.0, 2.0, 0.5, 3.0, 1.5]))
    assert check_alexandrov_fenchel(box).passed
    assert inradius(box) == 0.25
