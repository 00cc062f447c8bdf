"""Acceptance criteria, one test each; a summary line per criterion is printed at the end of the run."""
import math
import time

import numpy as np
import pytest

from conftest import BOX_INNER, BOX_OUTER, record_criterion
from zaremba.domains import (
    INNER,
    OUTER,
    DomainSpec,
    build_comparison_annulus,
    check_profile_lemmas,
    profile_inner,
    profile_outer,
)
from zaremba.eigensolvers import web_function_bound
from zaremba.eigensolvers.grid import GridProblem, richardson, solve_grid_eigen, solve_grid_torsion
from zaremba.eigensolvers.radial import (
    RadialProblem,
    check_monotone_radial,
    radial_fd_oracle,
    solve_radial_eigen,
    solve_radial_torsion,
)
from zaremba.experiments import run_paper_example, run_property_suite
from zaremba.geometry import Ball, Box, quermassintegrals, reference_ball, unit_ball_volume
from zaremba.nagy import check_alexandrov_fenchel, check_nagy_outer

TAU_ANNULUS, TAU_ANNULUS_REL, ANNULUS_SECONDS = 0.87586, 5e-3, 1.0
TAU_DOMAIN, TAU_DOMAIN_REL, DOMAIN_SECONDS = 0.23429, 3e-2, 120.0
BALL_TOL = 1e-12
CUBE_W_TOL, CUBE_CHAIN_TOL, CUBE_SLACK_TOL = 1e-12, 1e-6, 1e-4
PLANAR_TOL = 1e-12
INTEGRAL_REL = 1e-2
ORACLE_REL, SCALING_REL = 1e-6, 1e-6
TORSION_REL = 1e-4
WEB_FACTOR = 1.001
SUITE_SEED, SUITE_COUNT, PROFILE_COUNT = 42, 200, 50
MC_SAMPLES = 10**6


def nested_boxes():
    return DomainSpec(Box.centered(BOX_OUTER), Box.centered(BOX_INNER), INNER)


@pytest.fixture(scope="module")
def example_report():
    start = time.perf_counter()
    rep = run_paper_example(seed=0)
    return rep, time.perf_counter() - start


@pytest.fixture(scope="module")
def suite_report():
    return run_property_suite(SUITE_SEED, SUITE_COUNT, (2, 3), PROFILE_COUNT, MC_SAMPLES)


def _verdict(rep, name):
    return next(v for v in rep.verdicts if v.name == name)


def test_criterion_01_annulus_eigenvalue():
    A = build_comparison_annulus(nested_boxes(), "AI")
    start = time.perf_counter()
    tau = solve_radial_eigen(RadialProblem.from_annulus(A, 2.0, 2.0, 512)).tau
    elapsed = time.perf_counter() - start
    ok = abs(tau - TAU_ANNULUS) <= TAU_ANNULUS_REL * TAU_ANNULUS and elapsed < ANNULUS_SECONDS
    detail = (f"tau(A_I) = {tau:.6g} (r = {A.r:.6g}, R = {A.R:.6g}) vs {TAU_ANNULUS} +/- 0.5%, "
              f"runtime {elapsed:.3f} s")
    assert record_criterion(1, ok, detail), detail


def test_criterion_02_domain_eigenvalue(example_report):
    rep, _ = example_report
    start = time.perf_counter()
    coarse = solve_grid_eigen(GridProblem.from_domain(nested_boxes(), 0.05)).tau
    fine = solve_grid_eigen(GridProblem.from_domain(nested_boxes(), 0.025)).tau
    elapsed = time.perf_counter() - start
    rich = richardson(coarse, fine)
    assert fine == pytest.approx(rep.scalars["tau_grid_h0.025"], rel=1e-12)
    ok = abs(fine - TAU_DOMAIN) <= TAU_DOMAIN_REL * TAU_DOMAIN and elapsed < DOMAIN_SECONDS
    detail = (f"tau_grid(h=0.025) = {fine:.6g} (h=0.05: {coarse:.6g}, extrapolated {rich.extrapolated:.6g}) "
              f"vs {TAU_DOMAIN} +/- 3%, runtime {elapsed:.1f} s")
    assert record_criterion(2, ok, detail), detail


def test_criterion_03_strict_ordering(example_report):
    rep, elapsed = example_report
    v = _verdict(rep, "strict_ordering")
    detail = f"paper-example: tau(Omega) = {v.lhs:.6g} < tau(A_I) = {v.rhs:.6g} ({elapsed:.1f} s)"
    assert record_criterion(3, v.passed and v.lhs < v.rhs, detail), detail


def test_criterion_04_ball_quermassintegrals():
    worst = 0.0
    for n in range(2, 7):
        for R in (0.5, 1.0, 2.0):
            W = quermassintegrals(Ball.centered(R, n))
            for j in range(n + 1):
                worst = max(worst, abs(W[j] - unit_ball_volume(n) * R ** (n - j)))
    detail = f"max |W_j(B_R) - omega_n R^(n-j)| = {worst:.3g} over n = 2..6, R in (0.5, 1, 2)"
    assert record_criterion(4, worst <= BALL_TOL, detail), detail


def test_criterion_05_cube_fixtures():
    cube = Box(np.zeros(3), np.ones(3))
    W = quermassintegrals(cube)
    w_err = float(np.max(np.abs(np.array(W.w) - [1, 2, math.pi, 4 * math.pi / 3])))
    chain = check_alexandrov_fenchel(cube).extra["chain"]
    chain_err = float(np.max(np.abs(np.array(chain) - [0.620350, 0.690988, 0.75])))
    slack = check_nagy_outer(cube, [1.0], "reverse_perimeter").samples[0].slack
    target = (6 + 10 * math.pi) - 4 * math.pi * 1.690988**2
    slack_err = abs(slack - target)
    ok = w_err <= CUBE_W_TOL and chain_err <= CUBE_CHAIN_TOL and slack_err <= CUBE_SLACK_TOL
    assert reference_ball(cube, "perimeter").radius == pytest.approx(0.690988, abs=1e-6)
    detail = (f"W error {w_err:.2g}, chain error {chain_err:.2g}, reverse-outer slack {slack:.6f} "
              f"vs (6+10pi) - 4pi(1.690988)^2 = {target:.6f} (quoted decimal 1.48189)")
    assert record_criterion(5, ok, detail), detail


def test_criterion_06_property_suites(suite_report):
    rep = suite_report
    names = ("alexandrov_fenchel", "nagy_inner", "nagy_outer_quermass", "nagy_outer_reverse", "inner_derivative")
    bad = {n: _verdict(rep, f"{n}.violations").lhs for n in names}
    planar = _verdict(rep, "planar_quermass_identity")
    strict = _verdict(rep, "reverse_perimeter_strict")
    ok = all(v == 0 for v in bad.values()) and planar.lhs <= PLANAR_TOL and strict.passed
    ok = ok and rep.scalars["bodies"] == 2 * SUITE_COUNT
    detail = (f"{rep.scalars['bodies']} bodies, violations {sum(bad.values()):.0f}, planar slack {planar.lhs:.2g}, "
              f"reverse slack strictly positive: {strict.passed}")
    assert record_criterion(6, ok, detail), detail


def test_criterion_07_profile_lemmas(suite_report):
    squares = (Box.centered((2.0, 2.0)), Box.centered((0.5, 0.5)))
    so = DomainSpec(*squares, OUTER)
    po = profile_outer(so, build_comparison_annulus(so, "AO"), 64, MC_SAMPLES, 7)
    si = DomainSpec(*squares, INNER)
    pi_ = profile_inner(si, build_comparison_annulus(si, "AItilde"), 2.0, 64, MC_SAMPLES, 7)
    pb = profile_inner(nested_boxes(), build_comparison_annulus(nested_boxes(), "AItilde"), 2.0, 64, MC_SAMPLES, 7)
    co = DomainSpec(Ball.centered(2.0, 2), Ball.centered(1.0, 2), OUTER)
    pc = profile_outer(co, build_comparison_annulus(co, "AO"), 64, MC_SAMPLES, 7)
    ci = DomainSpec(Ball.centered(2.0, 2), Ball.centered(1.0, 2), INNER)
    pci = profile_inner(ci, build_comparison_annulus(ci, "AI"), 2.0, 64, MC_SAMPLES, 7)

    fixture_ok = (
        abs(po.t_star - 1.5) <= 1e-6 * 4 * math.sqrt(2)
        and abs(po.s_at(1.0) - 8.0) <= 3 * po.s_stderr_at(1.0)
        and abs(po.v_at(1.0) - 12.0) <= 3 * po.v_stderr_at(1.0)
    )
    profiles = [po, pi_, pb, pc, pci]
    lemmas_ok = all(check_profile_lemmas(p).passed for p in profiles)
    integrals = [abs(p.g_pprime_integral - p.omega_volume) / p.omega_volume for p in profiles if p.side == INNER]
    random_ok = _verdict(suite_report, "profile_lemmas.violations").passed
    ok = fixture_ok and lemmas_ok and max(integrals) <= INTEGRAL_REL and random_ok
    detail = (f"squares t* = {po.t_star:.6g}, s(1) = {po.s_at(1.0):.4f} +/- {po.s_stderr_at(1.0):.3f}, "
              f"v(1) = {float(po.v_at(1.0)):.4f} +/- {po.v_stderr_at(1.0):.4f}; fixture lemmas pass: {lemmas_ok}; "
              f"worst integral rel err {max(integrals):.2g}; {suite_report.scalars['profile_specs']} random specs pass: "
              f"{random_ok}")
    assert record_criterion(7, ok, detail), detail


def test_criterion_08_solver_cross_validation():
    worst_oracle = worst_scaling = 0.0
    monotone = True
    for n in (2, 3, 4):
        for p in (1.5, 2.0, 3.0):
            for q in (1.0, p / 2 + 0.5, p):
                for side in (OUTER, INNER):
                    prob = RadialProblem(n, p, q, 0.5, 1.5, side, 512)
                    res = solve_radial_eigen(prob)
                    big = solve_radial_eigen(prob.scaled(2.0))
                    monotone &= check_monotone_radial(res, side) and check_monotone_radial(big, side)
                    expect = 2.0 ** prob.scaling_exponent * res.tau
                    worst_scaling = max(worst_scaling, abs(big.tau - expect) / expect)
                    if p == 2 and q == 2:
                        oracle = radial_fd_oracle(prob)
                        worst_oracle = max(worst_oracle, abs(res.tau - oracle) / oracle)
    ok = worst_oracle <= ORACLE_REL and worst_scaling <= SCALING_REL and monotone
    detail = (f"oracle rel err {worst_oracle:.2g}, scaling rel err {worst_scaling:.2g}, monotone on all 108 solves: "
              f"{monotone}")
    assert record_criterion(8, ok, detail), detail


def test_criterion_09_torsion():
    T = solve_radial_torsion(RadialProblem(2, 2.0, 2.0, 1.0, 2.0, INNER)).T
    closed = 2 * math.pi * (4 * math.log(2) - 1.5 - 15 / 16 + 3 / 8)
    cubes = DomainSpec(Box.centered((1.0, 1.0, 1.0)), Box.centered((0.5, 0.5, 0.5)), OUTER)
    A_o = build_comparison_annulus(cubes, "AO")
    T_ao = solve_radial_torsion(RadialProblem.from_annulus(A_o, 2.0, 2.0)).T
    T_cubes = solve_grid_torsion(GridProblem.from_domain(cubes, 0.05)).T
    A_t = build_comparison_annulus(nested_boxes(), "AItilde")
    T_at = solve_radial_torsion(RadialProblem.from_annulus(A_t, 2.0, 2.0)).T
    T_boxes = solve_grid_torsion(GridProblem.from_domain(nested_boxes(), 0.025)).T
    ok = abs(T - 4.4616) <= TORSION_REL * 4.4616 and abs(T - closed) <= 1e-10 * closed
    ok = ok and T_ao <= T_cubes and T_at <= T_boxes
    detail = (f"T = {T:.6f} (closed form {closed:.6f}); cubes T(A_O) = {T_ao:.5g} <= {T_cubes:.5g}; "
              f"nested boxes T(A~_I) = {T_at:.5g} <= {T_boxes:.5g}")
    assert record_criterion(9, ok, detail), detail


def test_criterion_10_web_sandwich(example_report):
    rep, _ = example_report
    tau_grid = rep.scalars["tau_grid_h0.025"]
    A = build_comparison_annulus(nested_boxes(), "AItilde")
    res = solve_radial_eigen(RadialProblem.from_annulus(A, 2.0, 2.0, 512))
    prof = profile_inner(nested_boxes(), A, 2.0, 64, MC_SAMPLES, 0)
    web = web_function_bound(prof, res, 2.0, 2.0)
    ok = tau_grid <= web <= WEB_FACTOR * res.tau
    detail = f"tau_grid = {tau_grid:.6g} <= web = {web:.6g} <= 1.001 * tau(A~_I) = {WEB_FACTOR * res.tau:.6g}"
    assert record_criterion(10, ok, detail), detail


if __name__ == "__main__":
    raise SystemExit(pytest.main([__file__, "-q"]))
