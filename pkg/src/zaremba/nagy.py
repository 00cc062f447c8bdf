"""Checkers for the geometric inequalities behind the reverse Faber-Krahn bounds.

Each checker returns an :class:`InequalityReport`: per-sample ``lhs``/``rhs``
values, a signed ``slack`` that is nonnegative when the inequality holds, and
a verdict at the declared tolerance.
"""
from __future__ import annotations

from dataclasses import dataclass, field
from math import comb

import numpy as np
from scipy.optimize import linprog

from .errors import GenerationFailure, InvalidBody, InvalidDelta, InvalidInput, InvalidStencil, UnsupportedDimension
from .geometry import (
    PolytopeH,
    diameter,
    inner_parallel_body,
    inradius,
    quermassintegrals,
    reference_ball,
    steiner_coefficients,
    steiner_outer_offset,
    unit_ball_volume,
)

ANALYTIC_TOL = 1e-9
DIFFERENCE_TOL = 1e-4


@dataclass
class InequalitySample:
    param: float
    lhs: float
    rhs: float
    slack: float
    label: str = ""
    tol: float | None = None


@dataclass
class InequalityReport:
    """Outcome of one inequality check.

    ``slack`` is oriented so that the inequality holds iff ``slack >= -tolerance``
    (for equalities, iff ``|slack| <= tolerance``).
    """

    name: str
    anchor: str
    tolerance: float
    samples: list = field(default_factory=list)
    equality: bool = False
    extra: dict = field(default_factory=dict)

    def add(self, param, lhs, rhs, slack, label="", tol=None):
        tol = None if tol is None else float(tol)
        self.samples.append(InequalitySample(float(param), float(lhs), float(rhs), float(slack), label, tol))

    def _tol(self, sample):
        return self.tolerance if sample.tol is None else sample.tol

    def sample_passed(self, sample) -> bool:
        if self.equality:
            return abs(sample.slack) <= self._tol(sample)
        return sample.slack >= -self._tol(sample)

    @property
    def passed(self) -> bool:
        return all(self.sample_passed(s) for s in self.samples)

    @property
    def verdict(self) -> str:
        return "pass" if self.passed else "fail"

    @property
    def min_slack(self) -> float:
        return min((s.slack for s in self.samples), default=float("nan"))

    def slacks(self) -> np.ndarray:
        return np.array([s.slack for s in self.samples])


def _perimeter_of_ball(n, radius):
    return n * unit_ball_volume(n) * radius ** (n - 1)


def default_inner_deltas(K, count=16):
    r = inradius(K)
    return np.geomspace(0.01 * r, 0.99 * r, count)


def default_outer_deltas(K, count=16):
    return np.geomspace(0.01, 2.0 * diameter(K), count)


def check_alexandrov_fenchel(K, tol=ANALYTIC_TOL) -> InequalityReport:
    """Normalized quermassintegral roots must be nondecreasing in the index."""
    W = quermassintegrals(K)
    chain = W.af_chain()
    rep = InequalityReport("alexandrov_fenchel", "Alexandrov-Fenchel inequality", tol)
    for j in range(1, len(chain)):
        rep.add(j, chain[j], chain[j - 1], chain[j] - chain[j - 1])
    rep.extra["chain"] = chain.tolist()
    rep.extra["strict_gap"] = float(chain[-1] - chain[0])
    return rep


def check_nagy_inner(K, deltas=None, tol=ANALYTIC_TOL) -> InequalityReport:
    """``P(K_{-d}) <= P(K#_{-d})`` for erosions, ``K#`` the equal-perimeter ball."""
    n = K.dim
    r = inradius(K)
    deltas = default_inner_deltas(K) if deltas is None else np.asarray(deltas, dtype=float)
    R = reference_ball(K, "perimeter").radius
    rep = InequalityReport("nagy_inner", "P(Omega_{-delta}) <= P(Omega#_{-delta})", tol)
    for d in deltas:
        if not 0 < d < r:
            raise InvalidDelta(f"delta {d} outside (0, inradius={r})")
        lhs = quermassintegrals(inner_parallel_body(K, d)).perimeter
        rhs = _perimeter_of_ball(n, R - d)
        rep.add(d, lhs, rhs, rhs - lhs)
    return rep


def check_nagy_outer(K, deltas=None, mode="reverse_perimeter", tol=ANALYTIC_TOL) -> InequalityReport:
    """Outer-offset perimeter against the equal-perimeter or equal-``W_{n-1}`` ball.

    ``reverse_perimeter`` asserts ``P(K_d) >= P(K#_d)`` (dimension >= 3);
    ``quermass`` asserts ``P(K_d) <= P(K*_d)``, an identity in the plane.
    """
    n = K.dim
    mode = mode.lower()
    deltas = default_outer_deltas(K) if deltas is None else np.asarray(deltas, dtype=float)
    if mode == "reverse_perimeter":
        if n < 3:
            raise UnsupportedDimension("the reverse perimeter inequality needs dimension >= 3")
        R = reference_ball(K, "perimeter").radius
        rep = InequalityReport("nagy_outer_reverse", "P(Omega_delta) >= P(Omega#_delta)", tol)
    elif mode == "quermass":
        R = reference_ball(K, "quermass").radius
        rep = InequalityReport("nagy_outer_quermass", "P(Omega_delta) <= P(Omega*_delta)", tol, equality=(n == 2))
    else:
        raise InvalidInput(f"unknown mode {mode!r}")
    # slack from coefficient differences: matching terms cancel before evaluation at large delta
    om = unit_ball_volume(n)
    ball = np.array([n * om * comb(n - 1, i) * R ** (n - 1 - i) for i in range(n)])
    diff = steiner_coefficients(K)[0] - ball
    if mode != "reverse_perimeter":
        diff = -diff
    for d in deltas:
        if not d >= 0:
            raise InvalidDelta(f"delta must be nonnegative, got {d}")
        lhs = steiner_outer_offset(K, d)[0]
        rhs = _perimeter_of_ball(n, R + d)
        rep.add(d, lhs, rhs, float(np.polynomial.polynomial.polyval(d, diff)))
    return rep


def _facet_count(body):
    return len(body.offsets) if isinstance(body, PolytopeH) else None


def default_derivative_ts(K, count=5):
    r = inradius(K)
    return np.linspace(0.15 * r, 0.85 * r, count)


def check_inner_derivative(K, ts=None, h=None, tol=DIFFERENCE_TOL, skip_kinks=True) -> InequalityReport:
    """Erosion rate ``-d/dt P(K_{-t}) >= n(n-1) W_2(K_{-t})`` by central differences.

    Samples whose stencil straddles a facet-disappearance event are dropped
    when ``skip_kinks`` is set (the derivative jumps there).
    """
    n = K.dim
    r = inradius(K)
    h = min(0.01, 0.1 * r) if h is None else float(h)
    ts = default_derivative_ts(K) if ts is None else np.asarray(ts, dtype=float)
    rep = InequalityReport("inner_derivative", "-d/dt P(Omega_{-t}) >= n(n-1) W_2(Omega_{-t})", tol)
    skipped = []
    for t in ts:
        if not (0 < t - h and t + h < r):
            raise InvalidStencil(f"stencil [{t - h}, {t + h}] leaves (0, {r})")
        lo, mid, hi = (inner_parallel_body(K, s) for s in (t - h, t, t + h))
        if skip_kinks and _facet_count(lo) is not None and _facet_count(lo) != _facet_count(hi):
            skipped.append(float(t))
            continue
        P_lo = quermassintegrals(lo).perimeter
        P_hi = quermassintegrals(hi).perimeter
        lhs = -(P_hi - P_lo) / (2 * h)
        rhs = n * (n - 1) * quermassintegrals(mid)[2]
        rep.add(t, lhs, rhs, lhs - rhs)
    rep.extra["skipped"] = skipped
    rep.extra["h"] = h
    return rep


def random_convex_polytope(dim, facet_count, seed, retries=100) -> PolytopeH:
    """Circumscribed random polytope: tangent halfspaces of a sphere of random radius.

    Directions are uniform on the sphere and the radius is uniform in
    ``[0.5, 2]``; deterministic in ``seed``.
    """
    if dim not in (2, 3):
        raise UnsupportedDimension("random polytopes are generated in dimension 2 or 3")
    if facet_count < dim + 1:
        raise InvalidInput(f"need at least {dim + 1} facets, got {facet_count}")
    rng = np.random.default_rng(seed)
    for _ in range(retries):
        normals = rng.standard_normal((facet_count, dim))
        normals /= np.linalg.norm(normals, axis=1, keepdims=True)
        scale = rng.uniform(0.5, 2.0)
        if not _positively_spanning(normals):
            continue
        try:
            return PolytopeH(normals, np.full(facet_count, scale))
        except InvalidBody:
            continue
    raise GenerationFailure(f"no bounded polytope after {retries} draws (seed={seed})")


def _positively_spanning(normals, margin=1e-3):
    # bounded iff the origin is interior to the convex hull of the normals
    m, n = normals.shape
    # maximize s subject to sum(l) = 1, sum(l_i a_i) = 0, l_i >= s
    c = np.zeros(m + 1)
    c[-1] = -1.0
    A_eq = np.zeros((n + 1, m + 1))
    A_eq[:n, :m] = normals.T
    A_eq[n, :m] = 1.0
    b_eq = np.zeros(n + 1)
    b_eq[n] = 1.0
    A_ub = np.hstack([-np.eye(m), np.ones((m, 1))])
    res = linprog(c, A_ub=A_ub, b_ub=np.zeros(m), A_eq=A_eq, b_eq=b_eq, bounds=[(0, None)] * m + [(None, None)], method="highs")
    return res.status == 0 and -res.fun > margin / m


__all__ = [
    "InequalityReport",
    "check_alexandrov_fenchel",
    "check_nagy_inner",
    "check_nagy_outer",
    "check_inner_derivative",
    "random_convex_polytope",
]
