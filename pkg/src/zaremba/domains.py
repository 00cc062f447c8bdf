"""Doubly connected domains, their comparison annuli and parallel-set profiles.

A :class:`DomainSpec` is ``outer \\ closure(inner)`` with the Dirichlet
condition on one of the two boundaries.  The comparison annuli match either
the perimeter or the ``(n-1)``-st quermassintegral of the Dirichlet body and
the volume of the domain.

Profiles tabulate the level-set measure ``s(d)`` of the distance to the
Dirichlet boundary.  The cumulative volume ``v(d)`` is estimated by seeded
Monte Carlo, fitted by a monotone cubic, and ``s`` is its derivative.
"""
from __future__ import annotations

from dataclasses import dataclass, field
import numpy as np
from scipy.interpolate import PchipInterpolator
from scipy.optimize import minimize

from .errors import EmptyErosion, FittingFailure, InfeasibleVolume, InvalidBody, InvalidInput, InvalidPairing
from .geometry import (
    Ball,
    Box,
    PolytopeH,
    bounding_box,
    depth,
    diameter,
    distance_to_body,
    inner_parallel_body,
    inradius,
    quermassintegrals,
    unit_ball_volume,
    vertices,
)
from .mc import DEFAULT_SAMPLES, box_volume, uniform_batches
from .nagy import InequalityReport

OUTER = "outer"
INNER = "inner"
CONTAINMENT_MARGIN = 1e-9
ALPHA_POINTS = 256


def _side(value):
    side = str(value).lower()
    if side not in (OUTER, INNER):
        raise InvalidInput(f"dirichlet side must be 'outer' or 'inner', got {value!r}")
    return side


@dataclass(frozen=True, eq=False)
class DomainSpec:
    """``outer \\ closure(inner)`` with the Dirichlet condition on one boundary."""

    outer: Ball | Box | PolytopeH
    inner: Ball | Box | PolytopeH | None
    dirichlet_on: str = OUTER

    def __post_init__(self):
        side = _side(self.dirichlet_on)
        object.__setattr__(self, "dirichlet_on", side)
        if side == INNER and self.inner is None:
            raise InvalidInput("an inner Dirichlet problem needs an inner body")
        if self.inner is not None:
            if self.inner.dim != self.outer.dim:
                raise InvalidInput("inner and outer bodies differ in dimension")
            if not body_inside(self.inner, self.outer, CONTAINMENT_MARGIN):
                raise InvalidBody("closure of the inner body must lie in the interior of the outer body")

    @property
    def dim(self) -> int:
        return self.outer.dim

    @property
    def dirichlet_body(self):
        return self.outer if self.dirichlet_on == OUTER else self.inner

    @property
    def volume(self) -> float:
        vol = quermassintegrals(self.outer)[0]
        if self.inner is not None:
            vol -= quermassintegrals(self.inner)[0]
        return vol

    def contains(self, X) -> np.ndarray:
        inside = np.atleast_1d(depth(self.outer, X) > 0)
        if self.inner is not None:
            inside &= np.atleast_1d(depth(self.inner, X) < 0)
        return inside

    def distance_to_dirichlet(self, X) -> np.ndarray:
        """Distance to the Dirichlet boundary for points of the domain."""
        if self.dirichlet_on == OUTER:
            return np.atleast_1d(depth(self.outer, X))
        return np.atleast_1d(distance_to_body(self.inner, X))


def body_inside(A, B, margin=0.0) -> bool:
    """Whether ``A`` lies in ``B`` with clearance ``margin`` from its boundary."""
    if isinstance(A, Ball):
        return bool(depth(B, A.center) >= A.radius + margin)
    return bool(np.all(depth(B, vertices(A)) >= margin))


@dataclass(frozen=True)
class Annulus:
    """Concentric ``B_R \\ closure(B_r)`` with the Dirichlet condition on one sphere."""

    r: float
    R: float
    dim: int
    dirichlet_on: str = OUTER

    def __post_init__(self):
        object.__setattr__(self, "dirichlet_on", _side(self.dirichlet_on))
        if not (0 < self.r < self.R):
            raise InvalidBody(f"annulus needs 0 < r < R, got r={self.r}, R={self.R}")

    @property
    def width(self) -> float:
        return self.R - self.r

    @property
    def volume(self) -> float:
        return unit_ball_volume(self.dim) * (self.R**self.dim - self.r**self.dim)

    def radius_at(self, delta):
        """Radius of the level sphere at distance ``delta`` from the Dirichlet sphere."""
        delta = np.asarray(delta, dtype=float)
        return self.R - delta if self.dirichlet_on == OUTER else self.r + delta

    def S(self, delta):
        n = self.dim
        return n * unit_ball_volume(n) * self.radius_at(delta) ** (n - 1)

    def V(self, delta):
        n, om = self.dim, unit_ball_volume(self.dim)
        rho = self.radius_at(delta)
        if self.dirichlet_on == OUTER:
            return om * (self.R**n - rho**n)
        return om * (rho**n - self.r**n)

    def V_inv(self, alpha):
        n, om = self.dim, unit_ball_volume(self.dim)
        alpha = np.clip(np.asarray(alpha, dtype=float), 0.0, self.volume)
        if self.dirichlet_on == OUTER:
            return self.R - np.maximum(self.R**n - alpha / om, 0.0) ** (1.0 / n)
        return (self.r**n + alpha / om) ** (1.0 / n) - self.r

    def _T_parts(self, p):
        n = self.dim
        c = n * unit_ball_volume(n)
        q = p / (p - 1.0)
        k = c ** (1.0 - q)
        e = (n - 1) * (1.0 - q) + 1.0
        return k, e

    def T(self, delta, p):
        """``int_0^delta S^(1-p')``, the inner-side reparametrization."""
        k, e = self._T_parts(p)
        rho = self.radius_at(delta)
        if abs(e) < 1e-12:
            return k * np.log(rho / self.r)
        return k * (rho**e - self.r**e) / e

    def T_inv(self, alpha, p):
        k, e = self._T_parts(p)
        alpha = np.asarray(alpha, dtype=float)
        if abs(e) < 1e-12:
            return self.r * np.exp(alpha / k) - self.r
        return (self.r**e + e * alpha / k) ** (1.0 / e) - self.r

    def as_domain(self) -> DomainSpec:
        return DomainSpec(Ball.centered(self.R, self.dim), Ball.centered(self.r, self.dim), self.dirichlet_on)


def build_comparison_annulus(spec: DomainSpec, rule: str) -> Annulus:
    """Annulus of the same volume whose Dirichlet sphere matches ``spec``'s Dirichlet body.

    ``AO``: outer sphere has the perimeter of the outer body.  ``AI``: inner
    sphere has the perimeter of the inner body.  ``AItilde``: inner sphere has
    the same ``W_{n-1}`` as the inner body.
    """
    n = spec.dim
    om = unit_ball_volume(n)
    vol = spec.volume
    key = rule.lower()
    if key == "ao":
        if spec.dirichlet_on != OUTER:
            raise InvalidPairing("rule AO pairs with an outer Dirichlet boundary")
        W = quermassintegrals(spec.outer)
        R = (W.perimeter / (n * om)) ** (1.0 / (n - 1))
        rn = R**n - vol / om
        if rn <= 0:
            raise InfeasibleVolume(f"|Omega| = {vol} is not below omega_n R^n = {om * R**n}")
        return Annulus(rn ** (1.0 / n), R, n, OUTER)
    if key in ("ai", "aitilde"):
        if spec.dirichlet_on != INNER:
            raise InvalidPairing(f"rule {rule} pairs with an inner Dirichlet boundary")
        W = quermassintegrals(spec.inner)
        if key == "ai":
            r = (W.perimeter / (n * om)) ** (1.0 / (n - 1))
        else:
            r = W[n - 1] / om
        R = (r**n + vol / om) ** (1.0 / n)
        return Annulus(r, R, n, INNER)
    raise InvalidInput(f"unknown annulus rule {rule!r}")


# ---------------------------------------------------------------------------
# Parallel-set profiles
# ---------------------------------------------------------------------------


@dataclass
class ParallelProfile:
    side: str
    deltas: np.ndarray
    v: np.ndarray
    s: np.ndarray
    v_stderr: np.ndarray
    s_stderr: np.ndarray
    annulus: Annulus
    annulus_deltas: np.ndarray
    annulus_S: np.ndarray
    annulus_V: np.ndarray
    omega_volume: float
    alpha: np.ndarray
    #: ``h``/``H`` on the outer side, ``g``/``G`` on the inner side
    lower: np.ndarray
    upper: np.ndarray
    lower_stderr: np.ndarray
    #: standard error of the domain-side alpha coordinate at each grid point
    alpha_stderr: np.ndarray
    t_star: float
    delta_star: float = float("nan")
    T_sharp: float = float("nan")
    p: float = float("nan")
    t: np.ndarray | None = None
    t_stderr: np.ndarray | None = None
    annulus_T: np.ndarray | None = None
    g_pprime_integral: float = float("nan")
    samples_rho: np.ndarray = field(default=None, repr=False)
    bbox_volume: float = float("nan")
    n_samples: int = 0

    @property
    def h(self):
        return self.lower if self.side == OUTER else None

    @property
    def H(self):
        return self.upper if self.side == OUTER else None

    @property
    def g(self):
        return self.lower if self.side == INNER else None

    @property
    def G(self):
        return self.upper if self.side == INNER else None

    @property
    def fit(self) -> PchipInterpolator:
        return PchipInterpolator(self.deltas, self.v)

    def v_at(self, delta):
        return self.fit(np.clip(delta, self.deltas[0], self.deltas[-1]))

    def s_at(self, delta):
        return np.interp(delta, self.deltas, self.s)

    def s_stderr_at(self, delta):
        return np.interp(delta, self.deltas, self.s_stderr)

    def v_stderr_at(self, delta):
        return np.interp(delta, self.deltas, self.v_stderr)

    def t_at(self, delta):
        return np.interp(delta, self.deltas, self.t)

    def t_stderr_at(self, delta):
        return np.interp(delta, self.deltas, self.t_stderr)

    def t_inv(self, alpha):
        return np.interp(alpha, self.t, self.deltas)

    def v_inv(self, alpha):
        return _invert_increasing(self.fit, np.asarray(alpha, dtype=float), self.deltas[0], self.deltas[-1])


def _invert_increasing(f, targets, lo, hi, iters=64):
    a = np.full(targets.shape, float(lo))
    b = np.full(targets.shape, float(hi))
    for _ in range(iters):
        m = 0.5 * (a + b)
        below = f(m) < targets
        a = np.where(below, m, a)
        b = np.where(below, b, m)
    return 0.5 * (a + b)


def _sample_rho(spec, samples, seed):
    bbox = bounding_box(spec.outer)
    chunks = []
    for X in uniform_batches(bbox, samples, seed):
        Y = X[spec.contains(X)]
        chunks.append(spec.distance_to_dirichlet(Y) if len(Y) else np.empty(0))
    return np.sort(np.concatenate(chunks)), box_volume(bbox)


def _cumulative_fit(rho, deltas, bbox_vol, N):
    counts = np.searchsorted(rho, deltas, side="left").astype(float)
    counts[-1] = len(rho)
    frac = counts / N
    v = bbox_vol * frac
    v_se = bbox_vol * np.sqrt(frac * (1 - frac) / N)
    if np.any(np.diff(v) < 0):
        raise FittingFailure("cumulative volume is not monotone")
    fit = PchipInterpolator(deltas, v)
    s = fit.derivative()(deltas)
    if np.any(s < -1e-9 * max(1.0, float(np.max(np.abs(s))))):
        raise FittingFailure("fitted volume profile is not monotone")
    pj = np.diff(frac)
    sec_se = bbox_vol * np.sqrt(pj * (1 - pj) / N) / np.diff(deltas)
    s_se = np.maximum(np.r_[sec_se[0], sec_se], np.r_[sec_se, sec_se[-1]])
    # end slopes are one-sided three-point extrapolations of the first two secants
    dd = np.diff(deltas)
    for i, j in ((0, 1), (-1, -2)):
        a, b = dd[i], dd[j]
        s_se[i] = np.hypot((2 * a + b) / (a + b) * sec_se[i], a / (a + b) * sec_se[j])
    return v, np.maximum(s, 0.0), v_se, s_se, fit


def _eroded_within(outer, inner, t):
    E = inner_parallel_body(outer, t)
    return body_inside(E, inner, -1e-12 * max(1.0, diameter(outer)))


def outer_max_distance(spec: DomainSpec, iters=80) -> float:
    """``max d(x, boundary of outer)`` over the closure of an outer-Dirichlet domain."""
    r_out = inradius(spec.outer)
    if spec.inner is None:
        return r_out
    hi = r_out * (1 - 1e-12)
    try:
        if not _eroded_within(spec.outer, spec.inner, hi):
            return r_out
    except (EmptyErosion, InvalidBody):
        pass
    lo = 0.0
    for _ in range(iters):
        mid = 0.5 * (lo + hi)
        try:
            within = _eroded_within(spec.outer, spec.inner, mid)
        except InvalidBody:
            within = True
        if within:
            hi = mid
        else:
            lo = mid
    return 0.5 * (lo + hi)


def _sphere_directions(dim, count=20000):
    if dim == 2:
        a = np.linspace(0, 2 * np.pi, count, endpoint=False)
        return np.c_[np.cos(a), np.sin(a)]
    k = np.arange(count) + 0.5
    z = 1 - 2 * k / count
    phi = np.pi * (1 + 5**0.5) * k
    rr = np.sqrt(1 - z * z)
    return np.c_[rr * np.cos(phi), rr * np.sin(phi), z]


def inner_max_distance(spec: DomainSpec) -> float:
    """``max d(x, inner body)`` over the outer body (attained at an extreme point)."""
    outer, inner = spec.outer, spec.inner
    if not isinstance(outer, Ball):
        return float(np.max(distance_to_body(inner, vertices(outer))))
    if isinstance(inner, Ball):
        return float(np.linalg.norm(outer.center - inner.center) + outer.radius - inner.radius)
    dirs = _sphere_directions(outer.dim)
    dist = distance_to_body(inner, outer.center + outer.radius * dirs)
    best = dirs[int(np.argmax(dist))]

    def neg(x):
        u = x / np.linalg.norm(x)
        return -distance_to_body(inner, outer.center + outer.radius * u)

    res = minimize(neg, best, method="Nelder-Mead", options={"xatol": 1e-10, "fatol": 1e-13})
    return float(max(dist.max(), -res.fun))


def _alpha_grid(upper, count=ALPHA_POINTS):
    return np.linspace(0.0, upper, count)


def profile_outer(spec: DomainSpec, annulus: Annulus, grid_size=64, samples=DEFAULT_SAMPLES, seed=None) -> ParallelProfile:
    """Profile of the distance to the outer (Dirichlet) boundary and its ``h``/``H`` tables."""
    if spec.dirichlet_on != OUTER or annulus.dirichlet_on != OUTER:
        raise InvalidPairing("profile_outer needs an outer Dirichlet domain and annulus")
    rho, bvol = _sample_rho(spec, samples, seed)
    t_star = max(outer_max_distance(spec), float(rho[-1]) if len(rho) else 0.0)
    deltas = np.linspace(0.0, t_star, grid_size)
    v, s, v_se, s_se, fit = _cumulative_fit(rho, deltas, bvol, samples)

    vol = spec.volume
    alpha = _alpha_grid(vol)
    a_dom = np.minimum(alpha, v[-1])
    d_dom = _invert_increasing(fit, a_dom, 0.0, t_star)
    # nodal slopes interpolated linearly: cubic derivatives overshoot between nodes near kinks of v
    h = np.interp(d_dom, deltas, s)
    H = annulus.S(annulus.V_inv(alpha))
    a_del = np.linspace(0.0, annulus.width, grid_size)
    return ParallelProfile(
        side=OUTER,
        deltas=deltas,
        v=v,
        s=s,
        v_stderr=v_se,
        s_stderr=s_se,
        annulus=annulus,
        annulus_deltas=a_del,
        annulus_S=annulus.S(a_del),
        annulus_V=annulus.V(a_del),
        omega_volume=vol,
        alpha=alpha,
        lower=h,
        upper=H,
        lower_stderr=np.interp(d_dom, deltas, s_se),
        alpha_stderr=np.interp(d_dom, deltas, v_se),
        t_star=t_star,
        samples_rho=rho,
        bbox_volume=bvol,
        n_samples=int(samples),
    )


def profile_inner(spec: DomainSpec, annulus: Annulus, p=2.0, grid_size=64, samples=DEFAULT_SAMPLES, seed=None) -> ParallelProfile:
    """Profile of the distance to the inner (Dirichlet) body with the ``t``/``T`` parametrizations."""
    if spec.dirichlet_on != INNER or annulus.dirichlet_on != INNER:
        raise InvalidPairing("profile_inner needs an inner Dirichlet domain and annulus")
    if not p > 1:
        raise InvalidInput(f"p must exceed 1, got {p}")
    rho, bvol = _sample_rho(spec, samples, seed)
    delta_star = max(inner_max_distance(spec), float(rho[-1]) if len(rho) else 0.0)
    deltas = np.linspace(0.0, delta_star, grid_size)
    v, s, v_se, s_se, fit = _cumulative_fit(rho, deltas, bvol, samples)

    conj = p / (p - 1.0)
    # cell averages of s (secants of v): t and the g^{p'} integral are sums over cells
    s_mid = np.diff(v) / np.diff(deltas)
    s_mid = np.maximum(s_mid, 1e-12 * s_mid.max())
    dt = s_mid ** (1.0 - conj) * np.diff(deltas)
    t = np.r_[0.0, np.cumsum(dt)]
    # linearized, fully correlated propagation of the fitted-slope error into t
    se_mid = 0.5 * (s_se[1:] + s_se[:-1])
    t_se = np.r_[0.0, np.cumsum((conj - 1.0) * s_mid ** (-conj) * se_mid * np.diff(deltas))]
    t_star = float(t[-1])
    g_int = float(np.sum(s_mid**conj * dt))

    T_sharp = float(annulus.T(annulus.width, p))
    alpha = _alpha_grid(T_sharp)
    d_dom = np.interp(alpha, t, deltas)
    g = np.interp(d_dom, deltas, s)
    G = annulus.S(annulus.T_inv(alpha, p))
    a_del = np.linspace(0.0, annulus.width, grid_size)
    return ParallelProfile(
        side=INNER,
        deltas=deltas,
        v=v,
        s=s,
        v_stderr=v_se,
        s_stderr=s_se,
        annulus=annulus,
        annulus_deltas=a_del,
        annulus_S=annulus.S(a_del),
        annulus_V=annulus.V(a_del),
        omega_volume=spec.volume,
        alpha=alpha,
        lower=g,
        upper=G,
        lower_stderr=np.interp(d_dom, deltas, s_se),
        alpha_stderr=np.interp(d_dom, deltas, t_se),
        t_star=t_star,
        delta_star=delta_star,
        T_sharp=T_sharp,
        p=float(p),
        t=t,
        t_stderr=t_se,
        annulus_T=annulus.T(a_del, p),
        g_pprime_integral=g_int,
        samples_rho=rho,
        bbox_volume=bvol,
        n_samples=int(samples),
    )


def check_profile_lemmas(profile: ParallelProfile, mc_sigmas=3.0, rel_floor=1e-3, tol_int=1e-2) -> InequalityReport:
    """Pointwise level-set comparison and the range/volume identities of a profile.

    Pointwise tolerances are ``mc_sigmas`` standard errors of the fitted
    level-set measure, plus the annulus slope times the error of the alpha
    coordinate, plus ``rel_floor`` times the largest annulus value.
    """
    ann = profile.annulus
    length_tol = 1e-6 * max(profile.deltas[-1], ann.R)
    floor = rel_floor * float(np.max(profile.upper))
    slope = np.abs(np.gradient(profile.upper, profile.alpha))
    tols = mc_sigmas * (profile.lower_stderr + slope * profile.alpha_stderr) + floor
    if profile.side == OUTER:
        rep = InequalityReport("profile_lemmas_outer", "t* >= R-r and h(alpha) <= H(alpha)", length_tol)
        rep.add(0.0, profile.t_star, ann.width, profile.t_star - ann.width, label="t_star>=R-r")
        for a, lo, up, tol in zip(profile.alpha, profile.lower, profile.upper, tols):
            rep.add(a, lo, up, up - lo, label="h<=H", tol=tol)
        vol_tol = mc_sigmas * profile.v_stderr[-1]
        diff = profile.v[-1] - profile.omega_volume
        rep.add(profile.t_star, profile.v[-1], profile.omega_volume, vol_tol - abs(diff), label="v(t*)=|Omega|", tol=0.0)
    else:
        rep = InequalityReport("profile_lemmas_inner", "R-r <= delta_*, T# <= t_*, g(alpha) <= G(alpha)", length_tol)
        rep.add(0.0, profile.delta_star, ann.width, profile.delta_star - ann.width, label="R-r<=delta_star")
        t_tol = length_tol + mc_sigmas * float(profile.t_stderr[-1])
        rep.add(0.0, profile.t_star, profile.T_sharp, profile.t_star - profile.T_sharp, label="T#<=t_star", tol=t_tol)
        for a, lo, up, tol in zip(profile.alpha, profile.lower, profile.upper, tols):
            rep.add(a, lo, up, up - lo, label="g<=G", tol=tol)
        dev = abs(profile.g_pprime_integral - profile.omega_volume)
        allowed = tol_int * profile.omega_volume
        rep.add(0.0, profile.g_pprime_integral, profile.omega_volume, allowed - dev, label="int g^p'=|Omega|", tol=0.0)
    return rep


__all__ = [
    "Annulus",
    "DomainSpec",
    "ParallelProfile",
    "build_comparison_annulus",
    "check_profile_lemmas",
    "profile_inner",
    "profile_outer",
]
