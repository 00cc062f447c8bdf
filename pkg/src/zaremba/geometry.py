"""Exact primitives for convex bodies: balls, axis boxes and H-polytopes.

Every body exposes its quermassintegrals ``W_0 .. W_n`` (``W_0`` the volume,
``W_1`` the perimeter over ``n``, ``W_n`` the unit-ball volume), from which the
Steiner polynomials of outer offsets follow.  H-polytopes are limited to the
plane and space; their combinatorics (vertices, facet cycles, edges) are
recovered by brute-force enumeration of facet intersections.
"""
from __future__ import annotations

import itertools
from dataclasses import dataclass, field
from functools import cached_property
from math import comb, gamma, pi

import numpy as np
from scipy.optimize import linprog

from .errors import (
    DegenerateBody,
    EmptyErosion,
    InvalidBody,
    InvalidDelta,
    InvalidDimension,
    InvalidInput,
    UnsupportedDimension,
)

#: feasibility tolerance used when enumerating polytope vertices
VERTEX_TOL = 1e-9
NORMAL_TOL = 1e-12


def unit_ball_volume(n: int) -> float:
    """Volume of the unit ball in ``R^n``."""
    if int(n) != n or n < 1:
        raise InvalidDimension(f"dimension must be a positive integer, got {n!r}")
    return pi ** (n / 2) / gamma(n / 2 + 1)


def _as_vector(x, name="vector") -> np.ndarray:
    arr = np.asarray(x, dtype=float)
    if arr.ndim != 1 or not np.all(np.isfinite(arr)):
        raise InvalidInput(f"{name} must be a finite 1-d sequence")
    return arr


# ---------------------------------------------------------------------------
# Body types
# ---------------------------------------------------------------------------


@dataclass(frozen=True, eq=False)
class Ball:
    center: np.ndarray
    radius: float

    def __post_init__(self):
        c = _as_vector(self.center, "center")
        if c.size < 2:
            raise InvalidDimension("balls need dimension >= 2")
        if not (np.isfinite(self.radius) and self.radius > 0):
            raise InvalidBody(f"radius must be positive, got {self.radius}")
        object.__setattr__(self, "center", c)
        object.__setattr__(self, "radius", float(self.radius))

    @classmethod
    def centered(cls, radius, dim):
        return cls(np.zeros(dim), radius)

    @property
    def dim(self) -> int:
        return self.center.size

    def __repr__(self):
        return f"Ball(center={self.center.tolist()}, radius={self.radius!r})"


@dataclass(frozen=True, eq=False)
class Box:
    lo: np.ndarray
    hi: np.ndarray

    def __post_init__(self):
        lo, hi = _as_vector(self.lo, "lo"), _as_vector(self.hi, "hi")
        if lo.shape != hi.shape:
            raise InvalidInput("lo and hi must have the same length")
        if lo.size < 2:
            raise InvalidDimension("boxes need dimension >= 2")
        if not np.all(lo < hi):
            raise InvalidBody("box requires lo < hi componentwise")
        object.__setattr__(self, "lo", lo)
        object.__setattr__(self, "hi", hi)

    @classmethod
    def centered(cls, half_widths):
        hw = np.asarray(half_widths, dtype=float)
        return cls(-hw, hw)

    @property
    def dim(self) -> int:
        return self.lo.size

    @property
    def sides(self) -> np.ndarray:
        return self.hi - self.lo

    def vertices(self) -> np.ndarray:
        corners = itertools.product(*zip(self.lo, self.hi))
        return np.array(list(corners), dtype=float)

    def to_polytope(self) -> "PolytopeH":
        eye = np.eye(self.dim)
        return PolytopeH(np.vstack([eye, -eye]), np.concatenate([self.hi, -self.lo]))

    def __repr__(self):
        return f"Box(lo={self.lo.tolist()}, hi={self.hi.tolist()})"


class PolytopeH:
    """Bounded polytope ``{x : normals @ x <= offsets}`` in dimension 2 or 3.

    Duplicate halfspaces (same normal) are merged.  With ``prune=True`` the
    halfspaces that do not carry a facet are dropped silently; otherwise they
    raise :class:`DegenerateBody`.
    """

    def __init__(self, normals, offsets, *, prune=False, check_bounded=True):
        A = np.atleast_2d(np.asarray(normals, dtype=float))
        b = np.asarray(offsets, dtype=float).ravel()
        if A.shape[0] != b.size:
            raise InvalidInput("normals and offsets disagree in length")
        if A.shape[1] not in (2, 3):
            raise UnsupportedDimension(f"H-polytopes are supported in dimension 2 or 3, got {A.shape[1]}")
        if not (np.all(np.isfinite(A)) and np.all(np.isfinite(b))):
            raise InvalidInput("non-finite facet data")
        norms = np.linalg.norm(A, axis=1)
        if np.any(np.abs(norms - 1.0) > NORMAL_TOL):
            raise InvalidBody("facet normals must have unit length")
        A, b = _merge_parallel(A, b)
        self.normals = A
        self.offsets = b
        self._inradius = None
        if check_bounded:
            self._check_bounded()
        self._build(prune)

    @property
    def dim(self) -> int:
        return self.normals.shape[1]

    def __repr__(self):
        return f"PolytopeH(dim={self.dim}, facets={len(self.offsets)})"

    # -- construction helpers -------------------------------------------

    def _check_bounded(self):
        n = self.dim
        for k in range(n):
            for sign in (1.0, -1.0):
                c = np.zeros(n)
                c[k] = -sign
                res = linprog(c, A_ub=self.normals, b_ub=self.offsets, bounds=[(None, None)] * n, method="highs")
                if res.status == 2:
                    raise InvalidBody("facet system is infeasible")
                if res.status == 3:
                    raise InvalidBody("facet system is unbounded")
                if res.status != 0:
                    raise InvalidBody(f"bounding-box LP failed: {res.message}")

    def _build(self, prune):
        A, b, n = self.normals, self.offsets, self.dim
        scale = max(1.0, float(np.max(np.abs(b))))
        tol = VERTEX_TOL * scale
        while True:
            verts = _enumerate_vertices(A, b, tol)
            if len(verts) <= n:
                raise InvalidBody("polytope has empty interior")
            inc = np.abs(A @ verts.T - b[:, None]) <= tol
            good = inc.sum(axis=1) >= n
            if good.all():
                break
            if not prune:
                raise DegenerateBody(f"{int((~good).sum())} halfspace(s) do not carry a facet")
            A, b = A[good], b[good]
        self.normals, self.offsets = A, b
        self.vertices = verts
        self.incidence = inc
        if n == 2:
            self._build_2d()
        else:
            self._build_3d()

    def _build_2d(self):
        verts = self.vertices
        lengths, edges = [], []
        for i in range(len(self.offsets)):
            idx = np.flatnonzero(self.incidence[i])
            pts = verts[idx]
            # extreme pair along the edge direction
            d = np.array([-self.normals[i, 1], self.normals[i, 0]])
            s = pts @ d
            a, c = idx[np.argmin(s)], idx[np.argmax(s)]
            edges.append((a, c))
            lengths.append(np.linalg.norm(verts[c] - verts[a]))
        self.facet_measures = np.array(lengths)
        self.edges = np.array(edges)
        self.edge_lengths = np.array(lengths)
        self.edge_angles = None
        self.facet_cycles = [np.array(e) for e in edges]

    def _build_3d(self):
        verts, A = self.vertices, self.normals
        areas, cycles = [], []
        edge_map = {}
        for i in range(len(self.offsets)):
            idx = np.flatnonzero(self.incidence[i])
            pts = verts[idx]
            c = pts.mean(axis=0)
            u = _orthogonal_unit(A[i])
            w = np.cross(A[i], u)
            rel = pts - c
            order = idx[np.argsort(np.arctan2(rel @ w, rel @ u))]
            cycles.append(order)
            ring = verts[order] - c
            areas.append(0.5 * float(np.sum(np.cross(ring, np.roll(ring, -1, axis=0)) @ A[i])))
            for a, e in zip(order.tolist(), np.roll(order, -1).tolist()):
                edge_map.setdefault((min(a, e), max(a, e)), []).append(i)
        if any(a <= 0 for a in areas):
            raise DegenerateBody("facet with non-positive area")
        keys = sorted(edge_map)
        pairs = [edge_map[k] for k in keys]
        if any(len(f) != 2 for f in pairs):
            raise DegenerateBody("edge not shared by exactly two facets")
        edges = np.array(keys)
        fa, fb = np.array(pairs).T
        cosines = np.einsum("ij,ij->i", A[fa], A[fb])
        self.facet_measures = np.array(areas)
        self.facet_cycles = cycles
        self.edges = edges
        self.edge_lengths = np.linalg.norm(verts[edges[:, 0]] - verts[edges[:, 1]], axis=1)
        self.edge_angles = np.arccos(np.clip(cosines, -1.0, 1.0))

    # -- measures ---------------------------------------------------------

    @cached_property
    def volume(self) -> float:
        return float(self.offsets @ self.facet_measures) / self.dim

    @cached_property
    def perimeter(self) -> float:
        return float(self.facet_measures.sum())


def _orthogonal_unit(n):
    u = np.cross(n, [1.0, 0.0, 0.0]) if abs(n[0]) < 0.9 else np.cross(n, [0.0, 1.0, 0.0])
    return u / np.linalg.norm(u)


def _merge_parallel(A, b):
    same = np.max(np.abs(A[:, None, :] - A[None, :, :]), axis=-1) <= 1e-12
    first = np.argmax(same, axis=1)
    keep = np.unique(first)
    offsets = np.array([b[first == k].min() for k in keep])
    return A[keep], offsets


def _enumerate_vertices(A, b, tol):
    m, n = A.shape
    combos = np.array(list(itertools.combinations(range(m), n)))
    mats = A[combos]
    det = np.linalg.det(mats)
    ok = np.abs(det) > 1e-12
    mats, rhs = mats[ok], b[combos[ok]]
    pts = np.linalg.solve(mats, rhs[..., None])[..., 0]
    feasible = np.all(pts @ A.T - b <= tol, axis=1)
    return _dedupe(pts[feasible], tol * 10)


def _dedupe(pts, tol):
    if len(pts) == 0:
        return pts
    close = np.max(np.abs(pts[:, None, :] - pts[None, :, :]), axis=-1) <= tol
    # keep the first member of each cluster
    first = np.argmax(close, axis=1)
    return pts[np.unique(first)]


ConvexBody = Ball | Box | PolytopeH


# ---------------------------------------------------------------------------
# Quermassintegrals and Steiner polynomials
# ---------------------------------------------------------------------------


@dataclass(frozen=True)
class Quermassintegrals:
    dim: int
    w: tuple = field(default_factory=tuple)

    def __getitem__(self, j):
        return self.w[j]

    def __iter__(self):
        return iter(self.w)

    def __len__(self):
        return len(self.w)

    @property
    def volume(self):
        return self.w[0]

    @property
    def perimeter(self):
        return self.dim * self.w[1]

    def af_chain(self) -> np.ndarray:
        """Normalized roots ``(W_j / omega_n)^(1/(n-j))`` for ``j < n``."""
        n, om = self.dim, unit_ball_volume(self.dim)
        return np.array([(self.w[j] / om) ** (1.0 / (n - j)) for j in range(n)])


def _elementary_symmetric(values):
    e = np.zeros(len(values) + 1)
    e[0] = 1.0
    for x in values:
        e[1:] = e[1:] + x * e[:-1]
    return e


def quermassintegrals(K: ConvexBody) -> Quermassintegrals:
    n = K.dim
    om = unit_ball_volume(n)
    if isinstance(K, Ball):
        w = [om * K.radius ** (n - j) for j in range(n)] + [om]
    elif isinstance(K, Box):
        # V(K + dB) = sum_k e_{n-k}(sides) omega_k d^k  (omega_0 = 1)
        e = _elementary_symmetric(K.sides)
        w = [(unit_ball_volume(i) if i else 1.0) * e[n - i] / comb(n, i) for i in range(n)] + [om]
    elif isinstance(K, PolytopeH):
        if n == 2:
            w = [K.volume, K.perimeter / 2.0, pi]
        elif n == 3:
            mean_curv = 0.5 * float(K.edge_lengths @ K.edge_angles)
            w = [K.volume, K.perimeter / 3.0, mean_curv / 3.0, om]
        else:
            raise UnsupportedDimension("H-polytopes are supported in dimension 2 or 3")
    else:
        raise InvalidBody(f"not a convex body: {K!r}")
    return Quermassintegrals(n, tuple(float(x) for x in w))


def steiner_coefficients(K: ConvexBody):
    """Coefficient arrays (ascending powers of delta) of the offset perimeter and volume."""
    W = quermassintegrals(K)
    n = K.dim
    perim = np.array([n * comb(n - 1, i) * W[i + 1] for i in range(n)])
    vol = np.array([comb(n, i) * W[i] for i in range(n + 1)])
    return perim, vol


def steiner_outer_offset(K: ConvexBody, delta: float):
    """Perimeter and volume of ``{x : d(x, K) <= delta}``."""
    if not delta >= 0:
        raise InvalidDelta(f"offset distance must be nonnegative, got {delta}")
    perim, vol = steiner_coefficients(K)
    return (
        float(np.polynomial.polynomial.polyval(delta, perim)),
        float(np.polynomial.polynomial.polyval(delta, vol)),
    )


def volume(K: ConvexBody) -> float:
    return quermassintegrals(K)[0]


def perimeter(K: ConvexBody) -> float:
    return quermassintegrals(K).perimeter


def reference_ball(K: ConvexBody, rule: str = "perimeter") -> Ball:
    """Origin-centred ball matching the perimeter or ``W_{n-1}`` of ``K``."""
    n = K.dim
    om = unit_ball_volume(n)
    W = quermassintegrals(K)
    rule = rule.lower()
    if rule == "perimeter":
        radius = (W.perimeter / (n * om)) ** (1.0 / (n - 1))
    elif rule == "quermass":
        radius = W[n - 1] / om
    else:
        raise InvalidInput(f"unknown reference rule {rule!r}")
    return Ball.centered(radius, n)


# ---------------------------------------------------------------------------
# Inradius, erosion, distances
# ---------------------------------------------------------------------------


def inradius(K: ConvexBody) -> float:
    if isinstance(K, Ball):
        return K.radius
    if isinstance(K, Box):
        return 0.5 * float(K.sides.min())
    if isinstance(K, PolytopeH):
        if K._inradius is None:
            K._inradius = chebyshev_ball(K)[1]
        return K._inradius
    raise InvalidBody(f"not a convex body: {K!r}")


def chebyshev_ball(P: PolytopeH):
    """Centre and radius of the largest inscribed ball (linear program)."""
    n = P.dim
    c = np.zeros(n + 1)
    c[-1] = -1.0
    A = np.hstack([P.normals, np.ones((len(P.offsets), 1))])
    res = linprog(c, A_ub=A, b_ub=P.offsets, bounds=[(None, None)] * n + [(0, None)], method="highs")
    if res.status != 0:
        raise InvalidBody(f"inradius LP failed: {res.message}")
    return res.x[:n], float(res.x[-1])


def inner_parallel_body(K: ConvexBody, delta: float) -> ConvexBody:
    """The erosion ``{x in K : d(x, boundary) >= delta}``."""
    if not delta > 0:
        raise EmptyErosion(f"erosion distance must be positive, got {delta}")
    r = inradius(K)
    if delta >= r:
        raise EmptyErosion(f"erosion distance {delta} reaches the inradius {r}")
    if isinstance(K, Ball):
        return Ball(K.center, K.radius - delta)
    if isinstance(K, Box):
        return Box(K.lo + delta, K.hi - delta)
    # erosion of a bounded body is bounded
    return PolytopeH(K.normals, K.offsets - delta, prune=True, check_bounded=False)


def dilate(K: ConvexBody, delta: float) -> ConvexBody:
    """Outer offset for bodies whose offset stays in the family (balls only)."""
    if isinstance(K, Ball):
        return Ball(K.center, K.radius + delta)
    raise InvalidInput("only balls have a closed-form outer offset body")


def vertices(K: ConvexBody) -> np.ndarray:
    if isinstance(K, Box):
        return K.vertices()
    if isinstance(K, PolytopeH):
        return K.vertices
    raise InvalidInput("balls have no vertices")


def bounding_box(K: ConvexBody) -> Box:
    if isinstance(K, Ball):
        return Box(K.center - K.radius, K.center + K.radius)
    if isinstance(K, Box):
        return K
    v = K.vertices
    return Box(v.min(axis=0), v.max(axis=0))


def diameter(K: ConvexBody) -> float:
    if isinstance(K, Ball):
        return 2 * K.radius
    v = vertices(K)
    d = v[:, None, :] - v[None, :, :]
    return float(np.sqrt((d**2).sum(-1)).max())


def _points(K, x):
    X = np.asarray(x, dtype=float)
    single = X.ndim == 1
    X = np.atleast_2d(X)
    if X.shape[1] != K.dim:
        raise InvalidInput(f"points of dimension {X.shape[1]} do not match body dimension {K.dim}")
    return X, single


def depth(K: ConvexBody, x) -> np.ndarray | float:
    """Signed distance to the boundary, positive inside.

    Inside ``K`` this is the exact distance to the boundary; outside it is a
    lower bound (negative) that is only used as a membership test.
    """
    X, single = _points(K, x)
    if isinstance(K, Ball):
        out = K.radius - np.linalg.norm(X - K.center, axis=1)
    elif isinstance(K, Box):
        out = np.minimum(X - K.lo, K.hi - X).min(axis=1)
    else:
        out = (K.offsets[None, :] - X @ K.normals.T).min(axis=1)
    return float(out[0]) if single else out


def contains(K: ConvexBody, x, margin: float = 0.0):
    d = depth(K, x)
    return d >= margin


def distance_to_body(K: ConvexBody, x, chunk: int = 8192):
    """Euclidean distance from ``x`` (one point or an array of points) to ``K``."""
    X, single = _points(K, x)
    if isinstance(K, Ball):
        out = np.maximum(np.linalg.norm(X - K.center, axis=1) - K.radius, 0.0)
    elif isinstance(K, Box):
        out = np.linalg.norm(X - np.clip(X, K.lo, K.hi), axis=1)
    else:
        out = np.empty(len(X))
        for s in range(0, len(X), chunk):
            out[s : s + chunk] = _polytope_distance(K, X[s : s + chunk])
    return float(out[0]) if single else out


def _segment_distance(X, a, b):
    # X: (P, n); a, b: (E, n) -> (P, E)
    d = b - a
    L2 = np.einsum("ij,ij->i", d, d)
    rel = X[:, None, :] - a[None, :, :]
    t = np.clip(np.einsum("pen,en->pe", rel, d) / L2, 0.0, 1.0)
    diff = rel - t[..., None] * d[None, :, :]
    return np.sqrt(np.einsum("pen,pen->pe", diff, diff))


def _polytope_distance(P: PolytopeH, X):
    inside = np.all(X @ P.normals.T <= P.offsets, axis=1)
    verts = P.vertices
    a, b = verts[P.edges[:, 0]], verts[P.edges[:, 1]]
    best = _segment_distance(X, a, b).min(axis=1)
    if P.dim == 3:
        for i, cyc in enumerate(P.facet_cycles):
            n_i = P.normals[i]
            h = X @ n_i - P.offsets[i]
            proj = X - h[:, None] * n_i
            ring = verts[cyc]
            nxt = np.roll(ring, -1, axis=0)
            e = nxt - ring
            rel = proj[:, None, :] - ring[None, :, :]
            side = np.einsum("kn,pkn->pk", np.cross(n_i, e), rel)
            within = np.all(side >= -1e-12, axis=1) & (h > 0)
            best = np.where(within, np.minimum(best, h), best)
    best[inside] = 0.0
    return best
