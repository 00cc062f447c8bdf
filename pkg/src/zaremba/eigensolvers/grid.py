"""Mixed Laplace eigenvalue and torsion on box-minus-box domains (``p = 2``).

Vertex-centred finite volumes on the lattice ``outer.lo + h Z^n``: each node
carries the share of the adjacent domain cells, each lattice edge the share
of the cells that contain it.  On flat faces this is the 5/7-point Laplacian
with mirror ghost values; Dirichlet nodes on the chosen boundary are removed.
"""
from __future__ import annotations

from dataclasses import dataclass
from functools import cached_property
from itertools import product

import numpy as np
import scipy.sparse as sp
from scipy.linalg import eigh
from scipy.sparse.linalg import cg, splu

from ..domains import OUTER, DomainSpec, _side
from ..errors import AlignmentError, InvalidField, InvalidInput, SolverFailure, UnsupportedDimension
from ..geometry import Box
from .radial import EigenResult, TorsionResult

GRID_TOL = 1e-8
RESIDUAL_TOL = 1e-6
CG_TOL = 1e-10
ALIGN_TOL = 1e-9


def _aligned(x, h):
    k = x / h
    return abs(k - round(k)) <= ALIGN_TOL * max(1.0, abs(k))


@dataclass(frozen=True, eq=False)
class GridProblem:
    outer: Box
    inner: Box | None
    dirichlet_on: str
    h: float

    def __post_init__(self):
        side = _side(self.dirichlet_on)
        object.__setattr__(self, "dirichlet_on", side)
        if not isinstance(self.outer, Box) or not (self.inner is None or isinstance(self.inner, Box)):
            raise InvalidInput("grid problems take boxes only")
        if self.outer.dim not in (2, 3):
            raise UnsupportedDimension("grid problems are 2-D or 3-D")
        if not self.h > 0:
            raise InvalidInput(f"spacing must be positive, got {self.h}")
        DomainSpec(self.outer, self.inner, side)  # containment and side checks
        lo = self.outer.lo
        coords = [self.outer.hi - lo]
        if self.inner is not None:
            coords += [self.inner.lo - lo, self.inner.hi - lo]
        for arr in coords:
            for x in arr:
                if not _aligned(float(x), self.h):
                    raise AlignmentError(f"spacing {self.h} does not divide box offset {float(x):.12g}")

    @property
    def dim(self) -> int:
        return self.outer.dim

    @classmethod
    def from_domain(cls, spec: DomainSpec, h):
        return cls(spec.outer, spec.inner, spec.dirichlet_on, h)

    @cached_property
    def mesh(self) -> "GridMesh":
        return GridMesh(self)


class GridMesh:
    """Lattice, active cells, lumped mass and stiffness restricted to free nodes."""

    def __init__(self, prob: GridProblem):
        self.prob = prob
        h, d = prob.h, prob.dim
        lo = prob.outer.lo
        cells = np.rint((prob.outer.hi - lo) / h).astype(int)
        self.shape = tuple(cells + 1)
        active = np.ones(tuple(cells), dtype=bool)
        if prob.inner is not None:
            a = np.rint((prob.inner.lo - lo) / h).astype(int)
            b = np.rint((prob.inner.hi - lo) / h).astype(int)
            active[tuple(slice(i, j) for i, j in zip(a, b))] = False
        self.active = active

        # nodal mass: h^d / 2^d per adjacent active cell
        count = np.zeros(self.shape)
        for off in product((0, 1), repeat=d):
            count[tuple(slice(o, o + c) for o, c in zip(off, cells))] += active
        mass = count * h**d / 2**d

        dirichlet = np.zeros(self.shape, dtype=bool)
        if prob.dirichlet_on == OUTER:
            for k in range(d):
                idx = [slice(None)] * d
                idx[k] = 0
                dirichlet[tuple(idx)] = True
                idx[k] = -1
                dirichlet[tuple(idx)] = True
        else:
            a = np.rint((prob.inner.lo - lo) / h).astype(int)
            b = np.rint((prob.inner.hi - lo) / h).astype(int)
            dirichlet[tuple(slice(i, j + 1) for i, j in zip(a, b))] = True
        free = (count > 0) & ~dirichlet
        number = -np.ones(self.shape, dtype=np.int64)
        number[free] = np.arange(int(free.sum()))
        self.free, self.number = free, number
        self.M = mass[free]
        self.coords = lo + h * np.argwhere(free)

        rows, cols, vals = [], [], []
        diag = np.zeros(len(self.M))
        for k in range(d):
            # active cells containing each k-edge: shift over the other axes
            ec = np.zeros(tuple(c if j == k else c + 1 for j, c in enumerate(cells)))
            others = [j for j in range(d) if j != k]
            for off in product((0, 1), repeat=d - 1):
                sl = [slice(None)] * d
                for j, o in zip(others, off):
                    sl[j] = slice(o, o + cells[j])
                ec[tuple(sl)] += active
            w = ec * h ** (d - 2) / 2 ** (d - 1)
            a_sl = [slice(None)] * d
            b_sl = [slice(None)] * d
            a_sl[k] = slice(0, -1)
            b_sl[k] = slice(1, None)
            na, nb = number[tuple(a_sl)], number[tuple(b_sl)]
            fa, fb = na >= 0, nb >= 0
            # edge contributions to diagonals, including edges to Dirichlet nodes
            np.add.at(diag, na[fa & (w > 0)], w[fa & (w > 0)])
            np.add.at(diag, nb[fb & (w > 0)], w[fb & (w > 0)])
            both = fa & fb & (w > 0)
            rows += [na[both], nb[both]]
            cols += [nb[both], na[both]]
            vals += [-w[both], -w[both]]
        n = len(self.M)
        off = sp.coo_matrix((np.concatenate(vals), (np.concatenate(rows), np.concatenate(cols))), shape=(n, n))
        self.K = (off + sp.diags(diag)).tocsc()

    @property
    def size(self) -> int:
        return len(self.M)

    def field(self, u) -> np.ndarray:
        """Full lattice array; Dirichlet nodes and the hole read 0."""
        out = np.zeros(self.shape)
        out[self.free] = u
        return out

    def energy(self, u) -> float:
        return float(u @ (self.K @ u))

    def mass(self, u, q=2.0) -> float:
        return float(np.sum(self.M * np.abs(u) ** q))


class _Solver:
    def __init__(self, K, method):
        self.method = method
        if method == "direct":
            self.lu = splu(K.tocsc(), permc_spec="MMD_AT_PLUS_A", options={"SymmetricMode": True})
        elif method == "cg":
            import pyamg

            self.K = K.tocsr()
            ml = pyamg.smoothed_aggregation_solver(self.K, symmetry="symmetric")
            self.P = ml.aspreconditioner(cycle="V")
        else:
            raise InvalidInput(f"unknown linear solver {method!r}")

    def __call__(self, B):
        if self.method == "direct":
            return self.lu.solve(B)
        cols = []
        for b in np.atleast_2d(B.T):
            x, info = cg(self.K, b, rtol=CG_TOL, atol=0.0, M=self.P, maxiter=2000)
            if info:
                raise SolverFailure("conjugate gradients did not converge", {"info": info})
            cols.append(x)
        X = np.array(cols).T
        return X if B.ndim == 2 else X[:, 0]


def _eig_residual(mesh, tau, u):
    r = mesh.K @ u - tau * mesh.M * u
    return float(np.linalg.norm(r) / np.linalg.norm(tau * mesh.M * u))


def solve_grid_eigen(
    prob: GridProblem, tol=GRID_TOL, residual_tol=RESIDUAL_TOL, block=8, max_iter=500, method="direct", seed=0
) -> EigenResult:
    """Smallest eigenpair of ``K u = tau M u`` by inverse subspace iteration.

    A block of ``block`` vectors is pushed through ``K^{-1} M`` and
    Rayleigh-Ritz projected each sweep; stops when the lowest Ritz value
    changes by less than ``tol`` (relative) and the eigen-residual is below
    ``residual_tol``.  ``u`` is M-normalized and positive.
    """
    mesh = prob.mesh
    n = mesh.size
    block = max(1, min(block, n))
    solve = _Solver(mesh.K, method)
    M = mesh.M
    rng = np.random.default_rng(seed)
    X = np.column_stack([np.ones(n), rng.random((n, block - 1))])
    tau = np.inf
    history = []
    for it in range(1, max_iter + 1):
        Y = solve(M[:, None] * X)
        Ka = Y.T @ (mesh.K @ Y)
        Ma = Y.T @ (M[:, None] * Y)
        vals, vecs = eigh(0.5 * (Ka + Ka.T), 0.5 * (Ma + Ma.T))
        X = Y @ vecs
        X /= np.sqrt(np.sum(M[:, None] * X * X, axis=0))
        new = float(vals[0])
        history.append(new)
        done = abs(new - tau) <= tol * abs(new) and _eig_residual(mesh, new, X[:, 0]) <= residual_tol
        tau = new
        if done:
            break
    else:
        raise SolverFailure(f"subspace iteration did not converge in {max_iter} sweeps", {"history": history[-20:]})
    u = X[:, 0]
    u = u if u.sum() > 0 else -u
    if not np.all(u > 0):
        raise SolverFailure("eigenvector is not positive at free nodes", {"min": float(u.min())})
    residual = _eig_residual(mesh, tau, u)
    return EigenResult(tau, u, it, residual, mesh.coords, {"history": history[-20:], "unknowns": n})


def solve_grid_torsion(prob: GridProblem, method="direct") -> TorsionResult:
    """``K u = M 1``; returns ``T = (int u)^2 / int |grad u|^2`` and ``int u``."""
    mesh = prob.mesh
    u = _Solver(mesh.K, method)(mesh.M.copy())
    integral = float(mesh.M @ u)
    T = integral**2 / mesh.energy(u)
    return TorsionResult(T, u, mesh.coords, integral)


def rayleigh_quotient_grid(u, mesh: GridMesh, p=2.0, q=2.0) -> float:
    if p != 2:
        raise InvalidInput("grid quotients are implemented for p = 2 only")
    u = np.asarray(u, dtype=float)
    den = mesh.mass(u, q)
    if not den > 0:
        raise InvalidField("field vanishes identically")
    return mesh.energy(u) / den ** (2.0 / q)


@dataclass
class RichardsonCheck:
    coarse: float
    fine: float
    extrapolated: float
    order: float
    observed_order: float | None = None

    @property
    def correction(self) -> float:
        return self.fine - self.extrapolated


def richardson(coarse, fine, order=2.0, finest=None) -> RichardsonCheck:
    """Extrapolate two grid values with ratio 2; with a third (``finest``) the order is estimated."""
    observed = None
    if finest is not None:
        ratio = (coarse - fine) / (fine - finest)
        observed = float(np.log2(ratio)) if ratio > 0 else float("nan")
    ext = fine + (fine - coarse) / (2**order - 1)
    return RichardsonCheck(float(coarse), float(fine), float(ext), float(order), observed)


__all__ = [
    "GridMesh",
    "GridProblem",
    "RichardsonCheck",
    "rayleigh_quotient_grid",
    "richardson",
    "solve_grid_eigen",
    "solve_grid_torsion",
]
