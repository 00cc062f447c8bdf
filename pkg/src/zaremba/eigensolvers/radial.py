"""Radial first eigenvalue and torsion of the mixed problem on concentric annuli.

For ``-Delta_p u = tau |u|^{q-2} u`` on ``B_R \\ closure(B_r)`` the positive
minimizer is radial, so the Rayleigh quotient reduces to

    tau = sigma_n^{1-p/q} int |f'|^p rho^{n-1} / (int |f|^q rho^{n-1})^{p/q}

with ``f = 0`` on the Dirichlet sphere.  The discrete quotient uses
piecewise-linear ``f`` on a uniform mesh; the energy is exact per cell up to
the cell-averaged weight and the mass uses the trapezoid rule.
"""
from __future__ import annotations

from dataclasses import dataclass, field

import numpy as np
from scipy.integrate import quad
from scipy.linalg import eigh_tridiagonal

from ..domains import INNER, OUTER, Annulus, _side
from ..errors import InvalidField, InvalidInput, SolverFailure
from ..geometry import unit_ball_volume

RADIAL_TOL = 1e-10
MAX_ITER = 200_000
MIN_NODES = 64


def phi(x, p):
    return np.abs(x) ** (p - 2) * x


def phi_inv(y, p):
    return np.sign(y) * np.abs(y) ** (1.0 / (p - 1))


@dataclass(frozen=True)
class RadialMesh:
    """Uniform radial mesh with its quadrature weights."""

    dim: int
    r: float
    R: float
    nodes: int

    @property
    def rho(self) -> np.ndarray:
        return np.linspace(self.r, self.R, self.nodes)

    @property
    def step(self) -> float:
        return (self.R - self.r) / (self.nodes - 1)

    @property
    def sigma(self) -> float:
        return self.dim * unit_ball_volume(self.dim)

    @property
    def cell_weights(self) -> np.ndarray:
        w = self.rho ** (self.dim - 1)
        return 0.5 * (w[1:] + w[:-1])

    @property
    def node_weights(self) -> np.ndarray:
        c = self.step * self.rho ** (self.dim - 1)
        c[0] *= 0.5
        c[-1] *= 0.5
        return c

    def energy(self, f, p) -> float:
        D = np.diff(f) / self.step
        return self.sigma * self.step * float(np.sum(self.cell_weights * np.abs(D) ** p))

    def mass(self, f, q) -> float:
        return self.sigma * float(np.sum(self.node_weights * np.abs(f) ** q))


@dataclass(frozen=True)
class RadialProblem:
    dim: int
    p: float
    q: float
    r: float
    R: float
    dirichlet_on: str = OUTER
    mesh_nodes: int = 512

    def __post_init__(self):
        object.__setattr__(self, "dirichlet_on", _side(self.dirichlet_on))
        if int(self.dim) != self.dim or self.dim < 2:
            raise InvalidInput(f"dimension must be an integer >= 2, got {self.dim}")
        if not self.p > 1:
            raise InvalidInput(f"p must exceed 1, got {self.p}")
        if not 1 <= self.q <= self.p:
            raise InvalidInput(f"q must lie in [1, p] (minimizers need not be radial for q > p), got q={self.q}")
        if not 0 < self.r < self.R:
            raise InvalidInput(f"need 0 < r < R, got r={self.r}, R={self.R}")
        if self.mesh_nodes < MIN_NODES:
            raise InvalidInput(f"mesh_nodes must be at least {MIN_NODES}")

    @classmethod
    def from_annulus(cls, annulus: Annulus, p=2.0, q=2.0, mesh_nodes=512):
        return cls(annulus.dim, p, q, annulus.r, annulus.R, annulus.dirichlet_on, mesh_nodes)

    @property
    def mesh(self) -> RadialMesh:
        return RadialMesh(self.dim, self.r, self.R, self.mesh_nodes)

    def scaled(self, c):
        return RadialProblem(self.dim, self.p, self.q, c * self.r, c * self.R, self.dirichlet_on, self.mesh_nodes)

    @property
    def scaling_exponent(self) -> float:
        return self.dim - self.p - self.dim * self.p / self.q


@dataclass
class EigenResult:
    tau: float
    u: np.ndarray
    iterations: int
    residual: float
    coords: np.ndarray | None = None
    diagnostics: dict = field(default_factory=dict)


@dataclass
class TorsionResult:
    T: float
    u: np.ndarray
    coords: np.ndarray | None = None
    integral_u: float = float("nan")


def rayleigh_quotient_radial(f, mesh: RadialMesh, p, q) -> float:
    f = np.asarray(f, dtype=float)
    den = mesh.mass(f, q)
    if not den > 0:
        raise InvalidField("field vanishes identically")
    return mesh.energy(f, p) / den ** (p / q)


def _p_poisson(mesh, b, p, dirichlet_on):
    """Exact solution of the discrete ``-(rho^{n-1} phi_p(f'))' = b`` with one Dirichlet end.

    The Neumann end fixes the flux, so cell fluxes follow by telescoping and the
    nodal values by integrating from the Dirichlet node.
    """
    a = mesh.cell_weights
    h = mesh.step
    if dirichlet_on == INNER:
        flux = np.cumsum(b[::-1])[::-1][1:]
        D = phi_inv(flux / a, p)
        return np.r_[0.0, np.cumsum(h * D)]
    flux = -np.cumsum(b)[:-1]
    D = phi_inv(flux / a, p)
    return np.r_[-np.cumsum((h * D)[::-1])[::-1], 0.0]


def _normalize(f, mesh, q):
    return f / mesh.mass(f, q) ** (1.0 / q)


def _residual(f, mesh, p, q, tau, dirichlet_on):
    a = mesh.cell_weights
    F = a * phi(np.diff(f) / mesh.step, p)
    div = np.r_[0.0, F] - np.r_[F, 0.0]
    free = slice(1, None) if dirichlet_on == INNER else slice(0, -1)
    # stationarity of E / N^{p/q} at N = 1: sigma * div = tau * sigma * c f^{q-1}
    rhs = tau * mesh.node_weights * np.abs(f) ** (q - 1)
    return float(np.max(np.abs(div[free] - rhs[free])) / max(np.max(np.abs(rhs[free])), 1e-300))


def solve_radial_eigen(prob: RadialProblem, tol=RADIAL_TOL, max_iter=MAX_ITER, stall=50) -> EigenResult:
    """First eigenpair of the radial problem by nonlinear inverse iteration.

    Each step solves ``-Delta_p w = c |f|^{q-2} f`` exactly and renormalizes
    ``int |w|^q = 1``.  Converged once the quotient changes by less than ``tol``
    (relative) for ``stall`` consecutive steps.
    """
    mesh = prob.mesh
    p, q = prob.p, prob.q
    rho = mesh.rho
    # positive affine start vanishing on the Dirichlet sphere
    f = (rho - prob.r) if prob.dirichlet_on == INNER else (prob.R - rho)
    f = _normalize(f, mesh, q)
    tau = rayleigh_quotient_radial(f, mesh, p, q)
    history = [tau]
    quiet = 0
    for it in range(1, max_iter + 1):
        b = mesh.node_weights * np.abs(f) ** (q - 1)
        w = _p_poisson(mesh, b, p, prob.dirichlet_on)
        f = _normalize(w, mesh, q)
        new = rayleigh_quotient_radial(f, mesh, p, q)
        change = abs(new - tau) / new
        tau = new
        if it <= 1000 or it % 100 == 0:
            history.append(tau)
        quiet = quiet + 1 if change < tol else 0
        if quiet >= stall:
            break
    else:
        raise SolverFailure(
            f"radial iteration did not converge in {max_iter} steps",
            {"history": history[-20:], "last_change": change},
        )
    free = f[1:] if prob.dirichlet_on == INNER else f[:-1]
    if not np.all(free > 0):
        raise SolverFailure("eigenfunction is not positive at interior nodes", {"min": float(free.min())})
    res = _residual(f, mesh, p, q, tau, prob.dirichlet_on)
    return EigenResult(tau, f, it, res, rho, {"history": history[-20:]})


def radial_fd_oracle(prob: RadialProblem) -> float:
    """Smallest eigenvalue of the same discretization for ``p = q = 2`` as a tridiagonal problem."""
    if prob.p != 2 or prob.q != 2:
        raise InvalidInput("the linear oracle needs p = q = 2")
    mesh = prob.mesh
    a = mesh.cell_weights / mesh.step
    diag = np.r_[a, 0.0] + np.r_[0.0, a]
    off = -a
    c = mesh.node_weights
    if prob.dirichlet_on == INNER:
        diag, off, c = diag[1:], off[1:], c[1:]
    else:
        diag, off, c = diag[:-1], off[:-1], c[:-1]
    s = 1.0 / np.sqrt(c)
    d = diag * s * s
    e = off * s[1:] * s[:-1]
    w = eigh_tridiagonal(d, e, eigvals_only=True, select="i", select_range=(0, 0))
    return float(w[0])


def check_monotone_radial(res: EigenResult, dirichlet_on, tol=1e-10, neumann_band=0.05) -> bool:
    """Strict radial monotonicity: decreasing for outer Dirichlet, increasing for inner.

    Every nodal step must have the required sign; within ``neumann_band`` of the
    Neumann sphere, where the slope vanishes, steps down to ``-tol * max|u|``
    are tolerated.
    """
    side = _side(dirichlet_on)
    u = np.asarray(res.u, dtype=float)
    steps = np.diff(u) if side == INNER else -np.diff(u)[::-1]
    # steps now run from the Dirichlet sphere towards the Neumann sphere
    scale = max(float(np.max(np.abs(u))), 1e-300)
    band = max(1, int(round(neumann_band * len(steps))))
    return bool(np.all(steps[:-band] > 0) and np.all(steps[-band:] > -tol * scale))


def solve_radial_torsion(prob: RadialProblem) -> TorsionResult:
    """Torsion ``-Delta_p u = 1`` from its first integral ``rho^{n-1} phi_p(u') = C - rho^n / n``.

    ``C`` is fixed by the Neumann sphere.  Returns ``T = (int u)^{p-1}``, which
    equals ``(int u)^p / int |grad u|^p`` at the solution.
    """
    n, p = prob.dim, prob.p
    r, R = prob.r, prob.R
    C = (R**n if prob.dirichlet_on == INNER else r**n) / n

    def du(x):
        return float(phi_inv((C - x**n / n) / x ** (n - 1), p))

    sigma = n * unit_ball_volume(n)
    # int_Omega u = sigma int u' (C - rho^n/n) d rho after integrating by parts
    total = sigma * quad(lambda x: du(x) * (C - x**n / n), r, R, epsabs=0, epsrel=1e-13, limit=200)[0]
    rho = prob.mesh.rho
    inc = np.array([quad(du, a, b, epsabs=0, epsrel=1e-13)[0] for a, b in zip(rho[:-1], rho[1:])])
    if prob.dirichlet_on == INNER:
        u = np.r_[0.0, np.cumsum(inc)]
    else:
        u = np.r_[-np.cumsum(inc[::-1])[::-1], 0.0]
    return TorsionResult(total ** (p - 1), u, rho, total)


__all__ = [
    "EigenResult",
    "RadialMesh",
    "RadialProblem",
    "TorsionResult",
    "check_monotone_radial",
    "radial_fd_oracle",
    "rayleigh_quotient_radial",
    "solve_radial_eigen",
    "solve_radial_torsion",
]
