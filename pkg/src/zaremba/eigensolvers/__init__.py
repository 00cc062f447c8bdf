"""First eigenvalues and torsional rigidity of the mixed problem."""
import numpy as np

from ..errors import InvalidInput
from .grid import GridMesh, GridProblem, rayleigh_quotient_grid, richardson, solve_grid_eigen, solve_grid_torsion
from .radial import (
    EigenResult,
    RadialMesh,
    RadialProblem,
    TorsionResult,
    check_monotone_radial,
    radial_fd_oracle,
    rayleigh_quotient_radial,
    solve_radial_eigen,
    solve_radial_torsion,
)
from .web import web_function_bound, web_function_terms


def solve_torsion(prob, **kw) -> TorsionResult:
    if isinstance(prob, RadialProblem):
        return solve_radial_torsion(prob)
    if isinstance(prob, GridProblem):
        return solve_grid_torsion(prob, **kw)
    raise InvalidInput(f"no torsion solver for {type(prob).__name__}")


def rayleigh_quotient(u, mesh, p=2.0, q=2.0) -> float:
    """``int |grad u|^p / (int |u|^q)^{p/q}`` for a radial table or a grid field."""
    if isinstance(mesh, RadialMesh):
        return rayleigh_quotient_radial(np.asarray(u, dtype=float), mesh, p, q)
    if isinstance(mesh, GridMesh):
        return rayleigh_quotient_grid(u, mesh, p, q)
    raise InvalidInput(f"unsupported mesh {type(mesh).__name__}")


__all__ = [
    "EigenResult",
    "GridMesh",
    "GridProblem",
    "RadialMesh",
    "RadialProblem",
    "TorsionResult",
    "check_monotone_radial",
    "radial_fd_oracle",
    "rayleigh_quotient",
    "richardson",
    "solve_grid_eigen",
    "solve_grid_torsion",
    "solve_radial_eigen",
    "solve_radial_torsion",
    "solve_torsion",
    "web_function_bound",
    "web_function_terms",
]
