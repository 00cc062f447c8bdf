"""Reverse Faber-Krahn inequalities for mixed Dirichlet-Neumann problems on doubly connected domains.

Subpackages and modules:

- :mod:`zaremba.geometry`: convex bodies, quermassintegrals, parallel bodies, distances
- :mod:`zaremba.nagy`: checkers for Alexandrov-Fenchel and Nagy-type inequalities
- :mod:`zaremba.domains`: domains, comparison annuli and parallel-set profiles
- :mod:`zaremba.eigensolvers`: radial and grid eigen/torsion solvers, web-function bounds
- :mod:`zaremba.experiments` / :mod:`zaremba.cli`: configured experiments and reports
"""
from .domains import Annulus, DomainSpec, build_comparison_annulus, check_profile_lemmas, profile_inner, profile_outer
from .errors import ZarembaError
from .geometry import Ball, Box, PolytopeH, quermassintegrals, steiner_outer_offset
from .mc import mc_region_volume

__all__ = [
    "Annulus",
    "Ball",
    "Box",
    "DomainSpec",
    "PolytopeH",
    "ZarembaError",
    "build_comparison_annulus",
    "check_profile_lemmas",
    "mc_region_volume",
    "profile_inner",
    "profile_outer",
    "quermassintegrals",
    "steiner_outer_offset",
]
