"""Rayleigh quotients of web functions transplanted from the comparison annulus.

The annulus eigenprofile, reparametrized by the annulus volume ``V`` (outer
Dirichlet) or by ``T`` (inner Dirichlet), is composed with the matching
profile of the domain.  The result is admissible on the domain, so its
quotient bounds the domain's first eigenvalue from above.
"""
from __future__ import annotations

import numpy as np

from ..domains import INNER, OUTER, ParallelProfile
from ..errors import InvalidPairing
from .radial import EigenResult, RadialMesh

QUAD_POINTS = 4097


def _annulus_tables(profile: ParallelProfile, res: EigenResult):
    ann = profile.annulus
    rho = np.asarray(res.coords, dtype=float)
    f = np.asarray(res.u, dtype=float)
    if rho is None or len(rho) != len(f):
        raise InvalidPairing("eigen result carries no radial table")
    scale = max(ann.R, 1.0)
    if abs(rho[0] - ann.r) > 1e-9 * scale or abs(rho[-1] - ann.R) > 1e-9 * scale:
        raise InvalidPairing(f"eigen result lives on [{rho[0]}, {rho[-1]}], profile annulus on [{ann.r}, {ann.R}]")
    zero = f[0] if ann.dirichlet_on == INNER else f[-1]
    if abs(zero) > 1e-12 * np.max(np.abs(f)):
        raise InvalidPairing("eigen result does not vanish on the profile's Dirichlet sphere")
    return ann, rho, f


def _profile_of(ann, rho, f, delta):
    """Eigenprofile and its slope as functions of the distance to the Dirichlet sphere."""
    x = ann.radius_at(delta)
    val = np.interp(x, rho, f)
    slope = np.diff(f) / np.diff(rho)
    cell = np.clip(np.searchsorted(rho, x, side="right") - 1, 0, len(slope) - 1)
    return val, np.abs(slope[cell])


def web_function_terms(profile: ParallelProfile, res: EigenResult, p, q):
    """``(int |grad u|^p, int |u|^q)`` for the transplanted web function ``u``."""
    ann, rho, f = _annulus_tables(profile, res)
    if profile.side == INNER:
        # |grad u| = psi'(t(rho_2)) s^{1-p'}; the coarea formula returns the annulus energy
        mesh = RadialMesh(ann.dim, ann.r, ann.R, len(rho))
        num = mesh.energy(f, p)
        d = profile.samples_rho
        alpha = np.minimum(profile.t_at(d), profile.T_sharp)
        val, _ = _profile_of(ann, rho, f, ann.T_inv(alpha, profile.p))
        den = profile.bbox_volume / profile.n_samples * float(np.sum(np.abs(val) ** q))
        return num, den
    if profile.side != OUTER:
        raise InvalidPairing(f"unknown profile side {profile.side!r}")
    top = float(profile.v[-1])
    alpha = np.linspace(0.0, top, QUAD_POINTS)
    da = ann.V_inv(alpha)
    val, slope = _profile_of(ann, rho, f, da)
    h = profile.s_at(profile.v_inv(alpha))
    # psi'(alpha) = phi'(V^{-1} alpha) / S(V^{-1} alpha)
    num = float(np.trapezoid(slope**p * (h / ann.S(da)) ** p, alpha))
    den = float(np.trapezoid(np.abs(val) ** q, alpha))
    return num, den


def web_function_bound(profile: ParallelProfile, annulus_result: EigenResult, p, q) -> float:
    """Rayleigh quotient of the web function built from ``annulus_result`` on the profiled domain."""
    num, den = web_function_terms(profile, annulus_result, p, q)
    return num / den ** (p / q)


__all__ = ["web_function_bound", "web_function_terms"]
