"""Seeded hit-or-miss Monte-Carlo sampling.

Samples are drawn in fixed-size batches, each from its own child of
``SeedSequence(seed)``, so any batch can be regenerated independently and a
parallel evaluation reproduces the serial one exactly.
"""
from __future__ import annotations

import warnings

import numpy as np

from .errors import InsufficientSamples

BATCH_SIZE = 1 << 16
MIN_SAMPLES = 10_000
DEFAULT_SAMPLES = 1_000_000


def batch_sizes(samples):
    full, rest = divmod(int(samples), BATCH_SIZE)
    return [BATCH_SIZE] * full + ([rest] if rest else [])


def uniform_batches(bbox, samples, seed):
    """Yield arrays of points uniform in the axis box ``bbox``."""
    if samples < MIN_SAMPLES:
        raise InsufficientSamples(f"need at least {MIN_SAMPLES} samples, got {samples}")
    if seed is None:
        raise InsufficientSamples("an explicit seed is required")
    sizes = batch_sizes(samples)
    children = np.random.SeedSequence(int(seed)).spawn(len(sizes))
    for size, child in zip(sizes, children):
        rng = np.random.default_rng(child)
        yield bbox.lo + rng.random((size, bbox.dim)) * (bbox.hi - bbox.lo)


def box_volume(bbox):
    return float(np.prod(bbox.hi - bbox.lo))


def mc_region_volume(region, bbox, samples=DEFAULT_SAMPLES, seed=None):
    """Estimate ``|{x in bbox : region(x)}|`` with its standard error.

    ``region`` maps an ``(m, n)`` array of points to a boolean mask.
    """
    hits = 0
    for X in uniform_batches(bbox, samples, seed):
        hits += int(np.count_nonzero(region(X)))
    vol = box_volume(bbox)
    if hits == 0:
        warnings.warn("degenerate region: no Monte-Carlo sample landed inside", RuntimeWarning, stacklevel=2)
        return 0.0, 0.0
    p = hits / samples
    return vol * p, vol * np.sqrt(p * (1 - p) / samples)
