"""Fixed-resolution spectral fit by exhaustive block-ordering search.

At resolution ``R`` the model spectrum consists of one stage value per degree
``ell <= R``, each repeated ``d_ell`` times, plus zero with multiplicity
``n - sum(d_ell)``.  Matching such a staircase to the sorted observed spectrum
in least squares reduces to choosing an ordering of the ``R + 2`` blocks
(degree blocks plus the zero block) over contiguous runs of the sorted
eigenvalues; the optimal stage value of each degree block is the mean of its
run.  The search below scores every ordering and keeps the first minimum.
"""

from __future__ import annotations

import itertools
from dataclasses import dataclass

import numpy as np

from .errors import DomainError, OrderingLimitError
from .spaces import HarmonicBasis
from .spectral import Spectrum

__all__ = [
    "ZERO_BLOCK",
    "enumerate_orderings",
    "score_ordering",
    "SpectrumEstimate",
    "fit_resolution",
    "estimate_vector",
]

ZERO_BLOCK = -1  # ordering symbol for the zero block
DEFAULT_RESOLUTION_CAP = 7  # (R + 2)! beyond this is impractical


def enumerate_orderings(r: int, cap: int = DEFAULT_RESOLUTION_CAP):
    """All (r + 2)! orderings of the blocks {zero, degree 0, ..., degree r},
    in deterministic (lexicographic) order."""
    if r < 0:
        raise DomainError("resolution must be nonnegative")
    if r > cap:
        raise OrderingLimitError(
            f"resolution {r} exceeds the enumeration cap {cap} ((r+2)! orderings)"
        )
    return list(itertools.permutations((ZERO_BLOCK, *range(r + 1))))


def _values(spectrum) -> np.ndarray:
    if isinstance(spectrum, Spectrum):
        return spectrum.values
    v = np.asarray(spectrum, dtype=float).ravel()
    return np.sort(v)[::-1]


def score_ordering(spectrum, ordering, dims):
    """Stage values and squared-deviation score of one block ordering.

    The sorted eigenvalues are cut into consecutive runs with lengths given by
    the ordering; a degree block contributes the run's squared deviation from
    its mean (the fitted stage), the zero block contributes the run's raw sum
    of squares.
    """
    v = _values(spectrum)
    n = v.size
    r = len(ordering) - 2
    dims = tuple(int(d) for d in dims[: r + 1])
    total = sum(dims)
    if total > n:
        raise DomainError(f"need n >= {total} eigenvalues, got {n}")
    lengths = {sym: (dims[sym] if sym != ZERO_BLOCK else n - total) for sym in ordering}
    if sum(lengths.values()) != n:
        raise AssertionError("block lengths do not partition the spectrum")
    s1 = np.concatenate(([0.0], np.cumsum(v)))
    s2 = np.concatenate(([0.0], np.cumsum(v * v)))
    stages = np.zeros(r + 1)
    score = 0.0
    pos = 0
    for sym in ordering:
        ln = lengths[sym]
        a, b = pos, pos + ln
        run_sum = s1[b] - s1[a]
        run_sq = s2[b] - s2[a]
        if sym == ZERO_BLOCK:
            score += run_sq
        else:
            stages[sym] = run_sum / ln
            score += run_sq - run_sum * run_sum / ln
        pos = b
    return stages, max(float(score), 0.0)


@dataclass(frozen=True)
class SpectrumEstimate:
    """Best staircase fit at one resolution."""

    r: int
    stage_values: np.ndarray
    ordering: tuple[int, ...]
    score: float
    n: int


def fit_resolution(
    spectrum, basis: HarmonicBasis, r: int, cap: int = DEFAULT_RESOLUTION_CAP
) -> SpectrumEstimate:
    """Minimize the staircase score over every block ordering at resolution
    ``r``; ties go to the first ordering in enumeration order."""
    if r > basis.max_degree:
        raise DomainError(f"resolution {r} exceeds basis max_degree {basis.max_degree}")
    v = _values(spectrum)
    n = v.size
    if n < basis.cum_dims[r]:
        raise DomainError(
            f"n = {n} is below the model dimension {basis.cum_dims[r]} at resolution {r}"
        )
    best = None
    for idx, ordering in enumerate(enumerate_orderings(r, cap=cap)):
        stages, score = score_ordering(v, ordering, basis.dims)
        if best is None or score < best[0]:
            best = (score, idx, stages, ordering)
    score, _, stages, ordering = best
    return SpectrumEstimate(r=r, stage_values=stages, ordering=ordering, score=score, n=n)


def estimate_vector(est: SpectrumEstimate, dims) -> np.ndarray:
    """Expand stage values with their multiplicities into the model spectrum
    vector (length cum_dims[r])."""
    reps = np.asarray(dims[: est.r + 1], dtype=int)
    return np.repeat(np.asarray(est.stage_values, dtype=float), reps)
