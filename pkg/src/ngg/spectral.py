"""Dense symmetric eigenvalues and the rearrangement distance between spectra."""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .errors import DomainError, SolverError

__all__ = ["Spectrum", "eigenvalues_symmetric", "operator_norm", "delta2"]

_SYM_TOL = 1e-10
_RESIDUAL_FACTOR = 1e-9


@dataclass(frozen=True)
class Spectrum:
    """All eigenvalues of one symmetric matrix, sorted descending."""

    values: np.ndarray
    source_dim: int
    residual_bound: float


def eigenvalues_symmetric(matrix) -> Spectrum:
    """Full spectrum of a symmetric matrix, eigenvalues only.

    Delegates to LAPACK through numpy; the residual bound recorded is the
    backward-stability contract 1e-9 * n * max|M_ij|.
    """
    m = np.asarray(matrix, dtype=float)
    if m.ndim != 2 or m.shape[0] != m.shape[1]:
        raise DomainError("matrix must be square")
    scale = float(np.max(np.abs(m))) if m.size else 0.0
    if float(np.max(np.abs(m - m.T), initial=0.0)) > _SYM_TOL * max(scale, 1e-300):
        raise DomainError("matrix is not symmetric")
    try:
        vals = np.linalg.eigvalsh(m)
    except np.linalg.LinAlgError as exc:  # pragma: no cover - LAPACK failure
        raise SolverError(f"eigenvalue computation failed: {exc}") from exc
    return Spectrum(
        values=vals[::-1].copy(),
        source_dim=m.shape[0],
        residual_bound=_RESIDUAL_FACTOR * m.shape[0] * scale,
    )


def operator_norm(matrix) -> float:
    """Largest absolute eigenvalue (= spectral norm for symmetric input)."""
    vals = eigenvalues_symmetric(matrix).values
    if vals.size == 0:
        return 0.0
    return float(max(abs(vals[0]), abs(vals[-1])))


def delta2(x, y) -> float:
    """l2 rearrangement distance between two real multisets.

    Both inputs are implicitly padded with zeros; by the Hardy-Littlewood
    rearrangement inequality the optimal matching aligns the nonnegative
    entries downward from the largest and the negative entries upward from
    the smallest, surplus entries on either side matching zero.  Exact zeros
    count as nonnegative (either convention gives the same distance).
    """
    x = np.asarray(x, dtype=float).ravel()
    y = np.asarray(y, dtype=float).ravel()
    xp = np.sort(x[x >= 0])[::-1]
    yp = np.sort(y[y >= 0])[::-1]
    xn = np.sort(x[x < 0])  # most negative first
    yn = np.sort(y[y < 0])
    kp = max(xp.size, yp.size)
    kn = max(xn.size, yn.size)
    xp = np.pad(xp, (0, kp - xp.size))
    yp = np.pad(yp, (0, kp - yp.size))
    xn = np.pad(xn, (0, kn - xn.size))
    yn = np.pad(yn, (0, kn - yn.size))
    return float(np.sqrt(np.sum((xp - yp) ** 2) + np.sum((xn - yn) ** 2)))
