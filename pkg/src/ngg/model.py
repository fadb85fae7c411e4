"""Envelope functions, latent sampling, and Bernoulli graph generation.

A graph model here is a latent space, an envelope ``p: [-1, 1] -> [0, 1]``,
and a size ``n``: nodes get i.i.d. uniform latent positions, and an edge
between ``i`` and ``j`` appears independently with probability
``p(cos(distance))`` evaluated at the pairwise cosine.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from typing import Callable, Sequence

import numpy as np

from .errors import DomainError, ModelError
from .spaces import HarmonicBasis, LatentSpace, SpaceKind

__all__ = [
    "Envelope",
    "builtin_envelope",
    "constant_envelope",
    "envelope_from_coefficients",
    "LatentSample",
    "sample_latent",
    "pairwise_cosine",
    "cosine_matrix",
    "probability_matrix",
    "GraphSample",
    "generate_graph",
]

_UNIT_TOL = 1e-9


@dataclass(frozen=True)
class Envelope:
    """A function of the pairwise cosine, plus optional metadata.

    ``fn`` must accept numpy arrays.  ``known_coeffs`` records analytically
    known expansion coefficients (degree, value); ``jump_points`` lists
    interior discontinuities so quadrature can split there.
    """

    fn: Callable[[np.ndarray], np.ndarray]
    name: str
    known_coeffs: tuple[tuple[int, float], ...] | None = None
    jump_points: tuple[float, ...] | None = None

    def __call__(self, t):
        return self.fn(t)


def builtin_envelope(index: int) -> Envelope:
    """The six study envelopes p1..p6 (index 1-based)."""
    if index == 1:
        return Envelope(lambda t: ((1.0 + np.asarray(t, float)) / 2.0) ** 4, "p1")
    if index == 2:
        return Envelope(
            lambda t: np.where(np.asarray(t, float) > 0.7, 1.0, 0.0),
            "p2",
            jump_points=(0.7,),
        )
    if index == 3:
        return Envelope(lambda t: np.exp(-((np.asarray(t, float) - 1.0) ** 2)), "p3")
    if index == 4:
        return Envelope(
            lambda t: 0.5 + 0.5 * np.sin(0.5 * np.pi * np.asarray(t, float)), "p4"
        )
    if index == 5:
        return Envelope(
            lambda t: 1.0 / 3.0
            + (35.0 * np.asarray(t, float) ** 4 - 30.0 * np.asarray(t, float) ** 2 + 3.0) / 12.0,
            "p5",
            known_coeffs=((0, 1.0 / 3.0), (4, 2.0 / 27.0)),
        )
    if index == 6:
        return Envelope(
            lambda t: np.where(np.asarray(t, float) > 0.0, np.asarray(t, float) ** 10, 0.0),
            "p6",
            jump_points=(0.0,),  # kink, not a jump; still a useful split point
        )
    raise DomainError(f"builtin envelope index must be 1..6, got {index}")


def constant_envelope(value: float) -> Envelope:
    return Envelope(
        lambda t, v=float(value): np.full_like(np.asarray(t, float), v),
        f"const:{value:g}",
        known_coeffs=((0, float(value)),),
    )


def envelope_from_coefficients(
    basis: HarmonicBasis, pairs: Sequence[tuple[int, float]], name: str = "coeffs"
) -> Envelope:
    """Envelope defined by expansion coefficients; unlisted degrees are zero."""
    pairs = tuple((int(ell), float(v)) for ell, v in pairs)
    if not pairs:
        raise DomainError("at least one coefficient is required")
    top = max(ell for ell, _ in pairs)
    if top > basis.max_degree:
        raise DomainError(f"degree {top} exceeds basis max_degree {basis.max_degree}")
    coeffs = np.zeros(top + 1)
    for ell, v in pairs:
        if ell < 0:
            raise DomainError("degrees must be nonnegative")
        coeffs[ell] += v
    return Envelope(
        lambda t: basis.reconstruct(coeffs, t),
        name,
        known_coeffs=tuple((ell, float(coeffs[ell])) for ell in range(top + 1)),
    )


# ---------------------------------------------------------------------------
# latent sampling


@dataclass(frozen=True)
class LatentSample:
    """n i.i.d. uniform latent points in homogeneous coordinates."""

    space: LatentSpace
    points: np.ndarray  # (n, d); complex for the complex projective family
    seed: int

    @property
    def n(self) -> int:
        return self.points.shape[0]


def sample_latent(space: LatentSpace, n: int, seed: int) -> LatentSample:
    """Uniform sampling via normalized Gaussian vectors; projective points are
    sphere points up to scalar, stored with a canonical representative."""
    if n < 1:
        raise DomainError("n must be positive")
    rng = np.random.default_rng(seed)
    d = space.dim
    if space.kind is SpaceKind.SPHERE:
        x = rng.standard_normal((n, d))
    elif space.kind is SpaceKind.REAL_PROJECTIVE:
        x = rng.standard_normal((n, d))
        flip = np.where(x[:, -1] < 0.0, -1.0, 1.0)
        x = x * flip[:, None]
    elif space.kind is SpaceKind.COMPLEX_PROJECTIVE:
        x = (rng.standard_normal((n, d)) + 1j * rng.standard_normal((n, d))) / math.sqrt(2.0)
    else:
        raise DomainError(f"sampling is not supported on {space.kind.value}")
    x = x / np.linalg.norm(x, axis=1, keepdims=True)
    return LatentSample(space=space, points=x, seed=int(seed))


def _check_unit(x: np.ndarray):
    if abs(np.linalg.norm(x) - 1.0) > _UNIT_TOL:
        raise DomainError("points must be unit vectors")


def pairwise_cosine(space: LatentSpace, x: np.ndarray, y: np.ndarray) -> float:
    """Cosine of the (normalized) distance between two points.

    Sphere: <x, y>.  Real projective: 2 <x, y>^2 - 1.  Complex projective:
    2 |<x, y>|^2 - 1.  The projective forms follow from the pole formula and
    two-point homogeneity.
    """
    x = np.asarray(x)
    y = np.asarray(y)
    _check_unit(x)
    _check_unit(y)
    if space.kind is SpaceKind.SPHERE:
        t = float(np.real(np.vdot(x, y)))
    elif space.kind is SpaceKind.REAL_PROJECTIVE:
        t = 2.0 * float(np.dot(x, y)) ** 2 - 1.0
    elif space.kind is SpaceKind.COMPLEX_PROJECTIVE:
        t = 2.0 * abs(np.vdot(x, y)) ** 2 - 1.0
    else:
        raise DomainError(f"pairwise cosine not supported on {space.kind.value}")
    return float(np.clip(t, -1.0, 1.0))


def _cosine_rows(space: LatentSpace, points: np.ndarray, i: int) -> np.ndarray:
    """Cosines between point i and points i+1..n-1."""
    rest = points[i + 1 :]
    if space.kind is SpaceKind.SPHERE:
        t = rest @ points[i]
    elif space.kind is SpaceKind.REAL_PROJECTIVE:
        t = 2.0 * (rest @ points[i]) ** 2 - 1.0
    elif space.kind is SpaceKind.COMPLEX_PROJECTIVE:
        t = 2.0 * np.abs(rest @ points[i].conj()) ** 2 - 1.0
    else:
        raise DomainError(f"pairwise cosine not supported on {space.kind.value}")
    return np.clip(np.real(t), -1.0, 1.0)


def cosine_matrix(latent: LatentSample) -> np.ndarray:
    """Full n x n matrix of pairwise cosines (diagonal = 1)."""
    pts = latent.points
    if latent.space.kind is SpaceKind.SPHERE:
        g = pts @ pts.T
    elif latent.space.kind is SpaceKind.REAL_PROJECTIVE:
        g = 2.0 * (pts @ pts.T) ** 2 - 1.0
    elif latent.space.kind is SpaceKind.COMPLEX_PROJECTIVE:
        g = 2.0 * np.abs(pts @ pts.conj().T) ** 2 - 1.0
    else:
        raise DomainError(f"pairwise cosine not supported on {latent.space.kind.value}")
    g = np.clip(np.real(g), -1.0, 1.0)
    np.fill_diagonal(g, 1.0)
    return g


# ---------------------------------------------------------------------------
# probability matrix and graph generation

_RANGE_TOL = 1e-12


def _checked_probabilities(p: Envelope, t: np.ndarray) -> np.ndarray:
    vals = np.asarray(p(t), dtype=float)
    if vals.size and (np.min(vals) < -_RANGE_TOL or np.max(vals) > 1.0 + _RANGE_TOL):
        raise ModelError(
            f"envelope {p.name!r} leaves [0, 1]: range "
            f"[{float(np.min(vals)):.3g}, {float(np.max(vals)):.3g}]"
        )
    return np.clip(vals, 0.0, 1.0)


def probability_matrix(latent: LatentSample, p: Envelope) -> np.ndarray:
    """Matrix of edge probabilities p(cosine), zero diagonal."""
    theta = _checked_probabilities(p, cosine_matrix(latent))
    np.fill_diagonal(theta, 0.0)
    return theta


@dataclass(frozen=True)
class GraphSample:
    """An undirected simple graph, adjacency kept bit-packed by row.

    ``theta0``/``latent`` are retained when the sample came from a model run
    that asked for them.
    """

    n: int
    packed: np.ndarray  # uint8, shape (n, ceil(n / 8))
    seed: int
    theta0: np.ndarray | None = None
    latent: LatentSample | None = None

    @classmethod
    def from_dense(cls, adj: np.ndarray, seed: int = 0, theta0=None, latent=None) -> "GraphSample":
        adj = np.asarray(adj)
        n = adj.shape[0]
        if adj.shape != (n, n):
            raise DomainError("adjacency must be square")
        b = adj.astype(bool)
        if np.any(b != b.T) or np.any(np.diagonal(b)):
            raise DomainError("adjacency must be symmetric with zero diagonal")
        return cls(n=n, packed=np.packbits(b, axis=1), seed=int(seed), theta0=theta0, latent=latent)

    def adjacency_bool(self) -> np.ndarray:
        return np.unpackbits(self.packed, axis=1, count=self.n).astype(bool)

    def adjacency(self, dtype=np.float64) -> np.ndarray:
        return self.adjacency_bool().astype(dtype)

    def edge_count(self) -> int:
        return int(self.adjacency_bool().sum()) // 2

    def edge_density(self) -> float:
        return self.edge_count() / (self.n * (self.n - 1) / 2.0)


def generate_graph(
    latent: LatentSample, p: Envelope, seed: int, keep_theta: bool = True
) -> GraphSample:
    """Draw one Bernoulli graph: independent edges for i < j with probability
    p applied to the pairwise cosine, symmetric, zero diagonal.

    Generation streams one row at a time so only the packed adjacency (plus
    theta when ``keep_theta``) stays resident.  Identical (latent, p, seed)
    reproduce the adjacency bit for bit.
    """
    rng = np.random.default_rng(seed)
    n = latent.n
    adj = np.zeros((n, n), dtype=bool)
    theta = np.zeros((n, n)) if keep_theta else None
    for i in range(n - 1):
        probs = _checked_probabilities(p, _cosine_rows(latent.space, latent.points, i))
        adj[i, i + 1 :] = rng.random(n - 1 - i) < probs
        if theta is not None:
            theta[i, i + 1 :] = probs
            theta[i + 1 :, i] = probs
    adj |= adj.T
    return GraphSample(
        n=n,
        packed=np.packbits(adj, axis=1),
        seed=int(seed),
        theta0=theta,
        latent=latent,
    )
