import math

import numpy as np
import pytest
import scipy.stats
from hypothesis import given, strategies as st

import ngg
from ngg.errors import DomainError, ModelError


# --- builtin envelopes --------------------------------------------------------


def test_builtin_envelope_values():
    p1, p2, p3, p4, p5, p6 = (ngg.builtin_envelope(i) for i in range(1, 7))
    assert p1(1.0) == 1.0
    assert p1(-1.0) == 0.0
    assert p2(0.5) == 0.0
    assert p2(0.71) == 1.0
    assert p2.jump_points == (0.7,)
    assert p3(1.0) == 1.0
    assert p4(1.0) == pytest.approx(1.0)
    assert p4(-1.0) == pytest.approx(0.0)
    assert p5(1.0) == pytest.approx(1 / 3 + 2 / 3)
    assert dict(p5.known_coeffs) == {0: pytest.approx(1 / 3), 4: pytest.approx(2 / 27)}
    assert p6(-0.5) == 0.0
    assert p6(0.5) == pytest.approx(0.5**10)


def test_builtin_envelope_range():
    t = np.linspace(-1, 1, 2001)
    for i in range(1, 7):
        v = ngg.builtin_envelope(i)(t)
        assert np.min(v) >= 0.0 and np.max(v) <= 1.0


def test_builtin_envelope_bad_index():
    for bad in (0, 7, -1):
        with pytest.raises(DomainError):
            ngg.builtin_envelope(bad)


# --- latent sampling -----------------------------------------------------------


def test_sample_latent_moments(sphere3):
    n = 100_000
    lat = ngg.sample_latent(sphere3, n, 123)
    assert np.max(np.abs(np.linalg.norm(lat.points, axis=1) - 1.0)) < 1e-12
    assert abs(lat.points[:, -1].mean()) < 4 / math.sqrt(3 * n)
    # E[x_j^2] = 1/d; Var(x_j^2) = 3/(d(d+2)) - 1/d^2
    for d in (3, 5):
        pts = ngg.sample_latent(ngg.sphere(d), n, 5).points
        var = 3 / (d * (d + 2)) - 1 / d**2
        assert abs((pts[:, 0] ** 2).mean() - 1 / d) < 5 * math.sqrt(var / n)


def test_sample_latent_deterministic(sphere3):
    a = ngg.sample_latent(sphere3, 1, 99).points
    b = ngg.sample_latent(sphere3, 1, 99).points
    assert np.array_equal(a, b)


def test_sample_latent_unsupported():
    with pytest.raises(DomainError):
        ngg.sample_latent(ngg.quaternionic_projective(2), 5, 0)
    with pytest.raises(DomainError):
        ngg.sample_latent(ngg.sphere(3), 0, 0)


def test_pairwise_cosine_basics(sphere3):
    e1 = np.array([1.0, 0.0, 0.0])
    e2 = np.array([0.0, 1.0, 0.0])
    assert ngg.pairwise_cosine(sphere3, e1, e1) == 1.0
    assert ngg.pairwise_cosine(sphere3, e1, e2) == 0.0
    rp = ngg.real_projective(3)
    assert ngg.pairwise_cosine(rp, e1, -e1) == 1.0  # antipodes are identified
    cp = ngg.complex_projective(2)
    z = np.array([1.0 + 0j, 0.0])
    assert ngg.pairwise_cosine(cp, z, np.exp(0.7j) * z) == pytest.approx(1.0)
    with pytest.raises(DomainError):
        ngg.pairwise_cosine(sphere3, 2 * e1, e2)


@pytest.mark.parametrize(
    "space,shape",
    [
        (ngg.real_projective(3), (1.0, 0.5)),
        (ngg.complex_projective(3), (2.0, 1.0)),
        (ngg.sphere(4), (1.5, 1.5)),
    ],
)
def test_pairwise_cosine_law(space, shape):
    # the cosine between two independent uniform points follows the Beta law
    # of the space; oracle = incomplete-beta CDF via scipy
    n = 100_000
    x = ngg.sample_latent(space, n, 11).points
    y = ngg.sample_latent(space, n, 12).points
    if space.kind is ngg.SpaceKind.SPHERE:
        t = np.einsum("ij,ij->i", x, y)
    elif space.kind is ngg.SpaceKind.REAL_PROJECTIVE:
        t = 2.0 * np.einsum("ij,ij->i", x, y) ** 2 - 1.0
    else:
        t = 2.0 * np.abs(np.einsum("ij,ij->i", x, y.conj())) ** 2 - 1.0
    alpha, beta = shape
    # Beta(alpha, beta) on [-1, 1] with (1-t) carrying alpha
    cdf = lambda s: scipy.stats.beta(beta, alpha).cdf((1 + np.asarray(s)) / 2)
    stat = scipy.stats.kstest(t, cdf).statistic
    assert stat < 0.01


# --- probability matrix and graphs ---------------------------------------------


def test_probability_matrix_trivial(sphere3):
    lat = ngg.sample_latent(sphere3, 6, 0)
    assert np.array_equal(ngg.probability_matrix(lat, ngg.constant_envelope(0.0)),
                          np.zeros((6, 6)))
    m = ngg.probability_matrix(lat, ngg.constant_envelope(0.3))
    assert np.allclose(m, 0.3 * (np.ones((6, 6)) - np.eye(6)))


def test_probability_matrix_identical_points(sphere3):
    e = np.array([0.0, 0.0, 1.0])
    lat = ngg.LatentSample(sphere3, np.stack([e, e]), seed=0)
    m = ngg.probability_matrix(lat, ngg.builtin_envelope(1))
    assert m[0, 1] == 1.0 and m[1, 0] == 1.0 and m[0, 0] == 0.0


def test_envelope_out_of_range_is_error(sphere3):
    lat = ngg.sample_latent(sphere3, 5, 1)
    with pytest.raises(ModelError):
        ngg.probability_matrix(lat, ngg.constant_envelope(1.2))
    with pytest.raises(ModelError):
        ngg.generate_graph(lat, ngg.constant_envelope(-0.1), 0)


def test_generate_graph_extremes(sphere3):
    lat = ngg.sample_latent(sphere3, 12, 3)
    full = ngg.generate_graph(lat, ngg.constant_envelope(1.0), 0).adjacency()
    assert np.array_equal(full, np.ones((12, 12)) - np.eye(12))
    empty = ngg.generate_graph(lat, ngg.constant_envelope(0.0), 0).adjacency()
    assert not empty.any()


def test_generate_graph_density(sphere3):
    n = 500
    lat = ngg.sample_latent(sphere3, n, 21)
    g = ngg.generate_graph(lat, ngg.constant_envelope(0.5), 22)
    pairs = n * (n - 1) / 2
    assert abs(g.edge_density() - 0.5) < 3 * math.sqrt(0.25 / pairs)


@given(st.integers(0, 2**63 - 1))
def test_generate_graph_symmetric_zero_diagonal(seed):
    lat = ngg.sample_latent(ngg.sphere(3), 25, 4)
    a = ngg.generate_graph(lat, ngg.builtin_envelope(4), seed).adjacency_bool()
    assert np.array_equal(a, a.T)
    assert not np.diagonal(a).any()


def test_generate_graph_deterministic(sphere3):
    lat = ngg.sample_latent(sphere3, 40, 5)
    p = ngg.builtin_envelope(1)
    a = ngg.generate_graph(lat, p, 17)
    b = ngg.generate_graph(lat, p, 17)
    assert np.array_equal(a.packed, b.packed)
    assert np.array_equal(a.theta0, b.theta0)


def test_generate_graph_keeps_theta(sphere3):
    lat = ngg.sample_latent(sphere3, 30, 6)
    p = ngg.builtin_envelope(4)
    g = ngg.generate_graph(lat, p, 1, keep_theta=True)
    assert np.allclose(g.theta0, ngg.probability_matrix(lat, p))
    assert ngg.generate_graph(lat, p, 1, keep_theta=False).theta0 is None


def test_conditional_edge_frequency(sphere3):
    # binned empirical edge frequency tracks the envelope for smooth p
    n = 2000
    lat = ngg.sample_latent(sphere3, n, 8)
    p = ngg.builtin_envelope(4)
    g = ngg.generate_graph(lat, p, 9, keep_theta=False)
    t = ngg.cosine_matrix(lat)
    iu = np.triu_indices(n, k=1)
    tv = t[iu]
    av = g.adjacency_bool()[iu]
    edges = np.linspace(-1, 1, 21)
    worst = 0.0
    for lo, hi in zip(edges[:-1], edges[1:]):
        mask = (tv >= lo) & (tv < hi)
        if mask.sum() < 200:
            continue
        worst = max(worst, abs(av[mask].mean() - p(tv[mask]).mean()))
    assert worst < 0.05


def test_graph_sample_from_dense_roundtrip():
    a = np.zeros((5, 5))
    a[0, 1] = a[1, 0] = 1
    a[2, 4] = a[4, 2] = 1
    g = ngg.GraphSample.from_dense(a)
    assert np.array_equal(g.adjacency(), a)
    assert g.edge_count() == 2
    with pytest.raises(DomainError):
        ngg.GraphSample.from_dense(np.triu(np.ones((3, 3))))
