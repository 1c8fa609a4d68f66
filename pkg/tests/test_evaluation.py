import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from oracles import amari, best_permutation, matmul, pearson
from sosunmix import (
    DimensionError,
    SingularMatrixError,
    UndefinedCorrelationError,
    amari_index,
    amuse,
    concentration_profiles,
    correct_signs,
    match_sources,
    paper_two_component_matrix,
    sign_accuracy,
)
from sosunmix.evaluation import align, column_cosines, correlation_matrix


def _truth(rng, n=3, T=200):
    return rng.standard_normal((n, T)) + rng.uniform(-1, 1, (n, 1))


# -- match_sources ---------------------------------------------------------

def test_match_identity():
    S = _truth(np.random.default_rng(0))
    m = match_sources(S, S)
    assert m.permutation.tolist() == [0, 1, 2]
    assert m.signs.tolist() == [1.0, 1.0, 1.0]
    np.testing.assert_allclose(m.scales, 1.0, rtol=1e-12)
    np.testing.assert_allclose(m.correlations, 1.0, rtol=1e-12)


def test_match_swapped_and_negated():
    S = _truth(np.random.default_rng(1), n=2)
    est = np.vstack([S[1], -S[0]])
    m = match_sources(S, est)
    assert m.permutation.tolist() == [1, 0]
    assert m.signs.tolist() == [1.0, -1.0]
    np.testing.assert_allclose(m.abs_correlations, 1.0, rtol=1e-12)


def test_match_recovers_positive_scales():
    S = _truth(np.random.default_rng(2))
    est = np.array([[0.0, 0.0, 2.0], [-0.5, 0.0, 0.0], [0.0, 4.0, 0.0]]) @ S
    m = match_sources(S, est)
    assert m.permutation.tolist() == [2, 0, 1]
    np.testing.assert_allclose(m.scales, [0.5, 2.0, 0.25], rtol=1e-12)
    assert np.all(m.scales > 0)


@pytest.mark.parametrize("seed", range(10))
def test_match_agrees_with_brute_force(seed):
    rng = np.random.default_rng(seed)
    S = _truth(rng, n=3, T=60)
    Q, _ = np.linalg.qr(rng.standard_normal((3, 3)))
    est = Q @ S
    m = match_sources(S, est)
    assert m.permutation.tolist() == best_permutation(S.tolist(), est.tolist())
    for j in range(3):
        assert m.correlations[j] == pytest.approx(pearson(S[m.permutation[j]], est[j]), abs=1e-12)


def test_match_large_n_uses_assignment():
    rng = np.random.default_rng(3)
    S = _truth(rng, n=9, T=400)
    perm = rng.permutation(9)
    est = S[perm] * rng.choice([-1, 1], 9)[:, None] + 0.01 * rng.standard_normal((9, 400))
    m = match_sources(S, est)
    assert m.permutation.tolist() == perm.tolist()


def test_match_zero_variance_row():
    S = _truth(np.random.default_rng(4), n=2)
    bad = S.copy()
    bad[1] = 3.0
    with pytest.raises(UndefinedCorrelationError, match="row 1"):
        match_sources(S, bad)
    with pytest.raises(UndefinedCorrelationError, match="truth row 1"):
        match_sources(bad, S)


def test_match_shape_mismatch():
    S = _truth(np.random.default_rng(5))
    with pytest.raises(DimensionError):
        match_sources(S, S[:2])
    with pytest.raises(DimensionError):
        correlation_matrix(S, S[:, :10])


@settings(max_examples=50, deadline=None)
@given(st.integers(0, 10_000), st.integers(1, 5))
def test_align_round_trip(seed, n):
    rng = np.random.default_rng(seed)
    S = _truth(rng, n=n, T=80)
    perm = rng.permutation(n)
    est = S[perm] * (rng.choice([-1, 1], n) * rng.uniform(0.2, 5, n))[:, None] + rng.uniform(-3, 3, (n, 1))
    m = match_sources(S, est)
    Sc = S - S.mean(axis=1, keepdims=True)
    np.testing.assert_allclose(align(est, m), Sc, rtol=0, atol=1e-10)


# -- amari_index -------------------------------------------------------------

def test_amari_identical():
    A = np.random.default_rng(6).uniform(0, 1, (6, 3))
    assert amari_index(A, A) == pytest.approx(0.0, abs=1e-12)


def test_amari_scaled_permutation():
    A = np.random.default_rng(7).uniform(0, 1, (5, 2))
    B = A[:, [1, 0]] * [1.0, -2.0]
    assert amari_index(A, B) == pytest.approx(0.0, abs=1e-12)


@pytest.mark.parametrize("seed", range(10))
def test_amari_matches_naive_formula(seed):
    rng = np.random.default_rng(seed)
    A = rng.standard_normal((6, 3))
    B = A + 0.3 * rng.standard_normal((6, 3))
    An, Bn = A / np.linalg.norm(A, axis=0), B / np.linalg.norm(B, axis=0)
    G = matmul(np.linalg.pinv(Bn).tolist(), An.tolist())
    assert abs(amari_index(A, B) - amari(G)) <= 1e-10


def test_amari_bounds_and_single_component():
    rng = np.random.default_rng(8)
    A, B = rng.standard_normal((4, 3)), rng.standard_normal((4, 3))
    assert 0.0 <= amari_index(A, B) <= 1.0
    assert amari_index(np.ones((3, 1)), np.arange(1.0, 4.0)[:, None]) == 0.0


def test_amari_zero_column_is_singular():
    A = np.random.default_rng(12).uniform(0, 1, (4, 2))
    with pytest.raises(SingularMatrixError):
        amari_index(A, A * [1.0, 0.0])


def test_amari_errors():
    A = np.ones((3, 2))
    with pytest.raises(SingularMatrixError):
        amari_index(np.eye(3)[:, :2], A)
    with pytest.raises(DimensionError):
        amari_index(np.ones((3, 2)), np.ones((3, 3)))


@settings(max_examples=50, deadline=None)
@given(st.integers(0, 10_000), st.integers(2, 4))
def test_amari_permutation_and_scale_invariance(seed, n):
    rng = np.random.default_rng(seed)
    A = rng.standard_normal((n + 2, n))
    B = A + 0.2 * rng.standard_normal(A.shape)
    base = amari_index(A, B)
    perm = rng.permutation(n)
    scale = rng.choice([-1, 1], n) * rng.uniform(0.1, 10, n)
    assert abs(amari_index(A, B[:, perm] * scale) - base) <= 1e-10
    assert abs(amari_index(A[:, perm] * scale, B) - base) <= 1e-10


# -- profiles and cosines ------------------------------------------------

def test_profiles_of_two_component_matrix():
    profiles = concentration_profiles(paper_two_component_matrix())
    assert len(profiles) == 2
    assert profiles[0].component == 0
    assert profiles[0].weights.tolist() == [0.2, 0.8, 0.4, 0.3, 0.9, 0.0, 1.0]


def test_profiles_of_identity():
    profiles = concentration_profiles(np.eye(3))
    for j, p in enumerate(profiles):
        assert p.weights.tolist() == np.eye(3)[:, j].tolist()


def test_corrected_profiles_match_truth(paper2_run):
    sc, model = paper2_run
    fixed = correct_signs(model)
    m = match_sources(sc.true_sources(), fixed.sources)
    cos = column_cosines(sc.mixing.entries, fixed.mixing_estimate, m)
    assert np.all(cos >= 0.999)


def test_column_cosines_keep_sign():
    A = np.random.default_rng(9).uniform(0.1, 1, (4, 2))
    S = _truth(np.random.default_rng(10), n=2)
    m = match_sources(S, S * [[1.0], [-1.0]])
    cos = column_cosines(A, A * [1.0, -1.0], m)
    np.testing.assert_allclose(cos, [1.0, -1.0], atol=1e-12)


# -- sign_accuracy ---------------------------------------------------------

def test_sign_accuracy_examples():
    S = _truth(np.random.default_rng(11), n=2)
    assert sign_accuracy(S, S) == 1.0
    assert sign_accuracy(S, S * [[1.0], [-1.0]]) == 0.5
    assert sign_accuracy(S, -S) == 0.0


def test_sign_accuracy_inversion_fixture(inversion):
    raw = amuse(inversion.simulate(), n=inversion.n)
    truth = inversion.true_sources()
    assert sign_accuracy(truth, raw.sources) < 1.0
    assert sign_accuracy(truth, correct_signs(raw).sources) == 1.0
