from fractions import Fraction

import numpy as np
import pytest
from numpy.testing import assert_allclose

from core_spectra import (
    SubspaceBasis,
    as_matrix,
    char_poly,
    cluster_eigenvalues,
    eigen_decompose,
    evaluate_poly,
    intersection_dim,
    is_symmetric,
    match_values,
    multiset_contained,
    nullspace,
    raw_eigenvalues,
)
from config import infinity_norm
from errors import DimensionMismatch, InvalidMatrix, InvalidParams, NonConvergence, OrderTooLarge


@pytest.mark.parametrize(
    "bad",
    [
        [[1.0, 2.0, 3.0], [4.0, 5.0, 6.0]],
        np.zeros((0, 0)),
        [[1.0, float("nan")], [0.0, 1.0]],
        [[1.0, float("inf")], [0.0, 1.0]],
        [1.0, 2.0],
    ],
)
def test_as_matrix_rejects_invalid_input(bad) -> None:
    with pytest.raises(InvalidMatrix):
        as_matrix(bad)


def test_as_matrix_returns_readonly_copy() -> None:
    source = np.eye(2)
    m = as_matrix(source)
    source[0, 0] = 7.0
    assert m[0, 0] == 1.0
    with pytest.raises(ValueError):
        m[0, 0] = 3.0


def test_counterexample_spectrum(counterexample) -> None:
    summary = eigen_decompose(counterexample)
    expected = [11.0, -2.0 + np.sqrt(61.0), -2.0 - np.sqrt(61.0), -15.0]
    assert_allclose([v.real for v in summary.values], expected, atol=1e-8)
    assert summary.multiplicities == [1, 1, 1, 1]
    assert summary.spectral_radius == pytest.approx(15.0)
    assert summary.order == 4


def test_repeated_eigenvalue_is_clustered(m3_matrix) -> None:
    summary = eigen_decompose(m3_matrix)
    assert_allclose([v.real for v in summary.values], [9.0, 5.0], atol=1e-8)
    assert summary.multiplicities == [1, 2]
    assert summary.multiset() == [summary.values[0], summary.values[1], summary.values[1]]


def test_symmetric_input_gives_real_spectrum() -> None:
    m = np.array([[2.0, 1.0, 0.0], [1.0, 2.0, 1.0], [0.0, 1.0, 2.0]])
    assert is_symmetric(m)
    values = raw_eigenvalues(m)
    assert np.all(values.imag == 0.0)
    assert_allclose(np.sort(values.real), [2 - np.sqrt(2), 2.0, 2 + np.sqrt(2)], atol=1e-12)


def test_complex_pair_ordering() -> None:
    summary = eigen_decompose(np.array([[0.0, -1.0], [1.0, 0.0]]))
    assert summary.values[0] == pytest.approx(1j)
    assert summary.values[1] == pytest.approx(-1j)


def test_cluster_eigenvalues_merges_close_values() -> None:
    clusters = cluster_eigenvalues([1.0, 1.0 + 1e-9, 2.0, 1.0 - 1e-9 + 1e-12j], 1e-6)
    assert [c.multiplicity for c in clusters] == [1, 3]
    assert clusters[0].value == pytest.approx(2.0)
    assert clusters[1].value.imag == 0.0
    assert sum(c.multiplicity for c in clusters) == 4


def test_cluster_eigenvalues_chain_merge() -> None:
    # 0과 2e-6은 tol 밖이지만 1e-6을 거쳐 한 군집이 됨
    clusters = cluster_eigenvalues([0.0, 1e-6, 2e-6], 1.6e-6)
    assert len(clusters) == 1
    assert clusters[0].multiplicity == 3


def test_nonconvergence_is_wrapped(monkeypatch) -> None:
    def failing(_):
        raise np.linalg.LinAlgError("Eigenvalues did not converge")

    monkeypatch.setattr(np.linalg, "eigvals", failing)
    with pytest.raises(NonConvergence):
        raw_eigenvalues(np.array([[1.0, 2.0], [3.0, 4.0]]))


def test_char_poly_of_quotient() -> None:
    coefficients = char_poly(np.array([[9.0, -5.0], [12.0, -13.0]]))
    assert_allclose(coefficients, [1.0, 4.0, -57.0], atol=1e-12)


def test_char_poly_roots_match_spectrum(m3_matrix) -> None:
    coefficients = char_poly(m3_matrix)
    assert_allclose(coefficients, [1.0, -19.0, 115.0, -225.0], atol=1e-9)
    for root in (5.0, 9.0):
        assert abs(evaluate_poly(coefficients, root)) < 1e-8


def test_char_poly_order_limit() -> None:
    with pytest.raises(OrderTooLarge):
        char_poly(np.eye(17))
    assert len(char_poly(np.eye(16))) == 17


def test_nullspace_dimensions(m3_matrix) -> None:
    assert nullspace(m3_matrix, 5.0).dim == 2
    assert nullspace(m3_matrix, 9.0).dim == 1
    assert nullspace(m3_matrix, 4.0).dim == 0


def test_nullspace_of_zero_matrix_is_everything() -> None:
    basis = nullspace(np.zeros((3, 3)))
    assert basis.dim == 3


def test_intersection_dim() -> None:
    u = SubspaceBasis.from_columns(np.eye(3)[:, :2])
    v = SubspaceBasis.from_columns(np.eye(3)[:, 1:])
    assert intersection_dim(u, v) == 1
    assert intersection_dim(u, u) == 2
    empty = SubspaceBasis.from_columns(np.zeros((3, 0)))
    assert intersection_dim(u, empty) == 0


def test_intersection_dim_mismatch() -> None:
    with pytest.raises(DimensionMismatch):
        intersection_dim(SubspaceBasis.from_columns(np.eye(2)), SubspaceBasis.from_columns(np.eye(3)))


def test_from_columns_drops_dependent_columns() -> None:
    cols = np.array([[1.0, 2.0], [1.0, 2.0], [0.0, 0.0]])
    assert SubspaceBasis.from_columns(cols).dim == 1


def test_multiset_matching() -> None:
    assert match_values([1.0, 2.0], [2.0, 1.0, 3.0], 1e-9) == [(0, 1), (1, 0)]
    assert multiset_contained([1.0, 2.0], [2.0, 1.0, 3.0], 1e-9)
    assert not multiset_contained([1.0, 1.0], [1.0, 2.0], 1e-9)


def test_near_real_conjugate_pair_is_one_value() -> None:
    # 허수부 7e-7: 군집 허용 오차(1e-6)의 절반보다 크고 허용 오차 이하
    summary = eigen_decompose([[1.0, -7e-7], [7e-7, 1.0]])
    assert summary.multiplicities == [2]
    assert summary.values[0].imag == 0.0
    assert summary.values[0].real == pytest.approx(1.0)

    clustered = cluster_eigenvalues([2 + 0.7j, 2 - 0.7j, -3.0], 1.0)
    assert [(e.value, e.multiplicity) for e in clustered] == [(2 + 0j, 2), (-3 + 0j, 1)]


def test_negative_tolerances_are_invalid_params() -> None:
    m = np.eye(2)
    with pytest.raises(InvalidParams):
        eigen_decompose(m, tol=-1.0)
    with pytest.raises(InvalidParams):
        nullspace(m, 1.0, rank_tol=-1.0)
    with pytest.raises(InvalidParams):
        SubspaceBasis.from_columns(m, rank_tol=-1.0)
    with pytest.raises(InvalidParams):
        intersection_dim(SubspaceBasis.from_columns(m), SubspaceBasis.from_columns(m), rank_tol=-1.0)


def _random_integer_matrix(rng: np.random.Generator) -> np.ndarray:
    n = int(rng.integers(1, 7))
    return rng.integers(-3, 4, size=(n, n)).astype(float)


def test_spectrum_summary_invariants(rng) -> None:
    for _ in range(200):
        m = _random_integer_matrix(rng)
        n = m.shape[0]
        summary = eigen_decompose(m)
        rho = summary.spectral_radius
        assert summary.order == n

        total = sum(e.value * e.multiplicity for e in summary.eigenvalues)
        assert abs(total - np.trace(m)) <= 1e-6 * max(1.0, rho)
        product = np.prod([e.value**e.multiplicity for e in summary.eigenvalues])
        det = np.linalg.det(m)
        assert abs(product - det) <= 1e-5 * max(1.0, abs(det))

        values = summary.values
        for i in range(len(values)):
            for j in range(i + 1, len(values)):
                assert abs(values[i] - values[j]) > summary.cluster_tolerance

        coefficients = char_poly(m)
        for value in values:
            assert abs(evaluate_poly(coefficients, value)) <= 1e-6 * (1.0 + rho) ** n


def test_nullspace_residual(rng) -> None:
    for _ in range(200):
        m = _random_integer_matrix(rng)
        limit = 1e-8 * max(1.0, infinity_norm(m))
        for value in eigen_decompose(m).values:
            basis = nullspace(m, value)
            if basis.dim:
                residual = m @ basis.vectors - value * basis.vectors
                # 각 열 v마다 ‖(M − λI)v‖∞
                assert np.max(np.abs(residual)) <= limit


def _exact_rank(columns: np.ndarray) -> int:
    # 정수 행렬의 유리수 가우스 소거
    rows = [[Fraction(int(x)) for x in row] for row in columns]
    rank = 0
    width = len(rows[0]) if rows else 0
    for col in range(width):
        pivot = next((r for r in range(rank, len(rows)) if rows[r][col] != 0), None)
        if pivot is None:
            continue
        rows[rank], rows[pivot] = rows[pivot], rows[rank]
        for r in range(len(rows)):
            if r != rank and rows[r][col] != 0:
                factor = rows[r][col] / rows[rank][col]
                rows[r] = [a - factor * b for a, b in zip(rows[r], rows[rank])]
        rank += 1
    return rank


def test_intersection_dim_against_row_reduction(rng) -> None:
    for _ in range(150):
        n = int(rng.integers(2, 7))
        k = int(rng.integers(0, 3))
        shared = rng.integers(-2, 3, size=(n, k))
        a = np.hstack([shared, rng.integers(-2, 3, size=(n, int(rng.integers(0, 3))))])
        # 공유 열의 정수 결합을 b에 넣어 교집합을 만든다
        mixed = shared @ rng.integers(-1, 2, size=(k, k))
        b = np.hstack([rng.integers(-2, 3, size=(n, int(rng.integers(0, 3)))), mixed])
        if a.shape[1] == 0 or b.shape[1] == 0:
            continue
        expected = _exact_rank(a) + _exact_rank(b) - _exact_rank(np.hstack([a, b]))
        u, v = SubspaceBasis.from_columns(a.astype(float)), SubspaceBasis.from_columns(b.astype(float))
        assert intersection_dim(u, v) == intersection_dim(v, u) == expected
