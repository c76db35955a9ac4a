#!/usr/bin/env python3
"""
equispec 행렬 패밀리 생성기
=========================
처방된 스펙트럼을 갖는 매개변수 행렬 패밀리와 지정 등분할
CLI 패밀리 이름: m3 | m4triple | m4double | m4three | mn2 | mprime | mab | alphablock | atik
"""

import logging
from dataclasses import dataclass, field
from typing import Callable, Dict, List, Sequence, Tuple

import numpy as np

from config import CLUSTER_FACTOR
from core_spectra import DenseMatrix, as_matrix, cluster_eigenvalues, spectrum_sort_key
from errors import (
    AlphaNotEigenvalue,
    AlphaZero,
    DegenerateQuotient,
    EigenvalueMismatch,
    InvalidParams,
    NotEquitable,
)
from partitions import Partition, quotient

logger = logging.getLogger(__name__)


@dataclass(frozen=True)
class ConstructedMatrix:
    """
    생성된 행렬과 그 메타데이터

    운영 시 중요사항:
    - designated_partition은 생성 시점에 등분할 검사를 통과한 것만 반환
    - expected_multiplicities 합 == 행렬 차수
    """

    matrix: DenseMatrix
    designated_partition: Partition
    expected_distinct: Tuple[complex, ...]
    expected_multiplicities: Tuple[int, ...]
    family_name: str
    params: Dict[str, float] = field(default_factory=dict)


def _finish(
    family: str,
    matrix: np.ndarray,
    partition: Partition,
    expected: Sequence[Tuple[complex, int]],
    params: Dict[str, float],
) -> ConstructedMatrix:
    a = as_matrix(matrix)
    check = quotient(a, partition)
    if not check.equitable:
        raise NotEquitable(
            f"{family}: 지정 분할이 등분할이 아님 (편차 {check.max_row_sum_deviation:.3g})"
        )
    scale = max([1.0] + [abs(complex(v)) for v, _ in expected])
    merged = _merge_expected(expected, CLUSTER_FACTOR * scale)
    if sum(mult for _, mult in merged) != a.shape[0]:
        raise InvalidParams(f"{family}: 기대 중복도 합이 차수 {a.shape[0]}와 다름")
    logger.debug(f"{family} 생성 완료 (n={a.shape[0]}, 파라미터 {params})")
    return ConstructedMatrix(
        matrix=a,
        designated_partition=partition,
        expected_distinct=tuple(v for v, _ in merged),
        expected_multiplicities=tuple(mult for _, mult in merged),
        family_name=family,
        params=dict(params),
    )


def _merge_expected(expected: Sequence[Tuple[complex, int]], tol: float) -> List[Tuple[complex, int]]:
    # 닫힌 형태 값끼리 tol 이내로 겹치면 중복도 합산
    merged: List[Tuple[complex, int]] = []
    for value, mult in expected:
        value = complex(value)
        for i, (existing, count) in enumerate(merged):
            if abs(existing - value) <= tol:
                merged[i] = (existing, count + mult)
                break
        else:
            merged.append((value, mult))
    merged.sort(key=lambda item: spectrum_sort_key(item[0]))
    return merged


def _default_tol(q: np.ndarray, tol: float) -> float:
    if tol:
        return float(tol)
    rho = float(np.max(np.abs(np.linalg.eigvals(q))))
    return CLUSTER_FACTOR * max(1.0, rho)


def _two_by_two_other(c11: float, c12: float, c21: float, c22: float, alpha: float, tol: float) -> float:
    """
    2×2 몫 행렬에서 α 검증 후 다른 고유값 β 반환

    운영 시 중요사항:
    - 두 고유값이 서로 다른 실수가 아니면 DegenerateQuotient
    - α가 고유값(허용 오차 이내)이 아니면 AlphaNotEigenvalue
    - β = trace − α (정수 입력이면 정확)
    """
    q = np.array([[c11, c12], [c21, c22]], dtype=float)
    limit = _default_tol(q, tol)
    trace, det = c11 + c22, c11 * c22 - c12 * c21
    discriminant = trace * trace - 4.0 * det
    if discriminant < 0:
        raise DegenerateQuotient(f"몫 행렬 {q.tolist()}의 고유값이 실수가 아님")
    roots = np.linalg.eigvals(q).real
    if abs(roots[0] - roots[1]) <= limit:
        raise DegenerateQuotient(f"몫 행렬 {q.tolist()}의 고유값이 중복됨 ({roots[0]:.6g})")
    if min(abs(r - alpha) for r in roots) > limit:
        raise AlphaNotEigenvalue(f"α={alpha}는 몫 행렬 고유값 {sorted(roots.tolist())}이 아님")
    return trace - alpha


def construct_3x3(c11: float, c12: float, c21: float, c22: float, alpha: float, tol: float = 0.0) -> ConstructedMatrix:
    """스펙트럼 {α², β}, 분할 {{1},{2,3}}"""
    beta = _two_by_two_other(c11, c12, c21, c22, alpha, tol)
    m = np.array(
        [
            [c11, c12 / 2, c12 / 2],
            [c21, (c22 + alpha) / 2, (c22 - alpha) / 2],
            [c21, (c22 - alpha) / 2, (c22 + alpha) / 2],
        ]
    )
    return _finish(
        "m3",
        m,
        Partition.from_cells([[1], [2, 3]]),
        [(alpha, 2), (beta, 1)],
        dict(c11=c11, c12=c12, c21=c21, c22=c22, alpha=alpha),
    )


def construct_4x4_triple(
    c11: float, c12: float, c21: float, c22: float, alpha: float, tol: float = 0.0
) -> ConstructedMatrix:
    """스펙트럼 {α³, β}, 분할 {{1},{2,3,4}}, 뒤쪽 블록 B = αI₃ + (c₂₂−α)/3·J₃"""
    beta = _two_by_two_other(c11, c12, c21, c22, alpha, tol)
    m = _one_plus_block(c11, c12, c21, c22, alpha, 4)
    return _finish(
        "m4triple",
        m,
        Partition.from_cells([[1], [2, 3, 4]]),
        [(alpha, 3), (beta, 1)],
        dict(c11=c11, c12=c12, c21=c21, c22=c22, alpha=alpha),
    )


def construct_4x4_double(
    c11: float, c12: float, c21: float, c22: float, alpha: float, beta: float, tol: float = 0.0
) -> ConstructedMatrix:
    """
    스펙트럼 {α², β²}, 분할 {{1,2},{3,4}}

    운영 시 중요사항:
    - α, β 모두 입력받아 σ(Q)와 교차 검증 (불일치 시 EigenvalueMismatch)
    - α == β (허용 오차 이내) 이면 DegenerateQuotient
    """
    q = np.array([[c11, c12], [c21, c22]], dtype=float)
    limit = _default_tol(q, tol)
    if abs(alpha - beta) <= limit:
        raise DegenerateQuotient(f"α와 β가 같음 ({alpha})")
    trace, det = c11 + c22, c11 * c22 - c12 * c21
    if trace * trace - 4.0 * det < 0:
        raise DegenerateQuotient(f"몫 행렬 {q.tolist()}의 고유값이 실수가 아님")
    roots = sorted(np.linalg.eigvals(q).real.tolist())
    if roots[1] - roots[0] <= limit:
        raise DegenerateQuotient(f"몫 행렬 {q.tolist()}의 고유값이 중복됨")
    if max(abs(x - y) for x, y in zip(sorted([alpha, beta]), roots)) > limit:
        raise EigenvalueMismatch(f"{{α, β}} = {{{alpha}, {beta}}}가 σ(Q) = {roots}와 다름")
    m = np.array(
        [
            [(c11 + alpha) / 2, (c11 - alpha) / 2, c12 / 2, c12 / 2],
            [(c11 - alpha) / 2, (c11 + alpha) / 2, c12 / 2, c12 / 2],
            [c21 / 2, c21 / 2, (c22 + beta) / 2, (c22 - beta) / 2],
            [c21 / 2, c21 / 2, (c22 - beta) / 2, (c22 + beta) / 2],
        ]
    )
    return _finish(
        "m4double",
        m,
        Partition.from_cells([[1, 2], [3, 4]]),
        [(alpha, 2), (beta, 2)],
        dict(c11=c11, c12=c12, c21=c21, c22=c22, alpha=alpha, beta=beta),
    )


def construct_4x4_three(c, alpha: float, tol: float = 0.0) -> ConstructedMatrix:
    """
    스펙트럼 {α², β, γ}, 분할 {{1},{2},{3,4}}

    운영 시 중요사항:
    - c는 3×3 몫 행렬, σ(c)는 서로 다른 세 값이어야 함 (β, γ는 복소수여도 됨)
    - α ∈ σ(c) 가 아니면 AlphaNotEigenvalue
    """
    q = np.asarray(c, dtype=float)
    if q.shape != (3, 3):
        raise InvalidParams(f"c는 3×3 행렬이어야 함 (shape={q.shape})")
    limit = _default_tol(q, tol)
    roots = np.linalg.eigvals(q)
    if len(cluster_eigenvalues(roots, limit)) != 3:
        raise DegenerateQuotient(f"σ(c) = {np.round(roots, 6).tolist()}에 중복 고유값 있음")
    distances = np.abs(roots - alpha)
    if distances.min() > limit:
        raise AlphaNotEigenvalue(f"α={alpha}는 σ(c)에 없음")
    others = [complex(r) for i, r in enumerate(roots) if i != int(np.argmin(distances))]
    others = [complex(v.real, 0.0) if abs(v.imag) <= limit else v for v in others]

    m = np.array(
        [
            [q[0, 0], q[0, 1], q[0, 2] / 2, q[0, 2] / 2],
            [q[1, 0], q[1, 1], q[1, 2] / 2, q[1, 2] / 2],
            [q[2, 0], q[2, 1], (q[2, 2] + alpha) / 2, (q[2, 2] - alpha) / 2],
            [q[2, 0], q[2, 1], (q[2, 2] - alpha) / 2, (q[2, 2] + alpha) / 2],
        ]
    )
    params = {f"c{i + 1}{j + 1}": float(q[i, j]) for i in range(3) for j in range(3)}
    params["alpha"] = alpha
    return _finish(
        "m4three",
        m,
        Partition.from_cells([[1], [2], [3, 4]]),
        [(alpha, 2), (others[0], 1), (others[1], 1)],
        params,
    )


def _one_plus_block(c11: float, c12: float, c21: float, c22: float, alpha: float, n: int) -> np.ndarray:
    # [[c11, c12/(n−1)·1ᵀ], [c21·1, αI + (c22−α)/(n−1)·J]]
    size = n - 1
    m = np.empty((n, n))
    m[0, 0] = c11
    m[0, 1:] = c12 / size
    m[1:, 0] = c21
    m[1:, 1:] = alpha * np.eye(size) + (c22 - alpha) / size * np.ones((size, size))
    return m


def construct_n_two(
    c11: float, c12: float, c21: float, c22: float, alpha: float, n: int, tol: float = 0.0
) -> ConstructedMatrix:
    """스펙트럼 {α^{n−1}, β}, 분할 {{1},{2..n}}"""
    if int(n) != n or n < 3:
        raise InvalidParams(f"n은 3 이상의 정수여야 함 (입력 {n})")
    n = int(n)
    beta = _two_by_two_other(c11, c12, c21, c22, alpha, tol)
    return _finish(
        "mn2",
        _one_plus_block(c11, c12, c21, c22, alpha, n),
        Partition.from_cells([[1], range(2, n + 1)]),
        [(alpha, n - 1), (beta, 1)],
        dict(c11=c11, c12=c12, c21=c21, c22=c22, alpha=alpha, n=n),
    )


def _arrow_family(n: int, a: float, b: float) -> np.ndarray:
    # [[1, −a·1ᵀ], [a·1, bI + a(J − I)]]
    size = n - 1
    m = np.empty((n, n))
    m[0, 0] = 1.0
    m[0, 1:] = -a
    m[1:, 0] = a
    m[1:, 1:] = b * np.eye(size) + a * (np.ones((size, size)) - np.eye(size))
    return m


def _require_order(n, minimum: int) -> int:
    if int(n) != n or n < minimum:
        raise InvalidParams(f"n은 {minimum} 이상의 정수여야 함 (입력 {n})")
    return int(n)


def family_m_prime(n: int) -> ConstructedMatrix:
    """
    M′ = [[1, −2·1ᵀ], [2·1, 5I + 2(J − I)]], 스펙트럼 {2n−1, 3^{n−1}}

    몫 행렬은 [[1, −2(n−1)], [2, 2(n−2)+5]].
    """
    n = _require_order(n, 3)
    return _finish(
        "mprime",
        _arrow_family(n, 2.0, 5.0),
        Partition.from_cells([[1], range(2, n + 1)]),
        [(2 * n - 1, 1), (3.0, n - 1)],
        dict(n=n),
    )


def family_ab(n: int, a: float, b: float) -> ConstructedMatrix:
    """
    [[1, −a·1ᵀ], [a·1, bI + a(J − I)]]

    운영 시 중요사항:
    - b − a의 중복도는 n − 2 (합이 0인 뒤쪽 블록 벡터들)
    - 나머지 두 값은 몫 [[1, −a(n−1)], [a, b + a(n−2)]]의 근
    - 닫힌 형태 값끼리 겹치면 중복도 합산
    """
    n = _require_order(n, 3)
    q = np.array([[1.0, -a * (n - 1)], [a, b + a * (n - 2)]])
    roots = np.linalg.eigvals(q)
    expected = [(b - a, n - 2)] + [(complex(r), 1) for r in roots]
    scale = max(1.0, float(np.max(np.abs(roots))), abs(b - a))
    expected = [
        (complex(v.real, 0.0) if abs(complex(v).imag) <= CLUSTER_FACTOR * scale else v, mult)
        for v, mult in expected
    ]
    return _finish(
        "mab",
        _arrow_family(n, a, b),
        Partition.from_cells([[1], range(2, n + 1)]),
        expected,
        dict(n=n, a=a, b=b),
    )


def family_alpha_block(a: int, b: int, alpha: float) -> ConstructedMatrix:
    """[[J_a/α, J], [J, αJ_b]], 스펙트럼 {0^{a+b−1}, (a + α²b)/α}"""
    if alpha == 0:
        raise AlphaZero("α는 0이 아니어야 함")
    a, b = _require_order(a, 1), _require_order(b, 1)
    size = a + b
    m = np.ones((size, size))
    m[:a, :a] /= alpha
    m[a:, a:] *= alpha
    return _finish(
        "alphablock",
        m,
        Partition.from_cells([range(1, a + 1), range(a + 1, size + 1)]),
        [(0.0, size - 1), ((a + alpha * alpha * b) / alpha, 1)],
        dict(a=a, b=b, alpha=alpha),
    )


def family_atik(n: int) -> ConstructedMatrix:
    """
    (n+2)×(n+2) 영(0) 행합 패밀리, 지정 분할 {{1},{2},{3..n+2}}

    운영 시 중요사항:
    - 모든 행합이 0이라 한 셀 분할도 등분할 (몫 (0))
    - σ(M) = {0, 4n−1, (8n−3)^n}, 3셀 몫은 {0, 4n−1, 8n−3}
    """
    n = _require_order(n, 2)
    size = n + 2
    m = np.empty((size, size))
    m[0, 0], m[0, 1], m[0, 2:] = 4 * n - 2, -(2 * n - 2), -2.0
    m[1, 0], m[1, 1], m[1, 2:] = -1.0, 4 * n + 1, -4.0
    m[2:, 0] = -1.0
    m[2:, 1] = -2 * (2 * n - 2)
    m[2:, 2:] = -4.0
    np.fill_diagonal(m[2:, 2:], 8 * n - 7)
    return _finish(
        "atik",
        m,
        Partition.from_cells([[1], [2], range(3, size + 1)]),
        [(0.0, 1), (4 * n - 1, 1), (8 * n - 3, n)],
        dict(n=n),
    )


def _construct_4x4_three_from_entries(
    c11: float, c12: float, c13: float,
    c21: float, c22: float, c23: float,
    c31: float, c32: float, c33: float,
    alpha: float, tol: float = 0.0,
) -> ConstructedMatrix:
    c = [[c11, c12, c13], [c21, c22, c23], [c31, c32, c33]]
    return construct_4x4_three(c, alpha, tol)


# CLI 패밀리 이름 → (생성 함수, 필수 파라미터, 선택 파라미터)
FAMILIES: Dict[str, Tuple[Callable[..., ConstructedMatrix], Tuple[str, ...], Tuple[str, ...]]] = {
    "m3": (construct_3x3, ("c11", "c12", "c21", "c22", "alpha"), ("tol",)),
    "m4triple": (construct_4x4_triple, ("c11", "c12", "c21", "c22", "alpha"), ("tol",)),
    "m4double": (construct_4x4_double, ("c11", "c12", "c21", "c22", "alpha", "beta"), ("tol",)),
    "m4three": (
        _construct_4x4_three_from_entries,
        ("c11", "c12", "c13", "c21", "c22", "c23", "c31", "c32", "c33", "alpha"),
        ("tol",),
    ),
    "mn2": (construct_n_two, ("c11", "c12", "c21", "c22", "alpha", "n"), ("tol",)),
    "mprime": (family_m_prime, ("n",), ()),
    "mab": (family_ab, ("n", "a", "b"), ()),
    "alphablock": (family_alpha_block, ("a", "b", "alpha"), ()),
    "atik": (family_atik, ("n",), ()),
}

_INTEGER_PARAMS = {"n", "a", "b"}


def build_family(name: str, params: Dict[str, float]) -> ConstructedMatrix:
    """
    이름과 파라미터 맵으로 패밀리 생성 (CLI 진입점)

    운영 시 중요사항:
    - 알 수 없는 패밀리, 누락/불필요 파라미터는 InvalidParams
    - n, a, b는 정수 파라미터 (mab의 a, b는 실수 허용)
    """
    if name not in FAMILIES:
        raise InvalidParams(f"알 수 없는 패밀리 '{name}' (가능: {', '.join(FAMILIES)})")
    builder, required, optional = FAMILIES[name]
    missing = [key for key in required if key not in params]
    unknown = [key for key in params if key not in required and key not in optional]
    if missing or unknown:
        raise InvalidParams(f"{name}: 누락 파라미터 {missing}, 알 수 없는 파라미터 {unknown}")

    values = dict(params)
    for key in _INTEGER_PARAMS & set(values):
        if name == "mab" and key in ("a", "b"):
            continue
        if float(values[key]) != int(values[key]):
            raise InvalidParams(f"{name}: {key}는 정수여야 함 (입력 {values[key]})")
        values[key] = int(values[key])

    return builder(**values)
