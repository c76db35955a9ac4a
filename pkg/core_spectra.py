#!/usr/bin/env python3
"""
equispec 행렬 스펙트럼 커널
=========================
고유값 분해(군집화 포함), 특성다항식, 영공간, 부분공간 교집합 차원
모든 함수는 입력을 복사해서 다루는 순수 함수 (스레드 안전)
"""

import logging
from dataclasses import dataclass
from typing import Iterable, List, Optional, Sequence, Tuple

import numpy as np
from scipy import linalg as sla

from config import CHAR_POLY_MAX_ORDER, QR_SWEEPS_PER_ORDER, SYMMETRY_FACTOR, infinity_norm, make_tolerances
from errors import DimensionMismatch, InvalidMatrix, NonConvergence, OrderTooLarge

logger = logging.getLogger(__name__)

# n×n 실수 행렬 (행 우선 numpy 배열)
DenseMatrix = np.ndarray


def as_matrix(m, name: str = "matrix") -> DenseMatrix:
    """
    입력을 검증된 n×n 실수 행렬로 변환

    운영 시 중요사항:
    - 항상 float64 복사본을 반환하고 쓰기 금지 플래그 설정 (불변 값으로 취급)
    - 정사각이 아니거나 비어 있거나 NaN/∞가 있으면 InvalidMatrix
    - 허수부가 있는 입력은 거부 (부모 행렬은 실수 행렬만 지원)

    Args:
        m: 2차원 배열로 해석 가능한 값
        name: 오류 메시지에 쓸 이름

    Returns:
        DenseMatrix: 읽기 전용 float64 배열
    """
    try:
        arr = np.array(m, dtype=float, copy=True)
    except (TypeError, ValueError) as e:
        raise InvalidMatrix(f"{name}: 실수 행렬로 변환할 수 없음: {e}") from e
    if arr.ndim != 2 or arr.shape[0] != arr.shape[1]:
        raise InvalidMatrix(f"{name}: 정사각 행렬이 아님 (shape={arr.shape})")
    if arr.shape[0] < 1:
        raise InvalidMatrix(f"{name}: 차수가 1 이상이어야 함")
    if not np.all(np.isfinite(arr)):
        raise InvalidMatrix(f"{name}: NaN 또는 무한대 원소 포함")
    arr.flags.writeable = False
    return arr


def is_symmetric(m: DenseMatrix, factor: float = SYMMETRY_FACTOR) -> bool:
    """‖M − Mᵀ‖∞ ≤ factor·‖M‖∞ 이면 대칭으로 판정"""
    return infinity_norm(m - m.T) <= factor * infinity_norm(m)


def spectrum_sort_key(value: complex) -> Tuple[float, float]:
    # 실수부 내림차순, 허수부 내림차순
    return (-value.real, -value.imag)


@dataclass(frozen=True)
class Eigenvalue:
    value: complex
    multiplicity: int


@dataclass(frozen=True)
class SpectrumSummary:
    """
    군집화된 서로 다른 고유값과 대수적 중복도

    운영 시 중요사항:
    - 중복도 합 == 원본 행렬 차수
    - 나열된 값들은 서로 cluster_tolerance보다 멀리 떨어져 있음
    - spectral_radius는 나열된 값들의 최대 절댓값
    """

    eigenvalues: Tuple[Eigenvalue, ...]
    cluster_tolerance: float
    spectral_radius: float

    @property
    def values(self) -> List[complex]:
        return [e.value for e in self.eigenvalues]

    @property
    def multiplicities(self) -> List[int]:
        return [e.multiplicity for e in self.eigenvalues]

    @property
    def order(self) -> int:
        return sum(self.multiplicities)

    def multiset(self) -> List[complex]:
        """중복도만큼 반복한 전체 고유값 목록"""
        out: List[complex] = []
        for e in self.eigenvalues:
            out.extend([e.value] * e.multiplicity)
        return out

    def nearest(self, value: complex) -> Tuple[Optional[int], float]:
        if not self.eigenvalues:
            return None, float("inf")
        distances = [abs(complex(value) - e.value) for e in self.eigenvalues]
        index = int(np.argmin(distances))
        return index, float(distances[index])

    def contains(self, value: complex, tol: Optional[float] = None) -> bool:
        limit = self.cluster_tolerance if tol is None else tol
        _, distance = self.nearest(value)
        return distance <= limit


def _snap_real(value: complex, tol: float) -> complex:
    return complex(value.real, 0.0) if abs(value.imag) <= tol else value


def cluster_eigenvalues(values: Iterable[complex], tol: float) -> List[Eigenvalue]:
    """
    수치 고유값을 허용 오차 안에서 묶어 서로 다른 값 목록으로 변환

    운영 시 중요사항:
    - 각 값은 tol 이내의 가장 가까운 기존 중심에 배정, 없으면 새 군집
    - 배정 후 중심끼리 tol 이내면 반복 병합 (연쇄 군집 정리)
    - 중심은 구성원 평균이라 (값 × 중복도)의 합이 원래 합과 같음
    - |허수부| ≤ tol 인 원시 값은 군집화 전에 실수로 스냅 (켤레쌍이 같은 실수 두 개로 갈라지지 않음)

    Args:
        values: 원시 고유값들
        tol: 복소평면 거리 허용 오차

    Returns:
        List[Eigenvalue]: 실수부, 허수부 내림차순 정렬
    """
    ordered = sorted((_snap_real(complex(v), tol) for v in values), key=spectrum_sort_key)
    clusters: List[List[complex]] = []
    centres: List[complex] = []
    for v in ordered:
        best, best_distance = None, None
        for i, centre in enumerate(centres):
            distance = abs(v - centre)
            if distance <= tol and (best_distance is None or distance < best_distance):
                best, best_distance = i, distance
        if best is None:
            clusters.append([v])
            centres.append(v)
        else:
            clusters[best].append(v)
            centres[best] = complex(np.mean(clusters[best]))

    merged = True
    while merged:
        merged = False
        for i in range(len(centres)):
            for j in range(i + 1, len(centres)):
                if abs(centres[i] - centres[j]) <= tol:
                    clusters[i].extend(clusters.pop(j))
                    centres.pop(j)
                    centres[i] = complex(np.mean(clusters[i]))
                    merged = True
                    break
            if merged:
                break

    result = [
        Eigenvalue(value=_snap_real(centre, tol), multiplicity=len(members))
        for centre, members in zip(centres, clusters)
    ]
    result.sort(key=lambda e: spectrum_sort_key(e.value))
    return result


def raw_eigenvalues(m: DenseMatrix) -> np.ndarray:
    """
    전체 n개 고유값 계산 (복소수 배열)

    운영 시 중요사항:
    - 대칭 행렬은 eigvalsh (삼중대각 솔버)로 보내 실수 결과 보장
    - 비대칭 행렬은 eigvals (LAPACK geev: balance → Hessenberg → Francis QR)
    - QR 반복 한도는 LAPACK 내부 한도 (n당 QR_SWEEPS_PER_ORDER 수준)
    - 수렴 실패(LinAlgError)는 NonConvergence로 변환
    """
    a = as_matrix(m)
    try:
        if is_symmetric(a):
            logger.debug(f"대칭 솔버 사용 (n={a.shape[0]})")
            values = np.linalg.eigvalsh((a + a.T) / 2.0).astype(complex)
        else:
            logger.debug(f"일반 솔버 사용 (n={a.shape[0]})")
            values = np.linalg.eigvals(a).astype(complex)
    except np.linalg.LinAlgError as e:
        raise NonConvergence(
            f"고유값 솔버 수렴 실패 (n={a.shape[0]}, 한도 {QR_SWEEPS_PER_ORDER * a.shape[0]} sweeps): {e}"
        ) from e
    if not np.all(np.isfinite(values)):
        raise NonConvergence("고유값 솔버가 유한하지 않은 값을 반환함")
    return values


def eigen_decompose(m: DenseMatrix, tol: float = 0.0) -> SpectrumSummary:
    """
    고유값 분해 후 서로 다른 값과 중복도로 요약

    운영 시 중요사항:
    - tol이 0(또는 None)이면 기본값 CLUSTER_FACTOR·max(1, ρ) 사용
    - 복소 고유값도 그대로 다룸 (켤레쌍 허용)
    - 결과 순서는 결정적: 실수부 내림차순, 허수부 내림차순

    Args:
        m: n×n 실수 행렬
        tol: 군집화 허용 오차 (0 = 기본값)

    Returns:
        SpectrumSummary: 군집화된 스펙트럼
    """
    values = raw_eigenvalues(m)
    rho = float(np.max(np.abs(values)))
    cluster_tol = make_tolerances(cluster=tol or None).cluster_for(rho)
    eigenvalues = cluster_eigenvalues(values, cluster_tol)
    radius = max(abs(e.value) for e in eigenvalues)
    return SpectrumSummary(
        eigenvalues=tuple(eigenvalues),
        cluster_tolerance=cluster_tol,
        spectral_radius=float(radius),
    )


def char_poly(m: DenseMatrix) -> List[float]:
    """
    det(xI − M)의 단항(monic) 계수, 최고차부터

    운영 시 중요사항:
    - Faddeev–LeVerrier 재귀를 2의 거듭제곱으로 스케일한 복사본에 적용
      (스케일링은 이진 부동소수점에서 정확하므로 정수 입력의 정확성 유지)
    - n > CHAR_POLY_MAX_ORDER 이면 OrderTooLarge

    Returns:
        List[float]: [1, c₁, …, cₙ]
    """
    a = as_matrix(m)
    n = a.shape[0]
    if n > CHAR_POLY_MAX_ORDER:
        raise OrderTooLarge(f"특성다항식은 n ≤ {CHAR_POLY_MAX_ORDER}만 지원 (n={n})")

    norm = infinity_norm(a)
    exponent = int(np.ceil(np.log2(norm))) if norm > 0 else 0
    scale = float(np.ldexp(1.0, -exponent))
    b = a * scale

    identity = np.eye(n)
    coefficients = [1.0]
    accumulator = identity
    for k in range(1, n + 1):
        product = b @ accumulator
        c_k = -float(np.trace(product)) / k
        coefficients.append(c_k)
        accumulator = product + c_k * identity

    return [c / scale**k for k, c in enumerate(coefficients)]


def evaluate_poly(coefficients: Sequence[float], x: complex) -> complex:
    return complex(np.polyval(np.asarray(coefficients, dtype=complex), x))


@dataclass(frozen=True)
class SubspaceBasis:
    """
    정규직교 열 기저 (ambient_dim × dim)

    vectors[:, j]가 j번째 기저 벡터. dim 0 기저는 (ambient_dim, 0) 배열.
    """

    ambient_dim: int
    vectors: np.ndarray

    @property
    def dim(self) -> int:
        return int(self.vectors.shape[1])

    @classmethod
    def from_columns(cls, columns, rank_tol: float = 0.0) -> "SubspaceBasis":
        """임의 열 집합의 열공간을 정규직교 기저로 변환"""
        cols = np.asarray(columns)
        if cols.ndim != 2:
            raise DimensionMismatch(f"열 행렬은 2차원이어야 함 (ndim={cols.ndim})")
        n = cols.shape[0]
        if cols.shape[1] == 0:
            return cls(ambient_dim=n, vectors=np.zeros((n, 0), dtype=cols.dtype))
        largest = float(np.linalg.norm(cols, 2))
        if largest == 0.0:
            return cls(ambient_dim=n, vectors=np.zeros((n, 0), dtype=cols.dtype))
        cutoff = make_tolerances(rank=rank_tol or None).rank_for(largest)
        basis = sla.orth(cols, rcond=cutoff / largest)
        return cls(ambient_dim=n, vectors=basis)


def nullspace(m: DenseMatrix, shift: complex = 0.0, rank_tol: float = 0.0) -> SubspaceBasis:
    """
    ker(M − shift·I)의 정규직교 기저

    운영 시 중요사항:
    - SVD 기반 (scipy.linalg.null_space), 복소 shift면 복소 기저
    - rank_tol이 0이면 RANK_FACTOR·max(1, 최대 특이값)
    - 차원 0 결과도 정상 응답 (오류 아님)

    Args:
        m: n×n 실수 행렬
        shift: 고유값 후보 λ
        rank_tol: 수치 계수(rank) 허용 오차

    Returns:
        SubspaceBasis: E_λ 기저
    """
    a = as_matrix(m)
    n = a.shape[0]
    shift = complex(shift)
    if shift.imag != 0.0:
        shifted = a.astype(complex) - shift * np.eye(n)
    else:
        shifted = a - shift.real * np.eye(n)

    largest = float(np.linalg.norm(shifted, 2))
    if largest == 0.0:
        return SubspaceBasis(ambient_dim=n, vectors=np.eye(n, dtype=shifted.dtype))
    cutoff = make_tolerances(rank=rank_tol or None).rank_for(largest)
    basis = sla.null_space(shifted, rcond=cutoff / largest)
    return SubspaceBasis(ambient_dim=n, vectors=basis)


def intersection_dim(u: SubspaceBasis, v: SubspaceBasis, rank_tol: float = 0.0) -> int:
    """
    dim(U ∩ V) = dim U + dim V − rank([U | V])

    운영 시 중요사항:
    - 두 기저의 ambient_dim이 다르면 DimensionMismatch
    - 결과는 항상 0 ≤ r ≤ min(dim U, dim V)로 잘라서 반환
    """
    if u.ambient_dim != v.ambient_dim:
        raise DimensionMismatch(f"부분공간 차원 불일치: {u.ambient_dim} != {v.ambient_dim}")
    if u.dim == 0 or v.dim == 0:
        return 0
    stacked = np.hstack([u.vectors, v.vectors])
    singular = np.linalg.svd(stacked, compute_uv=False)
    cutoff = make_tolerances(rank=rank_tol or None).rank_for(float(singular[0]))
    rank = int(np.sum(singular > cutoff))
    return max(0, min(u.dim + v.dim - rank, u.dim, v.dim))


def match_values(
    left: Sequence[complex], right: Sequence[complex], tol: float
) -> List[Tuple[int, int]]:
    """
    복소평면 최근접 탐욕 매칭

    거리 tol 이내의 (i, j) 쌍을 거리 오름차순으로 보면서 양쪽 모두 아직 쓰지 않은
    경우만 채택한다. 결과는 i 오름차순.
    """
    candidates = []
    for i, a in enumerate(left):
        for j, b in enumerate(right):
            distance = abs(complex(a) - complex(b))
            if distance <= tol:
                candidates.append((distance, i, j))
    candidates.sort()
    used_left, used_right = set(), set()
    pairs = []
    for _, i, j in candidates:
        if i in used_left or j in used_right:
            continue
        used_left.add(i)
        used_right.add(j)
        pairs.append((i, j))
    return sorted(pairs)


def multiset_contained(inner: Sequence[complex], outer: Sequence[complex], tol: float) -> bool:
    """inner ⊆ outer (중복도 고려) 여부"""
    return len(match_values(inner, outer, tol)) == len(inner)
