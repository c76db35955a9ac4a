#!/usr/bin/env python3
"""
equispec 고유값 포착 분석
=======================
몫 행렬이 부모 행렬의 서로 다른 고유값을 모두 포함하는지 판정
- 스펙트럼 포함 여부와 고유공간 교집합 기준 (E_λ ∩ W ≠ {0})
- 인터레이싱 / tight 판정, 스펙트럼 반경 일치
- 단일원소 분리(split) 기반 최소 확장 탐색
"""

import logging
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass
from typing import Dict, List, Optional, Sequence, Tuple

import numpy as np

from config import DEFAULT_MAX_SPLITS, DEFAULT_TOLERANCES, MAX_SPLITS_LIMIT, Tolerances, make_tolerances
from core_spectra import (
    DenseMatrix,
    SpectrumSummary,
    as_matrix,
    eigen_decompose,
    intersection_dim,
    match_values,
    multiset_contained,
    nullspace,
    raw_eigenvalues,
)
from errors import DimensionMismatch, InvalidParams, NotEquitable, NotSymmetric
from partitions import (
    Partition,
    QuotientResult,
    cell_space,
    characteristic_matrix,
    quotient,
    split_cell,
)

logger = logging.getLogger(__name__)


@dataclass(frozen=True)
class EigenvalueCapture:
    """부모 고유값 하나에 대한 포착 판정 행"""

    value: complex
    multiplicity: int
    in_quotient: bool
    eigenspace_dim: int
    intersection_dim_with_W: int
    dimension_bound: int


@dataclass(frozen=True)
class CaptureReport:
    """
    분할 하나에 대한 포착 분석 결과

    운영 시 중요사항:
    - full_capture == 모든 서로 다른 부모 고유값이 in_quotient
    - equitable이면 in_quotient == (intersection_dim_with_W ≥ 1)
    - quotient_contained는 σ(Q) ⊆ σ(M) (중복도 고려) 검사 결과
    - tolerances는 실제로 적용된 절대 허용 오차 (rank는 ‖M‖₂ 기준으로 환산한 값)
    """

    parent_spectrum: SpectrumSummary
    quotient_spectrum: SpectrumSummary
    per_eigenvalue: Tuple[EigenvalueCapture, ...]
    full_capture: bool
    partition: Partition
    equitable: bool
    quotient: QuotientResult
    quotient_contained: bool
    tolerances: Tolerances

    @property
    def missing(self) -> List[complex]:
        return [row.value for row in self.per_eigenvalue if not row.in_quotient]

    @property
    def criterion_consistent(self) -> bool:
        if not self.equitable:
            return True
        return all(row.in_quotient == (row.intersection_dim_with_W >= 1) for row in self.per_eigenvalue)


@dataclass(frozen=True)
class InterlacingReport:
    parent_sorted: Tuple[float, ...]
    quotient_sorted: Tuple[float, ...]
    interlaces: bool
    tight: bool
    tight_split_k: Optional[int]
    spectrum_contained: bool
    equitable: bool
    tolerance: float


def _require_equitable(a: DenseMatrix, p: Partition, tol: Tolerances) -> QuotientResult:
    result = quotient(a, p, tol.equitable_for(a))
    if not result.equitable:
        raise NotEquitable(
            f"분할 {p}는 등분할이 아님 (최대 행합 편차 {result.max_row_sum_deviation:.3g} > {result.tolerance:.3g})"
        )
    return result


def analyze_capture(m: DenseMatrix, p: Partition, tol: Optional[Tolerances] = None) -> CaptureReport:
    """
    부모 스펙트럼 대비 몫 스펙트럼의 포착 분석

    운영 시 중요사항:
    - 몫 스펙트럼은 부모와 같은 군집 허용 오차로 계산 (비교 기준 통일)
    - 포함 판정은 복소평면 최근접 탐욕 매칭 (거리 ≤ 군집 허용 오차)
    - 각 고유값마다 dim E_λ, dim(E_λ ∩ W), 하한 max(0, dim E_λ + dim W − n) 기록
    - 등분할인데 σ(Q) ⊄ σ(M)이면 경고 로그 (수치 문제 신호)
    - NonConvergence는 그대로 전파

    Args:
        m: n×n 행렬
        p: 같은 n의 분할 (등분할이 아니어도 평균 몫으로 분석)
        tol: 허용 오차 묶음 (None = 기본값)

    Returns:
        CaptureReport
    """
    tol = tol or DEFAULT_TOLERANCES
    a = as_matrix(m)
    q = quotient(a, p, tol.equitable_for(a))

    parent = eigen_decompose(a, tol.cluster or 0.0)
    cluster_tol = parent.cluster_tolerance
    child = eigen_decompose(q.quotient, cluster_tol)

    pairs = dict(match_values(parent.values, child.values, cluster_tol))
    w = cell_space(p)
    rows = []
    for index, eig in enumerate(parent.eigenvalues):
        eigenspace = nullspace(a, eig.value, tol.rank or 0.0)
        common = intersection_dim(eigenspace, w, tol.rank or 0.0)
        rows.append(
            EigenvalueCapture(
                value=eig.value,
                multiplicity=eig.multiplicity,
                in_quotient=index in pairs,
                eigenspace_dim=eigenspace.dim,
                intersection_dim_with_W=common,
                dimension_bound=max(0, eigenspace.dim + w.dim - p.n),
            )
        )

    contained = multiset_contained(child.multiset(), parent.multiset(), cluster_tol)
    if q.equitable and not contained:
        logger.warning(f"⚠️ 등분할 {p}의 몫 스펙트럼이 부모 스펙트럼에 포함되지 않음 (수치 오차 의심)")

    report = CaptureReport(
        parent_spectrum=parent,
        quotient_spectrum=child,
        per_eigenvalue=tuple(rows),
        full_capture=all(row.in_quotient for row in rows),
        partition=p,
        equitable=q.equitable,
        quotient=q,
        quotient_contained=contained,
        tolerances=make_tolerances(
            equitable=q.tolerance,
            cluster=cluster_tol,
            rank=tol.rank_for(float(np.linalg.norm(a, 2))),
        ),
    )
    if not report.criterion_consistent:
        logger.warning(f"⚠️ 분할 {p}: 포함 판정과 고유공간 기준이 불일치")
    return report


def criterion_membership(
    m: DenseMatrix, p: Partition, value: complex, tol: Optional[Tolerances] = None
) -> Tuple[bool, int]:
    """
    고유공간 기준으로 value ∈ σ(Q) 판정

    운영 시 중요사항:
    - 등분할에서만 증명된 기준이라 아니면 NotEquitable
    - value는 군집 허용 오차 이내의 가장 가까운 부모 고유값으로 스냅
      (인쇄된 6자리 값도 입력 가능), 스냅 대상이 없으면 (False, 0)

    Returns:
        (포함 여부, dim(E_value ∩ W))
    """
    tol = tol or DEFAULT_TOLERANCES
    a = as_matrix(m)
    _require_equitable(a, p, tol)
    parent = eigen_decompose(a, tol.cluster or 0.0)
    index, distance = parent.nearest(value)
    if index is None or distance > parent.cluster_tolerance:
        return False, 0
    eigenspace = nullspace(a, parent.eigenvalues[index].value, tol.rank or 0.0)
    common = intersection_dim(eigenspace, cell_space(p), tol.rank or 0.0)
    return common >= 1, common


def check_interlacing(m: DenseMatrix, p: Partition, tol: Optional[Tolerances] = None) -> InterlacingReport:
    """
    대칭 행렬에서 평균 몫 고유값의 인터레이싱 검사

    운영 시 중요사항:
    - 비대칭(편차 > 등분할 허용 오차)이면 NotSymmetric
    - 몫 고유값은 D^{-1/2}PᵀMPD^{-1/2} (평균 몫과 닮음)의 eigvalsh로 계산
    - interlaces: sᵢ ≥ s′ᵢ ≥ s_{n−m+i} (허용 오차 포함)
    - tight: 위쪽 k개는 sᵢ, 나머지는 아래쪽 값과 일치하는 k ∈ [0, m] 존재 (가장 작은 k 보고)
    - spectrum_contained: σ(Q) ⊆ σ(M) (등분할이면 항상 참)
    """
    tol = tol or DEFAULT_TOLERANCES
    a = as_matrix(m)
    limit = tol.equitable_for(a)
    asymmetry = float(np.max(np.abs(a - a.T)))
    if asymmetry > limit:
        raise NotSymmetric(f"대칭 행렬이 아님 (최대 비대칭 {asymmetry:.3g} > {limit:.3g})")
    if p.n != a.shape[0]:
        raise DimensionMismatch(f"분할 크기 {p.n}와 행렬 차수 {a.shape[0]}가 다름")

    sym = (a + a.T) / 2.0
    parent_sorted = np.sort(np.linalg.eigvalsh(sym))[::-1]
    pmat = characteristic_matrix(p)
    scale = 1.0 / np.sqrt(pmat.sum(axis=0))
    reduced = (pmat * scale).T @ sym @ (pmat * scale)
    quotient_sorted = np.sort(np.linalg.eigvalsh((reduced + reduced.T) / 2.0))[::-1]

    n, k = len(parent_sorted), len(quotient_sorted)
    interlaces = all(
        parent_sorted[i] + limit >= quotient_sorted[i] >= parent_sorted[n - k + i] - limit for i in range(k)
    )
    split = None
    if interlaces:
        for candidate in range(k + 1):
            top = all(abs(quotient_sorted[i] - parent_sorted[i]) <= limit for i in range(candidate))
            bottom = all(
                abs(quotient_sorted[i] - parent_sorted[n - k + i]) <= limit for i in range(candidate, k)
            )
            if top and bottom:
                split = candidate
                break

    return InterlacingReport(
        parent_sorted=tuple(float(x) for x in parent_sorted),
        quotient_sorted=tuple(float(x) for x in quotient_sorted),
        interlaces=interlaces,
        tight=split is not None,
        tight_split_k=split,
        spectrum_contained=multiset_contained(list(quotient_sorted), list(parent_sorted), limit),
        equitable=quotient(a, p, limit).equitable,
        tolerance=limit,
    )


def spectral_radius_coincides(m: DenseMatrix, p: Partition, tol: Optional[Tolerances] = None) -> bool:
    """
    |ρ(M) − ρ(Q)| ≤ 군집 허용 오차 판정 (기본 CLUSTER_FACTOR·max(1, ρ(M)), tol.cluster가 있으면 그 값)

    비음수 행렬에서는 보조정리대로 참, 부호가 섞인 행렬에서는 깨질 수 있다.
    """
    tol = tol or DEFAULT_TOLERANCES
    a = as_matrix(m)
    q = _require_equitable(a, p, tol)
    rho_parent = float(np.max(np.abs(raw_eigenvalues(a))))
    rho_quotient = float(np.max(np.abs(raw_eigenvalues(q.quotient))))
    return abs(rho_parent - rho_quotient) <= tol.cluster_for(rho_parent)


def twin_classes(m: DenseMatrix, p: Partition, tol: float = 0.0) -> List[List[Tuple[int, ...]]]:
    """
    셀별 쌍둥이 원소 묶음

    같은 셀의 두 원소 i, j는 전치 (i j)가 M을 보존하면 쌍둥이. 결과는 셀 순서대로,
    각 셀 안에서는 최소 원소 기준 정렬된 묶음 목록.
    """
    a = as_matrix(m)
    limit = make_tolerances(equitable=tol or None).equitable_for(a)
    result = []
    for cell in p.cells:
        classes: List[List[int]] = []
        for x in cell:
            for group in classes:
                if _is_transposition_symmetry(a, group[0] - 1, x - 1, limit):
                    group.append(x)
                    break
            else:
                classes.append([x])
        result.append([tuple(group) for group in classes])
    return result


def _is_transposition_symmetry(a: DenseMatrix, i: int, j: int, limit: float) -> bool:
    order = np.arange(a.shape[0])
    order[i], order[j] = j, i
    return float(np.max(np.abs(a[np.ix_(order, order)] - a))) <= limit


def _split_moves(a: DenseMatrix, p: Partition, limit: float) -> List[Partition]:
    moves = []
    for cell_index, classes in enumerate(twin_classes(a, p, limit), start=1):
        if len(p.cells[cell_index - 1]) < 2:
            continue
        for group in classes:
            moves.append(split_cell(p, cell_index, group[0]))
    return moves


def search_enlargement(
    m: DenseMatrix,
    p: Partition,
    max_splits: int = DEFAULT_MAX_SPLITS,
    tol: Optional[Tolerances] = None,
    workers: Optional[int] = None,
) -> List[Tuple[Partition, CaptureReport]]:
    """
    단일원소 분리를 반복해 완전 포착을 달성하는 최소 확장 분할 탐색

    운영 시 중요사항:
    - seed가 등분할이 아니면 NotEquitable, max_splits는 1..MAX_SPLITS_LIMIT
    - seed가 이미 완전 포착이면 [(seed, report)] (분리 0회)
    - 너비 우선: 깊이 d에서 등분할로 남는 분할만 다음 단계로 진행
    - 쌍둥이 원소(전치 대칭)는 최소 인덱스 하나만 분리해 중복 탐색 제거
    - workers > 1이면 후보 평가를 스레드 풀에서 병렬 실행, 결과는 항상 정규 순서로 병합
    - 예산 안에 해가 없으면 빈 목록

    Args:
        m: n×n 행렬
        p: 등분할 seed
        max_splits: 최대 분리 횟수
        tol: 허용 오차 묶음
        workers: 스레드 수 (None/1 = 직렬)

    Returns:
        List[(Partition, CaptureReport)]: 최소 분리 횟수의 해, 정규 순서
    """
    tol = tol or DEFAULT_TOLERANCES
    if not isinstance(max_splits, int) or not 1 <= max_splits <= MAX_SPLITS_LIMIT:
        raise InvalidParams(f"max_splits는 1..{MAX_SPLITS_LIMIT} 범위여야 함 (입력 {max_splits})")
    a = as_matrix(m)
    _require_equitable(a, p, tol)
    limit = tol.equitable_for(a)

    seed_report = analyze_capture(a, p, tol)
    if seed_report.full_capture:
        logger.debug("seed가 이미 완전 포착")
        return [(p, seed_report)]

    frontier = [p]
    for depth in range(1, max_splits + 1):
        candidates: Dict[Tuple[Tuple[int, ...], ...], Partition] = {}
        for parent in frontier:
            for child in _split_moves(a, parent, limit):
                if child.cells not in candidates and quotient(a, child, limit).equitable:
                    candidates[child.cells] = child
        ordered = sorted(candidates.values(), key=Partition.sort_key)
        logger.debug(f"깊이 {depth}: 등분할 후보 {len(ordered)}개")
        if not ordered:
            return []

        reports = _evaluate(a, ordered, tol, workers)
        found = [(cand, rep) for cand, rep in zip(ordered, reports) if rep.full_capture]
        if found:
            logger.info(f"✅ 분리 {depth}회로 완전 포착 분할 {len(found)}개 발견")
            return found
        frontier = ordered

    logger.info(f"⚠️ 분리 {max_splits}회 이내에 완전 포착 분할 없음")
    return []


def _evaluate(
    a: DenseMatrix, candidates: Sequence[Partition], tol: Tolerances, workers: Optional[int]
) -> List[CaptureReport]:
    if not workers or workers <= 1 or len(candidates) <= 1:
        return [analyze_capture(a, cand, tol) for cand in candidates]
    with ThreadPoolExecutor(max_workers=workers) as pool:
        # map은 입력 순서를 유지
        return list(pool.map(lambda cand: analyze_capture(a, cand, tol), candidates))
