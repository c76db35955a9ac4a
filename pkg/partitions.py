#!/usr/bin/env python3
"""
equispec 분할 모듈
================
인덱스 집합 분할, 특성행렬, 등분할 판정, 몫 행렬, 최조 등분할 세분화, 열거 도구
셀 인덱스와 원소는 모두 1부터 시작
"""

import logging
from dataclasses import dataclass
from typing import Iterable, Iterator, List, Optional, Sequence, Tuple

import numpy as np

from config import ENUMERATION_MAX_ORDER, make_tolerances
from core_spectra import DenseMatrix, SubspaceBasis, as_matrix
from errors import (
    CellTooSmall,
    DimensionMismatch,
    ElementNotInCell,
    InvalidPartition,
    OrderTooLarge,
    SizeMismatch,
)

logger = logging.getLogger(__name__)


@dataclass(frozen=True)
class Partition:
    """
    {1..n}의 순서 있는 분할

    운영 시 중요사항:
    - 셀은 비어 있지 않고 서로소이며 합집합이 {1..n}
    - 정규 순서: 셀 내부 오름차순, 셀은 최소 원소 기준 정렬
    - 직접 생성하지 말고 from_cells / trivial / discrete 사용 (검증 + 정규화)
    """

    n: int
    cells: Tuple[Tuple[int, ...], ...]

    @classmethod
    def from_cells(cls, cells: Iterable[Iterable[int]], n: Optional[int] = None) -> "Partition":
        normalized = []
        for cell in cells:
            members = tuple(sorted(int(x) for x in cell))
            if not members:
                raise InvalidPartition("빈 셀은 허용되지 않음")
            normalized.append(members)
        flat = [x for cell in normalized for x in cell]
        size = n if n is not None else (max(flat) if flat else 0)
        if size < 1:
            raise InvalidPartition("분할 크기 n은 1 이상이어야 함")
        if len(flat) != len(set(flat)):
            raise InvalidPartition("셀이 서로소가 아님 (중복 원소)")
        if sorted(flat) != list(range(1, size + 1)):
            missing = sorted(set(range(1, size + 1)) - set(flat))
            extra = sorted(set(flat) - set(range(1, size + 1)))
            raise InvalidPartition(f"셀 합집합이 {{1..{size}}}가 아님 (누락 {missing}, 범위 밖 {extra})")
        normalized.sort(key=lambda c: c[0])
        return cls(n=size, cells=tuple(normalized))

    @classmethod
    def trivial(cls, n: int) -> "Partition":
        return cls.from_cells([range(1, n + 1)], n)

    @classmethod
    def discrete(cls, n: int) -> "Partition":
        return cls.from_cells([[i] for i in range(1, n + 1)], n)

    @classmethod
    def from_labels(cls, labels: Sequence[int]) -> "Partition":
        """0-based 원소별 셀 라벨 배열에서 생성"""
        groups = {}
        for index, label in enumerate(labels):
            groups.setdefault(label, []).append(index + 1)
        return cls.from_cells(groups.values(), len(labels))

    @property
    def k(self) -> int:
        return len(self.cells)

    def labels(self) -> np.ndarray:
        """원소(0-based)별 셀 번호(0-based)"""
        out = np.empty(self.n, dtype=int)
        for j, cell in enumerate(self.cells):
            for x in cell:
                out[x - 1] = j
        return out

    def cell_of(self, element: int) -> int:
        """원소가 속한 셀 번호 (1-based)"""
        for j, cell in enumerate(self.cells, start=1):
            if element in cell:
                return j
        raise ElementNotInCell(f"원소 {element}는 {{1..{self.n}}} 범위 밖")

    def sort_key(self) -> Tuple[int, Tuple[Tuple[int, ...], ...]]:
        # 셀 수 오름차순, 같으면 정규 셀 사전식
        return (self.k, self.cells)

    def __str__(self) -> str:
        return " ".join("{" + " ".join(str(x) for x in cell) + "}" for cell in self.cells)


@dataclass(frozen=True)
class QuotientResult:
    """
    평균 몫 행렬과 등분할 판정

    row_sum_table[i][j]는 셀 i의 각 행이 셀 j로 보내는 행합 목록 (진단용).
    """

    quotient: DenseMatrix
    equitable: bool
    max_row_sum_deviation: float
    row_sum_table: Tuple[Tuple[Tuple[float, ...], ...], ...]
    tolerance: float


def characteristic_matrix(p: Partition) -> np.ndarray:
    """
    분할의 특성행렬 P (n×k, 0/1)

    j번째 열이 셀 Cⱼ의 지시 벡터. 행마다 1이 정확히 하나.
    """
    out = np.zeros((p.n, p.k))
    out[np.arange(p.n), p.labels()] = 1.0
    return out


def cell_space(p: Partition) -> SubspaceBasis:
    """W = im P (셀마다 상수인 벡터 공간)의 정규직교 기저"""
    sizes = np.array([len(cell) for cell in p.cells], dtype=float)
    return SubspaceBasis(ambient_dim=p.n, vectors=characteristic_matrix(p) / np.sqrt(sizes))


def _check_size(m: DenseMatrix, p: Partition) -> None:
    if p.n != m.shape[0]:
        raise DimensionMismatch(f"분할 크기 {p.n}와 행렬 차수 {m.shape[0]}가 다름")


def quotient(m: DenseMatrix, p: Partition, tol: float = 0.0) -> QuotientResult:
    """
    평균 몫 행렬 계산 및 등분할 판정

    운영 시 중요사항:
    - Q[i, j] = 셀 i의 행들이 셀 j로 보내는 행합의 평균 (항상 반환)
    - 각 블록의 행합 범위(max − min) 최댓값을 편차로 보고
    - 편차 ≤ tol 이면 equitable (이때 M·P = P·Q가 tol 이내로 성립)
    - tol 0이면 EQUITABLE_FACTOR·max(1, ‖M‖∞)

    Args:
        m: n×n 행렬
        p: 같은 n의 분할
        tol: 등분할 허용 오차

    Returns:
        QuotientResult: 몫 행렬, 판정, 편차, 행합 표
    """
    a = as_matrix(m)
    _check_size(a, p)
    limit = make_tolerances(equitable=tol or None).equitable_for(a)

    sums = a @ characteristic_matrix(p)
    q = np.zeros((p.k, p.k))
    deviation = 0.0
    table = []
    for i, cell in enumerate(p.cells):
        rows = sums[[x - 1 for x in cell], :]
        q[i, :] = rows.mean(axis=0)
        spread = rows.max(axis=0) - rows.min(axis=0)
        deviation = max(deviation, float(spread.max()))
        table.append(tuple(tuple(float(v) for v in rows[:, j]) for j in range(p.k)))

    q.flags.writeable = False
    return QuotientResult(
        quotient=q,
        equitable=deviation <= limit,
        max_row_sum_deviation=deviation,
        row_sum_table=tuple(table),
        tolerance=limit,
    )


def is_equitable(m: DenseMatrix, p: Partition, tol: float = 0.0) -> bool:
    return quotient(m, p, tol).equitable


def _refine_once(a: DenseMatrix, p: Partition, limit: float) -> Partition:
    # 행 서명(현재 셀들로 가는 행합 벡터)이 limit 이내인 행끼리만 같은 셀에 남김
    sums = a @ characteristic_matrix(p)
    groups: List[List[int]] = []
    for cell in p.cells:
        representatives: List[np.ndarray] = []
        members: List[List[int]] = []
        for x in cell:
            signature = sums[x - 1]
            for idx, rep in enumerate(representatives):
                if np.max(np.abs(signature - rep)) <= limit:
                    members[idx].append(x)
                    break
            else:
                representatives.append(signature)
                members.append([x])
        groups.extend(members)
    return Partition.from_cells(groups, p.n)


def coarsest_equitable_refinement(m: DenseMatrix, seed: Partition, tol: float = 0.0) -> Partition:
    """
    seed를 세분하는 가장 거친 등분할 (반복 서명 세분화)

    운영 시 중요사항:
    - 각 sweep에서 셀 내부 행들을 서명으로 나눔, 셀 수가 변하지 않으면 고정점
    - 최악의 경우 단일원소 분할(항상 등분할)로 끝남
    - 결과는 정규 셀 순서라 결정적
    """
    a = as_matrix(m)
    _check_size(a, seed)
    limit = make_tolerances(equitable=tol or None).equitable_for(a)

    current = seed
    sweeps = 0
    while True:
        refined = _refine_once(a, current, limit)
        sweeps += 1
        if refined.k == current.k:
            break
        current = refined
    logger.debug(f"세분화 완료: {sweeps} sweeps, {current.k}개 셀")
    return current


def split_cell(p: Partition, cell_index: int, element: int) -> Partition:
    """
    셀 하나를 {element}와 나머지로 분리

    Args:
        p: 원래 분할
        cell_index: 1-based 셀 번호
        element: 분리할 원소 (그 셀에 속해야 함)
    """
    if not 1 <= cell_index <= p.k:
        raise ElementNotInCell(f"셀 번호 {cell_index}가 범위 1..{p.k} 밖")
    cell = p.cells[cell_index - 1]
    if element not in cell:
        raise ElementNotInCell(f"원소 {element}는 셀 {cell_index} {set(cell)}에 없음")
    if len(cell) < 2:
        raise CellTooSmall(f"셀 {cell_index}는 원소가 하나뿐이라 분리 불가")
    rest = tuple(x for x in cell if x != element)
    cells = list(p.cells[: cell_index - 1]) + [(element,), rest] + list(p.cells[cell_index:])
    return Partition.from_cells(cells, p.n)


def enumerate_partitions(n: int) -> Iterator[Partition]:
    """
    {1..n}의 모든 집합 분할 (restricted growth string 사전식 순서)

    운영 시 중요사항:
    - n > ENUMERATION_MAX_ORDER(=10, Bell(10)=115975) 이면 OrderTooLarge
    - 생성기라 단일 소비자 전용
    """
    if n > ENUMERATION_MAX_ORDER:
        raise OrderTooLarge(f"분할 열거는 n ≤ {ENUMERATION_MAX_ORDER}만 지원 (n={n})")
    if n < 1:
        raise InvalidPartition("n은 1 이상이어야 함")

    growth = [0] * n
    maxima = [0] * n
    while True:
        yield Partition.from_labels(growth)
        # 가장 오른쪽에서 증가 가능한 위치 찾기
        i = n - 1
        while i > 0 and growth[i] == maxima[i - 1] + 1:
            i -= 1
        if i == 0:
            return
        growth[i] += 1
        maxima[i] = max(maxima[i - 1], growth[i])
        for j in range(i + 1, n):
            growth[j] = 0
            maxima[j] = maxima[i]


def refines(p: Partition, q: Partition) -> bool:
    """p의 모든 셀이 q의 어떤 셀에 포함되면 True"""
    if p.n != q.n:
        raise SizeMismatch(f"분할 크기 불일치: {p.n} != {q.n}")
    labels = q.labels()
    return all(len({labels[x - 1] for x in cell}) == 1 for cell in p.cells)


def equitable_partitions(
    m: DenseMatrix, seed: Optional[Partition] = None, tol: float = 0.0
) -> Iterator[Partition]:
    """seed를 세분하는 모든 등분할 (열거 기반, n ≤ 10)"""
    a = as_matrix(m)
    base = seed or Partition.trivial(a.shape[0])
    _check_size(a, base)
    for candidate in enumerate_partitions(a.shape[0]):
        if refines(candidate, base) and quotient(a, candidate, tol).equitable:
            yield candidate


def rank_equitable_partitions(
    m: DenseMatrix, seed: Optional[Partition] = None, tol: float = 0.0
) -> List[Partition]:
    """
    등분할을 "작은 순"으로 정렬

    셀 수 오름차순, 같으면 정규 셀 사전식. 두 번째 원소가
    "두 번째로 작은 등분할"이다.
    """
    return sorted(equitable_partitions(m, seed, tol), key=Partition.sort_key)
