#!/usr/bin/env python3
"""
equispec 오류 정의
=================
모든 분석/생성/입출력 단계에서 사용하는 예외 계층
CLI는 exit_code 속성을 그대로 종료 코드로 사용한다
"""

from typing import Optional


class EquispecError(Exception):
    """
    equispec 기본 예외

    운영 시 중요사항:
    - 모든 도메인 예외의 공통 부모 (CLI에서 한 번에 처리)
    - exit_code 2 = 입력 오류 (파일, 파라미터, 전제조건 위반)
    """

    exit_code = 2


class InvalidMatrix(EquispecError):
    """정사각 행렬이 아니거나 NaN/∞ 포함"""


class InvalidPartition(EquispecError):
    """셀이 {1..n}의 분할을 이루지 않음"""


class NonConvergence(EquispecError):
    """고유값 솔버가 반복 한도 안에 수렴하지 못함"""


class OrderTooLarge(EquispecError):
    """정확 계산 경로의 차수 제한 초과"""


class DimensionMismatch(EquispecError):
    """행렬/분할/부분공간의 차원이 서로 맞지 않음"""


class SizeMismatch(EquispecError):
    """비교하는 두 분할의 n이 다름"""


class ElementNotInCell(EquispecError):
    pass


class CellTooSmall(EquispecError):
    pass


class NotEquitable(EquispecError):
    """등분할(equitable)이 아닌 분할에 대해 등분할 전용 연산을 요청함"""


class NotSymmetric(EquispecError):
    pass


class AlphaNotEigenvalue(EquispecError):
    pass


class DegenerateQuotient(EquispecError):
    """몫 행렬 고유값이 중복이거나 실수가 아님"""


class EigenvalueMismatch(EquispecError):
    pass


class AlphaZero(EquispecError):
    pass


class InvalidParams(EquispecError):
    pass


class Disconnected(EquispecError):
    """거리 기반 행렬은 연결 그래프에서만 정의됨"""


class MissingPhi(EquispecError):
    pass


class NoDesignatedPartition(EquispecError):
    pass


class ParseError(EquispecError):
    """
    입력 파일 파싱 실패

    운영 시 중요사항:
    - line_number는 1부터 시작 (파일 전체 문제일 때는 None)
    - 메시지에 줄 번호를 포함해서 사용자가 바로 위치를 찾을 수 있게 함
    """

    def __init__(self, message: str, line_number: Optional[int] = None, source: Optional[str] = None):
        self.line_number = line_number
        self.source = source
        location = ""
        if source:
            location += f"{source}"
        if line_number is not None:
            location += f"{':' if location else 'line '}{line_number}"
        super().__init__(f"{location}: {message}" if location else message)
