#!/usr/bin/env python3
"""
equispec 파일 형식
================
행렬 파일: 한 줄에 한 행, 공백 구분 실수, 헤더 없음
분할 파일: 한 줄에 한 셀, 공백 구분 1-based 인덱스 (또는 "{1} {2 3}" 한 줄 형식)
간선 목록: 한 줄에 "i j", 빈 줄과 '#' 주석 무시
빈 줄과 '#'로 시작하는 줄은 모든 형식에서 무시
"""

import re
import sys
from pathlib import Path
from typing import Dict, Iterable, Iterator, List, Optional, Tuple

import numpy as np

from config import SIGNIFICANT_DIGITS
from core_spectra import DenseMatrix, as_matrix
from errors import InvalidMatrix, InvalidParams, InvalidPartition, ParseError
from partitions import Partition

_BRACE_CELL = re.compile(r"\{([^{}]*)\}")


def format_number(x: float) -> str:
    """최대 12 유효숫자, 정수는 소수점 없이, −0은 0"""
    text = f"{float(x):.{SIGNIFICANT_DIGITS}g}"
    return "0" if text in ("-0", "0") else text


def format_complex(z: complex) -> str:
    z = complex(z)
    if z.imag == 0.0:
        return format_number(z.real)
    sign = "+" if z.imag > 0 else "-"
    return f"{format_number(z.real)}{sign}{format_number(abs(z.imag))}i"


def round_significant(x: float) -> float:
    value = float(format_number(x))
    return 0.0 if value == 0.0 else value


def read_text(path: str) -> str:
    """파일 읽기, '-'는 표준 입력"""
    if path == "-":
        return sys.stdin.read()
    try:
        return Path(path).read_text(encoding="utf-8")
    except OSError as e:
        raise ParseError(f"파일을 읽을 수 없음: {e}", source=path) from e


def _content_lines(text: str) -> Iterator[Tuple[int, str]]:
    for number, raw in enumerate(text.splitlines(), start=1):
        line = raw.split("#", 1)[0].strip()
        if line:
            yield number, line


def parse_matrix(text: str, source: Optional[str] = None) -> DenseMatrix:
    """
    행렬 텍스트 파싱

    운영 시 중요사항:
    - 숫자가 아닌 토큰, 행 길이 불일치(ragged), 비정사각은 줄 번호와 함께 ParseError
    - 결과는 as_matrix로 검증된 읽기 전용 배열
    """
    rows: List[List[float]] = []
    width = None
    last_line = 0
    for number, line in _content_lines(text):
        last_line = number
        try:
            row = [float(token) for token in line.split()]
        except ValueError as e:
            raise ParseError(f"숫자가 아닌 토큰: {e}", number, source) from e
        if width is None:
            width = len(row)
        elif len(row) != width:
            raise ParseError(f"행 길이 {len(row)}가 첫 행 길이 {width}와 다름", number, source)
        rows.append(row)
    if not rows:
        raise ParseError("행렬이 비어 있음", None, source)
    if len(rows) != width:
        raise ParseError(f"정사각 행렬이 아님 ({len(rows)}×{width})", last_line, source)
    try:
        return as_matrix(rows)
    except InvalidMatrix as e:
        raise ParseError(str(e), None, source) from e


def serialize_matrix(m: DenseMatrix) -> str:
    return "\n".join(" ".join(format_number(x) for x in row) for row in np.asarray(m)) + "\n"


def _parse_indices(chunk: str, number: int, source: Optional[str]) -> List[int]:
    try:
        return [int(token) for token in chunk.replace(",", " ").split()]
    except ValueError as e:
        raise ParseError(f"정수가 아닌 인덱스: {e}", number, source) from e


def parse_partition(text: str, n: Optional[int] = None, source: Optional[str] = None) -> Partition:
    """
    분할 텍스트 파싱

    한 줄에 한 셀 형식과 "{1} {2 3 4}" 중괄호 형식을 모두 받는다.
    분할 조건 위반은 ParseError로 감싸서 보고.
    """
    cells: List[List[int]] = []
    last_line = None
    for number, line in _content_lines(text):
        last_line = number
        if "{" in line:
            groups = _BRACE_CELL.findall(line)
            if not groups:
                raise ParseError("중괄호 셀 형식이 올바르지 않음", number, source)
            cells.extend(_parse_indices(group, number, source) for group in groups)
        else:
            cells.append(_parse_indices(line, number, source))
    if not cells:
        raise ParseError("분할이 비어 있음", None, source)
    try:
        return Partition.from_cells(cells, n)
    except InvalidPartition as e:
        raise ParseError(str(e), last_line, source) from e


def serialize_partition(p: Partition) -> str:
    return "\n".join(" ".join(str(x) for x in cell) for cell in p.cells) + "\n"


def parse_edge_list(text: str, source: Optional[str] = None) -> List[Tuple[int, int]]:
    """간선 목록 파싱, 정점 수는 최대 인덱스로 추론 (build_graph에서)"""
    edges = []
    for number, line in _content_lines(text):
        tokens = line.split()
        if len(tokens) != 2:
            raise ParseError(f"간선 줄은 'i j' 두 정수여야 함 (토큰 {len(tokens)}개)", number, source)
        try:
            edges.append((int(tokens[0]), int(tokens[1])))
        except ValueError as e:
            raise ParseError(f"정수가 아닌 정점 번호: {e}", number, source) from e
    if not edges:
        raise ParseError("간선이 없음", None, source)
    return edges


def parse_params(chunks: Iterable[str]) -> Dict[str, float]:
    """
    "k=v,k=v" 파라미터 파싱

    --params를 여러 번 줘도 되고 쉼표/공백으로 구분해도 된다. 값은 실수.
    """
    params: Dict[str, float] = {}
    for chunk in chunks:
        for item in re.split(r"[,\s]+", chunk.strip()):
            if not item:
                continue
            if "=" not in item:
                raise InvalidParams(f"파라미터는 key=value 형식이어야 함: '{item}'")
            key, raw = item.split("=", 1)
            try:
                params[key.strip()] = float(raw)
            except ValueError as e:
                raise InvalidParams(f"파라미터 {key} 값이 숫자가 아님: '{raw}'") from e
    return params
