#!/usr/bin/env python3
"""
equispec 보고서 문서
==================
분석 결과를 직렬화하는 pydantic 모델과 텍스트 렌더러
- JSON: 필드 선언 순서 = 키 순서, 실수는 12 유효숫자로 반올림 후 저장
- 텍스트: 같은 입력과 버전이면 줄 단위로 동일
"""

import logging
from typing import List, Optional, Sequence

from pydantic import BaseModel, ConfigDict

from capture import CaptureReport, InterlacingReport
from config import TOOL_VERSION, Tolerances
from constructions import ConstructedMatrix
from core_spectra import SpectrumSummary
from file_formats import format_complex, format_number, round_significant
from partitions import Partition, QuotientResult

logger = logging.getLogger(__name__)


class _Document(BaseModel):
    model_config = ConfigDict(frozen=True, extra="forbid")


class ComplexValue(_Document):
    re: float
    im: float


class SpectrumEntry(_Document):
    re: float
    im: float
    multiplicity: int


class SpectrumDocument(_Document):
    eigenvalues: List[SpectrumEntry]
    cluster_tolerance: float
    spectral_radius: float


class QuotientDocument(_Document):
    matrix: List[List[float]]
    equitable: bool
    max_row_sum_deviation: float


class CaptureRow(_Document):
    re: float
    im: float
    multiplicity: int
    in_quotient: bool
    eigenspace_dim: int
    intersection_dim_with_W: int
    dimension_bound: int


class CaptureDocument(_Document):
    full_capture: bool
    quotient_contained: bool
    missing: List[ComplexValue]
    rows: List[CaptureRow]


class InterlacingDocument(_Document):
    parent_sorted: List[float]
    quotient_sorted: List[float]
    interlaces: bool
    tight: bool
    tight_split_k: Optional[int]
    spectrum_contained: bool
    equitable: bool


class EnlargementDocument(_Document):
    partition: List[List[int]]
    splits: int
    quotient: QuotientDocument
    quotient_spectrum: SpectrumDocument
    full_capture: bool


class ToleranceDocument(_Document):
    """분석에 실제로 적용된 절대 허용 오차 (기본값도 환산해서 기록)"""

    equitable: float
    cluster: float
    rank: float


class AnalysisDocument(_Document):
    """
    analyze / enlarge 서브커맨드의 JSON 보고서

    운영 시 중요사항:
    - schemas/analysis_document.schema.json과 구조가 같아야 함
    - interlacing은 대칭 입력일 때만, enlargements는 enlarge 실행 시에만 채움
    - model_dump_json → model_validate_json 왕복 시 동일 (실수는 이미 반올림됨)
    """

    tool_version: str
    input_description: str
    tolerances: ToleranceDocument
    partition: List[List[int]]
    quotient: QuotientDocument
    parent_spectrum: SpectrumDocument
    quotient_spectrum: SpectrumDocument
    capture: CaptureDocument
    interlacing: Optional[InterlacingDocument] = None
    enlargements: Optional[List[EnlargementDocument]] = None


class PartitionDocument(_Document):
    n: int
    cells: int
    partition: List[List[int]]


class ConstructionDocument(_Document):
    family: str
    params: dict
    matrix: List[List[float]]
    partition: List[List[int]]
    expected: List[SpectrumEntry]
    check: Optional[CaptureDocument] = None


class GraphDocument(_Document):
    family: str
    params: dict
    kind: str
    phi: Optional[str]
    matrix: List[List[float]]
    partition: Optional[List[List[int]]]


def _num(x: float) -> float:
    return round_significant(x)


def _matrix(m) -> List[List[float]]:
    return [[_num(x) for x in row] for row in m]


def _cells(p: Partition) -> List[List[int]]:
    return [list(cell) for cell in p.cells]


def spectrum_document(summary: SpectrumSummary) -> SpectrumDocument:
    return SpectrumDocument(
        eigenvalues=[
            SpectrumEntry(re=_num(e.value.real), im=_num(e.value.imag), multiplicity=e.multiplicity)
            for e in summary.eigenvalues
        ],
        cluster_tolerance=_num(summary.cluster_tolerance),
        spectral_radius=_num(summary.spectral_radius),
    )


def quotient_document(q: QuotientResult) -> QuotientDocument:
    return QuotientDocument(
        matrix=_matrix(q.quotient),
        equitable=q.equitable,
        max_row_sum_deviation=_num(q.max_row_sum_deviation),
    )


def capture_document(report: CaptureReport) -> CaptureDocument:
    return CaptureDocument(
        full_capture=report.full_capture,
        quotient_contained=report.quotient_contained,
        missing=[ComplexValue(re=_num(z.real), im=_num(z.imag)) for z in report.missing],
        rows=[
            CaptureRow(
                re=_num(row.value.real),
                im=_num(row.value.imag),
                multiplicity=row.multiplicity,
                in_quotient=row.in_quotient,
                eigenspace_dim=row.eigenspace_dim,
                intersection_dim_with_W=row.intersection_dim_with_W,
                dimension_bound=row.dimension_bound,
            )
            for row in report.per_eigenvalue
        ],
    )


def interlacing_document(report: InterlacingReport) -> InterlacingDocument:
    return InterlacingDocument(
        parent_sorted=[_num(x) for x in report.parent_sorted],
        quotient_sorted=[_num(x) for x in report.quotient_sorted],
        interlaces=report.interlaces,
        tight=report.tight,
        tight_split_k=report.tight_split_k,
        spectrum_contained=report.spectrum_contained,
        equitable=report.equitable,
    )


def enlargement_document(seed: Partition, candidate: Partition, report: CaptureReport) -> EnlargementDocument:
    return EnlargementDocument(
        partition=_cells(candidate),
        splits=candidate.k - seed.k,
        quotient=quotient_document(report.quotient),
        quotient_spectrum=spectrum_document(report.quotient_spectrum),
        full_capture=report.full_capture,
    )


def tolerance_document(tol: Tolerances) -> ToleranceDocument:
    return ToleranceDocument(
        equitable=_num(tol.equitable or 0.0),
        cluster=_num(tol.cluster or 0.0),
        rank=_num(tol.rank or 0.0),
    )


def analysis_document(
    report: CaptureReport,
    input_description: str,
    interlacing: Optional[InterlacingReport] = None,
    enlargements: Optional[Sequence[EnlargementDocument]] = None,
) -> AnalysisDocument:
    """
    CaptureReport와 부가 결과로 AnalysisDocument 구성

    Args:
        report: analyze_capture 결과 (seed 분할 기준)
        input_description: 입력 파일/패밀리 설명
        interlacing: 대칭 입력일 때 check_interlacing 결과
        enlargements: enlarge 결과 문서 목록 (빈 목록 = 예산 안에 해 없음)
    """
    return AnalysisDocument(
        tool_version=TOOL_VERSION,
        input_description=input_description,
        tolerances=tolerance_document(report.tolerances),
        partition=_cells(report.partition),
        quotient=quotient_document(report.quotient),
        parent_spectrum=spectrum_document(report.parent_spectrum),
        quotient_spectrum=spectrum_document(report.quotient_spectrum),
        capture=capture_document(report),
        interlacing=interlacing_document(interlacing) if interlacing is not None else None,
        enlargements=list(enlargements) if enlargements is not None else None,
    )


def partition_document(p: Partition) -> PartitionDocument:
    return PartitionDocument(n=p.n, cells=p.k, partition=_cells(p))


def construction_document(built: ConstructedMatrix, check: Optional[CaptureReport] = None) -> ConstructionDocument:
    return ConstructionDocument(
        family=built.family_name,
        params={key: _num(value) for key, value in built.params.items()},
        matrix=_matrix(built.matrix),
        partition=_cells(built.designated_partition),
        expected=[
            SpectrumEntry(re=_num(complex(v).real), im=_num(complex(v).imag), multiplicity=mult)
            for v, mult in zip(built.expected_distinct, built.expected_multiplicities)
        ],
        check=capture_document(check) if check is not None else None,
    )


def to_json(doc: BaseModel) -> str:
    return doc.model_dump_json(indent=2)


# --- 텍스트 렌더링 ---------------------------------------------------------

def _value(re: float, im: float) -> str:
    return format_complex(complex(re, im))


def _spectrum_line(spectrum: SpectrumDocument) -> str:
    parts = []
    for e in spectrum.eigenvalues:
        text = _value(e.re, e.im)
        parts.append(text if e.multiplicity == 1 else f"{text}^{e.multiplicity}")
    return " ".join(parts)


def _partition_line(cells: List[List[int]]) -> str:
    return " ".join("{" + " ".join(str(x) for x in cell) + "}" for cell in cells)


def _yes(flag: bool) -> str:
    return "yes" if flag else "no"


def render_quotient(q: QuotientDocument) -> List[str]:
    lines = [f"quotient (equitable={_yes(q.equitable)}, deviation={format_number(q.max_row_sum_deviation)}):"]
    lines.extend("  " + " ".join(format_number(x) for x in row) for row in q.matrix)
    return lines


def render_interlacing(doc: InterlacingDocument) -> List[str]:
    k = "-" if doc.tight_split_k is None else str(doc.tight_split_k)
    return [
        "parent sorted: " + " ".join(format_number(x) for x in doc.parent_sorted),
        "quotient sorted: " + " ".join(format_number(x) for x in doc.quotient_sorted),
        f"interlaces: {_yes(doc.interlaces)}",
        f"tight: {_yes(doc.tight)} (k={k})",
        f"spectrum contained: {_yes(doc.spectrum_contained)}",
        f"equitable: {_yes(doc.equitable)}",
    ]


def render_analysis(doc: AnalysisDocument) -> str:
    """AnalysisDocument → 사람이 읽는 고정 형식 텍스트"""
    capture = doc.capture
    missing = " ".join(_value(z.re, z.im) for z in capture.missing) or "-"
    lines = [
        f"input: {doc.input_description}",
        f"partition: {_partition_line(doc.partition)}",
        *render_quotient(doc.quotient),
        f"parent spectrum: {_spectrum_line(doc.parent_spectrum)}",
        f"quotient spectrum: {_spectrum_line(doc.quotient_spectrum)}",
        f"full capture: {_yes(capture.full_capture)}",
        f"missing: {missing}",
        "eigenvalue\tmult\tin_Q\tdim_E\tdim_EW\tbound",
    ]
    for row in capture.rows:
        lines.append(
            f"{_value(row.re, row.im)}\t{row.multiplicity}\t{_yes(row.in_quotient)}\t"
            f"{row.eigenspace_dim}\t{row.intersection_dim_with_W}\t{row.dimension_bound}"
        )
    if doc.interlacing is not None:
        lines.extend(render_interlacing(doc.interlacing))
    if doc.enlargements is not None:
        if not doc.enlargements:
            lines.append("enlargements: none within budget")
        for item in doc.enlargements:
            lines.append(f"enlargement ({item.splits} splits): {_partition_line(item.partition)}")
            lines.append(f"  quotient spectrum: {_spectrum_line(item.quotient_spectrum)}")
    return "\n".join(lines) + "\n"


def render_construction(doc: ConstructionDocument, matrix_text: str) -> str:
    """
    construct 텍스트 출력

    행렬 본문 뒤에 '#' 주석 줄로 분할/기대 스펙트럼을 붙여서
    출력을 그대로 analyze 입력으로 넘길 수 있게 한다.
    """
    expected = _spectrum_line(
        SpectrumDocument(eigenvalues=doc.expected, cluster_tolerance=0.0, spectral_radius=0.0)
    )
    lines = [matrix_text.rstrip("\n"), f"# partition: {_partition_line(doc.partition)}", f"# expected: {expected}"]
    if doc.check is not None:
        lines.append(f"# check full capture: {_yes(doc.check.full_capture)}")
    return "\n".join(lines) + "\n"
