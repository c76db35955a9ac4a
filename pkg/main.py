#!/usr/bin/env python3
"""
equispec - 명령줄 진입점
======================
등분할 몫 행렬의 고유값 포착 분석 도구
서브커맨드: analyze | refine | enlarge | construct | graph | interlace
종료 코드: 0 성공/완전 포착, 3 분석 결과 부정, 2 입력 오류
"""

import argparse
import logging
import sys
from pathlib import Path
from typing import List, Optional

import numpy as np

from capture import analyze_capture, check_interlacing, search_enlargement
from config import (
    DEFAULT_MAX_SPLITS,
    MAX_SPLITS_LIMIT,
    TOOL_VERSION,
    Tolerances,
    log_level_from_env,
    make_tolerances,
    reserved_seed,
)
from constructions import FAMILIES, build_family
from core_spectra import DenseMatrix, as_matrix, is_symmetric
from documents import (
    GraphDocument,
    analysis_document,
    construction_document,
    enlargement_document,
    interlacing_document,
    partition_document,
    render_analysis,
    render_construction,
    render_interlacing,
    to_json,
)
from errors import DimensionMismatch, EquispecError, InvalidParams, NoDesignatedPartition
from file_formats import (
    parse_edge_list,
    parse_matrix,
    parse_params,
    parse_partition,
    read_text,
    round_significant,
    serialize_matrix,
    serialize_partition,
)
from graph_matrices import GRAPH_FAMILIES, MATRIX_KINDS, build_graph, designated_partition, graph_matrix, weight_preset
from partitions import Partition, coarsest_equitable_refinement

logger = logging.getLogger(__name__)

EXIT_OK = 0
EXIT_NEGATIVE = 3


def status(message: str) -> None:
    """상태 줄은 stderr로 (stdout은 보고서 전용)"""
    print(message, file=sys.stderr)


def emit(text: str) -> None:
    sys.stdout.write(text if text.endswith("\n") else text + "\n")


# --- 입력 로딩 -------------------------------------------------------------

def tolerances_from_args(args: argparse.Namespace) -> Tolerances:
    return make_tolerances(args.tol_equitable, args.tol_cluster, args.tol_rank)


def load_matrix(path: str, transpose: bool = False) -> DenseMatrix:
    m = parse_matrix(read_text(path), source=path)
    # 열합 몫은 전치 행렬의 행합 몫
    return as_matrix(m.T) if transpose else m


def load_partition(path: Optional[str], n: int) -> Optional[Partition]:
    if path is None:
        return None
    p = parse_partition(read_text(path), source=path)
    if p.n != n:
        raise DimensionMismatch(f"{path}: 분할 크기 {p.n}와 행렬 차수 {n}가 다름")
    return p


def seed_or_refinement(m: DenseMatrix, seed: Optional[Partition], tol: Tolerances) -> Partition:
    if seed is not None:
        return seed
    refined = coarsest_equitable_refinement(m, Partition.trivial(m.shape[0]), tol.equitable_for(m))
    status(f"🔍 분할 생략: 최조 등분할 세분화 사용 → {refined}")
    return refined


def _analysis(m: DenseMatrix, p: Partition, description: str, tol: Tolerances, as_json: bool) -> int:
    report = analyze_capture(m, p, tol)
    interlacing = check_interlacing(m, p, tol) if is_symmetric(m) else None
    doc = analysis_document(report, description, interlacing=interlacing)
    emit(to_json(doc) if as_json else render_analysis(doc))
    if report.full_capture:
        status("✅ 몫 행렬이 모든 서로 다른 고유값을 포함")
        return EXIT_OK
    status(f"⚠️ 누락 고유값 {len(report.missing)}개")
    return EXIT_NEGATIVE


# --- 서브커맨드 ------------------------------------------------------------

def cmd_analyze(args: argparse.Namespace) -> int:
    """
    행렬 파일 (+ 분할 파일) 포착 분석

    운영 시 중요사항:
    - 분할 파일이 없으면 단일 셀에서 시작한 최조 등분할 세분화를 사용
    - 대칭 입력이면 인터레이싱 결과도 보고서에 포함
    - 완전 포착이면 0, 아니면 3
    """
    tol = tolerances_from_args(args)
    m = load_matrix(args.matrix_file, args.transpose)
    p = seed_or_refinement(m, load_partition(args.partition_file, m.shape[0]), tol)
    status(f"🔍 분석 중: {args.matrix_file} (n={m.shape[0]}, 셀 {p.k}개)")
    return _analysis(m, p, args.matrix_file, tol, args.json)


def cmd_refine(args: argparse.Namespace) -> int:
    tol = tolerances_from_args(args)
    m = load_matrix(args.matrix_file, args.transpose)
    seed = load_partition(args.seed_partition_file, m.shape[0]) or Partition.trivial(m.shape[0])
    refined = coarsest_equitable_refinement(m, seed, tol.equitable_for(m))
    emit(to_json(partition_document(refined)) if args.json else str(refined))
    status(f"✅ 최조 등분할: 셀 {refined.k}개")
    return EXIT_OK


def cmd_enlarge(args: argparse.Namespace) -> int:
    """
    단일원소 분리로 완전 포착 분할 탐색

    운영 시 중요사항:
    - seed 분할은 등분할이어야 함 (아니면 NotEquitable → 2)
    - 해를 찾으면 0, 예산 안에 없으면 "none within budget"과 함께 3
    """
    tol = tolerances_from_args(args)
    m = load_matrix(args.matrix_file, args.transpose)
    seed = load_partition(args.partition_file, m.shape[0])
    status(f"🔍 확장 탐색: 최대 분리 {args.max_splits}회, workers={args.workers or 1}")
    found = search_enlargement(m, seed, args.max_splits, tol, args.workers)

    seed_report = analyze_capture(m, seed, tol)
    enlargements = [enlargement_document(seed, cand, rep) for cand, rep in found]
    doc = analysis_document(seed_report, args.matrix_file, enlargements=enlargements)
    emit(to_json(doc) if args.json else render_analysis(doc))
    if found:
        status(f"✅ 분리 {enlargements[0].splits}회 해 {len(found)}개")
        return EXIT_OK
    status("⚠️ none within budget")
    return EXIT_NEGATIVE


def cmd_construct(args: argparse.Namespace) -> int:
    built = build_family(args.family, parse_params(args.params or []))
    check = analyze_capture(built.matrix, built.designated_partition) if args.check else None
    doc = construction_document(built, check)

    matrix_text = serialize_matrix(built.matrix)
    if args.matrix_out:
        Path(args.matrix_out).write_text(matrix_text, encoding="utf-8")
    if args.partition_out:
        Path(args.partition_out).write_text(serialize_partition(built.designated_partition), encoding="utf-8")
    emit(to_json(doc) if args.json else render_construction(doc, matrix_text))

    status(f"✅ {built.family_name} 생성 (n={built.matrix.shape[0]})")
    if check is not None and not check.full_capture:
        status(f"❌ --check 실패: 누락 고유값 {len(check.missing)}개")
        return EXIT_NEGATIVE
    return EXIT_OK


def cmd_graph(args: argparse.Namespace) -> int:
    """
    그래프 패밀리 행렬 출력 (--analyze면 포착 분석까지)

    운영 시 중요사항:
    - custom 패밀리는 --edges 파일 필요
    - weighted_adjacency는 --phi 필요 (없으면 MissingPhi)
    - 지정 분할이 없는 그래프(custom)는 --analyze 시 최조 등분할 세분화 사용
    """
    tol = tolerances_from_args(args)
    params = dict(parse_params(args.params or []))
    if args.family == "custom":
        if not args.edges:
            raise InvalidParams("custom 그래프에는 --edges 파일이 필요함")
        params["edges"] = parse_edge_list(read_text(args.edges), source=args.edges)
    g = build_graph(args.family, params)
    phi = weight_preset(args.phi) if args.phi else None
    m = graph_matrix(g, args.kind, phi)
    if args.transpose:
        m = as_matrix(m.T)

    try:
        designated = designated_partition(g)
    except NoDesignatedPartition:
        designated = None

    description = f"graph {args.family} {args.kind}" + (f" phi={phi.tag}" if phi else "")
    if args.analyze:
        p = seed_or_refinement(m, designated, tol)
        status(f"🔍 그래프 분석: {description} (n={m.shape[0]})")
        return _analysis(m, p, description, tol, args.json)

    if args.json:
        emit(
            to_json(
                GraphDocument(
                    family=args.family,
                    params=dict(g.graph["params"]),
                    kind=args.kind,
                    phi=phi.tag if phi else None,
                    matrix=[[round_significant(x) for x in row] for row in np.asarray(m)],
                    partition=[list(c) for c in designated.cells] if designated else None,
                )
            )
        )
    else:
        lines = [serialize_matrix(m).rstrip("\n")]
        if designated is not None:
            lines.append(f"# partition: {designated}")
        if phi is not None:
            lines.append(f"# phi: {phi.tag}")
        emit("\n".join(lines))
    status(f"✅ {description} (n={m.shape[0]})")
    return EXIT_OK


def cmd_interlace(args: argparse.Namespace) -> int:
    tol = tolerances_from_args(args)
    m = load_matrix(args.matrix_file, args.transpose)
    p = load_partition(args.partition_file, m.shape[0])
    report = check_interlacing(m, p, tol)
    doc = interlacing_document(report)
    emit(to_json(doc) if args.json else "\n".join(render_interlacing(doc)))
    return EXIT_OK if report.interlaces else EXIT_NEGATIVE


# --- 파서 -------------------------------------------------------------------

def build_parser() -> argparse.ArgumentParser:
    common = argparse.ArgumentParser(add_help=False)
    common.add_argument("--json", action="store_true", help="JSON 보고서 출력")
    common.add_argument("--tol-equitable", type=float, default=None, help="등분할 행합 허용 오차 (절대값)")
    common.add_argument("--tol-cluster", type=float, default=None, help="고유값 군집 허용 오차 (절대값)")
    common.add_argument("--tol-rank", type=float, default=None, help="수치 랭크 허용 오차 (절대값)")
    common.add_argument("--transpose", action="store_true", help="열합 몫 사용 (행렬 전치 후 분석)")
    common.add_argument("-v", "--verbose", action="store_true", help="DEBUG 로그")

    parser = argparse.ArgumentParser(
        prog="equispec",
        description="등분할 몫 행렬과 서로 다른 고유값 포착 분석",
    )
    parser.add_argument("--version", action="version", version=f"%(prog)s {TOOL_VERSION}")
    sub = parser.add_subparsers(dest="command", required=True)

    p = sub.add_parser("analyze", parents=[common], help="포착 분석")
    p.add_argument("matrix_file", help="행렬 파일 ('-' = stdin)")
    p.add_argument("partition_file", nargs="?", help="분할 파일 (생략 시 최조 등분할)")
    p.set_defaults(handler=cmd_analyze)

    p = sub.add_parser("refine", parents=[common], help="최조 등분할 세분화")
    p.add_argument("matrix_file")
    p.add_argument("seed_partition_file", nargs="?")
    p.set_defaults(handler=cmd_refine)

    p = sub.add_parser("enlarge", parents=[common], help="완전 포착 확장 분할 탐색")
    p.add_argument("matrix_file")
    p.add_argument("partition_file")
    p.add_argument("--max-splits", type=int, default=DEFAULT_MAX_SPLITS, help=f"1..{MAX_SPLITS_LIMIT}")
    p.add_argument("--workers", type=int, default=None, help="후보 평가 스레드 수")
    p.set_defaults(handler=cmd_enlarge)

    p = sub.add_parser("construct", parents=[common], help="처방 스펙트럼 행렬 패밀리 생성")
    p.add_argument("--family", required=True, choices=sorted(FAMILIES))
    p.add_argument("--params", action="append", help="k=v,k=v (여러 번 가능)")
    p.add_argument("--check", action="store_true", help="생성 후 완전 포착 확인")
    p.add_argument("--matrix-out", help="행렬 파일로도 저장")
    p.add_argument("--partition-out", help="지정 분할 파일로 저장")
    p.set_defaults(handler=cmd_construct)

    p = sub.add_parser("graph", parents=[common], help="그래프 패밀리 행렬")
    p.add_argument("--family", required=True, choices=GRAPH_FAMILIES)
    p.add_argument("--params", action="append", help="k=v,k=v (여러 번 가능)")
    p.add_argument("--edges", help="custom 패밀리 간선 목록 파일")
    p.add_argument("--kind", required=True, choices=MATRIX_KINDS)
    p.add_argument("--phi", help="가중치 프리셋 (weighted_adjacency)")
    p.add_argument("--analyze", action="store_true", help="지정 분할로 포착 분석")
    p.set_defaults(handler=cmd_graph)

    p = sub.add_parser("interlace", parents=[common], help="인터레이싱 검사 (대칭 행렬)")
    p.add_argument("matrix_file")
    p.add_argument("partition_file")
    p.set_defaults(handler=cmd_interlace)

    return parser


def configure_logging(verbose: bool) -> None:
    # 이미 핸들러가 있으면 (테스트 러너 등) basicConfig는 아무것도 하지 않음
    level = logging.DEBUG if verbose else logging.INFO
    logging.basicConfig(
        level=log_level_from_env(level),
        format="%(asctime)s %(levelname)s %(name)s: %(message)s",
        stream=sys.stderr,
    )


def main(argv: Optional[List[str]] = None) -> int:
    """
    CLI 진입점

    운영 시 중요사항:
    - EquispecError는 "❌ 메시지"를 stderr에 쓰고 해당 exit_code(2) 반환
    - argparse 사용법 오류는 argparse 관례대로 SystemExit(2)
    """
    args = build_parser().parse_args(argv)
    configure_logging(args.verbose)
    if args.verbose:
        status(f"🚀 equispec {TOOL_VERSION} ({args.command})")
        seed = reserved_seed()
        if seed is not None:
            status(f"📊 EQUISPEC_SEED={seed} (예약됨, 결정적 경로에서는 미사용)")

    try:
        return args.handler(args)
    except EquispecError as e:
        status(f"❌ {e}")
        logger.debug("입력 오류 상세", exc_info=True)
        return e.exit_code


if __name__ == "__main__":
    sys.exit(main())
