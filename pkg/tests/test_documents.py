import json
from pathlib import Path

import jsonschema
import numpy as np
import pytest

from capture import analyze_capture, check_interlacing, search_enlargement
from config import RANK_FACTOR, TOOL_VERSION, Tolerances
from constructions import construct_3x3
from documents import (
    AnalysisDocument,
    analysis_document,
    construction_document,
    enlargement_document,
    partition_document,
    render_analysis,
    render_construction,
    to_json,
)
from file_formats import parse_matrix, serialize_matrix
from graph_matrices import build_graph, designated_partition, graph_matrix

SCHEMA = json.loads(
    (Path(__file__).resolve().parent.parent / "schemas" / "analysis_document.schema.json").read_text(encoding="utf-8")
)


@pytest.fixture
def counterexample_document(counterexample, counterexample_partition) -> AnalysisDocument:
    report = analyze_capture(counterexample, counterexample_partition)
    return analysis_document(report, "counterexample.txt")


def test_document_fields_and_rounding(counterexample_document) -> None:
    doc = counterexample_document
    assert doc.tool_version == TOOL_VERSION
    assert doc.partition == [[1, 2], [3, 4]]
    assert doc.quotient.matrix == [[9.0, -5.0], [12.0, -13.0]]
    assert [e.re for e in doc.parent_spectrum.eigenvalues] == [11.0, 5.81024967591, -9.81024967591, -15.0]
    assert [(z.re, z.im) for z in doc.capture.missing] == [(11.0, 0.0), (-15.0, 0.0)]
    # 기본값도 실제 적용된 절대값으로 기록 (‖M‖∞ = 27, ρ = 15)
    assert doc.tolerances.equitable == pytest.approx(2.7e-7)
    assert doc.tolerances.cluster == pytest.approx(1.5e-5)
    assert doc.interlacing is None and doc.enlargements is None


def test_json_round_trip_and_key_order(counterexample_document) -> None:
    text = to_json(counterexample_document)
    assert AnalysisDocument.model_validate_json(text) == counterexample_document
    assert list(json.loads(text)) == [
        "tool_version",
        "input_description",
        "tolerances",
        "partition",
        "quotient",
        "parent_spectrum",
        "quotient_spectrum",
        "capture",
        "interlacing",
        "enlargements",
    ]
    assert to_json(AnalysisDocument.model_validate_json(text)) == text


def test_json_validates_against_schema(counterexample_document) -> None:
    jsonschema.validate(json.loads(to_json(counterexample_document)), SCHEMA)


def test_full_document_validates_against_schema() -> None:
    g = build_graph("pendant_k3", {"a": 2})
    m = graph_matrix(g, "laplacian")
    seed = designated_partition(g)
    found = search_enlargement(m, seed, max_splits=1)
    doc = analysis_document(
        analyze_capture(m, seed, Tolerances(cluster=1e-6)),
        "pendant laplacian",
        interlacing=check_interlacing(m, seed),
        enlargements=[enlargement_document(seed, p, r) for p, r in found],
    )
    payload = json.loads(to_json(doc))
    jsonschema.validate(payload, SCHEMA)
    assert payload["enlargements"][0]["splits"] == 1
    assert payload["tolerances"]["cluster"] == 1e-6


def test_schema_rejects_unknown_fields(counterexample_document) -> None:
    payload = json.loads(to_json(counterexample_document))
    payload["extra"] = 1
    with pytest.raises(jsonschema.ValidationError):
        jsonschema.validate(payload, SCHEMA)


def test_text_report_is_stable(counterexample_document) -> None:
    text = render_analysis(counterexample_document)
    assert text == render_analysis(counterexample_document)
    lines = text.splitlines()
    assert lines[0] == "input: counterexample.txt"
    assert lines[1] == "partition: {1 2} {3 4}"
    assert lines[2] == "quotient (equitable=yes, deviation=0):"
    assert lines[3:5] == ["  9 -5", "  12 -13"]
    assert "full capture: no" in lines
    assert "missing: 11 -15" in lines


def test_empty_enlargement_list_is_reported(counterexample, counterexample_partition) -> None:
    report = analyze_capture(counterexample, counterexample_partition)
    doc = analysis_document(report, "x", enlargements=[])
    assert "enlargements: none within budget" in render_analysis(doc)


def test_construction_output_is_a_matrix_file(m3_matrix) -> None:
    built = construct_3x3(1, -8, 4, 13, 5)
    check = analyze_capture(built.matrix, built.designated_partition)
    doc = construction_document(built, check)
    text = render_construction(doc, serialize_matrix(built.matrix))
    assert (parse_matrix(text) == m3_matrix).all()
    assert "# partition: {1} {2 3}" in text
    assert "# expected: 9 5^2" in text
    assert "# check full capture: yes" in text
    assert doc.check.full_capture


def test_partition_document(counterexample_partition) -> None:
    doc = partition_document(counterexample_partition)
    assert json.loads(to_json(doc)) == {"n": 4, "cells": 2, "partition": [[1, 2], [3, 4]]}


def test_recorded_tolerances_reproduce_the_report(counterexample, counterexample_partition) -> None:
    report = analyze_capture(counterexample, counterexample_partition)
    recorded = analysis_document(report, "x").tolerances
    assert recorded.rank == pytest.approx(RANK_FACTOR * np.linalg.norm(counterexample, 2))

    replay = analyze_capture(
        counterexample,
        counterexample_partition,
        Tolerances(equitable=recorded.equitable, cluster=recorded.cluster, rank=recorded.rank),
    )
    assert replay.missing == report.missing
    assert replay.quotient.tolerance == pytest.approx(report.quotient.tolerance)
    assert replay.parent_spectrum.cluster_tolerance == pytest.approx(report.parent_spectrum.cluster_tolerance)
