import math

import numpy as np
import pytest
from numpy.testing import assert_allclose

from capture import analyze_capture
from core_spectra import char_poly, eigen_decompose, evaluate_poly, nullspace
from errors import Disconnected, InvalidParams, MissingPhi, NoDesignatedPartition
from graph_matrices import (
    MATRIX_KINDS,
    build_graph,
    designated_partition,
    distance_matrix,
    graph_matrix,
    graph_quotient,
    twin_enlargement,
    twin_sets,
    weight_preset,
    weight_presets,
)
from partitions import Partition

UNWEIGHTED_KINDS = [kind for kind in MATRIX_KINDS if kind != "weighted_adjacency"]


def _multiplicity(m: np.ndarray, value: float) -> int:
    return nullspace(m, value).dim


def test_pendant_graph_layout() -> None:
    g = build_graph("pendant_k3", {"a": 3})
    assert g.number_of_nodes() == 7
    assert g.number_of_edges() == 7
    assert g.nodes[1]["label"] == "u" and g.nodes[7]["label"] == "b"
    assert sorted(g.neighbors(2)) == [1, 3, 7]
    assert designated_partition(g).cells == ((1,), (2,), (3,), (4, 5, 6), (7,))


def test_pendant_17_partition_sizes() -> None:
    g = build_graph("pendant_k3", {"a": 17})
    assert [len(cell) for cell in designated_partition(g).cells] == [1, 1, 1, 17, 1]


@pytest.mark.parametrize("kind", UNWEIGHTED_KINDS)
def test_matrix_invariants(kind) -> None:
    g = build_graph("pendant_k3", {"a": 4})
    m = graph_matrix(g, kind)
    assert_allclose(m, m.T)
    degrees = np.array([g.degree(v) for v in sorted(g.nodes)], dtype=float)
    if kind in ("laplacian", "distance_laplacian"):
        assert_allclose(m.sum(axis=1), 0.0, atol=1e-12)
    if kind in ("laplacian", "signless_laplacian"):
        assert_allclose(np.diag(m), degrees)
    if kind == "distance":
        assert_allclose(np.diag(m), 0.0)
        assert np.all(m[~np.eye(len(m), dtype=bool)] >= 1.0)


def test_adjacency_spectrum_of_pendant_graph() -> None:
    m = graph_matrix(build_graph("pendant_k3", {"a": 2}), "adjacency")
    summary = eigen_decompose(m)
    assert_allclose(
        [v.real for v in summary.values],
        [2.44579, 0.796815, 0.0, -1.37033, -1.87228],
        atol=1e-4,
    )
    assert summary.multiplicities == [1, 1, 2, 1, 1]


@pytest.mark.parametrize("a", [2, 3, 4, 5, 6])
def test_pendant_quotient_characteristic_polynomials(a) -> None:
    g = build_graph("pendant_k3", {"a": a})
    adjacency = char_poly(graph_quotient(g, "adjacency").quotient)
    laplacian = char_poly(graph_quotient(g, "laplacian").quotient)
    signless = char_poly(graph_quotient(g, "signless_laplacian").quotient)
    assert_allclose(adjacency, [1, 0, -(a + 4), -2, 2 * a + 1, 0], atol=1e-8)
    assert_allclose(laplacian, [1, -(a + 9), 6 * a + 27, -(9 * a + 31), 3 * a + 12, 0], atol=1e-8)
    assert_allclose(signless, [1, -(a + 9), 6 * a + 27, -(9 * a + 35), 3 * a + 20, -4], atol=1e-8)
    assert abs(evaluate_poly(laplacian, 1.0)) > 0.5
    assert abs(evaluate_poly(signless, 1.0)) > 0.5


@pytest.mark.parametrize("a", range(2, 9))
def test_pendant_multiplicities(a) -> None:
    g = build_graph("pendant_k3", {"a": a})
    assert _multiplicity(graph_matrix(g, "adjacency"), 0.0) >= a - 1
    assert _multiplicity(graph_matrix(g, "laplacian"), 1.0) == a - 1
    assert _multiplicity(graph_matrix(g, "signless_laplacian"), 1.0) == a - 1


@pytest.mark.parametrize("a", range(2, 9))
@pytest.mark.parametrize("phi", [p.name for p in weight_presets()])
def test_weighted_adjacency_captures_everything(a, phi) -> None:
    g = build_graph("pendant_k3", {"a": a})
    m = graph_matrix(g, "weighted_adjacency", weight_preset(phi))
    report = analyze_capture(m, designated_partition(g))
    assert report.equitable
    assert report.full_capture


@pytest.mark.parametrize("a", range(2, 9))
@pytest.mark.parametrize("kind", ["laplacian", "signless_laplacian"])
def test_laplacians_miss_one(a, kind) -> None:
    g = build_graph("pendant_k3", {"a": a})
    report = analyze_capture(graph_matrix(g, kind), designated_partition(g))
    assert not report.full_capture
    assert_allclose([v.real for v in report.missing], [1.0], atol=1e-8)


DISTANCE_TWIN_CASES = [
    # (종류, 쌍둥이 고유값, |det(Q − λI)| 닫힌 식)
    ("distance", lambda a: -2.0, lambda a: 4 * a),
    ("distance_laplacian", lambda a: 2 * a + 8.0, lambda a: 10 * a * (a + 4) ** 2),
    ("distance_signless_laplacian", lambda a: 2 * a + 4.0, lambda a: 2 * a * (5 * a**2 - 8 * a - 4)),
]


@pytest.mark.parametrize("a", range(2, 9))
@pytest.mark.parametrize("kind, twin, gap", DISTANCE_TWIN_CASES, ids=[c[0] for c in DISTANCE_TWIN_CASES])
def test_distance_matrices_of_pendant_graph(a, kind, twin, gap) -> None:
    g = build_graph("pendant_k3", {"a": a})
    report = analyze_capture(graph_matrix(g, kind), designated_partition(g))
    assert report.criterion_consistent

    value = twin(a)
    row = next(r for r in report.per_eigenvalue if abs(r.value - value) < 1e-8)
    assert row.multiplicity >= a - 1
    q = report.quotient.quotient
    assert abs(np.linalg.det(q - value * np.eye(5))) == pytest.approx(abs(gap(a)), rel=1e-9, abs=1e-6)

    if gap(a) == 0:
        # 거리 무부호 라플라시안은 a = 2에서만 몫이 2a + 4를 가짐
        assert kind == "distance_signless_laplacian" and a == 2
        assert report.full_capture
    else:
        assert not report.full_capture
        assert_allclose([v.real for v in report.missing], [value], atol=1e-8)


@pytest.mark.parametrize("a, b", [(2, 3), (3, 4), (4, 2)])
def test_complete_bipartite_laplacian_quotient(a, b) -> None:
    g = build_graph("complete_bipartite", {"a": a, "b": b})
    assert designated_partition(g) == Partition.from_cells([range(1, a + 1), range(a + 1, a + b + 1)])
    q = graph_quotient(g, "laplacian")
    assert q.equitable
    assert_allclose(sorted(np.linalg.eigvals(q.quotient).real), [0.0, a + b], atol=1e-10)


def test_complete_split_distance_signless_block_form() -> None:
    m = graph_matrix(build_graph("complete_split", {"omega": 3, "alpha": 2}), "distance_signless_laplacian")
    expected = np.array(
        [
            [4, 1, 1, 1, 1],
            [1, 4, 1, 1, 1],
            [1, 1, 4, 1, 1],
            [1, 1, 1, 5, 2],
            [1, 1, 1, 2, 5],
        ],
        dtype=float,
    )
    assert_allclose(m, expected)


@pytest.mark.parametrize("omega", [2, 3, 4, 5])
@pytest.mark.parametrize("alpha", [2, 3, 4, 5])
def test_complete_split_distance_signless_quotients(omega, alpha) -> None:
    g = build_graph("complete_split", {"omega": omega, "alpha": alpha})
    q = graph_quotient(g, "distance_signless_laplacian")
    assert_allclose(q.quotient, [[alpha + 2 * omega - 2, alpha], [omega, 4 * alpha + omega - 4]])
    root = math.sqrt(9 * alpha**2 - 2 * alpha * omega - 12 * alpha + omega**2 + 4 * omega + 4)
    centre = 5 * alpha + 3 * omega - 6
    assert_allclose(
        sorted(np.linalg.eigvals(q.quotient).real), [(centre - root) / 2, (centre + root) / 2], atol=1e-8
    )

    enlarged = twin_enlargement(g, designated_partition(g))
    assert enlarged.k == 4
    values = np.linalg.eigvals(graph_quotient(g, "distance_signless_laplacian", enlarged).quotient).real
    for target in (alpha + omega - 2, 2 * alpha + omega - 4):
        assert np.min(np.abs(values - target)) < 1e-8


def test_complete_graph() -> None:
    g = build_graph("complete", {"n": 4})
    assert designated_partition(g) == Partition.trivial(4)
    assert_allclose(graph_matrix(g, "adjacency"), np.ones((4, 4)) - np.eye(4))
    assert twin_sets(g) == [("clique", (1, 2, 3, 4))]


def test_twin_sets_and_enlargement() -> None:
    g = build_graph("pendant_k3", {"a": 3})
    assert twin_sets(g) == [("independent", (4, 5, 6))]
    assert str(twin_enlargement(g, designated_partition(g))) == "{1} {2} {3} {4} {5 6} {7}"
    bipartite = build_graph("complete_bipartite", {"a": 2, "b": 3})
    assert twin_sets(bipartite) == [("independent", (1, 2)), ("independent", (3, 4, 5))]


def test_custom_graph() -> None:
    g = build_graph("custom", {"edges": [(1, 2), (2, 3), (3, 4)]})
    assert g.number_of_nodes() == 4
    assert_allclose(distance_matrix(g)[0], [0, 1, 2, 3])
    with pytest.raises(NoDesignatedPartition):
        designated_partition(g)


@pytest.mark.parametrize(
    "family, params",
    [
        ("pendant_k3", {"a": 1}),
        ("pendant_k3", {}),
        ("complete_bipartite", {"a": 2, "b": 0}),
        ("custom", {"edges": [(1, 1)]}),
        ("custom", {"edges": [(1, 2), (2, 1)]}),
        ("custom", {"edges": [(0, 1)]}),
        ("wheel", {"n": 5}),
    ],
)
def test_build_graph_rejects_bad_input(family, params) -> None:
    with pytest.raises(InvalidParams):
        build_graph(family, params)


def test_graph_matrix_errors() -> None:
    g = build_graph("pendant_k3", {"a": 2})
    with pytest.raises(MissingPhi):
        graph_matrix(g, "weighted_adjacency")
    with pytest.raises(InvalidParams):
        graph_matrix(g, "normalized_laplacian")
    disconnected = build_graph("custom", {"edges": [(1, 2), (3, 4)]})
    assert graph_matrix(disconnected, "adjacency").shape == (4, 4)
    with pytest.raises(Disconnected):
        graph_matrix(disconnected, "distance")


def test_weight_presets() -> None:
    sombor = weight_preset("sombor")
    assert sombor.tag == "sombor@1"
    assert sombor(3, 4) == pytest.approx(5.0)
    assert weight_preset("unit")(2, 7) == 1.0
    assert weight_preset("zagreb1")(2, 7) == 9.0
    with pytest.raises(InvalidParams):
        weight_preset("randic_typo")
