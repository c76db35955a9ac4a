#!/usr/bin/env python3
"""
equispec 그래프 행렬
==================
표준 그래프 패밀리(펜던트 K₃, Kₙ, K_{a,b}, 완전 분할 그래프, 사용자 간선 목록) 생성과
인접/라플라시안/무부호 라플라시안/거리/거리 라플라시안/거리 무부호 라플라시안/가중 인접 행렬
정점 번호는 1부터 n까지 (networkx 노드 id 그대로)
"""

import logging
import math
from dataclasses import dataclass
from typing import Callable, Dict, Iterable, List, Optional, Tuple

import networkx as nx
import numpy as np

from core_spectra import DenseMatrix, as_matrix
from errors import Disconnected, InvalidParams, MissingPhi, NoDesignatedPartition
from partitions import Partition, QuotientResult, quotient

logger = logging.getLogger(__name__)

GRAPH_FAMILIES = ("pendant_k3", "complete", "complete_bipartite", "complete_split", "custom")

MATRIX_KINDS = (
    "adjacency",
    "weighted_adjacency",
    "laplacian",
    "signless_laplacian",
    "distance",
    "distance_laplacian",
    "distance_signless_laplacian",
)

DISTANCE_KINDS = {"distance", "distance_laplacian", "distance_signless_laplacian"}


@dataclass(frozen=True)
class WeightFunction:
    """차수 쌍 (d_u, d_v) → 간선 가중치, 대칭 함수"""

    name: str
    rule: Callable[[int, int], float]
    version: str = "1"

    def __call__(self, du: int, dv: int) -> float:
        return float(self.rule(du, dv))

    @property
    def tag(self) -> str:
        return f"{self.name}@{self.version}"


def weight_presets() -> List[WeightFunction]:
    """
    표준 차수 기반 가중치 프리셋

    unit(≡1, 보통 인접 행렬), zagreb1(d_u+d_v), sombor(√(d_u²+d_v²)),
    geometric_arithmetic(2√(d_u d_v)/(d_u+d_v)), abc(√((d_u+d_v−2)/(d_u d_v)))
    """
    return [
        WeightFunction("unit", lambda du, dv: 1.0),
        WeightFunction("zagreb1", lambda du, dv: du + dv),
        WeightFunction("sombor", lambda du, dv: math.sqrt(du * du + dv * dv)),
        WeightFunction("geometric_arithmetic", lambda du, dv: 2.0 * math.sqrt(du * dv) / (du + dv)),
        WeightFunction("abc", lambda du, dv: math.sqrt((du + dv - 2) / (du * dv))),
    ]


def weight_preset(name: str) -> WeightFunction:
    for preset in weight_presets():
        if preset.name == name:
            return preset
    names = ", ".join(p.name for p in weight_presets())
    raise InvalidParams(f"알 수 없는 가중치 프리셋 '{name}' (가능: {names})")


def _positive_int(params: Dict[str, float], key: str, minimum: int) -> int:
    if key not in params:
        raise InvalidParams(f"파라미터 '{key}' 누락")
    value = params[key]
    if float(value) != int(value) or int(value) < minimum:
        raise InvalidParams(f"{key}는 {minimum} 이상의 정수여야 함 (입력 {value})")
    return int(value)


def _new_graph(n: int, family: str, params: Dict) -> nx.Graph:
    g = nx.Graph(family=family, params=dict(params))
    g.add_nodes_from(range(1, n + 1))
    return g


def build_graph(family: str, params: Optional[Dict] = None) -> nx.Graph:
    """
    이름 있는 패밀리 또는 사용자 간선 목록으로 단순 그래프 생성

    운영 시 중요사항:
    - pendant_k3(a ≥ 2): 정점 순서 u, v, w, a₁…a_a, b (지정 분할의 셀이 연속 블록이 되도록)
    - complete(n), complete_bipartite(a, b), complete_split(omega, alpha)
    - custom(edges=[(i, j), …], n 선택): 루프/중복 간선은 InvalidParams,
      연결성은 거리 기반 행렬을 만들 때 검사 (Disconnected)
    - g.graph["family"], g.graph["params"]에 생성 정보 보관
    """
    params = dict(params or {})
    if family == "pendant_k3":
        a = _positive_int(params, "a", 2)
        g = _new_graph(a + 4, family, {"a": a})
        u, v, w, b = 1, 2, 3, a + 4
        pendants = list(range(4, a + 4))
        g.add_edges_from([(u, v), (u, w), (v, w), (v, b)])
        g.add_edges_from((u, x) for x in pendants)
        labels = {u: "u", v: "v", w: "w", b: "b"}
        labels.update({x: f"a{i}" for i, x in enumerate(pendants, start=1)})
        nx.set_node_attributes(g, labels, "label")
        return g
    if family == "complete":
        n = _positive_int(params, "n", 1)
        g = _new_graph(n, family, {"n": n})
        g.add_edges_from((i, j) for i in range(1, n + 1) for j in range(i + 1, n + 1))
        return g
    if family == "complete_bipartite":
        a, b = _positive_int(params, "a", 1), _positive_int(params, "b", 1)
        g = _new_graph(a + b, family, {"a": a, "b": b})
        g.add_edges_from((i, j) for i in range(1, a + 1) for j in range(a + 1, a + b + 1))
        return g
    if family == "complete_split":
        omega, alpha = _positive_int(params, "omega", 1), _positive_int(params, "alpha", 1)
        g = _new_graph(omega + alpha, family, {"omega": omega, "alpha": alpha})
        clique = range(1, omega + 1)
        g.add_edges_from((i, j) for i in clique for j in range(i + 1, omega + 1))
        g.add_edges_from((i, j) for i in clique for j in range(omega + 1, omega + alpha + 1))
        return g
    if family == "custom":
        return _custom_graph(params.get("edges", []), params.get("n"))
    raise InvalidParams(f"알 수 없는 그래프 패밀리 '{family}' (가능: {', '.join(GRAPH_FAMILIES)})")


def _custom_graph(edges: Iterable[Tuple[int, int]], n: Optional[int]) -> nx.Graph:
    pairs = [(int(i), int(j)) for i, j in edges]
    if not pairs and not n:
        raise InvalidParams("사용자 그래프에 간선이 없음")
    seen = set()
    for i, j in pairs:
        if i < 1 or j < 1:
            raise InvalidParams(f"정점 번호는 1 이상이어야 함: ({i}, {j})")
        if i == j:
            raise InvalidParams(f"루프 간선은 허용되지 않음: ({i}, {j})")
        key = (min(i, j), max(i, j))
        if key in seen:
            raise InvalidParams(f"중복 간선: ({i}, {j})")
        seen.add(key)
    size = max([int(n or 0)] + [max(i, j) for i, j in pairs])
    g = _new_graph(size, "custom", {"n": size})
    g.add_edges_from(pairs)
    return g


def _nodes(g: nx.Graph) -> List[int]:
    return sorted(g.nodes)


def distance_matrix(g: nx.Graph) -> np.ndarray:
    """BFS 전쌍 최단거리 (비가중), 연결 그래프 전용"""
    if g.number_of_nodes() == 0 or not nx.is_connected(g):
        raise Disconnected("거리 기반 행렬은 연결 그래프에서만 정의됨")
    nodes = _nodes(g)
    index = {v: i for i, v in enumerate(nodes)}
    out = np.zeros((len(nodes), len(nodes)))
    for source, lengths in nx.all_pairs_shortest_path_length(g):
        for target, length in lengths.items():
            out[index[source], index[target]] = length
    return out


def graph_matrix(g: nx.Graph, kind: str, phi: Optional[WeightFunction] = None) -> DenseMatrix:
    """
    그래프 행렬 생성

    운영 시 중요사항:
    - kind는 MATRIX_KINDS 중 하나, 아니면 InvalidParams
    - weighted_adjacency는 phi 필수 (없으면 MissingPhi)
    - 거리 계열은 연결 그래프만 (아니면 Disconnected)
    - Tr(G)는 거리 행렬 행합 대각, D^Q = Tr + D, D^L = Tr − D

    Args:
        g: build_graph 결과
        kind: 행렬 종류
        phi: 가중치 함수 (weighted_adjacency 전용)

    Returns:
        DenseMatrix: 정점 1..n 순서의 대칭 행렬
    """
    if kind not in MATRIX_KINDS:
        raise InvalidParams(f"알 수 없는 행렬 종류 '{kind}' (가능: {', '.join(MATRIX_KINDS)})")
    nodes = _nodes(g)
    if kind == "adjacency":
        return as_matrix(nx.to_numpy_array(g, nodelist=nodes, weight=None))
    if kind == "weighted_adjacency":
        if phi is None:
            raise MissingPhi("weighted_adjacency에는 가중치 함수 phi가 필요함")
        weighted = nx.Graph()
        weighted.add_nodes_from(nodes)
        degrees = dict(g.degree())
        weighted.add_weighted_edges_from((u, v, phi(degrees[u], degrees[v])) for u, v in g.edges)
        return as_matrix(nx.to_numpy_array(weighted, nodelist=nodes, weight="weight"))
    if kind == "laplacian":
        return as_matrix(nx.laplacian_matrix(g, nodelist=nodes, weight=None).toarray())
    if kind == "signless_laplacian":
        adjacency = nx.to_numpy_array(g, nodelist=nodes, weight=None)
        return as_matrix(np.diag(adjacency.sum(axis=1)) + adjacency)

    d = distance_matrix(g)
    transmission = np.diag(d.sum(axis=1))
    if kind == "distance":
        return as_matrix(d)
    if kind == "distance_laplacian":
        return as_matrix(transmission - d)
    return as_matrix(transmission + d)


def designated_partition(g: nx.Graph) -> Partition:
    """
    패밀리별 지정 분할

    pendant_k3 → {{u},{v},{w},{a₁..a_a},{b}}, complete_bipartite / complete_split → 2셀,
    complete → 1셀. 사용자 그래프는 NoDesignatedPartition.
    """
    family = g.graph.get("family")
    params = g.graph.get("params", {})
    n = g.number_of_nodes()
    if family == "pendant_k3":
        a = params["a"]
        return Partition.from_cells([[1], [2], [3], range(4, a + 4), [a + 4]], n)
    if family == "complete_bipartite":
        a = params["a"]
        return Partition.from_cells([range(1, a + 1), range(a + 1, n + 1)], n)
    if family == "complete_split":
        omega = params["omega"]
        return Partition.from_cells([range(1, omega + 1), range(omega + 1, n + 1)], n)
    if family == "complete":
        return Partition.trivial(n)
    raise NoDesignatedPartition(
        "사용자 그래프에는 지정 분할이 없음 (coarsest_equitable_refinement 사용)"
    )


def graph_quotient(
    g: nx.Graph,
    kind: str,
    partition: Optional[Partition] = None,
    phi: Optional[WeightFunction] = None,
    tol: float = 0.0,
) -> QuotientResult:
    """그래프 행렬의 몫 (분할 생략 시 지정 분할)"""
    return quotient(graph_matrix(g, kind, phi), partition or designated_partition(g), tol)


def twin_sets(g: nx.Graph) -> List[Tuple[str, Tuple[int, ...]]]:
    """
    쌍둥이 정점 집합 (크기 ≥ 2)

    운영 시 중요사항:
    - "independent": 열린 이웃 N(v)가 같은 정점들 (서로 인접하지 않음)
    - "clique": 닫힌 이웃 N[v]가 같은 정점들 (서로 모두 인접)
    - 결과는 (종류, 정점 튜플), 최소 정점 기준 정렬
    """
    result = []
    for kind, key in (
        ("independent", lambda v: frozenset(g.neighbors(v))),
        ("clique", lambda v: frozenset(g.neighbors(v)) | {v}),
    ):
        groups: Dict[frozenset, List[int]] = {}
        for v in _nodes(g):
            groups.setdefault(key(v), []).append(v)
        result.extend((kind, tuple(members)) for members in groups.values() if len(members) >= 2)
    result.sort(key=lambda item: (item[1][0], item[0]))
    return result


def twin_enlargement(g: nx.Graph, p: Partition) -> Partition:
    """
    쌍둥이 집합을 포함하는 셀마다 원소 하나씩 분리한 확장 분할

    셀당 한 번만 분리한다 (같은 셀의 쌍둥이 집합이 여럿이면 최소 정점 집합 기준).
    """
    cells = [list(cell) for cell in p.cells]
    touched = set()
    for _, members in twin_sets(g):
        for index, cell in enumerate(cells):
            if index in touched or len(cell) < 2:
                continue
            if set(members) <= set(cell):
                cells[index] = [x for x in cell if x != members[0]]
                cells.append([members[0]])
                touched.add(index)
                break
    enlarged = Partition.from_cells(cells, p.n)
    logger.debug(f"쌍둥이 확장: {p} → {enlarged}")
    return enlarged
