"""
GKM graph construction: homogeneous sub-graphs on each full-rank singular
orbit plus the normal edges joining fixed points across the two orbits.
"""
import logging
from collections import Counter
from typing import Dict, List, Optional, Tuple

import networkx as nx
from pydantic import ValidationError

from models.diagram import GroupDiagram, HomogeneousSpace
from models.graph import Edge, EdgeKind, GkmGraph, Orbit, Vertex
from models.report import ValidationReport
from services.diagram import lambda_weight, weyl_group_of
from services.errors import (
    ChoiceDependence,
    EdgeCountMismatch,
    NotGkm,
    NotSubgroup,
    NotSubsystem,
    ParseError,
    QuotientNotZ2,
    SchemaError,
    SelfEdge,
    WprimeNotInKminus,
    WrongCase,
)
from services.ratlin import as_ints, format_covector, mat_mul, mat_vec, primitive_covector, rat_str, sign_normalize
from services.verdict import euler_characteristic, gkm_verdict, orient
from services.weyl import (
    CosetSpace,
    GramForm,
    RootSet,
    WeylGroup,
    coset_space,
    generate_group,
    reflection_matrix,
    stabilizer_mod_sign,
    weyl_from_roots,
)

logger = logging.getLogger(__name__)

PREFIX = {"Plus": "P", "Minus": "M"}


def _vertices(cosets: CosetSpace, orbit: Orbit) -> List[Vertex]:
    W = cosets.ambient
    vertices = []
    for i, rep in enumerate(cosets.representatives):
        shortest = min(cosets.members(i), key=lambda m: len(W.words.get(m, ())))
        vertices.append(
            Vertex(
                id=f"{PREFIX[orbit]}{i}",
                orbit=orbit,
                coset_index=i,
                word=W.word(shortest) or "?",
                representative=[[rat_str(x) for x in row] for row in rep],
            )
        )
        logger.debug(f"{PREFIX[orbit]}{i}: word {vertices[-1].word}")
    return vertices


def _tangential_edges(cosets: CosetSpace, classes: RootSet, gram: GramForm, orbit: Orbit, kind: EdgeKind) -> List[Edge]:
    """Edges {[w],[w s_a]} labeled w.a; every edge is met once from each endpoint."""
    prefix = PREFIX[orbit]
    seen: Counter = Counter()
    for i, w in enumerate(cosets.representatives):
        for alpha in classes.positive():
            j = cosets.index_of(mat_mul(w, reflection_matrix(alpha, gram)))
            if j == i:
                raise SelfEdge(f"Reflection in {format_covector(alpha)} fixes the coset {prefix}{i}")
            seen[(min(i, j), max(i, j), sign_normalize(mat_vec(w, alpha)))] += 1

    miscounted = [key for key, count in seen.items() if count != 2]
    if miscounted:
        a, b, label = miscounted[0]
        raise EdgeCountMismatch(f"Edge {prefix}{a}-{prefix}{b} labeled {format_covector(label)} enumerated {seen[miscounted[0]]} times")
    return [Edge(u=f"{prefix}{a}", v=f"{prefix}{b}", label=as_ints(label), kind=kind) for a, b, label in seen]


def _homogeneous_part(
    G_roots: RootSet, K_roots: RootSet, gram: GramForm, orbit: Orbit, cap: Optional[int] = None
) -> Tuple[CosetSpace, List[Vertex], List[Edge]]:
    if not K_roots.issubset(G_roots):
        missing = ", ".join(format_covector(v) for v in K_roots.difference(G_roots))
        raise NotSubsystem(f"Roots missing from G: {missing}")
    WG = weyl_from_roots(G_roots, gram, cap)
    WK = weyl_from_roots(K_roots, gram, cap)
    cosets = coset_space(WG, WK)
    kind: EdgeKind = "TangentialPlus" if orbit == "Plus" else "TangentialMinus"
    edges = _tangential_edges(cosets, G_roots.difference(K_roots), gram, orbit, kind)
    logger.info(f"{orbit} orbit: {len(cosets)} fixed points, {len(edges)} tangential edges")
    return cosets, _vertices(cosets, orbit), edges


def _sorted_graph(name: str, rank: int, n: Optional[int], vertices: List[Vertex], edges: List[Edge]) -> GkmGraph:
    vertices = sorted(vertices, key=lambda v: (v.orbit != "Plus", v.coset_index))
    position = {v.id: k for k, v in enumerate(vertices)}
    ordered = []
    for e in edges:
        if position[e.v] < position[e.u]:
            e = Edge(u=e.v, v=e.u, label=e.label, kind=e.kind)
        ordered.append(e)
    ordered.sort(key=lambda e: (position[e.u], position[e.v], e.label, e.kind))
    return GkmGraph(name=name, rank=rank, n=n, vertices=vertices, edges=ordered)


def homogeneous_graph(G_roots: RootSet, K_roots: RootSet, gram: GramForm, cap: Optional[int] = None, name: str = "") -> GkmGraph:
    """GKM graph of G/K for equal-rank K: vertices W(G)/W(K), edges from the roots of G not in K."""
    _, vertices, edges = _homogeneous_part(G_roots, K_roots, gram, "Plus", cap)
    return _sorted_graph(name, gram.rank, None, vertices, edges)


def build_homogeneous_graph(h: HomogeneousSpace, cap: Optional[int] = None) -> GkmGraph:
    graph = homogeneous_graph(h.G.roots, h.K.roots, h.gram, cap, name=h.name)
    if h.manifold_dim is not None:
        graph.n = h.manifold_dim // 2
    return graph


def normal_edges_case1(d: GroupDiagram, cap: Optional[int] = None) -> List[Edge]:
    o, _ = orient(d)
    if not (o.Kplus.full_rank and o.Kminus.full_rank):
        raise WrongCase(f"{d.name}: normal edges of the first kind need both singular isotropy groups of full rank")
    lam = lambda_weight(o)
    WG = weyl_group_of(o.G, o.gram, cap)
    WKp = weyl_group_of(o.Kplus, o.gram, cap)
    WKm = weyl_group_of(o.Kminus, o.gram, cap)
    Wprime = stabilizer_mod_sign(WKp, lam)
    if not Wprime.is_subgroup_of(WKm):
        raise WprimeNotInKminus(f"{d.name}: the stabilizer of the line of lambda (order {Wprime.order}) is not in W(K-)")

    plus, minus = coset_space(WG, WKp), coset_space(WG, WKm)
    cosets = coset_space(WG, Wprime)
    edges = [
        Edge(u=f"P{plus.index_of(w)}", v=f"M{minus.index_of(w)}", label=as_ints(primitive_covector(mat_vec(w, lam))), kind="Normal")
        for w in cosets.representatives
    ]
    logger.info(f"{d.name}: {len(edges)} normal edges from |W'| = {Wprime.order}")
    return edges


def _case2_edges(WG: WeylGroup, Wprime: WeylGroup, plus: CosetSpace, g, lam) -> List[Edge]:
    if plus.index_of(g) == plus.index_of(WG.identity):
        raise SelfEdge("g lies in W(K+), so [e] = [g]")
    generated = generate_group(list(Wprime.generators) + [g], WG.gram)
    if not generated.is_subgroup_of(WG):
        raise NotSubgroup("<W', g> is not contained in W(G)")
    edges = []
    for w in coset_space(WG, generated).representatives:
        i, j = plus.index_of(w), plus.index_of(mat_mul(w, g))
        if i == j:
            raise SelfEdge(f"[w] = [wg] at P{i}")
        edges.append(Edge(u=f"P{min(i, j)}", v=f"P{max(i, j)}", label=as_ints(primitive_covector(mat_vec(w, lam))), kind="Normal"))
    return edges


def _census(edges: List[Edge]) -> List[Tuple[str, str, Tuple[int, ...]]]:
    return sorted((e.u, e.v, tuple(e.label)) for e in edges)


def normal_edges_case2(d: GroupDiagram, cap: Optional[int] = None) -> List[Edge]:
    o, _ = orient(d)
    if not (o.Kplus.full_rank and not o.Kminus.full_rank):
        raise WrongCase(f"{d.name}: normal edges of the second kind need exactly one full-rank singular isotropy group")
    lam = lambda_weight(o)
    WG = weyl_group_of(o.G, o.gram, cap)
    WKp = weyl_group_of(o.Kplus, o.gram, cap)
    WKm = weyl_group_of(o.Kminus, o.gram, cap)
    WH = weyl_group_of(o.H, o.gram, cap)
    if not WH.is_subgroup_of(WKm):
        raise NotSubgroup(f"{d.name}: W(H) is not contained in W(K-)")
    if WKm.order != 2 * WH.order:
        raise QuotientNotZ2(f"{d.name}: [W(K-):W(H)] = {WKm.order}/{WH.order}, expected 2")
    if not WKm.is_subgroup_of(WG):
        raise NotSubgroup(f"{d.name}: W(K-) is not contained in W(G)")

    nontrivial = sorted(m for m in WKm.elements if m not in WH)
    Wprime = stabilizer_mod_sign(WKp, lam)
    plus = coset_space(WG, WKp)
    edges = _case2_edges(WG, Wprime, plus, nontrivial[0], lam)
    reference = _census(edges)
    for g in nontrivial[1:]:
        if _census(_case2_edges(WG, Wprime, plus, g, lam)) != reference:
            raise ChoiceDependence(f"{d.name}: normal edges depend on the representative of W(K-)/W(H)")
    logger.info(f"{d.name}: {len(edges)} normal edges, g = {WKm.word(nontrivial[0])}")
    return edges


def build_graph(d: GroupDiagram, cap: Optional[int] = None) -> GkmGraph:
    verdict = gkm_verdict(d, cap)
    if not verdict.is_gkm:
        raise NotGkm(f"{d.name} is not GKM: {'; '.join(verdict.messages)}")
    o, _ = orient(d)

    _, vertices, edges = _homogeneous_part(o.G.roots, o.Kplus.roots, o.gram, "Plus", cap)
    if verdict.case_tag == "Case1":
        _, minus_vertices, minus_edges = _homogeneous_part(o.G.roots, o.Kminus.roots, o.gram, "Minus", cap)
        vertices += minus_vertices
        edges += minus_edges
        edges += normal_edges_case1(o, cap)
    else:
        edges += normal_edges_case2(o, cap)

    n = d.manifold_dim // 2 if d.manifold_dim is not None else None
    graph = _sorted_graph(d.name, d.rank, n, vertices, edges)
    for check in validate_graph(graph, d, cap).failures():
        logger.warning(f"{d.name}: graph check {check.name} failed: {check.message}")
    return graph


def to_networkx(g: GkmGraph) -> nx.MultiGraph:
    graph = nx.MultiGraph()
    graph.add_nodes_from(v.id for v in g.vertices)
    for e in g.edges:
        graph.add_edge(e.u, e.v, label=tuple(e.label), kind=e.kind)
    return graph


def validate_graph(g: GkmGraph, d: Optional[GroupDiagram] = None, cap: Optional[int] = None) -> ValidationReport:
    report = ValidationReport()
    graph = to_networkx(g)

    if g.n is None:
        report.add("graph.degree_regular", True, "skipped: dims not supplied")
    else:
        irregular = {v: k for v, k in graph.degree() if k != g.n}
        report.add("graph.degree_regular", not irregular, f"expected degree {g.n}, got {irregular}" if irregular else "ok")

    clashes = []
    for v in graph.nodes:
        lines = [primitive_covector(label) for _, _, label in graph.edges(v, data="label")]
        if len(set(lines)) != len(lines):
            clashes.append(v)
    report.add("graph.labels_independent", not clashes, f"proportional labels at {clashes}" if clashes else "ok")

    if d is not None:
        o, _ = orient(d)
        chi = euler_characteristic(o, cap)
        report.add("graph.vertex_count_euler", chi == len(g.vertices), f"χ = {chi}, vertices = {len(g.vertices)}")
        report.add("graph.edge_count_identity", *_edge_count_identity(g, o))

    connected = graph.number_of_nodes() > 0 and nx.is_connected(graph)
    report.add("graph.connected", connected, "ok" if connected else "graph is disconnected", level="warning")
    return report


def _edge_count_identity(g: GkmGraph, o: GroupDiagram) -> Tuple[bool, str]:
    """s(n - k) = s'(n - k') with k, k' the half-dimensions of the singular orbits."""
    dims = (o.G.dim, o.Kplus.dim, o.Kminus.dim)
    if g.n is None or None in dims or not o.Kminus.full_rank:
        return True, "skipped: needs dims and both singular orbits of full rank"
    counts: Dict[str, int] = Counter(v.orbit for v in g.vertices)
    k_plus, k_minus = (o.G.dim - o.Kplus.dim) // 2, (o.G.dim - o.Kminus.dim) // 2
    left, right = counts["Plus"] * (g.n - k_plus), counts["Minus"] * (g.n - k_minus)
    normal = sum(1 for e in g.edges if e.kind == "Normal")
    return left == right == normal, f"{counts['Plus']}·({g.n}-{k_plus}) = {left}, {counts['Minus']}·({g.n}-{k_minus}) = {right}, normal edges = {normal}"


def emit_json(g: GkmGraph) -> str:
    return g.model_dump_json(indent=2) + "\n"


def parse_graph_json(text: str) -> GkmGraph:
    try:
        return GkmGraph.model_validate_json(text)
    except ValidationError as e:
        first = e.errors()[0]
        if first["type"] == "json_invalid":
            raise ParseError(first["msg"])
        raise SchemaError(f"{'.'.join(str(p) for p in first['loc'])}: {first['msg']}")


def emit_dot(g: GkmGraph) -> str:
    lines = [f'graph "{g.name}" {{']
    for v in g.vertices:
        lines.append(f'  {v.id} [label="{v.id}", tooltip="{v.word}"];')
    for e in g.edges:
        style = "dotted" if e.kind == "Normal" else "solid"
        lines.append(f'  {e.u} -- {e.v} [label="{format_covector(e.label)}", style={style}];')
    lines.append("}")
    return "\n".join(lines) + "\n"
