"""Merging s-t-walks into one covering walk, and the tour-based pipeline.

merge_walks stitches k s-t-walks into a single s-t-walk containing all
their vertices.  The walks are cut into sections along the chain of
strongly connected components; sections are visited in snake order
(forward in odd components, backward in even ones) and joined by
connector paths that enter and leave each dual support set at most once.
The cost bound

    c(P) <= L + (k - 1) (LP + 2 (a_s - a_t))

is recomputed from scratch and asserted, as is the node-weighted variant
c(P) <= L + (k - 1) LP.

path_from_tour_pipeline turns a path instance into a tour instance by
appending an auxiliary vertex behind a feedback path of cost d * LP,
solves it exactly, splits the tour at the auxiliary vertex into k
s-t-walks, and merges them.  With d = 3 the final walk costs at most
C_R - 3 LP because the minimum potential gap never exceeds LP.
"""

from __future__ import annotations

from dataclasses import dataclass
from fractions import Fraction

from .core import (
    Edge,
    Instance,
    Walk,
    is_valid_st_walk,
    make_walk,
    scc_topological_order,
    support_graph,
    walk_cost_and_check,
)
from .exact import exact_atsp
from .relaxation import (
    DualSolution,
    LpSolution,
    PreconditionError,
    dual_edge_slack,
    min_gap_dual,
    solve_relaxation,
)
from .structure import laminar_respecting_path, walk_crossings


@dataclass(frozen=True)
class MergeInput:
    instance: Instance
    dual: DualSolution
    walks: tuple[Walk, ...]
    total_cost: Fraction


@dataclass(frozen=True)
class MergeReport:
    walk: Walk
    cost: Fraction
    bound: Fraction
    connector_cost: Fraction
    max_connector_crossings: int


def merge_walks(inp: MergeInput, mode: str = "general") -> Walk:
    return merge_walks_report(inp, mode).walk


def merge_walks_report(inp: MergeInput, mode: str = "general") -> MergeReport:
    if mode not in ("general", "node_weighted"):
        raise PreconditionError(f"unknown merge mode {mode!r}")
    inst, dual = inp.instance, inp.dual
    walks = inp.walks
    k = len(walks)
    if k < 1:
        raise PreconditionError("need at least one walk")
    if inst.mode != "atspp":
        raise PreconditionError("merging is defined for path mode")
    if not dual.laminar:
        raise PreconditionError("dual support must be laminar")
    if mode == "node_weighted" and inst.node_weights is None:
        raise PreconditionError("node-weighted mode needs node weights")
    covered = set()
    total = Fraction(0)
    for w in walks:
        if not is_valid_st_walk(inst, w):
            raise PreconditionError("every input must be a valid s-t-walk")
        total += walk_cost_and_check(inst, w)
        covered.update(w.vertices)
    if covered != set(inst.vertices):
        raise PreconditionError("walks do not jointly cover the vertex set")
    if total != inp.total_cost:
        raise PreconditionError("stated total cost does not match the walks")
    for w in walks:
        for kk in w.edges:
            if dual_edge_slack(inst, dual.a, dual.y, inst.edges[kk]) != 0:
                e = inst.edges[kk]
                raise PreconditionError(
                    f"edge ({e.tail}, {e.head}) is not tight for the dual"
                )

    chain = scc_topological_order(inst)
    comp_of = chain.component_of()
    l = len(chain)

    # section j of walk i: positions of the maximal contiguous stretch in
    # component j (components are visited in increasing order, no skips)
    sections: list[list[tuple[int, int]]] = []
    for w in walks:
        comps = [comp_of[x] for x in w.vertices]
        if comps != sorted(comps) or set(comps) != set(range(l)):
            raise PreconditionError(
                "walk does not traverse the component chain contiguously"
            )
        secs = []
        pos = 0
        for j in range(l):
            start = pos
            while pos + 1 < len(comps) and comps[pos + 1] == j:
                pos += 1
            secs.append((start, pos))
            pos += 1
        sections.append(secs)

    out_edges: list[int] = []
    connector_edges: list[int] = []
    connector_walks: list[Walk] = []
    vset = frozenset(inst.vertices)
    for j in range(l):
        order = list(range(k)) if j % 2 == 0 else list(range(k - 1, -1, -1))
        for pos, i in enumerate(order):
            a, b = sections[i][j]
            out_edges.extend(walks[i].edges[a:b])
            if pos < k - 1:
                nxt = order[pos + 1]
                here = walks[i].vertices[b]
                there = walks[nxt].vertices[sections[nxt][j][0]]
                if here != there:
                    conn = laminar_respecting_path(inst, dual, vset, here, there)
                    if any(comp_of[x] != j for x in conn.vertices):
                        raise RuntimeError("connector left its component")
                    connector_walks.append(conn)
                    connector_edges.extend(conn.edges)
                    out_edges.extend(conn.edges)
        if j < l - 1:
            last_i = order[-1]
            out_edges.append(walks[last_i].edges[sections[last_i][j][1]])

    merged = make_walk(inst, out_edges, at=inst.s)
    cost = walk_cost_and_check(inst, merged, require_cover=True)
    for kk in merged.edges:
        if dual_edge_slack(inst, dual.a, dual.y, inst.edges[kk]) != 0:
            e = inst.edges[kk]
            raise PreconditionError(
                f"edge ({e.tail}, {e.head}) is not tight for the dual"
            )
    if merged.start != inst.s or merged.end != inst.t:
        raise RuntimeError("merged walk has wrong endpoints")

    lp_value = dual.objective
    max_cross = 0
    for u in dual.y:
        enters = leaves = 0
        for conn in connector_walks:
            e_c, l_c = walk_crossings(inst, conn, u)
            enters += e_c
            leaves += l_c
        assert enters <= k - 1 and leaves <= k - 1, "connector crossing audit failed"
        max_cross = max(max_cross, enters, leaves)

    connector_cost = sum(
        (walk_cost_and_check(inst, c) for c in connector_walks), Fraction(0)
    )
    if mode == "node_weighted":
        weights = inst.node_weights
        budget = (
            weights[inst.s]
            + weights[inst.t]
            + 2 * sum(weights[v] for v in inst.vertices if v not in (inst.s, inst.t))
        )
        assert connector_cost <= (k - 1) * budget, "node-weighted connector audit failed"
        assert (k - 1) * budget <= (k - 1) * lp_value
        bound = inp.total_cost + (k - 1) * lp_value
    else:
        bound = inp.total_cost + (k - 1) * (lp_value + 2 * dual.gap())
    assert cost <= bound, f"merge cost {cost} exceeds its bound {bound}"
    return MergeReport(
        walk=merged,
        cost=cost,
        bound=bound,
        connector_cost=connector_cost,
        max_connector_crossings=max_cross,
    )


@dataclass(frozen=True)
class PipelineReport:
    walk: Walk
    cost: Fraction
    tour_cost: Fraction
    k: int
    walks_cost: Fraction
    lp_value: Fraction
    gap: Fraction
    merge_bound: Fraction
    target: Fraction | None  # C_R - d LP when d is large enough, else None


AUX = "#aux"


def path_from_tour_pipeline(
    instance: Instance, d=Fraction(3), tour: Walk | None = None, cap: int = 20
) -> Walk:
    return path_from_tour_report(instance, d, tour, cap).walk


def path_from_tour_report(
    instance: Instance, d=Fraction(3), tour: Walk | None = None, cap: int = 20
) -> PipelineReport:
    """Run the full tour-splitting and merging pipeline on a path instance.

    The instance is normalized to the support graph of its optimal vector
    first.  A caller-provided tour must be a closed walk of the augmented
    instance; otherwise the exact solver is used (subject to the size cap).
    """
    d = Fraction(d)
    if d < 0:
        raise PreconditionError("d must be nonnegative")
    if instance.mode != "atspp":
        raise PreconditionError("pipeline expects a path-mode instance")
    lp0, _ = solve_relaxation(instance)
    host = support_graph(instance, lp0)
    lp, _ = solve_relaxation(host)
    assert lp.objective == lp0.objective
    gap_cert = min_gap_dual(host, lp)
    dual = gap_cert.witness
    lp_value = lp.objective

    aux = AUX
    while aux in host.vertices:
        aux += "x"
    augmented = Instance(
        name=host.name + ":augmented",
        mode="atsp",
        vertices=host.vertices + (aux,),
        edges=host.edges
        + (Edge(host.t, aux, d * lp_value), Edge(aux, host.s, Fraction(0))),
    )
    if tour is None:
        tour, tour_cost = exact_atsp(augmented, cap=cap)
    else:
        tour_cost = walk_cost_and_check(augmented, tour, require_cover=True)
        if tour.start != tour.end:
            raise PreconditionError("a tour must be a closed walk")

    m_host = host.m  # augmented edge k < m_host iff it is a host edge
    edges = list(tour.edges)
    starts = [i for i, k in enumerate(edges) if augmented.edges[k].tail == aux]
    if not starts:
        raise RuntimeError("tour never visits the auxiliary vertex")
    first = starts[0]
    edges = edges[first:] + edges[:first]
    walks: list[Walk] = []
    current: list[int] = []
    for k in edges:
        e = augmented.edges[k]
        if e.tail == aux:
            current = []
        elif e.head == aux:
            walks.append(make_walk(host, current, at=host.s))
        else:
            current.append(k)
    k_walks = len(walks)
    assert k_walks >= 1
    walks_cost = sum(
        (walk_cost_and_check(host, w) for w in walks), Fraction(0)
    )
    assert walks_cost == tour_cost - k_walks * d * lp_value

    report = merge_walks_report(
        MergeInput(
            instance=host, dual=dual, walks=tuple(walks), total_cost=walks_cost
        ),
        mode="general",
    )
    target = None
    if d * lp_value >= lp_value + 2 * gap_cert.delta_star:
        target = tour_cost - d * lp_value
        assert report.cost <= target, "pipeline cost bound failed"
    return PipelineReport(
        walk=report.walk,
        cost=report.cost,
        tour_cost=tour_cost,
        k=k_walks,
        walks_cost=walks_cost,
        lp_value=lp_value,
        gap=dual.gap(),
        merge_bound=report.bound,
        target=target,
    )
