"""Structural certificates on support graphs.

Tight cut sets decompose into a chain of strongly connected components
whose links carry all entering and leaving edges; paths can be chosen to
enter and leave each laminar dual support set at most once; two s-t-paths
can avoid sharing prescribed vertices (by vertex splitting and an
integral 2-flow); and an unavoidable support set with positive y admits a
dual rewrite that lowers a_s - a_t without losing optimality.
"""

from __future__ import annotations

from dataclasses import dataclass
from fractions import Fraction

from .core import Instance, Walk, make_walk, scc_topological_order
from .flows import FlowNetwork
from .relaxation import (
    DualSolution,
    LpSolution,
    PreconditionError,
    cut_value,
    dual_feasibility_violations,
    dual_objective_value,
    _set_key,
)


@dataclass(frozen=True)
class ChainDecomposition:
    tight_set: frozenset[str]
    components: tuple[frozenset[str], ...]
    links: tuple[frozenset[int], ...]  # edge indices: out of U_i = into U_{i+1}


def _delta_edges(instance: Instance, u) -> tuple[frozenset[int], frozenset[int]]:
    """(entering, leaving) edge indices of a vertex set."""
    enter, leave = [], []
    for k, e in enumerate(instance.edges):
        tin, hin = e.tail in u, e.head in u
        if hin and not tin:
            enter.append(k)
        elif tin and not hin:
            leave.append(k)
    return frozenset(enter), frozenset(leave)


def walk_crossings(instance: Instance, walk: Walk, u) -> tuple[int, int]:
    """(times entered, times left) of a vertex set along a walk."""
    enters = leaves = 0
    for k in walk.edges:
        e = instance.edges[k]
        tin, hin = e.tail in u, e.head in u
        if hin and not tin:
            enters += 1
        elif tin and not hin:
            leaves += 1
    return enters, leaves


def tight_chain(instance: Instance, lp: LpSolution, u) -> ChainDecomposition:
    """Chain decomposition of a tight set (or of the whole vertex set).

    The strongly connected components of the induced subgraph are ordered
    so that all entering edges enter the first, all leaving edges leave
    the last, and consecutive components are linked by exactly the edges
    between them.  Every property is verified exactly.
    """
    u = frozenset(u)
    vset = frozenset(instance.vertices)
    if u != vset:
        terminals = {instance.s, instance.t} if instance.mode == "atspp" else set()
        if u & terminals:
            raise PreconditionError("a tight set must avoid the endpoints")
        if not u or not u <= vset:
            raise PreconditionError("not a nonempty vertex subset")
        if cut_value(instance, lp.x, u) != 2:
            raise PreconditionError("set is not tight: x(delta(U)) != 2")
    induced = Instance(
        name=instance.name + ":induced",
        mode="atsp",
        vertices=tuple(v for v in instance.vertices if v in u),
        edges=tuple(e for e in instance.edges if e.tail in u and e.head in u),
    )
    comps = scc_topological_order(induced).components
    l = len(comps)
    enter_u, leave_u = _delta_edges(instance, u)
    enter_first, _ = _delta_edges(instance, comps[0])
    _, leave_last = _delta_edges(instance, comps[-1])
    if enter_u != enter_first:
        raise PreconditionError("entering edges do not all enter the first component")
    if leave_u != leave_last:
        raise PreconditionError("leaving edges do not all leave the last component")
    links = []
    for i in range(l - 1):
        _, leave_i = _delta_edges(instance, comps[i])
        enter_next, _ = _delta_edges(instance, comps[i + 1])
        if leave_i != enter_next or not leave_i:
            raise PreconditionError(f"components {i} and {i + 1} are not chain-linked")
        links.append(leave_i)
    if u == vset and instance.mode == "atspp":
        if instance.s not in comps[0] or instance.t not in comps[-1]:
            raise PreconditionError("endpoints are not in the extreme components")
    return ChainDecomposition(tight_set=u, components=comps, links=tuple(links))


def _adjacency(instance: Instance):
    adj: dict[str, list[tuple[int, str]]] = {v: [] for v in instance.vertices}
    for k, e in enumerate(instance.edges):
        adj[e.tail].append((k, e.head))
    return adj


def _bfs_path(adj, allowed, v, w):
    """Shortest v-w path inside allowed vertices; edge list or None."""
    if v == w:
        return []
    parent: dict[str, tuple[str, int]] = {v: ("", -1)}
    frontier = [v]
    while frontier:
        nxt = []
        for x in frontier:
            for k, h in adj[x]:
                if h in allowed and h not in parent:
                    parent[h] = (x, k)
                    if h == w:
                        path = []
                        cur = w
                        while cur != v:
                            p, kk = parent[cur]
                            path.append(kk)
                            cur = p
                        path.reverse()
                        return path
                    nxt.append(h)
        frontier = nxt
    return None


def _splice_to_simple(verts: list[str], edges: list[int]) -> None:
    """Remove cycles in place so no vertex repeats."""
    while True:
        seen: dict[str, int] = {}
        cut = None
        for i, x in enumerate(verts):
            if x in seen:
                cut = (seen[x], i)
                break
            seen[x] = i
        if cut is None:
            return
        i, j = cut
        del verts[i + 1 : j + 1]
        del edges[i:j]


def laminar_respecting_path(
    instance: Instance, dual: DualSolution, big_u, v: str, w: str
) -> Walk:
    """A v-w path inside the induced subgraph of big_u that enters and
    leaves every dual support set at most once.

    Starts from a shortest path and repeatedly splices detours through
    the violated sets, largest first; whenever both the first and last
    visit to a set can be joined inside it, the whole span is rerouted
    inside, which also makes visits contiguous.
    """
    if not dual.laminar:
        raise PreconditionError("dual support must be laminar")
    big_u = frozenset(big_u)
    vset = frozenset(instance.vertices)
    if big_u != vset and big_u not in dual.y:
        raise PreconditionError("big_u must be the vertex set or a support set")
    if v not in big_u or w not in big_u:
        raise PreconditionError("endpoints must lie in big_u")
    if v == w:
        return make_walk(instance, (), at=v)
    adj = _adjacency(instance)
    terminals = {instance.s, instance.t} if instance.mode == "atspp" else set()
    preferred = big_u - (terminals - {v, w})
    edges = _bfs_path(adj, preferred, v, w)
    if edges is None:
        edges = _bfs_path(adj, big_u, v, w)
    if edges is None:
        raise PreconditionError(f"{w!r} is not reachable from {v!r} inside big_u")
    verts = [v] + [instance.edges[k].head for k in edges]

    sets = sorted(
        (u for u in dual.y if u < big_u or (big_u == vset and u <= big_u)),
        key=lambda u: (-len(u), tuple(sorted(u))),
    )
    max_passes = (len(sets) + 2) ** 2 + 8
    for _ in range(max_passes):
        changed = False
        for u in sets:
            in_pos = [i for i, x in enumerate(verts) if x in u]
            if not in_pos:
                continue
            first, last = in_pos[0], in_pos[-1]
            contiguous = last - first + 1 == len(in_pos)
            enters = sum(
                1
                for i in range(len(edges))
                if verts[i] not in u and verts[i + 1] in u
            )
            leaves = sum(
                1
                for i in range(len(edges))
                if verts[i] in u and verts[i + 1] not in u
            )
            if contiguous and enters <= 1 and leaves <= 1:
                continue
            seg = _bfs_path(adj, u, verts[first], verts[last])
            if seg is not None:
                verts[first : last + 1] = [verts[first]] + [
                    instance.edges[k].head for k in seg
                ]
                edges[first:last] = seg
                changed = True
                continue
            if enters > 1:
                heads = [
                    i + 1
                    for i in range(len(edges))
                    if verts[i] not in u and verts[i + 1] in u
                ]
                lo, hi = heads[0], heads[-1]
            elif leaves > 1:
                tails = [
                    i
                    for i in range(len(edges))
                    if verts[i] in u and verts[i + 1] not in u
                ]
                lo, hi = tails[0], tails[-1]
            else:
                continue
            seg = _bfs_path(adj, u, verts[lo], verts[hi])
            if seg is None:
                raise RuntimeError("chain structure violated inside a support set")
            verts[lo : hi + 1] = [verts[lo]] + [instance.edges[k].head for k in seg]
            edges[lo:hi] = seg
            changed = True
        if not changed:
            break
    else:
        raise RuntimeError("path fixing did not stabilize")

    _splice_to_simple(verts, edges)
    walk = make_walk(instance, edges, at=v)
    assert walk.start == v and walk.end == w
    assert all(x in big_u for x in walk.vertices)
    for u in sets:
        enters, leaves = walk_crossings(instance, walk, u)
        assert enters <= 1 and leaves <= 1, "crossing audit failed"
    return walk


def two_paths_vertex_avoiding(
    instance: Instance, s: str, t: str, avoid
) -> tuple[Walk, Walk]:
    """Two s-t-paths such that no vertex of `avoid` is on both.

    Splits each vertex of `avoid` into an in/out pair joined by a
    unit-capacity edge, sends an integral 2-flow, and decomposes it.
    Requires an s-t-path in G - u for every u in avoid.
    """
    avoid = frozenset(avoid)
    if s in avoid or t in avoid:
        raise PreconditionError("avoid set must not contain the endpoints")
    adj = _adjacency(instance)
    allv = frozenset(instance.vertices)
    if _bfs_path(adj, allv, s, t) is None:
        raise PreconditionError("t is not reachable from s")
    for u in sorted(avoid):
        if _bfs_path(adj, allv - {u}, s, t) is None:
            raise PreconditionError(f"every s-t-path passes through {u!r}")

    node_id: dict[tuple[str, str], int] = {}
    for v in instance.vertices:
        if v in avoid:
            node_id[("in", v)] = len(node_id)
            node_id[("out", v)] = len(node_id)
        else:
            node_id[("at", v)] = len(node_id)
    source = len(node_id)
    net = FlowNetwork(source + 1)
    big = Fraction(instance.n + 1)
    arc_caps: list[Fraction] = []
    arc_edge: list[int | None] = []

    def add(u_node, v_node, cap, edge_idx):
        net.add_arc(u_node, v_node, cap)
        arc_caps.append(Fraction(cap))
        arc_edge.append(edge_idx)

    for v in sorted(avoid):
        add(node_id[("in", v)], node_id[("out", v)], Fraction(1), None)
    for k, e in enumerate(instance.edges):
        tail = node_id[("out", e.tail)] if e.tail in avoid else node_id[("at", e.tail)]
        head = node_id[("in", e.head)] if e.head in avoid else node_id[("at", e.head)]
        add(tail, head, big, k)
    add(source, node_id[("at", s)], Fraction(2), None)

    value = net.max_flow(source, node_id[("at", t)])
    if value < 2:
        raise PreconditionError("no two vertex-avoiding paths exist")

    remaining = [
        net.flow_on(2 * i, arc_caps[i]) for i in range(len(arc_caps))
    ]  # forward arcs sit at even indices
    sink = node_id[("at", t)]
    start = node_id[("at", s)]
    walks = []
    for _ in range(2):
        cur = start
        path_edges: list[int] = []
        while cur != sink:
            chosen = None
            for a in net.adj[cur]:
                if a % 2 == 0 and remaining[a // 2] > 0:
                    chosen = a
                    break
            assert chosen is not None, "flow decomposition ran dry"
            remaining[chosen // 2] -= 1
            if arc_edge[chosen // 2] is not None:
                path_edges.append(arc_edge[chosen // 2])
            cur = net.to[chosen]
        verts = [s] + [instance.edges[k].head for k in path_edges]
        _splice_to_simple(verts, path_edges)
        walks.append(make_walk(instance, path_edges, at=s))
    p1, p2 = walks
    shared = set(p1.vertices) & set(p2.vertices) & avoid
    assert not shared, f"paths share avoided vertices {sorted(shared)}"
    return p1, p2


def two_cut_respecting_paths(
    instance: Instance, lp: LpSolution, dual: DualSolution
) -> tuple[Walk, Walk]:
    """Two s-t-paths whose combined crossings of every support set are <= 2.

    Contracts the maximal support sets, finds two paths avoiding the
    contracted vertices, and reconnects inside each set with a path that
    respects the nested sets.  Requires a laminar dual of minimum
    potential gap; the avoidability of every support set is verified.
    """
    if instance.mode != "atspp":
        raise PreconditionError("defined for path mode")
    if not dual.laminar:
        raise PreconditionError("dual support must be laminar")
    adj = _adjacency(instance)
    allv = frozenset(instance.vertices)
    supp = sorted(dual.y, key=_set_key)
    for u in supp:
        if _bfs_path(adj, allv - u, instance.s, instance.t) is None:
            raise PreconditionError(
                f"support set {sorted(u)} is crossed by every s-t-path; "
                "the dual cannot have minimum potential gap"
            )
    maximal = [u for u in supp if not any(u < other for other in supp)]
    owner: dict[str, frozenset[str]] = {}
    for u in maximal:
        for v in u:
            owner[v] = u

    cname: dict[frozenset[str], str] = {}
    for i, u in enumerate(maximal):
        name = f"[{i}]"
        while name in allv:
            name += "#"
        cname[u] = name
    vmap = {v: cname[owner[v]] if v in owner else v for v in instance.vertices}
    cverts: list[str] = []
    seen = set()
    for v in instance.vertices:
        nm = vmap[v]
        if nm not in seen:
            seen.add(nm)
            cverts.append(nm)
    cedges = []
    corig: list[int] = []
    from .core import Edge as _Edge

    for k, e in enumerate(instance.edges):
        a, b = vmap[e.tail], vmap[e.head]
        if a == b:
            continue
        cedges.append(_Edge(a, b, e.cost))
        corig.append(k)
    contracted = Instance(
        name=instance.name + ":contracted",
        mode="atspp",
        vertices=tuple(cverts),
        edges=tuple(cedges),
        s=instance.s,
        t=instance.t,
    )
    q1, q2 = two_paths_vertex_avoiding(
        contracted, instance.s, instance.t, set(cname.values())
    )

    def expand(q: Walk) -> Walk:
        orig = [corig[k] for k in q.edges]
        out: list[int] = []
        for i, k in enumerate(orig):
            out.append(k)
            if i + 1 < len(orig):
                a = instance.edges[k].head
                b = instance.edges[orig[i + 1]].tail
                if a != b:
                    u = owner[a]
                    assert b in u, "expansion endpoints disagree on the contracted set"
                    seg = laminar_respecting_path(instance, dual, u, a, b)
                    out.extend(seg.edges)
        verts = [instance.s] + [instance.edges[k].head for k in out]
        _splice_to_simple(verts, out)
        return make_walk(instance, out, at=instance.s)

    p1, p2 = expand(q1), expand(q2)
    for u in supp:
        e1 = sum(walk_crossings(instance, p1, u))
        e2 = sum(walk_crossings(instance, p2, u))
        assert e1 + e2 <= 2, f"combined crossing audit failed on {sorted(u)}"
    return p1, p2


def dual_improvement_step(
    instance: Instance, dual: DualSolution, bar_u
) -> DualSolution:
    """Zero out y on an unavoidable support set, lowering a_s - a_t by 2y.

    Requires y > 0 on the set and that every s-t-path crosses it.  The
    rewrite subtracts 2 eps from a on the vertices reachable from s
    without the set, eps on the set itself, and keeps the objective.
    """
    if instance.mode != "atspp":
        raise PreconditionError("defined for path mode")
    bar_u = frozenset(bar_u)
    eps = dual.y.get(bar_u, Fraction(0))
    if eps <= 0:
        raise PreconditionError("y is zero on the given set")
    adj = _adjacency(instance)
    allv = frozenset(instance.vertices)
    if _bfs_path(adj, allv - bar_u, instance.s, instance.t) is not None:
        raise PreconditionError("the set is avoidable by an s-t-path")
    reach = {instance.s}
    frontier = [instance.s]
    while frontier:
        nxt = []
        for x in frontier:
            for _, h in adj[x]:
                if h not in bar_u and h not in reach:
                    reach.add(h)
                    nxt.append(h)
        frontier = nxt
    a = dict(dual.a)
    for v in reach:
        a[v] -= 2 * eps
    for v in bar_u:
        a[v] -= eps
    y = dict(dual.y)
    del y[bar_u]
    out = DualSolution(
        instance=instance, a=a, y=y, laminar=dual.laminar, objective=dual.objective
    )
    bad = dual_feasibility_violations(instance, a, y)
    assert not bad, f"rewritten dual infeasible: {bad}"
    assert dual_objective_value(instance, a, y) == dual.objective
    assert out.gap() == dual.gap() - 2 * eps
    return out
