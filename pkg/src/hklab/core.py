"""Directed multigraph instances with exact rational edge costs.

An Instance is a digraph with nonnegative Fraction costs, either in tour
mode ("atsp", closed walks) or path mode ("atspp", s-t-walks).  Absent
edges play the role of infinite cost; there is no infinity value in the
cost type.  Vertex ids are opaque strings; all internal computations use
dense indices assigned in declaration order, so every operation here is
deterministic.
"""

from __future__ import annotations

import heapq
import json
from dataclasses import dataclass
from fractions import Fraction


class ValidationError(ValueError):
    """Raised when a raw instance description violates an invariant."""


class UnreachableError(RuntimeError):
    """Raised when connectivity preconditions fail ("no finite tour exists")."""


def parse_rational(s) -> Fraction:
    """Parse an exact rational from a "p/q" or "p" string (or int)."""
    if isinstance(s, Fraction):
        return s
    if isinstance(s, int):
        return Fraction(s)
    if isinstance(s, str):
        return Fraction(s)
    raise ValidationError(f"not an exact rational: {s!r}")


def format_rational(q: Fraction) -> str:
    return str(q)


@dataclass(frozen=True)
class Edge:
    tail: str
    head: str
    cost: Fraction


@dataclass(frozen=True)
class Instance:
    """A directed multigraph instance; see the package docstring for modes."""

    name: str
    mode: str  # "atsp" | "atspp"
    vertices: tuple[str, ...]
    edges: tuple[Edge, ...]
    s: str | None = None
    t: str | None = None
    node_weights: dict[str, Fraction] | None = None

    @property
    def n(self) -> int:
        return len(self.vertices)

    @property
    def m(self) -> int:
        return len(self.edges)

    def index(self) -> dict[str, int]:
        return {v: i for i, v in enumerate(self.vertices)}

    def out_edges(self) -> list[list[int]]:
        """Edge indices by tail vertex index."""
        idx = self.index()
        out: list[list[int]] = [[] for _ in self.vertices]
        for k, e in enumerate(self.edges):
            out[idx[e.tail]].append(k)
        return out

    def in_edges(self) -> list[list[int]]:
        idx = self.index()
        inc: list[list[int]] = [[] for _ in self.vertices]
        for k, e in enumerate(self.edges):
            inc[idx[e.head]].append(k)
        return inc

    def to_json_dict(self) -> dict:
        d: dict = {
            "name": self.name,
            "mode": self.mode,
            "vertices": list(self.vertices),
            "edges": [
                {"tail": e.tail, "head": e.head, "cost": format_rational(e.cost)}
                for e in self.edges
            ],
        }
        if self.s is not None:
            d["s"] = self.s
        if self.t is not None:
            d["t"] = self.t
        if self.node_weights is not None:
            d["node_weights"] = {
                v: format_rational(w) for v, w in self.node_weights.items()
            }
        return d

    def to_json(self) -> str:
        return json.dumps(self.to_json_dict(), indent=2, sort_keys=False)


def validate_instance(raw: dict) -> Instance:
    """Normalize a raw (JSON-shaped) description into an Instance.

    Checks: known vertex ids, nonnegative costs, s != t in path mode, and
    the node-weight equation cost(v,w) = c_v + c_w when weights are given.
    """
    if not isinstance(raw, dict):
        raise ValidationError("instance description must be a mapping")
    mode = raw.get("mode")
    if mode not in ("atsp", "atspp"):
        raise ValidationError(f"mode must be 'atsp' or 'atspp', got {mode!r}")
    vertices = tuple(str(v) for v in raw.get("vertices", ()))
    if not vertices:
        raise ValidationError("instance has no vertices")
    if len(set(vertices)) != len(vertices):
        raise ValidationError("duplicate vertex ids")
    vset = set(vertices)

    edges = []
    for e in raw.get("edges", ()):
        tail, head = str(e["tail"]), str(e["head"])
        if tail not in vset:
            raise ValidationError(f"unknown vertex id {tail!r}")
        if head not in vset:
            raise ValidationError(f"unknown vertex id {head!r}")
        cost = parse_rational(e["cost"])
        if cost < 0:
            raise ValidationError(f"negative cost on edge ({tail}, {head})")
        edges.append(Edge(tail, head, cost))

    s = raw.get("s")
    t = raw.get("t")
    if mode == "atspp":
        if s is None or t is None:
            raise ValidationError("atspp mode requires endpoints s and t")
        s, t = str(s), str(t)
        if s not in vset or t not in vset:
            raise ValidationError("s and t must be declared vertices")
        if s == t:
            raise ValidationError("s = t is not allowed in atspp mode")
    else:
        s = t = None

    weights = raw.get("node_weights")
    if weights is not None:
        weights = {str(v): parse_rational(w) for v, w in weights.items()}
        for v in weights:
            if v not in vset:
                raise ValidationError(f"unknown vertex id {v!r} in node_weights")
            if weights[v] < 0:
                raise ValidationError(f"negative node weight at {v!r}")
        missing = vset - set(weights)
        if missing:
            raise ValidationError(f"node_weights missing vertices: {sorted(missing)}")
        for e in edges:
            if e.cost != weights[e.tail] + weights[e.head]:
                raise ValidationError(
                    f"node-weight mismatch on edge ({e.tail}, {e.head}): "
                    f"{e.cost} != {weights[e.tail]} + {weights[e.head]}"
                )

    return Instance(
        name=str(raw.get("name", "unnamed")),
        mode=mode,
        vertices=vertices,
        edges=tuple(edges),
        s=s,
        t=t,
        node_weights=weights,
    )


def instance_from_json(text: str) -> Instance:
    return validate_instance(json.loads(text))


def load_instance(path: str) -> Instance:
    with open(path, "r", encoding="utf-8") as fh:
        return instance_from_json(fh.read())


@dataclass(frozen=True)
class Walk:
    """An edge-index sequence; vertices has one more entry than edges.

    Repetitions of vertices and edges are allowed.  A walk with no edges
    is a single vertex.
    """

    edges: tuple[int, ...]
    vertices: tuple[str, ...]

    @property
    def start(self) -> str:
        return self.vertices[0]

    @property
    def end(self) -> str:
        return self.vertices[-1]


def make_walk(instance: Instance, edge_indices, at: str | None = None) -> Walk:
    """Build a Walk from edge indices, checking head-to-tail chaining.

    `at` names the single vertex of an empty walk.
    """
    idxs = tuple(int(k) for k in edge_indices)
    if not idxs:
        if at is None:
            raise ValidationError("empty walk needs an anchor vertex")
        if at not in instance.vertices:
            raise ValidationError(f"unknown vertex id {at!r}")
        return Walk(edges=(), vertices=(at,))
    verts = [instance.edges[idxs[0]].tail]
    for k in idxs:
        if not 0 <= k < instance.m:
            raise ValidationError(f"edge index {k} out of range")
        e = instance.edges[k]
        if e.tail != verts[-1]:
            raise ValidationError(
                f"broken chaining: edge ({e.tail}, {e.head}) does not start at {verts[-1]}"
            )
        verts.append(e.head)
    return Walk(edges=idxs, vertices=tuple(verts))


def walk_cost_and_check(
    instance: Instance, walk: Walk, require_cover: bool = False
) -> Fraction:
    """Total cost of a walk; optionally require that it visits every vertex."""
    verts = [instance.edges[walk.edges[0]].tail] if walk.edges else list(walk.vertices)
    for k in walk.edges:
        e = instance.edges[k]
        if e.tail != verts[-1]:
            raise ValidationError(
                f"broken chaining at edge ({e.tail}, {e.head}) after {verts[-1]}"
            )
        verts.append(e.head)
    if tuple(verts) != walk.vertices:
        raise ValidationError("walk vertex sequence does not match its edges")
    if require_cover:
        missing = set(instance.vertices) - set(verts)
        if missing:
            raise ValidationError(f"walk does not cover vertices: {sorted(missing)}")
    total = Fraction(0)
    for k in walk.edges:
        total += instance.edges[k].cost
    return total


def is_valid_st_walk(instance: Instance, walk: Walk) -> bool:
    """True when walk chains correctly and runs from s to t (path mode)."""
    try:
        walk_cost_and_check(instance, walk)
    except ValidationError:
        return False
    if instance.mode == "atspp":
        return walk.start == instance.s and walk.end == instance.t
    return walk.start == walk.end


@dataclass(frozen=True)
class SccChain:
    """Strongly connected components in a topological order."""

    components: tuple[frozenset[str], ...]

    def __len__(self) -> int:
        return len(self.components)

    def component_of(self) -> dict[str, int]:
        where = {}
        for j, comp in enumerate(self.components):
            for v in comp:
                where[v] = j
        return where


def _scc_index_sets(n: int, adj: list[list[int]]) -> list[set[int]]:
    """Tarjan's algorithm, iterative; returns components as index sets."""
    index = [-1] * n
    low = [0] * n
    on_stack = [False] * n
    stack: list[int] = []
    comps: list[set[int]] = []
    counter = 0
    for root in range(n):
        if index[root] != -1:
            continue
        work = [(root, 0)]
        while work:
            v, pi = work[-1]
            if pi == 0:
                index[v] = low[v] = counter
                counter += 1
                stack.append(v)
                on_stack[v] = True
            advanced = False
            for i in range(pi, len(adj[v])):
                w = adj[v][i]
                if index[w] == -1:
                    work[-1] = (v, i + 1)
                    work.append((w, 0))
                    advanced = True
                    break
                if on_stack[w]:
                    low[v] = min(low[v], index[w])
            if advanced:
                continue
            work.pop()
            if work:
                parent = work[-1][0]
                low[parent] = min(low[parent], low[v])
            if low[v] == index[v]:
                comp = set()
                while True:
                    w = stack.pop()
                    on_stack[w] = False
                    comp.add(w)
                    if w == v:
                        break
                comps.append(comp)
    return comps


def scc_topological_order(instance: Instance) -> SccChain:
    """SCC decomposition, topologically ordered.

    Ties between incomparable components are broken by the smallest
    contained vertex index, so the result is deterministic.
    """
    n = instance.n
    idx = instance.index()
    adj: list[list[int]] = [[] for _ in range(n)]
    for e in instance.edges:
        adj[idx[e.tail]].append(idx[e.head])
    comps = _scc_index_sets(n, adj)

    comp_of = [0] * n
    for c, comp in enumerate(comps):
        for v in comp:
            comp_of[v] = c
    succ: list[set[int]] = [set() for _ in comps]
    indeg = [0] * len(comps)
    for e in instance.edges:
        a, b = comp_of[idx[e.tail]], comp_of[idx[e.head]]
        if a != b and b not in succ[a]:
            succ[a].add(b)
            indeg[b] += 1
    heap = [(min(comp), c) for c, comp in enumerate(comps) if indeg[c] == 0]
    heapq.heapify(heap)
    order = []
    while heap:
        _, c = heapq.heappop(heap)
        order.append(c)
        for b in succ[c]:
            indeg[b] -= 1
            if indeg[b] == 0:
                heapq.heappush(heap, (min(comps[b]), b))
    assert len(order) == len(comps)
    names = instance.vertices
    return SccChain(
        components=tuple(frozenset(names[v] for v in comps[c]) for c in order)
    )


@dataclass(frozen=True)
class MetricClosure:
    """All-pairs shortest paths with expansion back to original edges."""

    instance: Instance  # complete graph on the finite distances
    paths: dict[tuple[str, str], tuple[int, ...]]  # closure pair -> original edges

    def expand(self, tail: str, head: str) -> tuple[int, ...]:
        return self.paths[(tail, head)]

    def expand_walk(self, original: Instance, closure_walk: Walk) -> Walk:
        """Rewrite a walk in the closure as a walk on original edges."""
        out: list[int] = []
        for a, b in zip(closure_walk.vertices, closure_walk.vertices[1:]):
            out.extend(self.paths[(a, b)])
        return make_walk(original, out, at=closure_walk.vertices[0])


def metric_closure(instance: Instance) -> MetricClosure:
    """Shortest-path closure; raises UnreachableError when no finite tour exists.

    Path mode requires every vertex reachable from s and t reachable from
    every vertex; tour mode requires strong connectivity.
    """
    n = instance.n
    idx = instance.index()
    names = instance.vertices
    dist: list[list[Fraction | None]] = [[None] * n for _ in range(n)]
    first: list[list[int | None]] = [[None] * n for _ in range(n)]
    nxt: list[list[int | None]] = [[None] * n for _ in range(n)]
    for k, e in enumerate(instance.edges):
        a, b = idx[e.tail], idx[e.head]
        if a == b:
            continue
        if dist[a][b] is None or e.cost < dist[a][b]:
            dist[a][b] = e.cost
            first[a][b] = k
            nxt[a][b] = b
    for v in range(n):
        dist[v][v] = Fraction(0)
    for k in range(n):
        dk = dist[k]
        for i in range(n):
            dik = dist[i][k]
            if dik is None or i == k:
                continue
            di = dist[i]
            for j in range(n):
                if j == k or j == i or dk[j] is None:
                    continue
                cand = dik + dk[j]
                if di[j] is None or cand < di[j]:
                    di[j] = cand
                    first[i][j] = first[i][k]
                    nxt[i][j] = nxt[i][k]

    _check_connectivity(instance, dist, idx)

    closure_edges = []
    paths: dict[tuple[str, str], tuple[int, ...]] = {}
    for i in range(n):
        for j in range(n):
            if i == j or dist[i][j] is None:
                continue
            closure_edges.append(Edge(names[i], names[j], dist[i][j]))
            seq = []
            u = i
            while u != j:
                seq.append(first[u][j])
                u = nxt[u][j]
            paths[(names[i], names[j])] = tuple(seq)
    closed = Instance(
        name=instance.name + ":closure",
        mode=instance.mode,
        vertices=instance.vertices,
        edges=tuple(closure_edges),
        s=instance.s,
        t=instance.t,
        node_weights=None,
    )
    return MetricClosure(instance=closed, paths=paths)


def _check_connectivity(instance: Instance, dist, idx) -> None:
    n = instance.n
    if instance.mode == "atspp":
        si, ti = idx[instance.s], idx[instance.t]
        for v in range(n):
            if dist[si][v] is None:
                raise UnreachableError(
                    f"no finite tour exists: {instance.vertices[v]!r} unreachable from s"
                )
            if dist[v][ti] is None:
                raise UnreachableError(
                    f"no finite tour exists: t unreachable from {instance.vertices[v]!r}"
                )
    else:
        for u in range(n):
            for v in range(n):
                if dist[u][v] is None:
                    raise UnreachableError(
                        f"no finite tour exists: {instance.vertices[v]!r} unreachable "
                        f"from {instance.vertices[u]!r}"
                    )


def connectivity_ok(instance: Instance) -> bool:
    """Cheap reachability pre-check matching the metric_closure preconditions."""
    n = instance.n
    idx = instance.index()
    adj: list[list[int]] = [[] for _ in range(n)]
    radj: list[list[int]] = [[] for _ in range(n)]
    for e in instance.edges:
        adj[idx[e.tail]].append(idx[e.head])
        radj[idx[e.head]].append(idx[e.tail])

    def bfs(start: int, nbrs) -> set[int]:
        seen = {start}
        frontier = [start]
        while frontier:
            nxt_frontier = []
            for v in frontier:
                for w in nbrs[v]:
                    if w not in seen:
                        seen.add(w)
                        nxt_frontier.append(w)
            frontier = nxt_frontier
        return seen

    if instance.mode == "atspp":
        return (
            len(bfs(idx[instance.s], adj)) == n and len(bfs(idx[instance.t], radj)) == n
        )
    return len(bfs(0, adj)) == n and len(bfs(0, radj)) == n


def support_graph(instance: Instance, x) -> Instance:
    """Restrict to edges with x_e > 0 (exact comparison).

    `x` is a vector indexed like instance.edges, or any object with such
    a vector in an attribute named x.
    """
    vec = getattr(x, "x", x)
    if len(vec) != instance.m:
        raise ValidationError("x vector length does not match edge count")
    keep = [k for k in range(instance.m) if vec[k] > 0]
    return Instance(
        name=instance.name + ":support",
        mode=instance.mode,
        vertices=instance.vertices,
        edges=tuple(instance.edges[k] for k in keep),
        s=instance.s,
        t=instance.t,
        node_weights=instance.node_weights,
    )
