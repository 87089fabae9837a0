"""Instance families and reductions between problem variants.

Generators are pure and deterministic; random instances are seeded and
regenerate (with derived seeds) until the connectivity preconditions
hold.  The two-row family and the unit-cost ring families also emit
their hand-built primal/dual certificates for testing.
"""

from __future__ import annotations

import random
from dataclasses import dataclass
from fractions import Fraction

from .core import (
    Edge,
    Instance,
    UnreachableError,
    ValidationError,
    Walk,
    connectivity_ok,
    make_walk,
    metric_closure,
    parse_rational,
    walk_cost_and_check,
)


def gen_fig1(k: int) -> Instance:
    """Two-row path instance with LP value k and optimum 2k - 1.

    Two rows of k+1 vertices are joined by zero-cost forward edges and
    diagonals, with k unit-cost backward edges per row; the half-everywhere
    vector is LP-optimal.
    """
    if k < 1:
        raise ValidationError("k must be at least 1")
    arow = [f"a{j}" for j in range(1, k + 2)]
    brow = [f"b{j}" for j in range(1, k + 2)]
    zero, one = Fraction(0), Fraction(1)
    edges = [Edge("s", arow[0], zero), Edge("s", brow[0], zero)]
    edges += [Edge(arow[j], arow[j + 1], zero) for j in range(k)]
    edges += [Edge(brow[j], brow[j + 1], zero) for j in range(k)]
    edges += [
        Edge(arow[0], brow[-1], zero),
        Edge(brow[0], arow[-1], zero),
        Edge(arow[-1], "t", zero),
        Edge(brow[-1], "t", zero),
    ]
    edges += [Edge(arow[j + 1], arow[j], one) for j in range(k)]
    edges += [Edge(brow[j + 1], brow[j], one) for j in range(k)]
    return Instance(
        name=f"fig1-k{k}",
        mode="atspp",
        vertices=tuple(["s"] + arow + brow + ["t"]),
        edges=tuple(edges),
        s="s",
        t="t",
    )


def fig1_certificate(k: int):
    """Optimal primal/dual pair for gen_fig1(k): (x vector, a, y).

    x is 1/2 on every edge; y is 1/2 on the nested row prefixes; the a
    values follow the arithmetic pattern of the k = 4 picture.
    """
    inst = gen_fig1(k)
    half = Fraction(1, 2)
    x = tuple(half for _ in inst.edges)
    a = {"s": Fraction(k), "t": Fraction(0)}
    for j in range(1, k + 2):
        a[f"a{j}"] = Fraction(k + 1 - j, 2)
        a[f"b{j}"] = Fraction(k + 1 - j, 2)
    y = {}
    for j in range(1, k + 1):
        y[frozenset(f"a{i}" for i in range(1, j + 1))] = half
        y[frozenset(f"b{i}" for i in range(1, j + 1))] = half
    return x, a, y


def gen_fig4() -> Instance:
    """Four-vertex instance whose minimum potential gap equals its LP value."""
    zero, one = Fraction(0), Fraction(1)
    return Instance(
        name="fig4",
        mode="atspp",
        vertices=("s", "v", "w", "t"),
        edges=(
            Edge("s", "v", zero),
            Edge("s", "w", zero),
            Edge("v", "w", one),
            Edge("v", "t", zero),
            Edge("w", "t", zero),
        ),
        s="s",
        t="t",
    )


def _bem_d(l: int, i: int) -> int:
    d = 0
    for j in range(1, i + 1):
        d = l**j - d - 2
    return d


def _bem_build(l: int, i: int):
    """Unglued level-i graph: (vertices, edges [(tail, head, spoke?)], v, v', w, w')."""
    if i == 0:
        verts = [f"p{j}" for j in range(l + 1)]
        edges = []
        for j in range(l):
            edges.append((verts[j], verts[j + 1], False))
            edges.append((verts[j + 1], verts[j], False))
        return verts, edges, verts[0], verts[0], verts[-1], verts[-1]
    d = _bem_d(l, i)
    sub = _bem_build(l, i - 1)
    verts: list[str] = []
    edges: list[tuple[str, str, bool]] = []
    copies = []
    for j in range(1, l + 1):
        pre = f"c{j}:"
        sv, se, v, vp, w, wp = sub
        verts += [pre + u for u in sv]
        edges += [(pre + a, pre + b, blue) for (a, b, blue) in se]
        copies.append((pre + v, pre + vp, pre + w, pre + wp))
    spokes = []
    for ell in range(1, l + 2):
        chain = [f"s{ell}:q{h}" for h in range(d + 1)]
        verts += chain
        if ell % 2 == 1:  # directed from top (o) down to bottom (u)
            for h in range(d):
                edges.append((chain[h], chain[h + 1], True))
        else:  # directed from bottom (u) up to top (o)
            for h in range(d, 0, -1):
                edges.append((chain[h], chain[h - 1], True))
        spokes.append((chain[0], chain[-1]))
    for j in range(1, l + 1):
        v, vp, w, wp = copies[j - 1]
        o_left, u_left = spokes[j - 1]
        o_right, u_right = spokes[j]
        if j % 2 == 1:
            edges.append((vp, o_left, False))
            edges.append((u_left, w, False))
            edges.append((o_right, v, False))
            edges.append((wp, u_right, False))
        else:
            edges.append((o_left, v, False))
            edges.append((wp, u_left, False))
            edges.append((vp, o_right, False))
            edges.append((u_right, w, False))
    o1, u1 = spokes[0]
    olast, ulast = spokes[l]
    return verts, edges, o1, u1, olast, ulast


def _bem_glued(l: int, i: int):
    """Level-i unit-cost ring: identify the two terminal spoke paths."""
    if l < 4 or l % 2 != 0:
        raise ValidationError("l must be an even integer >= 4")
    if i < 0:
        raise ValidationError("i must be nonnegative")
    verts, edges, v, vp, w, wp = _bem_build(l, i)
    if i == 0:
        rename = {w: v}
    else:
        d = _bem_d(l, i)
        rename = {f"s{l + 1}:q{h}": f"s1:q{h}" for h in range(d + 1)}
    out_verts = [u for u in verts if u not in rename]
    seen = {}
    out_edges: list[tuple[str, str, bool]] = []
    for a, b, blue in edges:
        a, b = rename.get(a, a), rename.get(b, b)
        if (a, b) in seen:
            continue
        seen[(a, b)] = True
        out_edges.append((a, b, blue))
    return out_verts, out_edges


def gen_bem(l: int, i: int) -> Instance:
    """Unit-cost digraph family whose LP value equals its vertex count.

    Level 0 is a bidirected ring of length l; level i assembles l copies
    of level i-1 with l+1 alternating one-way spoke paths of length
    d_i = l^i - d_{i-1} - 2, then identifies the two terminal spokes.
    """
    verts, edges = _bem_glued(l, i)
    one = Fraction(1)
    return Instance(
        name=f"bem-l{l}-i{i}",
        mode="atsp",
        vertices=tuple(verts),
        edges=tuple(Edge(a, b, one) for a, b, _ in edges),
    )


def bem_certificate(l: int, i: int) -> tuple[Fraction, ...]:
    """Half-integral optimal vector for gen_bem: 1 on spokes, 1/2 elsewhere."""
    _, edges = _bem_glued(l, i)
    return tuple(Fraction(1) if blue else Fraction(1, 2) for _, _, blue in edges)


def gen_random(
    n: int,
    edge_probability,
    cost_bound: int,
    seed: int,
    node_weighted: bool = False,
    mode: str = "atspp",
) -> Instance:
    """Seeded random digraph, retried until the LP preconditions hold."""
    if n < 2:
        raise ValidationError("n must be at least 2")
    if mode not in ("atsp", "atspp"):
        raise ValidationError("mode must be 'atsp' or 'atspp'")
    p = parse_rational(edge_probability)
    if not 0 <= p <= 1:
        raise ValidationError("edge probability must be in [0, 1]")
    names = tuple(f"v{i}" for i in range(n))
    for attempt in range(100):
        rng = random.Random(f"{seed}:{attempt}")
        weights = None
        if node_weighted:
            weights = {v: Fraction(rng.randint(0, cost_bound)) for v in names}
        edges = []
        for u in names:
            for v in names:
                if u == v:
                    continue
                if rng.randrange(p.denominator) >= p.numerator:
                    continue
                if node_weighted:
                    cost = weights[u] + weights[v]
                else:
                    cost = Fraction(rng.randint(0, cost_bound))
                edges.append(Edge(u, v, cost))
        inst = Instance(
            name=f"random-n{n}-p{p}-b{cost_bound}-s{seed}"
            + ("-nw" if node_weighted else "")
            + f"-{mode}",
            mode=mode,
            vertices=names,
            edges=tuple(edges),
            s=names[0] if mode == "atspp" else None,
            t=names[-1] if mode == "atspp" else None,
            node_weights=weights,
        )
        if connectivity_ok(inst):
            return inst
    raise RuntimeError(f"no feasible instance found for seed {seed} after 100 attempts")


def split_vertex(instance: Instance, v: str, style: str = "out_in") -> Instance:
    """Turn a tour instance into a path instance by splitting one vertex.

    out_in: the new s inherits the outgoing edges of v and the new t the
    entering ones.  duplicate: both copies inherit all incident edges.
    """
    if instance.mode != "atsp":
        raise ValidationError("split_vertex expects a tour-mode instance")
    if v not in instance.vertices:
        raise ValidationError(f"unknown vertex id {v!r}")
    if style not in ("out_in", "duplicate"):
        raise ValidationError(f"unknown split style {style!r}")
    if any(e.tail == v and e.head == v for e in instance.edges):
        raise ValidationError("cannot split a vertex with a self-loop")
    vs, vt = f"{v}.s", f"{v}.t"
    vertices = []
    for u in instance.vertices:
        if u == v:
            vertices += [vs, vt]
        else:
            vertices.append(u)
    edges = []
    for e in instance.edges:
        if e.tail == v:
            edges.append(Edge(vs, e.head, e.cost))
            if style == "duplicate":
                edges.append(Edge(vt, e.head, e.cost))
        elif e.head == v:
            edges.append(Edge(e.tail, vt, e.cost))
            if style == "duplicate":
                edges.append(Edge(e.tail, vs, e.cost))
        else:
            edges.append(e)
    if not any(e.tail == vs for e in edges):
        raise ValidationError("split vertex has no outgoing edges: s is a dead end")
    if not any(e.head == vt for e in edges):
        raise ValidationError("split vertex has no entering edges: t unreachable")
    weights = None
    if instance.node_weights is not None:
        weights = dict(instance.node_weights)
        cv = weights.pop(v)
        weights[vs] = cv
        weights[vt] = cv
    return Instance(
        name=instance.name + f":split-{v}-{style}",
        mode="atspp",
        vertices=tuple(vertices),
        edges=tuple(edges),
        s=vs,
        t=vt,
        node_weights=weights,
    )


@dataclass(frozen=True)
class ReductionMap:
    kind: str  # "nw_to_unweighted" | "trivial"
    original: Instance
    reduced: Instance
    scale: Fraction  # the constant M
    eps: Fraction
    vertex_map: dict[str, str]  # reduced vertex -> original vertex
    edge_map: tuple[int | None, ...]  # reduced edge -> original edge (None on paths)


def nw_to_unweighted(instance: Instance, eps) -> tuple[Instance, ReductionMap]:
    """Turn a node-weighted tour instance into a unit-cost digraph.

    Every vertex v with floor(2 c_v / M) > 0 splits into v- and v+ joined
    by that many unit edges, where M = 2 eps c(V) / n^2.  The LP and
    optimum values of the result sandwich the originals within 1 + eps
    after scaling by M.
    """
    eps = parse_rational(eps)
    if eps <= 0:
        raise ValidationError("eps must be positive")
    if instance.mode != "atsp" or instance.node_weights is None:
        raise ValidationError("expects a node-weighted tour-mode instance")
    weights = instance.node_weights
    total = sum(weights.values(), Fraction(0))
    n = instance.n
    if total == 0:
        reduced = Instance(
            name=instance.name + ":uw-trivial",
            mode="atsp",
            vertices=("z",),
            edges=(),
        )
        rmap = ReductionMap(
            kind="trivial",
            original=instance,
            reduced=reduced,
            scale=Fraction(1),
            eps=eps,
            vertex_map={"z": instance.vertices[0]},
            edge_map=(),
        )
        return reduced, rmap

    scale = 2 * eps * total / Fraction(n * n)
    cbar = {v: int((2 * weights[v]) // scale) for v in instance.vertices}
    vertices: list[str] = []
    in_name: dict[str, str] = {}
    out_name: dict[str, str] = {}
    vmap: dict[str, str] = {}
    for v in instance.vertices:
        if cbar[v] > 0:
            chain = [f"{v}-"] + [f"{v}%{h}" for h in range(1, cbar[v])] + [f"{v}+"]
            vertices += chain
            in_name[v], out_name[v] = chain[0], chain[-1]
            for u in chain:
                vmap[u] = v
        else:
            vertices.append(v)
            in_name[v] = out_name[v] = v
            vmap[v] = v
    one = Fraction(1)
    edges: list[Edge] = []
    edge_map: list[int | None] = []
    for k, e in enumerate(instance.edges):
        edges.append(Edge(out_name[e.tail], in_name[e.head], one))
        edge_map.append(k)
    for v in instance.vertices:
        if cbar[v] > 0:
            chain = [in_name[v]] + [f"{v}%{h}" for h in range(1, cbar[v])] + [out_name[v]]
            for a, b in zip(chain, chain[1:]):
                edges.append(Edge(a, b, one))
                edge_map.append(None)
    assert len(vertices) <= n + Fraction(n * n) / eps
    reduced = Instance(
        name=instance.name + f":uw-eps{eps}",
        mode="atsp",
        vertices=tuple(vertices),
        edges=tuple(edges),
    )
    rmap = ReductionMap(
        kind="nw_to_unweighted",
        original=instance,
        reduced=reduced,
        scale=scale,
        eps=eps,
        vertex_map=vmap,
        edge_map=tuple(edge_map),
    )
    return reduced, rmap


def lift_tour(rmap: ReductionMap, tour: Walk) -> Walk:
    """Pull a tour of the reduced instance back, contracting inserted paths.

    The lifted tour satisfies c(F) <= M * |F'| exactly (asserted).
    """
    original = rmap.original
    if rmap.kind == "trivial":
        walk_cost_and_check(rmap.reduced, tour, require_cover=True)
        if not connectivity_ok(original):
            raise UnreachableError("original instance is not strongly connected")
        closure = metric_closure(original)
        order = list(original.vertices)
        seq: list[int] = []
        for a, b in zip(order, order[1:] + order[:1]):
            if a != b:
                seq.extend(closure.paths[(a, b)])
        lifted = make_walk(original, seq, at=order[0])
        cost = walk_cost_and_check(original, lifted, require_cover=True)
        assert cost <= rmap.scale * len(tour.edges)
        return lifted
    cost_reduced = walk_cost_and_check(rmap.reduced, tour, require_cover=True)
    if tour.start != tour.end:
        raise ValidationError("a tour must be a closed walk")
    assert cost_reduced == len(tour.edges)  # unit costs
    kept = [rmap.edge_map[k] for k in tour.edges if rmap.edge_map[k] is not None]
    lifted = make_walk(original, kept, at=rmap.vertex_map[tour.start])
    if lifted.start != lifted.end:
        raise ValidationError("lifted walk is not closed")
    cost = walk_cost_and_check(original, lifted, require_cover=True)
    assert cost <= rmap.scale * len(tour.edges)
    return lifted
