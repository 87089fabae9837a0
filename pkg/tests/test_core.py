"""Instance model, SCC chains, metric closure, walks, support graphs."""

from fractions import Fraction as F
from itertools import product

import pytest

from hklab.core import (
    Edge,
    Instance,
    UnreachableError,
    ValidationError,
    make_walk,
    metric_closure,
    scc_topological_order,
    support_graph,
    validate_instance,
    walk_cost_and_check,
)
from hklab.instances import gen_fig1, gen_fig4, gen_random
from hklab.relaxation import solve_relaxation


def fig4_raw():
    return {
        "name": "fig4",
        "mode": "atspp",
        "vertices": ["s", "v", "w", "t"],
        "edges": [
            {"tail": "s", "head": "v", "cost": "0"},
            {"tail": "s", "head": "w", "cost": "0"},
            {"tail": "v", "head": "w", "cost": "1"},
            {"tail": "v", "head": "t", "cost": "0"},
            {"tail": "w", "head": "t", "cost": "0"},
        ],
        "s": "s",
        "t": "t",
    }


def test_validate_fig4_roundtrip():
    inst = validate_instance(fig4_raw())
    assert inst.n == 4 and inst.m == 5
    again = validate_instance(inst.to_json_dict())
    assert again == inst


def test_validate_rejects_negative_cost():
    raw = fig4_raw()
    raw["edges"][0]["cost"] = "-1"
    with pytest.raises(ValidationError, match="negative cost"):
        validate_instance(raw)


def test_validate_rejects_unknown_vertex():
    raw = fig4_raw()
    raw["edges"][0]["tail"] = "zz"
    with pytest.raises(ValidationError, match="unknown vertex"):
        validate_instance(raw)


def test_validate_rejects_equal_endpoints():
    raw = fig4_raw()
    raw["t"] = "s"
    with pytest.raises(ValidationError, match="s = t"):
        validate_instance(raw)


def test_validate_node_weight_mismatch():
    raw = {
        "name": "tri",
        "mode": "atsp",
        "vertices": ["u", "v", "w"],
        "edges": [{"tail": "u", "head": "v", "cost": "3"}],
        "node_weights": {"u": "1", "v": "1", "w": "1"},
    }
    with pytest.raises(ValidationError, match="node-weight mismatch"):
        validate_instance(raw)
    raw["edges"][0]["cost"] = "2"
    assert validate_instance(raw).node_weights["u"] == F(1)


def test_scc_simple_path_gives_singletons():
    inst = Instance(
        name="p", mode="atspp",
        vertices=("s", "u", "t"),
        edges=(Edge("s", "u", F(0)), Edge("u", "t", F(0))),
        s="s", t="t",
    )
    chain = scc_topological_order(inst)
    assert [sorted(c) for c in chain.components] == [["s"], ["u"], ["t"]]


def test_scc_bidirected_path_is_one_component():
    inst = Instance(
        name="b", mode="atsp",
        vertices=("x", "y", "z"),
        edges=(
            Edge("x", "y", F(1)), Edge("y", "x", F(1)),
            Edge("y", "z", F(1)), Edge("z", "y", F(1)),
        ),
    )
    chain = scc_topological_order(inst)
    assert len(chain) == 1


def test_scc_fig1_rows_merge():
    inst = gen_fig1(4)
    chain = scc_topological_order(inst)
    middle = frozenset(f"{r}{j}" for r in "ab" for j in range(1, 6))
    assert chain.components == (frozenset({"s"}), middle, frozenset({"t"}))
    # independent audit: mutual reachability inside each component,
    # every edge nondecreasing in component index
    where = chain.component_of()
    for e in inst.edges:
        assert where[e.tail] <= where[e.head]


def test_metric_closure_fig4():
    closure = metric_closure(gen_fig4())
    dist = {(e.tail, e.head): e.cost for e in closure.instance.edges}
    assert dist[("s", "t")] == F(0)  # via s -> v -> t
    assert dist[("v", "w")] == F(1)
    assert dist[("s", "w")] == F(0)
    assert ("t", "s") not in dist  # absent pairs model infinite cost


def test_metric_closure_triangle_inequality_exact():
    inst = gen_random(7, F(2, 3), 9, seed=5)
    closure = metric_closure(inst)
    dist = {(e.tail, e.head): e.cost for e in closure.instance.edges}
    for u, v, w in product(inst.vertices, repeat=3):
        if len({u, v, w}) < 3:
            continue
        if (u, v) in dist and (v, w) in dist and (u, w) in dist:
            assert dist[(u, w)] <= dist[(u, v)] + dist[(v, w)]


def test_metric_closure_identity_on_complete_metric():
    verts = ("a", "b", "c")
    edges = tuple(
        Edge(u, v, F(1)) for u in verts for v in verts if u != v
    )
    inst = Instance(name="k3", mode="atsp", vertices=verts, edges=edges)
    closure = metric_closure(inst)
    assert {(e.tail, e.head, e.cost) for e in closure.instance.edges} == {
        (e.tail, e.head, e.cost) for e in inst.edges
    }


def test_metric_closure_unreachable():
    inst = Instance(
        name="iso", mode="atsp",
        vertices=("a", "b"),
        edges=(),
    )
    with pytest.raises(UnreachableError, match="no finite tour"):
        metric_closure(inst)


def test_closure_expansion_preserves_cost():
    inst = gen_random(6, F(1, 2), 8, seed=11)
    closure = metric_closure(inst)
    pairs = [(e.tail, e.head) for e in closure.instance.edges]
    for tail, head in pairs[:10]:
        seq = closure.paths[(tail, head)]
        walk = make_walk(inst, seq, at=tail)
        direct = next(
            e.cost for e in closure.instance.edges if (e.tail, e.head) == (tail, head)
        )
        assert walk_cost_and_check(inst, walk) == direct


def test_walk_cost_fig4():
    inst = gen_fig4()
    idx = {(e.tail, e.head): i for i, e in enumerate(inst.edges)}
    walk = make_walk(inst, [idx[("s", "v")], idx[("v", "w")], idx[("w", "t")]])
    assert walk_cost_and_check(inst, walk, require_cover=True) == F(1)
    short = make_walk(inst, [idx[("s", "v")], idx[("v", "t")]])
    with pytest.raises(ValidationError, match="does not cover"):
        walk_cost_and_check(inst, short, require_cover=True)


def test_empty_walk_costs_zero():
    inst = gen_fig4()
    walk = make_walk(inst, (), at="v")
    assert walk_cost_and_check(inst, walk) == F(0)


def test_walk_rejects_broken_chaining():
    inst = gen_fig4()
    idx = {(e.tail, e.head): i for i, e in enumerate(inst.edges)}
    with pytest.raises(ValidationError, match="chaining"):
        make_walk(inst, [idx[("s", "v")], idx[("w", "t")]])


def test_support_graph_fig4():
    inst = gen_fig4()
    lp, _ = solve_relaxation(inst)
    assert lp.x == (F(1), F(0), F(1), F(0), F(1))
    sg = support_graph(inst, lp)
    assert [(e.tail, e.head) for e in sg.edges] == [("s", "v"), ("v", "w"), ("w", "t")]
    lp2, _ = solve_relaxation(sg)
    assert lp2.objective == lp.objective


def test_support_graph_keeps_strictly_positive():
    from hklab.instances import fig1_certificate

    inst = gen_fig1(4)
    x, _, _ = fig1_certificate(4)
    sg = support_graph(inst, x)
    assert sg.m == inst.m  # the half-everywhere optimum uses all 22 edges
    lp, _ = solve_relaxation(inst)
    lp2, _ = solve_relaxation(sg)
    assert lp2.objective == lp.objective
