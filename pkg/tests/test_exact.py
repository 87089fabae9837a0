"""Subset-DP optima against brute-force permutation enumeration."""

from fractions import Fraction as F
from itertools import permutations

import pytest

from hklab.core import Edge, Instance, metric_closure, walk_cost_and_check
from hklab.exact import (
    SizeCapExceeded,
    brute_force_optimal_dual,
    exact_atsp,
    exact_atspp,
)
from hklab.instances import gen_fig1, gen_fig4, gen_random
from hklab.relaxation import (
    dual_feasibility_violations,
    dual_objective_value,
    solve_relaxation,
)


def _permutation_optimum(instance):
    """Independent oracle: best vertex order over the metric closure."""
    closure = metric_closure(instance).instance
    dist = {(e.tail, e.head): e.cost for e in closure.edges}
    names = list(instance.vertices)
    if instance.mode == "atspp":
        middle = [v for v in names if v not in (instance.s, instance.t)]
        best = None
        for perm in permutations(middle):
            order = [instance.s] + list(perm) + [instance.t]
            cost = F(0)
            for a, b in zip(order, order[1:]):
                if (a, b) not in dist:
                    cost = None
                    break
                cost += dist[(a, b)]
            if cost is not None and (best is None or cost < best):
                best = cost
        return best
    first, rest = names[0], names[1:]
    best = None
    for perm in permutations(rest):
        order = [first] + list(perm) + [first]
        cost = F(0)
        for a, b in zip(order, order[1:]):
            if (a, b) not in dist:
                cost = None
                break
            cost += dist[(a, b)]
        if cost is not None and (best is None or cost < best):
            best = cost
    return best


def test_fig4_optimum():
    walk, cost = exact_atspp(gen_fig4())
    assert cost == F(1)
    assert walk.vertices == ("s", "v", "w", "t")


def test_fig1_k2_optimum_is_three():
    _, cost = exact_atspp(gen_fig1(2))
    assert cost == F(3)


def test_single_edge():
    inst = Instance(
        name="one", mode="atspp", vertices=("s", "t"),
        edges=(Edge("s", "t", F(0)),), s="s", t="t",
    )
    walk, cost = exact_atspp(inst)
    assert cost == F(0) and walk.vertices == ("s", "t")


def test_atsp_triangle():
    verts = ("u", "v", "w")
    inst = Instance(
        name="tri", mode="atsp", vertices=verts,
        edges=(Edge("u", "v", F(1)), Edge("v", "w", F(1)), Edge("w", "u", F(1))),
    )
    walk, cost = exact_atsp(inst)
    assert cost == F(3)
    assert walk.start == walk.end


def test_atsp_two_vertices():
    inst = Instance(
        name="pair", mode="atsp", vertices=("u", "v"),
        edges=(Edge("u", "v", F(1)), Edge("v", "u", F(1))),
    )
    _, cost = exact_atsp(inst)
    assert cost == F(2)


@pytest.mark.parametrize("seed", range(8))
def test_dp_matches_permutation_oracle_atspp(seed):
    inst = gen_random(6, F(3, 5), 9, seed=seed)
    walk, cost = exact_atspp(inst)
    assert cost == _permutation_optimum(inst)
    assert walk_cost_and_check(inst, walk, require_cover=True) == cost
    assert walk.start == inst.s and walk.end == inst.t


@pytest.mark.parametrize("seed", range(8))
def test_dp_matches_permutation_oracle_atsp(seed):
    inst = gen_random(6, F(3, 5), 9, seed=100 + seed, mode="atsp")
    walk, cost = exact_atsp(inst)
    assert cost == _permutation_optimum(inst)
    assert walk_cost_and_check(inst, walk, require_cover=True) == cost


@pytest.mark.parametrize("seed", range(6))
def test_weak_duality_exact(seed):
    inst = gen_random(7, F(1, 2), 10, seed=200 + seed)
    lp, _ = solve_relaxation(inst)
    _, opt = exact_atspp(inst)
    assert opt >= lp.objective


def test_size_cap():
    inst = gen_fig1(9)  # 22 vertices
    with pytest.raises(SizeCapExceeded):
        exact_atspp(inst)


def test_brute_dual_fig4():
    cert = brute_force_optimal_dual(gen_fig4())
    assert cert.delta_star == F(1)
    w = cert.witness
    assert dual_feasibility_violations(w.instance, w.a, w.y) == []
    assert dual_objective_value(w.instance, w.a, w.y) == w.objective == F(1)
    assert w.a["s"] - w.a["t"] == F(1)


def test_brute_dual_single_edge():
    inst = Instance(
        name="one", mode="atspp", vertices=("s", "t"),
        edges=(Edge("s", "t", F(7, 3)),), s="s", t="t",
    )
    assert brute_force_optimal_dual(inst).delta_star == F(-7, 3)


def test_brute_dual_cap():
    with pytest.raises(SizeCapExceeded):
        brute_force_optimal_dual(gen_fig1(5))  # 14 vertices > 12
