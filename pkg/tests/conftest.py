"""Shared corpus builders for the test suite."""

import random
from fractions import Fraction as F

import pytest

from hklab.core import make_walk, scc_topological_order, support_graph, walk_cost_and_check
from hklab.exact import brute_force_optimal_dual
from hklab.instances import gen_random
from hklab.relaxation import min_gap_dual, solve_relaxation
from hklab.structure import _adjacency, _bfs_path


def random_covering_walks(inst, k, rng):
    """k random s-t-walks jointly covering the vertex set, via BFS hops.

    Stops are ordered along the strongly-connected-component chain so
    every hop goes forward and stays reachable.
    """
    adj = _adjacency(inst)
    allv = frozenset(inst.vertices)
    comp_of = scc_topological_order(inst).component_of()
    middle = [v for v in inst.vertices if v not in (inst.s, inst.t)]
    rng.shuffle(middle)
    buckets = [middle[i::k] for i in range(k)]
    walks = []
    for bucket in buckets:
        bucket.sort(key=lambda v: comp_of[v])
        stops = [inst.s] + bucket + [inst.t]
        edges = []
        for a, b in zip(stops, stops[1:]):
            hop = _bfs_path(adj, allv, a, b)
            assert hop is not None
            edges.extend(hop)
        walks.append(make_walk(inst, edges, at=inst.s))
    total = sum((walk_cost_and_check(inst, w) for w in walks), F(0))
    return tuple(walks), total


def normalized_support(inst):
    """(support graph, its LP solution); the LP value is preserved."""
    lp, _ = solve_relaxation(inst)
    sg = support_graph(inst, lp)
    lps, dual = solve_relaxation(sg)
    assert lps.objective == lp.objective
    return sg, lps, dual


@pytest.fixture(scope="session")
def gap_corpus():
    """200 seeded random feasible support-graph instances with n <= 9,
    each with its LP solution, minimum-gap certificate, and the
    enumeration oracle's certificate."""
    out = []
    sizes = [5, 6, 7, 8, 9]
    probs = [F(2, 5), F(1, 2), F(3, 5)]
    for seed in range(200):
        inst = gen_random(sizes[seed % 5], probs[seed % 3], 10, seed=seed)
        sg, lps, dual = normalized_support(inst)
        cert = min_gap_dual(sg, lps)
        oracle = brute_force_optimal_dual(sg)
        out.append((sg, lps, dual, cert, oracle))
    return out


@pytest.fixture(scope="session")
def merge_corpus():
    """100 support-graph instances with covering walks; 40 node-weighted."""
    out = []
    for i in range(100):
        nw = i % 5 in (1, 3)  # 40 of 100
        inst = gen_random(
            5 + i % 5, F(1, 2), 7, seed=9000 + i, node_weighted=nw
        )
        sg, lps, _ = normalized_support(inst)
        cert = min_gap_dual(sg, lps)
        k = 2 + i % 3
        walks, total = random_covering_walks(sg, k, random.Random(f"mc{i}"))
        out.append((sg, lps, cert, k, walks, total, nw))
    return out
