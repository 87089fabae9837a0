"""Exact optimum computation at desk scale.

Tours and s-t walks that must visit every vertex at least once reduce,
over the metric closure, to visiting every vertex exactly once; that is
solved by subset dynamic programming.  Costs are scaled to integers by
the common denominator, so the DP runs on plain ints and stays exact.

brute_force_optimal_dual is the testing oracle for the minimum potential
gap: it solves the full dual LP with every cut variable present (no
separation, no column generation), entirely independent of the
cutting-plane machinery.
"""

from __future__ import annotations

from fractions import Fraction
from itertools import combinations
from math import gcd

from .core import Instance, Walk, connectivity_ok, metric_closure
from .lp import LinearProgram, solve_exact_lp
from .relaxation import DualSolution, GapCertificate, PreconditionError, is_laminar

DEFAULT_DP_CAP = 20
DEFAULT_DUAL_CAP = 12


class SizeCapExceeded(RuntimeError):
    pass


def _scaled_distances(closure: Instance):
    """Distance matrix as ints (scaled by the lcm of denominators)."""
    n = closure.n
    idx = closure.index()
    scale = 1
    for e in closure.edges:
        scale = scale // gcd(scale, e.cost.denominator) * e.cost.denominator
    dist: list[list[int | None]] = [[None] * n for _ in range(n)]
    for e in closure.edges:
        a, b = idx[e.tail], idx[e.head]
        dist[a][b] = int(e.cost * scale)
    return dist, scale


UNREACHED = 1 << 62  # sentinel above any scaled path cost at desk scale


def _subset_dp(dist, n: int, start: int):
    """dp[mask][v] = min cost of a path from start over exactly mask, ending at v."""
    full = 1 << n
    dists = [[UNREACHED if d is None else d for d in row] for row in dist]
    dp: list = [None] * full
    row0 = [UNREACHED] * n
    row0[start] = 0
    dp[1 << start] = row0
    all_mask = full - 1
    for mask in range(1, full):
        if not (mask >> start) & 1:
            continue
        row = dp[mask]
        if row is None:
            continue
        absent = all_mask & ~mask
        for last in range(n):
            base = row[last]
            if base >= UNREACHED:
                continue
            drow = dists[last]
            rem = absent
            while rem:
                bit = rem & -rem
                rem ^= bit
                nxt = bit.bit_length() - 1
                w = drow[nxt]
                if w >= UNREACHED:
                    continue
                cand = base + w
                target = dp[mask | bit]
                if target is None:
                    target = [UNREACHED] * n
                    dp[mask | bit] = target
                if cand < target[nxt]:
                    target[nxt] = cand
    return dp


def _reconstruct(dp, dist, n: int, start: int, end: int):
    """Vertex order achieving dp[full][end], smallest-index tie-break."""
    mask = (1 << n) - 1
    order = [end]
    cur = end
    while cur != start or mask != (1 << start):
        prev_mask = mask ^ (1 << cur)
        row = dp[prev_mask]
        found = None
        for u in range(n):
            if row is None or not (prev_mask >> u) & 1 or row[u] >= UNREACHED:
                continue
            if dist[u][cur] is None:
                continue
            if row[u] + dist[u][cur] == dp[mask][cur]:
                found = u
                break
        assert found is not None
        order.append(found)
        mask = prev_mask
        cur = found
    order.reverse()
    return order


def exact_atspp(instance: Instance, cap: int = DEFAULT_DP_CAP) -> tuple[Walk, Fraction]:
    """Cheapest s-t-walk visiting every vertex at least once, exactly."""
    if instance.mode != "atspp":
        raise PreconditionError("exact_atspp expects a path-mode instance")
    if instance.n > cap:
        raise SizeCapExceeded(f"n = {instance.n} exceeds the cap {cap}")
    closure = metric_closure(instance)
    dist, scale = _scaled_distances(closure.instance)
    n = instance.n
    idx = instance.index()
    si, ti = idx[instance.s], idx[instance.t]
    dp = _subset_dp(dist, n, si)
    full = (1 << n) - 1
    if dp[full] is None or dp[full][ti] >= UNREACHED:
        raise PreconditionError("no covering walk exists")
    best = dp[full][ti]
    order = _reconstruct(dp, dist, n, si, ti)
    names = instance.vertices
    closure_walk = _order_to_walk(closure.instance, [names[v] for v in order])
    walk = closure.expand_walk(instance, closure_walk)
    return walk, Fraction(best, scale)


def exact_atsp(instance: Instance, cap: int = DEFAULT_DP_CAP) -> tuple[Walk, Fraction]:
    """Cheapest closed walk visiting every vertex at least once, exactly."""
    if instance.mode != "atsp":
        raise PreconditionError("exact_atsp expects a tour-mode instance")
    if instance.n > cap:
        raise SizeCapExceeded(f"n = {instance.n} exceeds the cap {cap}")
    names = instance.vertices
    if instance.n == 1:
        return Walk(edges=(), vertices=(names[0],)), Fraction(0)
    closure = metric_closure(instance)
    dist, scale = _scaled_distances(closure.instance)
    n = instance.n
    dp = _subset_dp(dist, n, 0)
    full = (1 << n) - 1
    best = None
    best_end = None
    for last in range(1, n):
        row = dp[full]
        if row is None or row[last] >= UNREACHED or dist[last][0] is None:
            continue
        cand = row[last] + dist[last][0]
        if best is None or cand < best:
            best, best_end = cand, last
    if best is None:
        raise PreconditionError("no covering tour exists")
    order = _reconstruct(dp, dist, n, 0, best_end)
    order.append(0)
    closure_walk = _order_to_walk(closure.instance, [names[v] for v in order])
    walk = closure.expand_walk(instance, closure_walk)
    return walk, Fraction(best, scale)


def _order_to_walk(closure: Instance, names: list[str]) -> Walk:
    by_pair = {}
    for k, e in enumerate(closure.edges):
        by_pair[(e.tail, e.head)] = k
    return Walk(
        edges=tuple(by_pair[(a, b)] for a, b in zip(names, names[1:])),
        vertices=tuple(names),
    )


def brute_force_optimal_dual(
    instance: Instance, cap: int = DEFAULT_DUAL_CAP
) -> GapCertificate:
    """Minimum potential gap by solving the full dual LP, no separation.

    Builds the dual with all 2^(n-2) - 1 cut variables, reads the LP value
    off its optimum, then minimizes a_s - a_t on the optimal face.
    """
    if instance.mode != "atspp":
        raise PreconditionError("the dual oracle expects a path-mode instance")
    if instance.n > cap:
        raise SizeCapExceeded(f"n = {instance.n} exceeds the cap {cap}")
    if not connectivity_ok(instance):
        raise PreconditionError("no finite tour exists")
    names = instance.vertices
    n = instance.n
    inner = [v for v in names if v not in (instance.s, instance.t)]
    sets = []
    for size in range(1, len(inner) + 1):
        for combo in combinations(inner, size):
            sets.append(frozenset(combo))
    nv = n + len(sets)
    vid = {v: i for i, v in enumerate(names)}

    def edge_rows(lp: LinearProgram) -> None:
        for e in instance.edges:
            coeffs = [Fraction(0)] * nv
            coeffs[vid[e.head]] += 1
            coeffs[vid[e.tail]] -= 1
            for j, u in enumerate(sets):
                if (e.tail in u) != (e.head in u):
                    coeffs[n + j] = Fraction(1)
            lp.add_row(coeffs, "<=", e.cost)

    # maximize the dual objective to obtain the LP value
    obj = [Fraction(0)] * nv
    obj[vid[instance.s]] = Fraction(1)
    obj[vid[instance.t]] = Fraction(-1)
    for j in range(len(sets)):
        obj[n + j] = Fraction(-2)
    lp1 = LinearProgram(nv, obj, free_vars=set(range(n)))
    edge_rows(lp1)
    res1 = solve_exact_lp(lp1)
    if res1.status != "optimal":
        raise RuntimeError(f"full dual LP came out {res1.status}")
    lp_value = -res1.objective

    # minimize a_s - a_t over the optimal face
    obj2 = [Fraction(0)] * nv
    obj2[vid[instance.s]] = Fraction(1)
    obj2[vid[instance.t]] = Fraction(-1)
    lp2 = LinearProgram(nv, obj2, free_vars=set(range(n)))
    edge_rows(lp2)
    opt_row = [Fraction(0)] * nv
    opt_row[vid[instance.t]] += 1
    opt_row[vid[instance.s]] -= 1
    for j in range(len(sets)):
        opt_row[n + j] = Fraction(2)
    lp2.add_row(opt_row, "=", lp_value)
    res2 = solve_exact_lp(lp2)
    if res2.status != "optimal":
        raise RuntimeError(f"gap dual LP came out {res2.status}")

    a = {v: res2.x[vid[v]] for v in names}
    y = {u: res2.x[n + j] for j, u in enumerate(sets) if res2.x[n + j] != 0}
    witness = DualSolution(
        instance=instance, a=a, y=y, laminar=is_laminar(y), objective=lp_value
    )
    return GapCertificate(delta_star=res2.objective, witness=witness)
