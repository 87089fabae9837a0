"""Exact LP engine tests, including a basic-solution enumeration oracle."""

import random
from fractions import Fraction as F
from itertools import combinations

import pytest

from hklab.lp import LinearProgram, LpError, solve_exact_lp


def test_single_lower_bound():
    lp = LinearProgram(1, [F(1)])
    lp.add_row([F(1)], ">=", F(3))
    res = solve_exact_lp(lp)
    assert res.status == "optimal"
    assert res.x == (F(3),)
    assert res.duals == (F(1),)


def test_max_form_via_negation():
    lp = LinearProgram(1, [F(-1)])
    lp.add_row([F(1)], "<=", F(5))
    res = solve_exact_lp(lp)
    assert res.status == "optimal"
    assert res.x == (F(5),)


def test_infeasible_has_farkas():
    lp = LinearProgram(1, [F(0)])
    lp.add_row([F(1)], ">=", F(1))
    lp.add_row([F(1)], "<=", F(0))
    res = solve_exact_lp(lp)
    assert res.status == "infeasible"
    y = res.certificate
    # y aggregates the rows into 0 >= positive
    assert y[0] >= 0 and y[1] <= 0
    assert y[0] * F(1) + y[1] * F(0) > 0


def test_unbounded_has_ray():
    lp = LinearProgram(2, [F(-1), F(0)])
    lp.add_row([F(0), F(1)], "<=", F(1))
    res = solve_exact_lp(lp)
    assert res.status == "unbounded"
    d = res.certificate
    assert d[0] > 0
    assert sum(c * v for c, v in zip(lp.objective, d)) < 0


def test_free_variable_equality():
    lp = LinearProgram(2, [F(1), F(-1)], free_vars={0, 1})
    lp.add_row([F(-1), F(1)], "=", F(5))
    res = solve_exact_lp(lp)
    assert res.status == "optimal"
    assert res.objective == F(-5)


def test_duplicate_rows_share_one_multiplier():
    lp = LinearProgram(1, [F(1)])
    lp.add_row([F(1)], ">=", F(2))
    lp.add_row([F(1)], ">=", F(2))
    res = solve_exact_lp(lp)
    assert res.status == "optimal"
    assert res.objective == F(2)
    assert sorted(res.duals) == [F(0), F(1)]


def _solve_square(rows, rhs):
    """Exact Gaussian elimination; None when singular."""
    n = len(rhs)
    a = [list(r) + [b] for r, b in zip(rows, rhs)]
    for col in range(n):
        piv = next((r for r in range(col, n) if a[r][col] != 0), None)
        if piv is None:
            return None
        a[col], a[piv] = a[piv], a[col]
        inv = a[col][col]
        a[col] = [v / inv for v in a[col]]
        for r in range(n):
            if r != col and a[r][col] != 0:
                f = a[r][col]
                a[r] = [v - f * w for v, w in zip(a[r], a[col])]
    return [a[r][n] for r in range(n)]


def _enumerate_optimum(lp: LinearProgram):
    """Minimum objective over all vertices of the feasible region.

    Independent oracle: tries every choice of n active constraints from
    rows plus nonnegativity bounds; needs the region to be bounded enough
    for its optimum to be attained at a vertex (we only use it on LPs
    with explicit box rows).
    """
    n = lp.num_vars
    cands = [(list(c), F(r)) for c, _, r in lp.rows]
    for j in range(n):
        if j not in lp.free_vars:
            e = [F(0)] * n
            e[j] = F(1)
            cands.append((e, F(0)))
    best = None
    for combo in combinations(range(len(cands)), n):
        rows = [cands[i][0] for i in combo]
        rhs = [cands[i][1] for i in combo]
        x = _solve_square(rows, rhs)
        if x is None:
            continue
        ok = True
        for coeffs, rel, r in lp.rows:
            v = sum(c * xx for c, xx in zip(coeffs, x))
            if rel == "<=" and v > r or rel == ">=" and v < r or rel == "=" and v != r:
                ok = False
                break
        if ok and all(x[j] >= 0 for j in range(n) if j not in lp.free_vars):
            val = sum(c * xx for c, xx in zip(lp.objective, x))
            if best is None or val < best:
                best = val
    return best


@pytest.mark.parametrize("seed", range(30))
def test_random_small_lps_match_vertex_enumeration(seed):
    rng = random.Random(seed)
    n = rng.randint(1, 3)
    lp = LinearProgram(n, [F(rng.randint(-4, 4), rng.randint(1, 3)) for _ in range(n)])
    for _ in range(rng.randint(1, 3)):
        coeffs = [F(rng.randint(-3, 3)) for _ in range(n)]
        lp.add_row(coeffs, rng.choice(["<=", ">="]), F(rng.randint(-4, 6)))
    for j in range(n):  # box to keep the oracle's vertex search complete
        e = [F(0)] * n
        e[j] = F(1)
        lp.add_row(e, "<=", F(7))
    res = solve_exact_lp(lp)
    expected = _enumerate_optimum(lp)
    if expected is None:
        assert res.status == "infeasible"
    else:
        assert res.status == "optimal"
        assert res.objective == expected


@pytest.mark.parametrize("seed", range(10))
def test_row_permutation_preserves_objective(seed):
    rng = random.Random(1000 + seed)
    n = 4
    lp = LinearProgram(n, [F(rng.randint(0, 5)) for _ in range(n)])
    lp.add_row([F(1)] * n, ">=", F(3))
    for _ in range(4):
        lp.add_row([F(rng.randint(0, 2)) for _ in range(n)], ">=", F(rng.randint(0, 3)))
    base = solve_exact_lp(lp)
    perm = list(range(len(lp.rows)))
    rng.shuffle(perm)
    lp2 = LinearProgram(n, lp.objective)
    for i in perm:
        lp2.add_row(*lp.rows[i])
    assert solve_exact_lp(lp2).objective == base.objective


def test_rejects_bad_relation():
    lp = LinearProgram(1, [F(1)])
    with pytest.raises(LpError):
        lp.add_row([F(1)], "<", F(0))
