"""Held-Karp style LP relaxations of directed tour and path instances.

The primal has flow-conservation rows plus cut constraints x(delta(U)) >= 2
over an exponential family; we generate violated cuts by exact minimum
cuts and re-solve until separation finds nothing.  The dual assembled
from the final restricted LP (with y_U = 0 on ungenerated sets) is then
feasible and optimal for the full dual.

Beyond solving, this module uncrosses dual supports into laminar
families, computes the minimum of a_s - a_t over all optimal duals by
column generation, probes that minimum via a feedback edge (t, s), and
minimizes primal solutions componentwise.
"""

from __future__ import annotations

from dataclasses import dataclass
from fractions import Fraction

from .core import Edge, Instance, Walk, connectivity_ok, format_rational
from .flows import min_cut_side
from .lp import LinearProgram, solve_exact_lp

MAX_ROUNDS = 100_000


class InfeasibleRelaxation(RuntimeError):
    def __init__(self, message: str, farkas=None):
        super().__init__(message)
        self.farkas = farkas


class UnboundedRelaxation(RuntimeError):
    def __init__(self, message: str, ray=None):
        super().__init__(message)
        self.ray = ray


class PreconditionError(RuntimeError):
    pass


@dataclass(frozen=True)
class LpSolution:
    instance: Instance
    x: tuple[Fraction, ...]
    objective: Fraction
    cuts: tuple[frozenset[str], ...]

    def to_json_dict(self) -> dict:
        return {
            "objective": format_rational(self.objective),
            "x": [format_rational(v) for v in self.x],
            "cuts": [sorted(u) for u in self.cuts],
        }


@dataclass(frozen=True)
class DualSolution:
    instance: Instance
    a: dict[str, Fraction]
    y: dict[frozenset[str], Fraction]
    laminar: bool
    objective: Fraction

    @property
    def support(self) -> list[frozenset[str]]:
        return sorted(self.y, key=_set_key)

    def gap(self) -> Fraction:
        """a_s - a_t (path mode only)."""
        return self.a[self.instance.s] - self.a[self.instance.t]

    def to_json_dict(self) -> dict:
        return {
            "a": {v: format_rational(q) for v, q in sorted(self.a.items())},
            "y": [
                {"set": sorted(u), "value": format_rational(self.y[u])}
                for u in self.support
            ],
            "laminar": self.laminar,
            "objective": format_rational(self.objective),
        }


@dataclass(frozen=True)
class GapCertificate:
    delta_star: Fraction
    witness: DualSolution


def _set_key(u: frozenset[str]):
    return (len(u), tuple(sorted(u)))


def edge_in_delta(e: Edge, u: frozenset[str]) -> bool:
    return (e.tail in u) != (e.head in u)


def cut_value(instance: Instance, x, u: frozenset[str]) -> Fraction:
    total = Fraction(0)
    for k, e in enumerate(instance.edges):
        if edge_in_delta(e, u):
            total += x[k]
    return total


def is_laminar(sets) -> bool:
    sets = list(sets)
    for i in range(len(sets)):
        for j in range(i + 1, len(sets)):
            a, b = sets[i], sets[j]
            if a & b and not (a <= b or b <= a):
                return False
    return True


def dual_edge_slack(instance: Instance, a, y, e: Edge) -> Fraction:
    """c(e) - (a_head - a_tail + sum of y_U over cut sets containing e)."""
    lhs = a[e.head] - a[e.tail]
    for u, val in y.items():
        if edge_in_delta(e, u):
            lhs += val
    return e.cost - lhs


def dual_objective_value(instance: Instance, a, y) -> Fraction:
    total = 2 * sum(y.values(), Fraction(0))
    if instance.mode == "atspp":
        total += a[instance.t] - a[instance.s]
    return total


def dual_feasibility_violations(instance: Instance, a, y) -> list[str]:
    out = []
    for e in instance.edges:
        if dual_edge_slack(instance, a, y, e) < 0:
            out.append(f"edge ({e.tail}, {e.head}) constraint violated")
    for u, val in y.items():
        if val < 0:
            out.append(f"negative y on {sorted(u)}")
    return out


def _conservation_rhs(instance: Instance) -> dict[str, Fraction]:
    rhs = {v: Fraction(0) for v in instance.vertices}
    if instance.mode == "atspp":
        rhs[instance.s] = Fraction(-1)
        rhs[instance.t] = Fraction(1)
    return rhs


def _initial_cut_family(instance: Instance) -> list[frozenset[str]]:
    if instance.mode == "atspp":
        inner = [v for v in instance.vertices if v not in (instance.s, instance.t)]
    else:
        inner = list(instance.vertices) if instance.n >= 2 else []
    return [frozenset([v]) for v in inner]


def _build_primal(instance: Instance, cuts) -> LinearProgram:
    m = instance.m
    lp = LinearProgram(m, [e.cost for e in instance.edges])
    rhs = _conservation_rhs(instance)
    for v in instance.vertices:
        coeffs = [Fraction(0)] * m
        for k, e in enumerate(instance.edges):
            if e.head == v:
                coeffs[k] += 1
            if e.tail == v:
                coeffs[k] -= 1
        lp.add_row(coeffs, "=", rhs[v])
    for u in cuts:
        coeffs = [
            Fraction(1) if edge_in_delta(e, u) else Fraction(0) for e in instance.edges
        ]
        lp.add_row(coeffs, ">=", Fraction(2))
    return lp


def separate_subtour_cuts(instance: Instance, x) -> list[frozenset[str]]:
    """All distinct violated cut sets found by one round of minimum cuts.

    Path mode contracts {s, t} into one terminal and computes a minimum
    cut from every other vertex to it in the symmetrized capacity graph;
    tour mode anchors at the first vertex instead.  An empty result means
    every cut constraint holds.
    """
    names = instance.vertices
    n = instance.n
    found: dict[frozenset[str], Fraction] = {}
    if instance.mode == "atspp":
        inner = [v for v in names if v not in (instance.s, instance.t)]
        if not inner:
            return []
        cid = {v: i for i, v in enumerate(inner)}
        z = len(inner)
        nn = z + 1
        caps: dict[tuple[int, int], Fraction] = {}
        for k, e in enumerate(instance.edges):
            a = cid.get(e.tail, z)
            b = cid.get(e.head, z)
            if a == b:
                continue
            key = (a, b) if a < b else (b, a)
            caps[key] = caps.get(key, Fraction(0)) + x[k]
        for v in inner:
            value, side = min_cut_side(nn, caps, cid[v], z)
            if value < 2:
                u = frozenset(inner[i] for i in side)
                found.setdefault(u, value)
    else:
        if n < 2:
            return []
        idx = instance.index()
        caps = {}
        for k, e in enumerate(instance.edges):
            a, b = idx[e.tail], idx[e.head]
            if a == b:
                continue
            key = (a, b) if a < b else (b, a)
            caps[key] = caps.get(key, Fraction(0)) + x[k]
        for v in range(1, n):
            value, side = min_cut_side(n, caps, v, 0)
            if value < 2:
                u = frozenset(names[i] for i in side)
                found.setdefault(u, value)
    return sorted(found, key=_set_key)


def solve_relaxation(instance: Instance) -> tuple[LpSolution, DualSolution]:
    """Optimal primal and dual of the cut relaxation, both exact.

    Raises InfeasibleRelaxation when the connectivity preconditions fail
    and UnboundedRelaxation when a negative-cost cycle exists (possible
    only for internally built instances with a negative feedback edge).
    """
    if not connectivity_ok(instance):
        raise InfeasibleRelaxation("no finite tour exists")
    family: list[frozenset[str]] = _initial_cut_family(instance)
    in_family = set(family)
    for _ in range(MAX_ROUNDS):
        lp = _build_primal(instance, family)
        res = solve_exact_lp(lp)
        if res.status == "unbounded":
            raise UnboundedRelaxation("negative-cost circulation", ray=res.certificate)
        if res.status == "infeasible":
            raise InfeasibleRelaxation("relaxation infeasible", farkas=res.certificate)
        violated = [u for u in separate_subtour_cuts(instance, res.x) if u not in in_family]
        if not violated:
            break
        family.extend(violated)
        in_family.update(violated)
    else:
        raise RuntimeError("separation did not converge")

    a = {v: res.duals[i] for i, v in enumerate(instance.vertices)}
    y: dict[frozenset[str], Fraction] = {}
    for j, u in enumerate(family):
        val = res.duals[instance.n + j]
        if val != 0:
            y[u] = val
    primal = LpSolution(
        instance=instance, x=res.x, objective=res.objective, cuts=tuple(family)
    )
    dual = DualSolution(
        instance=instance,
        a=a,
        y=y,
        laminar=is_laminar(y),
        objective=res.objective,
    )
    return primal, dual


def uncross_dual(dual: DualSolution) -> DualSolution:
    """Rewrite the dual support into a laminar family.

    Crossing pairs A, B are replaced by A - B and B - A, shifting
    min(y_A, y_B); this preserves a, feasibility, and the objective while
    strictly decreasing sum of y_U |U|, so it terminates.
    """
    inst = dual.instance
    if dual_feasibility_violations(inst, dual.a, dual.y):
        raise PreconditionError("dual is not feasible")
    y = dict(dual.y)
    cap = 4 ** inst.n
    steps = 0
    while True:
        sets = sorted(y, key=_set_key)
        pair = None
        for i in range(len(sets)):
            for j in range(i + 1, len(sets)):
                a_set, b_set = sets[i], sets[j]
                if a_set & b_set and not (a_set <= b_set or b_set <= a_set):
                    pair = (a_set, b_set)
                    break
            if pair:
                break
        if pair is None:
            break
        a_set, b_set = pair
        eps = min(y[a_set], y[b_set])
        for u in (a_set, b_set):
            y[u] -= eps
            if y[u] == 0:
                del y[u]
        for u in (a_set - b_set, b_set - a_set):
            y[u] = y.get(u, Fraction(0)) + eps
        steps += 1
        if steps > cap:
            raise RuntimeError("uncrossing exceeded its iteration cap")
    out = DualSolution(
        instance=inst, a=dict(dual.a), y=y, laminar=True, objective=dual.objective
    )
    assert not dual_feasibility_violations(inst, out.a, out.y)
    assert dual_objective_value(inst, out.a, out.y) == dual.objective
    assert is_laminar(out.y)
    return out


def min_gap_dual(instance: Instance, lp: LpSolution) -> GapCertificate:
    """Minimize a_s - a_t over all optimal duals, by column generation.

    The master LP keeps variables a (free) and y_U for a growing family
    of sets; pricing searches for a set U with x(delta(U)) < 2*lambda
    under the master's row multipliers, by minimum cut.  The witness is
    uncrossed before returning.
    """
    if instance.mode != "atspp":
        raise PreconditionError("minimum potential gap is defined in path mode only")
    lp_value = lp.objective
    names = instance.vertices
    n = instance.n
    s, t = instance.s, instance.t
    inner = [v for v in names if v not in (s, t)]
    family = sorted(set(_initial_cut_family(instance)) | set(lp.cuts), key=_set_key)
    in_family = set(family)

    res = None
    for _ in range(MAX_ROUNDS):
        master = LinearProgram(
            n + len(family),
            [Fraction(0)] * (n + len(family)),
            free_vars=set(range(n)),
        )
        vid = {v: i for i, v in enumerate(names)}
        master.objective[vid[s]] = Fraction(1)
        master.objective[vid[t]] = Fraction(-1)
        for e in instance.edges:
            coeffs = [Fraction(0)] * (n + len(family))
            coeffs[vid[e.head]] += 1
            coeffs[vid[e.tail]] -= 1
            for j, u in enumerate(family):
                if edge_in_delta(e, u):
                    coeffs[n + j] = Fraction(1)
            master.add_row(coeffs, "<=", e.cost)
        opt_row = [Fraction(0)] * (n + len(family))
        opt_row[vid[t]] += 1
        opt_row[vid[s]] -= 1
        for j in range(len(family)):
            opt_row[n + j] = Fraction(2)
        master.add_row(opt_row, "=", lp_value)

        res = solve_exact_lp(master)
        if res.status != "optimal":
            raise RuntimeError(f"gap master LP came out {res.status}")
        price = [-res.duals[k] for k in range(instance.m)]
        lam = res.duals[instance.m]

        if not inner:
            break
        cid = {v: i for i, v in enumerate(inner)}
        z = len(inner)
        caps: dict[tuple[int, int], Fraction] = {}
        for k, e in enumerate(instance.edges):
            a_id = cid.get(e.tail, z)
            b_id = cid.get(e.head, z)
            if a_id == b_id:
                continue
            key = (a_id, b_id) if a_id < b_id else (b_id, a_id)
            caps[key] = caps.get(key, Fraction(0)) + price[k]
        new_sets = []
        for v in inner:
            value, side = min_cut_side(z + 1, caps, cid[v], z)
            if value < 2 * lam:
                u = frozenset(inner[i] for i in side)
                if u not in in_family:
                    new_sets.append(u)
        if not new_sets:
            break
        for u in sorted(set(new_sets), key=_set_key):
            family.append(u)
            in_family.add(u)
    else:
        raise RuntimeError("column generation did not converge")

    a = {v: res.x[i] for i, v in enumerate(names)}
    y = {u: res.x[n + j] for j, u in enumerate(family) if res.x[n + j] != 0}
    delta = res.objective
    witness = uncross_dual(
        DualSolution(
            instance=instance, a=a, y=y, laminar=is_laminar(y), objective=lp_value
        )
    )
    assert witness.gap() == delta
    assert -lp_value <= delta <= lp_value
    return GapCertificate(delta_star=delta, witness=witness)


def lp_with_feedback_edge(instance: Instance, delta) -> Fraction | None:
    """LP value after adding an edge (t, s) of cost delta.

    Negative delta is allowed (the probe below the minimum gap needs it);
    None is returned when the augmented LP is unbounded.
    """
    if instance.mode != "atspp":
        raise PreconditionError("feedback edge applies to path mode")
    augmented = Instance(
        name=instance.name + ":feedback",
        mode="atspp",
        vertices=instance.vertices,
        edges=instance.edges + (Edge(instance.t, instance.s, Fraction(delta)),),
        s=instance.s,
        t=instance.t,
        node_weights=None,
    )
    try:
        primal, _ = solve_relaxation(augmented)
    except UnboundedRelaxation:
        return None
    return primal.objective


def minimize_primal(instance: Instance, x) -> LpSolution:
    """Componentwise-minimal feasible solution below x (minimum total).

    Solves min sum(x') subject to feasibility and x' <= x; any strictly
    smaller feasible vector would have a smaller sum, so the optimum is
    componentwise minimal.  The total is asserted to be at most n^2.
    """
    vec = getattr(x, "x", x)
    m = instance.m
    if len(vec) != m:
        raise PreconditionError("x vector length does not match edge count")
    family = _initial_cut_family(instance)
    in_family = set(family)
    for _ in range(MAX_ROUNDS):
        lp = _build_primal(instance, family)
        lp.objective = [Fraction(1)] * m
        for k in range(m):
            coeffs = [Fraction(0)] * m
            coeffs[k] = Fraction(1)
            lp.add_row(coeffs, "<=", Fraction(vec[k]))
        res = solve_exact_lp(lp)
        if res.status != "optimal":
            raise RuntimeError(f"primal minimization came out {res.status}")
        violated = [u for u in separate_subtour_cuts(instance, res.x) if u not in in_family]
        if not violated:
            break
        family.extend(violated)
        in_family.update(violated)
    else:
        raise RuntimeError("separation did not converge")
    total = sum(res.x, Fraction(0))
    assert total <= instance.n**2, "minimal solution exceeds the n^2 bound"
    cost = sum(e.cost * v for e, v in zip(instance.edges, res.x))
    return LpSolution(
        instance=instance, x=res.x, objective=cost, cuts=tuple(family)
    )


def cy_cost(dual: DualSolution, walk: Walk) -> Fraction:
    """Total crossing cost of a walk: sum over edges of y on crossed sets."""
    inst = dual.instance
    total = Fraction(0)
    for k in walk.edges:
        e = inst.edges[k]
        for u, val in dual.y.items():
            if edge_in_delta(e, u):
                total += val
    return total
