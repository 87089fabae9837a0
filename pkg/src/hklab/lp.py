"""Self-contained exact linear programming over the rationals.

solve_exact_lp minimizes c'z subject to explicit rows (<=, >=, =) with
variables bounded below by zero unless declared free.  No floating point
is used anywhere: the tableau is kept as an integer matrix M together
with a common denominator D (the determinant of the current basis), so
every tableau entry is exactly M[i][j]/D.  Pivoting updates M with the
identity

    M'[i][j] = (M[i][j] * M[r][c] - M[i][c] * M[r][j]) // D

where the division is exact because the entries are subdeterminants of
the integer input data.  This is dramatically faster than a tableau of
Fraction objects while remaining exact.

Bland's anti-cycling rule guarantees termination; every optimal result
is verified internally (primal and dual feasibility, complementary
slackness, and equality of the primal and dual objectives).
"""

from __future__ import annotations

from dataclasses import dataclass, field
from fractions import Fraction
from math import gcd

MAX_PIVOTS = 5_000_000


class LpError(RuntimeError):
    pass


@dataclass
class LinearProgram:
    """min objective . z subject to rows; variables >= 0 unless free."""

    num_vars: int
    objective: list[Fraction]
    rows: list[tuple[list[Fraction], str, Fraction]] = field(default_factory=list)
    free_vars: set[int] = field(default_factory=set)

    def add_row(self, coeffs, rel: str, rhs) -> None:
        if rel not in ("<=", ">=", "="):
            raise LpError(f"bad relation {rel!r}")
        coeffs = [Fraction(c) for c in coeffs]
        if len(coeffs) != self.num_vars:
            raise LpError("coefficient vector length mismatch")
        self.rows.append((coeffs, rel, Fraction(rhs)))


@dataclass
class LpResult:
    status: str  # "optimal" | "infeasible" | "unbounded"
    objective: Fraction | None = None
    x: tuple[Fraction, ...] | None = None
    duals: tuple[Fraction, ...] | None = None
    # Farkas vector (per row) when infeasible; improving ray (per variable)
    # when unbounded.
    certificate: tuple[Fraction, ...] | None = None


def _lcm(a: int, b: int) -> int:
    return a // gcd(a, b) * b


class _Tableau:
    """Integer simplex tableau M with denominator D; true entries M/D."""

    def __init__(self, matrix, basis, ncols, obj_rows):
        self.M = matrix  # constraint rows then objective rows; last col is rhs
        self.D = 1
        self.basis = basis  # basic column per constraint row
        self.ncols = ncols
        self.nrows = len(basis)
        self.obj_rows = obj_rows

    def sign(self, value: int) -> int:
        """Sign of value/D."""
        if value == 0:
            return 0
        return 1 if (value > 0) == (self.D > 0) else -1

    def pivot(self, pr: int, pc: int) -> None:
        M, D = self.M, self.D
        prow = M[pr]
        piv = prow[pc]
        assert piv != 0
        for i in range(len(M)):
            if i == pr:
                continue
            row = M[i]
            f = row[pc]
            if f:
                M[i] = [(a * piv - f * b) // D for a, b in zip(row, prow)]
            elif piv != D:
                M[i] = [a * piv // D for a in row]
        self.D = piv
        self.basis[pr] = pc

    def run(self, obj_row: int, enterable) -> str:
        """Bland's rule simplex on the given objective row.

        Returns "optimal" or "unbounded" (entering column recorded in
        self.unbounded_col).
        """
        M = self.M
        rhs = self.ncols
        pivots = 0
        while True:
            obj = M[obj_row]
            pc = -1
            for j in range(self.ncols):
                if enterable[j] and self.sign(obj[j]) < 0:
                    pc = j
                    break
            if pc < 0:
                return "optimal"
            pr = -1
            best_num = best_den = 0
            for i in range(self.nrows):
                a = M[i][pc]
                if self.sign(a) <= 0:
                    continue
                b = M[i][rhs]
                # compare b/a against best_num/best_den by cross-multiplying;
                # a and best_den share the sign of D, so a*best_den > 0 and
                # the comparison direction is unconditional
                if pr < 0:
                    pr, best_num, best_den = i, b, a
                    continue
                lhs = b * best_den
                rhs_cmp = best_num * a
                if lhs < rhs_cmp:
                    pr, best_num, best_den = i, b, a
                elif lhs == rhs_cmp and self.basis[i] < self.basis[pr]:
                    pr = i
                    best_num, best_den = b, a
            if pr < 0:
                self.unbounded_col = pc
                return "unbounded"
            self.pivot(pr, pc)
            pivots += 1
            if pivots > MAX_PIVOTS:
                raise LpError("pivot limit exceeded")

    def value(self, i: int, j: int) -> Fraction:
        return Fraction(self.M[i][j], self.D)


def _scale_to_int(coeffs):
    """Scale a rational vector to integers; returns (int list, factor)."""
    denom = 1
    for c in coeffs:
        denom = _lcm(denom, c.denominator)
    return [int(c * denom) for c in coeffs], denom


def solve_exact_lp(lp: LinearProgram) -> LpResult:
    nvar = lp.num_vars
    if len(lp.objective) != nvar:
        raise LpError("objective length mismatch")

    # duplicate-row removal (exact matches only)
    kept: list[int] = []
    seen: dict = {}
    row_alias: list[int] = []
    for r, (coeffs, rel, rhs) in enumerate(lp.rows):
        key = (tuple(coeffs), rel, rhs)
        if key in seen:
            row_alias.append(seen[key])
        else:
            seen[key] = len(kept)
            row_alias.append(len(kept))
            kept.append(r)

    # column layout: structural (free vars split into +/-), then slacks,
    # then artificials, then rhs
    col_var: list[tuple[int, int]] = []
    for j in range(nvar):
        col_var.append((j, +1))
        if j in lp.free_vars:
            col_var.append((j, -1))
    nstruct = len(col_var)

    nrows = len(kept)
    slack_col = [nstruct + i for i in range(nrows)]
    rows_int: list[list[int]] = []
    row_scale: list[Fraction] = []  # standard row = scale * original row
    for i, r in enumerate(kept):
        coeffs, rel, rhs = lp.rows[r]
        vec = [coeffs[j] * sgn for (j, sgn) in col_var]
        ints, denom = _scale_to_int(vec + [rhs])
        sigma = 1
        if ints[-1] < 0:
            ints = [-a for a in ints]
            sigma = -1
        # the slack is appended unscaled (it absorbs the row's scale), so
        # initial-basic slack columns are exact unit vectors
        svec = [0] * nrows
        if rel == "<=":
            svec[i] = sigma
        elif rel == ">=":
            svec[i] = -sigma
        rows_int.append(ints[:-1] + svec + [ints[-1]])
        row_scale.append(Fraction(sigma * denom))

    obj_int, obj_denom = _scale_to_int(lp.objective)
    obj_vec = [obj_int[j] * sgn for (j, sgn) in col_var]

    # initial basis: a slack with +1 coefficient where available, else an
    # artificial column
    art_col: list[int | None] = [None] * nrows
    basis = [0] * nrows
    n_art = 0
    for i in range(nrows):
        if rows_int[i][nstruct + i] > 0:
            basis[i] = nstruct + i
        else:
            art_col[i] = nstruct + nrows + n_art
            basis[i] = art_col[i]
            n_art += 1
    ncols = nstruct + nrows + n_art

    matrix: list[list[int]] = []
    for i in range(nrows):
        row = rows_int[i][: nstruct + nrows] + [0] * n_art + [rows_int[i][-1]]
        if art_col[i] is not None:
            row[art_col[i]] = 1
        matrix.append(row)
    # phase-2 objective row: reduced costs against the all-zero-cost basis
    obj2 = obj_vec + [0] * (nrows + n_art) + [0]
    matrix.append(obj2)
    obj2_row = nrows
    # phase-1 objective row: minimize the sum of artificials
    obj1_row = None
    if n_art:
        obj1 = [0] * (ncols + 1)
        for j in range(ncols + 1):
            s = 0
            for i in range(nrows):
                if art_col[i] is not None:
                    s += matrix[i][j]
            obj1[j] = -s
        for i in range(nrows):
            if art_col[i] is not None:
                obj1[art_col[i]] = 0
        matrix.append(obj1)
        obj1_row = nrows + 1

    tab = _Tableau(matrix, basis, ncols, (obj2_row, obj1_row))
    is_art = [False] * ncols
    for c in art_col:
        if c is not None:
            is_art[c] = True

    if n_art:
        enterable = [not is_art[j] for j in range(ncols)]
        status = tab.run(obj1_row, enterable)
        assert status == "optimal", "phase 1 cannot be unbounded"
        ph1 = -tab.value(obj1_row, ncols)
        if ph1 > 0:
            return _infeasible_result(lp, tab, kept, row_alias, art_col, slack_col, row_scale)
        # drive remaining artificials out of the basis (degenerate pivots)
        for i in range(nrows):
            if is_art[tab.basis[i]]:
                for j in range(ncols):
                    if not is_art[j] and tab.M[i][j] != 0:
                        tab.pivot(i, j)
                        break

    enterable = [not is_art[j] for j in range(ncols)]
    status = tab.run(obj2_row, enterable)
    if status == "unbounded":
        return _unbounded_result(lp, tab, col_var, nstruct)
    return _optimal_result(
        lp, tab, kept, row_alias, art_col, slack_col, row_scale, obj_denom, col_var, obj2_row
    )


def _row_duals(tab: _Tableau, obj_row: int, nrows, art_col, slack_col, art_cost: int):
    """Read the multiplier of each standard-form row off its unit column."""
    y = []
    for i in range(nrows):
        col = art_col[i] if art_col[i] is not None else slack_col[i]
        cost = art_cost if art_col[i] is not None else 0
        y.append(cost - tab.value(obj_row, col))
    return y


def _map_duals_back(lp, kept, row_alias, y_std, row_scale, obj_denom):
    # duplicate rows keep multiplier 0; the first occurrence carries it
    out = [Fraction(0)] * len(lp.rows)
    for i, r in enumerate(kept):
        out[r] = y_std[i] * row_scale[i] / obj_denom
    return out


def _infeasible_result(lp, tab, kept, row_alias, art_col, slack_col, row_scale):
    obj1_row = tab.obj_rows[1]
    y_std = _row_duals(tab, obj1_row, len(kept), art_col, slack_col, art_cost=1)
    farkas = _map_duals_back(lp, kept, row_alias, y_std, row_scale, 1)
    _check_farkas(lp, farkas)
    return LpResult(status="infeasible", certificate=tuple(farkas))


def _unbounded_result(lp, tab, col_var, nstruct):
    pc = tab.unbounded_col
    d_std = [Fraction(0)] * tab.ncols
    d_std[pc] = Fraction(1)
    for i in range(tab.nrows):
        if tab.M[i][pc]:
            d_std[tab.basis[i]] = -tab.value(i, pc)
    ray = [Fraction(0)] * lp.num_vars
    for c, (j, sgn) in enumerate(col_var):
        ray[j] += sgn * d_std[c]
    _check_ray(lp, ray)
    return LpResult(status="unbounded", certificate=tuple(ray))


def _optimal_result(
    lp, tab, kept, row_alias, art_col, slack_col, row_scale, obj_denom, col_var, obj2_row
):
    nrows = len(kept)
    x_std = [Fraction(0)] * tab.ncols
    for i in range(nrows):
        x_std[tab.basis[i]] = tab.value(i, tab.ncols)
    x = [Fraction(0)] * lp.num_vars
    for c, (j, sgn) in enumerate(col_var):
        x[j] += sgn * x_std[c]
    y_std = _row_duals(tab, obj2_row, nrows, art_col, slack_col, art_cost=0)
    duals = _map_duals_back(lp, kept, row_alias, y_std, row_scale, obj_denom)
    objective = sum(c * v for c, v in zip(lp.objective, x))
    _check_optimal(lp, x, duals, objective)
    return LpResult(
        status="optimal", objective=objective, x=tuple(x), duals=tuple(duals)
    )


def _check_optimal(lp, x, duals, objective) -> None:
    """Exact verification: feasibility, duality, complementary slackness."""
    for j in range(lp.num_vars):
        if j not in lp.free_vars and x[j] < 0:
            raise LpError("internal: negative primal value")
    dual_obj = Fraction(0)
    for (coeffs, rel, rhs), y in zip(lp.rows, duals):
        lhs = sum(c * v for c, v in zip(coeffs, x))
        if rel == "<=" and lhs > rhs:
            raise LpError("internal: primal row violated")
        if rel == ">=" and lhs < rhs:
            raise LpError("internal: primal row violated")
        if rel == "=" and lhs != rhs:
            raise LpError("internal: primal row violated")
        if rel == "<=" and y > 0:
            raise LpError("internal: dual sign violated")
        if rel == ">=" and y < 0:
            raise LpError("internal: dual sign violated")
        if y != 0 and lhs != rhs:
            raise LpError("internal: complementary slackness violated (row)")
        dual_obj += y * rhs
    for j in range(lp.num_vars):
        reduced = lp.objective[j] - sum(
            duals[r] * lp.rows[r][0][j] for r in range(len(lp.rows))
        )
        if j in lp.free_vars:
            if reduced != 0:
                raise LpError("internal: dual infeasible on free variable")
        else:
            if reduced < 0:
                raise LpError("internal: dual infeasible")
            if x[j] > 0 and reduced != 0:
                raise LpError("internal: complementary slackness violated (column)")
    if dual_obj != objective:
        raise LpError("internal: strong duality violated")


def _check_farkas(lp, y) -> None:
    agg = Fraction(0)
    for (coeffs, rel, rhs), yi in zip(lp.rows, y):
        if rel == "<=" and yi > 0:
            raise LpError("internal: farkas sign violated")
        if rel == ">=" and yi < 0:
            raise LpError("internal: farkas sign violated")
        agg += yi * rhs
    if agg <= 0:
        raise LpError("internal: farkas aggregation not positive")
    for j in range(lp.num_vars):
        col = sum(y[r] * lp.rows[r][0][j] for r in range(len(lp.rows)))
        if j in lp.free_vars:
            if col != 0:
                raise LpError("internal: farkas column not zero on free variable")
        elif col > 0:
            raise LpError("internal: farkas column positive")


def _check_ray(lp, d) -> None:
    for j in range(lp.num_vars):
        if j not in lp.free_vars and d[j] < 0:
            raise LpError("internal: ray negative on bounded variable")
    if sum(c * v for c, v in zip(lp.objective, d)) >= 0:
        raise LpError("internal: ray does not improve")
    for coeffs, rel, rhs in lp.rows:
        val = sum(c * v for c, v in zip(coeffs, d))
        if rel == "<=" and val > 0:
            raise LpError("internal: ray leaves <= row")
        if rel == ">=" and val < 0:
            raise LpError("internal: ray leaves >= row")
        if rel == "=" and val != 0:
            raise LpError("internal: ray leaves = row")
