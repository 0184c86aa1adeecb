"""Exact linear programming over rationals.

Dense two-phase simplex with Bland's rule (guaranteed termination, fully
deterministic).  There is no floating point anywhere on the solve path;
tableau arithmetic uses gmpy2.mpq when available and falls back to
fractions.Fraction otherwise.  Intended for the small programs this package
produces (tens of variables, up to ~100 rows).
"""

from __future__ import annotations

from dataclasses import dataclass, field
from fractions import Fraction

try:
    from gmpy2 import mpq as _Q
except ImportError:  # pragma: no cover - gmpy2 is a declared dependency
    _Q = Fraction

_ZERO = _Q(0)
_ONE = _Q(1)


class LpError(ValueError):
    pass


@dataclass(frozen=True)
class LinearProgram:
    """minimize objective . x  subject to  rows a . x <= b  and variable bounds.

    `bounds[i]` is a (lo, hi) pair; None means unbounded on that side.  When
    `bounds` is omitted every variable is free.
    """

    variables: tuple
    objective: tuple
    constraints: tuple  # of (coeff tuple, rhs)
    bounds: tuple = None

    def __post_init__(self):
        variables = tuple(self.variables)
        n = len(variables)
        objective = tuple(Fraction(c) for c in self.objective)
        if len(objective) != n:
            raise LpError(f"objective has {len(objective)} coefficients for {n} variables")
        rows = []
        for coeffs, rhs in self.constraints:
            coeffs = tuple(Fraction(c) for c in coeffs)
            if len(coeffs) != n:
                raise LpError(f"constraint has {len(coeffs)} coefficients for {n} variables")
            rows.append((coeffs, Fraction(rhs)))
        bounds = self.bounds
        if bounds is None:
            bounds = tuple((None, None) for _ in range(n))
        else:
            bounds = tuple(
                (None if lo is None else Fraction(lo), None if hi is None else Fraction(hi))
                for lo, hi in bounds
            )
            if len(bounds) != n:
                raise LpError(f"{len(bounds)} bounds for {n} variables")
        object.__setattr__(self, "variables", variables)
        object.__setattr__(self, "objective", objective)
        object.__setattr__(self, "constraints", tuple(rows))
        object.__setattr__(self, "bounds", bounds)


@dataclass(frozen=True)
class LpOutcome:
    status: str  # optimal | infeasible | unbounded
    x: tuple = None
    value: Fraction = None

    def __bool__(self):
        return self.status == "optimal"


def lp_to_text(lp: LinearProgram) -> str:
    """Human-readable inequality listing, one constraint per line."""

    def term(c, v):
        if c == 1:
            return v
        if c == -1:
            return f"-{v}"
        return f"{c}*{v}"

    def combo(coeffs):
        parts = [term(c, v) for c, v in zip(coeffs, lp.variables) if c != 0]
        return " + ".join(parts).replace("+ -", "- ") if parts else "0"

    lines = [f"minimize {combo(lp.objective)}"]
    for coeffs, rhs in lp.constraints:
        lines.append(f"  {combo(coeffs)} <= {rhs}")
    for (lo, hi), v in zip(lp.bounds, lp.variables):
        if lo is not None or hi is not None:
            lo_s = "-inf" if lo is None else str(lo)
            hi_s = "+inf" if hi is None else str(hi)
            lines.append(f"  {lo_s} <= {v} <= {hi_s}")
    return "\n".join(lines)


def solve_lp(lp: LinearProgram) -> LpOutcome:
    """Exact optimal basic solution, or infeasible/unbounded status."""
    n = len(lp.variables)

    # Shift/flip/split variables so every internal variable is >= 0.
    # recover[j] = (kind, data): how to rebuild x_j from internal y values.
    col_of = []  # internal column index of each variable's primary column
    recover = []
    ncols = 0
    extra_rows = []  # (dict col->coeff, rhs) upper-bound rows
    for j in range(n):
        lo, hi = lp.bounds[j]
        if lo is not None:
            col_of.append(ncols)
            recover.append(("shift", lo))
            if hi is not None:
                span = hi - lo
                extra_rows.append(({ncols: _ONE}, _Q(span.numerator, span.denominator)))
            ncols += 1
        elif hi is not None:
            col_of.append(ncols)
            recover.append(("flip", hi))
            ncols += 1
        else:
            col_of.append(ncols)
            recover.append(("split", ncols + 1))
            ncols += 2

    def expand(coeffs):
        """Map original coefficients to internal columns and the rhs offset."""
        row = [_ZERO] * ncols
        offset = _Q(0)
        for j, c in enumerate(coeffs):
            if c == 0:
                continue
            q = _Q(c.numerator, c.denominator)
            kind, data = recover[j]
            cj = col_of[j]
            if kind == "shift":
                row[cj] += q
                offset += q * _Q(data.numerator, data.denominator)
            elif kind == "flip":
                row[cj] -= q
                offset += q * _Q(data.numerator, data.denominator)
            else:
                row[cj] += q
                row[data] -= q
        return row, offset

    rows = []
    rhss = []
    for coeffs, rhs in lp.constraints:
        row, offset = expand(coeffs)
        rows.append(row)
        rhss.append(_Q(rhs.numerator, rhs.denominator) - offset)
    for colmap, rhs in extra_rows:
        row = [_ZERO] * ncols
        for c, v in colmap.items():
            row[c] = v
        rows.append(row)
        rhss.append(rhs)

    obj, _ = expand(lp.objective)

    y = _simplex_two_phase(rows, rhss, obj, ncols)
    if y == "infeasible" or y == "unbounded":
        return LpOutcome(status=y)

    x = []
    for j in range(n):
        kind, data = recover[j]
        cj = col_of[j]
        if kind == "shift":
            x.append(Fraction(int((y[cj]).numerator), int((y[cj]).denominator)) + data)
        elif kind == "flip":
            x.append(data - Fraction(int(y[cj].numerator), int(y[cj].denominator)))
        else:
            val = y[cj] - y[data]
            x.append(Fraction(int(val.numerator), int(val.denominator)))
    value = sum((c * v for c, v in zip(lp.objective, x)), Fraction(0))
    return LpOutcome(status="optimal", x=tuple(x), value=value)


def solve_canonical(rows, rhss, obj, ncols, want_duals=False):
    """Low-level entry: min obj.y, rows.y <= rhss, y >= 0, all data mpq.

    Returns the y vector (list of mpq) or the string 'infeasible'/'unbounded'.
    Rows with nonnegative rhs start from the slack basis; negative rhs rows go
    through a phase-1 with artificials.  With want_duals (only valid when every
    rhs is nonnegative) returns (y, duals): duals is a nonnegative vector with
    dual(A).y >= -obj componentwise and -duals.rhss equal to the optimum, i.e.
    an exact lower-bound certificate transferable to related programs."""
    return _simplex_two_phase(rows, rhss, obj, ncols, want_duals=want_duals)


def solve_canonical_float(rows, rhss, obj, ncols, max_pivots=400):
    """Float mirror of solve_canonical, used only to route work away from the
    exact solver (never for a final decision).  Requires all rhs >= 0; returns
    the optimal value as a float, or None when it cannot tell (pivot cap,
    negative rhs, numeric trouble)."""
    m = len(rows)
    if any(r < 0 for r in rhss):
        return None
    width = ncols + m
    tab = []
    for i, row in enumerate(rows):
        fr = [float(v) for v in row] + [0.0] * m + [float(rhss[i])]
        fr[ncols + i] = 1.0
        tab.append(fr)
    objrow = [float(v) for v in obj] + [0.0] * m + [0.0]
    basis = list(range(ncols, ncols + m))
    eps = 1e-9
    for _ in range(max_pivots):
        enter = -1
        most = -eps
        for j in range(width):
            v = objrow[j]
            if v < most:
                most = v
                enter = j
        if enter < 0:
            return objrow[-1] * -1.0
        leave = -1
        best = None
        for i, row in enumerate(tab):
            a = row[enter]
            if a > eps:
                ratio = row[-1] / a
                if best is None or ratio < best - eps:
                    best = ratio
                    leave = i
        if leave < 0:
            return None  # unbounded should not happen for these programs
        prow = tab[leave]
        piv = prow[enter]
        inv = 1.0 / piv
        prow = [v * inv for v in prow]
        tab[leave] = prow
        for i, row in enumerate(tab):
            if i != leave:
                f = row[enter]
                if f != 0.0:
                    tab[i] = [v - f * p for v, p in zip(row, prow)]
        f = objrow[enter]
        if f != 0.0:
            objrow = [v - f * p for v, p in zip(objrow, prow)]
        basis[leave] = enter
    return None


def _simplex_two_phase(rows, rhss, obj, ncols, want_duals=False):
    """Solve min obj.y, rows.y <= rhss, y >= 0.  Returns y list, or a status string."""
    m = len(rows)
    nslack = m
    # Normalize rows to rhs >= 0; remember slack sign.
    art_rows = []
    tab = []
    for i in range(m):
        row = list(rows[i])
        rhs = rhss[i]
        slack = _ONE
        if rhs < 0:
            row = [-v for v in row]
            rhs = -rhs
            slack = -_ONE
            art_rows.append(i)
        srow = row + [_ZERO] * nslack + [rhs]
        srow[ncols + i] = slack
        tab.append(srow)

    total = ncols + nslack
    basis = [ncols + i for i in range(m)]

    if art_rows:
        # Append artificial columns, one per negated row.
        nart = len(art_rows)
        for r in tab:
            rhs = r.pop()
            r.extend([_ZERO] * nart)
            r.append(rhs)
        for a, i in enumerate(art_rows):
            tab[i][total + a] = _ONE
            basis[i] = total + a
        # Phase 1 objective: sum of artificials, reduced against the basis.
        p1 = [_ZERO] * (total + nart) + [_ZERO]
        for a in range(nart):
            p1[total + a] = _ONE
        for i in art_rows:
            p1 = [c - v for c, v in zip(p1, tab[i])]
        status = _pivot_until_optimal(tab, basis, p1, total + nart)
        if status == "unbounded":  # cannot happen: phase-1 objective >= 0
            return "infeasible"
        if -p1[-1] > 0:  # optimal phase-1 value = -p1[-1]
            return "infeasible"
        # Drive remaining basic artificials out or drop redundant rows.
        keep = []
        for i in range(m):
            if basis[i] >= total:
                piv = None
                for j in range(total):
                    if tab[i][j] != 0:
                        piv = j
                        break
                if piv is None:
                    continue  # redundant row
                _pivot(tab, basis, i, piv)
            keep.append(i)
        tab = [tab[i] for i in keep]
        basis = [basis[i] for i in keep]
        for r in tab:
            rhs = r.pop()
            del r[total:]
            r.append(rhs)

    # Phase 2.
    width = (len(tab[0]) - 1) if tab else ncols
    p2 = list(obj) + [_ZERO] * (width - ncols) + [_ZERO]
    for i, b in enumerate(basis):
        if p2[b] != 0:
            f = p2[b]
            p2 = [c - f * v for c, v in zip(p2, tab[i])]
    status = _pivot_until_optimal(tab, basis, p2, width)
    if status == "unbounded":
        return "unbounded"

    y = [_ZERO] * ncols
    for i, b in enumerate(basis):
        if b < ncols:
            y[b] = tab[i][-1]
    if want_duals:
        # reduced costs on the slack columns are the optimal dual multipliers
        duals = [p2[ncols + i] for i in range(nslack)]
        return y, duals
    return y


_STALL_LIMIT = 30


def _pivot_until_optimal(tab, basis, objrow, width):
    """Pivot to optimality; returns 'optimal'/'unbounded'.  Deterministic.

    Entering variable: most negative reduced cost (lowest index on ties), which
    keeps pivot counts low; after _STALL_LIMIT consecutive degenerate pivots the
    rule switches to Bland's (lowest index), which cannot cycle, so termination
    is guaranteed.  Leaving variable: minimum ratio, ties by lowest basis index.
    """
    stalled = 0
    bland = False
    while True:
        enter = -1
        if bland:
            for j in range(width):
                if objrow[j] < 0:
                    enter = j
                    break
        else:
            most = _ZERO
            for j in range(width):
                v = objrow[j]
                if v < most:
                    most = v
                    enter = j
        if enter < 0:
            return "optimal"
        leave = -1
        best = None
        for i, row in enumerate(tab):
            a = row[enter]
            if a > 0:
                ratio = row[-1] / a
                if best is None or ratio < best or (ratio == best and basis[i] < basis[leave]):
                    best = ratio
                    leave = i
        if leave < 0:
            return "unbounded"
        if not bland:
            if best == 0:
                stalled += 1
                if stalled >= _STALL_LIMIT:
                    bland = True
            else:
                stalled = 0
        _pivot(tab, basis, leave, enter, objrow)


def _pivot(tab, basis, leave, enter, objrow=None):
    prow = tab[leave]
    piv = prow[enter]
    if piv != 1:
        inv = _ONE / piv
        prow = [v * inv for v in prow]
        tab[leave] = prow
    for i, row in enumerate(tab):
        if i == leave:
            continue
        f = row[enter]
        if f != 0:
            tab[i] = [v - f * p for v, p in zip(row, prow)]
    if objrow is not None:
        f = objrow[enter]
        if f != 0:
            objrow[:] = [v - f * p for v, p in zip(objrow, prow)]
    basis[leave] = enter
