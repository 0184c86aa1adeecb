"""Exponent optimization: compile (graph, schedule) into exact LPs and minimize.

Every max/min in the stage-cost formulas compares the two endpoints of a single
edge of H, so a stage cost becomes affine once each edge carries an orientation
(which endpoint has the larger rho), a regime (dense/sparse), and each vertex a
witness neighbour for the degree condition.  `build_branch_lp` builds the LP
for one fully resolved branch, exactly as specified.

`optimize_schedule` computes min-over-branches either by exhaustive branch
enumeration (`exhaustive=True`, the reference path) or, by default, by an exact
branch-and-bound that enforces the resolutions lazily: node LPs relax
unresolved comparisons to provable lower bounds, and a node closes when the
cost model reproduces the LP value at the LP's argmin.  Both paths return the
same minimum; tests assert this on small inputs.

`optimize_graph` sweeps all loading schedules depth-first in enumeration order,
sharing the incumbent and pruning schedule-prefix subtrees with relaxation
lower bounds (only when the bound already matches or exceeds the incumbent,
which preserves both the minimum and the first-achiever witness).
"""

from __future__ import annotations

from dataclasses import dataclass
from fractions import Fraction
from itertools import permutations, product

from .costs import (
    ExponentAssignment,
    check_admissible,
    classify_regime,
    stage_breakdown,
    total_exponent,
)
from .graphs import (
    CertGraph,
    UndirectedGraph,
    canonical_form,
    is_isomorphic_subgraph,
    undirected_contractions,
    undirected_version,
)
from .lp import LinearProgram, _Q, solve_canonical, solve_canonical_float, solve_lp
from .schedules import LoadingSchedule, enumerate_schedules, item_key, validate

HALF = Fraction(1, 2)
ZERO = Fraction(0)
ONE = Fraction(1)

Q0 = _Q(0)
Q1 = _Q(1)
QH = _Q(1, 2)


class OptimizeError(ValueError):
    pass


@dataclass(frozen=True)
class Branch:
    """One fully resolved case of the stage-cost formulas.

    ordering: vertices listed with nondecreasing rho (a chain of <=);
    regimes: edge -> 'dense' | 'sparse';
    witnesses: non-isolated vertex -> neighbour satisfying delta_ij + rho_j >= rho_i.
    """

    ordering: tuple
    regimes: dict
    witnesses: dict

    def encoding(self):
        return (
            self.ordering,
            tuple(self.regimes[e] for e in sorted(self.regimes)),
            tuple(self.witnesses[v] for v in sorted(self.witnesses)),
        )


@dataclass(frozen=True)
class OptimizationResult:
    """`exponent` is the minimum over branch LPs (the achievable exponent).

    `stage_costs` is the per-stage table of the winning branch, whose maximum
    equals `exponent`.  `model_exponent` re-evaluates the assignment through
    classify_regime; it equals `exponent` except when the optimum is attained
    only on the closed sparse-regime boundary (where the classification calls
    the edge dense while the branch loads it sparsely)."""

    exponent: Fraction
    assignment: ExponentAssignment
    schedule: LoadingSchedule
    branch: Branch
    stage_costs: tuple
    model_exponent: Fraction


def _positions(items):
    """(item, vertex-prefix, edge-prefix) per schedule position."""
    out = []
    vs, es = [], []
    for item in items:
        out.append((item, tuple(vs), tuple(es)))
        if isinstance(item, int):
            vs.append(item)
        else:
            es.append(item)
    return out


# ---------------------------------------------------------------------------
# Spec-literal branch LP


def build_branch_lp(h: UndirectedGraph, s: LoadingSchedule, b: Branch) -> LinearProgram:
    """LP for one branch: minimize t over the branch's cell, t >= every stage."""
    bad = validate(s, h)
    if bad is not None:
        raise OptimizeError(f"invalid schedule at position {bad.position}: {bad.message}")
    edges = sorted(h.edges)
    k = h.k
    if sorted(b.ordering) != list(range(1, k + 1)):
        raise OptimizeError(f"ordering {b.ordering} is not a permutation of 1..{k}")
    rank = {v: r for r, v in enumerate(b.ordering)}
    if set(b.regimes) != set(edges):
        raise OptimizeError("regimes must cover exactly E(H)")
    nonisolated = {v for e in edges for v in e}
    if set(b.witnesses) != nonisolated:
        raise OptimizeError("witnesses must cover exactly the non-isolated vertices")

    names = ["t"] + [f"rho_{i}" for i in range(1, k + 1)] + [
        f"delta_({e[0]},{e[1]})" for e in edges
    ]
    t_col = 0
    rho_col = {i: i for i in range(1, k + 1)}
    d_col = {e: k + 1 + idx for idx, e in enumerate(edges)}
    ncols = 1 + k + len(edges)
    bounds = [(ZERO, None)] + [(ZERO, ONE)] * k + [(ZERO, None)] * len(edges)

    rows = []

    def add(coeffs: dict, rhs):
        dense = [ZERO] * ncols
        for c, v in coeffs.items():
            dense[c] += v
        rows.append((tuple(dense), Fraction(rhs)))

    def bump(coeffs, col, v):
        coeffs[col] = coeffs.get(col, ZERO) + v

    def lo_hi(e):
        u, v = e
        return (u, v) if rank[u] < rank[v] else (v, u)

    # ordering chain
    for a, bb in zip(b.ordering, b.ordering[1:]):
        add({rho_col[a]: ONE, rho_col[bb]: -ONE}, 0)
    # delta upper bounds and regime cells
    for e in edges:
        lo, hi = lo_hi(e)
        add({d_col[e]: ONE, rho_col[hi]: -ONE}, 0)
        if b.regimes[e] == "dense":
            add({rho_col[hi]: ONE, rho_col[lo]: -ONE, d_col[e]: -ONE}, 0)
        else:
            add({rho_col[lo]: ONE, d_col[e]: ONE, rho_col[hi]: -ONE}, 0)
    # witness inequalities
    for i, j in sorted(b.witnesses.items()):
        if (min(i, j), max(i, j)) not in h.edges:
            raise OptimizeError(f"witness {i}->{j} is not an edge of H")
        coeffs = {t_col: ZERO}
        bump(coeffs, rho_col[i], ONE)
        bump(coeffs, rho_col[j], -ONE)
        bump(coeffs, d_col[(min(i, j), max(i, j))], -ONE)
        del coeffs[t_col]
        add(coeffs, 0)
    # setup: t >= rho_lo + delta per edge
    for e in edges:
        lo, _ = lo_hi(e)
        add({rho_col[lo]: ONE, d_col[e]: ONE, t_col: -ONE}, 0)

    def prefix_terms(coeffs, vs, es):
        const = ZERO
        for u in vs:
            const += HALF
            bump(coeffs, rho_col[u], -HALF)
        for e in es:
            _, hi = lo_hi(e)
            bump(coeffs, rho_col[hi], HALF)
            bump(coeffs, d_col[e], -HALF)
        return const

    for item, vs, es in _positions(s.items):
        if isinstance(item, int):
            for j in h.neighbors(item):
                e = (min(item, j), max(item, j))
                coeffs = {t_col: -ONE}
                bump(coeffs, d_col[e], ONE)
                const = prefix_terms(coeffs, vs, es) + HALF
                if rank[item] > rank[j]:  # rho_j < rho_item resolved by ordering
                    bump(coeffs, rho_col[j], ONE)
                    bump(coeffs, rho_col[item], -ONE)
                add(coeffs, -const)
        else:
            lo, hi = lo_hi(item)
            coeffs = {t_col: -ONE}
            const = prefix_terms(coeffs, vs, es)
            if b.regimes[item] == "dense":
                bump(coeffs, rho_col[hi], ONE)
            else:
                bump(coeffs, rho_col[lo], HALF)
                bump(coeffs, rho_col[hi], HALF)
            add(coeffs, -const)

    objective = [ZERO] * ncols
    objective[t_col] = ONE
    return LinearProgram(
        variables=tuple(names),
        objective=tuple(objective),
        constraints=tuple(rows),
        bounds=tuple(bounds),
    )


def enumerate_branches(h: UndirectedGraph):
    """All (ordering, regimes, witnesses) branches, lexicographic by encoding."""
    edges = sorted(h.edges)
    nonisolated = sorted({v for e in edges for v in e})
    regime_choices = list(product(("dense", "sparse"), repeat=len(edges)))
    witness_choices = list(product(*(h.neighbors(i) for i in nonisolated)))
    for ordering in permutations(range(1, h.k + 1)):
        for regs in regime_choices:
            regimes = dict(zip(edges, regs))
            for wits in witness_choices:
                witnesses = dict(zip(nonisolated, wits))
                yield Branch(ordering=ordering, regimes=regimes, witnesses=witnesses)


# ---------------------------------------------------------------------------
# Exact branch-and-bound over lazily resolved comparisons


class _NodeState:
    """Which comparisons a node has resolved."""

    __slots__ = ("orient", "regime", "witness")

    def __init__(self, orient, regime, witness):
        self.orient = orient  # edge -> (lo_vertex, hi_vertex) or None
        self.regime = regime  # edge -> 'dense' | 'sparse' | None
        self.witness = witness  # vertex -> neighbour (only branched ones)

    def child(self, **kw):
        orient = dict(self.orient)
        regime = dict(self.regime)
        witness = dict(self.witness)
        if "orient" in kw:
            e, val = kw["orient"]
            orient[e] = val
        if "regime" in kw:
            e, val = kw["regime"]
            regime[e] = val
        if "witness" in kw:
            v, val = kw["witness"]
            witness[v] = val
        return _NodeState(orient, regime, witness)


def _root_state(h):
    edges = sorted(h.edges)
    return _NodeState({e: None for e in edges}, {e: None for e in edges}, {})


class _NodeRows:
    """Canonical-form rows of a node LP: min (shift - y0) over rows.y <= rhss,
    y >= 0, where column 0 holds shift - t.  Row order is canonical (graph
    blocks first, stage rows sorted by item) so optimal dual vectors transfer
    between the leaf LPs of different schedules of the same graph."""

    __slots__ = ("rows", "rhss", "ncols", "d_cols", "shift", "k")

    def __init__(self, rows, rhss, ncols, d_cols, shift, k):
        self.rows = rows
        self.rhss = rhss
        self.ncols = ncols
        self.d_cols = d_cols
        self.shift = shift
        self.k = k


class _NodeSolution:
    __slots__ = ("value", "assignment", "duals", "node")

    def __init__(self, value, assignment, duals, node):
        self.value = value
        self.assignment = assignment
        self.duals = duals
        self.node = node


def _build_node(h, positions, state, future_items=(), prefix_vs=(), prefix_es=()):
    """Assemble the node LP rows.

    Column 0 carries U - t for a valid upper bound U of the optimum (the cost
    of the all-zero assignment), which keeps every canonical rhs nonnegative so
    the slack basis is feasible and no phase-1 is ever needed here.
    `future_items` adds relaxed stage rows at the committed prefix's prefactor
    for not-yet-placed items (schedule-prefix bounds; sound because prefactors
    only grow along a schedule).
    """
    edges = sorted(h.edges)
    k = h.k
    rho_col = {i: i for i in range(1, k + 1)}
    d_col = {e: k + 1 + idx for idx, e in enumerate(edges)}
    ncols = 1 + k + len(edges)
    m_col = {}
    for e in edges:
        if state.orient[e] is None:
            m_col[e] = ncols
            ncols += 1

    rows = []
    rhss = []
    pending = []  # (sort key, coeff dict, const): rows involving t, added last

    def add(coeffs, rhs):
        dense = [Q0] * ncols
        for c, v in coeffs.items():
            dense[c] += v
        rows.append(dense)
        rhss.append(rhs)

    def bump(coeffs, col, v):
        coeffs[col] = coeffs.get(col, Q0) + v

    for i in range(1, k + 1):
        add({rho_col[i]: Q1}, Q1)
    for e in edges:
        o = state.orient[e]
        if o is None:
            u, v = e
            add({m_col[e]: Q1}, Q1)
            add({rho_col[u]: Q1, m_col[e]: -Q1}, Q0)
            add({rho_col[v]: Q1, m_col[e]: -Q1}, Q0)
            add({d_col[e]: Q1, m_col[e]: -Q1}, Q0)
            # relaxed setup, exact once M_e = max(rho_u, rho_v):
            # min(rho_u, rho_v) = rho_u + rho_v - max >= rho_u + rho_v - M_e
            pending.append(((0, e, 0, 0), {d_col[e]: Q1}, Q0))
            pending.append(
                ((0, e, 0, 1), {d_col[e]: Q1, rho_col[u]: Q1, rho_col[v]: Q1, m_col[e]: -Q1}, Q0)
            )
        else:
            lo, hi = o
            add({rho_col[lo]: Q1, rho_col[hi]: -Q1}, Q0)
            add({d_col[e]: Q1, rho_col[hi]: -Q1}, Q0)
            reg = state.regime[e]
            if reg == "dense":
                add({rho_col[hi]: Q1, rho_col[lo]: -Q1, d_col[e]: -Q1}, Q0)
            elif reg == "sparse":
                add({rho_col[lo]: Q1, d_col[e]: Q1, rho_col[hi]: -Q1}, Q0)
            pending.append(((0, e, 0, 0), {rho_col[lo]: Q1, d_col[e]: Q1}, Q0))

    for i, j in sorted(state.witness.items()):
        e = (min(i, j), max(i, j))
        coeffs = {}
        bump(coeffs, rho_col[i], Q1)
        bump(coeffs, rho_col[j], -Q1)
        bump(coeffs, d_col[e], -Q1)
        add(coeffs, Q0)

    def prefix_terms(coeffs, vs, es):
        const = Q0
        for u in vs:
            const += QH
            bump(coeffs, rho_col[u], -QH)
        for e in es:
            o = state.orient[e]
            hic = m_col[e] if o is None else rho_col[o[1]]
            bump(coeffs, hic, QH)
            bump(coeffs, d_col[e], -QH)
        return const

    def stage_rows(item, vs, es):
        if isinstance(item, int):
            for j in h.neighbors(item):
                e = (min(item, j), max(item, j))
                coeffs = {}
                bump(coeffs, d_col[e], Q1)
                const = prefix_terms(coeffs, vs, es) + QH
                o = state.orient[e]
                if o is None:
                    # true term delta + min(0, rho_j - rho_item): two valid
                    # lower bounds, delta + rho_j - M_e (exact at M_e = max)
                    # and delta - rho_item (immune to M_e inflation)
                    other = dict(coeffs)
                    bump(other, rho_col[item], -Q1)
                    pending.append(((1, (item, 0), j, 0), other, const))
                    bump(coeffs, rho_col[j], Q1)
                    bump(coeffs, m_col[e], -Q1)
                elif o[0] == j:  # rho_j <= rho_item resolved
                    bump(coeffs, rho_col[j], Q1)
                    bump(coeffs, rho_col[item], -Q1)
                pending.append(((1, (item, 0), j, 1), coeffs, const))
        else:
            coeffs = {}
            const = prefix_terms(coeffs, vs, es)
            o = state.orient[item]
            reg = state.regime[item]
            if o is not None and reg == "dense":
                bump(coeffs, rho_col[o[1]], Q1)
            else:
                # sparse local lower-bounds the dense local as well
                u, v = item
                bump(coeffs, rho_col[u], QH)
                bump(coeffs, rho_col[v], QH)
            pending.append(((2, item, 0, 0), coeffs, const))

    for item, vs, es in positions:
        stage_rows(item, vs, es)
    for item in future_items:
        stage_rows(item, prefix_vs, prefix_es)

    shift = max((const for _, _, const in pending), default=Q0)
    add({0: Q1}, shift)  # t >= 0, i.e. U - t <= U
    pending.sort(key=lambda p: p[0])
    for _, coeffs, const in pending:
        coeffs[0] = coeffs.get(0, Q0) + Q1  # a.z - t <= -const  with t = U - y0
        add(coeffs, shift - const)

    return _NodeRows(rows, rhss, ncols, d_col, shift, k)


def _node_objective(nr):
    obj = [Q0] * nr.ncols
    obj[0] = -Q1  # minimize t = U - y0
    return obj


def _certified_bound(nr: _NodeRows, duals):
    """Exact lower bound for nr's value from a candidate dual vector, or None
    when the vector is not a valid certificate for these rows.

    Weak duality: any duals >= 0 with duals.A >= -obj give value >= shift -
    duals.rhss.  Dual vectors come from solved sibling LPs with identical row
    layout, so the check is a cheap exact verification, not a solve."""
    if len(duals) != len(nr.rows):
        return None
    acc = [Q0] * nr.ncols
    bound = nr.shift
    for yi, row, rhs in zip(duals, nr.rows, nr.rhss):
        if yi:
            for j, a in enumerate(row):
                if a:
                    acc[j] += yi * a
            bound -= yi * rhs
    if acc[0] < 1:
        return None
    if any(acc[j] < 0 for j in range(1, nr.ncols)):
        return None
    return _frac(bound)


def _solve_built(h, nr: _NodeRows, want_duals=False):
    obj = _node_objective(nr)
    got = solve_canonical(
        [list(r) for r in nr.rows], list(nr.rhss), obj, nr.ncols, want_duals=want_duals
    )
    if isinstance(got, str):  # pragma: no cover - node LPs are feasible/bounded
        raise OptimizeError(f"node LP unexpectedly {got}")
    y, duals = got if want_duals else (got, None)
    value = _frac(nr.shift - y[0])
    rho = {i: _frac(y[i]) for i in range(1, nr.k + 1)}
    delta = {e: _frac(y[c]) for e, c in nr.d_cols.items()}
    assignment = ExponentAssignment(rho=rho, delta=delta)
    return _NodeSolution(value, assignment, duals, nr)


def _solve_node(h, positions, state, future_items=(), prefix_vs=(), prefix_es=(),
                route_cutoff=None):
    """Build and solve a node LP (see _build_node).

    With `route_cutoff`, a float pre-screen skips the exact solve (returning
    None) when the bound is clearly below the cutoff; callers must treat None
    as "cannot prune".  Pruning decisions themselves always use exact values.
    """
    nr = _build_node(h, positions, state, future_items, prefix_vs, prefix_es)
    if route_cutoff is not None:
        fval = solve_canonical_float(nr.rows, nr.rhss, _node_objective(nr), nr.ncols)
        if fval is not None and float(nr.shift) + fval < float(route_cutoff) - 1e-7:
            return None
    return _solve_built(h, nr)


def _frac(q):
    return Fraction(int(q.numerator), int(q.denominator))


def _select_disjunction(h, state, assign):
    """First unresolved comparison whose relaxation is loose at the point."""
    for e in sorted(h.edges):
        u, v = e
        ru, rv = assign.rho_of(u), assign.rho_of(v)
        d = assign.delta_of(e)
        if state.orient[e] is None:
            if min(ru, rv) > 0 or d > max(ru, rv):
                return ("orient", e)
        elif state.regime[e] is None:
            if classify_regime(ru, rv, d) == "dense" and ru != rv:
                return ("regime", e)
    for i in range(1, h.k + 1):
        nbrs = h.neighbors(i)
        if not nbrs or i in state.witness:
            continue
        if not any(assign.delta_of((i, j)) + assign.rho_of(j) >= assign.rho_of(i) for j in nbrs):
            return ("witness", i)
    # fall back to any unresolved comparison
    for e in sorted(h.edges):
        if state.orient[e] is None:
            return ("orient", e)
        if state.regime[e] is None:
            return ("regime", e)
    return None


def _repair_boundary(h, sol: _NodeSolution, k):
    """Among optima of the node LP, minimize total delta (secondary solve);
    steps off a closed sparse-regime boundary when the optimum is degenerate."""
    nr = sol.node
    rows = [list(r) for r in nr.rows]
    rhss = list(nr.rhss)
    # pin t at the optimum: t <= value, i.e. -y0 <= value - U
    pin = [Q0] * nr.ncols
    pin[0] = -Q1
    rows.append(pin)
    v = sol.value
    rhss.append(_Q(v.numerator, v.denominator) - nr.shift)
    obj = [Q0] * nr.ncols
    for c in nr.d_cols.values():
        obj[c] = Q1
    y = solve_canonical(rows, rhss, obj, nr.ncols)
    if isinstance(y, str):
        return None
    rho = {i: _frac(y[i]) for i in range(1, k + 1)}
    delta = {e: _frac(y[c]) for e, c in nr.d_cols.items()}
    return ExponentAssignment(rho=rho, delta=delta)


def _branch_and_bound(h, s_items, incumbent, root_sol=None, strict=False):
    """Exact min over branches for the schedule, but only if it beats
    `incumbent` (None = unbounded; with `strict`, matching it exactly is also
    reported).  Returns (value, assignment, regimes) or None.  `root_sol`
    reuses an already-solved root LP."""
    positions = _positions(s_items)
    s = LoadingSchedule(tuple(s_items))
    best = None  # (value, assignment, regimes)
    root = _root_state(h)
    stack = [root]
    while stack:
        state = stack.pop()
        if best is not None:
            cut, open_cut = best[0], False
        else:
            cut, open_cut = incumbent, strict
        if state is root and root_sol is not None:
            sol = root_sol
        else:
            sol = _solve_node(h, positions, state)
        if cut is not None and (sol.value > cut if open_cut else sol.value >= cut):
            continue
        assign = sol.assignment
        consistent = False
        if check_admissible(h, assign) is None:
            worst, _ = total_exponent(h, s, assign)
            consistent = worst == sol.value
        if consistent:
            regimes = {
                e: classify_regime(assign.rho_of(e[0]), assign.rho_of(e[1]), assign.delta_of(e))
                for e in h.edges
            }
            best = (sol.value, assign, regimes)
            continue
        choice = _select_disjunction(h, state, assign)
        if choice is None:
            # fully resolved cell; the LP value is the branch value (closed
            # sparse boundary).  Try to move to a consistent optimum of equal value.
            assign2 = _repair_boundary(h, sol, h.k)
            if assign2 is not None and check_admissible(h, assign2) is None:
                worst2, _ = total_exponent(h, s, assign2)
                if worst2 == sol.value:
                    regimes = {
                        e: classify_regime(
                            assign2.rho_of(e[0]), assign2.rho_of(e[1]), assign2.delta_of(e)
                        )
                        for e in h.edges
                    }
                    best = (sol.value, assign2, regimes)
                    continue
            best = (sol.value, assign, dict(state.regime))
            continue
        kind, key = choice
        if kind == "orient":
            u, v = key
            stack.append(state.child(orient=(key, (v, u))))
            stack.append(state.child(orient=(key, (u, v))))
        elif kind == "regime":
            stack.append(state.child(regime=(key, "sparse")))
            stack.append(state.child(regime=(key, "dense")))
        else:
            for j in reversed(h.neighbors(key)):
                stack.append(state.child(witness=(key, j)))
    return best


def _find_consistent_at(h, s_items, value, node_cap=4000):
    """Search the branch cells tied at `value` for an admissible assignment the
    cost model evaluates to exactly `value` (a consistent witness).  The
    branch-and-bound prunes cells at the incumbent, so the winning cell it
    happened to close can sit on the sparse-regime boundary even when another
    optimal cell has an interior optimum; this pass recovers the latter.
    Returns (assignment, regimes) or None."""
    positions = _positions(s_items)
    s = LoadingSchedule(tuple(s_items))
    stack = [_root_state(h)]
    visited = 0
    while stack and visited < node_cap:
        state = stack.pop()
        visited += 1
        sol = _solve_node(h, positions, state)
        if sol.value > value:
            continue
        for assign in filter(None, (sol.assignment,)):
            if check_admissible(h, assign) is None:
                worst, _ = total_exponent(h, s, assign)
                if worst == value:
                    regimes = {
                        e: classify_regime(
                            assign.rho_of(e[0]), assign.rho_of(e[1]), assign.delta_of(e)
                        )
                        for e in h.edges
                    }
                    return assign, regimes
        choice = _select_disjunction(h, state, sol.assignment)
        if choice is None:
            if sol.value == value:
                assign2 = _repair_boundary(h, sol, h.k)
                if assign2 is not None and check_admissible(h, assign2) is None:
                    worst2, _ = total_exponent(h, s, assign2)
                    if worst2 == value:
                        regimes = {
                            e: classify_regime(
                                assign2.rho_of(e[0]), assign2.rho_of(e[1]), assign2.delta_of(e)
                            )
                            for e in h.edges
                        }
                        return assign2, regimes
            continue
        kind, key = choice
        if kind == "orient":
            u, v = key
            stack.append(state.child(orient=(key, (v, u))))
            stack.append(state.child(orient=(key, (u, v))))
        elif kind == "regime":
            stack.append(state.child(regime=(key, "sparse")))
            stack.append(state.child(regime=(key, "dense")))
        else:
            for j in reversed(h.neighbors(key)):
                stack.append(state.child(witness=(key, j)))
    return None


def _polish(h, s_items, got):
    """Swap a boundary-attained optimum for a consistent witness when one exists."""
    value, assign, regimes = got
    worst, _ = total_exponent(h, LoadingSchedule(tuple(s_items)), assign)
    if worst == value:
        return got
    fixed = _find_consistent_at(h, s_items, value)
    if fixed is not None:
        return (value, fixed[0], fixed[1])
    return got


def _derive_branch(h, assign, regimes):
    """Canonical fully resolved branch containing an admissible assignment."""
    ordering = tuple(sorted(range(1, h.k + 1), key=lambda i: (assign.rho_of(i), i)))
    witnesses = {}
    for i in range(1, h.k + 1):
        nbrs = h.neighbors(i)
        if not nbrs:
            continue
        for j in nbrs:
            if assign.delta_of((i, j)) + assign.rho_of(j) >= assign.rho_of(i):
                witnesses[i] = j
                break
    return Branch(ordering=ordering, regimes=regimes, witnesses=witnesses)


def _result(h, s, value, assign, regimes, branch=None):
    model_worst, _ = total_exponent(h, s, assign)
    branch_worst, stages = stage_breakdown(h, s, assign, regimes=regimes)
    if branch_worst != value:  # pragma: no cover - guard on the reported table
        raise OptimizeError(
            f"stage table maximum {branch_worst} does not match optimum {value}"
        )
    if branch is None:
        branch = _derive_branch(h, assign, dict(regimes))
    return OptimizationResult(
        exponent=value,
        assignment=assign,
        schedule=s,
        branch=branch,
        stage_costs=tuple(stages),
        model_exponent=model_worst,
    )


def optimize_schedule(h: UndirectedGraph, s: LoadingSchedule, exhaustive=False) -> OptimizationResult:
    """Minimize the worst stage exponent over admissible assignments.

    The default path is exact branch-and-bound; `exhaustive=True` solves every
    (ordering, regime, witness) branch LP and takes the minimum with the
    lexicographic tie-break, exactly as the branch enumeration is specified.
    """
    bad = validate(s, h)
    if bad is not None:
        raise OptimizeError(f"invalid schedule at position {bad.position}: {bad.message}")
    if not exhaustive:
        got = _branch_and_bound(h, s.items, None)
        if got is None:  # cannot happen: the all-zero assignment is admissible
            raise OptimizeError("branch and bound found no candidate")
        got = _polish(h, s.items, got)
        return _result(h, s, got[0], got[1], got[2])

    best = None
    for branch in enumerate_branches(h):
        out = solve_lp(build_branch_lp(h, s, branch))
        if out.status != "optimal":
            continue
        if best is None or out.value < best[0]:
            x = out.x
            edges = sorted(h.edges)
            rho = {i: x[i] for i in range(1, h.k + 1)}
            delta = {e: x[h.k + 1 + idx] for idx, e in enumerate(edges)}
            best = (out.value, ExponentAssignment(rho=rho, delta=delta), branch)
    if best is None:
        raise OptimizeError("no feasible branch")
    return _result(h, s, best[0], best[1], dict(best[2].regimes), branch=best[2])


# ---------------------------------------------------------------------------
# Whole-graph and whole-function optimization


_graph_cache = {}


def graph_automorphisms(h: UndirectedGraph):
    """All label permutations fixing the edge set (brute force; constant k)."""
    perms = []
    edges = h.edges
    for perm in permutations(range(1, h.k + 1)):
        mapped = frozenset(
            (min(perm[i - 1], perm[j - 1]), max(perm[i - 1], perm[j - 1])) for i, j in edges
        )
        if mapped == edges:
            perms.append(perm)
    return perms


def optimize_graph(h: UndirectedGraph, cap=12, prune=False, bound_depth=2,
                   dedup=False) -> OptimizationResult:
    """Min of optimize_schedule over every loading schedule of h.

    Schedules are visited in enumeration order; the reported schedule is the
    first one achieving the minimum.  A pool of optimal dual vectors from
    already-pruned schedules certifies most remaining schedules away with one
    exact verification instead of a solve.

    `prune` additionally cuts schedule-prefix subtrees with relaxation lower
    bounds (exact decisions, float-routed); off by default as leaf certificates
    are usually cheaper.  `dedup` (opt-in) skips schedules that are not
    lexicographically minimal in their automorphism orbit; the minimum is
    unchanged but the reported schedule may be a different orbit member.
    Results are cached per (graph, cap, dedup).
    """
    key = (h.k, h.edges, cap, dedup)
    hit = _graph_cache.get(key)
    if hit is not None:
        return hit

    total = h.k + h.m
    if total > cap:
        raise OptimizeError(f"k + m = {total} exceeds enumeration cap {cap}")
    items = sorted([i for i in range(1, h.k + 1)] + list(h.edges), key=item_key)
    root = _root_state(h)
    best = None  # (value, schedule items, assignment, regimes)
    autos = None
    if dedup:
        autos = [p for p in graph_automorphisms(h) if p != tuple(range(1, h.k + 1))]

    cert_pool = []  # most-recent-first optimal dual vectors of pruned leaves
    chosen = []
    loaded_v, loaded_e = set(), set()

    def apply_perm(perm, it):
        if isinstance(it, int):
            return perm[it - 1]
        a, b = perm[it[0] - 1], perm[it[1] - 1]
        return (min(a, b), max(a, b))

    def prefix_canonical():
        """True when no automorphism maps the chosen prefix lex-smaller."""
        me = [item_key(it) for it in chosen]
        for perm in autos:
            # compare the permuted prefix itemwise against the prefix itself
            smaller = False
            for idx, it in enumerate(chosen):
                kk = item_key(apply_perm(perm, it))
                if kk < me[idx]:
                    smaller = True
                    break
                if kk > me[idx]:
                    break
            if smaller:
                return False
        return True

    def prefix_bound():
        future = [
            it
            for it in items
            if not (it in loaded_v if isinstance(it, int) else it in loaded_e)
        ]
        sol = _solve_node(
            h,
            _positions(tuple(chosen)),
            root,
            future_items=future,
            prefix_vs=tuple(sorted(loaded_v)),
            prefix_es=tuple(sorted(loaded_e)),
            route_cutoff=best[0],
        )
        return sol is None or sol.value < best[0]

    def set_best(value, s_items, assign, regimes):
        nonlocal best, best_consistent
        worst, _ = total_exponent(h, LoadingSchedule(s_items), assign)
        best = (value, s_items, assign, regimes)
        best_consistent = worst == value

    def eval_leaf():
        nonlocal best, best_consistent, hunt_budget
        s_items = tuple(chosen)
        if best is None:
            got = _branch_and_bound(h, s_items, None)
            if got is not None:
                set_best(got[0], s_items, got[1], got[2])
            return
        # While the incumbent witness is inconsistent (a closed sparse-boundary
        # optimum), ties are still examined: the first tied schedule with a
        # consistent witness takes over as the reported result (same value).
        hunting = not best_consistent and hunt_budget > 0
        nr = _build_node(h, _positions(s_items), root)
        for idx, duals in enumerate(cert_pool):
            bound = _certified_bound(nr, duals)
            if bound is not None and (bound > best[0] or (bound >= best[0] and not hunting)):
                if idx:
                    cert_pool.insert(0, cert_pool.pop(idx))
                return
        sol = _solve_built(h, nr, want_duals=True)
        if sol.value > best[0] or (sol.value >= best[0] and not hunting):
            cert_pool.insert(0, sol.duals)
            del cert_pool[12:]
            return
        if sol.value == best[0]:
            hunt_budget -= 1
            fixed = _find_consistent_at(h, s_items, best[0], node_cap=300)
            if fixed is not None:
                best = (best[0], s_items, fixed[0], fixed[1])
                best_consistent = True
            return
        got = _branch_and_bound(h, s_items, best[0], root_sol=sol)
        if got is not None and got[0] < best[0]:
            set_best(got[0], s_items, got[1], got[2])

    def rec():
        if len(chosen) == total:
            eval_leaf()
            return
        if prune and best is not None and len(chosen) >= bound_depth:
            if not prefix_bound():
                return
        for it in items:
            if isinstance(it, int):
                if it in loaded_v:
                    continue
                chosen.append(it)
                if autos and not prefix_canonical():
                    chosen.pop()
                    continue
                loaded_v.add(it)
                rec()
                loaded_v.discard(it)
                chosen.pop()
            else:
                if it in loaded_e or it[0] not in loaded_v or it[1] not in loaded_v:
                    continue
                chosen.append(it)
                if autos and not prefix_canonical():
                    chosen.pop()
                    continue
                loaded_e.add(it)
                rec()
                loaded_e.discard(it)
                chosen.pop()

    rec()
    if best is None:
        raise OptimizeError("graph has no loading schedule")
    value, s_items, assign, regimes = best
    value, assign, regimes = _polish(h, s_items, (value, assign, regimes))
    result = _result(h, LoadingSchedule(s_items), value, assign, regimes)
    _graph_cache[key] = result
    return result


def prune_certificates(graphs):
    """Drop graphs dominated (as undirected versions) by a subgraph or vertex
    contraction relation with another listed graph; isomorphic duplicates keep
    their first representative."""
    if not graphs:
        return []
    entries = []
    seen = set()
    for g in graphs:
        u = undirected_version(g) if isinstance(g, CertGraph) else g
        key = canonical_form(u)
        if key in seen:
            continue
        seen.add(key)
        entries.append((g, u, key))

    contraction_keys = {}
    for _, u, key in entries:
        contraction_keys[key] = {canonical_form(c) for c in undirected_contractions(u)}

    def dominated_by(a, b):
        """a dominated by b: U(a) embeds in U(b) or is a contraction of U(b)."""
        _, ua, ka = a
        _, ub, kb = b
        return ka in contraction_keys[kb] or is_isomorphic_subgraph(ua, ub)

    kept = []
    for idx, entry in enumerate(entries):
        strictly_dominated = any(
            dominated_by(entry, other) and not dominated_by(other, entry)
            for j, other in enumerate(entries)
            if j != idx
        )
        if not strictly_dominated:
            kept.append(entry[0])
    return kept


def optimize_function(certs, cap=12):
    """Bound for a function given its family of certificate graphs: prune the
    family, then take the max of optimize_graph over the undirected versions.

    Returns (exponent, per-certificate list of (cert, result-or-None)); pruned
    certificates carry None."""
    if not certs:
        raise OptimizeError("empty certificate family")
    kept = prune_certificates(certs)
    kept_ids = {id(g) for g in kept}
    results = []
    worst = None
    for g in certs:
        if id(g) not in kept_ids:
            results.append((g, None))
            continue
        u = undirected_version(g) if isinstance(g, CertGraph) else g
        res = optimize_graph(u, cap=cap)
        results.append((g, res))
        if worst is None or res.exponent > worst:
            worst = res.exponent
    return worst, results
