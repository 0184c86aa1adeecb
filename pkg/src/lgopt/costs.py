"""Symbolic stage costs in exponent space.

Set sizes and degrees are tracked as exponents of the growth parameter n:
r_i = n^rho_i, d_ij = n^delta_ij.  Sums of n-powers collapse to the maximum
exponent and constant factors are dropped, which is exactly how the source
cost tables reason.  All values are exact `fractions.Fraction`s.
"""

from __future__ import annotations

from dataclasses import dataclass
from fractions import Fraction

from .graphs import UndirectedGraph
from .schedules import LoadingSchedule, prefix_sets, validate

HALF = Fraction(1, 2)


class CostModelError(ValueError):
    pass


def _edge_key(e):
    i, j = e
    return (min(i, j), max(i, j))


@dataclass(frozen=True)
class ExponentAssignment:
    """Exponents rho per vertex and delta per undirected edge.

    Bounds: 0 <= rho_i <= 1 (set sizes between 1 and ~n) and
    0 <= delta_ij <= max(rho_i, rho_j) (degree at most the larger set).
    """

    rho: dict
    delta: dict

    def __post_init__(self):
        rho = {int(i): Fraction(v) for i, v in self.rho.items()}
        delta = {_edge_key(e): Fraction(v) for e, v in self.delta.items()}
        object.__setattr__(self, "rho", rho)
        object.__setattr__(self, "delta", delta)

    def rho_of(self, i: int) -> Fraction:
        try:
            return self.rho[i]
        except KeyError:
            raise CostModelError(f"no rho entry for vertex {i}") from None

    def delta_of(self, e) -> Fraction:
        try:
            return self.delta[_edge_key(e)]
        except KeyError:
            raise CostModelError(f"no delta entry for edge {e}") from None


@dataclass(frozen=True)
class StageCost:
    """One row of the cost breakdown.

    `index` is the 0-based stage position (0 = setup, then schedule positions);
    `global_exp` is the accumulated prefactor exponent of everything loaded
    before the stage, `local_exp` the stage's own local cost, and
    `total_exp = global_exp + local_exp`.  A zero-length stage (isolated
    vertex) reports None exponents and constrains nothing.
    """

    index: int
    kind: str  # setup | vertex-load | edge-load-dense | edge-load-sparse
    item: object
    global_exp: Fraction | None
    local_exp: Fraction | None

    @property
    def total_exp(self):
        if self.local_exp is None:
            return None
        return self.global_exp + self.local_exp


def classify_regime(rho_i, rho_j, delta_ij) -> str:
    """dense iff min(rho) + delta >= max(rho); boundary equality is dense."""
    rho_i, rho_j, delta_ij = Fraction(rho_i), Fraction(rho_j), Fraction(delta_ij)
    if min(rho_i, rho_j) + delta_ij >= max(rho_i, rho_j):
        return "dense"
    return "sparse"


def check_admissible(h: UndirectedGraph, a: ExponentAssignment):
    """None when admissible for h, else a string naming the first violation.

    Conditions (exponent translations): 0 <= rho <= 1; 0 <= delta <= max(rho);
    every non-isolated vertex i has a neighbour j with delta_ij + rho_j >= rho_i.
    """
    for i in range(1, h.k + 1):
        rho = a.rho_of(i)
        if not 0 <= rho <= 1:
            return f"rho_{i} = {rho} outside [0, 1]"
    for e in h.sorted_edges():
        d = a.delta_of(e)
        hi = max(a.rho_of(e[0]), a.rho_of(e[1]))
        if not 0 <= d <= hi:
            return f"delta_{e} = {d} outside [0, max(rho)={hi}]"
    for i in range(1, h.k + 1):
        nbrs = h.neighbors(i)
        if not nbrs:
            continue
        if not any(a.delta_of((i, j)) + a.rho_of(j) >= a.rho_of(i) for j in nbrs):
            return f"vertex {i}: no neighbour j with delta_ij + rho_j >= rho_i"
    return None


def global_exponent(h: UndirectedGraph, s: LoadingSchedule, a: ExponentAssignment, t: int) -> Fraction:
    """Prefactor exponent at position t: sum of (1-rho_u)/2 over loaded vertices
    and (max(rho)-delta)/2 over loaded edges, both strictly before t."""
    vs, es = prefix_sets(s, t)
    total = Fraction(0)
    for u in vs:
        total += (1 - a.rho_of(u)) * HALF
    for e in es:
        u, v = e
        total += (max(a.rho_of(u), a.rho_of(v)) - a.delta_of(e)) * HALF
    return total


def setup_exponent(h: UndirectedGraph, a: ExponentAssignment) -> Fraction:
    """Max over edges of min(rho) + delta; 0 for an edgeless graph."""
    best = Fraction(0)
    for e in h.sorted_edges():
        u, v = e
        best = max(best, min(a.rho_of(u), a.rho_of(v)) + a.delta_of(e))
    return best


def _vertex_local(h, a, i):
    """Local exponent of loading vertex i, or None when i is isolated.

    The stage length is the total degree of i in the database: d_ij towards
    larger neighbours, r_j d_ij / r_i towards smaller ones; times sqrt(n)."""
    nbrs = h.neighbors(i)
    if not nbrs:
        return None
    rho_i = a.rho_of(i)
    best = None
    for j in nbrs:
        d = a.delta_of((i, j))
        rho_j = a.rho_of(j)
        term = d if rho_i <= rho_j else d + rho_j - rho_i
        if best is None or term > best:
            best = term
    return HALF + best


def _edge_local(h, a, e):
    u, v = e
    ru, rv = a.rho_of(u), a.rho_of(v)
    regime = classify_regime(ru, rv, a.delta_of(e))
    if regime == "dense":
        return max(ru, rv), regime
    return (ru + rv) * HALF, regime


def vertex_load_exponent(h, s: LoadingSchedule, a, t: int):
    """Total exponent of the stage at position t, which must load a vertex.

    Returns None for an isolated vertex (zero-length stage)."""
    item = s.items[t - 1]
    if not isinstance(item, int):
        raise CostModelError(f"position {t} loads {item}, not a vertex")
    local = _vertex_local(h, a, item)
    if local is None:
        return None
    return global_exponent(h, s, a, t) + local


def edge_load_exponent(h, s: LoadingSchedule, a, t: int) -> Fraction:
    """Total exponent of the stage at position t, which must load an edge."""
    item = s.items[t - 1]
    if isinstance(item, int):
        raise CostModelError(f"position {t} loads {item}, not an edge")
    local, _ = _edge_local(h, a, item)
    return global_exponent(h, s, a, t) + local


def total_exponent(h: UndirectedGraph, s: LoadingSchedule, a: ExponentAssignment):
    """Worst stage exponent plus the full per-stage breakdown.

    The schedule must validate against h and the assignment must be admissible.
    """
    return stage_breakdown(h, s, a)


def stage_breakdown(h: UndirectedGraph, s: LoadingSchedule, a: ExponentAssignment,
                    regimes=None):
    """As total_exponent; `regimes` (edge -> dense|sparse) overrides the
    classification, which the optimizer uses to report the stage table of the
    branch that attained its optimum (the classification and an optimal branch
    can differ exactly on the closed sparse-regime boundary)."""
    bad = validate(s, h)
    if bad is not None:
        raise CostModelError(f"invalid schedule at position {bad.position}: {bad.message}")
    bad = check_admissible(h, a)
    if bad is not None:
        raise CostModelError(f"inadmissible assignment: {bad}")

    stages = [StageCost(0, "setup", None, Fraction(0), setup_exponent(h, a))]
    for pos, item in enumerate(s.items, start=1):
        g = global_exponent(h, s, a, pos)
        if isinstance(item, int):
            local = _vertex_local(h, a, item)
            if local is None:
                stages.append(StageCost(pos, "vertex-load", item, None, None))
            else:
                stages.append(StageCost(pos, "vertex-load", item, g, local))
        else:
            local, regime = _edge_local(h, a, item)
            if regimes is not None and regimes[_edge_key(item)] != regime:
                regime = regimes[_edge_key(item)]
                u, v = item
                ru, rv = a.rho_of(u), a.rho_of(v)
                local = max(ru, rv) if regime == "dense" else (ru + rv) * HALF
            stages.append(StageCost(pos, f"edge-load-{regime}", item, g, local))
    worst = max(st.total_exp for st in stages if st.total_exp is not None)
    return worst, stages


def format_assignment(h: UndirectedGraph, a: ExponentAssignment) -> str:
    """Assignment text: rho list plus delta map, exponents as reduced fractions."""
    rho = ", ".join(str(a.rho_of(i)) for i in range(1, h.k + 1))
    parts = [f'"({i},{j})": {a.delta_of((i, j))}' for i, j in h.sorted_edges()]
    return f"rho = [{rho}]\ndelta = {{{', '.join(parts)}}}"
