"""Certificate graphs and their structural reductions.

A certificate graph is a constant-size directed graph (self-loops allowed)
with vertices labelled 1..k.  The undirected version drops self-loops and
orientation; it is what the schedule/cost machinery operates on.
"""

from __future__ import annotations

import itertools
import json
from dataclasses import dataclass, field


class GraphError(ValueError):
    pass


def _check_vertex(i, k):
    if not (isinstance(i, int) and 1 <= i <= k):
        raise GraphError(f"vertex {i!r} outside 1..{k}")


@dataclass(frozen=True)
class CertGraph:
    """Directed graph on vertices 1..k; self-loops and antiparallel pairs allowed."""

    k: int
    edges: frozenset = field(default_factory=frozenset)

    def __post_init__(self):
        if self.k < 0:
            raise GraphError("vertex count must be nonnegative")
        edges = frozenset((int(i), int(j)) for i, j in self.edges)
        object.__setattr__(self, "edges", edges)
        for i, j in edges:
            _check_vertex(i, self.k)
            _check_vertex(j, self.k)

    @property
    def m(self) -> int:
        return len(self.edges)

    def sorted_edges(self):
        return sorted(self.edges)


@dataclass(frozen=True)
class UndirectedGraph:
    """Simple undirected graph on vertices 1..k; edges stored as (i, j) with i < j."""

    k: int
    edges: frozenset = field(default_factory=frozenset)

    def __post_init__(self):
        if self.k < 0:
            raise GraphError("vertex count must be nonnegative")
        norm = set()
        for i, j in self.edges:
            i, j = int(i), int(j)
            _check_vertex(i, self.k)
            _check_vertex(j, self.k)
            if i == j:
                raise GraphError(f"self-loop ({i},{j}) not allowed in undirected graph")
            norm.add((min(i, j), max(i, j)))
        object.__setattr__(self, "edges", frozenset(norm))

    @property
    def m(self) -> int:
        return len(self.edges)

    def sorted_edges(self):
        return sorted(self.edges)

    def neighbors(self, i: int):
        _check_vertex(i, self.k)
        out = set()
        for u, v in self.edges:
            if u == i:
                out.add(v)
            elif v == i:
                out.add(u)
        return sorted(out)

    def isolated_vertices(self):
        touched = {v for e in self.edges for v in e}
        return [i for i in range(1, self.k + 1) if i not in touched]


def undirected_version(h: CertGraph) -> UndirectedGraph:
    """Drop self-loops, forget orientation, collapse antiparallel pairs."""
    edges = {(min(i, j), max(i, j)) for i, j in h.edges if i != j}
    return UndirectedGraph(h.k, frozenset(edges))


def contract(h: CertGraph, assignment) -> CertGraph:
    """Vertex contraction: edge (z_i, z_j) present iff (i, j) is an edge of h.

    `assignment` maps 1..k onto 1..k' (surjectively) as a sequence or dict.
    """
    if isinstance(assignment, dict):
        z = [assignment[i] for i in range(1, h.k + 1)]
    else:
        z = list(assignment)
    if len(z) != h.k:
        raise GraphError(f"assignment covers {len(z)} vertices, expected {h.k}")
    if h.k == 0:
        return CertGraph(0, frozenset())
    kp = max(z)
    if set(z) != set(range(1, kp + 1)):
        raise GraphError(f"assignment {z} is not surjective onto 1..{kp}")
    edges = {(z[i - 1], z[j - 1]) for i, j in h.edges}
    return CertGraph(kp, frozenset(edges))


def is_subgraph_of(h1, h2) -> bool:
    """Edge-subset test under identical vertex count and labelling."""
    if type(h1) is not type(h2):
        raise GraphError(f"mismatched kinds: {type(h1).__name__} vs {type(h2).__name__}")
    if h1.k != h2.k:
        raise GraphError(f"vertex counts differ: {h1.k} vs {h2.k}")
    return h1.edges <= h2.edges


_CANONICAL_MAX_K = 8


def canonical_form(h):
    """Isomorphism-invariant key via exhaustive relabelling (k! permutations, k <= 8)."""
    if h.k > _CANONICAL_MAX_K:
        raise GraphError(f"canonical_form limited to k <= {_CANONICAL_MAX_K}, got {h.k}")
    directed = isinstance(h, CertGraph)
    kind = "directed" if directed else "undirected"
    best = None
    for perm in itertools.permutations(range(1, h.k + 1)):
        if directed:
            relabeled = tuple(sorted((perm[i - 1], perm[j - 1]) for i, j in h.edges))
        else:
            relabeled = tuple(
                sorted(tuple(sorted((perm[i - 1], perm[j - 1]))) for i, j in h.edges)
            )
        if best is None or relabeled < best:
            best = relabeled
    return (kind, h.k, best if best is not None else ())


def are_isomorphic(h1, h2) -> bool:
    if type(h1) is not type(h2) or h1.k != h2.k:
        return False
    return canonical_form(h1) == canonical_form(h2)


def is_isomorphic_subgraph(h1: UndirectedGraph, h2: UndirectedGraph) -> bool:
    """True iff some injection of h1's vertices into h2's maps E(h1) into E(h2).

    Vertex counts may differ (h1.k <= h2.k); unused h2 vertices act as padding.
    Brute force over injections; fine at certificate size.
    """
    if h1.k > h2.k:
        return False
    e2 = h2.edges
    for image in itertools.permutations(range(1, h2.k + 1), h1.k):
        ok = True
        for i, j in h1.edges:
            a, b = image[i - 1], image[j - 1]
            if (min(a, b), max(a, b)) not in e2:
                ok = False
                break
        if ok:
            return True
    return False


def undirected_contractions(h: UndirectedGraph):
    """All graphs obtained by identifying vertices of h (loops dropped), incl. h itself.

    Yields one representative per surjection target; callers dedup by canonical_form.
    """
    for z in _surjections(h.k):
        kp = max(z) if z else 0
        edges = set()
        for i, j in h.edges:
            a, b = z[i - 1], z[j - 1]
            if a != b:
                edges.add((min(a, b), max(a, b)))
        yield UndirectedGraph(kp, frozenset(edges))


def _surjections(k: int):
    """All maps [k] -> [k'] surjective with blocks labelled in order of first appearance."""
    def rec(prefix, used):
        if len(prefix) == k:
            yield tuple(prefix)
            return
        for v in range(1, used + 2):
            yield from rec(prefix + [v], max(used, v))

    if k == 0:
        yield ()
        return
    yield from rec([], 0)


def load_graph(text: str):
    """Parse the JSON graph document {"k": int, "edges": [[i,j],...], "directed": bool}."""
    try:
        doc = json.loads(text)
    except json.JSONDecodeError as exc:
        raise GraphError(f"bad graph document: {exc}") from exc
    if not isinstance(doc, dict) or "k" not in doc or "edges" not in doc:
        raise GraphError("graph document needs fields 'k' and 'edges'")
    k = doc["k"]
    edges = [tuple(e) for e in doc["edges"]]
    directed = bool(doc.get("directed", False))
    if directed:
        return CertGraph(k, frozenset(edges))
    return UndirectedGraph(k, frozenset(edges))


def dump_graph(h) -> str:
    doc = {
        "k": h.k,
        "edges": [list(e) for e in h.sorted_edges()],
        "directed": isinstance(h, CertGraph),
    }
    return json.dumps(doc, indent=2)
