"""DAG representation, enumeration and Markov equivalence.

Nodes are numbered 1..n throughout the package. A DAG is stored as one
sorted parent tuple per node, which is the form every scoring routine
needs. The canonical ordering of DAGs is by adjacency bitmask, where the
edge ``i -> j`` owns bit ``(i - 1) * n + (j - 1)``.
"""

from __future__ import annotations

import itertools
from dataclasses import dataclass
from typing import FrozenSet, Iterable, List, Sequence, Tuple

from .errors import CycleError, InvalidEdge, SizeMismatch, TooLarge

MAX_ENUMERATION_NODES = 5

Edge = Tuple[int, int]


@dataclass(frozen=True)
class Dag:
    """Directed acyclic graph on nodes 1..n.

    ``parents[i - 1]`` is the sorted tuple of parents of node ``i``.
    Build instances with :func:`new_dag`, which validates the edges.
    """

    n: int
    parents: Tuple[Tuple[int, ...], ...]

    def parents_of(self, i: int) -> Tuple[int, ...]:
        return self.parents[i - 1]

    def children_of(self, i: int) -> Tuple[int, ...]:
        return tuple(j for j in range(1, self.n + 1) if i in self.parents[j - 1])

    def neighbors_of(self, i: int) -> Tuple[int, ...]:
        return tuple(sorted(set(self.parents_of(i)) | set(self.children_of(i))))

    @property
    def edges(self) -> List[Edge]:
        return sorted((p, c) for c in range(1, self.n + 1) for p in self.parents[c - 1])

    @property
    def bitmask(self) -> int:
        return sum(1 << ((p - 1) * self.n + (c - 1)) for p, c in self.edges)

    def topological_order(self) -> List[int]:
        order = _kahn(self.n, self.parents)
        assert order is not None
        return order

    def __str__(self):
        if not self.edges:
            return "(empty graph on %d nodes)" % self.n
        return ", ".join("%d->%d" % e for e in self.edges)


@dataclass(frozen=True)
class EquivalenceKey:
    skeleton: FrozenSet[Tuple[int, int]]
    v_structures: FrozenSet[Tuple[int, int, int]]


def _kahn(n, parents):
    indeg = [len(p) for p in parents]
    children = [[] for _ in range(n)]
    for c in range(n):
        for p in parents[c]:
            children[p - 1].append(c + 1)
    ready = [i + 1 for i in range(n) if indeg[i] == 0]
    order = []
    while ready:
        v = ready.pop(0)
        order.append(v)
        for c in children[v - 1]:
            indeg[c - 1] -= 1
            if indeg[c - 1] == 0:
                ready.append(c)
    return order if len(order) == n else None


def _find_cycle(n, parents):
    # DFS along parent links; only called once Kahn has failed.
    state = [0] * (n + 1)
    stack: List[int] = []

    def visit(v):
        state[v] = 1
        stack.append(v)
        for p in parents[v - 1]:
            if state[p] == 1:
                cyc = stack[stack.index(p):]
                return list(reversed(cyc)) + [cyc[-1]]
            if state[p] == 0:
                found = visit(p)
                if found:
                    return found
        stack.pop()
        state[v] = 2
        return None

    for v in range(1, n + 1):
        if state[v] == 0:
            found = visit(v)
            if found:
                return found
    return []


def new_dag(n: int, edges: Iterable[Edge] = ()) -> Dag:
    """Validate ``edges`` (pairs ``(parent, child)``) and build a :class:`Dag`."""
    if n < 1:
        raise InvalidEdge("a DAG needs at least one node, got n=%r" % (n,))
    parent_sets = [set() for _ in range(n)]
    for edge in edges:
        p, c = (int(x) for x in edge)
        if not (1 <= p <= n and 1 <= c <= n):
            raise InvalidEdge("edge %d->%d out of range 1..%d" % (p, c, n))
        if p == c:
            raise InvalidEdge("self-loop on node %d" % p)
        if p in parent_sets[c - 1]:
            raise InvalidEdge("duplicate edge %d->%d" % (p, c))
        parent_sets[c - 1].add(p)
    parents = tuple(tuple(sorted(s)) for s in parent_sets)
    if _kahn(n, parents) is None:
        raise CycleError(_find_cycle(n, parents))
    return Dag(n, parents)


def dag_from_bitmask(n: int, mask: int) -> Dag:
    edges = [(p, c) for p in range(1, n + 1) for c in range(1, n + 1)
             if mask >> ((p - 1) * n + (c - 1)) & 1]
    return new_dag(n, edges)


def enumerate_dags(n: int) -> List[Dag]:
    """All labeled DAGs on ``n`` nodes, sorted by adjacency bitmask.

    Every DAG is upper triangular under some node permutation, so the
    union over permutations of all upper-triangular edge sets is exactly
    the set of DAGs. That is ``n! * 2**(n(n-1)/2)`` candidates (122880 for
    n=5) instead of ``2**(n(n-1))``.
    """
    if n < 1:
        raise InvalidEdge("n must be >= 1")
    if n > MAX_ENUMERATION_NODES:
        raise TooLarge("exhaustive DAG enumeration is capped at n <= %d" % MAX_ENUMERATION_NODES)
    pairs = [(a, b) for a in range(n) for b in range(a + 1, n)]
    masks = set()
    for perm in itertools.permutations(range(n)):
        bits = [1 << (perm[a] * n + perm[b]) for a, b in pairs]
        for choice in range(1 << len(pairs)):
            m = 0
            for k, bit in enumerate(bits):
                if choice >> k & 1:
                    m |= bit
            masks.add(m)
    return [dag_from_bitmask(n, m) for m in sorted(masks)]


def equivalence_key(d: Dag) -> EquivalenceKey:
    skeleton = frozenset(tuple(sorted(e)) for e in d.edges)
    vs = set()
    for c in range(1, d.n + 1):
        for a, b in itertools.combinations(d.parents_of(c), 2):
            if (a, b) not in skeleton:
                vs.add((a, c, b))
    return EquivalenceKey(skeleton, frozenset(vs))


def markov_equivalent(d1: Dag, d2: Dag) -> bool:
    if d1.n != d2.n:
        raise SizeMismatch("DAGs have %d and %d nodes" % (d1.n, d2.n))
    return equivalence_key(d1) == equivalence_key(d2)


def equivalence_classes(dags: Sequence[Dag]) -> List[List[Dag]]:
    """Group ``dags`` by Markov equivalence, preserving input order."""
    groups: dict = {}
    for d in dags:
        groups.setdefault(equivalence_key(d), []).append(d)
    return list(groups.values())


def parse_edge_list(text: str, n: int | None = None) -> Dag:
    """Parse the ``parent child`` per line format. Blank lines and ``#`` comments are skipped.

    When ``n`` is omitted the node count is the largest index mentioned.
    """
    edges = []
    for lineno, line in enumerate(text.splitlines(), 1):
        line = line.split("#", 1)[0].strip()
        if not line:
            continue
        parts = line.replace(",", " ").split()
        if len(parts) != 2:
            raise InvalidEdge("line %d: expected 'parent child', got %r" % (lineno, line))
        try:
            edges.append((int(parts[0]), int(parts[1])))
        except ValueError:
            raise InvalidEdge("line %d: non-integer node index in %r" % (lineno, line)) from None
    if n is None:
        n = max((max(e) for e in edges), default=1)
    return new_dag(n, edges)


def format_edge_list(d: Dag) -> str:
    return "".join("%d %d\n" % e for e in d.edges)
