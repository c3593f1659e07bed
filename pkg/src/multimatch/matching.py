"""Perfect matching primitives and forbidden-edge preprocessing.

The weighted engine runs the blossom algorithm from networkx on each
connected component.  Ties are broken deterministically: every weight is
scaled by ``2**m`` and edge number ``r`` in canonical order gets an extra
``2**(m - 1 - r)``.  The extra bits sum to less than one unit of the true
weight, and among equal true weights they prefer the set whose smallest
differing edge is smaller, i.e. the lexicographically smallest edge list.
Python integers keep this exact.

Existence and allowed-edge tests use a small Edmonds cardinality search
instead, because one augmenting-path search per edge is far cheaper than a
weighted solve.
"""

from __future__ import annotations

from collections import deque
from typing import Iterable

import networkx as nx

from .core import Edge, InfeasibleInstanceError, TemporalGraph, WeightedGraph, components

__all__ = [
    "max_weight_perfect_matching",
    "any_perfect_matching",
    "has_perfect_matching",
    "allowed_edges",
    "reduce",
    "is_reduced",
]


def max_weight_perfect_matching(g: WeightedGraph) -> frozenset | None:
    """Maximum-weight perfect matching of ``g``, or None if there is none.

    "Perfect" means every vertex incident to an edge of ``g`` is matched.
    Among optimal matchings the lexicographically smallest sorted edge list
    is returned.
    """
    chosen: set[Edge] = set()
    for verts, comp_edges in components(g.weights):
        if len(verts) % 2:
            return None
        m = len(comp_edges)
        graph = nx.Graph()
        for rank, e in enumerate(comp_edges):
            graph.add_edge(*e, weight=(g.weights[e] << m) + (1 << (m - 1 - rank)))
        mate = nx.max_weight_matching(graph, maxcardinality=True)
        if 2 * len(mate) != len(verts):
            return None
        chosen.update((min(u, v), max(u, v)) for u, v in mate)
    return frozenset(chosen)


class _Edmonds:
    """Edmonds' blossom search for augmenting paths (cardinality only).

    Works on local indices ``0..N-1``; ``mate[v] == -1`` marks an exposed
    vertex.  Vertices listed in ``blocked`` are ignored by the search.
    """

    def __init__(self, n: int, adj: list[list[int]]):
        self.n = n
        self.adj = adj
        self.mate = [-1] * n

    def _lca(self, a: int, b: int, base: list[int], parent: list[int]) -> int:
        seen = [False] * self.n
        while True:
            a = base[a]
            seen[a] = True
            if self.mate[a] == -1:
                break
            a = parent[self.mate[a]]
        while True:
            b = base[b]
            if seen[b]:
                return b
            b = parent[self.mate[b]]

    def augmenting_path_end(self, root: int, blocked: frozenset = frozenset()) -> tuple[int, list[int]]:
        """Search from exposed ``root``; return (end vertex or -1, parent array)."""
        n, mate, adj = self.n, self.mate, self.adj
        used = [False] * n
        parent = [-1] * n
        base = list(range(n))
        used[root] = True
        queue = deque([root])

        def mark(v: int, b: int, child: int, blossom: list[bool]) -> None:
            while base[v] != b:
                blossom[base[v]] = blossom[base[mate[v]]] = True
                parent[v] = child
                child = mate[v]
                v = parent[mate[v]]

        while queue:
            v = queue.popleft()
            for to in adj[v]:
                if to in blocked or base[v] == base[to] or mate[v] == to:
                    continue
                if to == root or (mate[to] != -1 and parent[mate[to]] != -1):
                    cur = self._lca(v, to, base, parent)
                    blossom = [False] * n
                    mark(v, cur, to, blossom)
                    mark(to, cur, v, blossom)
                    for i in range(n):
                        if blossom[base[i]]:
                            base[i] = cur
                            if not used[i]:
                                used[i] = True
                                queue.append(i)
                elif parent[to] == -1:
                    parent[to] = v
                    if mate[to] == -1:
                        return to, parent
                    used[mate[to]] = True
                    queue.append(mate[to])
        return -1, parent

    def augment(self, end: int, parent: list[int]) -> None:
        v = end
        while v != -1:
            pv = parent[v]
            nxt = self.mate[pv]
            self.mate[v] = pv
            self.mate[pv] = v
            v = nxt

    def maximum_matching(self) -> None:
        # greedy start, then augment from every exposed vertex
        for v in range(self.n):
            if self.mate[v] == -1:
                for to in self.adj[v]:
                    if self.mate[to] == -1:
                        self.mate[v], self.mate[to] = to, v
                        break
        for v in range(self.n):
            if self.mate[v] == -1:
                end, parent = self.augmenting_path_end(v)
                if end != -1:
                    self.augment(end, parent)


def _local(verts: list[int], comp_edges: list[Edge]) -> tuple[dict[int, int], _Edmonds]:
    index = {x: i for i, x in enumerate(verts)}
    adj: list[list[int]] = [[] for _ in verts]
    for u, v in comp_edges:
        adj[index[u]].append(index[v])
        adj[index[v]].append(index[u])
    return index, _Edmonds(len(verts), adj)


def _component_perfect(verts: list[int], comp_edges: list[Edge]) -> tuple[dict[int, int], _Edmonds] | None:
    if len(verts) % 2:
        return None
    index, solver = _local(verts, comp_edges)
    solver.maximum_matching()
    if -1 in solver.mate:
        return None
    return index, solver


def any_perfect_matching(edges: Iterable[Edge]) -> frozenset | None:
    """Some perfect matching (not canonical), or None."""
    out: set[Edge] = set()
    for verts, comp_edges in components(edges):
        found = _component_perfect(verts, comp_edges)
        if found is None:
            return None
        _, solver = found
        for i, j in enumerate(solver.mate):
            if i < j:
                a, b = verts[i], verts[j]
                out.add((min(a, b), max(a, b)))
    return frozenset(out)


def has_perfect_matching(edges: Iterable[Edge]) -> bool:
    return any_perfect_matching(edges) is not None


def allowed_edges(edges: Iterable[Edge]) -> frozenset:
    """Edges that lie in at least one perfect matching; empty if there is none.

    With a perfect matching ``M`` in hand, a non-matching edge ``uv`` is
    allowed iff the graph without ``u`` and ``v`` has a perfect matching,
    i.e. iff the partners of ``u`` and ``v`` can be joined by an
    ``M``-augmenting path avoiding ``u`` and ``v``.
    """
    allowed: set[Edge] = set()
    for verts, comp_edges in components(edges):
        found = _component_perfect(verts, comp_edges)
        if found is None:
            return frozenset()
        index, solver = found
        base_mate = list(solver.mate)
        for u, v in comp_edges:
            iu, iv = index[u], index[v]
            if base_mate[iu] == iv:
                allowed.add((u, v))
                continue
            pu, pv = base_mate[iu], base_mate[iv]
            solver.mate = list(base_mate)
            for x in (iu, iv, pu, pv):
                solver.mate[x] = -1
            end, _ = solver.augmenting_path_end(pu, blocked=frozenset((iu, iv)))
            if end != -1:
                allowed.add((u, v))
        solver.mate = base_mate
    return frozenset(allowed)


def reduce(g: TemporalGraph) -> TemporalGraph:
    """Drop the forbidden edges of every stage.

    Raises InfeasibleInstanceError naming every stage without a perfect
    matching, since emptying such a stage would silently make it trivial.
    """
    reduced, bad = [], []
    for i, stage in enumerate(g.stages, start=1):
        keep = allowed_edges(stage)
        if stage and not keep:
            bad.append(i)
        reduced.append(keep)
    if bad:
        raise InfeasibleInstanceError(f"stages without a perfect matching: {bad}", bad)
    return g.with_stages(reduced)


def is_reduced(g: TemporalGraph) -> bool:
    return all(allowed_edges(s) == s for s in g.stages)
