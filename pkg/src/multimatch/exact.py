"""Exact solvers used as oracles: matching enumeration, stage DP, Max-Cut."""

from __future__ import annotations

import itertools
import math
from dataclasses import dataclass
from typing import Iterable

from .core import (
    Edge,
    InfeasibleInstanceError,
    MultistageMatching,
    TemporalGraph,
    components,
    matching_key,
    profit,
    union_cost,
)

DEFAULT_CAP = 10**6
MIM = "mim"
MUM = "mum"


class EnumerationOverflow(Exception):
    """More perfect matchings than the cap allows."""

    def __init__(self, count: int, cap: int, stage: int | None = None):
        where = f"stage {stage}" if stage is not None else "graph"
        super().__init__(f"{where}: {count} or more perfect matchings exceed cap {cap}")
        self.count, self.cap, self.stage = count, cap, stage


def _component_matchings(verts: list[int], comp_edges: list[Edge], cap: int) -> list[tuple[Edge, ...]]:
    """All perfect matchings of one connected component, in lexicographic order.

    Branching on the smallest unmatched vertex and trying its partners in
    ascending order emits matchings already sorted.
    """
    if len(verts) % 2:
        return []
    adj: dict[int, list[int]] = {x: [] for x in verts}
    for u, v in comp_edges:
        adj[u].append(v)
        adj[v].append(u)
    for x in adj:
        adj[x].sort()
    order = sorted(verts)
    matched: set[int] = set()
    out: list[tuple[Edge, ...]] = []
    chosen: list[Edge] = []

    def rec(pos: int) -> None:
        while pos < len(order) and order[pos] in matched:
            pos += 1
        if pos == len(order):
            out.append(tuple(chosen))
            if len(out) > cap:
                raise EnumerationOverflow(len(out), cap)
            return
        u = order[pos]
        matched.add(u)
        for v in adj[u]:
            if v not in matched:
                matched.add(v)
                chosen.append((u, v))
                rec(pos + 1)
                chosen.pop()
                matched.discard(v)
        matched.discard(u)

    rec(0)
    return out


def component_matchings(edges: Iterable[Edge], cap: int = DEFAULT_CAP) -> list[list[tuple[Edge, ...]]]:
    """Per connected component, the sorted list of its perfect matchings."""
    return [_component_matchings(v, e, cap) for v, e in components(edges)]


def _product_size(per_component: list[list]) -> int:
    return math.prod(len(c) for c in per_component)


def enumerate_perfect_matchings(edges: Iterable[Edge], cap: int = DEFAULT_CAP, stage: int | None = None) -> list[frozenset]:
    """Every perfect matching of the graph, sorted lexicographically.

    Raises EnumerationOverflow once the count would exceed ``cap``.
    """
    if cap < 1:
        raise ValueError("cap must be at least 1")
    try:
        per_component = component_matchings(edges, cap)
    except EnumerationOverflow as exc:
        raise EnumerationOverflow(exc.count, cap, stage) from None
    total = _product_size(per_component)
    if total > cap:
        raise EnumerationOverflow(total, cap, stage)
    combos = [frozenset(itertools.chain.from_iterable(parts)) for parts in itertools.product(*per_component)]
    combos.sort(key=matching_key)
    return combos


@dataclass(frozen=True)
class ExactResult:
    objective: str
    value: int
    solution: MultistageMatching
    pm_counts: tuple[int, ...]


def exact_solve(g: TemporalGraph, objective: str = MIM, cap: int = DEFAULT_CAP) -> ExactResult:
    """Globally optimal multistage perfect matching.

    Both objectives share their optimisers (union = sizes - intersection per
    transition), so the DP maximises intersections in either case.  Stages
    ``1..tau-1`` are enumerated in full and scored backwards; the last stage
    only ever answers "best response to the previous matching", which splits
    over its connected components and is never enumerated as a product.
    Among optimal solutions the lexicographically smallest one is returned.
    """
    if objective not in (MIM, MUM):
        raise ValueError(f"unknown objective {objective!r}")
    tau = g.tau

    last_parts = []
    try:
        last_parts = component_matchings(g.stages[-1], cap)
    except EnumerationOverflow as exc:
        raise EnumerationOverflow(exc.count, cap, tau) from None
    if any(not part for part in last_parts):
        raise InfeasibleInstanceError(f"stage {tau} has no perfect matching", [tau])

    full: list[list[frozenset]] = []
    for i in range(1, tau):
        states = enumerate_perfect_matchings(g.stages[i - 1], cap, stage=i)
        if not states:
            raise InfeasibleInstanceError(f"stage {i} has no perfect matching", [i])
        full.append(states)
    counts = tuple(len(s) for s in full) + (_product_size(last_parts),)

    if tau == 1:
        sol = MultistageMatching((frozenset(itertools.chain.from_iterable(p[0] for p in last_parts)),))
        return _result(objective, sol, counts)

    # bitmask encoding makes |A & B| a popcount
    universe = sorted(frozenset().union(*g.stages))
    bit = {e: 1 << k for k, e in enumerate(universe)}

    def mask(m: Iterable[Edge]) -> int:
        out = 0
        for e in m:
            out |= bit[e]
        return out

    last_masks = [[mask(p) for p in part] for part in last_parts]

    def best_last(m: int) -> tuple[int, list[int]]:
        total, picks = 0, []
        for options in last_masks:
            best_k, best_v = 0, -1
            for k, pm in enumerate(options):
                v = (m & pm).bit_count()
                if v > best_v:
                    best_k, best_v = k, v
            total += best_v
            picks.append(best_k)
        return total, picks

    masks = [[mask(m) for m in states] for states in full]
    # score[i][s]: best profit from stage i+1 onwards given state s at stage i+1
    score: list[list[int]] = [[] for _ in full]
    nxt: list[list] = [[] for _ in full]
    for s, m in enumerate(masks[-1]):
        value, picks = best_last(m)
        score[-1].append(value)
        nxt[-1].append(picks)
    for i in range(len(full) - 2, -1, -1):
        here, later, later_score = masks[i], masks[i + 1], score[i + 1]
        for m in here:
            best_t, best_v = 0, -1
            for t, m2 in enumerate(later):
                v = (m & m2).bit_count() + later_score[t]
                if v > best_v:
                    best_t, best_v = t, v
            score[i].append(best_v)
            nxt[i].append(best_t)

    start = max(range(len(full[0])), key=lambda s: (score[0][s], -s))
    chosen, s = [], start
    for i in range(len(full)):
        chosen.append(full[i][s])
        if i < len(full) - 1:
            s = nxt[i][s]
    picks = nxt[-1][s]
    chosen.append(frozenset(itertools.chain.from_iterable(part[k] for part, k in zip(last_parts, picks))))
    sol = MultistageMatching(tuple(chosen))
    result = _result(objective, sol, counts)
    assert profit(sol) == score[0][start]
    return result


def _result(objective: str, sol: MultistageMatching, counts: tuple[int, ...]) -> ExactResult:
    value = profit(sol) if objective == MIM else union_cost(sol)
    return ExactResult(objective, value, sol, counts)


def exact_maxcut(n: int, edges: Iterable[Edge]) -> int:
    """Maximum cut size by trying every vertex subset (vertex 0 fixed aside)."""
    if n > 24:
        raise ValueError(f"exhaustive Max-Cut is capped at 24 vertices, got {n}")
    edges = list(edges)
    if n <= 1 or not edges:
        return 0
    best = 0
    for side in range(1 << (n - 1)):
        s = side << 1
        cut = sum(((s >> u) ^ (s >> v)) & 1 for u, v in edges)
        best = max(best, cut)
    return best
