"""Temporal graphs, multistage matchings, objectives and the JSON formats.

Vertices are dense integers ``0..n-1``.  An edge is a canonical tuple
``(u, v)`` with ``u < v``; a matching is a ``frozenset`` of such tuples.
Every stage is perfect-matched on the vertices it touches, not on the whole
vertex set, so vertices isolated in a stage impose no constraint there.
"""

from __future__ import annotations

import hashlib
import json
from dataclasses import dataclass, field
from typing import Any, Iterable, Iterator, Sequence

Edge = tuple[int, int]
Matching = frozenset  # frozenset[Edge]


class InstanceFormatError(ValueError):
    """Raised for malformed instance or solution documents."""


class InfeasibleInstanceError(Exception):
    """Raised when some stage has no perfect matching."""

    def __init__(self, message: str, stages: Sequence[int] = ()):
        super().__init__(message)
        self.stages = list(stages)


def edge(u: int, v: int) -> Edge:
    """Canonical form of the edge ``uv``."""
    if u == v:
        raise ValueError(f"self-loop at vertex {u}")
    return (u, v) if u < v else (v, u)


def sorted_edges(edges: Iterable[Edge]) -> list[Edge]:
    return sorted(edges)


def matching_key(m: Iterable[Edge]) -> tuple[Edge, ...]:
    """Sort key giving the lexicographic order on canonical edge lists."""
    return tuple(sorted(m))


def vertices_of(edges: Iterable[Edge]) -> set[int]:
    out: set[int] = set()
    for u, v in edges:
        out.add(u)
        out.add(v)
    return out


def components(edges: Iterable[Edge]) -> list[tuple[list[int], list[Edge]]]:
    """Connected components of an edge set as ``(vertices, edges)`` pairs.

    Components are ordered by their smallest vertex; vertex and edge lists
    are sorted.
    """
    edges = sorted(set(edges))
    parent: dict[int, int] = {}

    def find(x: int) -> int:
        root = x
        while parent[root] != root:
            root = parent[root]
        while parent[x] != root:
            parent[x], x = root, parent[x]
        return root

    for u, v in edges:
        parent.setdefault(u, u)
        parent.setdefault(v, v)
        ru, rv = find(u), find(v)
        if ru != rv:
            if ru < rv:
                parent[rv] = ru
            else:
                parent[ru] = rv
    groups: dict[int, tuple[list[int], list[Edge]]] = {}
    for x in sorted(parent):
        groups.setdefault(find(x), ([], []))[0].append(x)
    for e in edges:
        groups[find(e[0])][1].append(e)
    return [groups[r] for r in sorted(groups)]


def two_colouring(edges: Iterable[Edge]) -> dict[int, int] | None:
    """A proper 0/1 colouring of the touched vertices, or None if there is an odd cycle.

    Every component gives colour 0 to its first-seen vertex.
    """
    adj: dict[int, list[int]] = {}
    for u, v in edges:
        adj.setdefault(u, []).append(v)
        adj.setdefault(v, []).append(u)
    colour: dict[int, int] = {}
    for start in adj:
        if start in colour:
            continue
        colour[start] = 0
        stack = [start]
        while stack:
            x = stack.pop()
            for y in adj[x]:
                if y not in colour:
                    colour[y] = 1 - colour[x]
                    stack.append(y)
                elif colour[y] == colour[x]:
                    return None
    return colour


def is_bipartite(edges: Iterable[Edge]) -> bool:
    return two_colouring(edges) is not None


@dataclass(frozen=True)
class TemporalGraph:
    """A vertex count plus an ordered sequence of stage edge sets."""

    n: int
    stages: tuple[frozenset, ...]
    name: str | None = None
    meta: dict[str, Any] = field(default_factory=dict, compare=False, hash=False)

    def __post_init__(self) -> None:
        if self.n < 0:
            raise ValueError("vertex count must be non-negative")
        if len(self.stages) < 1:
            raise ValueError("a temporal graph needs at least one stage")
        for i, stage in enumerate(self.stages, start=1):
            for u, v in stage:
                if not (0 <= u < v < self.n):
                    raise ValueError(f"stage {i}: edge {(u, v)} is not canonical or out of range")

    @classmethod
    def from_edge_lists(
        cls,
        n: int,
        stages: Iterable[Iterable[Sequence[int]]],
        name: str | None = None,
        meta: dict[str, Any] | None = None,
    ) -> "TemporalGraph":
        """Build from raw ``[u, v]`` lists, validating every invariant."""
        built = []
        for i, raw in enumerate(stages, start=1):
            seen: set[Edge] = set()
            for pair in raw:
                if len(pair) != 2:
                    raise InstanceFormatError(f"stage {i}: edge {list(pair)} must have two endpoints")
                u, v = (int(x) for x in pair)
                if u == v:
                    raise InstanceFormatError(f"stage {i}: self-loop {[u, v]}")
                if not (0 <= u < n and 0 <= v < n):
                    raise InstanceFormatError(f"stage {i}: edge {[u, v]} has an endpoint outside [0, {n})")
                e = edge(u, v)
                if e in seen:
                    raise InstanceFormatError(f"stage {i}: duplicate edge {list(e)}")
                seen.add(e)
            built.append(frozenset(seen))
        if not built:
            raise InstanceFormatError("instance has no stages")
        return cls(n, tuple(built), name, dict(meta or {}))

    @property
    def tau(self) -> int:
        return len(self.stages)

    def stage(self, i: int) -> frozenset:
        """The edge set of stage ``i`` (1-based, as in the literature)."""
        return self.stages[i - 1]

    def stage_vertices(self, i: int) -> set[int]:
        return vertices_of(self.stages[i - 1])

    def stage_sizes(self) -> list[int]:
        """``n_i`` for every stage."""
        return [len(vertices_of(s)) for s in self.stages]

    def intersection(self, i: int) -> frozenset:
        """Edges shared by stages ``i`` and ``i + 1``."""
        return self.stages[i - 1] & self.stages[i]

    def transition_intersections(self) -> list[frozenset]:
        return [self.stages[i] & self.stages[i + 1] for i in range(self.tau - 1)]

    @property
    def mu(self) -> int:
        """Largest consecutive-stage intersection; 0 for a single stage."""
        return max((len(s) for s in self.transition_intersections()), default=0)

    def common_edges(self) -> frozenset:
        """Edges present in every stage."""
        out = self.stages[0]
        for s in self.stages[1:]:
            out = out & s
        return out

    def union_edges(self) -> frozenset:
        return frozenset().union(*self.stages)

    def is_spanning(self) -> bool:
        everything = set(range(self.n))
        return all(vertices_of(s) == everything for s in self.stages)

    def union_is_bipartite(self) -> bool:
        return is_bipartite(self.union_edges())

    def xi(self) -> int:
        """Sum of ``(n_i + n_{i+1}) / 2`` over transitions (a union-cost upper bound)."""
        sizes = self.stage_sizes()
        return sum((sizes[i] + sizes[i + 1]) // 2 for i in range(self.tau - 1))

    def with_stages(self, stages: Iterable[Iterable[Edge]]) -> "TemporalGraph":
        return TemporalGraph(self.n, tuple(frozenset(s) for s in stages), self.name, dict(self.meta))

    def pair(self, i: int) -> "TemporalGraph":
        """The 2-stage graph formed by stages ``i`` and ``i + 1``."""
        return TemporalGraph(self.n, (self.stages[i - 1], self.stages[i]))


@dataclass(frozen=True)
class MultistageMatching:
    """One matching per stage."""

    stages: tuple[frozenset, ...]

    @classmethod
    def of(cls, matchings: Iterable[Iterable[Edge]]) -> "MultistageMatching":
        return cls(tuple(frozenset(edge(*e) for e in m) for m in matchings))

    def __len__(self) -> int:
        return len(self.stages)

    def __getitem__(self, i: int) -> frozenset:
        return self.stages[i]

    def __iter__(self) -> Iterator[frozenset]:
        return iter(self.stages)

    def sort_key(self) -> tuple:
        return tuple(matching_key(m) for m in self.stages)


@dataclass(frozen=True)
class WeightedGraph:
    """A single graph with non-negative integer edge weights."""

    weights: dict  # dict[Edge, int]

    def __post_init__(self) -> None:
        for e, w in self.weights.items():
            if e[0] >= e[1]:
                raise ValueError(f"edge {e} is not canonical")
            if not isinstance(w, int) or w < 0:
                raise ValueError(f"edge {e}: weight must be a non-negative integer, got {w!r}")

    @classmethod
    def indicator(cls, edges: Iterable[Edge], marked: Iterable[Edge] = ()) -> "WeightedGraph":
        """Weight 1 on ``marked`` edges, 0 elsewhere."""
        marked = set(marked)
        return cls({e: int(e in marked) for e in edges})

    @property
    def edges(self) -> list[Edge]:
        return sorted(self.weights)

    def weight(self, m: Iterable[Edge]) -> int:
        return sum(self.weights[e] for e in m)


def profit(m: MultistageMatching) -> int:
    """Intersection profit: sum of ``|M_i & M_{i+1}|`` over transitions."""
    return sum(len(m[i] & m[i + 1]) for i in range(len(m) - 1))


def union_cost(m: MultistageMatching) -> int:
    """Union cost: sum of ``|M_i | M_{i+1}|`` over transitions."""
    return sum(len(m[i] | m[i + 1]) for i in range(len(m) - 1))


@dataclass(frozen=True)
class Verdict:
    feasible: bool
    profit: int
    union_cost: int
    stage: int | None = None
    reason: str | None = None

    def __bool__(self) -> bool:
        return self.feasible

    def to_json(self) -> dict[str, Any]:
        out: dict[str, Any] = {"feasible": self.feasible, "profit": self.profit, "union_cost": self.union_cost}
        if not self.feasible:
            out["violation"] = {"stage": self.stage, "reason": self.reason}
        return out


def check_perfect(stage_edges: frozenset, m: Iterable[Edge]) -> str | None:
    """Describe why ``m`` is not a perfect matching of ``stage_edges``, or None."""
    covered: dict[int, Edge] = {}
    for e in sorted(m):
        if e not in stage_edges:
            return f"edge {list(e)} is not in the stage"
        for x in e:
            if x in covered:
                return f"vertex {x} is covered by {list(covered[x])} and {list(e)}"
            covered[x] = e
    for x in sorted(vertices_of(stage_edges)):
        if x not in covered:
            return f"vertex {x} is unmatched"
    return None


def verify(g: TemporalGraph, m: MultistageMatching) -> Verdict:
    """Check that ``m`` is a multistage perfect matching of ``g``.

    Objectives are reported whether or not the solution is feasible; the
    first violation (lowest stage, then canonical order) is named otherwise.
    """
    if len(m) != g.tau:
        raise ValueError(f"solution has {len(m)} stages, instance has {g.tau}")
    p, c = profit(m), union_cost(m)
    for i, (stage_edges, mi) in enumerate(zip(g.stages, m), start=1):
        reason = check_perfect(stage_edges, mi)
        if reason is not None:
            return Verdict(False, p, c, i, reason)
    return Verdict(True, p, c)


# -- formats ---------------------------------------------------------------

def _load(text: str) -> Any:
    try:
        return json.loads(text)
    except json.JSONDecodeError as exc:
        raise InstanceFormatError(f"not a JSON document: {exc}") from None


def instance_to_json(g: TemporalGraph) -> dict[str, Any]:
    doc: dict[str, Any] = {"n": g.n}
    if g.name is not None:
        doc["name"] = g.name
    if g.meta:
        doc["meta"] = g.meta
    doc["stages"] = [[list(e) for e in sorted(s)] for s in g.stages]
    return doc


def parse_instance(text: str) -> TemporalGraph:
    doc = _load(text)
    if not isinstance(doc, dict):
        raise InstanceFormatError("instance must be a JSON object")
    n, stages = doc.get("n"), doc.get("stages")
    if not isinstance(n, int) or isinstance(n, bool) or n < 0:
        raise InstanceFormatError("'n' must be a non-negative integer")
    if not isinstance(stages, list) or not all(isinstance(s, list) for s in stages):
        raise InstanceFormatError("'stages' must be a list of edge lists")
    for i, s in enumerate(stages, start=1):
        for pair in s:
            if not isinstance(pair, list) or not all(isinstance(x, int) and not isinstance(x, bool) for x in pair):
                raise InstanceFormatError(f"stage {i}: edge {pair!r} must be a list of integers")
    name = doc.get("name")
    if name is not None and not isinstance(name, str):
        raise InstanceFormatError("'name' must be a string")
    meta = doc.get("meta") or {}
    if not isinstance(meta, dict):
        raise InstanceFormatError("'meta' must be an object")
    return TemporalGraph.from_edge_lists(n, stages, name, meta)


def serialize_instance(g: TemporalGraph) -> str:
    """Canonical text: fixed key order, each stage sorted."""
    return _dump(instance_to_json(g))


def _dump(doc: dict[str, Any]) -> str:
    # one stage per line keeps documents diffable without bloating them
    parts = []
    for key, value in doc.items():
        if key == "stages":
            inner = ",\n    ".join(json.dumps(s, separators=(",", ":")) for s in value)
            parts.append(f'  "stages": [\n    {inner}\n  ]' if value else '  "stages": []')
        else:
            parts.append(f"  {json.dumps(key)}: {json.dumps(value, sort_keys=True)}")
    return "{\n" + ",\n".join(parts) + "\n}\n"


def solution_to_json(m: MultistageMatching) -> dict[str, Any]:
    return {"stages": [[list(e) for e in sorted(s)] for s in m]}


def serialize_solution(m: MultistageMatching) -> str:
    return _dump(solution_to_json(m))


def parse_solution(text: str) -> MultistageMatching:
    doc = _load(text)
    if not isinstance(doc, dict) or not isinstance(doc.get("stages"), list):
        raise InstanceFormatError("solution must be an object with a 'stages' list")
    try:
        return MultistageMatching.of([[tuple(p) for p in s] for s in doc["stages"]])
    except (TypeError, ValueError) as exc:
        raise InstanceFormatError(f"bad solution edge: {exc}") from None


def digest(g: TemporalGraph) -> str:
    """Content hash of the canonical serialization."""
    return hashlib.sha256(serialize_instance(g).encode("utf-8")).hexdigest()
