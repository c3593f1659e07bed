"""Deterministic instance generators for the hardness and gap constructions.

Every generator fixes its vertex numbering and returns a label map from
symbolic names to edges, so tests can address construction parts by name.
"""

from __future__ import annotations

import random
from dataclasses import dataclass
from fractions import Fraction
from typing import Iterable, Sequence

from .core import Edge, TemporalGraph, components, edge, two_colouring, vertices_of

Labels = dict  # dict[str, Edge]


# -- Max-Cut reduction -------------------------------------------------------

@dataclass(frozen=True)
class MaxCutGadget:
    graph: TemporalGraph
    kappa: int
    labels: Labels


def gen_maxcut_gadget(n: int, edges: Iterable[Sequence[int]], k: int = 0) -> MaxCutGadget:
    """Two-stage instance whose best intersection is ``3|E| + maxcut``.

    For every incidence ``(v, e)`` two 2-paths X and Y are shared by both
    stages.  Each path is ``p0 - p1 - p2`` with the marked edge ``p0 p1``
    and marked endpoint ``p0``.  Stage 1 holds a 6-cycle per graph edge
    through its two Y paths and a ``4 deg(v)``-cycle per vertex through its
    X paths (ordered by edge index, joined by fresh connector vertices).
    Stage 2 holds a 6-cycle per incidence through its X and Y paths.  The
    connectors, isolated in stage 2, are closed into one extra cycle so the
    instance is spanning; with a single input edge there are only two of
    them and the "cycle" degenerates to one edge.

    The union graph is bipartite exactly when the input graph is: a 2-path
    keeps the colour of its ends, so all X paths of ``v`` share a colour,
    and the Y cycles and incidence cycles force different colours on the
    two ends of every input edge.

    Vertices of degree zero have no incidences and contribute nothing.
    """
    graph_edges = sorted({edge(int(u), int(v)) for u, v in edges})
    for u, v in graph_edges:
        if not (0 <= u < n and 0 <= v < n):
            raise ValueError(f"edge {(u, v)} outside [0, {n})")

    counter = iter(range(10**9))
    labels: Labels = {}
    stage1: set[Edge] = set()
    stage2: set[Edge] = set()
    xpath: dict[tuple[int, int], tuple[int, int, int]] = {}
    ypath: dict[tuple[int, int], tuple[int, int, int]] = {}

    def tag(v: int, e: Edge) -> str:
        return f"{v},{e[0]}-{e[1]}"

    for j, e in enumerate(graph_edges):
        for v in e:
            for paths, name in ((xpath, "x"), (ypath, "y")):
                p = (next(counter), next(counter), next(counter))
                paths[v, j] = p
                marked, unmarked = edge(p[0], p[1]), edge(p[1], p[2])
                stage1.update((marked, unmarked))
                stage2.update((marked, unmarked))
                labels[f"{name}[{tag(v, e)}]"] = marked
                labels[f"{name}~[{tag(v, e)}]"] = unmarked

    connectors: list[int] = []
    for j, (v, w) in enumerate(graph_edges):
        yv, yw = ypath[v, j], ypath[w, j]
        stage1.add(edge(yv[0], yw[2]))
        stage1.add(edge(yw[0], yv[2]))
    for v in range(n):
        incident = [j for j, e in enumerate(graph_edges) if v in e]
        d = len(incident)
        for pos, j in enumerate(incident):
            here, there = xpath[v, j], xpath[v, incident[(pos + 1) % d]]
            c = next(counter)
            connectors.append(c)
            stage1.add(edge(here[0], c))
            stage1.add(edge(c, there[2]))
    for (v, j), xp in sorted(xpath.items()):
        yp = ypath[v, j]
        stage2.add(edge(xp[0], yp[0]))
        stage2.add(edge(xp[2], yp[2]))

    total = next(counter)
    w_set = sorted(set(range(total)) - vertices_of(stage2))
    if w_set != sorted(connectors):
        raise AssertionError("vertices isolated in stage 2 should be exactly the connectors")
    if len(w_set) % 2:
        raise AssertionError("odd number of stage-2 isolated vertices")
    if any(u in w_set and v in w_set for u, v in stage1):
        raise AssertionError("stage-2 isolated vertices are not independent in stage 1")
    w_set = _closing_order(w_set, stage1 | stage2)
    if len(w_set) == 2:
        stage2.add(edge(*w_set))
    elif w_set:
        for a, b in zip(w_set, w_set[1:] + w_set[:1]):
            stage2.add(edge(a, b))

    g = TemporalGraph(total, (frozenset(stage1), frozenset(stage2)), name="maxcut-gadget",
                      meta={"source_n": n, "source_edges": [list(e) for e in graph_edges], "k": k})
    return MaxCutGadget(g, 3 * len(graph_edges) + k, labels)


def _closing_order(w_set: list[int], edges: set[Edge]) -> list[int]:
    """Order for the closing cycle that alternates colour classes when it can.

    This keeps the union bipartite whenever it is bipartite before closing
    and both classes hold the same number of connectors (true for every
    bipartite input graph).  Otherwise the sorted order is kept.
    """
    colour = two_colouring(edges)
    if colour is None:
        return w_set
    zeros = [w for w in w_set if colour[w] == 0]
    ones = [w for w in w_set if colour[w] == 1]
    if len(zeros) != len(ones):
        return w_set
    return [x for pair in zip(zeros, ones) for x in pair]


def is_disjoint_even_cycles(edges: Iterable[Edge], allow_single_edges: bool = False) -> bool:
    """Every component is an even cycle (optionally a lone edge, a degenerate 2-cycle)."""
    for verts, comp_edges in components(edges):
        if allow_single_edges and len(verts) == 2 and len(comp_edges) == 1:
            continue
        if len(verts) < 4 or len(verts) % 2 or len(comp_edges) != len(verts):
            return False
        degree = {x: 0 for x in verts}
        for u, v in comp_edges:
            degree[u] += 1
            degree[v] += 1
        if any(d != 2 for d in degree.values()):
            return False
    return True


def is_disjoint_two_paths(edges: Iterable[Edge]) -> bool:
    for verts, comp_edges in components(edges):
        if len(verts) != 3 or len(comp_edges) != 2:
            return False
    return True


# -- integrality-gap family --------------------------------------------------

@dataclass(frozen=True)
class LpGapGadget:
    graph: TemporalGraph
    labels: Labels
    k: int

    def a(self, i: int, j: int) -> int:
        return 2 * (i * (self.k + 1) + j)

    def b(self, i: int, j: int) -> int:
        return self.a(i, j) + 1

    def c(self, j: int) -> int:
        return 2 * (self.k + 1) ** 2 + j - 1

    def d(self, j: int) -> int:
        return 2 * (self.k + 1) ** 2 + self.k + j - 1

    def phi(self, i: int) -> int:
        return self.k - i + 1


def gen_lp_gap(k: int) -> LpGapGadget:
    """Two-stage instance with best profit 1 but LP value ``k + 1``.

    ``a[i,j] = 2((k+1)i + j)``, ``b[i,j] = a[i,j] + 1`` for ``i, j`` in
    ``0..k``; then ``c[1..k]`` and ``d[1..k]``.  Both stages are ``k + 1``
    interleaved paths over the shared edges ``a[i,j] b[i,j]``, chained
    together through the c and d vertices (stage 2 indexes them through
    ``phi(i) = k - i + 1`` so no chain edge is shared).
    """
    if k < 3:
        raise ValueError("the gap family needs k >= 3")
    gad = LpGapGadget(TemporalGraph(0, (frozenset(),)), {}, k)
    a, b, c, d, phi = gad.a, gad.b, gad.c, gad.d, gad.phi
    rng = range(k + 1)
    labels: Labels = {}
    shared = set()
    for i in rng:
        for j in rng:
            e = edge(a(i, j), b(i, j))
            shared.add(e)
            labels[f"shared[{i},{j}]"] = e
    e1, e2 = set(shared), set(shared)
    for i in range(1, k + 1):
        for j in rng:
            e1.add(edge(b(i - 1, j), a(i, j)))
    for i in rng:
        for j in range(1, k + 1):
            e2.add(edge(b(i, j - 1), a(i, j)))
    for j in range(1, k + 1):
        e1.update((edge(c(j), a(0, j - 1)), edge(c(j), a(0, j)), edge(b(k, j - 1), d(j)), edge(b(k, j), d(j))))
    for i in range(1, k + 1):
        p = phi(i)
        e2.update((edge(c(p), a(i - 1, 0)), edge(c(p), a(i, 0)), edge(b(i - 1, k), d(p)), edge(b(i, k), d(p))))
    for j in range(1, k + 1):
        labels[f"c[{j}]a[0,{j - 1}]"] = edge(c(j), a(0, j - 1))
        labels[f"c[{j}]a[0,{j}]"] = edge(c(j), a(0, j))
    n = 2 * (k + 1) ** 2 + 2 * k
    g = TemporalGraph(n, (frozenset(e1), frozenset(e2)), name=f"lp-gap-{k}", meta={"k": k})
    return LpGapGadget(g, labels, k)


def gen_lp_gap_fractional(k: int) -> dict:
    """Fractional LP point of value ``k + 1`` on ``gen_lp_gap(k)``.

    Keys are ``("x", stage, edge)`` and ``("z", edge)``; values are exact
    fractions.  Shared edges get ``1/(k+1)``, the other path edges the
    complement, and the chain edges climb in steps of ``1/(k+1)``.
    """
    gad = gen_lp_gap(k)
    a, b, c, d, phi = gad.a, gad.b, gad.c, gad.d, gad.phi
    lam = Fraction(1, k + 1)
    one = Fraction(1)
    x: dict = {}
    for i in range(k + 1):
        for j in range(k + 1):
            e = edge(a(i, j), b(i, j))
            x["x", 1, e] = x["x", 2, e] = x["z", e] = lam
    for i in range(1, k + 1):
        for j in range(k + 1):
            x["x", 1, edge(b(i - 1, j), a(i, j))] = one - lam
    for i in range(k + 1):
        for j in range(1, k + 1):
            x["x", 2, edge(b(i, j - 1), a(i, j))] = one - lam
    for j in range(1, k + 1):
        x["x", 1, edge(c(j), a(0, j - 1))] = one - j * lam
        x["x", 1, edge(c(j), a(0, j))] = j * lam
        x["x", 1, edge(d(j), b(k, j - 1))] = one - j * lam
        x["x", 1, edge(d(j), b(k, j))] = j * lam
    for i in range(1, k + 1):
        p = phi(i)
        x["x", 2, edge(c(p), a(i - 1, 0))] = one - i * lam
        x["x", 2, edge(c(p), a(i, 0))] = i * lam
        x["x", 2, edge(d(p), b(i - 1, k))] = one - i * lam
        x["x", 2, edge(d(p), b(i, k))] = i * lam
    return x


def lp_gap_paths(k: int) -> tuple[list[list[Edge]], list[list[Edge]]]:
    """The ``k + 1`` long paths of each stage, as edge lists in path order."""
    gad = gen_lp_gap(k)
    a, b = gad.a, gad.b
    first, second = [], []
    for j in range(k + 1):
        path = []
        for i in range(k + 1):
            if i:
                path.append(edge(b(i - 1, j), a(i, j)))
            path.append(edge(a(i, j), b(i, j)))
        first.append(path)
    for i in range(k + 1):
        path = []
        for j in range(k + 1):
            if j:
                path.append(edge(b(i, j - 1), a(i, j)))
            path.append(edge(a(i, j), b(i, j)))
        second.append(path)
    return first, second


# -- reuse counterexample -------------------------------------------------------

LEFT = dict(zip("abcdef", range(6)))
RIGHT = dict(zip("abcdef", range(6, 12)))


def _named(side: dict, names: str) -> set[Edge]:
    return {edge(side[p[0]], side[p[1]]) for p in names.split()}


GADGET_7 = "ac ce eb bd df fa cd"
CYCLE_6 = "ab bc cd de ef fa"


@dataclass(frozen=True)
class Counterexample:
    graph: TemporalGraph
    labels: Labels


def gen_counterexample() -> Counterexample:
    """Four-stage instance defeating the reuse-every-other-stage heuristic.

    Vertices ``a..f`` are 0..5 (left), ``a'..f'`` are 6..11 (right).
    Odd stages: left 7-edge gadget plus right 6-cycle; even stages: left
    6-cycle plus right 7-edge gadget.
    """
    odd = frozenset(_named(LEFT, GADGET_7) | _named(RIGHT, CYCLE_6))
    even = frozenset(_named(LEFT, CYCLE_6) | _named(RIGHT, GADGET_7))
    labels = {
        "e1": edge(LEFT["f"], LEFT["a"]),
        "e2": edge(LEFT["c"], LEFT["d"]),
        "e3": edge(RIGHT["f"], RIGHT["a"]),
        "e4": edge(RIGHT["c"], RIGHT["d"]),
        "f1": edge(LEFT["e"], LEFT["b"]),
        "f2": edge(RIGHT["e"], RIGHT["b"]),
    }
    return Counterexample(TemporalGraph(12, (odd, even, odd, even), name="counterexample"), labels)


def left_gadget_edges() -> frozenset:
    return frozenset(_named(LEFT, GADGET_7))


# -- small families ----------------------------------------------------------

def gen_two_cycles(k: int) -> TemporalGraph:
    """Two Hamilton ``k``-cycles sharing exactly the edge ``{0, 1}``.

    Stage 2 visits ``0, 1, 3, 5, ..., k-1, 2, 4, ..., k-2``.
    """
    if k % 2 or k < 6:
        raise ValueError(
            f"k must be even and at least 6, got {k}: two Hamilton cycles on 4 vertices "
            "always share two edges, and odd cycles have no perfect matching"
        )
    first = [edge(i, (i + 1) % k) for i in range(k)]
    order = [0, 1] + list(range(3, k, 2)) + list(range(2, k - 1, 2))
    second = [edge(order[i], order[(i + 1) % k]) for i in range(k)]
    g = TemporalGraph(k, (frozenset(first), frozenset(second)), name=f"two-cycles-{k}")
    if g.intersection(1) != {(0, 1)}:
        raise AssertionError("cycles must share exactly {0, 1}")
    return g


def gen_alternating(tau: int) -> TemporalGraph:
    """Four vertices; odd stages ``{01, 23}``, even stages ``{12, 03}``."""
    if tau < 2:
        raise ValueError("tau must be at least 2")
    odd = frozenset({(0, 1), (2, 3)})
    even = frozenset({(1, 2), (0, 3)})
    return TemporalGraph(4, tuple(odd if i % 2 else even for i in range(1, tau + 1)), name=f"alternating-{tau}")


def gen_random(n: int, tau: int, p: float, seed: int) -> TemporalGraph:
    """Random stages, each containing a planted perfect matching.

    Every pair ``u < v`` is added with probability ``p``; a shuffled
    pairing of all vertices is then added so every stage is matchable.
    """
    if n % 2 or n < 2:
        raise ValueError("n must be a positive even number")
    if tau < 1:
        raise ValueError("tau must be at least 1")
    if not 0 < p <= 1:
        raise ValueError("p must lie in (0, 1]")
    rng = random.Random(seed)
    stages = []
    for _ in range(tau):
        es = {(u, v) for u in range(n) for v in range(u + 1, n) if rng.random() < p}
        perm = list(range(n))
        rng.shuffle(perm)
        es.update(edge(perm[i], perm[i + 1]) for i in range(0, n, 2))
        stages.append(frozenset(es))
    return TemporalGraph(n, tuple(stages), name=f"random-n{n}-t{tau}-s{seed}",
                         meta={"n": n, "tau": tau, "p": p, "seed": seed})
