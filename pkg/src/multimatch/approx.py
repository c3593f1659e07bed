"""Approximation algorithms for multistage perfect matching.

Every public solver returns a solution together with an a-priori guarantee
(:class:`~multimatch.report.CertifiedRatio`) stated in terms of ``mu``.
"""

from __future__ import annotations

import time
from dataclasses import dataclass, field
from typing import Callable, NamedTuple, Sequence

from .core import (
    Edge,
    InfeasibleInstanceError,
    MultistageMatching,
    TemporalGraph,
    Verdict,
    WeightedGraph,
    digest,
    edge,
    profit,
    union_cost,
    verify,
)
from .exact import MIM, MUM
from .matching import max_weight_perfect_matching, reduce
from .report import CertifiedRatio, SolveReport


class NotReducedError(ValueError):
    """An iteration of the two-stage algorithm found no new shared edge."""


class SubSolverError(RuntimeError):
    def __init__(self, transition: int, verdict: Verdict):
        super().__init__(f"two-stage solver returned an infeasible pair at transition {transition}: {verdict.reason}")
        self.transition = transition
        self.verdict = verdict


def _pm(edges, marked=(), stage: int | None = None) -> frozenset:
    m = max_weight_perfect_matching(WeightedGraph.indicator(edges, marked))
    if m is None:
        raise InfeasibleInstanceError(f"stage {stage} has no perfect matching", [stage] if stage else [])
    return m


def first_perfect_matching(edges, stage: int | None = None) -> frozenset:
    """The lexicographically smallest perfect matching (all weights zero)."""
    return _pm(edges, (), stage)


# -- two stages ----------------------------------------------------------------

class Alg1Result(NamedTuple):
    solution: MultistageMatching
    iterations: int


def approx_2im(g: TemporalGraph) -> Alg1Result:
    """Cover the shared edges with stage-1 matchings, best-respond in stage 2.

    Each round weights stage 1 by "shared and not yet covered", takes a
    maximum-weight perfect matching, answers it with the stage-2 perfect
    matching agreeing on the most edges, and keeps the best pair seen (a
    later pair wins ties).  Stops once every shared edge was covered, so an
    empty intersection ends after one round.
    """
    if g.tau != 2:
        raise ValueError(f"two-stage algorithm needs tau = 2, got {g.tau}")
    first, second = g.stages
    shared = first & second
    covered: set[Edge] = set()
    best: tuple[frozenset, frozenset] | None = None
    best_profit = -1
    rounds = 0
    while True:
        rounds += 1
        m1 = _pm(first, shared - covered, 1)
        m2 = _pm(second, m1, 2)
        if len(m1 & m2) >= best_profit:
            best, best_profit = (m1, m2), len(m1 & m2)
        fresh = (m1 & shared) - covered
        covered |= fresh
        if covered >= shared:
            return Alg1Result(MultistageMatching(best), rounds)
        if not fresh:
            raise NotReducedError(
                f"round {rounds} covered no new shared edge; {len(shared - covered)} remain uncoverable"
            )


@dataclass(frozen=True)
class TwoStageSolver:
    """A two-stage algorithm plus its guarantee as a function of ``mu``."""

    name: str
    solve: Callable[[TemporalGraph], Alg1Result]
    guarantee: Callable[[int], CertifiedRatio]


ALG1 = TwoStageSolver("alg1", approx_2im, lambda mu: CertifiedRatio.inv_sqrt(2 * mu))
# the same algorithm scored by union cost: an alpha-approximation for the
# intersection is a (2 - alpha)-approximation for the union
ALG1_UNION = TwoStageSolver("alg1-union", approx_2im, lambda mu: CertifiedRatio.affine(2, 1, 2 * mu))


# -- many stages -----------------------------------------------------------------

def path_max_weight_matching(w: Sequence[int]) -> tuple[list[int], int]:
    """Maximum-weight matching of a path with edge weights ``w``.

    Returns the chosen 1-based edge indices (never two consecutive) and the
    weight.  Edges of weight 0 are left out.
    """
    if any(x < 0 for x in w):
        raise ValueError("path weights must be non-negative")
    best = [0] * (len(w) + 1)
    for i, x in enumerate(w, start=1):
        best[i] = max(best[i - 1], (best[i - 2] if i >= 2 else 0) + x)
    chosen = []
    i = len(w)
    while i >= 1:
        take = (best[i - 2] if i >= 2 else 0) + w[i - 1]
        if take > best[i - 1]:
            chosen.append(i)
            i -= 2
        else:
            i -= 1
    return sorted(chosen), best[-1]


@dataclass(frozen=True)
class SequenceResult:
    solution: MultistageMatching
    weights: tuple[int, ...]
    chosen: tuple[int, ...]
    iterations: int
    pairs_changed_by_reduction: tuple[int, ...] = ()


def multistage_approx(g: TemporalGraph, sub: TwoStageSolver = ALG1, mode: str = MIM) -> SequenceResult:
    """Stitch two-stage solutions of consecutive pairs along a path matching.

    Pair ``i`` yields ``(S_i, T_i)`` for stages ``i, i+1``.  Start from
    ``(S_1, ..., S_{tau-1}, T_{tau-1})``, weight path edge ``i`` by how much
    pair ``i`` saves (``|S_i & T_i|``; in union mode the equal quantity
    ``(n_i + n_{i+1})/2 - |S_i | T_i|``), and install ``S_i, T_i`` for every
    transition in a maximum-weight path matching.

    Each pair is reduced on its own before the sub-solver sees it; on a
    reduced input that changes nothing.
    """
    if mode not in (MIM, MUM):
        raise ValueError(f"unknown mode {mode!r}")
    if g.tau == 1:
        return SequenceResult(MultistageMatching((first_perfect_matching(g.stages[0], 1),)), (), (), 0)
    sizes = g.stage_sizes()
    pairs, changed, rounds = [], [], 0
    for i in range(1, g.tau):
        raw = g.pair(i)
        pair = reduce(raw)
        if pair != raw:
            changed.append(i)
        sol, its = sub.solve(pair)
        rounds += its
        verdict = verify(raw, sol)
        if not verdict:
            raise SubSolverError(i, verdict)
        pairs.append((sol[0], sol[1]))
    if mode == MIM:
        weights = [len(s & t) for s, t in pairs]
    else:
        weights = [(sizes[i] + sizes[i + 1]) // 2 - len(s | t) for i, (s, t) in enumerate(pairs)]
    chosen, _ = path_max_weight_matching(weights)
    stages = [s for s, _ in pairs] + [pairs[-1][1]]
    for i in chosen:
        stages[i - 1], stages[i] = pairs[i - 1]
    return SequenceResult(MultistageMatching(tuple(stages)), tuple(weights), tuple(chosen), rounds, tuple(changed))


# -- reduction to two stages -------------------------------------------------------

@dataclass
class ReductionMap:
    """Bookkeeping of the many-to-two-stage construction.

    ``paths[i, e]`` are the seven edges of the subdivided copy of ``e`` from
    stage ``i`` (in path order); ``minus``/``plus`` are its 3rd and 5th edges.
    """

    source: TemporalGraph
    target: TemporalGraph
    parity: tuple[int, ...]
    paths: dict = field(default_factory=dict)
    minus: dict = field(default_factory=dict)
    plus: dict = field(default_factory=dict)
    identified: list = field(default_factory=list)

    def b(self, i: int) -> int:
        return self.parity[i - 1]

    @property
    def mu_prime(self) -> int:
        return len(self.identified)


def mim_to_2im_reduce(g: TemporalGraph) -> tuple[TemporalGraph, ReductionMap]:
    """Two-stage graph whose solutions correspond one-to-one to those of ``g``.

    Stage ``i`` is copied into target stage ``2 - (i mod 2)`` with every edge
    replaced by a 7-path.  For every edge kept from stage ``i`` to ``i + 1``
    the 5th edge of its stage-``i`` path is glued onto the 3rd edge of its
    stage-``(i+1)`` path; these glued edges are the only shared ones.
    """
    parent: list[int] = []

    def fresh() -> int:
        parent.append(len(parent))
        return len(parent) - 1

    def find(x: int) -> int:
        while parent[x] != x:
            parent[x] = parent[parent[x]]
            x = parent[x]
        return x

    def union(a: int, b: int) -> None:
        ra, rb = find(a), find(b)
        if ra != rb:
            parent[max(ra, rb)] = min(ra, rb)

    copies: dict[tuple[int, int], int] = {}
    raw_paths: dict[tuple[int, Edge], list[int]] = {}
    for i, stage in enumerate(g.stages, start=1):
        for e in sorted(stage):
            ends = []
            for v in e:
                if (i, v) not in copies:
                    copies[i, v] = fresh()
                ends.append(copies[i, v])
            raw_paths[i, e] = [ends[0]] + [fresh() for _ in range(6)] + [ends[1]]
    identified = []
    for i in range(1, g.tau):
        for e in sorted(g.intersection(i)):
            p, q = raw_paths[i, e], raw_paths[i + 1, e]
            union(p[4], q[2])
            union(p[5], q[3])
            identified.append((i, e))

    label: dict[int, int] = {}
    for x in range(len(parent)):
        r = find(x)
        if r not in label:
            label[r] = len(label)

    parity = tuple(2 - (i % 2) for i in range(1, g.tau + 1))
    out_stages: list[set[Edge]] = [set(), set()]
    rmap_paths, minus, plus = {}, {}, {}
    for (i, e), verts in raw_paths.items():
        mapped = [label[find(x)] for x in verts]
        es = tuple(edge(a, b) for a, b in zip(mapped, mapped[1:]))
        rmap_paths[i, e] = es
        minus[i, e], plus[i, e] = es[2], es[4]
        out_stages[parity[i - 1] - 1].update(es)
    target = TemporalGraph(len(label), (frozenset(out_stages[0]), frozenset(out_stages[1])),
                           name=f"{g.name or 'instance'}-two-stage")
    rmap = ReductionMap(g, target, parity, rmap_paths, minus, plus,
                        [(i, e, plus[i, e]) for i, e in identified])
    return target, rmap


def project_solution(rmap: ReductionMap, m: MultistageMatching) -> MultistageMatching:
    """Image of a solution of the source graph in the two-stage graph."""
    out: list[set[Edge]] = [set(), set()]
    for (i, e), es in rmap.paths.items():
        picked = es[0::2] if e in m[i - 1] else es[1::2]
        out[rmap.b(i) - 1].update(picked)
    return MultistageMatching((frozenset(out[0]), frozenset(out[1])))


def lift_solution(rmap: ReductionMap, m2: MultistageMatching) -> MultistageMatching:
    """Solution of the source graph taking ``e`` in stage ``i`` iff its 3rd path edge is matched."""
    verdict = verify(rmap.target, m2)
    if not verdict:
        raise ValueError(f"two-stage solution is infeasible: stage {verdict.stage}: {verdict.reason}")
    stages = []
    for i, stage in enumerate(rmap.source.stages, start=1):
        side = m2[rmap.b(i) - 1]
        stages.append(frozenset(e for e in stage if rmap.minus[i, e] in side))
    return MultistageMatching(tuple(stages))


class ReductionResult(NamedTuple):
    solution: MultistageMatching
    iterations: int
    mu_prime: int


def reduction_approx(g: TemporalGraph) -> ReductionResult:
    """Solve the two-stage image with the two-stage algorithm and pull back.

    Subdividing a stage can create forbidden edges (the even edges of the
    path of an edge present in every perfect matching), so the image is
    reduced first.
    """
    target, rmap = mim_to_2im_reduce(g)
    sol, rounds = approx_2im(reduce(target))
    return ReductionResult(lift_solution(rmap, sol), rounds, rmap.mu_prime)


# -- combined solvers --------------------------------------------------------------

def mim_radicand(g: TemporalGraph) -> int:
    """``r * mu`` with ``r = min(2(tau-1), 8)``: the better of the two routes."""
    if g.tau < 2:
        return 0
    return min(2 * (g.tau - 1), 8) * g.mu


def _report(g: TemporalGraph, method: str, objective: str, sol: MultistageMatching,
            ratio: CertifiedRatio | None, iterations: int, started: float, **notes) -> SolveReport:
    value = profit(sol) if objective == MIM else union_cost(sol)
    return SolveReport(method, objective, value, ratio, sol, iterations,
                       (time.perf_counter() - started) * 1000, digest(g), notes)


def alg2_report(g: TemporalGraph, objective: str = MIM) -> SolveReport:
    """Path-stitching with the two-stage algorithm, as a report."""
    started = time.perf_counter()
    mu = g.mu
    if objective == MIM:
        res = multistage_approx(g, ALG1, MIM)
        ratio = CertifiedRatio.inv_sqrt(2 * mu) if g.tau == 2 else CertifiedRatio.inv_sqrt(8 * mu)
    else:
        res = multistage_approx(g, ALG1_UNION, MUM)
        ratio = CertifiedRatio.affine(2, 1, 8 * mu)
    return _report(g, "alg2", objective, res.solution, ratio, res.iterations, started,
                   path_weights=list(res.weights), chosen=list(res.chosen),
                   pairs_rereduced=True, pairs_changed_by_reduction=list(res.pairs_changed_by_reduction))


def reduction_report(g: TemporalGraph, objective: str = MIM) -> SolveReport:
    started = time.perf_counter()
    res = reduction_approx(g)
    radicand = 2 * (g.tau - 1) * g.mu
    ratio = CertifiedRatio.inv_sqrt(radicand) if objective == MIM else CertifiedRatio.affine(2, 1, radicand)
    return _report(g, "reduction", objective, res.solution, ratio, res.iterations, started, mu_prime=res.mu_prime)


def alg1_report(g: TemporalGraph, objective: str = MIM) -> SolveReport:
    started = time.perf_counter()
    sol, rounds = approx_2im(g)
    guarantee = ALG1 if objective == MIM else ALG1_UNION
    return _report(g, "alg1", objective, sol, guarantee.guarantee(g.mu), rounds, started)


def best_mim(g: TemporalGraph) -> SolveReport:
    """The better of path stitching and the two-stage reduction.

    Guarantee ``profit >= OPT / sqrt(r mu)`` with ``r = min(2(tau-1), 8)``.
    """
    started = time.perf_counter()
    stitched = multistage_approx(g, ALG1, MIM)
    if g.tau < 2:
        return _report(g, "auto", MIM, stitched.solution, CertifiedRatio.inv_sqrt(0), 0, started, chosen="alg2")
    reduced = reduction_approx(g)
    p_stitch, p_red = profit(stitched.solution), profit(reduced.solution)
    if p_red > p_stitch:
        sol, rounds, which = reduced.solution, reduced.iterations, "reduction"
    else:
        sol, rounds, which = stitched.solution, stitched.iterations, "alg2"
    return _report(g, "auto", MIM, sol, CertifiedRatio.inv_sqrt(mim_radicand(g)), rounds, started,
                   chosen=which, alg2_profit=p_stitch, reduction_profit=p_red,
                   mu_prime=reduced.mu_prime, pairs_rereduced=True)


def mum_via_mim(g: TemporalGraph) -> SolveReport:
    """Cheaper union cost of the best intersection solution and union-mode stitching.

    The first is certified at ``2 - 1/sqrt(r mu)``, the second at
    ``1 + alpha/2`` with ``alpha = 2 - 1/sqrt(2 mu)``, i.e.
    ``2 - 1/sqrt(8 mu)``.  Both hold for the cheaper solution, so the
    tighter one (smaller radicand) is reported.
    """
    started = time.perf_counter()
    via_mim = best_mim(g).solution
    if g.tau < 2:
        return _report(g, "auto", MUM, via_mim, CertifiedRatio.affine(2, 1, 0), 0, started, chosen="mim")
    stitched = multistage_approx(g, ALG1_UNION, MUM)
    c_mim, c_stitch = union_cost(via_mim), union_cost(stitched.solution)
    if c_stitch < c_mim:
        sol, which = stitched.solution, "alg2-union"
    else:
        sol, which = via_mim, "mim"
    radicand = min(mim_radicand(g), 8 * g.mu)
    return _report(g, "auto", MUM, sol, CertifiedRatio.affine(2, 1, radicand), stitched.iterations, started,
                   chosen=which, mim_route_cost=c_mim, union_stitch_cost=c_stitch)


def trivial_mum(g: TemporalGraph, objective: str = MUM) -> SolveReport:
    """Independent lexicographically smallest perfect matching per stage (factor 2 for union cost)."""
    started = time.perf_counter()
    sol = MultistageMatching(tuple(first_perfect_matching(s, i) for i, s in enumerate(g.stages, start=1)))
    ratio = CertifiedRatio.affine(2, 0, 1) if objective == MUM else None
    return _report(g, "trivial", objective, sol, ratio, 0, started)


# -- the reuse heuristic --------------------------------------------------------------

@dataclass(frozen=True)
class FlawedResult:
    candidate_a: MultistageMatching
    candidate_b: MultistageMatching
    verdict_a: Verdict
    verdict_b: Verdict

    @property
    def solution(self) -> MultistageMatching | None:
        """The more profitable feasible candidate; None when both are infeasible."""
        feasible = [(v.profit, c) for c, v in ((self.candidate_a, self.verdict_a), (self.candidate_b, self.verdict_b)) if v]
        if not feasible:
            return None
        return max(feasible, key=lambda pc: pc[0])[1]


def flawed_maxmpm_heuristic(g: TemporalGraph) -> FlawedResult:
    """Reuse one matching over two consecutive stages, two offset ways.

    ``M_i`` maximises ``|M_i & E_{i+1}|`` in stage ``i``.  The candidates
    are ``(M_1, M_1, M_3, M_3)`` and ``(A_1, M_2, M_2, A_4)`` where ``A_i``
    is an arbitrary (here: the lexicographically smallest) perfect matching
    of stage ``i``.  Nothing guarantees either is feasible, so both come back
    with their verdicts.
    """
    if g.tau != 4:
        raise ValueError(f"the heuristic is defined for four stages, got {g.tau}")
    e = g.stages
    m = [_pm(e[i], e[i + 1], i + 1) for i in range(3)]
    a1 = first_perfect_matching(e[0], 1)
    a4 = first_perfect_matching(e[3], 4)
    cand_a = MultistageMatching((m[0], m[0], m[2], m[2]))
    cand_b = MultistageMatching((a1, m[1], m[1], a4))
    return FlawedResult(cand_a, cand_b, verify(g, cand_a), verify(g, cand_b))
