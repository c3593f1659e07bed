import itertools
import math
import random

import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from multimatch.approx import (
    ALG1_UNION,
    NotReducedError,
    SubSolverError,
    TwoStageSolver,
    approx_2im,
    best_mim,
    flawed_maxmpm_heuristic,
    lift_solution,
    mim_to_2im_reduce,
    multistage_approx,
    mum_via_mim,
    path_max_weight_matching,
    project_solution,
    reduction_approx,
    trivial_mum,
)
from multimatch.core import MultistageMatching, TemporalGraph, profit, union_cost, verify
from multimatch.exact import MIM, MUM, exact_solve
from multimatch.gadgets import gen_alternating, gen_counterexample, gen_random, gen_two_cycles
from multimatch.matching import reduce
from multimatch.report import CertifiedRatio


def reduced_random(seed, n_choices=(4, 6, 8), tau_range=(2, 4)):
    rng = random.Random(seed)
    return reduce(gen_random(rng.choice(n_choices), rng.randint(*tau_range), rng.uniform(0.2, 0.6), seed))


# -- certified ratios ------------------------------------------------------------

def test_inv_sqrt_holds_boundary():
    r = CertifiedRatio.inv_sqrt(16)
    assert r.holds(1, 4) and not r.holds(1, 5)
    assert r.ratio() == 0.25


def test_affine_holds_boundary():
    # 2 - 1/sqrt(4) = 1.5
    r = CertifiedRatio.affine(2, 1, 4)
    assert r.holds(15, 10) and not r.holds(16, 10)


def test_zero_radicand_means_optimal():
    assert CertifiedRatio.inv_sqrt(0).holds(3, 3)
    assert not CertifiedRatio.inv_sqrt(0).holds(2, 3)
    assert CertifiedRatio.affine(2, 1, 0).holds(5, 5)
    assert not CertifiedRatio.affine(2, 1, 0).holds(6, 5)


@settings(max_examples=200)
@given(st.integers(1, 500), st.integers(0, 200), st.integers(0, 200))
def test_holds_matches_float(radicand, value, opt):
    inv = CertifiedRatio.inv_sqrt(radicand)
    lhs, rhs = value * math.sqrt(radicand), opt
    if abs(lhs - rhs) > 1e-6:
        assert inv.holds(value, opt) == (lhs >= rhs)
    aff = CertifiedRatio.affine(2, 1, radicand)
    bound = (2 - 1 / math.sqrt(radicand)) * opt
    if abs(value - bound) > 1e-6:
        assert aff.holds(value, opt) == (value <= bound)


# -- two stages ------------------------------------------------------------------

def test_two_cycles_alg1_is_optimal():
    sol, rounds = approx_2im(gen_two_cycles(6))
    assert profit(sol) == 1
    assert rounds <= 1


def test_alternating_alg1_one_round():
    sol, rounds = approx_2im(gen_alternating(2))
    assert profit(sol) == 0 and rounds == 1


def test_alg1_needs_two_stages():
    with pytest.raises(ValueError):
        approx_2im(gen_alternating(3))


def test_alg1_detects_unreduced_input():
    # the shared edge 1-2 lies in no perfect matching of stage 1
    g = TemporalGraph.from_edge_lists(4, [[(0, 1), (1, 2), (2, 3)], [(0, 3), (1, 2)]])
    with pytest.raises(NotReducedError):
        approx_2im(g)


@settings(max_examples=60, deadline=None)
@given(st.integers(0, 10**9))
def test_alg1_ratio(seed):
    g = reduced_random(seed, (4, 6, 8, 10), (2, 2))
    sol, rounds = approx_2im(g)
    assert verify(g, sol)
    opt = exact_solve(g, MIM).value
    assert CertifiedRatio.inv_sqrt(2 * g.mu).holds(profit(sol), opt)
    assert rounds <= max(g.mu, 1)
    if g.mu:
        assert profit(sol) >= 1


# -- path matching ---------------------------------------------------------------

@pytest.mark.parametrize("w, idx, weight", [([5], [1], 5), ([3, 1, 2], [1, 3], 5), ([1, 5, 1], [2], 5), ([], [], 0)])
def test_path_matching_examples(w, idx, weight):
    assert path_max_weight_matching(w) == (idx, weight)


def test_path_matching_rejects_negative():
    with pytest.raises(ValueError):
        path_max_weight_matching([1, -1])


@given(st.lists(st.integers(0, 20), max_size=10))
def test_path_matching_brute_force(w):
    idx, weight = path_max_weight_matching(w)
    assert all(b - a > 1 for a, b in zip(idx, idx[1:]))
    assert sum(w[i - 1] for i in idx) == weight
    best = 0
    for r in range(len(w) + 1):
        for combo in itertools.combinations(range(len(w)), r):
            if all(b - a > 1 for a, b in zip(combo, combo[1:])):
                best = max(best, sum(w[i] for i in combo))
    assert weight == best


# -- many stages -----------------------------------------------------------------

def test_multistage_two_stages_equals_sub():
    g = reduce(gen_random(8, 2, 0.5, seed=4))
    assert multistage_approx(g).solution == approx_2im(g).solution


def test_multistage_counterexample_bound():
    g = gen_counterexample().graph
    res = multistage_approx(g)
    assert verify(g, res.solution)
    assert profit(res.solution) >= math.ceil(6 / math.sqrt(8 * g.mu)) == 2


def test_multistage_single_stage():
    g = TemporalGraph.from_edge_lists(2, [[(0, 1)]])
    res = multistage_approx(g)
    assert res.solution == MultistageMatching.of([[(0, 1)]])


def test_multistage_flags_rereduced_pairs():
    # 1-2 is in no perfect matching of stage 2; both pairs touching it get reduced
    g = TemporalGraph.from_edge_lists(4, [[(0, 1), (2, 3)], [(0, 1), (1, 2), (2, 3)], [(0, 1), (2, 3)]])
    res = multistage_approx(g)
    assert res.pairs_changed_by_reduction == (1, 2)
    assert verify(g, res.solution)
    assert profit(res.solution) == 4


def test_multistage_sub_solver_failure():
    bad = TwoStageSolver("bad", lambda g: (MultistageMatching((frozenset(), frozenset())), 0),
                         lambda mu: CertifiedRatio.inv_sqrt(mu))
    with pytest.raises(SubSolverError) as info:
        multistage_approx(gen_alternating(3), bad)
    assert info.value.transition == 1


def test_multistage_unknown_mode():
    with pytest.raises(ValueError):
        multistage_approx(gen_alternating(2), mode="max")


@settings(max_examples=40, deadline=None)
@given(st.integers(0, 10**9))
def test_multistage_ratio(seed):
    g = reduced_random(seed)
    sol = multistage_approx(g).solution
    assert verify(g, sol)
    assert CertifiedRatio.inv_sqrt(8 * g.mu).holds(profit(sol), exact_solve(g, MIM).value)


@settings(max_examples=40, deadline=None)
@given(st.integers(0, 10**9))
def test_multistage_union_mode_ratio(seed):
    g = reduced_random(seed)
    sol = multistage_approx(g, ALG1_UNION, MUM).solution
    assert verify(g, sol)
    assert CertifiedRatio.affine(2, 1, 8 * g.mu).holds(union_cost(sol), exact_solve(g, MUM).value)


# -- reduction to two stages -----------------------------------------------------------

def test_reduction_counts_identifications():
    g = gen_counterexample().graph
    target, rmap = mim_to_2im_reduce(g)
    assert rmap.mu_prime == 12 == len(target.intersection(1))


def test_reduction_two_stage_mu_prime():
    g = gen_two_cycles(6)
    target, rmap = mim_to_2im_reduce(g)
    assert rmap.mu_prime == 1 == len(target.intersection(1))
    assert rmap.parity == (1, 2)


def test_reduction_single_stage():
    target, rmap = mim_to_2im_reduce(TemporalGraph.from_edge_lists(2, [[(0, 1)]]))
    assert target.stage(2) == frozenset()
    assert rmap.mu_prime == 0


def test_reduction_paths_are_seven_edges():
    g = gen_two_cycles(6)
    _, rmap = mim_to_2im_reduce(g)
    for (i, e), es in rmap.paths.items():
        assert len(es) == 7
        assert rmap.minus[i, e] == es[2] and rmap.plus[i, e] == es[4]


@settings(max_examples=25, deadline=None)
@given(st.integers(0, 10**9))
def test_reduction_preserves_optimum_and_round_trips(seed):
    g = reduced_random(seed, (2, 4, 6), (1, 3))
    target, rmap = mim_to_2im_reduce(g)
    assert rmap.mu_prime == sum(len(x) for x in g.transition_intersections()) == len(target.intersection(1))
    opt = exact_solve(g, MIM)
    image = project_solution(rmap, opt.solution)
    assert verify(target, image)
    assert profit(image) == opt.value
    assert lift_solution(rmap, image) == opt.solution
    opt2 = exact_solve(target, MIM)
    assert opt2.value == opt.value
    lifted = lift_solution(rmap, opt2.solution)
    assert verify(g, lifted) and profit(lifted) == opt.value


def test_lift_rejects_infeasible():
    g = gen_two_cycles(6)
    target, rmap = mim_to_2im_reduce(g)
    with pytest.raises(ValueError):
        lift_solution(rmap, MultistageMatching((frozenset(), frozenset())))


@settings(max_examples=25, deadline=None)
@given(st.integers(0, 10**9))
def test_reduction_approx_ratio(seed):
    g = reduced_random(seed, (4, 6), (2, 3))
    res = reduction_approx(g)
    assert verify(g, res.solution)
    radicand = 2 * (g.tau - 1) * g.mu
    assert CertifiedRatio.inv_sqrt(radicand).holds(profit(res.solution), exact_solve(g, MIM).value)


# -- combined solvers ------------------------------------------------------------------

@pytest.mark.parametrize("tau, factor", [(2, 2), (3, 4), (4, 6), (5, 8), (6, 8)])
def test_best_mim_radicand(tau, factor):
    g = gen_random(4, tau, 0.6, seed=tau)
    g = reduce(g)
    rep = best_mim(g)
    assert rep.certified_ratio.kind == "inv_sqrt"
    assert rep.certified_ratio.radicand == factor * g.mu


def test_mum_via_mim_two_cycles():
    rep = mum_via_mim(gen_two_cycles(6))
    assert rep.value == 5
    assert (0, 1) in rep.solution[0] and (0, 1) in rep.solution[1]


@settings(max_examples=30, deadline=None)
@given(st.integers(0, 10**9))
def test_mum_via_mim_bounds(seed):
    g = reduced_random(seed)
    rep = mum_via_mim(g)
    assert verify(g, rep.solution)
    sizes = g.stage_sizes()
    assert rep.value <= sum((sizes[i] + sizes[i + 1]) // 2 for i in range(g.tau - 1))
    r = min(2 * (g.tau - 1), 8)
    assert CertifiedRatio.affine(2, 1, r * g.mu).holds(rep.value, exact_solve(g, MUM).value)


def test_trivial_mum():
    rep = trivial_mum(gen_two_cycles(6))
    assert rep.value <= 6 <= 2 * 5
    assert rep.certified_ratio.ratio() == 2
    assert trivial_mum(TemporalGraph.from_edge_lists(2, [[(0, 1)]])).value == 0


def test_trivial_mum_no_reuse_on_identical_stages():
    stage = [(0, 1), (1, 2), (2, 3), (0, 3)]
    g = TemporalGraph.from_edge_lists(4, [stage, stage])
    rep = trivial_mum(g)
    assert rep.certified_ratio == CertifiedRatio.affine(2, 0, 1)


def test_report_json_value_from_solution():
    rep = best_mim(gen_counterexample().graph)
    doc = rep.to_json()
    assert doc["value"] == profit(rep.solution)
    assert doc["certified_ratio"]["kind"] == "inv_sqrt"
    assert set(doc) >= {"method", "objective", "value", "certified_ratio", "solution", "iterations", "runtime_ms"}
    assert doc["notes"]["pairs_rereduced"] is True


# -- reuse heuristic ----------------------------------------------------------------------

def test_flawed_on_counterexample():
    res = flawed_maxmpm_heuristic(gen_counterexample().graph)
    assert not res.verdict_a and not res.verdict_b
    assert res.solution is None


def test_flawed_on_identical_stages():
    stage = [(0, 1), (1, 2), (2, 3), (0, 3)]
    g = TemporalGraph.from_edge_lists(4, [stage] * 4)
    res = flawed_maxmpm_heuristic(g)
    assert res.verdict_a and res.verdict_a.profit == 3 * 2


def test_flawed_on_disjoint_stages():
    g = gen_alternating(4)
    res = flawed_maxmpm_heuristic(g)
    assert not res.verdict_a and not res.verdict_b


def test_flawed_needs_four_stages():
    with pytest.raises(ValueError):
        flawed_maxmpm_heuristic(gen_alternating(3))
