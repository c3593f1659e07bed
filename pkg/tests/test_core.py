import json

import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from multimatch.core import (
    InstanceFormatError,
    MultistageMatching,
    TemporalGraph,
    components,
    edge,
    is_bipartite,
    parse_instance,
    parse_solution,
    profit,
    serialize_instance,
    serialize_solution,
    union_cost,
    verify,
)
from multimatch.gadgets import gen_alternating, gen_counterexample, gen_random, gen_two_cycles


def test_parse_alternating_has_empty_intersection():
    g = parse_instance('{"n":4,"stages":[[[0,1],[2,3]],[[1,2],[3,0]]]}')
    assert g.tau == 2
    assert g.intersection(1) == frozenset()
    assert g.mu == 0
    assert (0, 3) in g.stage(2)


def test_parse_single_edge():
    g = parse_instance('{"n":2,"stages":[[[0,1]]]}')
    assert g.tau == 1
    assert g.stage(1) == {(0, 1)}
    assert g.is_spanning()


@pytest.mark.parametrize(
    "text, fragment",
    [
        ('{"n":3,"stages":[[[0,1],[1,1]]]}', "self-loop"),
        ('{"n":3,"stages":[[[0,3]]]}', "endpoint"),
        ('{"n":3,"stages":[[[0,1]],[[0,1],[1,0]]]}', "duplicate"),
        ('{"n":3', "JSON"),
        ('{"stages":[]}', "n"),
        ('{"n":2,"stages":[[[0]]]}', "two endpoints"),
    ],
)
def test_parse_rejects(text, fragment):
    with pytest.raises(InstanceFormatError) as info:
        parse_instance(text)
    assert fragment.lower() in str(info.value).lower()


def test_parse_error_names_stage():
    with pytest.raises(InstanceFormatError, match="stage 2"):
        parse_instance('{"n":3,"stages":[[[0,1]],[[2,2]]]}')


@pytest.mark.parametrize("g", [gen_alternating(2), gen_counterexample().graph, gen_two_cycles(8)])
def test_serialize_round_trip(g):
    assert parse_instance(serialize_instance(g)) == g


def test_serialize_sorted_and_deterministic():
    g = TemporalGraph.from_edge_lists(4, [[(3, 2), (1, 0)]])
    doc = json.loads(serialize_instance(g))
    assert doc["stages"] == [[[0, 1], [2, 3]]]
    assert serialize_instance(g) == serialize_instance(parse_instance(serialize_instance(g)))


@settings(max_examples=40, deadline=None)
@given(st.integers(1, 4).map(lambda h: 2 * h), st.integers(1, 4), st.floats(0.05, 1.0), st.integers(0, 10**6))
def test_round_trip_random(n, tau, p, seed):
    g = gen_random(n, tau, p, seed)
    assert parse_instance(serialize_instance(g)) == g


def test_profit_and_union_identical_matchings():
    m = frozenset({(0, 1), (2, 3), (4, 5)})
    sol = MultistageMatching((m, m))
    assert profit(sol) == 3
    assert union_cost(sol) == 3


def test_profit_disjoint():
    sol = MultistageMatching.of([[(0, 1), (2, 3)], [(1, 2), (0, 3)], [(0, 1), (2, 3)]])
    assert profit(sol) == 0
    assert union_cost(sol) == 8


def test_single_stage_objectives_are_zero():
    sol = MultistageMatching.of([[(0, 1)]])
    assert profit(sol) == 0
    assert union_cost(sol) == 0


def test_two_cycles_values():
    g = gen_two_cycles(6)
    with_shared = MultistageMatching.of([[(0, 1), (2, 3), (4, 5)], [(0, 1), (3, 5), (2, 4)]])
    avoiding = MultistageMatching.of([[(1, 2), (3, 4), (0, 5)], [(1, 3), (2, 5), (0, 4)]])
    assert verify(g, with_shared) and verify(g, avoiding)
    assert profit(with_shared) == 1 and union_cost(with_shared) == 5
    assert union_cost(avoiding) == 6


def test_verify_same_matching_twice():
    g = TemporalGraph.from_edge_lists(4, [[(0, 1), (2, 3), (1, 2)], [(0, 1), (2, 3)]])
    v = verify(g, MultistageMatching.of([[(0, 1), (2, 3)], [(0, 1), (2, 3)]]))
    assert v.feasible and v.profit == 2 and v.union_cost == 2


def test_verify_names_missing_edge():
    g = gen_alternating(2)
    v = verify(g, MultistageMatching.of([[(0, 1), (2, 3)], [(0, 1), (2, 3)]]))
    assert not v
    assert v.stage == 2
    assert "[0, 1]" in v.reason


def test_verify_uncovered_vertex():
    g = gen_alternating(2)
    v = verify(g, MultistageMatching.of([[(0, 1)], [(1, 2), (0, 3)]]))
    assert not v and v.stage == 1


def test_verify_stage_count_mismatch():
    with pytest.raises(ValueError):
        verify(gen_alternating(3), MultistageMatching.of([[(0, 1), (2, 3)]]))


def test_solution_round_trip():
    sol = MultistageMatching.of([[(1, 0), (2, 3)], [(1, 2), (0, 3)]])
    assert parse_solution(serialize_solution(sol)) == sol


def test_edge_canonical():
    assert edge(5, 2) == (2, 5)
    with pytest.raises(ValueError):
        edge(1, 1)


def test_graph_helpers():
    assert components([(0, 1), (2, 3), (1, 4)]) == [([0, 1, 4], [(0, 1), (1, 4)]), ([2, 3], [(2, 3)])]
    assert is_bipartite([(0, 1), (1, 2), (2, 3), (3, 0)])
    assert not is_bipartite([(0, 1), (1, 2), (0, 2)])
    g = gen_counterexample().graph
    assert g.stage_sizes() == [12] * 4


def test_mu_is_max_consecutive_intersection():
    g = TemporalGraph.from_edge_lists(4, [[(0, 1), (2, 3)], [(0, 1), (2, 3)], [(0, 1), (1, 2)]])
    assert [len(x) for x in g.transition_intersections()] == [2, 1]
    assert g.mu == 2
