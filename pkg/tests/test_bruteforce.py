"""Exhaustive search: enumeration order, counting, and agreement with the MILP."""

import pytest
from helpers import make_instance, make_task, seg_cpu, seg_hwa, seg_opt

from hetsched.bruteforce import best_assignment, enumerate_assignments, search_space_size
from hetsched.milp import optimize
from hetsched.model import ChainSpec, ModelError, validate_assignment


@pytest.fixture
def duo():
    t1 = make_task("t1", 10_000, [seg_cpu(4_000)])
    t2 = make_task("t2", 20_000, [seg_opt(9_000, 1_000, 500, 4_000)])
    return make_instance([t1, t2], chains=[ChainSpec(id="c", tasks=("t1", "t2"))])


def test_search_space_counts_cores_priorities_and_acceleration(duo):
    # 2 cores^2 tasks * 2! priorities * 2^1 optional acceleration
    assert search_space_size(duo) == 16
    cands = list(enumerate_assignments(duo))
    assert len(cands) == 16
    assert len({(tuple(sorted(c.core_of.items())), tuple(sorted(c.priority_of.items())),
                 tuple(sorted((t, tuple(sorted(s))) for t, s in c.accelerated.items())))
                for c in cands}) == 16


def test_enumeration_is_deterministic_and_valid(duo):
    first = next(enumerate_assignments(duo))
    assert first.core_of == {"t1": "c0", "t2": "c0"}
    assert first.priority_of == {"t1": 1, "t2": 2}
    assert first.accelerated_of("t2") == frozenset()
    for cand in enumerate_assignments(duo):
        assert validate_assignment(duo, cand) == []


def test_forced_segments_stay_accelerated():
    t = make_task("t", 50_000, [seg_hwa(300, 200, 9_000)])
    inst = make_instance([t], n_cores=1)
    cands = list(enumerate_assignments(inst))
    assert len(cands) == 1
    assert cands[0].accelerated_of("t") == frozenset({0})


def test_limit_guards_against_exponential_blowup(duo):
    with pytest.raises(ModelError, match="limit"):
        best_assignment(duo, "rr", "minmax-lat", limit=10)


def test_finds_the_known_optimum(duo):
    res = best_assignment(duo, "rr", "minmax-lat")
    assert res.objective == 29_500
    assert res.evaluated == 16
    assert 0 < res.feasible < 16
    assert res.assignment.accelerated_of("t2") == frozenset({0})
    assert res.assignment.core_of["t1"] != res.assignment.core_of["t2"]


def test_agrees_with_the_milp_route(duo):
    for policy in ("rr", "npfp", "nocontention"):
        for objective in ("minmax-lat", "minsum-lat", "minmax-rt", "minsum-rt"):
            milp = optimize(duo, policy, objective)
            brute = best_assignment(duo, policy, objective)
            assert milp.ok
            assert milp.objective == brute.objective, (policy, objective)


def test_reports_when_nothing_is_schedulable():
    t = make_task("t", 10_000, [seg_cpu(12_000)])
    inst = make_instance([t])
    res = best_assignment(inst, "rr", "minmax-rt")
    assert res.objective is None
    assert res.assignment is None
    assert res.feasible == 0
    assert res.evaluated == 2


def test_ties_resolve_to_the_first_candidate():
    t = make_task("t", 10_000, [seg_cpu(1_000)])
    inst = make_instance([t], n_cores=2)
    res = best_assignment(inst, "rr", "minmax-rt")
    assert res.assignment.core_of["t"] == "c0"  # both cores tie; first wins
