"""Decoding solver output into deployments and re-checking claimed objectives."""

import pytest
from helpers import assign, make_instance, make_task, seg_cpu, seg_opt

from hetsched.milp import build_milp
from hetsched.milp.decode import SolutionDecodeError, decode_assignment, verify_solution
from hetsched.model import ChainSpec


@pytest.fixture
def two_task():
    t1 = make_task("t1", 10_000, [seg_cpu(2_000)])
    t2 = make_task("t2", 20_000, [seg_opt(6_000, 500, 500, 3_000)])
    return make_instance([t1, t2], chains=[ChainSpec(id="c", tasks=("t1", "t2"))])


@pytest.fixture
def model(two_task):
    return build_milp(two_task, "rr", "minmax-lat")


def _values(core=(0, 1), prio=(2, 1), accel=False):
    v = {}
    for i, k in enumerate(core):
        v[f"x_t{i}_k{k}"] = 1.0
    for i, p in enumerate(prio):
        v[f"pr_t{i}_p{p}"] = 1.0
    v["a_t1_j0"] = 1.0 if accel else 0.0
    return v


def test_decode_reads_mapping_priorities_and_acceleration(model):
    asg = decode_assignment(model, _values(accel=True))
    assert asg.core_of == {"t1": "c0", "t2": "c1"}
    assert asg.priority_of == {"t1": 2, "t2": 1}
    assert asg.accelerated_of("t1") == frozenset()
    assert asg.accelerated_of("t2") == frozenset({0})


def test_decode_tolerates_solver_noise(model):
    vals = _values()
    vals["x_t0_k0"] = 0.99999
    vals["x_t0_k1"] = 1.2e-5
    asg = decode_assignment(model, vals)
    assert asg.core_of["t1"] == "c0"


def test_decode_rejects_fractional_binaries(model):
    vals = _values()
    vals["x_t0_k0"] = 0.4
    with pytest.raises(SolutionDecodeError, match="not integral"):
        decode_assignment(model, vals)


def test_decode_rejects_task_on_two_cores(model):
    vals = _values()
    vals["x_t0_k1"] = 1.0
    with pytest.raises(SolutionDecodeError, match="2 cores"):
        decode_assignment(model, vals)


def test_decode_rejects_unmapped_task(model):
    vals = _values()
    del vals["x_t1_k1"]
    with pytest.raises(SolutionDecodeError, match="0 cores"):
        decode_assignment(model, vals)


def test_decode_rejects_duplicate_priorities(model):
    vals = _values(prio=(1, 1))
    with pytest.raises(SolutionDecodeError, match="permutation"):
        decode_assignment(model, vals)


def test_verify_accepts_honest_claim(two_task):
    asg = assign({"t1": "c0", "t2": "c1"}, {"t1": 2, "t2": 1})
    # Chain latency: R(t1)=2000, then R(t2)=6000 plus t2's period.
    res = verify_solution(two_task, asg, "rr", "minmax-lat", claimed=28_000.0)
    assert res.ok and res.schedulable
    assert res.objective == 28_000
    assert res.report.task("t2").wcrt_us == 6_000


def test_verify_accepts_slightly_worse_claim(two_task):
    asg = assign({"t1": "c0", "t2": "c1"}, {"t1": 2, "t2": 1})
    res = verify_solution(two_task, asg, "rr", "minmax-lat", claimed=28_500.0)
    assert res.ok  # solver stopped early with a loose bound: still sound


def test_verify_flags_overly_optimistic_claim(two_task):
    asg = assign({"t1": "c0", "t2": "c1"}, {"t1": 2, "t2": 1})
    res = verify_solution(two_task, asg, "rr", "minmax-lat", claimed=27_000.0)
    assert not res.ok
    assert res.schedulable
    assert "claimed 27000.0" in res.message


def test_verify_flags_unschedulable_deployment():
    t1 = make_task("t1", 10_000, [seg_cpu(6_000)])
    t2 = make_task("t2", 10_000, [seg_cpu(6_000)])
    inst = make_instance([t1, t2], chains=[ChainSpec(id="c", tasks=("t1", "t2"))])
    asg = assign({"t1": "c0", "t2": "c0"}, {"t1": 2, "t2": 1})
    res = verify_solution(inst, asg, "rr", "minmax-lat")
    assert not res.ok
    assert not res.schedulable
    assert res.objective is None
    assert "schedulability" in res.message


def test_verify_rejects_invalid_deployment(two_task):
    asg = assign({"t1": "c0", "t2": "c9"}, {"t1": 2, "t2": 1})
    with pytest.raises(SolutionDecodeError, match="invalid"):
        verify_solution(two_task, asg, "rr", "minmax-lat")
