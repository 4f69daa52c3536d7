"""Exhaustive deployment search.

Walks every (mapping, priority order, acceleration choice) combination and
evaluates each with the conservative analysis.  Exponential, so only usable
on small instances; its value is being an independent reference the MILP
route can be checked against.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from fractions import Fraction
from itertools import permutations, product
from typing import Iterator

from hetsched.analysis import CONSERVATIVE, analyze, evaluate_objective
from hetsched.model import Assignment, ModelError, ProblemInstance


def search_space_size(inst: ProblemInstance) -> int:
    """Number of deployments :func:`enumerate_assignments` would yield."""
    n = len(inst.tasks)
    m = len(inst.platform.cores)
    optional = sum(
        len(set(t.accelerable_segments()) - set(t.forced_segments())) for t in inst.tasks
    )
    return m**n * math.factorial(n) * 2**optional


def enumerate_assignments(inst: ProblemInstance) -> Iterator[Assignment]:
    """Yield every deployment, in a fixed lexicographic order.

    Order: core vectors first (task-major, core order as declared), then
    priority permutations, then acceleration subsets.  Segments that only
    exist in accelerated form are always accelerated.
    """
    ids = [t.id for t in inst.tasks]
    cores = [c.id for c in inst.platform.cores]
    forced = {t.id: frozenset(t.forced_segments()) for t in inst.tasks}
    optional = [
        (t.id, j)
        for t in inst.tasks
        for j in t.accelerable_segments()
        if j not in forced[t.id]
    ]
    for core_vec in product(cores, repeat=len(ids)):
        for perm in permutations(range(1, len(ids) + 1)):
            for bits in product((False, True), repeat=len(optional)):
                accel = {tid: set(fixed) for tid, fixed in forced.items()}
                for (tid, j), on in zip(optional, bits):
                    if on:
                        accel[tid].add(j)
                yield Assignment(
                    core_of=dict(zip(ids, core_vec)),
                    priority_of=dict(zip(ids, perm)),
                    accelerated={tid: frozenset(s) for tid, s in accel.items()},
                )


@dataclass(frozen=True)
class SearchResult:
    objective: Fraction | None  # None if no deployment is schedulable
    assignment: Assignment | None
    evaluated: int
    feasible: int


def best_assignment(
    inst: ProblemInstance,
    policy: str,
    objective: str,
    limit: int = 1_000_000,
) -> SearchResult:
    """Return the best deployment by brute force (ties: first in order)."""
    size = search_space_size(inst)
    if size > limit:
        raise ModelError(
            f"search space holds {size} deployments, above the limit of {limit}"
        )
    best_value: Fraction | None = None
    best: Assignment | None = None
    evaluated = 0
    feasible = 0
    for cand in enumerate_assignments(inst):
        evaluated += 1
        report = analyze(inst, cand, policy, mode=CONSERVATIVE)
        value = evaluate_objective(report, objective)
        if value is None:
            continue
        feasible += 1
        if best_value is None or value < best_value:
            best_value, best = value, cand
    return SearchResult(
        objective=best_value, assignment=best, evaluated=evaluated, feasible=feasible
    )
