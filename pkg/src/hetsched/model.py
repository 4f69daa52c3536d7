"""Problem model: platform, tasks, segments, chains, and deployment assignments.

All times are integer microseconds.  Tasks are sporadic/periodic with
constrained deadlines (deadline <= period) and consist of an ordered list of
segments.  A segment either always runs on the CPU, always runs on the
hardware accelerator, or may run on either (the optimizer decides).  Running a
segment on the accelerator replaces its CPU execution with an offload phase on
the core, a processing phase on the accelerator (during which the task
self-suspends), and a finalization phase back on the core.
"""

from __future__ import annotations

import enum
import json
import math
from dataclasses import dataclass, field
from fractions import Fraction
from typing import Iterable, Mapping


class ImplType(enum.Enum):
    """Where a segment is allowed to execute."""

    CPU = "cpu"
    HWA = "hwa"
    CPU_HWA = "cpu_hwa"

    @property
    def may_accelerate(self) -> bool:
        return self is not ImplType.CPU

    @property
    def must_accelerate(self) -> bool:
        return self is ImplType.HWA


@dataclass(frozen=True)
class Core:
    id: str
    type: str


@dataclass(frozen=True)
class PlatformSpec:
    """A heterogeneous multicore with an optional single accelerator."""

    core_types: tuple[str, ...]
    cores: tuple[Core, ...]
    accelerator: bool = True


@dataclass(frozen=True)
class SegmentSpec:
    """One segment of a task.

    WCET tables are keyed by core type.  ``exec_us`` is the CPU-only
    execution budget; ``offload_us``/``finalize_us`` are the CPU-side costs
    around an accelerated run and ``accel_us`` the processing time on the
    accelerator itself.  Tables that do not apply to the segment's
    implementation type must be left empty.
    """

    impl: ImplType
    exec_us: Mapping[str, int] = field(default_factory=dict)
    offload_us: Mapping[str, int] = field(default_factory=dict)
    finalize_us: Mapping[str, int] = field(default_factory=dict)
    accel_us: int | None = None

    def __post_init__(self):
        # Normalize the mappings to plain dicts so equality and json
        # round-trips behave predictably.
        object.__setattr__(self, "exec_us", dict(self.exec_us))
        object.__setattr__(self, "offload_us", dict(self.offload_us))
        object.__setattr__(self, "finalize_us", dict(self.finalize_us))

    def cpu_wcet(self, core_type: str, accelerated: bool) -> int:
        """CPU-side budget of this segment on a core of ``core_type``."""
        if accelerated:
            return self.offload_us[core_type] + self.finalize_us[core_type]
        return self.exec_us[core_type]


@dataclass(frozen=True)
class TaskSpec:
    id: str
    period_us: int
    deadline_us: int
    segments: tuple[SegmentSpec, ...] = ()

    def __post_init__(self):
        object.__setattr__(self, "segments", tuple(self.segments))

    def accelerable_segments(self) -> list[int]:
        """Indices of segments the optimizer may (or must) accelerate."""
        return [j for j, s in enumerate(self.segments) if s.impl.may_accelerate]

    def forced_segments(self) -> list[int]:
        """Indices of segments that can only run on the accelerator."""
        return [j for j, s in enumerate(self.segments) if s.impl.must_accelerate]


@dataclass(frozen=True)
class ChainSpec:
    """A cause-effect chain: an ordered list of task ids."""

    id: str
    tasks: tuple[str, ...]

    def __post_init__(self):
        object.__setattr__(self, "tasks", tuple(self.tasks))


@dataclass(frozen=True)
class ProblemInstance:
    platform: PlatformSpec
    tasks: tuple[TaskSpec, ...]
    chains: tuple[ChainSpec, ...] = ()

    def __post_init__(self):
        object.__setattr__(self, "tasks", tuple(self.tasks))
        object.__setattr__(self, "chains", tuple(self.chains))

    def task(self, task_id: str) -> TaskSpec:
        for t in self.tasks:
            if t.id == task_id:
                return t
        raise KeyError(task_id)

    def core(self, core_id: str) -> Core:
        for c in self.platform.cores:
            if c.id == core_id:
                return c
        raise KeyError(core_id)


@dataclass(frozen=True)
class Assignment:
    """A complete deployment decision.

    ``priority_of`` maps each task to a unique integer priority; a *larger*
    value means *higher* priority.  ``accelerated`` maps task id to the set of
    segment indices that run on the accelerator.
    """

    core_of: Mapping[str, str]
    priority_of: Mapping[str, int]
    accelerated: Mapping[str, frozenset[int]]

    def __post_init__(self):
        object.__setattr__(self, "core_of", dict(self.core_of))
        object.__setattr__(self, "priority_of", dict(self.priority_of))
        object.__setattr__(
            self,
            "accelerated",
            {t: frozenset(v) for t, v in self.accelerated.items()},
        )

    def accelerated_of(self, task_id: str) -> frozenset[int]:
        return self.accelerated.get(task_id, frozenset())

    def is_accelerated(self, task_id: str, segment_index: int) -> bool:
        return segment_index in self.accelerated_of(task_id)


class ModelError(ValueError):
    """Raised for malformed documents or invalid operation arguments."""


@dataclass(frozen=True)
class Violation:
    """A single validation finding, addressed by a json-pointer-ish path."""

    path: str
    message: str

    def __str__(self) -> str:  # pragma: no cover - cosmetic
        return f"{self.path}: {self.message}"


# ---------------------------------------------------------------------------
# Validation
# ---------------------------------------------------------------------------


def _check_wcet_table(
    table: Mapping[str, int], core_types: Iterable[str], path: str, out: list[Violation]
):
    types = set(core_types)
    for k, v in table.items():
        if k not in types:
            out.append(Violation(f"{path}.{k}", f"unknown core type {k!r}"))
        if not isinstance(v, int) or isinstance(v, bool) or v < 0:
            out.append(Violation(f"{path}.{k}", "WCET must be a non-negative integer"))
    missing = types - set(table)
    for k in sorted(missing):
        out.append(Violation(path, f"missing WCET for core type {k!r}"))


def validate_instance(inst: ProblemInstance) -> list[Violation]:
    """Check structural invariants; returns an empty list for a valid instance.

    Violations are returned as data (path + message) rather than raised so a
    caller can report all of them at once.
    """
    out: list[Violation] = []
    plat = inst.platform

    if not plat.core_types:
        out.append(Violation("platform.core_types", "at least one core type required"))
    if len(set(plat.core_types)) != len(plat.core_types):
        out.append(Violation("platform.core_types", "duplicate core type"))
    if not plat.cores:
        out.append(Violation("platform.cores", "at least one core required"))
    seen_cores: set[str] = set()
    for idx, core in enumerate(plat.cores):
        if core.id in seen_cores:
            out.append(Violation(f"platform.cores[{idx}]", f"duplicate core id {core.id!r}"))
        seen_cores.add(core.id)
        if core.type not in plat.core_types:
            out.append(
                Violation(f"platform.cores[{idx}].type", f"undeclared core type {core.type!r}")
            )

    seen_tasks: set[str] = set()
    for ti, task in enumerate(inst.tasks):
        tpath = f"tasks[{ti}]"
        if task.id in seen_tasks:
            out.append(Violation(tpath, f"duplicate task id {task.id!r}"))
        seen_tasks.add(task.id)
        if task.period_us <= 0:
            out.append(Violation(f"{tpath}.period_us", "period must be positive"))
        if not (0 < task.deadline_us <= task.period_us):
            out.append(
                Violation(
                    f"{tpath}.deadline_us",
                    "deadline must satisfy 0 < deadline <= period",
                )
            )
        if not task.segments:
            out.append(Violation(f"{tpath}.segments", "task needs at least one segment"))
        for si, seg in enumerate(task.segments):
            spath = f"{tpath}.segments[{si}]"
            needs_cpu = seg.impl in (ImplType.CPU, ImplType.CPU_HWA)
            needs_acc = seg.impl.may_accelerate
            if needs_cpu:
                _check_wcet_table(seg.exec_us, plat.core_types, f"{spath}.exec_us", out)
            elif seg.exec_us:
                out.append(
                    Violation(f"{spath}.exec_us", "accelerator-only segment cannot have exec_us")
                )
            if needs_acc:
                if not plat.accelerator:
                    out.append(
                        Violation(spath, "platform has no accelerator but segment may use one")
                    )
                _check_wcet_table(seg.offload_us, plat.core_types, f"{spath}.offload_us", out)
                _check_wcet_table(seg.finalize_us, plat.core_types, f"{spath}.finalize_us", out)
                if seg.accel_us is None or seg.accel_us < 0:
                    out.append(
                        Violation(f"{spath}.accel_us", "accelerated WCET must be a non-negative integer")
                    )
            else:
                if seg.offload_us or seg.finalize_us or seg.accel_us is not None:
                    out.append(
                        Violation(spath, "cpu-only segment cannot have accelerator WCETs")
                    )

    seen_chains: set[str] = set()
    for ci, chain in enumerate(inst.chains):
        cpath = f"chains[{ci}]"
        if chain.id in seen_chains:
            out.append(Violation(cpath, f"duplicate chain id {chain.id!r}"))
        seen_chains.add(chain.id)
        if not chain.tasks:
            out.append(Violation(f"{cpath}.tasks", "chain must contain at least one task"))
        for pos, tid in enumerate(chain.tasks):
            if tid not in seen_tasks:
                out.append(Violation(f"{cpath}.tasks[{pos}]", f"unknown task id {tid!r}"))
    return out


def validate_assignment(inst: ProblemInstance, assign: Assignment) -> list[Violation]:
    """Check an assignment against its instance (cores exist, priorities form a
    permutation of 1..n, acceleration choices respect segment types)."""
    out: list[Violation] = []
    task_ids = [t.id for t in inst.tasks]
    core_ids = {c.id for c in inst.platform.cores}

    for tid in task_ids:
        if tid not in assign.core_of:
            out.append(Violation(f"core_of.{tid}", "missing core"))
        elif assign.core_of[tid] not in core_ids:
            out.append(Violation(f"core_of.{tid}", f"unknown core {assign.core_of[tid]!r}"))
        if tid not in assign.priority_of:
            out.append(Violation(f"priority_of.{tid}", "missing priority"))
    for tid in assign.core_of:
        if tid not in task_ids:
            out.append(Violation(f"core_of.{tid}", "unknown task"))
    prios = sorted(assign.priority_of.get(t, 0) for t in task_ids)
    if prios != list(range(1, len(task_ids) + 1)):
        out.append(
            Violation("priority_of", f"priorities must be a permutation of 1..{len(task_ids)}")
        )

    for tid, segs in assign.accelerated.items():
        if tid not in task_ids:
            out.append(Violation(f"accelerated.{tid}", "unknown task"))
            continue
        task = inst.task(tid)
        for j in segs:
            if not 0 <= j < len(task.segments):
                out.append(Violation(f"accelerated.{tid}", f"segment index {j} out of range"))
            elif not task.segments[j].impl.may_accelerate:
                out.append(
                    Violation(f"accelerated.{tid}", f"segment {j} cannot run on the accelerator")
                )
    for tid in task_ids:
        task = inst.task(tid)
        forced = set(task.forced_segments())
        chosen = set(assign.accelerated_of(tid))
        missing = forced - chosen
        if missing:
            out.append(
                Violation(
                    f"accelerated.{tid}",
                    f"accelerator-only segments {sorted(missing)} must be accelerated",
                )
            )
    return out


# ---------------------------------------------------------------------------
# JSON (de)serialization.  Unknown keys are rejected everywhere so that typos
# in hand-written instance files fail loudly.
# ---------------------------------------------------------------------------


def _take(obj: dict, path: str, keys: dict[str, bool]) -> dict:
    """Pop declared keys from ``obj``; fail on leftovers or missing required ones."""
    if not isinstance(obj, dict):
        raise ModelError(f"{path}: expected an object")
    data = {}
    o = dict(obj)
    for key, required in keys.items():
        if key in o:
            data[key] = o.pop(key)
        elif required:
            raise ModelError(f"{path}: missing required key {key!r}")
    if o:
        raise ModelError(f"{path}: unknown keys {sorted(o)}")
    return data


def _int_table(obj, path: str) -> dict[str, int]:
    if not isinstance(obj, dict):
        raise ModelError(f"{path}: expected an object of core-type -> integer")
    table = {}
    for k, v in obj.items():
        if not isinstance(v, int) or isinstance(v, bool):
            raise ModelError(f"{path}.{k}: expected an integer")
        table[str(k)] = v
    return table


def instance_from_dict(doc: dict) -> ProblemInstance:
    top = _take(doc, "$", {"platform": True, "tasks": True, "chains": False})

    p = _take(top["platform"], "platform", {"core_types": True, "cores": True, "accelerator": True})
    cores = []
    for i, c in enumerate(p["cores"]):
        cd = _take(c, f"platform.cores[{i}]", {"id": True, "type": True})
        cores.append(Core(id=str(cd["id"]), type=str(cd["type"])))
    platform = PlatformSpec(
        core_types=tuple(str(t) for t in p["core_types"]),
        cores=tuple(cores),
        accelerator=bool(p["accelerator"]),
    )

    tasks = []
    for i, t in enumerate(top["tasks"]):
        td = _take(
            t,
            f"tasks[{i}]",
            {"id": True, "period_us": True, "deadline_us": True, "segments": True},
        )
        segments = []
        for j, s in enumerate(td["segments"]):
            spath = f"tasks[{i}].segments[{j}]"
            sd = _take(
                s,
                spath,
                {
                    "impl": True,
                    "exec_us": False,
                    "offload_us": False,
                    "finalize_us": False,
                    "accel_us": False,
                },
            )
            try:
                impl = ImplType(sd["impl"])
            except ValueError:
                raise ModelError(f"{spath}.impl: expected one of cpu/hwa/cpu_hwa") from None
            segments.append(
                SegmentSpec(
                    impl=impl,
                    exec_us=_int_table(sd.get("exec_us", {}), f"{spath}.exec_us"),
                    offload_us=_int_table(sd.get("offload_us", {}), f"{spath}.offload_us"),
                    finalize_us=_int_table(sd.get("finalize_us", {}), f"{spath}.finalize_us"),
                    accel_us=sd.get("accel_us"),
                )
            )
        if not isinstance(td["period_us"], int) or not isinstance(td["deadline_us"], int):
            raise ModelError(f"tasks[{i}]: period_us and deadline_us must be integers")
        tasks.append(
            TaskSpec(
                id=str(td["id"]),
                period_us=td["period_us"],
                deadline_us=td["deadline_us"],
                segments=tuple(segments),
            )
        )

    chains = []
    for i, c in enumerate(top.get("chains", [])):
        cd = _take(c, f"chains[{i}]", {"id": True, "tasks": True})
        chains.append(ChainSpec(id=str(cd["id"]), tasks=tuple(str(x) for x in cd["tasks"])))

    return ProblemInstance(platform=platform, tasks=tuple(tasks), chains=tuple(chains))


def instance_to_dict(inst: ProblemInstance) -> dict:
    def seg_dict(s: SegmentSpec) -> dict:
        d: dict = {"impl": s.impl.value}
        if s.impl in (ImplType.CPU, ImplType.CPU_HWA):
            d["exec_us"] = dict(s.exec_us)
        if s.impl.may_accelerate:
            d["offload_us"] = dict(s.offload_us)
            d["finalize_us"] = dict(s.finalize_us)
            d["accel_us"] = s.accel_us
        return d

    return {
        "platform": {
            "core_types": list(inst.platform.core_types),
            "cores": [{"id": c.id, "type": c.type} for c in inst.platform.cores],
            "accelerator": inst.platform.accelerator,
        },
        "tasks": [
            {
                "id": t.id,
                "period_us": t.period_us,
                "deadline_us": t.deadline_us,
                "segments": [seg_dict(s) for s in t.segments],
            }
            for t in inst.tasks
        ],
        "chains": [{"id": c.id, "tasks": list(c.tasks)} for c in inst.chains],
    }


def instance_from_json(text: str) -> ProblemInstance:
    return instance_from_dict(json.loads(text))


def instance_to_json(inst: ProblemInstance) -> str:
    return json.dumps(instance_to_dict(inst), indent=2, sort_keys=True) + "\n"


def assignment_from_dict(doc: dict) -> Assignment:
    d = _take(doc, "$", {"core_of": True, "priority_of": True, "accelerated": True})
    accelerated = {str(t): frozenset(int(j) for j in idxs) for t, idxs in d["accelerated"].items()}
    return Assignment(
        core_of={str(k): str(v) for k, v in d["core_of"].items()},
        priority_of={str(k): int(v) for k, v in d["priority_of"].items()},
        accelerated=accelerated,
    )


def assignment_to_dict(assign: Assignment) -> dict:
    return {
        "core_of": dict(sorted(assign.core_of.items())),
        "priority_of": dict(sorted(assign.priority_of.items())),
        "accelerated": {t: sorted(v) for t, v in sorted(assign.accelerated.items())},
    }


def assignment_from_json(text: str) -> Assignment:
    return assignment_from_dict(json.loads(text))


def assignment_to_json(assign: Assignment) -> str:
    return json.dumps(assignment_to_dict(assign), indent=2, sort_keys=True) + "\n"


# ---------------------------------------------------------------------------
# WCET scaling
# ---------------------------------------------------------------------------


def _as_fraction(factor) -> Fraction:
    if isinstance(factor, Fraction):
        return factor
    if isinstance(factor, int):
        return Fraction(factor)
    if isinstance(factor, str):
        return Fraction(factor)
    if isinstance(factor, float):
        # Interpret the float through its shortest decimal representation so
        # that a CLI-style 0.8 means exactly 8/10 and 15 * 0.8 scales to 12,
        # not 13 (which naive binary-float ceiling would produce).
        return Fraction(repr(factor))
    raise ModelError(f"unsupported scale factor type: {type(factor).__name__}")


def scale_wcets(inst: ProblemInstance, factor) -> ProblemInstance:
    """Return a copy of ``inst`` with every WCET multiplied by ``factor``.

    Results are rounded *up* to whole microseconds, so analysis on the scaled
    instance stays sound with respect to the intended real-valued budgets.
    """
    f = _as_fraction(factor)
    if f <= 0:
        raise ModelError("scale factor must be positive")

    def scale(v: int) -> int:
        return math.ceil(v * f)

    def scale_table(tab: Mapping[str, int]) -> dict[str, int]:
        return {k: scale(v) for k, v in tab.items()}

    tasks = []
    for t in inst.tasks:
        segs = []
        for s in t.segments:
            segs.append(
                SegmentSpec(
                    impl=s.impl,
                    exec_us=scale_table(s.exec_us),
                    offload_us=scale_table(s.offload_us),
                    finalize_us=scale_table(s.finalize_us),
                    accel_us=None if s.accel_us is None else scale(s.accel_us),
                )
            )
        tasks.append(
            TaskSpec(
                id=t.id,
                period_us=t.period_us,
                deadline_us=t.deadline_us,
                segments=tuple(segs),
            )
        )
    return ProblemInstance(platform=inst.platform, tasks=tuple(tasks), chains=inst.chains)


# ---------------------------------------------------------------------------
# Built-in benchmark: the WATERS 2019 automotive vision/control task set on a
# Jetson-TX2-like platform (4x A57 + 2x Denver cores and one GPU used as the
# shared accelerator).  Each task is a single segment; four of them have a GPU
# implementation.  WCETs are whole microseconds.
# ---------------------------------------------------------------------------

A57 = "a57"
DENVER = "denver"

# (id, period_us, cpu-only exec {a57, denver},
#  accelerated cpu-side cost {a57, denver} or None, gpu processing or None,
#  implementation type)
#
# Notes on the data:
#  * For segments with a GPU implementation the source material reports only
#    the *combined* CPU-side cost around an accelerated run; we book it on the
#    offload phase and leave finalization at zero (the analysis only ever uses
#    the sum).
#  * The planner runs at a 15 ms period.  A frequently reproduced 12 ms figure
#    for it is a typo: the task cannot execute in under 12.4 ms on any core,
#    which would make the whole set trivially infeasible, and the reference
#    end-to-end latencies for chains through the planner only cohere at 15 ms.
_WATERS_TASKS = [
    ("lidar_grabber", 33_000, {A57: 14_379, DENVER: 10_868}, None, None, ImplType.CPU),
    ("dasm", 5_000, {A57: 1_958, DENVER: 1_300}, None, None, ImplType.CPU),
    ("can_polling", 10_000, {A57: 632, DENVER: 600}, None, None, ImplType.CPU),
    ("ekf", 15_000, {A57: 5_011, DENVER: 4_430}, None, None, ImplType.CPU),
    ("planner", 15_000, {A57: 13_939, DENVER: 12_437}, None, None, ImplType.CPU),
    ("sfm", 33_000, {A57: 31_055, DENVER: 27_812}, {A57: 8_320, DENVER: 6_711}, 7_900, ImplType.CPU_HWA),
    ("localization", 400_000, {A57: 407_811, DENVER: 294_808}, {A57: 18_568, DENVER: 14_516}, 124_000, ImplType.CPU_HWA),
    ("lane_detection", 66_000, {A57: 53_732, DENVER: 42_238}, {A57: 8_667, DENVER: 7_626}, 27_333, ImplType.CPU_HWA),
    ("detection", 200_000, None, {A57: 4_958, DENVER: 4_086}, 116_000, ImplType.HWA),
]

_WATERS_CHAINS = [
    ("c1", ["detection", "planner", "dasm"]),
    ("c2", ["sfm", "planner", "dasm"]),
    ("c3", ["lane_detection", "planner", "dasm"]),
    ("c4", ["can_polling", "localization", "ekf", "planner", "dasm"]),
    ("c5", ["lidar_grabber", "localization", "ekf", "planner", "dasm"]),
    ("c6", ["lidar_grabber", "planner", "dasm"]),
    ("c7", ["can_polling", "ekf", "planner", "dasm"]),
    ("c8", ["can_polling", "planner", "dasm"]),
]

# Deployment reported alongside the benchmark for the round-robin accelerator
# with the min-max latency objective.  The priority column is recorded
# verbatim; its published description does not state which end is "high", but
# only the larger-is-higher reading yields a schedulable system (see
# waters_published_assignment).
WATERS_PUBLISHED_SOLUTION = {
    "lidar_grabber": {"prio": 8, "cpu": 5, "acc": False},
    "dasm": {"prio": 5, "cpu": 1, "acc": False},
    "can_polling": {"prio": 1, "cpu": 1, "acc": False},
    "ekf": {"prio": 3, "cpu": 0, "acc": False},
    "planner": {"prio": 2, "cpu": 2, "acc": False},
    "sfm": {"prio": 4, "cpu": 3, "acc": False},
    "localization": {"prio": 7, "cpu": 4, "acc": False},
    "lane_detection": {"prio": 6, "cpu": 5, "acc": False},
    "detection": {"prio": 0, "cpu": 0, "acc": True},
}


def builtin_waters() -> ProblemInstance:
    """The 9-task / 6-core / 1-accelerator automotive benchmark instance."""
    cores = tuple(
        [Core(id=f"a57_{k}", type=A57) for k in range(4)]
        + [Core(id=f"denver_{k}", type=DENVER) for k in range(2)]
    )
    platform = PlatformSpec(core_types=(A57, DENVER), cores=cores, accelerator=True)

    tasks = []
    for tid, period, exec_us, acc_us, gpu_us, impl in _WATERS_TASKS:
        if impl is ImplType.CPU:
            seg = SegmentSpec(impl=impl, exec_us=exec_us)
        elif impl is ImplType.HWA:
            seg = SegmentSpec(
                impl=impl,
                offload_us=acc_us,
                finalize_us={A57: 0, DENVER: 0},
                accel_us=gpu_us,
            )
        else:
            seg = SegmentSpec(
                impl=impl,
                exec_us=exec_us,
                offload_us=acc_us,
                finalize_us={A57: 0, DENVER: 0},
                accel_us=gpu_us,
            )
        tasks.append(
            TaskSpec(id=tid, period_us=period, deadline_us=period, segments=(seg,))
        )

    chains = tuple(ChainSpec(id=cid, tasks=tuple(ts)) for cid, ts in _WATERS_CHAINS)
    return ProblemInstance(platform=platform, tasks=tuple(tasks), chains=chains)


def waters_published_assignment() -> Assignment:
    """The benchmark's published round-robin/min-max-latency deployment.

    Core indices 0-3 are the A57s and 4-5 the Denvers.  Published priorities
    (0..8) are shifted to this package's 1..9 convention, keeping their order
    and reading larger values as higher priority.
    """
    core_ids = [f"a57_{k}" for k in range(4)] + [f"denver_{k}" for k in range(2)]
    core_of = {}
    priority_of = {}
    accelerated = {}
    for tid, row in WATERS_PUBLISHED_SOLUTION.items():
        core_of[tid] = core_ids[row["cpu"]]
        priority_of[tid] = row["prio"] + 1
        accelerated[tid] = frozenset({0}) if row["acc"] else frozenset()
    return Assignment(core_of=core_of, priority_of=priority_of, accelerated=accelerated)


def load_instance(ref: str) -> ProblemInstance:
    """Load an instance from a file path, or a builtin by ``builtin:`` name."""
    if ref.startswith("builtin:"):
        name = ref.split(":", 1)[1]
        if name == "waters":
            return builtin_waters()
        raise ModelError(f"unknown builtin instance {name!r}")
    with open(ref, "r", encoding="utf-8") as fh:
        return instance_from_json(fh.read())
