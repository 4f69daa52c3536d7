"""Assemble the joint deployment MILP.

The program simultaneously decides task-to-core mapping, a global priority
permutation, and per-segment acceleration, subject to every task passing the
checkpoint-based schedulability test used by the ``conservative`` analysis
mode.  Demand is linearized by precomputing the interference multiplier
``ceil((v + J) / T)`` at every checkpoint ``v`` with assignment-independent
jitter constants; a binary per checkpoint picks the one that certifies the
response time.

Variable families (one LP column each, ``t{i}``/``k{k}``/``j{j}``/``p{p}``/
``g{g}`` are task, core, segment, priority and checkpoint indices; the legend
lives in ``model.meta``):

===========================  ====================================================
``x_t{i}_k{k}``              task i runs on core k
``spk/sp``                   linearized same-core indicators per task pair
``pr_t{i}_p{p}``, ``P_t{i}`` priority permutation matrix and priority level
``hp_t{i}_t{s}``             1 iff i has higher priority than s
``a_t{i}_j{j}``              segment j of i runs on the accelerator
``eseg/e``                   CPU-side WCET per segment / per task
``I_t{i}_t{s}``              CPU interference budget i exerts on s
``rho/y``, ``R_t{i}``        per-checkpoint demand, checkpoint choice, WCRT
``sseg/s``                   suspension per accelerated segment / per task
``la_t{i}``                  (round-robin) longest accelerator request of i
``eta/Hd/b/delta/sigma``     (priority arbitration) accelerator interference,
                             blocking, and checkpointed waiting
``L_ch{x}/Lmax/RTmax``       objective auxiliaries
===========================  ====================================================
"""

from __future__ import annotations

from hetsched.analysis import (
    MINMAX_LAT,
    MINMAX_RT,
    MINSUM_LAT,
    MINSUM_RT,
    NO_CONTENTION,
    NPFP,
    OBJECTIVES,
    POLICIES,
    RR,
    accel_jitter_bound,
    checkpoints,
    release_jitter_bound,
)
from hetsched.milp.ir import MilpModel
from hetsched.model import ImplType, ModelError, ProblemInstance, validate_instance


def _ceil_div(n: int, d: int) -> int:
    return -(-n // d)


def build_milp(inst: ProblemInstance, policy: str, objective: str) -> MilpModel:
    """Build the deployment MILP for ``inst`` under an arbitration policy."""
    if policy not in POLICIES:
        raise ModelError(f"unknown policy {policy!r}")
    if objective not in OBJECTIVES:
        raise ModelError(f"unknown objective {objective!r}")
    errors = validate_instance(inst)
    if errors:
        raise ModelError("invalid instance: " + "; ".join(str(e) for e in errors))
    if objective in (MINMAX_LAT, MINSUM_LAT) and not inst.chains:
        raise ModelError("latency objectives require at least one chain")

    tasks = list(inst.tasks)
    n = len(tasks)
    cores = list(inst.platform.cores)
    m = len(cores)
    ctypes = [c.type for c in cores]

    # ------------------------------------------------------------------ data
    exec_cost: list[list[list[int] | None]] = []  # CPU execution per core
    accf_cost: list[list[list[int] | None]] = []  # offload+finalize per core
    accel_time: list[list[int | None]] = []
    seg_cap: list[list[int]] = []  # upper bound on a segment's CPU-side cost
    for t in tasks:
        er, ar, et, cap = [], [], [], []
        for seg in t.segments:
            e_k = [seg.exec_us[ct] for ct in ctypes] if seg.impl is not ImplType.HWA else None
            a_k = (
                [seg.offload_us[ct] + seg.finalize_us[ct] for ct in ctypes]
                if seg.impl.may_accelerate
                else None
            )
            er.append(e_k)
            ar.append(a_k)
            et.append(seg.accel_us if seg.impl.may_accelerate else None)
            cap.append(max(max(e_k) if e_k else 0, max(a_k) if a_k else 0))
        exec_cost.append(er)
        accf_cost.append(ar)
        accel_time.append(et)
        seg_cap.append(cap)

    acc_idx = [t.accelerable_segments() for t in tasks]
    cmax = [sum(caps) for caps in seg_cap]
    max_accel = [max((accel_time[i][j] or 0 for j in acc_idx[i]), default=0) for i in range(n)]
    sum_accel = [sum(accel_time[i][j] or 0 for j in acc_idx[i]) for i in range(n)]
    period = [t.period_us for t in tasks]
    deadline = [t.deadline_us for t in tasks]
    jit = [release_jitter_bound(inst, t) for t in tasks]
    ajit = [accel_jitter_bound(inst, t) for t in tasks]

    # Per-segment suspension caps (variable upper bounds; also big-M inputs).
    ss_cap: list[dict[int, int]] = []
    for i in range(n):
        caps = {}
        for j in acc_idx[i]:
            e_hw = accel_time[i][j] or 0
            if policy == NO_CONTENTION:
                caps[j] = e_hw
            elif policy == RR:
                caps[j] = e_hw + sum(max_accel[h] for h in range(n) if h != i)
            else:
                caps[j] = e_hw + deadline[i]
        ss_cap.append(caps)
    s_cap = [sum(ss_cap[i].values()) for i in range(n)]

    wcrt_grid = [
        checkpoints(deadline[i], [(period[s], jit[s]) for s in range(n) if s != i])
        for i in range(n)
    ]
    rho_cap = [
        cmax[i]
        + s_cap[i]
        + sum(_ceil_div(deadline[i] + jit[s], period[s]) * cmax[s] for s in range(n) if s != i)
        for i in range(n)
    ]

    model = MilpModel(name=f"deploy_{policy}_{objective}")

    # ------------------------------------------------------------- variables
    x = [[model.add_binary(f"x_t{i}_k{k}") for k in range(m)] for i in range(n)]

    spk: dict[tuple[int, int, int], int] = {}
    sp: dict[tuple[int, int], int] = {}
    for i in range(n):
        for s in range(n):
            if s == i:
                continue
            for k in range(m):
                spk[i, s, k] = model.add_binary(f"spk_t{i}_t{s}_k{k}")
            sp[i, s] = model.add_var(f"sp_t{i}_t{s}", lb=0.0, ub=1.0)

    pr = [[model.add_binary(f"pr_t{i}_p{p}") for p in range(1, n + 1)] for i in range(n)]
    P = [model.add_var(f"P_t{i}", lb=1.0, ub=float(n)) for i in range(n)]

    hp: dict[tuple[int, int], int] = {}
    for i in range(n):
        for s in range(n):
            if s != i:
                hp[i, s] = model.add_binary(f"hp_t{i}_t{s}")

    a: list[list[int]] = []
    for i, t in enumerate(tasks):
        row = []
        for j, seg in enumerate(t.segments):
            if seg.impl is ImplType.CPU:
                row.append(model.add_binary(f"a_t{i}_j{j}", ub=0.0))
            elif seg.impl is ImplType.HWA:
                row.append(model.add_binary(f"a_t{i}_j{j}", lb=1.0))
            else:
                row.append(model.add_binary(f"a_t{i}_j{j}"))
        a.append(row)

    eseg = [
        [model.add_var(f"eseg_t{i}_j{j}", ub=float(seg_cap[i][j])) for j in range(len(t.segments))]
        for i, t in enumerate(tasks)
    ]
    e = [model.add_var(f"e_t{i}", ub=float(cmax[i])) for i in range(n)]

    I: dict[tuple[int, int], int] = {}
    for i in range(n):
        for s in range(n):
            if s != i:
                I[i, s] = model.add_var(f"I_t{i}_t{s}", ub=float(cmax[i]))

    rho = [
        [model.add_var(f"rho_t{i}_g{g}", ub=float(rho_cap[i])) for g in range(len(wcrt_grid[i]))]
        for i in range(n)
    ]
    y = [
        [model.add_binary(f"y_t{i}_g{g}") for g in range(len(wcrt_grid[i]))] for i in range(n)
    ]
    R = [model.add_var(f"R_t{i}", ub=float(deadline[i])) for i in range(n)]

    sseg = [
        {j: model.add_var(f"sseg_t{i}_j{j}", ub=float(ss_cap[i][j])) for j in acc_idx[i]}
        for i in range(n)
    ]
    s_var = [model.add_var(f"s_t{i}", ub=float(s_cap[i])) for i in range(n)]

    if policy == RR:
        la = [model.add_var(f"la_t{i}", ub=float(max_accel[i])) for i in range(n)]

    if policy == NPFP:
        accel_grid = [
            checkpoints(
                deadline[i],
                [(period[s], ajit[s]) for s in range(n) if s != i and acc_idx[s]],
            )
            if acc_idx[i]
            else []
            for i in range(n)
        ]
        b_cap = [max((max_accel[s] for s in range(n) if s != i), default=0) for i in range(n)]
        delta_cap = [
            b_cap[i]
            + sum(
                _ceil_div(deadline[i] + ajit[s], period[s]) * sum_accel[s]
                for s in range(n)
                if s != i and acc_idx[s]
            )
            for i in range(n)
        ]
        eta: dict[tuple[int, int, int], int] = {}
        Hd: dict[tuple[int, int], int] = {}
        b: dict[int, int] = {}
        delta: dict[tuple[int, int, int], int] = {}
        sigma: dict[tuple[int, int, int], int] = {}
        for i in range(n):
            if not acc_idx[i]:
                continue
            for j in acc_idx[i]:
                for s in range(n):
                    if s != i:
                        eta[i, j, s] = model.add_var(
                            f"eta_t{i}_j{j}_t{s}", ub=float(accel_time[i][j] or 0)
                        )
            for s in range(n):
                if s != i:
                    Hd[i, s] = model.add_var(f"Hd_t{i}_t{s}", ub=float(sum_accel[i]))
            b[i] = model.add_var(f"b_t{i}", ub=float(b_cap[i]))
            for j in acc_idx[i]:
                for g in range(len(accel_grid[i])):
                    delta[i, j, g] = model.add_var(
                        f"delta_t{i}_j{j}_g{g}", ub=float(delta_cap[i])
                    )
                    sigma[i, j, g] = model.add_binary(f"sigma_t{i}_j{j}_g{g}")

    # ------------------------------------------------------------ mapping
    for i in range(n):
        model.add_row(f"c1_t{i}", [(x[i][k], 1.0) for k in range(m)], "==", 1.0)

    for i in range(n):
        for s in range(n):
            if s == i:
                continue
            for k in range(m):
                v = spk[i, s, k]
                model.add_row(
                    f"c2a_t{i}_t{s}_k{k}",
                    [(v, 1.0), (x[i][k], -1.0), (x[s][k], -1.0)],
                    ">=",
                    -1.0,
                )
                model.add_row(f"c2b_t{i}_t{s}_k{k}", [(v, 1.0), (x[i][k], -1.0)], "<=", 0.0)
                model.add_row(f"c2c_t{i}_t{s}_k{k}", [(v, 1.0), (x[s][k], -1.0)], "<=", 0.0)
            model.add_row(
                f"c2d_t{i}_t{s}",
                [(sp[i, s], 1.0)] + [(spk[i, s, k], -1.0) for k in range(m)],
                "==",
                0.0,
            )

    # ------------------------------------------------------------ priorities
    for i in range(n):
        model.add_row(f"c3a_t{i}", [(pr[i][p], 1.0) for p in range(n)], "==", 1.0)
    for p in range(n):
        model.add_row(f"c3b_p{p + 1}", [(pr[i][p], 1.0) for i in range(n)], "==", 1.0)
    for i in range(n):
        model.add_row(
            f"c4_t{i}",
            [(P[i], 1.0)] + [(pr[i][p], -float(p + 1)) for p in range(n)],
            "==",
            0.0,
        )
    for i in range(n):
        for s in range(i + 1, n):
            model.add_row(f"c5_t{i}_t{s}", [(hp[i, s], 1.0), (hp[s, i], 1.0)], "==", 1.0)
    for i in range(n):
        for s in range(n):
            if s == i:
                continue
            # hp[i,s] = 1  <=>  P_i > P_s (larger value means higher priority)
            model.add_row(
                f"c6a_t{i}_t{s}", [(P[s], 1.0), (P[i], -1.0), (hp[i, s], float(n))], ">=", 0.0
            )
            model.add_row(
                f"c6b_t{i}_t{s}", [(P[s], 1.0), (P[i], -1.0), (hp[i, s], float(n))], "<=", float(n)
            )

    # ------------------------------------------- per-segment CPU-side WCET
    for i, t in enumerate(tasks):
        for j in range(len(t.segments)):
            cap = float(seg_cap[i][j])
            if exec_cost[i][j] is not None:
                model.add_row(
                    f"c8a_t{i}_j{j}",
                    [(eseg[i][j], 1.0), (a[i][j], cap)]
                    + [(x[i][k], -float(exec_cost[i][j][k])) for k in range(m)],
                    ">=",
                    0.0,
                )
            if accf_cost[i][j] is not None:
                model.add_row(
                    f"c8b_t{i}_j{j}",
                    [(eseg[i][j], 1.0), (a[i][j], -cap)]
                    + [(x[i][k], -float(accf_cost[i][j][k])) for k in range(m)],
                    ">=",
                    -cap,
                )
        model.add_row(
            f"c9_t{i}",
            [(e[i], 1.0)] + [(eseg[i][j], -1.0) for j in range(len(t.segments))],
            ">=",
            0.0,
        )

    # ------------------------------------------------------- CPU interference
    for i in range(n):
        for s in range(n):
            if s == i:
                continue
            cap = float(cmax[i])
            # I[i,s] >= e_i - M*(2 - hp[i,s] - sp[i,s])
            model.add_row(
                f"c10_t{i}_t{s}",
                [(I[i, s], 1.0), (e[i], -1.0), (hp[i, s], -cap), (sp[i, s], -cap)],
                ">=",
                -2.0 * cap,
            )

    # ----------------------------------------------- checkpointed WCRT test
    for i in range(n):
        cap = float(rho_cap[i])
        for g, nu in enumerate(wcrt_grid[i]):
            terms = [(rho[i][g], 1.0), (e[i], -1.0), (s_var[i], -1.0)]
            for s in range(n):
                if s != i:
                    coef = _ceil_div(nu + jit[s], period[s])
                    terms.append((I[s, i], -float(coef)))
            model.add_row(f"c11a_t{i}_g{g}", terms, ">=", 0.0)
            model.add_row(
                f"c11b_t{i}_g{g}", [(rho[i][g], 1.0), (y[i][g], cap)], "<=", float(nu) + cap
            )
            model.add_row(
                f"c11c_t{i}_g{g}",
                [(R[i], 1.0), (rho[i][g], -1.0), (y[i][g], -cap)],
                ">=",
                -cap,
            )
        model.add_row(
            f"c11d_t{i}", [(y[i][g], 1.0) for g in range(len(wcrt_grid[i]))], "==", 1.0
        )
        model.add_row(f"c12_t{i}", [(R[i], 1.0)], "<=", float(deadline[i]))

    # ------------------------------------------------------- suspension bounds
    if policy == RR:
        for i in range(n):
            for j in acc_idx[i]:
                e_hw = float(accel_time[i][j] or 0)
                model.add_row(f"c13_t{i}_j{j}", [(la[i], 1.0), (a[i][j], -e_hw)], ">=", 0.0)
            for j in acc_idx[i]:
                e_hw = float(accel_time[i][j] or 0)
                m14 = e_hw + sum(max_accel[h] for h in range(n) if h != i)
                model.add_row(
                    f"c14_t{i}_j{j}",
                    [(sseg[i][j], 1.0), (a[i][j], -m14)]
                    + [(la[h], -1.0) for h in range(n) if h != i],
                    ">=",
                    e_hw - m14,
                )
    elif policy == NO_CONTENTION:
        for i in range(n):
            for j in acc_idx[i]:
                e_hw = float(accel_time[i][j] or 0)
                model.add_row(
                    f"c14_t{i}_j{j}", [(sseg[i][j], 1.0), (a[i][j], -e_hw)], ">=", 0.0
                )
    else:  # NPFP
        for i in range(n):
            if not acc_idx[i]:
                continue
            for s in range(n):
                if s == i:
                    continue
                for f in acc_idx[s]:
                    e_hw = float(accel_time[s][f] or 0)
                    model.add_row(
                        f"c16_t{i}_t{s}_j{f}",
                        [(b[i], 1.0), (a[s][f], -e_hw), (hp[i, s], -e_hw)],
                        ">=",
                        -e_hw,
                    )
                for j in acc_idx[i]:
                    e_hw = float(accel_time[i][j] or 0)
                    model.add_row(
                        f"c17a_t{i}_j{j}_t{s}",
                        [(eta[i, j, s], 1.0), (a[i][j], -e_hw), (hp[i, s], -e_hw)],
                        ">=",
                        -e_hw,
                    )
                model.add_row(
                    f"c17b_t{i}_t{s}",
                    [(Hd[i, s], 1.0)] + [(eta[i, j, s], -1.0) for j in acc_idx[i]],
                    ">=",
                    0.0,
                )
            dcap = float(delta_cap[i])
            for j in acc_idx[i]:
                e_hw = float(accel_time[i][j] or 0)
                for g, nu in enumerate(accel_grid[i]):
                    terms = [(delta[i, j, g], 1.0), (b[i], -1.0)]
                    for s in range(n):
                        if s != i and acc_idx[s]:
                            coef = _ceil_div(nu + ajit[s], period[s])
                            terms.append((Hd[s, i], -float(coef)))
                    model.add_row(f"c18a_t{i}_j{j}_g{g}", terms, ">=", 0.0)
                    model.add_row(
                        f"c18b_t{i}_j{j}_g{g}",
                        [(delta[i, j, g], 1.0), (sigma[i, j, g], dcap)],
                        "<=",
                        float(nu) + dcap,
                    )
                    m2 = e_hw + dcap
                    model.add_row(
                        f"c18c_t{i}_j{j}_g{g}",
                        [(sseg[i][j], 1.0), (delta[i, j, g], -1.0), (sigma[i, j, g], -m2)],
                        ">=",
                        e_hw - m2,
                    )
                model.add_row(
                    f"c18d_t{i}_j{j}",
                    [(sigma[i, j, g], 1.0) for g in range(len(accel_grid[i]))]
                    + [(a[i][j], -1.0)],
                    "==",
                    0.0,
                )

    for i in range(n):
        if acc_idx[i]:
            label = "c15" if policy in (RR, NO_CONTENTION) else "c19"
            model.add_row(
                f"{label}_t{i}",
                [(s_var[i], 1.0)] + [(sseg[i][j], -1.0) for j in acc_idx[i]],
                ">=",
                0.0,
            )
        # Tasks without accelerable segments have s fixed to 0 by its bounds.

    # --------------------------------------------------------------- objective
    task_pos = {t.id: i for i, t in enumerate(tasks)}
    if objective in (MINMAX_LAT, MINSUM_LAT):
        L = []
        for ci, chain in enumerate(inst.chains):
            lv = model.add_var(f"L_ch{ci}")
            L.append(lv)
            const = sum(period[task_pos[tid]] for tid in chain.tasks[1:])
            terms = [(lv, 1.0)]
            for tid in chain.tasks:
                terms.append((R[task_pos[tid]], -1.0))
            model.add_row(f"lat_ch{ci}", terms, ">=", float(const))
        if objective == MINMAX_LAT:
            lmax = model.add_var("Lmax")
            for ci in range(len(inst.chains)):
                model.add_row(f"lmax_ch{ci}", [(lmax, 1.0), (L[ci], -1.0)], ">=", 0.0)
            model.set_objective([(lmax, 1.0)])
        else:
            model.set_objective([(lv, 1.0) for lv in L])
    elif objective == MINMAX_RT:
        rtmax = model.add_var("RTmax")
        for i in range(n):
            model.add_row(f"rt_t{i}", [(rtmax, float(deadline[i])), (R[i], -1.0)], ">=", 0.0)
        model.set_objective([(rtmax, 1.0)])
    else:  # MINSUM_RT
        model.set_objective([(R[i], 1.0 / deadline[i]) for i in range(n)])

    model.meta = {
        "policy": policy,
        "objective": objective,
        "tasks": [t.id for t in tasks],
        "cores": [c.id for c in cores],
        "chains": [c.id for c in inst.chains],
        "segments": {t.id: len(t.segments) for t in tasks},
        "accelerable": {t.id: list(acc_idx[i]) for i, t in enumerate(tasks)},
        "wcrt_grid": {t.id: list(wcrt_grid[i]) for i, t in enumerate(tasks)},
    }
    if policy == NPFP:
        model.meta["accel_grid"] = {t.id: list(accel_grid[i]) for i, t in enumerate(tasks)}
    return model
