"""Serialize a model to CPLEX-LP text (the dialect HiGHS, CBC, Gurobi and
CPLEX all read).  Output is deterministic: columns and rows appear in model
order, which the builder derives from the instance alone."""

from __future__ import annotations

from hetsched.milp.ir import MilpModel


def _num(v: float) -> str:
    if v == int(v) and abs(v) < 1e15:
        return str(int(v))
    return repr(v)


def _expr(terms, variables) -> str:
    parts: list[str] = []
    for idx, coef in terms:
        name = variables[idx].name
        if not parts:
            if coef == 1:
                parts.append(name)
            elif coef == -1:
                parts.append(f"- {name}")
            else:
                parts.append(f"{_num(coef)} {name}")
        else:
            sign = "+" if coef >= 0 else "-"
            mag = abs(coef)
            if mag == 1:
                parts.append(f"{sign} {name}")
            else:
                parts.append(f"{sign} {_num(mag)} {name}")
    return " ".join(parts)


_SENSE = {"<=": "<=", ">=": ">=", "==": "="}


def write_lp(model: MilpModel) -> str:
    if not model.objective:
        raise ValueError("model has no objective")
    out: list[str] = [f"\\ {model.name}"]
    out.append("Minimize")
    out.append(" obj: " + _expr(sorted(model.objective.items()), model.variables))
    out.append("Subject To")
    for row in model.rows:
        if not row.terms:
            raise ValueError(f"row {row.name!r} has no terms")
        out.append(f" {row.name}: {_expr(row.terms, model.variables)} {_SENSE[row.sense]} {_num(row.rhs)}")

    bounds: list[str] = []
    for v in model.variables:
        if v.is_binary:
            # Only non-default binary bounds (fixed on/off) need a line.
            if v.lb > 0:
                bounds.append(f" {v.name} >= {_num(v.lb)}")
            if v.ub is not None and v.ub < 1:
                bounds.append(f" {v.name} <= {_num(v.ub)}")
            continue
        if v.ub is not None and v.lb == v.ub:
            bounds.append(f" {v.name} = {_num(v.lb)}")
            continue
        if v.lb != 0.0:
            bounds.append(f" {v.name} >= {_num(v.lb)}")
        if v.ub is not None:
            bounds.append(f" {v.name} <= {_num(v.ub)}")
    if bounds:
        out.append("Bounds")
        out.extend(bounds)

    binaries = [v.name for v in model.variables if v.is_binary]
    if binaries:
        out.append("Binary")
        out.extend(f" {name}" for name in binaries)
    generals = [v.name for v in model.variables if v.integer and not v.is_binary]
    if generals:
        out.append("General")
        out.extend(f" {name}" for name in generals)
    out.append("End")
    return "\n".join(out) + "\n"


def write_lp_file(model: MilpModel, path: str) -> None:
    with open(path, "w", encoding="utf-8") as fh:
        fh.write(write_lp(model))
