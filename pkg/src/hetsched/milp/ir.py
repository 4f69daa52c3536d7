"""A small mixed-integer linear program container.

The builder fills it, the LP writer serializes it, and the solver backends
consume it.  Everything is index-based internally; names exist for the LP
file and for decoding solutions.
"""

from __future__ import annotations

from dataclasses import dataclass
from typing import Iterable

SENSES = ("<=", ">=", "==")


@dataclass(frozen=True)
class Variable:
    name: str
    lb: float = 0.0
    ub: float | None = None  # None means +infinity
    integer: bool = False

    @property
    def is_binary(self) -> bool:
        return self.integer and self.lb >= 0.0 and self.ub is not None and self.ub <= 1.0


@dataclass(frozen=True)
class Row:
    name: str
    terms: tuple[tuple[int, float], ...]  # (variable index, coefficient)
    sense: str
    rhs: float


class MilpModel:
    """A minimization MILP built incrementally with named rows and columns."""

    def __init__(self, name: str):
        self.name = name
        self.variables: list[Variable] = []
        self.rows: list[Row] = []
        self.objective: dict[int, float] = {}
        self.meta: dict = {}
        self._var_index: dict[str, int] = {}
        self._row_names: set[str] = set()

    # -- columns ------------------------------------------------------------

    def add_var(
        self, name: str, lb: float = 0.0, ub: float | None = None, integer: bool = False
    ) -> int:
        if name in self._var_index:
            raise ValueError(f"duplicate variable {name!r}")
        idx = len(self.variables)
        self._var_index[name] = idx
        self.variables.append(
            Variable(name=name, lb=float(lb), ub=None if ub is None else float(ub), integer=integer)
        )
        return idx

    def add_binary(self, name: str, lb: float = 0.0, ub: float = 1.0) -> int:
        return self.add_var(name, lb=lb, ub=ub, integer=True)

    def var(self, name: str) -> int:
        return self._var_index[name]

    def has_var(self, name: str) -> bool:
        return name in self._var_index

    # -- rows and objective ---------------------------------------------------

    def add_row(
        self, name: str, terms: Iterable[tuple[int, float]], sense: str, rhs: float
    ) -> None:
        if sense not in SENSES:
            raise ValueError(f"bad sense {sense!r}")
        if name in self._row_names:
            raise ValueError(f"duplicate row {name!r}")
        self._row_names.add(name)
        merged: dict[int, float] = {}
        for idx, coef in terms:
            if coef:
                merged[idx] = merged.get(idx, 0.0) + float(coef)
        self.rows.append(Row(name=name, terms=tuple(merged.items()), sense=sense, rhs=float(rhs)))

    def set_objective(self, terms: Iterable[tuple[int, float]]) -> None:
        merged: dict[int, float] = {}
        for idx, coef in terms:
            if coef:
                merged[idx] = merged.get(idx, 0.0) + float(coef)
        self.objective = merged

    # -- reporting -------------------------------------------------------------

    def stats(self) -> dict:
        return {
            "variables": len(self.variables),
            "binaries": sum(v.is_binary for v in self.variables),
            "integers": sum(v.integer for v in self.variables),
            "rows": len(self.rows),
            "nonzeros": sum(len(r.terms) for r in self.rows),
        }
