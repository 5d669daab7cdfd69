"""Embedded incremental SAT oracle.

The CDCL engine comes in two interchangeable backends: a compiled Cython
extension (``_csolver``) and a pure-Python fallback (``_pysolver``).  The
compiled one is used when importable unless ``REDRES_BACKEND=python`` is set.
"""

from __future__ import annotations

import os
from dataclasses import dataclass
from typing import Dict, FrozenSet, Iterable, Optional

from . import _pysolver

if os.environ.get("REDRES_BACKEND", "").lower() == "python":
    _engine = _pysolver
else:
    try:
        from . import _csolver as _engine  # type: ignore[attr-defined]
    except ImportError:
        _engine = _pysolver

Engine = _engine.Solver
BACKEND: str = _engine.BACKEND
BACKENDS = {"python": _pysolver.Solver}
if _engine is not _pysolver:
    BACKENDS[_engine.BACKEND] = _engine.Solver

from .resolution import (  # noqa: E402
    ResolutionProof,
    ResolutionViolation,
    SatisfiableError,
    check_resolution_proof,
    extract_resolution_proof,
)


class BudgetExhausted(RuntimeError):
    pass


@dataclass(frozen=True)
class SatOutcome:
    sat: bool
    model: Optional[tuple] = None
    core: Optional[FrozenSet[int]] = None

    def value(self, lit: int) -> bool:
        v = self.model[abs(lit)]
        return v if lit > 0 else not v

    def assignment(self, variables: Iterable[int] | None = None) -> Dict[int, bool]:
        if variables is None:
            variables = range(1, len(self.model))
        return {v: self.model[v] for v in variables}


class SatInstance:
    """Incremental SAT instance over DIMACS literals."""

    def __init__(self, seed: int = 0, engine=None):
        self._s = (engine or Engine)(seed=seed)
        self.calls = 0

    @property
    def num_vars(self) -> int:
        return self._s.nvars

    def new_var(self) -> int:
        return self._s.new_var()

    def reserve(self, n: int) -> None:
        self._s.ensure_vars(n)

    def add_clause(self, lits: Iterable[int]) -> int:
        return self._s.add_clause(list(lits))

    def solve(self, assumptions: Iterable[int] = (), conflict_budget: int | None = None) -> SatOutcome:
        self.calls += 1
        assumptions = list(assumptions)
        status, payload = self._s.solve(assumptions, conflict_budget)
        if status is None:
            raise BudgetExhausted("SAT conflict budget exhausted")
        if status:
            return SatOutcome(True, model=tuple(payload))
        return SatOutcome(False, core=frozenset(payload))


def sat_solve(instance: SatInstance, assumptions: Iterable[int] = ()) -> SatOutcome:
    return instance.solve(assumptions)


__all__ = [
    "BACKEND",
    "BACKENDS",
    "BudgetExhausted",
    "ResolutionProof",
    "ResolutionViolation",
    "SatInstance",
    "SatOutcome",
    "SatisfiableError",
    "check_resolution_proof",
    "extract_resolution_proof",
    "sat_solve",
]
