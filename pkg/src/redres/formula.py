"""Prenex CNF formulas: representation, level-indexed literal access,
instantiation, and QDIMACS reading/writing.

Literals are DIMACS integers (``v`` or ``-v``).  Clauses are tuples of
literals in canonical order (by variable, negative first) without
duplicates.  Clause ids are 1-based positions in ``PCNF.clauses``.
"""

from __future__ import annotations

import hashlib
import io
from dataclasses import dataclass, field
from typing import Dict, Iterable, Mapping, Sequence, TextIO, Tuple, Union

EXISTS = "e"
FORALL = "a"

Literal = int
Clause = Tuple[int, ...]
Assignment = Mapping[int, bool]


class QDIMACSError(ValueError):
    def __init__(self, message: str, line: int | None = None):
        self.line = line
        if line is not None:
            message = f"line {line}: {message}"
        super().__init__(message)


def canonical_clause(lits: Iterable[int]) -> Clause:
    return tuple(sorted(set(lits), key=lambda l: (abs(l), l > 0)))


def lit_satisfied(lit: int, alpha: Assignment) -> bool | None:
    v = alpha.get(abs(lit))
    if v is None:
        return None
    return v == (lit > 0)


@dataclass(frozen=True)
class QuantBlock:
    kind: str
    vars: Tuple[int, ...]

    def __post_init__(self):
        if self.kind not in (EXISTS, FORALL):
            raise ValueError(f"bad quantifier kind {self.kind!r}")
        if not self.vars:
            raise ValueError("quantifier block must bind at least one variable")

    @property
    def universal(self) -> bool:
        return self.kind == FORALL


@dataclass(frozen=True)
class PCNF:
    """A closed prenex CNF formula.

    ``blocks[k-1]`` is quantifier level ``k``; adjacent blocks alternate.
    """

    blocks: Tuple[QuantBlock, ...]
    clauses: Tuple[Clause, ...]
    num_vars: int = 0
    var_level: Dict[int, int] = field(default=None, compare=False, repr=False)

    def __post_init__(self):
        blocks = tuple(self.blocks)
        clauses = tuple(canonical_clause(c) for c in self.clauses)
        object.__setattr__(self, "blocks", blocks)
        object.__setattr__(self, "clauses", clauses)
        var_level: Dict[int, int] = {}
        for k, block in enumerate(blocks, start=1):
            if k > 1 and blocks[k - 2].kind == block.kind:
                raise ValueError(f"blocks {k - 1} and {k} have the same kind")
            for v in block.vars:
                if v < 1:
                    raise ValueError(f"invalid variable id {v}")
                if v in var_level:
                    raise ValueError(f"variable {v} bound twice")
                var_level[v] = k
        for i, c in enumerate(clauses, start=1):
            for l in c:
                if l == 0 or abs(l) not in var_level:
                    raise ValueError(f"clause {i}: variable {abs(l)} is not bound")
        top = max(var_level, default=0)
        object.__setattr__(self, "num_vars", max(self.num_vars, top))
        object.__setattr__(self, "var_level", var_level)

    @property
    def depth(self) -> int:
        return len(self.blocks)

    @property
    def num_clauses(self) -> int:
        return len(self.clauses)

    def clause(self, i: int) -> Clause:
        if not 1 <= i <= len(self.clauses):
            raise IndexError(f"clause id {i} out of range 1..{len(self.clauses)}")
        return self.clauses[i - 1]

    def kind(self, k: int) -> str:
        return self.blocks[k - 1].kind

    def level(self, lit: int) -> int:
        return self.var_level[abs(lit)]

    def structure(self):
        return (tuple((b.kind, tuple(sorted(b.vars))) for b in self.blocks), self.clauses)

    def digest(self) -> str:
        return hashlib.sha256(emit_qdimacs(self).encode()).hexdigest()


_RANGES = {
    "=": lambda lv, k: lv == k,
    "<": lambda lv, k: lv < k,
    ">": lambda lv, k: lv > k,
    "<=": lambda lv, k: lv <= k,
    ">=": lambda lv, k: lv >= k,
}


def lit_at(pcnf: PCNF, i: int, k: int, rel: str = "=") -> frozenset:
    """Literals of clause ``i`` whose level stands in relation ``rel`` to ``k``."""
    clause = pcnf.clause(i)
    if not 0 <= k <= pcnf.depth + 1:
        raise IndexError(f"level {k} out of range 0..{pcnf.depth + 1}")
    try:
        test = _RANGES[rel]
    except KeyError:
        raise ValueError(f"unknown range {rel!r}") from None
    return frozenset(l for l in clause if test(pcnf.var_level[abs(l)], k))


def normalize_blocks(blocks: Iterable[Tuple[str, Sequence[int]]]) -> Tuple[QuantBlock, ...]:
    """Drop empty blocks and merge adjacent blocks of the same kind."""
    merged: list[list] = []
    for kind, vs in blocks:
        if not vs:
            continue
        if merged and merged[-1][0] == kind:
            merged[-1][1].extend(vs)
        else:
            merged.append([kind, list(vs)])
    return tuple(QuantBlock(kind, tuple(vs)) for kind, vs in merged)


def instantiate(pcnf: PCNF, alpha: Assignment) -> PCNF:
    for v in alpha:
        if v not in pcnf.var_level:
            raise ValueError(f"variable {v} is not bound in the formula")
    if not alpha:
        return pcnf
    clauses = []
    for c in pcnf.clauses:
        kept = []
        sat = False
        for l in c:
            s = lit_satisfied(l, alpha)
            if s is None:
                kept.append(l)
            elif s:
                sat = True
                break
        if not sat:
            clauses.append(tuple(kept))
    blocks = normalize_blocks(
        (b.kind, [v for v in b.vars if v not in alpha]) for b in pcnf.blocks
    )
    return PCNF(blocks, tuple(clauses), pcnf.num_vars)


def parse_qdimacs(text: Union[str, TextIO]) -> PCNF:
    if not isinstance(text, str):
        text = text.read()
    header = None
    prefix: list[Tuple[str, list]] = []
    bound: set = set()
    clauses: list[Clause] = []
    pending: list[int] = []
    pending_line = 0
    for lineno, raw in enumerate(io.StringIO(text), start=1):
        tokens = raw.split()
        if not tokens or tokens[0] == "c":
            continue
        head = tokens[0]
        if head == "p":
            if header is not None:
                raise QDIMACSError("duplicate header", lineno)
            if len(tokens) != 4 or tokens[1] != "cnf":
                raise QDIMACSError("malformed header, expected 'p cnf <vars> <clauses>'", lineno)
            try:
                header = (int(tokens[2]), int(tokens[3]))
            except ValueError:
                raise QDIMACSError("non-integer header field", lineno) from None
            if header[0] < 0 or header[1] < 0:
                raise QDIMACSError("negative header field", lineno)
            continue
        if header is None:
            raise QDIMACSError("content before 'p cnf' header", lineno)
        if head in (EXISTS, FORALL):
            if clauses or pending:
                raise QDIMACSError("quantifier line after clauses", lineno)
            try:
                nums = [int(t) for t in tokens[1:]]
            except ValueError:
                raise QDIMACSError("non-integer variable in prefix", lineno) from None
            if not nums or nums[-1] != 0 or 0 in nums[:-1]:
                raise QDIMACSError("quantifier line must end with a single 0", lineno)
            vs = nums[:-1]
            if not vs:
                raise QDIMACSError("empty quantifier block", lineno)
            for v in vs:
                if v < 1:
                    raise QDIMACSError(f"invalid variable {v} in prefix", lineno)
                if v > header[0]:
                    raise QDIMACSError(f"variable {v} exceeds declared maximum {header[0]}", lineno)
                if v in bound:
                    raise QDIMACSError(f"variable {v} bound twice", lineno)
                bound.add(v)
            prefix.append((head, vs))
            continue
        try:
            nums = [int(t) for t in tokens]
        except ValueError:
            raise QDIMACSError(f"unexpected token in {raw.strip()!r}", lineno) from None
        for n in nums:
            if not pending:
                pending_line = lineno
            if n == 0:
                clauses.append(canonical_clause(pending))
                pending = []
            else:
                if abs(n) > header[0]:
                    raise QDIMACSError(
                        f"variable {abs(n)} exceeds declared maximum {header[0]}", lineno
                    )
                pending.append(n)
    if header is None:
        raise QDIMACSError("missing 'p cnf' header")
    if pending:
        raise QDIMACSError("clause not terminated by 0", pending_line)
    if len(clauses) != header[1]:
        raise QDIMACSError(f"header declares {header[1]} clauses, found {len(clauses)}")
    free = sorted({abs(l) for c in clauses for l in c} - bound)
    if free:
        prefix.insert(0, (EXISTS, free))
    return PCNF(normalize_blocks(prefix), tuple(clauses), header[0])


def emit_qdimacs(pcnf: PCNF) -> str:
    out = [f"p cnf {pcnf.num_vars} {pcnf.num_clauses}"]
    for b in pcnf.blocks:
        out.append(f"{b.kind} {' '.join(map(str, b.vars))} 0")
    for c in pcnf.clauses:
        out.append(" ".join([*map(str, c), "0"]))
    return "\n".join(out) + "\n"


def read_qdimacs(path) -> PCNF:
    with open(path) as fh:
        return parse_qdimacs(fh.read())


def evaluate_matrix(pcnf: PCNF, alpha: Assignment) -> bool:
    return all(any(lit_satisfied(l, alpha) for l in c) for c in pcnf.clauses)
