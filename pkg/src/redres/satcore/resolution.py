"""Propositional resolution proofs: extraction from the CDCL engine and checking."""

from __future__ import annotations

from dataclasses import dataclass
from typing import FrozenSet, Iterable, Optional, Tuple


class SatisfiableError(ValueError):
    """Raised when a refutation is requested for a satisfiable clause set."""


class ResolutionViolation(ValueError):
    def __init__(self, node: int, condition: str):
        self.node = node
        self.condition = condition
        super().__init__(f"node {node}: {condition}")


Step = Optional[Tuple[int, int, int]]


@dataclass(frozen=True)
class ResolutionProof:
    """A resolution DAG in topological order.

    ``steps[n]`` is ``None`` for a leaf, otherwise ``(left, right, pivot)``
    with ``left, right < n`` and ``pivot`` a variable id.
    """

    clauses: Tuple[FrozenSet[int], ...]
    steps: Tuple[Step, ...]
    root: int

    @property
    def leaves(self) -> Tuple[int, ...]:
        return tuple(n for n, s in enumerate(self.steps) if s is None)

    @property
    def num_steps(self) -> int:
        return sum(s is not None for s in self.steps)

    @property
    def size(self) -> int:
        return len(self.clauses)

    @property
    def inner_nodes(self) -> int:
        return sum(1 for n, s in enumerate(self.steps) if s is not None and n != self.root)

    def leaf_clauses(self):
        return [self.clauses[n] for n in self.leaves]

    def to_json(self):
        return {
            "clauses": [sorted(c, key=lambda l: (abs(l), l > 0)) for c in self.clauses],
            "steps": [list(s) if s is not None else None for s in self.steps],
            "root": self.root,
        }

    @classmethod
    def from_json(cls, data) -> "ResolutionProof":
        return cls(
            tuple(frozenset(c) for c in data["clauses"]),
            tuple(tuple(s) if s is not None else None for s in data["steps"]),
            data["root"],
        )

    def relabel(self, mapping) -> "ResolutionProof":
        """Rename variables through ``mapping`` (var -> var)."""

        def lit(l):
            v = mapping.get(abs(l), abs(l))
            return v if l > 0 else -v

        return ResolutionProof(
            tuple(frozenset(lit(l) for l in c) for c in self.clauses),
            tuple(s if s is None else (s[0], s[1], mapping.get(s[2], s[2])) for s in self.steps),
            self.root,
        )


def resolve(left: FrozenSet[int], right: FrozenSet[int], pivot: int) -> FrozenSet[int]:
    return (left | right) - {pivot, -pivot}


def check_resolution_proof(proof: ResolutionProof, inputs: Iterable[Iterable[int]]) -> None:
    """Raise :class:`ResolutionViolation` unless ``proof`` refutes ``inputs``."""
    allowed = {frozenset(c) for c in inputs}
    n = len(proof.clauses)
    if len(proof.steps) != n:
        raise ResolutionViolation(-1, "malformed proof: step and clause lists differ in length")
    if not 0 <= proof.root < n:
        raise ResolutionViolation(proof.root, "root index out of range")
    for node, (clause, step) in enumerate(zip(proof.clauses, proof.steps)):
        if step is None:
            if clause not in allowed:
                raise ResolutionViolation(node, "foreign leaf: clause not among the inputs")
            continue
        left, right, pivot = step
        if not (0 <= left < node and 0 <= right < node):
            raise ResolutionViolation(node, "operand does not precede its resolvent")
        if pivot <= 0:
            raise ResolutionViolation(node, "pivot must be a positive variable id")
        lc, rc = proof.clauses[left], proof.clauses[right]
        if not ((pivot in lc and -pivot in rc) or (-pivot in lc and pivot in rc)):
            raise ResolutionViolation(node, f"operands lack complementary pair on pivot {pivot}")
        if clause != resolve(lc, rc, pivot):
            raise ResolutionViolation(node, "resolvent does not match (left | right) minus pivot")
    if proof.clauses[proof.root]:
        raise ResolutionViolation(proof.root, "root is not the empty clause")


def _from_engine(solver) -> ResolutionProof:
    clauses: list = []
    steps: list = []
    memo: dict = {}

    def deps(chain):
        return [chain[0]] + [c for _, c in chain[1:]]

    def emit(chain):
        cur = memo[chain[0]]
        for var, c in chain[1:]:
            other = memo[c]
            clauses.append(resolve(clauses[cur], clauses[other], var))
            steps.append((cur, other, var))
            cur = len(clauses) - 1
        return cur

    # explicit stack: learned-clause chains can nest deeper than the recursion limit
    stack = deps(solver.final_chain)
    while stack:
        cid = stack[-1]
        if cid in memo:
            stack.pop()
            continue
        chain = solver.chains.get(cid)
        if chain is None:
            clauses.append(frozenset(solver.original[cid]))
            steps.append(None)
            memo[cid] = len(clauses) - 1
            stack.pop()
            continue
        missing = [d for d in deps(chain) if d not in memo]
        if missing:
            stack.extend(missing)
            continue
        stack.pop()
        memo[cid] = emit(chain)
    root = emit(solver.final_chain)
    return ResolutionProof(tuple(clauses), tuple(steps), root)


def extract_resolution_proof(clauses: Iterable[Iterable[int]], seed: int = 0) -> ResolutionProof:
    """Refute ``clauses`` with a fresh proof-logging CDCL run."""
    from . import Engine

    solver = Engine(seed=seed, proof=True)
    for c in clauses:
        solver.add_clause(list(c))
        if solver.unsat:
            break
    if not solver.unsat:
        status, _ = solver.solve([])
        if status:
            raise SatisfiableError("clause set is satisfiable")
    return _from_engine(solver)
