"""CEGAR solving over quantifier levels with clause-selector abstractions.

Each level owns an incremental SAT instance over its own variables plus
per-clause selectors:

* existential level ``k``: ``b_i`` (clause already satisfied further out)
  and ``a_i`` (clause deferred to inner levels), encoded as
  ``(b_i | a_i | lit(i,k))``;
* universal level ``k``: ``r_i`` (clause left falsified here), encoded as
  ``(-r_i | -l)`` for each ``l`` in ``lit(i,k)``.

A level is called with the set of obligations (clauses not yet satisfied)
and answers SAT, or UNSAT with a core of obligations that cannot be
satisfied together below the level.  Cores feed refinements one level up.
With proof logging each UNSAT answer also carries the proof-object node
that justifies it.
"""

from __future__ import annotations

import time
from collections import Counter
from dataclasses import dataclass, field
from typing import Dict, FrozenSet, List, Optional, Tuple

from .calculus import ProofBuilder, RedResProof, lits_of
from .expansion import AnnotationRegistry, ExpansionTree, Label, expand_path, expand_tree
from .formula import PCNF, lit_at
from .satcore import BACKENDS, BudgetExhausted, SatInstance, SatisfiableError, extract_resolution_proof

MODES = ("plain", "strengthen", "expansion", "both")


class LimitExceeded(RuntimeError):
    """A time or conflict budget ran out before a verdict was reached."""


@dataclass(frozen=True)
class SolverConfig:
    use_strengthen: bool = False
    use_expansion: bool = False
    seed: int = 0
    proof_logging: bool = False
    time_limit: Optional[float] = None
    conflict_limit: Optional[int] = None
    trace: bool = False
    backend: Optional[str] = None

    @classmethod
    def from_mode(cls, mode: str, **kw) -> "SolverConfig":
        if mode not in MODES:
            raise ValueError(f"unknown refinement mode {mode!r}; choose from {', '.join(MODES)}")
        return cls(use_strengthen=mode in ("strengthen", "both"), use_expansion=mode in ("expansion", "both"), **kw)

    @property
    def mode(self) -> str:
        if self.use_strengthen and self.use_expansion:
            return "both"
        return "strengthen" if self.use_strengthen else "expansion" if self.use_expansion else "plain"


@dataclass
class SolverStats:
    sat_calls: Counter = field(default_factory=Counter)
    refinements: Counter = field(default_factory=Counter)
    strengthen_groups: Counter = field(default_factory=Counter)
    iterations: int = 0
    proof_size: int = 0
    seconds: float = 0.0

    @property
    def inner_refinements(self) -> int:
        return sum(self.refinements.values())

    def report(self) -> List[str]:
        lines = [f"sat_calls[{k}] {v}" for k, v in sorted(self.sat_calls.items())]
        for kind in ("clausal", "strengthen", "expansion", "universal"):
            lines.append(f"refinements.{kind} {self.refinements[kind]}")
        lines.append(f"strengthen_groups.singleton {self.strengthen_groups['singleton']}")
        lines.append(f"strengthen_groups.larger {self.strengthen_groups['larger']}")
        lines.append(f"iterations {self.iterations}")
        lines.append(f"proof_size {self.proof_size}")
        lines.append(f"seconds {self.seconds:.3f}")
        return lines


@dataclass(frozen=True)
class SolveOutcome:
    verdict: bool
    proof: Optional[RedResProof]
    stats: SolverStats
    trace: Tuple[tuple, ...] = ()


@dataclass(frozen=True)
class LevelResult:
    sat: bool
    clauses: FrozenSet[int] = frozenset()
    node: Optional[int] = None
    move: Optional[Label] = None


SAT = LevelResult(True)


@dataclass
class _PoolEntry:
    node: int
    lits: FrozenSet[int]
    clauses: FrozenSet[int]


class _Level:
    def __init__(self, solver: "CegarSolver", k: int):
        pcnf = solver.pcnf
        self.k = k
        self.sat = SatInstance(seed=solver.config.seed + k, engine=solver.engine)
        self.x: Dict[int, int] = {v: self.sat.new_var() for v in pcnf.blocks[k - 1].vars}
        self.lits = {i: tuple(sorted(lit_at(pcnf, i, k, "="), key=abs)) for i in range(1, pcnf.num_clauses + 1)}
        self.inner = {i: lit_at(pcnf, i, k, ">") for i in range(1, pcnf.num_clauses + 1)}
        if k == 1:
            self.relevant = list(range(1, pcnf.num_clauses + 1))
        else:
            self.relevant = [i for i in self.lits if self.lits[i] or self.inner[i]]

    def sat_lit(self, l: int) -> int:
        v = self.x[abs(l)]
        return v if l > 0 else -v

    def satisfied(self, i: int, model) -> bool:
        return any(model.value(self.sat_lit(l)) for l in self.lits[i])


class _ExistsLevel(_Level):
    def __init__(self, solver, k):
        super().__init__(solver, k)
        self.b: Dict[int, int] = {}
        self.a: Dict[int, int] = {}
        for i in self.relevant:
            self.b[i] = self.sat.new_var()
            clause = [self.b[i]] + [self.sat_lit(l) for l in self.lits[i]]
            if self.inner[i]:
                self.a[i] = self.sat.new_var()
                clause.append(self.a[i])
            self.sat.add_clause(clause)
        self.clause_of_b = {v: i for i, v in self.b.items()}
        self.groups: Dict[int, Tuple[int, ...]] = {}
        self.pool: List[_PoolEntry] = []
        self.expanded: List[Label] = []
        self.copies: Dict[Tuple[int, Label], int] = {}
        self.exp_cache: Dict[Tuple[int, Label], Optional[FrozenSet[int]]] = {}

    def group(self, i: int) -> Tuple[int, ...]:
        got = self.groups.get(i)
        if got is None:
            mine = self.inner[i]
            got = tuple(j for j in self.a if self.inner[j] <= mine)
            self.groups[i] = got
        return got


class _ForallLevel(_Level):
    def __init__(self, solver, k):
        super().__init__(solver, k)
        self.r: Dict[int, int] = {}
        for i in self.relevant:
            lits = set(self.lits[i])
            if any(-l in lits for l in lits):
                continue  # can never be falsified here
            self.r[i] = self.sat.new_var()
            for l in self.lits[i]:
                self.sat.add_clause([-self.r[i], -self.sat_lit(l)])


class CegarSolver:
    def __init__(self, pcnf: PCNF, config: SolverConfig | None = None):
        self.pcnf = pcnf
        self.config = config or SolverConfig()
        if self.config.backend is not None and self.config.backend not in BACKENDS:
            raise ValueError(f"SAT backend {self.config.backend!r} is not available; have {', '.join(BACKENDS)}")
        self.engine = BACKENDS[self.config.backend] if self.config.backend else None
        self.stats = SolverStats()
        self.trace: List[tuple] = []
        self.pb = ProofBuilder(pcnf) if self.config.proof_logging else None
        self.registry = AnnotationRegistry(0, allocate=self.pb.fresh_var) if self.pb else None
        self._levels: Dict[int, _Level] = {}
        universals = [k for k in range(1, pcnf.depth + 1) if pcnf.kind(k) == "a"]
        self.innermost_universal = universals[-1] if universals else None
        self._deadline = None

    # -- plumbing ----------------------------------------------------------------

    def level(self, k: int) -> _Level:
        lv = self._levels.get(k)
        if lv is None:
            cls = _ForallLevel if self.pcnf.kind(k) == "a" else _ExistsLevel
            lv = self._levels[k] = cls(self, k)
        return lv

    def _query(self, lv: _Level, assumptions):
        if self._deadline is not None and time.monotonic() > self._deadline:
            raise LimitExceeded("time limit exceeded")
        self.stats.sat_calls[lv.k] += 1
        try:
            return lv.sat.solve(assumptions, self.config.conflict_limit)
        except BudgetExhausted:
            raise LimitExceeded("conflict limit exceeded") from None

    # -- entry point -----------------------------------------------------------------

    def run(self) -> SolveOutcome:
        start = time.monotonic()
        if self.config.time_limit is not None:
            self._deadline = start + self.config.time_limit
        pcnf = self.pcnf
        obligations = frozenset(range(1, pcnf.num_clauses + 1))
        if pcnf.depth == 0:
            if obligations:
                res = LevelResult(False, frozenset({1}), self.pb.init(1, 0) if self.pb else None)
            else:
                res = SAT
        elif pcnf.kind(1) == "e":
            res = self.solve_exists(1, obligations)
        else:
            res = self.solve_forall(1, obligations)
        proof = None
        if not res.sat and self.pb is not None:
            proof = self.pb.build(res.node)
            self.stats.proof_size = proof.size
        self.stats.seconds = time.monotonic() - start
        return SolveOutcome(res.sat, proof, self.stats, tuple(self.trace))

    # -- existential levels ------------------------------------------------------------

    def solve_exists(self, k: int, obligations: FrozenSet[int]) -> LevelResult:
        if not obligations:
            return SAT
        lv: _ExistsLevel = self.level(k)
        assumptions = [-lv.b[i] if i in obligations else lv.b[i] for i in lv.relevant]
        while True:
            self.stats.iterations += 1
            out = self._query(lv, assumptions)
            if not out.sat:
                failed = frozenset(lv.clause_of_b[-l] for l in out.core if l < 0 and -l in lv.clause_of_b)
                if self.pb is None:
                    return LevelResult(False, failed)
                node = self._extract(lv, failed)
                return LevelResult(False, frozenset(self.pb.node(node).clauses), node)
            deferred = frozenset(i for i in obligations if i in lv.a and not lv.satisfied(i, out))
            if not deferred:
                return SAT
            inner = self.solve_forall(k + 1, deferred)
            if inner.sat:
                return SAT
            if self.config.trace:
                self.trace.append(("core", k, inner.clauses))
            if self.config.use_strengthen:
                self.refine_strengthen(lv, inner.clauses, inner.node)
            else:
                self.refine_clausal(lv, inner.clauses, inner.node)
            if (
                self.config.use_expansion
                and k + 1 == self.innermost_universal
                and inner.move is not None
                and inner.move not in lv.expanded
            ):
                self.refine_expansion(lv, inner.move)

    def refine_clausal(self, lv: _ExistsLevel, core: FrozenSet[int], node: Optional[int] = None) -> None:
        """One clause of ``core`` must be satisfied at this level or further out."""
        self.stats.refinements["clausal"] += 1
        lv.sat.add_clause([-lv.a[i] for i in sorted(core)])
        if node is not None:
            lv.pool.append(_PoolEntry(node, lits_of(self.pcnf, self.pb.node(node)), frozenset(core)))

    def refine_strengthen(self, lv: _ExistsLevel, core: FrozenSet[int], node: Optional[int] = None) -> None:
        """For some ``i`` in ``core``, every clause whose inner part is
        contained in that of ``i`` must be satisfied at this level."""
        self.stats.refinements["strengthen"] += 1
        sat = lv.sat
        picks = []
        cur = node
        for i in sorted(core):
            group = lv.group(i)
            self.stats.strengthen_groups["singleton" if len(group) == 1 else "larger"] += 1
            if self.config.trace:
                self.trace.append(("group", lv.k, i, group))
            s = sat.new_var()
            for j in group:
                sat.add_clause([-s, -lv.a[j]])
            picks.append(s)
            if cur is not None:
                cur, sides = self.pb.strengthen(cur, i, group)
                for j, side in zip(group, sides):
                    lv.pool.append(_PoolEntry(side, lits_of(self.pcnf, self.pb.node(side)), frozenset({j})))
        sat.add_clause(picks)
        if cur is not None:
            lv.pool.append(_PoolEntry(cur, lits_of(self.pcnf, self.pb.node(cur)), frozenset()))

    def refine_expansion(self, lv: _ExistsLevel, move: Label) -> None:
        """Add the instantiation of every deferrable clause under the
        universal ``move`` of the next level, with renamed inner variables."""
        self.stats.refinements["expansion"] += 1
        lv.expanded.append(move)
        k = lv.k
        alpha = dict(move)
        for i in lv.a:
            if any(alpha.get(abs(l)) == (l > 0) for l in lit_at(self.pcnf, i, k + 1, "=")):
                continue
            clause = [lv.b[i]] + [lv.sat_lit(l) for l in lv.lits[i]]
            for l in sorted(lit_at(self.pcnf, i, k + 1, ">"), key=abs):
                key = (abs(l), move)
                v = lv.copies.get(key)
                if v is None:
                    v = lv.copies[key] = lv.sat.new_var()
                clause.append(v if l > 0 else -v)
            lv.sat.add_clause(clause)

    # -- universal levels ---------------------------------------------------------------

    def solve_forall(self, k: int, obligations: FrozenSet[int]) -> LevelResult:
        if not obligations:
            return SAT
        lv: _ForallLevel = self.level(k)
        sat = lv.sat
        act = sat.new_var()
        sat.add_clause([-act] + [lv.r[i] for i in sorted(obligations) if i in lv.r])
        assumptions = [act] + [-lv.r[i] for i in lv.r if i not in obligations]
        try:
            while True:
                self.stats.iterations += 1
                out = self._query(lv, assumptions)
                if not out.sat:
                    return SAT
                move = tuple(sorted((v, int(out.value(sv))) for v, sv in lv.x.items()))
                falsified = frozenset(i for i in obligations if not lv.satisfied(i, out))
                bottom = [i for i in sorted(falsified) if not lv.inner[i]]
                if bottom:
                    i = bottom[0]
                    node = self.pb.forall_red(self.pb.init(i, k)) if self.pb else None
                    return LevelResult(False, frozenset({i}), node, move)
                inner = self.solve_exists(k + 1, falsified)
                if not inner.sat:
                    node = self.pb.forall_red(inner.node) if self.pb else None
                    return LevelResult(False, inner.clauses, node, move)
                # the existential player copes with `falsified`, hence with any subset of it
                self.stats.refinements["universal"] += 1
                sat.add_clause([lv.r[i] for i in lv.r if i not in falsified])
                if falsified == obligations:
                    return SAT
        finally:
            sat.add_clause([-act])

    # -- proof extraction ------------------------------------------------------------------

    def _expanded_clause(self, lv: _ExistsLevel, i: int, move: Label) -> Optional[FrozenSet[int]]:
        key = (i, move)
        if key not in lv.exp_cache:
            prefix = self.pcnf.blocks[lv.k - 1:]
            ec = expand_path([move], lit_at(self.pcnf, i, lv.k, ">="), prefix)
            lv.exp_cache[key] = None if ec is None else frozenset(self.registry.clause(ec))
        return lv.exp_cache[key]

    def _extract(self, lv: _ExistsLevel, failed: FrozenSet[int]) -> int:
        """Proof node at level ``k-1`` for the failed obligations.

        The refutation is recomputed over the proof objects mirroring the
        abstraction clauses that are active under ``failed``; if expansion
        clauses take part, the step becomes an expansion refutation in which
        leaf clauses of this level are folded into the expanded clause set.
        """
        pcnf, pb, k = self.pcnf, self.pb, lv.k
        objects: Dict[FrozenSet[int], int] = {}
        source: Dict[FrozenSet[int], Tuple[int, Optional[Label]]] = {}
        for i in sorted(failed):
            if i not in lv.a:
                nid = pb.init(i, k)
                lits = lits_of(pcnf, pb.node(nid))
                objects.setdefault(lits, nid)
                source.setdefault(lits, (i, None))
        for entry in lv.pool:
            if entry.clauses <= failed:
                objects.setdefault(entry.lits, entry.node)
        expanded: Dict[FrozenSet[int], Tuple[int, Label]] = {}
        for move in lv.expanded:
            for i in sorted(failed):
                if i in lv.a:
                    c = self._expanded_clause(lv, i, move)
                    if c is not None and c not in objects:
                        expanded.setdefault(c, (i, move))
        pi = None
        if expanded:
            # an expansion refutation on its own is preferred when it exists
            try:
                pi = extract_resolution_proof(list(source) + list(expanded), seed=self.config.seed)
            except SatisfiableError:
                pass
        if pi is None:
            try:
                pi = extract_resolution_proof(list(objects) + list(expanded), seed=self.config.seed)
            except SatisfiableError:  # pragma: no cover - would mean an unsound core
                raise AssertionError(f"level {k}: failed obligations {sorted(failed)} are not refutable") from None
        leaves = pi.leaf_clauses()
        moves = list(dict.fromkeys(expanded[c][1] for c in leaves if c in expanded))
        if not moves:
            return pb.res(list(dict.fromkeys(objects[c] for c in leaves)), pi)
        clause_ids = sorted({expanded[c][0] if c in expanded else source[c][0] for c in leaves if c in expanded or c in source})
        premises = list(dict.fromkeys(objects[c] for c in leaves if c not in expanded and c not in source))
        tree = ExpansionTree([[m] for m in moves], depth=1)
        annotated = {}
        for ec in expand_tree(tree, pcnf.blocks[k - 1:], [lit_at(pcnf, i, k, ">=") for i in clause_ids]):
            for var, _ in ec:
                if var.annotation:
                    annotated[self.registry.id(var)] = var
        return pb.exp_res(k, clause_ids, tree, annotated, pi, premises)


def solve(pcnf: PCNF, config: SolverConfig | None = None) -> SolveOutcome:
    return CegarSolver(pcnf, config).run()


def solve_mode(pcnf: PCNF, mode: str = "both", **kw) -> SolveOutcome:
    return solve(pcnf, SolverConfig.from_mode(mode, **kw))
