"""Level-wise refutations over clause-index proof objects.

A proof object ``P^k`` is a set of clause ids tied to quantifier level ``k``
(optionally extended by fresh literals); its literal view is the union of
the level-``k`` literals of its clauses plus the fresh literals.  Proofs are
DAGs of rule applications over such objects:

* ``init``        ``{i}^k`` for a clause with no literal deeper than ``k``;
* ``res``         level ``k`` (existential) to ``k-1`` via a propositional
                  refutation of the premises' literal views;
* ``forall_red``  level ``k`` (universal) to ``k-1`` if the literal view is
                  not tautological;
* ``strengthen``  swap a clause for a fresh literal ``a`` plus objects
                  ``{-a, j}^k`` for clauses ``j`` whose inner part is a subset;
* ``exp_res``     refutation of a universal expansion of the subformula
                  starting at level ``k``.
"""

from __future__ import annotations

import json
from dataclasses import dataclass, field
from typing import Dict, FrozenSet, Iterable, List, Mapping, Optional, Sequence, Tuple

from .expansion import (
    AnnotatedVar,
    ExpansionError,
    ExpansionTree,
    expand_tree,
)
from .formula import EXISTS, FORALL, PCNF, lit_at
from .satcore import ResolutionProof, ResolutionViolation, check_resolution_proof
from .satcore.resolution import resolve

INIT = "init"
RES = "res"
FORALL_RED = "forall_red"
STRENGTHEN = "strengthen"
EXP_RES = "exp_res"
RULES = (INIT, RES, FORALL_RED, STRENGTHEN, EXP_RES)


class ProofViolation(ValueError):
    """A rule side condition failed.

    ``condition`` is a stable dotted tag (e.g. ``"forall_red.tautology"``).
    """

    def __init__(self, condition: str, detail: str = "", node: int | None = None, rule: str | None = None):
        self.condition = condition
        self.detail = detail
        self.node = node
        self.rule = rule or condition.split(".")[0]
        super().__init__(self._message())

    def _message(self):
        where = f"node {self.node}, " if self.node is not None else ""
        text = f"{where}rule {self.rule}: {self.condition}"
        return f"{text} ({self.detail})" if self.detail else text

    def at(self, node: int, rule: str) -> "ProofViolation":
        self.node = node
        self.rule = rule
        self.args = (self._message(),)
        return self


def _sorted_lits(lits: Iterable[int]) -> Tuple[int, ...]:
    return tuple(sorted(set(lits), key=lambda l: (abs(l), l > 0)))


@dataclass(frozen=True)
class ProofObject:
    clauses: Tuple[int, ...]
    level: int
    fresh: Tuple[int, ...] = ()

    def __post_init__(self):
        object.__setattr__(self, "clauses", tuple(sorted(set(self.clauses))))
        object.__setattr__(self, "fresh", _sorted_lits(self.fresh))

    def __str__(self):
        members = [str(i) for i in self.clauses] + [f"f{l}" for l in self.fresh]
        return "{" + ",".join(members) + "}^" + str(self.level)


def lits_of(pcnf: PCNF, obj: ProofObject) -> FrozenSet[int]:
    k = obj.level
    if k == 0 or k > pcnf.depth:
        out: set = set()
    else:
        out = {l for i in obj.clauses for l in pcnf.clause(i) if pcnf.var_level[abs(l)] == k}
    out.update(obj.fresh)
    return frozenset(out)


def outer_clause(pcnf: PCNF, obj: ProofObject) -> FrozenSet[int]:
    """The clause a proof object stands for: its members' literals up to its level."""
    k = obj.level
    return frozenset(l for i in obj.clauses for l in pcnf.clause(i) if pcnf.var_level[abs(l)] <= k)


def _check_clause_id(pcnf: PCNF, i: int, rule: str):
    if not isinstance(i, int) or not 1 <= i <= pcnf.num_clauses:
        raise ProofViolation(f"{rule}.clause_id", f"clause id {i} out of range 1..{pcnf.num_clauses}")


def _check_level(pcnf: PCNF, k: int, rule: str, lo: int = 1):
    if not lo <= k <= pcnf.depth:
        raise ProofViolation(f"{rule}.level", f"level {k} outside {lo}..{pcnf.depth}")


# -- rules -------------------------------------------------------------------


def apply_init(pcnf: PCNF, i: int, k: int) -> ProofObject:
    _check_clause_id(pcnf, i, INIT)
    _check_level(pcnf, k, INIT, lo=0)
    inner = lit_at(pcnf, i, k, ">")
    if inner:
        raise ProofViolation("init.inner_literals", f"clause {i} has literals {sorted(inner)} deeper than level {k}")
    return ProofObject((i,), k)


def _check_pi(pi: ResolutionProof, inputs, rule: str):
    try:
        check_resolution_proof(pi, inputs)
    except ResolutionViolation as exc:
        if "foreign leaf" in exc.condition:
            tag = "pi_leaf"
        elif "complementary" in exc.condition or "pivot" in exc.condition:
            tag = "pi_pivot"
        else:
            tag = "pi"
        raise ProofViolation(f"{rule}.{tag}", f"embedded refutation, {exc}") from None


def _same_level(premises: Sequence[ProofObject], rule: str) -> int:
    if not premises:
        raise ProofViolation(f"{rule}.premises", "at least one premise required")
    k = premises[0].level
    for p in premises[1:]:
        if p.level != k:
            raise ProofViolation(f"{rule}.level", f"premises at levels {p.level} and {k}")
    return k


def apply_res(pcnf: PCNF, premises: Sequence[ProofObject], pi: ResolutionProof) -> ProofObject:
    k = _same_level(premises, RES)
    _check_level(pcnf, k, RES)
    if pcnf.kind(k) != EXISTS:
        raise ProofViolation("res.kind", f"level {k} is universal")
    _check_pi(pi, [lits_of(pcnf, p) for p in premises], RES)
    return ProofObject(tuple(i for p in premises for i in p.clauses), k - 1)


def apply_forall_red(pcnf: PCNF, premise: ProofObject) -> ProofObject:
    k = premise.level
    _check_level(pcnf, k, FORALL_RED)
    if pcnf.kind(k) != FORALL:
        raise ProofViolation("forall_red.kind", f"level {k} is existential")
    if premise.fresh:
        raise ProofViolation("forall_red.fresh", "premise carries fresh literals")
    lits = lits_of(pcnf, premise)
    for l in sorted(lits, key=abs):
        if -l in lits:
            raise ProofViolation("forall_red.tautology", f"complementary pair {{{-abs(l)}, {abs(l)}}}")
    return ProofObject(premise.clauses, k - 1)


def apply_strengthen(
    pcnf: PCNF, premise: ProofObject, i: int, group: Sequence[int], fresh_var: int
) -> Tuple[ProofObject, List[ProofObject]]:
    k = premise.level
    _check_level(pcnf, k, STRENGTHEN)
    if pcnf.kind(k) != EXISTS:
        raise ProofViolation("strengthen.kind", f"level {k} is universal")
    if i not in premise.clauses:
        raise ProofViolation("strengthen.pivot_clause", f"clause {i} is not in the premise")
    if fresh_var <= pcnf.num_vars or any(abs(l) == fresh_var for l in premise.fresh):
        raise ProofViolation("strengthen.fresh", f"variable {fresh_var} is not fresh")
    inner_i = lit_at(pcnf, i, k, ">")
    for j in group:
        _check_clause_id(pcnf, j, STRENGTHEN)
        extra = lit_at(pcnf, j, k, ">") - inner_i
        if extra:
            raise ProofViolation(
                "strengthen.subset", f"clause {j} has inner literal {sorted(extra)[0]} not in clause {i}"
            )
    main = ProofObject(tuple(c for c in premise.clauses if c != i), k, premise.fresh + (fresh_var,))
    side = [ProofObject((j,), k, (-fresh_var,)) for j in group]
    return main, side


def apply_exp_res(
    pcnf: PCNF,
    level: int,
    clause_ids: Sequence[int],
    projections: Sequence[Iterable[int]],
    tree: ExpansionTree,
    annotated: Mapping[int, AnnotatedVar],
    pi: ResolutionProof,
    premises: Sequence[ProofObject] = (),
) -> ProofObject:
    """Expansion-refutation rule.

    ``projections[n]`` must be the part of clause ``clause_ids[n]`` at
    levels ``>= level``.  ``annotated`` names the integer ids used by ``pi``
    for annotated variables.  Optional ``premises`` (proof objects at
    ``level``) contribute their literal views as extra clauses.
    """
    k = level
    _check_level(pcnf, k, EXP_RES)
    if pcnf.kind(k) != EXISTS:
        raise ProofViolation("exp_res.kind", f"level {k} is universal")
    if len(clause_ids) != len(projections):
        raise ProofViolation("exp_res.projection", "clause ids and projections differ in length")
    if not clause_ids:
        raise ProofViolation("exp_res.projection", "empty clause set")
    for i, proj in zip(clause_ids, projections):
        _check_clause_id(pcnf, i, EXP_RES)
        want = lit_at(pcnf, i, k, ">=")
        if frozenset(proj) != want:
            raise ProofViolation(
                "exp_res.projection", f"clause {i}: {sorted(proj)} is not its projection {sorted(want)} at >= {k}"
            )
    for p in premises:
        if p.level != k:
            raise ProofViolation("exp_res.level", f"premise at level {p.level}, rule at {k}")
    prefix = pcnf.blocks[k - 1:]
    n_univ = sum(b.universal for b in prefix)
    if (tree.depth or 0) != n_univ:
        raise ProofViolation("exp_res.tree_depth", f"tree depth {tree.depth} but {n_univ} universal blocks below level {k}")
    seen_ids = set()
    for vid, av in annotated.items():
        if vid <= pcnf.num_vars:
            raise ProofViolation("exp_res.annotation", f"id {vid} collides with a formula variable")
        if av in seen_ids:
            raise ProofViolation("exp_res.annotation", f"{av} named twice")
        if not av.annotation or av.base not in pcnf.var_level or pcnf.kind(pcnf.var_level[av.base]) != EXISTS:
            raise ProofViolation("exp_res.annotation", f"{av} is not an annotated existential variable")
        seen_ids.add(av)
    try:
        formula = expand_tree(tree, prefix, projections)
    except ExpansionError as exc:
        raise ProofViolation("exp_res.tree_depth", str(exc)) from None
    by_var = {av: vid for vid, av in annotated.items()}
    inputs = []
    for ec in formula:
        try:
            inputs.append(frozenset((by_var[v] if v.annotation else v.base) * (1 if pos else -1) for v, pos in ec))
        except KeyError:
            continue
    inputs.extend(lits_of(pcnf, p) for p in premises)
    _check_pi(pi, inputs, EXP_RES)
    ids = tuple(clause_ids) + tuple(i for p in premises for i in p.clauses)
    return ProofObject(ids, k - 1)


# -- proof DAG -----------------------------------------------------------------


@dataclass(frozen=True)
class RuleApp:
    rule: str
    premises: Tuple[int, ...]
    conclusions: Tuple[int, ...]
    clause: Optional[int] = None
    level: Optional[int] = None
    pi: Optional[ResolutionProof] = None
    group: Tuple[int, ...] = ()
    fresh_var: Optional[int] = None
    clause_ids: Tuple[int, ...] = ()
    projections: Tuple[Tuple[int, ...], ...] = ()
    tree: Optional[ExpansionTree] = None
    annotated: Optional[Dict[int, AnnotatedVar]] = field(default=None, compare=False)

    def to_json(self):
        out = {"rule": self.rule, "premises": list(self.premises), "conclusions": list(self.conclusions)}
        if self.rule == INIT:
            out.update(clause=self.clause, level=self.level)
        elif self.rule == STRENGTHEN:
            out.update(clause=self.clause, group=list(self.group), fresh_var=self.fresh_var)
        elif self.rule == EXP_RES:
            out.update(
                level=self.level,
                clause_ids=list(self.clause_ids),
                projections=[list(p) for p in self.projections],
                tree=self.tree.to_json(),
                tree_depth=self.tree.depth,
                annotated={str(k): str(v) for k, v in sorted(self.annotated.items())},
            )
        if self.pi is not None:
            out["pi"] = self.pi.to_json()
        return out

    @classmethod
    def from_json(cls, d) -> "RuleApp":
        tree = None
        if "tree" in d:
            tree = ExpansionTree.from_json(d["tree"])
            if not d["tree"]:
                tree.depth = d.get("tree_depth", 0)
        return cls(
            rule=d["rule"],
            premises=tuple(d.get("premises", ())),
            conclusions=tuple(d.get("conclusions", ())),
            clause=d.get("clause"),
            level=d.get("level"),
            pi=ResolutionProof.from_json(d["pi"]) if "pi" in d else None,
            group=tuple(d.get("group", ())),
            fresh_var=d.get("fresh_var"),
            clause_ids=tuple(d.get("clause_ids", ())),
            projections=tuple(tuple(p) for p in d.get("projections", ())),
            tree=tree,
            annotated={int(k): AnnotatedVar.parse(v) for k, v in d["annotated"].items()} if "annotated" in d else None,
        )


@dataclass(frozen=True)
class RedResProof:
    nodes: Tuple[ProofObject, ...]
    apps: Tuple[RuleApp, ...]
    root: int

    @property
    def size(self) -> int:
        total = len(self.nodes)
        for app in self.apps:
            if app.pi is not None:
                total += app.pi.inner_nodes
            if app.tree is not None:
                total += app.tree.size
        return total

    def count(self, rule: str) -> int:
        return sum(app.rule == rule for app in self.apps)

    def to_json(self, pcnf: PCNF | None = None):
        return {
            "formula_hash": pcnf.digest() if pcnf is not None else None,
            "nodes": [
                {"id": n, "level": o.level, "clauses": list(o.clauses), "fresh": list(o.fresh)}
                for n, o in enumerate(self.nodes)
            ],
            "apps": [a.to_json() for a in self.apps],
            "root": self.root,
        }

    def dumps(self, pcnf: PCNF | None = None) -> str:
        return json.dumps(self.to_json(pcnf), indent=1)

    @classmethod
    def from_json(cls, data) -> "RedResProof":
        nodes = sorted(data["nodes"], key=lambda n: n["id"])
        if [n["id"] for n in nodes] != list(range(len(nodes))):
            raise ValueError("node ids must be dense 0..N-1")
        return cls(
            tuple(ProofObject(tuple(n["clauses"]), n["level"], tuple(n.get("fresh", ()))) for n in nodes),
            tuple(RuleApp.from_json(a) for a in data["apps"]),
            data["root"],
        )

    @classmethod
    def loads(cls, text: str) -> "RedResProof":
        return cls.from_json(json.loads(text))


class ProofBuilder:
    """Assembles a proof through the rule functions, so every step is checked
    as it is added."""

    def __init__(self, pcnf: PCNF, fresh_start: int | None = None):
        self.pcnf = pcnf
        self.nodes: List[ProofObject] = []
        self.apps: List[RuleApp] = []
        self._next_var = (pcnf.num_vars if fresh_start is None else fresh_start - 1) + 1
        self._init_memo: Dict[Tuple[int, int], int] = {}

    def fresh_var(self) -> int:
        v = self._next_var
        self._next_var += 1
        return v

    def _add(self, objs: Sequence[ProofObject]) -> Tuple[int, ...]:
        ids = []
        for o in objs:
            self.nodes.append(o)
            ids.append(len(self.nodes) - 1)
        return tuple(ids)

    def node(self, nid: int) -> ProofObject:
        return self.nodes[nid]

    def init(self, i: int, k: int) -> int:
        key = (i, k)
        if key not in self._init_memo:
            obj = apply_init(self.pcnf, i, k)
            (nid,) = self._add([obj])
            self.apps.append(RuleApp(INIT, (), (nid,), clause=i, level=k))
            self._init_memo[key] = nid
        return self._init_memo[key]

    def res(self, premises: Sequence[int], pi: ResolutionProof) -> int:
        obj = apply_res(self.pcnf, [self.nodes[p] for p in premises], pi)
        (nid,) = self._add([obj])
        self.apps.append(RuleApp(RES, tuple(premises), (nid,), pi=pi))
        return nid

    def forall_red(self, premise: int) -> int:
        obj = apply_forall_red(self.pcnf, self.nodes[premise])
        (nid,) = self._add([obj])
        self.apps.append(RuleApp(FORALL_RED, (premise,), (nid,)))
        return nid

    def strengthen(self, premise: int, i: int, group: Sequence[int], fresh_var: int | None = None):
        a = self.fresh_var() if fresh_var is None else fresh_var
        main, side = apply_strengthen(self.pcnf, self.nodes[premise], i, group, a)
        ids = self._add([main, *side])
        self.apps.append(RuleApp(STRENGTHEN, (premise,), ids, clause=i, group=tuple(group), fresh_var=a))
        return ids[0], list(ids[1:])

    def exp_res(self, level, clause_ids, tree, annotated, pi, premises: Sequence[int] = ()) -> int:
        projections = tuple(_sorted_lits(lit_at(self.pcnf, i, level, ">=")) for i in clause_ids)
        obj = apply_exp_res(
            self.pcnf, level, clause_ids, projections, tree, annotated, pi, [self.nodes[p] for p in premises]
        )
        (nid,) = self._add([obj])
        self.apps.append(
            RuleApp(
                EXP_RES,
                tuple(premises),
                (nid,),
                level=level,
                pi=pi,
                clause_ids=tuple(clause_ids),
                projections=projections,
                tree=tree,
                annotated=dict(annotated),
            )
        )
        return nid

    def build(self, root: int, prune: bool = True) -> RedResProof:
        if not prune:
            return RedResProof(tuple(self.nodes), tuple(self.apps), root)
        return prune_proof(RedResProof(tuple(self.nodes), tuple(self.apps), root))


def prune_proof(proof: RedResProof) -> RedResProof:
    """Drop applications that do not contribute to the root, renumbering nodes."""
    producer = {}
    for a_idx, app in enumerate(proof.apps):
        for c in app.conclusions:
            producer[c] = a_idx
    keep_apps = set()
    stack = [proof.root]
    visited = set()
    while stack:
        n = stack.pop()
        if n in visited:
            continue
        visited.add(n)
        a_idx = producer[n]
        if a_idx in keep_apps:
            continue
        keep_apps.add(a_idx)
        stack.extend(proof.apps[a_idx].premises)
    remap: Dict[int, int] = {}
    nodes: List[ProofObject] = []
    apps: List[RuleApp] = []
    for a_idx, app in enumerate(proof.apps):
        if a_idx not in keep_apps:
            continue
        for c in app.conclusions:
            remap[c] = len(nodes)
            nodes.append(proof.nodes[c])
        apps.append(
            RuleApp(
                app.rule,
                tuple(remap[p] for p in app.premises),
                tuple(remap[c] for c in app.conclusions),
                clause=app.clause,
                level=app.level,
                pi=app.pi,
                group=app.group,
                fresh_var=app.fresh_var,
                clause_ids=app.clause_ids,
                projections=app.projections,
                tree=app.tree,
                annotated=app.annotated,
            )
        )
    return RedResProof(tuple(nodes), tuple(apps), remap[proof.root])


# -- checking ------------------------------------------------------------------


def _recompute(pcnf: PCNF, app: RuleApp, premises: List[ProofObject]) -> List[ProofObject]:
    if app.rule == INIT:
        if premises:
            raise ProofViolation("init.premises", "axiom takes no premises")
        return [apply_init(pcnf, app.clause, app.level)]
    if app.rule == RES:
        if app.pi is None:
            raise ProofViolation("res.pi", "missing embedded refutation")
        return [apply_res(pcnf, premises, app.pi)]
    if app.rule == FORALL_RED:
        if len(premises) != 1:
            raise ProofViolation("forall_red.premises", "exactly one premise required")
        return [apply_forall_red(pcnf, premises[0])]
    if app.rule == STRENGTHEN:
        if len(premises) != 1:
            raise ProofViolation("strengthen.premises", "exactly one premise required")
        main, side = apply_strengthen(pcnf, premises[0], app.clause, app.group, app.fresh_var)
        return [main, *side]
    if app.rule == EXP_RES:
        if app.pi is None or app.tree is None:
            raise ProofViolation("exp_res.pi", "missing refutation or tree")
        return [
            apply_exp_res(
                pcnf, app.level, app.clause_ids, app.projections, app.tree, app.annotated or {}, app.pi, premises
            )
        ]
    raise ProofViolation("proof.rule", f"unknown rule {app.rule!r}")


def check_proof(pcnf: PCNF, proof: RedResProof, refutation: bool = True) -> None:
    """Re-derive every node; raise :class:`ProofViolation` on the first failure."""
    fresh_owner: Dict[int, int] = {}
    for a_idx, app in enumerate(proof.apps):
        if app.rule == STRENGTHEN and app.fresh_var is not None:
            node = app.conclusions[0] if app.conclusions else None
            if app.fresh_var in fresh_owner:
                raise ProofViolation(
                    "strengthen.fresh", f"variable {app.fresh_var} introduced twice", node, STRENGTHEN
                )
            fresh_owner[app.fresh_var] = a_idx
    defined = [False] * len(proof.nodes)
    for app in proof.apps:
        node = app.conclusions[0] if app.conclusions else None
        if app.rule not in RULES:
            raise ProofViolation("proof.rule", f"unknown rule {app.rule!r}", node, app.rule)
        if not app.conclusions:
            raise ProofViolation("dag.conclusion", "application without conclusion", None, app.rule)
        for p in app.premises:
            if not 0 <= p < len(proof.nodes) or not defined[p]:
                raise ProofViolation("dag.order", f"premise {p} used before it is derived", node, app.rule)
        if app.rule == EXP_RES and app.annotated:
            clash = set(app.annotated) & set(fresh_owner)
            if clash:
                raise ProofViolation("exp_res.annotation", f"ids {sorted(clash)} collide with fresh variables", node, app.rule)
        try:
            expected = _recompute(pcnf, app, [proof.nodes[p] for p in app.premises])
        except ProofViolation as exc:
            raise exc.at(node, app.rule) from None
        if len(expected) != len(app.conclusions):
            raise ProofViolation("dag.conclusion", "wrong number of conclusions", node, app.rule)
        for c, obj in zip(app.conclusions, expected):
            if not 0 <= c < len(proof.nodes):
                raise ProofViolation("dag.conclusion", f"conclusion {c} out of range", node, app.rule)
            if defined[c]:
                raise ProofViolation("dag.conclusion", f"node {c} derived twice", c, app.rule)
            if proof.nodes[c] != obj:
                raise ProofViolation("dag.conclusion", f"node {c} is {proof.nodes[c]}, rule derives {obj}", c, app.rule)
            defined[c] = True
    for n, ok in enumerate(defined):
        if not ok:
            raise ProofViolation("dag.underived", f"node {n} is not derived by any rule", n, "proof")
    if not 0 <= proof.root < len(proof.nodes):
        raise ProofViolation("root.index", f"root {proof.root} out of range", None, "root")
    if refutation and proof.nodes[proof.root].level != 0:
        raise ProofViolation("root.level", f"root is at level {proof.nodes[proof.root].level}", proof.root, "root")


# -- Q-resolution export -----------------------------------------------------------


class QResViolation(ValueError):
    def __init__(self, step: int, condition: str, detail: str = ""):
        self.step = step
        self.condition = condition
        super().__init__(f"step {step}: {condition}" + (f" ({detail})" if detail else ""))


class ExportError(ValueError):
    pass


@dataclass(frozen=True)
class QResProof:
    """Q-resolution DAG in topological order.

    ``steps[n]`` is ``None`` (matrix clause), ``("res", left, right, pivot)``
    or ``("red", premise, removed_literals)``.
    """

    clauses: Tuple[FrozenSet[int], ...]
    steps: Tuple[Optional[tuple], ...]
    root: int


@dataclass(frozen=True)
class QResReport:
    level_ordered: bool
    resolutions: int
    reductions: int


def export_qres(pcnf: PCNF, proof: RedResProof) -> QResProof:
    clauses: List[FrozenSet[int]] = []
    steps: List[Optional[tuple]] = []
    image: Dict[int, int] = {}

    def push(clause, step):
        clauses.append(frozenset(clause))
        steps.append(step)
        return len(clauses) - 1

    for app in proof.apps:
        if app.rule in (STRENGTHEN, EXP_RES):
            raise ExportError(f"rule {app.rule} has no Q-resolution image")
        (c,) = app.conclusions
        if app.rule == INIT:
            image[c] = push(pcnf.clause(app.clause), None)
        elif app.rule == FORALL_RED:
            (p,) = app.premises
            src = image[p]
            k = proof.nodes[p].level
            removed = frozenset(l for l in clauses[src] if pcnf.var_level[abs(l)] == k)
            image[c] = push(clauses[src] - removed, ("red", src, removed)) if removed else src
        else:
            obj_lits = [(lits_of(pcnf, proof.nodes[p]), image[p]) for p in app.premises]
            pi = app.pi
            local: Dict[int, int] = {}
            for n, step in enumerate(pi.steps):
                if step is None:
                    local[n] = next(q for lits, q in obj_lits if lits == pi.clauses[n])
                else:
                    left, right, pivot = step
                    ql, qr = local[left], local[right]
                    local[n] = push(resolve(clauses[ql], clauses[qr], pivot), ("res", ql, qr, pivot))
            image[c] = local[pi.root]
    return QResProof(tuple(clauses), tuple(steps), image[proof.root])


def check_qres(pcnf: PCNF, proof: QResProof) -> QResReport:
    matrix = {frozenset(c) for c in pcnf.clauses}
    lv = pcnf.var_level
    lowest: List[float] = []
    ordered = True
    n_res = n_red = 0
    for n, (clause, step) in enumerate(zip(proof.clauses, proof.steps)):
        if step is None:
            if clause not in matrix:
                raise QResViolation(n, "qres.leaf", "leaf is not a matrix clause")
            lowest.append(float("inf"))
            continue
        if step[0] == "res":
            _, left, right, pivot = step
            if not (0 <= left < n and 0 <= right < n):
                raise QResViolation(n, "qres.order")
            if pivot not in lv or pcnf.kind(lv[pivot]) != EXISTS:
                raise QResViolation(n, "qres.pivot_universal", f"pivot {pivot} is not existential")
            lc, rc = proof.clauses[left], proof.clauses[right]
            if not ((pivot in lc and -pivot in rc) or (-pivot in lc and pivot in rc)):
                raise QResViolation(n, "qres.pivot", "operands lack complementary pair")
            res = resolve(lc, rc, pivot)
            if clause != res:
                raise QResViolation(n, "qres.resolvent")
            if any(-l in res for l in res):
                raise QResViolation(n, "qres.tautology", "tautological resolvent")
            p_level = lv[pivot]
            if p_level > min(lowest[left], lowest[right]):
                ordered = False
            lowest.append(min(p_level, lowest[left], lowest[right]))
            n_res += 1
        elif step[0] == "red":
            _, src, removed = step
            if not 0 <= src < n:
                raise QResViolation(n, "qres.order")
            base = proof.clauses[src]
            removed = frozenset(removed)
            if not removed <= base or clause != base - removed:
                raise QResViolation(n, "qres.reduce", "reduct does not match premise minus removed literals")
            e_levels = [lv[abs(l)] for l in clause if pcnf.kind(lv[abs(l)]) == EXISTS]
            for u in removed:
                if pcnf.kind(lv[abs(u)]) != FORALL:
                    raise QResViolation(n, "qres.reduce_existential", f"literal {u} is existential")
                if any(e > lv[abs(u)] for e in e_levels):
                    raise QResViolation(n, "qres.reduce_dependency", f"literal {u} has a deeper existential")
            lowest.append(lowest[src])
            n_red += 1
        else:
            raise QResViolation(n, "qres.step", f"unknown step {step[0]!r}")
    if not 0 <= proof.root < len(proof.clauses) or proof.clauses[proof.root]:
        raise QResViolation(proof.root, "qres.root", "root is not the empty clause")
    return QResReport(ordered, n_res, n_red)
