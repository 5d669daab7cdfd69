"""Universal expansion: expansion trees, annotated variables and expansion formulas."""

from __future__ import annotations

import itertools
import re
from dataclasses import dataclass
from typing import Dict, Iterable, Iterator, List, Mapping, Optional, Sequence, Tuple

from .formula import PCNF, QuantBlock

Label = Tuple[Tuple[int, int], ...]
MAX_LEAVES = 1 << 20


class ExpansionError(ValueError):
    pass


def label_of(assignment: Mapping[int, bool]) -> Label:
    return tuple(sorted((v, int(bool(b))) for v, b in assignment.items()))


@dataclass(frozen=True, order=True)
class AnnotatedVar:
    """Existential variable ``base`` renamed under a universal assignment."""

    base: int
    annotation: Label = ()

    def __str__(self):
        if not self.annotation:
            return f"v{self.base}"
        inner = ",".join(f"{v}={b}" for v, b in self.annotation)
        return f"v{self.base}^{{{inner}}}"

    @classmethod
    def parse(cls, text: str) -> "AnnotatedVar":
        m = re.fullmatch(r"v(\d+)(?:\^\{([^}]*)\})?", text.strip())
        if not m:
            raise ValueError(f"malformed annotated variable {text!r}")
        pairs = []
        if m.group(2):
            for part in m.group(2).split(","):
                v, b = part.split("=")
                pairs.append((int(v), int(b)))
        return cls(int(m.group(1)), tuple(sorted(pairs)))


# An expanded literal: (variable, polarity)
ExpLit = Tuple[AnnotatedVar, bool]
ExpClause = frozenset


class ExpansionTree:
    """Rooted tree whose edge at depth ``d`` carries a total assignment to
    the ``d``-th universal block.  Sibling labels are unique, so a path is
    determined by its labels."""

    def __init__(self, paths: Iterable[Sequence[Mapping[int, bool] | Label]] = (), depth: int | None = None):
        self.children: Dict[Label, "ExpansionTree"] = {}
        self.depth = depth
        for p in paths:
            self.add_path(p)

    def add_path(self, path: Sequence[Mapping[int, bool] | Label]) -> None:
        labels = [label_of(a) if isinstance(a, Mapping) else tuple(sorted(a)) for a in path]
        if self.depth is None:
            self.depth = len(labels)
        elif len(labels) != self.depth:
            raise ExpansionError(f"path has {len(labels)} edges, tree depth is {self.depth}")
        node = self
        for lab in labels:
            node = node.children.setdefault(lab, ExpansionTree(depth=None))

    def _walk(self) -> Iterator[Tuple[Label, ...]]:
        if not self.children:
            yield ()
            return
        for lab, child in self.children.items():
            for rest in child._walk():
                yield (lab,) + rest

    def paths(self) -> Iterator[Tuple[Label, ...]]:
        if self.children or self.depth == 0:
            yield from self._walk()

    @property
    def num_leaves(self) -> int:
        return sum(1 for _ in self.paths())

    @property
    def size(self) -> int:
        return 1 + sum(c.size for c in self.children.values())

    def to_json(self):
        return [[[list(p) for p in lab] for lab in path] for path in self.paths()]

    @classmethod
    def from_json(cls, data) -> "ExpansionTree":
        paths = [[tuple((int(v), int(b)) for v, b in lab) for lab in path] for path in data]
        depth = len(paths[0]) if paths else 0
        return cls(paths, depth=depth)

    def __eq__(self, other):
        return isinstance(other, ExpansionTree) and set(self.paths()) == set(other.paths())

    def __repr__(self):
        return f"ExpansionTree({list(self.paths())!r})"


def _universal_blocks(prefix: Sequence[QuantBlock]) -> List[QuantBlock]:
    return [b for b in prefix if b.universal]


def _validate_path(path: Sequence[Label], prefix: Sequence[QuantBlock]) -> None:
    ublocks = _universal_blocks(prefix)
    if len(path) != len(ublocks):
        raise ExpansionError(
            f"path has {len(path)} edges but the prefix has {len(ublocks)} universal blocks"
        )
    for lab, block in zip(path, ublocks):
        if {v for v, _ in lab} != set(block.vars) or len(lab) != len(block.vars):
            raise ExpansionError(f"edge label {lab} is not a total assignment of block {block.vars}")


class _PrefixIndex:
    def __init__(self, prefix: Sequence[QuantBlock]):
        self.block_of: Dict[int, int] = {}
        self.universal: Dict[int, bool] = {}
        self.u_index: Dict[int, int] = {}
        u = 0
        for b_idx, block in enumerate(prefix):
            for v in block.vars:
                self.block_of[v] = b_idx
                self.universal[v] = block.universal
                self.u_index[v] = u
            if block.universal:
                u += 1
        # number of universal blocks strictly before each block
        self.u_before: List[int] = []
        u = 0
        for block in prefix:
            self.u_before.append(u)
            if block.universal:
                u += 1


def _expand(path: Sequence[Label], clause: Iterable[int], index: _PrefixIndex) -> Optional[ExpClause]:
    lits = []
    for l in clause:
        v = abs(l)
        if v not in index.block_of:
            raise ExpansionError(f"literal {l} is not bound in the expanded prefix")
        if index.universal[v]:
            val = dict(path[index.u_index[v]])[v]
            if val == (l > 0):
                return None
            continue
        deps = path[: index.u_before[index.block_of[v]]]
        annotation = tuple(sorted(p for lab in deps for p in lab))
        lits.append((AnnotatedVar(v, annotation), l > 0))
    return frozenset(lits)


def expand_path(
    path: Sequence[Mapping[int, bool] | Label], clause: Iterable[int], prefix: Sequence[QuantBlock]
) -> Optional[ExpClause]:
    """Instantiate ``clause`` along ``path`` and annotate existential variables.

    Returns ``None`` when a universal literal is satisfied by the path.
    """
    labels = [label_of(a) if isinstance(a, Mapping) else tuple(sorted(a)) for a in path]
    _validate_path(labels, prefix)
    return _expand(labels, clause, _PrefixIndex(prefix))


def expand_tree(
    tree: ExpansionTree, prefix: Sequence[QuantBlock], clauses: Iterable[Iterable[int]]
) -> List[ExpClause]:
    """Conjunction of the path expansions of ``clauses`` over every root-to-leaf path."""
    ublocks = _universal_blocks(prefix)
    depth = tree.depth if tree.depth is not None else 0
    if depth != len(ublocks):
        raise ExpansionError(f"tree depth {depth} differs from {len(ublocks)} universal blocks")
    index = _PrefixIndex(prefix)
    clauses = [tuple(c) for c in clauses]
    out: List[ExpClause] = []
    seen = set()
    for path in tree.paths():
        _validate_path(path, prefix)
        for c in clauses:
            e = _expand(path, c, index)
            if e is not None and e not in seen:
                seen.add(e)
                out.append(e)
    return out


def full_expansion_tree(pcnf: PCNF, from_level: int = 1) -> ExpansionTree:
    if not 1 <= from_level <= max(pcnf.depth, 1):
        raise ExpansionError(f"level {from_level} out of range")
    ublocks = [b for b in pcnf.blocks[from_level - 1:] if b.universal]
    leaves = 1
    for b in ublocks:
        leaves <<= len(b.vars)
        if leaves > MAX_LEAVES:
            raise ExpansionError("full expansion exceeds 2^20 leaves")
    per_block = [
        [tuple(zip(b.vars, bits)) for bits in itertools.product((0, 1), repeat=len(b.vars))]
        for b in ublocks
    ]
    return ExpansionTree(itertools.product(*per_block), depth=len(ublocks))


class AnnotationRegistry:
    """Dense integer ids for annotated variables.

    Unannotated variables keep their own id; annotated ones are numbered
    from ``start`` upward in order of first use.
    """

    def __init__(self, start: int, allocate=None):
        self._next = start
        self._allocate = allocate
        self.ids: Dict[AnnotatedVar, int] = {}

    def id(self, var: AnnotatedVar) -> int:
        if not var.annotation:
            return var.base
        got = self.ids.get(var)
        if got is None:
            if self._allocate is not None:
                got = self._allocate()
            else:
                got = self._next
                self._next += 1
            self.ids[var] = got
        return got

    def lit(self, elit: ExpLit) -> int:
        v = self.id(elit[0])
        return v if elit[1] else -v

    def clause(self, eclause: ExpClause) -> Tuple[int, ...]:
        return tuple(sorted((self.lit(e) for e in eclause), key=lambda l: (abs(l), l > 0)))

    def inverse(self) -> Dict[int, AnnotatedVar]:
        return {i: v for v, i in self.ids.items()}


def render_clause(eclause: ExpClause) -> str:
    parts = sorted(eclause, key=lambda e: (e[0], not e[1]))
    return "(" + " | ".join(("" if pos else "-") + str(v) for v, pos in parts) + ")"
