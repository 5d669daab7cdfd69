"""Formula families, a brute-force evaluator and a hand-built strengthened proof.

Clause ids inside each family are fixed so fixture proofs can refer to them:

* ``crn`` / ``crn_prime``: ``1 = (-a_1 | ... | -a_n)``, ``2 = (-b_1 | ... | -b_n)``,
  then for each cell ``(i, j)`` in row-major order the pair
  ``C_ij = (x_ij | z | a_i)`` followed by ``Cbar_ij = (-x_ij | -z | b_j)``.
* ``dag``: four clauses per index ``i`` followed by the long clause, so that
  ``dag(1)`` is the five-clause example formula verbatim.
* ``qparity``: the xor chain, then ``(z | t_n)`` and ``(-z | -t_n)``.
"""

from __future__ import annotations

import random
from dataclasses import dataclass
from typing import Callable, Dict, List, Optional

from .calculus import ProofBuilder, RedResProof, lits_of
from .formula import EXISTS, FORALL, PCNF, QuantBlock, normalize_blocks
from .satcore import ResolutionProof
from .satcore.resolution import resolve

ORACLE_MAX_VARS = 25


class OracleLimit(ValueError):
    pass


def _prefix(*blocks):
    return normalize_blocks((kind, list(vs)) for kind, vs in blocks)


# -- CR_n ------------------------------------------------------------------------


def crn_clause_ids(n: int, i: int, j: int):
    """Clause ids of ``C_ij`` and ``Cbar_ij`` (1-based row/column)."""
    c = 3 + 2 * ((i - 1) * n + (j - 1))
    return c, c + 1


def _crn(n: int, prime: bool) -> PCNF:
    if n < 1:
        raise ValueError("n must be >= 1")
    x = lambda i, j: (i - 1) * n + j  # noqa: E731
    if prime:
        z = lambda i, j: n * n + x(i, j)  # noqa: E731
        base = 2 * n * n
        zs = [z(i, j) for i in range(1, n + 1) for j in range(1, n + 1)]
    else:
        z = lambda i, j: n * n + 1  # noqa: E731
        base = n * n + 1
        zs = [n * n + 1]
    a = lambda i: base + i  # noqa: E731
    b = lambda j: base + n + j  # noqa: E731
    clauses = [[-a(i) for i in range(1, n + 1)], [-b(j) for j in range(1, n + 1)]]
    for i in range(1, n + 1):
        for j in range(1, n + 1):
            clauses.append([x(i, j), z(i, j), a(i)])
            clauses.append([-x(i, j), -z(i, j), b(j)])
    prefix = _prefix(
        (EXISTS, range(1, n * n + 1)),
        (FORALL, zs),
        (EXISTS, [a(i) for i in range(1, n + 1)] + [b(j) for j in range(1, n + 1)]),
    )
    return PCNF(prefix, clauses)


def gen_crn(n: int) -> PCNF:
    return _crn(n, prime=False)


def gen_crn_prime(n: int) -> PCNF:
    """CR_n with one universal ``z_ij`` per cell instead of a shared ``z``."""
    return _crn(n, prime=True)


# -- DAG_n, QParity_n and their combination ----------------------------------------


def _dag_part(n: int, offset: int = 0):
    blocks, clauses, cs = [], [], []
    for i in range(1, n + 1):
        e, u, c1, c2 = (offset + 4 * (i - 1) + d for d in (1, 2, 3, 4))
        blocks += [(EXISTS, [e]), (FORALL, [u]), (EXISTS, [c1, c2])]
        clauses += [[-e, c1], [-u, c1], [e, c2], [u, c2]]
        cs += [c1, c2]
    return blocks, clauses, cs


def xor_clauses(o1: int, o2: int, o: int):
    """CNF of ``o <-> o1 xor o2``."""
    return [[-o1, -o2, -o], [o1, o2, -o], [-o1, o2, o], [o1, -o2, o]]


def _parity_part(n: int, xs, z: int, ts: Dict[int, int], extra: Optional[int] = None):
    # ts[1] is x_1 itself, so n = 1 leaves only the two tail clauses
    clauses = []
    for i in range(2, n + 1):
        clauses += xor_clauses(ts[i - 1], xs[i - 1], ts[i])
    clauses.append([z, ts[n]] + ([extra] if extra is not None else []))
    clauses.append([-z, -ts[n]])
    return clauses


def gen_dag(n: int) -> PCNF:
    if n < 1:
        raise ValueError("n must be >= 1")
    blocks, clauses, cs = _dag_part(n)
    clauses.append([-c for c in cs])
    return PCNF(_prefix(*blocks), clauses)


def gen_qparity(n: int) -> PCNF:
    if n < 1:
        raise ValueError("n must be >= 1")
    xs = list(range(1, n + 1))
    z = n + 1
    ts = {1: xs[0], **{i: n + i for i in range(2, n + 1)}}
    prefix = _prefix((EXISTS, xs), (FORALL, [z]), (EXISTS, [ts[i] for i in range(2, n + 1)]))
    return PCNF(prefix, _parity_part(n, xs, z, ts))


def gen_composite(n: int) -> PCNF:
    """DAG_n followed by ``forall a exists b`` and a QParity_n tail coupled through ``b``."""
    if n < 1:
        raise ValueError("n must be >= 1")
    blocks, clauses, cs = _dag_part(n)
    a, b = 4 * n + 1, 4 * n + 2
    xs = [4 * n + 2 + i for i in range(1, n + 1)]
    z = 5 * n + 3
    ts = {1: xs[0], **{i: 5 * n + 2 + i for i in range(2, n + 1)}}
    blocks += [(FORALL, [a]), (EXISTS, [b]), (EXISTS, xs), (FORALL, [z]), (EXISTS, [ts[i] for i in range(2, n + 1)])]
    clauses.append([-a, -b] + [-c for c in cs])
    clauses += _parity_part(n, xs, z, ts, extra=b)
    return PCNF(_prefix(*blocks), clauses)


def gen_example(which: int) -> PCNF:
    if which == 1:
        return gen_dag(1)
    if which == 2:
        e1, u1, c1, c2, a, b, x, z, t = range(1, 10)
        prefix = _prefix(
            (EXISTS, [e1]), (FORALL, [u1]), (EXISTS, [c1, c2]), (FORALL, [a]), (EXISTS, [b, x]), (FORALL, [z]), (EXISTS, [t])
        )
        clauses = [
            [-e1, c1],
            [-u1, c1],
            [e1, c2],
            [u1, c2],
            [-c1, -c2, -b, -a],
            [z, t, b],
            [-z, -t],
            [x, -t],
            [-x, t],
        ]
        return PCNF(prefix, clauses)
    raise ValueError(f"no example {which}")


# -- random instances ---------------------------------------------------------------


def gen_random(
    seed: int,
    blocks: int = 3,
    vars_per_block: int = 2,
    clauses: int = 10,
    clause_width: int = 3,
    first: Optional[str] = None,
) -> PCNF:
    """Closed PCNF with alternating blocks and ``clauses`` random clauses.

    Block sizes vary between 1 and ``vars_per_block``; clause widths between
    2 and ``clause_width``.  The same arguments always give the same formula.
    """
    if blocks < 1 or vars_per_block < 1 or clauses < 0 or clause_width < 1:
        raise ValueError("bad random-instance parameters")
    rng = random.Random(seed)
    kind = first or rng.choice((EXISTS, FORALL))
    prefix, v = [], 0
    for _ in range(blocks):
        size = rng.randint(1, vars_per_block)
        prefix.append(QuantBlock(kind, tuple(range(v + 1, v + size + 1))))
        v += size
        kind = FORALL if kind == EXISTS else EXISTS
    existentials = [u for b in prefix if not b.universal for u in b.vars]
    matrix = []
    for _ in range(clauses):
        width = rng.randint(min(2, clause_width, v), min(clause_width, v))
        chosen = rng.sample(range(1, v + 1), width)
        if existentials and not set(chosen) & set(existentials):
            # a purely universal clause makes the formula trivially false
            chosen[0] = rng.choice(existentials)
        matrix.append([u if rng.random() < 0.5 else -u for u in chosen])
    return PCNF(prefix, matrix)


# -- brute force ------------------------------------------------------------------------


def oracle_eval(pcnf: PCNF) -> bool:
    """Truth value by game-tree search over the prefix."""
    order = [(v, b.universal) for b in pcnf.blocks for v in b.vars]
    if len(order) > ORACLE_MAX_VARS:
        raise OracleLimit(f"{len(order)} variables exceed the oracle limit of {ORACLE_MAX_VARS}")
    clauses = [tuple(c) for c in pcnf.clauses]
    value: Dict[int, bool] = {}

    def status() -> Optional[bool]:
        done = True
        for c in clauses:
            sat = False
            open_ = False
            for l in c:
                val = value.get(abs(l))
                if val is None:
                    open_ = True
                elif val == (l > 0):
                    sat = True
                    break
            if sat:
                continue
            if not open_:
                return False
            done = False
        return True if done else None

    def rec(pos: int) -> bool:
        s = status()
        if s is not None:
            return s
        v, universal = order[pos]
        for bit in (False, True):
            value[v] = bit
            r = rec(pos + 1)
            if r != universal:
                del value[v]
                return r
        del value[v]
        return universal

    return rec(0)


# -- constructive strengthened refutation of CR_n -----------------------------------------


def _linear_refutation(long_clause, units) -> ResolutionProof:
    """Resolve ``long_clause`` against a unit for each of its literals, in turn."""
    clauses = [frozenset(long_clause)]
    steps: list = [None]
    cur = 0
    for u in units:
        clauses.append(frozenset(u))
        steps.append(None)
        (lit,) = u
        clauses.append(resolve(clauses[cur], clauses[-1], abs(lit)))
        steps.append((cur, len(clauses) - 2, abs(lit)))
        cur = len(clauses) - 1
    return ResolutionProof(tuple(clauses), tuple(steps), cur)


def gen_crn_strengthened_proof(n: int) -> RedResProof:
    """Polynomial refutation of ``gen_crn(n)`` that uses the strengthening rule.

    Per column ``j`` the clauses ``C_1j..C_nj`` with the ``a``-clause refute
    their level-3 part, leaving ``(x_1j | ... | x_nj)`` at level 1.  The
    first row of ``Cbar`` with the ``b``-clause leaves ``(-x_11 | ... | -x_1n)``.
    Strengthening each ``Cbar_1j`` against its whole column (all share the
    inner part ``-z | b_j``) yields ``(c_1 | ... | c_n)`` and the binary
    objects ``(-c_j | -x_ij)``; a final level-1 resolution closes the proof.
    """
    if n < 2:
        raise ValueError("n must be >= 2")
    pcnf = gen_crn(n)
    pb = ProofBuilder(pcnf)
    lit = lambda nid: lits_of(pcnf, pb.node(nid))  # noqa: E731

    columns = []
    for j in range(1, n + 1):
        prem = [pb.init(1, 3)] + [pb.init(crn_clause_ids(n, i, j)[0], 3) for i in range(1, n + 1)]
        pi = _linear_refutation(lit(prem[0]), [lit(p) for p in prem[1:]])
        columns.append(pb.forall_red(pb.res(prem, pi)))

    prem = [pb.init(2, 3)] + [pb.init(crn_clause_ids(n, 1, j)[1], 3) for j in range(1, n + 1)]
    pi = _linear_refutation(lit(prem[0]), [lit(p) for p in prem[1:]])
    main = pb.forall_red(pb.res(prem, pi))

    sides: Dict[int, List[int]] = {}
    fresh: Dict[int, int] = {}
    for j in range(1, n + 1):
        fresh[j] = pb.fresh_var()
        group = [crn_clause_ids(n, i, j)[1] for i in range(1, n + 1)]
        main, sides[j] = pb.strengthen(main, crn_clause_ids(n, 1, j)[1], group, fresh[j])

    # level-1 refutation: for every column derive (-c_j), then cut (c_1 | ... | c_n)
    clauses: list = []
    steps: list = []

    def leaf(c):
        clauses.append(frozenset(c))
        steps.append(None)
        return len(clauses) - 1

    def step(l, r, pivot):
        clauses.append(resolve(clauses[l], clauses[r], pivot))
        steps.append((l, r, pivot))
        return len(clauses) - 1

    cur = leaf(lit(main))
    for j in range(1, n + 1):
        col = leaf(lit(columns[j - 1]))
        for i in range(1, n + 1):
            col = step(col, leaf(lit(sides[j][i - 1])), (i - 1) * n + j)
        cur = step(cur, col, fresh[j])
    pi = ResolutionProof(tuple(clauses), tuple(steps), cur)
    premises = [main] + columns + [s for j in range(1, n + 1) for s in sides[j]]
    root = pb.res(premises, pi)
    return pb.build(root)


# -- dispatch -----------------------------------------------------------------------------


@dataclass(frozen=True)
class FamilyParams:
    family: str
    n: int = 2
    seed: int = 0


FAMILIES: Dict[str, Callable[[FamilyParams], PCNF]] = {
    "crn": lambda p: gen_crn(p.n),
    "crn_prime": lambda p: gen_crn_prime(p.n),
    "dag": lambda p: gen_dag(p.n),
    "qparity": lambda p: gen_qparity(p.n),
    "composite": lambda p: gen_composite(p.n),
    "example1": lambda p: gen_example(1),
    "example2": lambda p: gen_example(2),
    "random": lambda p: gen_random(p.seed),
}


def generate(params: FamilyParams) -> PCNF:
    try:
        make = FAMILIES[params.family]
    except KeyError:
        raise ValueError(f"unknown family {params.family!r}; choose from {', '.join(FAMILIES)}") from None
    return make(params)
