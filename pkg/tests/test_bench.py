from __future__ import annotations

import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from redres.bench import (
    FAMILIES,
    FamilyParams,
    OracleLimit,
    crn_clause_ids,
    gen_composite,
    gen_crn,
    gen_crn_prime,
    gen_crn_strengthened_proof,
    gen_dag,
    gen_example,
    gen_qparity,
    gen_random,
    generate,
    oracle_eval,
)
from redres.formula import EXISTS, FORALL, PCNF, QuantBlock, evaluate_matrix


def naive_eval(pcnf: PCNF) -> bool:
    """Plain minimax over every variable, no pruning."""
    order = [(v, b.universal) for b in pcnf.blocks for v in b.vars]

    def rec(pos, alpha):
        if pos == len(order):
            return evaluate_matrix(pcnf, alpha)
        v, universal = order[pos]
        branches = [rec(pos + 1, {**alpha, v: bit}) for bit in (False, True)]
        return all(branches) if universal else any(branches)

    return rec(0, {})


@pytest.mark.parametrize("n", range(1, 11))
def test_closed_forms(n):
    crn, crp, dag = gen_crn(n), gen_crn_prime(n), gen_dag(n)
    qp, comp = gen_qparity(n), gen_composite(n)
    assert (crn.num_clauses, crn.num_vars) == (2 + 2 * n * n, n * n + 1 + 2 * n)
    assert (crp.num_clauses, crp.num_vars) == (2 + 2 * n * n, 2 * n * n + 2 * n)
    assert (dag.num_clauses, dag.num_vars) == (1 + 4 * n, 4 * n)
    assert (qp.num_clauses, qp.num_vars) == (2 + 4 * (n - 1), 2 * n)
    assert (comp.num_clauses, comp.num_vars) == (8 * n - 1, 6 * n + 2)


def test_prefix_shapes():
    assert [b.kind for b in gen_crn(3).blocks] == [EXISTS, FORALL, EXISTS]
    assert [b.kind for b in gen_qparity(3).blocks] == [EXISTS, FORALL, EXISTS]
    assert gen_dag(3).depth == 3 * 2 + 1
    assert gen_composite(2).depth == gen_dag(2).depth + 4


def test_dag1_is_example1():
    assert gen_dag(1).structure() == gen_example(1).structure()


def test_example2():
    p = gen_example(2)
    assert (p.num_vars, p.num_clauses, p.depth) == (9, 9, 7)
    assert p.blocks[4] == QuantBlock(EXISTS, (6, 7))
    assert p.clause(5) == (-3, -4, -5, -6)
    with pytest.raises(ValueError):
        gen_example(3)


def test_crn_clause_ids():
    pcnf = gen_crn(3)
    for i in range(1, 4):
        for j in range(1, 4):
            c, cbar = crn_clause_ids(3, i, j)
            x = (i - 1) * 3 + j
            assert x in pcnf.clause(c) and -x in pcnf.clause(cbar)


def test_crn_prime_splits_z():
    pcnf = gen_crn_prime(2)
    assert len(pcnf.blocks[1].vars) == 4
    for i in range(1, 3):
        for j in range(1, 3):
            c, cbar = crn_clause_ids(2, i, j)
            zc = {abs(l) for l in pcnf.clause(c)} & set(pcnf.blocks[1].vars)
            zb = {abs(l) for l in pcnf.clause(cbar)} & set(pcnf.blocks[1].vars)
            assert zc == zb and len(zc) == 1


@pytest.mark.parametrize("make", [gen_crn, gen_crn_prime, gen_dag, gen_qparity, gen_composite])
def test_families_false(make):
    for n in (1, 2, 3):
        assert oracle_eval(make(n)) is False
    assert naive_eval(make(1)) is False


def test_examples_false():
    assert oracle_eval(gen_example(1)) is False
    assert oracle_eval(gen_example(2)) is False


def test_oracle_small_cases():
    assert oracle_eval(PCNF([QuantBlock(EXISTS, (1,))], [[1]])) is True
    assert oracle_eval(PCNF([QuantBlock(FORALL, (1,))], [[1]])) is False
    assert oracle_eval(PCNF([QuantBlock(FORALL, (1,)), QuantBlock(EXISTS, (2,))], [[1, 2], [-1, -2]])) is True
    assert oracle_eval(PCNF((), ())) is True
    assert oracle_eval(PCNF((), [()])) is False


@settings(max_examples=300, deadline=None)
@given(st.integers(0, 10**6), st.integers(1, 5), st.integers(1, 3), st.integers(0, 16))
def test_oracle_matches_naive(seed, blocks, width, clauses):
    pcnf = gen_random(seed, blocks=blocks, vars_per_block=width, clauses=clauses)
    assert oracle_eval(pcnf) == naive_eval(pcnf)


def test_oracle_limit():
    with pytest.raises(OracleLimit):
        oracle_eval(gen_crn(5))


def test_random_generator():
    a = gen_random(5, blocks=4, vars_per_block=3, clauses=12)
    assert a == gen_random(5, blocks=4, vars_per_block=3, clauses=12)
    assert a != gen_random(6, blocks=4, vars_per_block=3, clauses=12)
    assert a.depth == 4 and a.num_clauses == 12
    existentials = {v for b in a.blocks if not b.universal for v in b.vars}
    assert all({abs(l) for l in c} & existentials for c in a.clauses)
    assert gen_random(1, first=FORALL).blocks[0].universal
    with pytest.raises(ValueError):
        gen_random(1, blocks=0)


def test_random_instances_mix_verdicts():
    verdicts = [oracle_eval(gen_random(s, blocks=3, vars_per_block=3, clauses=10)) for s in range(200)]
    assert 0 < sum(verdicts) < len(verdicts)


def test_strengthened_proof_sizes_fixed():
    # regression values: a change to the construction shows up here
    sizes = [gen_crn_strengthened_proof(n).size for n in range(2, 6)]
    assert sizes == [29, 54, 87, 128]
    with pytest.raises(ValueError):
        gen_crn_strengthened_proof(1)


def test_generate_dispatch():
    assert set(FAMILIES) == {"crn", "crn_prime", "dag", "qparity", "composite", "example1", "example2", "random"}
    assert generate(FamilyParams("dag", 1)) == gen_dag(1)
    assert generate(FamilyParams("random", seed=3)) == gen_random(3)
    with pytest.raises(ValueError, match="unknown family"):
        generate(FamilyParams("nope"))


def test_small_fixtures():
    assert (gen_crn(2).num_vars, gen_crn(2).num_clauses) == (9, 10)
    assert (gen_crn(1).num_vars, gen_crn(1).num_clauses) == (4, 4)
    assert (gen_crn_prime(2).num_vars, gen_crn_prime(2).num_clauses) == (12, 10)
    assert gen_crn_prime(1).structure() == gen_crn(1).structure()
    assert (gen_qparity(2).num_vars, gen_qparity(2).num_clauses) == (4, 6)
    assert oracle_eval(gen_qparity(4)) is False
    assert oracle_eval(PCNF([QuantBlock(FORALL, (1,))], [[1, -1]])) is True


def test_composite_prefix():
    pcnf = gen_composite(2)
    kinds = "".join("E" if b.kind == EXISTS else "A" for b in pcnf.blocks)
    assert kinds == "EAEAEAEAE"
    a, b, z = 9, 10, 13
    assert pcnf.blocks[5].vars == (a,)
    assert pcnf.blocks[6].vars == (b, 11, 12)
    assert pcnf.blocks[7].vars == (z,)
    assert pcnf.num_clauses == 15
