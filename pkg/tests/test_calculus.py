from __future__ import annotations

import dataclasses

import pytest

from redres.bench import gen_crn, gen_crn_strengthened_proof, gen_example
from redres.calculus import (
    EXP_RES,
    STRENGTHEN,
    ExportError,
    ProofBuilder,
    ProofObject,
    ProofViolation,
    QResProof,
    QResViolation,
    RedResProof,
    apply_exp_res,
    apply_forall_red,
    apply_init,
    apply_res,
    apply_strengthen,
    check_proof,
    check_qres,
    export_qres,
    lits_of,
    outer_clause,
    prune_proof,
)
from redres.expansion import AnnotationRegistry, ExpansionTree, expand_tree
from redres.formula import EXISTS, FORALL, PCNF, QuantBlock, lit_at
from redres.satcore import extract_resolution_proof
from redres.solver import MODES, solve_mode

EX1 = gen_example(1)
EX2 = gen_example(2)


def refute(pcnf, ids):
    return extract_resolution_proof([lits_of(pcnf, pb_obj) for pb_obj in ids])


def build_example1():
    """The two-branch refutation of example1, assembled rule by rule."""
    pb = ProofBuilder(EX1)
    halves = []
    for group in ((1, 4, 5), (2, 3, 5)):
        leaves = [pb.init(i, 3) for i in group]
        r = pb.res(leaves, refute(EX1, [pb.node(n) for n in leaves]))
        halves.append(pb.forall_red(r))
    root = pb.res(halves, refute(EX1, [pb.node(n) for n in halves]))
    return pb.build(root)


def build_example2():
    """ExpRes on clauses 5..9 at level 5, then the same tail as example1."""
    pb = ProofBuilder(EX2)
    ids = (5, 6, 7, 8, 9)
    tree = ExpansionTree([[{8: False}], [{8: True}]])
    reg = AnnotationRegistry(EX2.num_vars + 1)
    expanded = expand_tree(tree, EX2.blocks[4:], [lit_at(EX2, i, 5, ">=") for i in ids])
    pi = extract_resolution_proof([reg.clause(c) for c in expanded])
    top = pb.forall_red(pb.exp_res(5, ids, tree, reg.inverse(), pi))
    halves = []
    for pair in ((1, 4), (2, 3)):
        prem = [pb.init(i, 3) for i in pair] + [top]
        r = pb.res(prem, refute(EX2, [pb.node(n) for n in prem]))
        halves.append(pb.forall_red(r))
    root = pb.res(halves, refute(EX2, [pb.node(n) for n in halves]))
    return pb.build(root)


# -- fixtures --------------------------------------------------------------------------


def test_example1_reference_proof():
    proof = build_example1()
    check_proof(EX1, proof)
    assert len(proof.nodes) == 10
    # 10 objects, one inner node in each level-3 refutation, none at level 1
    assert proof.size == 12
    assert proof.nodes[proof.root] == ProofObject((1, 2, 3, 4, 5), 0)


def test_example2_reference_proof():
    proof = build_example2()
    check_proof(EX2, proof)
    assert proof.count(EXP_RES) == 1
    exp_node = next(a for a in proof.apps if a.rule == EXP_RES).conclusions[0]
    assert proof.nodes[exp_node] == ProofObject((5, 6, 7, 8, 9), 4)
    assert outer_clause(EX2, proof.nodes[exp_node]) == {-3, -4, -5}


def test_crn_strengthened_proof():
    for n in (2, 3, 4):
        proof = gen_crn_strengthened_proof(n)
        check_proof(gen_crn(n), proof)
        assert proof.count(STRENGTHEN) == n


# -- single rules --------------------------------------------------------------------


def test_init():
    assert apply_init(EX1, 1, 3) == ProofObject((1,), 3)
    with pytest.raises(ProofViolation, match="init.inner_literals"):
        apply_init(EX1, 1, 2)
    with pytest.raises(ProofViolation, match="init.clause_id"):
        apply_init(EX1, 6, 3)
    with pytest.raises(ProofViolation, match="init.level"):
        apply_init(EX1, 1, 4)


def test_res_and_reduction():
    objs = [apply_init(EX1, i, 3) for i in (1, 4, 5)]
    pi = refute(EX1, objs)
    r = apply_res(EX1, objs, pi)
    assert r == ProofObject((1, 4, 5), 2)
    assert lits_of(EX1, r) == {2}
    assert outer_clause(EX1, r) == {-1, 2}
    assert apply_forall_red(EX1, r) == ProofObject((1, 4, 5), 1)
    with pytest.raises(ProofViolation, match="res.kind"):
        apply_res(EX1, [r], pi)
    with pytest.raises(ProofViolation, match="res.level"):
        apply_res(EX1, [objs[0], r], pi)
    with pytest.raises(ProofViolation, match="res.pi_leaf"):
        apply_res(EX1, objs[:2], pi)
    with pytest.raises(ProofViolation, match="forall_red.kind"):
        apply_forall_red(EX1, objs[0])


def test_forall_red_tautology():
    objs = [apply_init(EX1, i, 3) for i in (2, 4, 5)]
    r = apply_res(EX1, objs, refute(EX1, objs))
    with pytest.raises(ProofViolation, match="forall_red.tautology"):
        apply_forall_red(EX1, r)


def test_strengthen_rule():
    pcnf = gen_crn(2)
    k = 1
    # clauses 4 and 8 share the inner part (-z v b_1)
    prem = ProofObject((2, 4, 6), k)
    main, side = apply_strengthen(pcnf, prem, 4, (4, 8), 50)
    assert main == ProofObject((2, 6), k, (50,))
    assert side == [ProofObject((4,), k, (-50,)), ProofObject((8,), k, (-50,))]
    with pytest.raises(ProofViolation, match="strengthen.fresh"):
        apply_strengthen(pcnf, prem, 4, (4,), 3)
    with pytest.raises(ProofViolation, match="strengthen.fresh"):
        apply_strengthen(pcnf, main, 6, (6,), 50)
    with pytest.raises(ProofViolation, match="strengthen.pivot_clause"):
        apply_strengthen(pcnf, prem, 1, (1,), 51)
    with pytest.raises(ProofViolation, match="strengthen.kind"):
        apply_strengthen(pcnf, ProofObject((4,), 2), 4, (4,), 51)
    with pytest.raises(ProofViolation, match="forall_red.fresh"):
        apply_forall_red(pcnf, ProofObject((6,), 2, (50,)))


def test_strengthen_subset_violation():
    pcnf = gen_crn(2)
    # clause 6 carries b_2 where clause 4 has b_1
    assert lit_at(pcnf, 6, 1, ">") - lit_at(pcnf, 4, 1, ">") == {9}
    with pytest.raises(ProofViolation, match="strengthen.subset"):
        apply_strengthen(pcnf, ProofObject((2, 4, 6), 1), 4, (4, 6), 50)


def test_exp_res_rule_conditions():
    ids = (5, 6, 7, 8, 9)
    proj = [tuple(sorted(lit_at(EX2, i, 5, ">="))) for i in ids]
    tree = ExpansionTree([[{8: False}], [{8: True}]])
    reg = AnnotationRegistry(EX2.num_vars + 1)
    pi = extract_resolution_proof([reg.clause(c) for c in expand_tree(tree, EX2.blocks[4:], proj)])
    ann = reg.inverse()
    assert apply_exp_res(EX2, 5, ids, proj, tree, ann, pi) == ProofObject(ids, 4)
    with pytest.raises(ProofViolation, match="exp_res.kind"):
        apply_exp_res(EX2, 4, ids, proj, tree, ann, pi)
    with pytest.raises(ProofViolation, match="exp_res.projection"):
        apply_exp_res(EX2, 5, ids, proj[:-1] + [proj[-1][:1]], tree, ann, pi)
    with pytest.raises(ProofViolation, match="exp_res.projection"):
        apply_exp_res(EX2, 5, ids[:-1], proj, tree, ann, pi)
    with pytest.raises(ProofViolation, match="exp_res.tree_depth"):
        apply_exp_res(EX2, 5, ids, proj, ExpansionTree([[]]), ann, pi)
    with pytest.raises(ProofViolation, match="exp_res.annotation"):
        apply_exp_res(EX2, 5, ids, proj, tree, {1: next(iter(ann.values()))}, pi)
    with pytest.raises(ProofViolation, match="exp_res.pi"):
        apply_exp_res(EX2, 5, ids[:1], proj[:1], tree, ann, pi)


# -- whole proofs --------------------------------------------------------------------


@pytest.mark.parametrize("mode", MODES)
def test_solver_proofs_round_trip(mode):
    for pcnf in (EX1, EX2, gen_crn(3)):
        proof = solve_mode(pcnf, mode, proof_logging=True).proof
        again = RedResProof.loads(proof.dumps(pcnf))
        assert again == proof
        check_proof(pcnf, again)
        assert proof.to_json(pcnf)["formula_hash"] == pcnf.digest()


def test_reference_proofs_round_trip():
    for pcnf, proof in ((EX1, build_example1()), (EX2, build_example2()), (gen_crn(2), gen_crn_strengthened_proof(2))):
        check_proof(pcnf, RedResProof.loads(proof.dumps(pcnf)))


def test_from_json_rejects_sparse_ids():
    data = build_example1().to_json()
    data["nodes"][0]["id"] = 99
    with pytest.raises(ValueError):
        RedResProof.from_json(data)


def test_prune_drops_unused():
    pb = ProofBuilder(EX1)
    pb.init(2, 3)
    full = build_example1()
    for app in full.apps:
        pb.apps.append(dataclasses.replace(app, conclusions=tuple(c + 1 for c in app.conclusions),
                                           premises=tuple(p + 1 for p in app.premises)))
    pb.nodes.extend(full.nodes)
    raw = pb.build(full.root + 1, prune=False)
    check_proof(EX1, raw)
    pruned = prune_proof(raw)
    assert len(pruned.nodes) == len(raw.nodes) - 1
    check_proof(EX1, pruned)


def test_non_refutation_allowed_when_requested():
    pb = ProofBuilder(EX1)
    proof = pb.build(pb.init(1, 3))
    with pytest.raises(ProofViolation, match="root.level"):
        check_proof(EX1, proof)
    check_proof(EX1, proof, refutation=False)


def test_underived_node():
    proof = build_example1()
    extra = dataclasses.replace(proof, nodes=proof.nodes + (ProofObject((1,), 3),))
    with pytest.raises(ProofViolation, match="dag.underived"):
        check_proof(EX1, extra)


def test_violation_message_names_node_and_rule():
    proof = build_example1()
    bad = dataclasses.replace(proof, apps=(dataclasses.replace(proof.apps[0], level=2),) + proof.apps[1:])
    with pytest.raises(ProofViolation) as info:
        check_proof(EX1, bad)
    assert info.value.node == proof.apps[0].conclusions[0]
    assert info.value.rule == "init"
    assert "init.inner_literals" in str(info.value)


# -- Q-resolution ------------------------------------------------------------------------


def test_export_example1():
    qres = export_qres(EX1, build_example1())
    report = check_qres(EX1, qres)
    assert report.level_ordered
    assert report.resolutions == 5
    assert report.reductions == 2
    assert qres.clauses[qres.root] == frozenset()


def test_export_rejects_strengthen_and_expansion():
    with pytest.raises(ExportError):
        export_qres(gen_crn(2), gen_crn_strengthened_proof(2))
    with pytest.raises(ExportError):
        export_qres(EX2, build_example2())


SMALL = PCNF(
    [QuantBlock(EXISTS, (1,)), QuantBlock(FORALL, (2,)), QuantBlock(EXISTS, (3,))],
    [[1, 3], [-1, 3], [-3], [2, 3]],
)


def qres(*rows, root=None):
    clauses = tuple(frozenset(c) for c, _ in rows)
    return QResProof(clauses, tuple(s for _, s in rows), len(rows) - 1 if root is None else root)


def test_qres_not_level_ordered():
    # resolving x before y: the outer pivot is cut first
    proof = qres(([1, 3], None), ([-1, 3], None), ([3], ("res", 0, 1, 1)), ([-3], None), ([], ("res", 2, 3, 3)))
    assert check_qres(SMALL, proof).level_ordered is False


def test_qres_level_ordered():
    proof = qres(
        ([1, 3], None), ([-3], None), ([1], ("res", 0, 1, 3)),
        ([-1, 3], None), ([-1], ("res", 3, 1, 3)), ([], ("res", 2, 4, 1)),
    )
    report = check_qres(SMALL, proof)
    assert report.level_ordered and report.resolutions == 3


@pytest.mark.parametrize(
    "rows, condition",
    [
        ([([1], None)], "qres.leaf"),
        ([([2, 3], None), ([-3], None), ([2], ("res", 0, 1, 3)), ([], ("red", 2, [2]))], None),
        ([([2, 3], None), ([3], ("red", 0, [2]))], "qres.reduce_dependency"),
        ([([1, 3], None), ([3], ("red", 0, [1]))], "qres.reduce_existential"),
        ([([1, 3], None), ([1], ("red", 0, [2]))], "qres.reduce"),
        ([([2, 3], None), ([-3], None), ([2], ("res", 0, 1, 2))], "qres.pivot_universal"),
        ([([1, 3], None), ([-3], None), ([1], ("res", 0, 1, 1))], "qres.pivot"),
        ([([1, 3], None), ([-3], None), ([1, 2], ("res", 0, 1, 3))], "qres.resolvent"),
        ([([1, 3], None), ([-3], None), ([1], ("res", 0, 5, 3))], "qres.order"),
        ([([1, 3], None), ([1], ("bogus",))], "qres.step"),
        ([([1, 3], None)], "qres.root"),
    ],
)
def test_qres_checker(rows, condition):
    if condition is None:
        check_qres(SMALL, qres(*rows))
        return
    with pytest.raises(QResViolation) as info:
        check_qres(SMALL, qres(*rows))
    assert info.value.condition == condition


def test_qres_tautology():
    pcnf = PCNF([QuantBlock(EXISTS, (1, 2))], [[1, 2], [-1, -2]])
    proof = qres(([1, 2], None), ([-1, -2], None), ([2, -2], ("res", 0, 1, 1)))
    with pytest.raises(QResViolation) as info:
        check_qres(pcnf, proof)
    assert info.value.condition == "qres.tautology"
