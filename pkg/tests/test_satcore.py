from __future__ import annotations

import itertools
import os
import random
import subprocess
import sys

import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from redres.satcore import (
    BACKEND,
    BACKENDS,
    BudgetExhausted,
    ResolutionProof,
    ResolutionViolation,
    SatInstance,
    SatisfiableError,
    check_resolution_proof,
    extract_resolution_proof,
)
from redres.satcore.resolution import resolve


def brute_sat(clauses, nvars, fixed=()):
    for bits in itertools.product((False, True), repeat=nvars):
        val = lambda l: bits[abs(l) - 1] == (l > 0)
        if all(val(l) for l in fixed) and all(any(val(l) for l in c) for c in clauses):
            return True
    return False


def random_cnf(rng, nvars, nclauses, width=3):
    out = []
    for _ in range(nclauses):
        chosen = rng.sample(range(1, nvars + 1), rng.randint(1, min(width, nvars)))
        out.append([v if rng.random() < 0.5 else -v for v in chosen])
    return out


def pigeonhole(holes):
    var = lambda p, h: p * holes + h + 1
    clauses = [[var(p, h) for h in range(holes)] for p in range(holes + 1)]
    for h in range(holes):
        for p, q in itertools.combinations(range(holes + 1), 2):
            clauses.append([-var(p, h), -var(q, h)])
    return clauses, (holes + 1) * holes


def make(clauses, nvars, backend, seed=0):
    s = SatInstance(seed=seed, engine=BACKENDS[backend])
    s.reserve(nvars)
    for c in clauses:
        s.add_clause(c)
    return s


def test_default_backend_is_registered():
    assert BACKEND in BACKENDS
    assert "python" in BACKENDS


def test_trivial(backend):
    s = make([[1, 2], [-1], [-2, 3]], 3, backend)
    out = s.solve()
    assert out.sat and out.value(2) and out.value(3) and not out.value(1)
    assert s.calls == 1


def test_empty_clause_is_unsat(backend):
    s = make([[1], []], 1, backend)
    assert not s.solve().sat


def test_pigeonhole_unsat(backend):
    clauses, n = pigeonhole(5)
    assert not make(clauses, n, backend).solve().sat


def test_assumption_core(backend):
    s = make([[-1, -2], [3, 4]], 4, backend)
    out = s.solve([1, 2, 3])
    assert not out.sat
    assert out.core == {1, 2}
    # the instance stays usable after an assumption conflict
    assert s.solve([1, 3]).sat


def test_incremental_clauses(backend):
    s = make([[1, 2]], 3, backend)
    assert s.solve().sat
    s.add_clause([-1])
    s.add_clause([-2, 3])
    out = s.solve([-3])
    assert not out.sat and out.core <= {-3}
    v = s.new_var()
    assert v == 4 and s.num_vars == 4
    assert s.solve([v]).sat


def test_conflict_budget(backend):
    clauses, n = pigeonhole(7)
    with pytest.raises(BudgetExhausted):
        make(clauses, n, backend).solve(conflict_budget=5)


def test_differential_against_brute_force(backend):
    rng = random.Random(7)
    for _ in range(300):
        n = rng.randint(1, 8)
        clauses = random_cnf(rng, n, rng.randint(1, 30))
        assume = [v if rng.random() < 0.5 else -v for v in rng.sample(range(1, n + 1), rng.randint(0, n))]
        out = make(clauses, n, backend, seed=rng.randrange(100)).solve(assume)
        assert out.sat == brute_sat(clauses, n, assume)
        if out.sat:
            model = {v: out.value(v) for v in range(1, n + 1)}
            assert all(any(model[abs(l)] == (l > 0) for l in c) for c in clauses)
            assert all(out.value(l) for l in assume)
        else:
            assert out.core <= set(assume)
            assert not brute_sat(clauses, n, out.core)


def test_backends_agree_on_verdicts():
    if len(BACKENDS) < 2:
        pytest.skip("compiled backend not built")
    rng = random.Random(3)
    for _ in range(100):
        clauses = random_cnf(rng, 40, 170)
        verdicts = {make(clauses, 40, b).solve().sat for b in BACKENDS}
        assert len(verdicts) == 1


# -- resolution proofs -----------------------------------------------------------------


def test_resolve():
    assert resolve(frozenset({1, 2}), frozenset({-1, 3}), 1) == {2, 3}


def test_two_unit_refutation():
    proof = extract_resolution_proof([{1}, {2}, {-1, -2}])
    assert proof.num_steps == 2 and proof.size == 5
    assert proof.clauses[proof.root] == frozenset()
    assert proof.inner_nodes == 1


def test_satisfiable_input_rejected():
    with pytest.raises(SatisfiableError):
        extract_resolution_proof([{1, 2}, {-1}])


def test_empty_input_clause():
    proof = extract_resolution_proof([{1}, set()])
    check_resolution_proof(proof, [{1}, set()])
    assert proof.num_steps == 0


@pytest.mark.parametrize("holes", [2, 3, 4])
def test_pigeonhole_proofs(holes):
    clauses, _ = pigeonhole(holes)
    proof = extract_resolution_proof(clauses)
    check_resolution_proof(proof, clauses)


@settings(max_examples=150, deadline=None)
@given(st.integers(0, 10**6))
def test_extracted_proofs_check(seed):
    rng = random.Random(seed)
    n = rng.randint(1, 7)
    clauses = random_cnf(rng, n, rng.randint(1, 40))
    if brute_sat(clauses, n):
        with pytest.raises(SatisfiableError):
            extract_resolution_proof(clauses, seed=seed)
    else:
        proof = extract_resolution_proof(clauses, seed=seed)
        check_resolution_proof(proof, clauses)
        assert set(proof.leaf_clauses()) <= {frozenset(c) for c in clauses}


def test_json_round_trip():
    proof = extract_resolution_proof([{1}, {2}, {-1, -2}])
    assert ResolutionProof.from_json(proof.to_json()) == proof


def test_relabel():
    proof = extract_resolution_proof([{1}, {2}, {-1, -2}]).relabel({1: 7})
    check_resolution_proof(proof, [{7}, {2}, {-7, -2}])


@pytest.mark.parametrize(
    "mutate, fragment",
    [
        (lambda c, s: (c[:1] + [frozenset({9})] + c[2:], s), "foreign leaf"),
        (lambda c, s: (c, [x if x is None else (x[0], x[1], 5) for x in s]), "complementary"),
        (lambda c, s: (c, [x if x is None else (x[0], x[1], -x[2]) for x in s]), "positive"),
    ],
)
def test_checker_rejects(mutate, fragment):
    inputs = [{1}, {2}, {-1, -2}]
    proof = extract_resolution_proof(inputs)
    clauses, steps = mutate(list(proof.clauses), list(proof.steps))
    bad = ResolutionProof(tuple(clauses), tuple(steps), proof.root)
    with pytest.raises(ResolutionViolation, match=fragment):
        check_resolution_proof(bad, inputs)


def test_checker_rejects_nonempty_root():
    leaf = ResolutionProof((frozenset({1}),), (None,), 0)
    with pytest.raises(ResolutionViolation, match="root is not the empty clause"):
        check_resolution_proof(leaf, [{1}])


def test_environment_forces_fallback():
    env = dict(os.environ, REDRES_BACKEND="python")
    out = subprocess.run(
        [sys.executable, "-c", "import redres.satcore as s; print(s.BACKEND, sorted(s.BACKENDS))"],
        env=env, capture_output=True, text=True, check=True,
    )
    assert out.stdout.split()[0] == "python"
