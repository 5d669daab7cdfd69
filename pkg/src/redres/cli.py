"""Command-line interface: ``redres solve|check|gen|oracle``.

Exit codes: 10 true, 20 false (solve only), 0 success for the other
commands, 1 for any error.
"""

from __future__ import annotations

import argparse
import json
import sys
from typing import List, Optional

from .bench import FAMILIES, FamilyParams, OracleLimit, generate, oracle_eval
from .calculus import ProofViolation, RedResProof, check_proof
from .formula import PCNF, QDIMACSError, emit_qdimacs, parse_qdimacs
from .solver import MODES, LimitExceeded, SolverConfig, solve

EXIT_OK, EXIT_ERROR, EXIT_TRUE, EXIT_FALSE = 0, 1, 10, 20


class CliError(Exception):
    pass


class _Parser(argparse.ArgumentParser):
    def error(self, message):
        self.print_usage(sys.stderr)
        self.exit(EXIT_ERROR, f"{self.prog}: error: {message}\n")


def _read_formula(path: str, what: str = "formula") -> PCNF:
    try:
        if path == "-":
            text = sys.stdin.read()
        else:
            with open(path, encoding="utf-8") as fh:
                text = fh.read()
    except OSError as exc:
        raise CliError(f"cannot read {what}: {exc.strerror or exc}: {path}") from None
    try:
        return parse_qdimacs(text)
    except QDIMACSError as exc:
        raise CliError(f"parse error in {path}: {exc}") from None


def _cmd_solve(args) -> int:
    pcnf = _read_formula(args.input)
    config = SolverConfig.from_mode(
        args.refinement,
        seed=args.seed,
        proof_logging=args.proof is not None,
        time_limit=args.time_limit,
        conflict_limit=args.conflict_limit,
        backend=args.backend,
    )
    try:
        outcome = solve(pcnf, config)
    except LimitExceeded as exc:
        raise CliError(str(exc)) from None
    print("s cnf TRUE" if outcome.verdict else "s cnf FALSE")
    if args.stats:
        for line in outcome.stats.report():
            print(line)
    if args.proof is not None and outcome.proof is not None:
        try:
            with open(args.proof, "w", encoding="utf-8") as fh:
                fh.write(outcome.proof.dumps(pcnf))
        except OSError as exc:
            raise CliError(f"cannot write proof: {exc.strerror or exc}: {args.proof}") from None
    return EXIT_TRUE if outcome.verdict else EXIT_FALSE


def _cmd_check(args) -> int:
    pcnf = _read_formula(args.formula)
    try:
        with open(args.proof, encoding="utf-8") as fh:
            data = json.load(fh)
    except OSError as exc:
        raise CliError(f"cannot read proof: {exc.strerror or exc}: {args.proof}") from None
    except json.JSONDecodeError as exc:
        raise CliError(f"malformed proof file: {exc}") from None
    recorded = data.get("formula_hash") if isinstance(data, dict) else None
    if recorded is not None and recorded != pcnf.digest():
        raise CliError("proof was produced for a different formula (formula_hash mismatch)")
    try:
        proof = RedResProof.from_json(data)
    except (KeyError, TypeError, ValueError) as exc:
        raise CliError(f"malformed proof file: {exc}") from None
    try:
        check_proof(pcnf, proof)
    except ProofViolation as exc:
        raise CliError(f"proof rejected: {exc}") from None
    except (IndexError, KeyError, TypeError) as exc:
        raise CliError(f"proof rejected: malformed application ({exc})") from None
    print(f"proof ok: {len(proof.nodes)} nodes, {len(proof.apps)} rule applications, size {proof.size}")
    return EXIT_OK


def _cmd_gen(args) -> int:
    try:
        pcnf = generate(FamilyParams(args.family, args.n, args.seed))
    except ValueError as exc:
        raise CliError(str(exc)) from None
    text = emit_qdimacs(pcnf)
    if args.output in (None, "-"):
        sys.stdout.write(text)
    else:
        try:
            with open(args.output, "w", encoding="utf-8") as fh:
                fh.write(text)
        except OSError as exc:
            raise CliError(f"cannot write {args.output}: {exc.strerror or exc}") from None
    return EXIT_OK


def _cmd_oracle(args) -> int:
    pcnf = _read_formula(args.input)
    try:
        print("TRUE" if oracle_eval(pcnf) else "FALSE")
    except OracleLimit as exc:
        raise CliError(str(exc)) from None
    return EXIT_OK


def build_parser() -> argparse.ArgumentParser:
    ap = _Parser(prog="redres", description="QBF solver with level-wise refutation proofs")
    sub = ap.add_subparsers(dest="command", required=True, parser_class=_Parser)

    p = sub.add_parser("solve", help="decide a QDIMACS formula")
    p.add_argument("input", help="QDIMACS file, or - for stdin")
    p.add_argument("--refinement", choices=MODES, default="both")
    p.add_argument("--proof", metavar="FILE", help="write a refutation here when the formula is false")
    p.add_argument("--stats", action="store_true", help="print statistics after the verdict")
    p.add_argument("--seed", type=int, default=0)
    p.add_argument("--time-limit", type=float, metavar="SECONDS")
    p.add_argument("--conflict-limit", type=int, metavar="N", help="conflict budget per SAT call")
    p.add_argument("--backend", choices=("python", "cython"), help="SAT engine (default: fastest available)")
    p.set_defaults(run=_cmd_solve)

    p = sub.add_parser("check", help="verify a refutation against its formula")
    p.add_argument("proof")
    p.add_argument("formula")
    p.set_defaults(run=_cmd_check)

    p = sub.add_parser("gen", help="write a formula family instance as QDIMACS")
    p.add_argument("family", choices=sorted(FAMILIES))
    p.add_argument("--n", type=int, default=2)
    p.add_argument("--seed", type=int, default=0)
    p.add_argument("-o", "--output", metavar="FILE")
    p.set_defaults(run=_cmd_gen)

    p = sub.add_parser("oracle", help="evaluate a small formula by exhaustive search")
    p.add_argument("input", nargs="?", default="-")
    p.set_defaults(run=_cmd_oracle)
    return ap


def main(argv: Optional[List[str]] = None) -> int:
    args = build_parser().parse_args(argv)
    try:
        return args.run(args)
    except CliError as exc:
        print(f"redres: {exc}", file=sys.stderr)
        return EXIT_ERROR
    except ValueError as exc:
        print(f"redres: {exc}", file=sys.stderr)
        return EXIT_ERROR


if __name__ == "__main__":
    sys.exit(main())
