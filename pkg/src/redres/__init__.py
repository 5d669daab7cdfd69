"""QBF solving by clausal abstraction, with checkable level-wise refutations."""

from .calculus import ProofViolation, RedResProof, check_proof, check_qres, export_qres
from .formula import PCNF, QDIMACSError, QuantBlock, emit_qdimacs, parse_qdimacs, read_qdimacs
from .solver import MODES, SolveOutcome, SolverConfig, solve, solve_mode

__version__ = "0.1.0"

__all__ = [
    "MODES",
    "PCNF",
    "ProofViolation",
    "QDIMACSError",
    "QuantBlock",
    "RedResProof",
    "SolveOutcome",
    "SolverConfig",
    "check_proof",
    "check_qres",
    "emit_qdimacs",
    "export_qres",
    "parse_qdimacs",
    "read_qdimacs",
    "solve",
    "solve_mode",
]
