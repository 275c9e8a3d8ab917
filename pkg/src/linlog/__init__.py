"""Linear logic without weakening: proof checking, simulation of weakening,
counter-machine encodings, phase semantics and proof search."""

from .kernel import CLL, CLLR, CLLRR, ILL, ILLR, ILLRR, MALL, SYSTEMS, Proof, check_proof
from .syntax import Sequent, parse_formula, parse_sequent, print_formula, print_sequent

__version__ = "0.1.0"

__all__ = [
    "CLL", "CLLR", "CLLRR", "ILL", "ILLR", "ILLRR", "MALL", "SYSTEMS", "Proof",
    "Sequent", "check_proof", "parse_formula", "parse_sequent", "print_formula",
    "print_sequent",
]
