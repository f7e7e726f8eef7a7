"""boxarith: a workbench for modal arithmetic over the box-extended
language of first-order arithmetic.

Modules:
  syntax        AST, parser, printer, substitution
  classes       formula classes and normal-form transforms
  coding        registry-based Goedel numbering, journal, fixed points
  proofs        Hilbert proof objects and their text form
  kernel        theories, axiom schemes, proof checker, theorem store
  synth         proof synthesizers and proof transformers
  translate     alpha/beta and the provability translations
  semantics     budgeted three-valued standard-model evaluation
  constructions Rosser-style fixed-point gallery and DP/DC audits
  modalprop     propositional modal deciders and the MDP scanner
  cli           the boxarith command-line tool
"""

from .classes import Cls, classify
from .coding import CodeRegistry, fixed_points, numeral
from .kernel import TheoremStore, check_proof, handle_for, is_axiom, pr_search
from .proofs import Proof
from .semantics import TV, Model, eval_sentence, prov_model, triv_model, ver_model
from .syntax import (
    Formula,
    Term,
    TheoryId,
    free_vars,
    parse,
    parse_term,
    parse_theory,
    print_formula,
    substitute,
)
from .translate import alpha, beta, pi, pi_prime, rho

__all__ = [
    "Cls",
    "classify",
    "CodeRegistry",
    "fixed_points",
    "numeral",
    "TheoremStore",
    "check_proof",
    "handle_for",
    "is_axiom",
    "pr_search",
    "Proof",
    "TV",
    "Model",
    "eval_sentence",
    "prov_model",
    "triv_model",
    "ver_model",
    "Formula",
    "Term",
    "TheoryId",
    "free_vars",
    "parse",
    "parse_term",
    "parse_theory",
    "print_formula",
    "substitute",
    "alpha",
    "beta",
    "pi",
    "pi_prime",
    "rho",
]
