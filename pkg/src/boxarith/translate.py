"""The box-erasing, box-trivializing, and provability translations.

alpha erases boxes (the Triv reading); beta sends every boxed subformula
to 0=0 (the Ver reading).  The three provability translations replace
box phi by a provability assertion over the ambient code registry:

  pi    — provability of the body,
  pi'   — provability of the body, conjoined with the translated body,
  rho   — provability of the boxed formula itself.

Open boxed subformulas translate through dotted-code terms (the code of
the body with the current values of its free variables substituted as
numerals); closed ones embed the plain registry code as a numeral.
"""

from __future__ import annotations

from dataclasses import dataclass

from .coding import numeral
from .syntax import (
    And,
    BExists,
    BForall,
    Bot,
    Box,
    Eq,
    Exists,
    Forall,
    FreshVars,
    Iff,
    Imp,
    InWAtom,
    Le,
    Lt,
    Not,
    Or,
    PrfAtom,
    TheoryId,
    Zero,
    code_sub,
    free_vars,
)

PR_VARIANTS = ("pi", "pi_prime", "rho")


@dataclass(frozen=True)
class PrVariant:
    tag: str
    theory: TheoryId

    def __post_init__(self):
        if self.tag not in PR_VARIANTS:
            raise ValueError(f"unknown provability translation {self.tag!r}")


def _map_formula(phi, on_box):
    if isinstance(phi, (Bot, Eq, Le, Lt, PrfAtom, InWAtom)):
        return phi
    if isinstance(phi, Not):
        return Not(_map_formula(phi.body, on_box))
    if isinstance(phi, (And, Or, Imp, Iff)):
        return type(phi)(_map_formula(phi.left, on_box), _map_formula(phi.right, on_box))
    if isinstance(phi, (Forall, Exists)):
        return type(phi)(phi.var, _map_formula(phi.body, on_box))
    if isinstance(phi, (BForall, BExists)):
        return type(phi)(phi.var, phi.bound, _map_formula(phi.body, on_box))
    if isinstance(phi, Box):
        return on_box(phi)
    raise TypeError(f"not a formula: {phi!r}")


def alpha(phi):
    """Erase boxes; the identity on arithmetic formulas."""
    return _map_formula(phi, lambda b: alpha(b.body))


def beta(phi):
    """Collapse every boxed subformula to 0=0."""
    return _map_formula(phi, lambda b: Eq(Zero(), Zero()))


def pr_translate(variant, phi, registry):
    """Translate under the chosen provability reading.

    The output is box-free but may contain structured prf atoms; closed
    boxes intern their sentence in the registry.
    """
    fresh = FreshVars(phi)
    theory = variant.theory

    def pr_atom(target):
        fv = sorted(free_vars(target), key=lambda v: v.name)
        if fv:
            code_term = code_sub(target, {v: v for v in fv})
        else:
            if registry is None:
                raise ValueError("closed boxes need a registry to intern their code")
            code_term = numeral(registry.code_of(target))
        y = fresh.take()
        return Exists(y, PrfAtom(theory, code_term, y))

    def on_box(b):
        if variant.tag == "pi":
            return pr_atom(b.body)
        if variant.tag == "pi_prime":
            return And(pr_atom(b.body), go(b.body))
        return pr_atom(b)  # rho codes the boxed formula itself

    def go(p):
        return _map_formula(p, on_box)

    return go(phi)


def pi(phi, theory, registry):
    return pr_translate(PrVariant("pi", theory), phi, registry)


def pi_prime(phi, theory, registry):
    return pr_translate(PrVariant("pi_prime", theory), phi, registry)


def rho(phi, theory, registry):
    return pr_translate(PrVariant("rho", theory), phi, registry)
