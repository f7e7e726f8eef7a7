"""Standard-model evaluation with three box semantics and budgets.

Truth values are three-valued: unbounded quantifiers are searched up to the
model's witness budget and report unknown when the search is inconclusive,
so Sigma1 truth is never faked.  Closed Delta0 sentences always come out
true or false.  Box is evaluated per model flavor: `triv` reads box phi as
phi, `ver` reads it as true, `prov` reads it as a budgeted search of the
theorem store for a proof of the boxed body (with the assignment's values
substituted as numerals).

Raising the budget never flips a true or false answer.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from enum import Enum

from .coding import EvalError, eval_term, numeral
from .proofs import Proof
from .syntax import (
    And,
    BExists,
    BForall,
    Bot,
    Box,
    Eq,
    Exists,
    Forall,
    Formula,
    Iff,
    Imp,
    InWAtom,
    Le,
    Lt,
    Not,
    Or,
    PrfAtom,
    free_vars,
    free_vars_frozen,
    substitute,
)


class TV(Enum):
    TRUE = "true"
    FALSE = "false"
    UNKNOWN = "unknown"

    def __bool__(self):
        raise TypeError("three-valued result; compare against TV members")


def not3(a):
    if a is TV.TRUE:
        return TV.FALSE
    if a is TV.FALSE:
        return TV.TRUE
    return TV.UNKNOWN


def and3(a, b):
    if a is TV.FALSE or b is TV.FALSE:
        return TV.FALSE
    if a is TV.TRUE and b is TV.TRUE:
        return TV.TRUE
    return TV.UNKNOWN


def or3(a, b):
    if a is TV.TRUE or b is TV.TRUE:
        return TV.TRUE
    if a is TV.FALSE and b is TV.FALSE:
        return TV.FALSE
    return TV.UNKNOWN


class WFamily:
    """Registered enumerators for the r.e. sets behind inW atoms.

    An enumerator is certified-membership only: fn(x, budget) -> bool, where
    True means membership was certified within the budget.  Unregistered
    indices always evaluate unknown.
    """

    def __init__(self):
        self._fns = {}

    def register(self, index, fn):
        self._fns[index] = fn

    def query(self, member, index, budget):
        fn = self._fns.get(index)
        if fn is None:
            return TV.UNKNOWN
        return TV.TRUE if fn(member, budget) else TV.UNKNOWN


@dataclass(frozen=True)
class Model:
    """Evaluation context.  Treated as immutable; share freely."""

    flavor: str = "triv"  # triv | ver | prov
    budget: int = 64
    assignment: dict = field(default_factory=dict)
    registry: object = None
    theory: object = None  # TheoryId, for the prov flavor
    store: object = None  # TheoremStore, for the prov flavor and Cited lines
    w_family: object = None

    def __post_init__(self):
        if self.flavor not in ("triv", "ver", "prov"):
            raise ValueError(f"unknown model flavor {self.flavor!r}")
        if self.flavor == "prov" and (self.store is None or self.theory is None or self.registry is None):
            raise ValueError("prov flavor needs a theory, store and registry")


def triv_model(budget=64, assignment=None, registry=None, store=None, w_family=None):
    return Model("triv", budget, assignment or {}, registry, None, store, w_family)


def ver_model(budget=64, assignment=None, registry=None, store=None, w_family=None):
    return Model("ver", budget, assignment or {}, registry, None, store, w_family)


def prov_model(theory, store, registry, budget=64, assignment=None, w_family=None):
    return Model("prov", budget, assignment or {}, registry, theory, store, w_family)


def _check_prf(theory_id, target_code, witness_code, model):
    """Exact Prf semantics: the witness decodes to a proof that checks under
    the named theory and concludes the decoded target."""
    from . import kernel  # deferred: kernel imports this module

    reg = model.registry
    if reg is None:
        raise EvalError("prf atom needs a registry")
    try:
        proof = reg.decode(witness_code)
        target = reg.decode(target_code)
    except KeyError:
        return TV.FALSE
    if not isinstance(proof, Proof) or not isinstance(target, Formula):
        return TV.FALSE
    handle = kernel.handle_for(theory_id)
    res = kernel.check_proof(handle, proof, store=model.store, registry=reg)
    if res.ok and proof.conclusion == target:
        return TV.TRUE
    return TV.FALSE


def eval_sentence(phi, model):
    """Three-valued truth of phi under the model's assignment and budget."""

    reg = model.registry
    budget = model.budget
    cache = {}

    def term(t, env):
        return eval_term(t, env, reg)

    def go(p, env):
        if isinstance(p, (Bot, Eq, Le, Lt)):
            return _eval_node(p, env)
        # quantifier scans revisit subformulas over the same relevant
        # bindings constantly; memoize per (node, projected environment)
        fv = free_vars_frozen(p)
        key = (p, tuple(sorted((v.name, env[v]) for v in fv)))
        hit = cache.get(key)
        if hit is not None:
            return hit
        out = _eval_node(p, env)
        cache[key] = out
        return out

    def _eval_node(p, env):
        if isinstance(p, Bot):
            return TV.FALSE
        if isinstance(p, Eq):
            return TV.TRUE if term(p.left, env) == term(p.right, env) else TV.FALSE
        if isinstance(p, Le):
            return TV.TRUE if term(p.left, env) <= term(p.right, env) else TV.FALSE
        if isinstance(p, Lt):
            return TV.TRUE if term(p.left, env) < term(p.right, env) else TV.FALSE
        if isinstance(p, PrfAtom):
            return _check_prf(p.theory, term(p.target, env), term(p.witness, env), model)
        if isinstance(p, InWAtom):
            fam = model.w_family
            if fam is None:
                return TV.UNKNOWN
            return fam.query(term(p.member, env), term(p.index, env), budget)
        if isinstance(p, Not):
            return not3(go(p.body, env))
        if isinstance(p, And):
            return and3(go(p.left, env), go(p.right, env))
        if isinstance(p, Or):
            return or3(go(p.left, env), go(p.right, env))
        if isinstance(p, Imp):
            return or3(not3(go(p.left, env)), go(p.right, env))
        if isinstance(p, Iff):
            a, b = go(p.left, env), go(p.right, env)
            if TV.UNKNOWN in (a, b):
                return TV.UNKNOWN
            return TV.TRUE if a is b else TV.FALSE
        if isinstance(p, Forall):
            for n in range(budget + 1):
                if go(p.body, {**env, p.var: n}) is TV.FALSE:
                    return TV.FALSE
            return TV.UNKNOWN
        if isinstance(p, Exists):
            for n in range(budget + 1):
                if go(p.body, {**env, p.var: n}) is TV.TRUE:
                    return TV.TRUE
            return TV.UNKNOWN
        if isinstance(p, BForall):
            k = term(p.bound, env)
            acc = TV.TRUE
            for n in range(k):
                acc = and3(acc, go(p.body, {**env, p.var: n}))
                if acc is TV.FALSE:
                    return TV.FALSE
            return acc
        if isinstance(p, BExists):
            k = term(p.bound, env)
            acc = TV.FALSE
            for n in range(k):
                acc = or3(acc, go(p.body, {**env, p.var: n}))
                if acc is TV.TRUE:
                    return TV.TRUE
            return acc
        if isinstance(p, Box):
            if model.flavor == "triv":
                return go(p.body, env)
            if model.flavor == "ver":
                return TV.TRUE
            inst = p.body
            for v in sorted(free_vars(p.body), key=lambda w: w.name):
                if v not in env:
                    raise EvalError(f"unbound variable {v.name} under box")
                inst = substitute(inst, v, numeral(env[v]))
            fcode = reg.code_of(inst)
            found = model.store.find_proof(model.theory, fcode, budget)
            return TV.TRUE if found is not None else TV.UNKNOWN
        raise TypeError(f"not a formula: {p!r}")

    return go(phi, dict(model.assignment))


def decide_delta0(phi, registry=None, store=None):
    """Total decision for closed Delta0 sentences (budget-free fragment)."""
    m = Model("triv", 0, {}, registry, None, store, None)
    v = eval_sentence(phi, m)
    if v is TV.UNKNOWN:
        raise EvalError(f"not a decidable Delta0 sentence: {phi!r}")
    return v is TV.TRUE
