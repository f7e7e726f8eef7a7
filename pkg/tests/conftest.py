"""Shared random-formula generators for the test suite.

All generators are driven by a seeded random.Random so runs are
reproducible.  Sizes are calibrated to the evaluation budgets used in the
acceptance criteria: numerals stay small, bounded-quantifier bounds stay
below the tautology-assembly ceiling, and unbounded exists nesting stays
shallow enough that true sentences have small witnesses.
"""

import random

import pytest

from boxarith.classes import Cls, classify
from boxarith.syntax import (
    Add,
    And,
    BExists,
    BForall,
    Bot,
    Box,
    Eq,
    Exists,
    Forall,
    Iff,
    Imp,
    Le,
    Lt,
    Mul,
    Not,
    NumLit,
    Or,
    Succ,
    Var,
    Zero,
)

VARS = [Var(n) for n in ("x", "y", "z", "w")]


def gen_term(rng, vars_, depth):
    if depth <= 0 or rng.random() < 0.4:
        roll = rng.random()
        if roll < 0.25:
            return Zero()
        if roll < 0.55 and vars_:
            return rng.choice(vars_)
        return NumLit(rng.randrange(0, 7))
    kind = rng.randrange(3)
    if kind == 0:
        return Succ(gen_term(rng, vars_, depth - 1))
    if kind == 1:
        return Add(gen_term(rng, vars_, depth - 1), gen_term(rng, vars_, depth - 1))
    return Mul(gen_term(rng, vars_, depth - 1), gen_term(rng, vars_, depth - 1))


def gen_atom(rng, vars_):
    t1 = gen_term(rng, vars_, 1)
    t2 = gen_term(rng, vars_, 1)
    return rng.choice([Eq, Le, Lt])(t1, t2)


def gen_structured_atom(rng, vars_):
    """prf / inW / dotted-code atoms, for syntax-level robustness tests.
    Kept out of the evaluation corpora, which stay registry-free."""
    from boxarith.syntax import CodeSub, InWAtom, PrfAtom, TheoryId, free_vars

    roll = rng.random()
    if roll < 0.4:
        tag = rng.choice(["k", "k4", "gl", "ver", "paB"])
        return PrfAtom(TheoryId(tag), gen_term(rng, vars_, 1), gen_term(rng, vars_, 1))
    if roll < 0.7:
        return InWAtom(gen_term(rng, vars_, 1), gen_term(rng, vars_, 1))
    coded = gen_formula(rng, [Var("a"), Var("b")][: rng.randrange(0, 3)], 2)
    subst = tuple((v, gen_term(rng, vars_, 1)) for v in sorted(free_vars(coded), key=lambda v: v.name))
    return Eq(CodeSub(coded, subst), gen_term(rng, vars_, 1))


def _fresh_var(vars_):
    for v in VARS:
        if v not in vars_:
            return v
    return Var(f"u{len(vars_)}")


def _small_bound(rng, vars_):
    # closed bound keeps expansion-based proofs below the assembly ceiling
    return NumLit(rng.randrange(0, 5))


def gen_delta0(rng, vars_, depth):
    if depth <= 0:
        return gen_atom(rng, vars_)
    roll = rng.random()
    if roll < 0.3:
        return gen_atom(rng, vars_)
    if roll < 0.42:
        return Not(gen_delta0(rng, vars_, depth - 1))
    if roll < 0.72:
        cls = rng.choice([And, Or, Imp, Iff])
        return cls(gen_delta0(rng, vars_, depth - 1), gen_delta0(rng, vars_, depth - 1))
    v = _fresh_var(vars_)
    cls = rng.choice([BForall, BExists])
    return cls(v, _small_bound(rng, vars_), gen_delta0(rng, vars_ + [v], depth - 1))


def gen_sigma1(rng, vars_, depth, exists_budget=2):
    if depth <= 0:
        return gen_atom(rng, vars_)
    roll = rng.random()
    if roll < 0.3:
        return gen_delta0(rng, vars_, min(depth - 1, 2))
    if roll < 0.6:
        cls = rng.choice([And, Or])
        return cls(
            gen_sigma1(rng, vars_, depth - 1, exists_budget),
            gen_sigma1(rng, vars_, depth - 1, exists_budget),
        )
    if roll < 0.8 or exists_budget <= 0:
        v = _fresh_var(vars_)
        cls = rng.choice([BForall, BExists])
        return cls(v, _small_bound(rng, vars_), gen_sigma1(rng, vars_ + [v], depth - 1, exists_budget))
    v = _fresh_var(vars_)
    return Exists(v, gen_sigma1(rng, vars_ + [v], depth - 1, exists_budget - 1))


def gen_boxed(rng, vars_, depth, box_pool=None):
    if box_pool is not None:
        return Box(rng.choice(box_pool))
    return Box(gen_formula(rng, vars_, depth - 1))


def gen_delta_b(rng, vars_, depth, box_pool=None):
    if depth <= 0:
        return gen_atom(rng, vars_) if rng.random() < 0.6 else gen_boxed(rng, vars_, 1, box_pool)
    roll = rng.random()
    if roll < 0.22:
        return gen_delta0(rng, vars_, min(depth, 2))
    if roll < 0.44:
        return gen_boxed(rng, vars_, depth, box_pool)
    if roll < 0.76:
        cls = rng.choice([And, Or])
        return cls(
            gen_delta_b(rng, vars_, depth - 1, box_pool),
            gen_delta_b(rng, vars_, depth - 1, box_pool),
        )
    v = _fresh_var(vars_)
    cls = rng.choice([BForall, BExists])
    return cls(v, _small_bound(rng, vars_), gen_delta_b(rng, vars_ + [v], depth - 1, box_pool))


def gen_sigma_b(rng, vars_, depth, box_pool=None, exists_budget=2):
    if depth <= 0:
        return gen_delta_b(rng, vars_, 0, box_pool)
    roll = rng.random()
    if roll < 0.2:
        return gen_sigma1(rng, vars_, min(depth, 3), exists_budget=1)
    if roll < 0.4:
        return gen_delta_b(rng, vars_, depth - 1, box_pool)
    if roll < 0.65:
        cls = rng.choice([And, Or])
        return cls(
            gen_sigma_b(rng, vars_, depth - 1, box_pool, exists_budget),
            gen_sigma_b(rng, vars_, depth - 1, box_pool, exists_budget),
        )
    if roll < 0.85 and exists_budget > 0:
        v = _fresh_var(vars_)
        return Exists(v, gen_sigma_b(rng, vars_ + [v], depth - 1, box_pool, exists_budget - 1))
    v = _fresh_var(vars_)
    cls = rng.choice([BForall, BExists])
    return cls(
        v, _small_bound(rng, vars_), gen_sigma_b(rng, vars_ + [v], depth - 1, box_pool, exists_budget)
    )


def gen_formula(rng, vars_, depth, ub=2):
    """Arbitrary formulas: all connectives, both quantifier kinds, boxes.

    ub caps the nesting of unbounded quantifiers so budgeted evaluation
    stays polynomial in the witness budget.
    """
    if depth <= 0:
        return rng.choice([gen_atom(rng, vars_), Bot()])
    roll = rng.random()
    if roll < 0.18:
        return gen_atom(rng, vars_)
    if roll < 0.24:
        return Not(gen_formula(rng, vars_, depth - 1, ub))
    if roll < 0.5:
        cls = rng.choice([And, Or, Imp, Iff])
        return cls(
            gen_formula(rng, vars_, depth - 1, ub), gen_formula(rng, vars_, depth - 1, ub)
        )
    if roll < 0.62:
        return Box(gen_formula(rng, vars_, depth - 1, ub))
    v = _fresh_var(vars_)
    if roll < 0.74 and ub > 0:
        cls = rng.choice([Forall, Exists])
        return cls(v, gen_formula(rng, vars_ + [v], depth - 1, ub - 1))
    cls = rng.choice([BForall, BExists])
    return cls(v, _small_bound(rng, vars_), gen_formula(rng, vars_ + [v], depth - 1, ub))


def gen_sentence(rng, depth):
    return gen_formula(rng, [], depth)


def gen_sigma_b_sentence(rng, depth, box_pool=None, exists_budget=2):
    phi = gen_sigma_b(rng, [], depth, box_pool, exists_budget)
    assert Cls.SIGMA_B in classify(phi)
    return phi


def gen_delta_b_sentence(rng, depth, box_pool=None):
    phi = gen_delta_b(rng, [], depth, box_pool)
    assert Cls.DELTA_B in classify(phi)
    return phi


@pytest.fixture
def rng():
    return random.Random(20260810)
