"""Formula classes and the normal-form transforms.

The six classes are decided purely syntactically, in one structural pass:

* LA       — box-free formulas (the arithmetic sublanguage);
* Delta0   — atoms closed under all Booleans and bounded quantifiers
             (structured prf atoms count as Delta0, inW atoms do not);
* Sigma1   — Delta0 plus inW atoms, closed under and/or, bounded
             quantifiers, and unbounded exists;
* B        — exactly the boxed formulas;
* DeltaB   — Delta0 and B, closed under and/or and bounded quantifiers;
* SigmaB   — Sigma1 and B, closed under and/or, unbounded exists, and
             bounded quantifiers (bounded exists included: the existential
             normal form below needs it, and it keeps DeltaB inside SigmaB).

Negation, implication and equivalence enter the modal classes only through
Delta0, so e.g. ~box bot belongs to none of the six.
"""

from __future__ import annotations

from enum import Flag, auto

from .coding import eval_term, numeral
from .semantics import decide_delta0
from .syntax import (
    Add,
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
    Succ,
    Zero,
    is_sentence,
    substitute,
)


class NormalFormError(ValueError):
    pass


class Cls(Flag):
    LA = auto()
    DELTA0 = auto()
    SIGMA1 = auto()
    B = auto()
    DELTA_B = auto()
    SIGMA_B = auto()

    def names(self):
        order = [
            (Cls.LA, "LA"),
            (Cls.DELTA0, "Delta0"),
            (Cls.SIGMA1, "Sigma1"),
            (Cls.B, "B"),
            (Cls.DELTA_B, "DeltaB"),
            (Cls.SIGMA_B, "SigmaB"),
        ]
        return [n for c, n in order if c in self]


NONE = Cls(0)
_D0_FULL = Cls.LA | Cls.DELTA0 | Cls.SIGMA1 | Cls.DELTA_B | Cls.SIGMA_B
_NOT_B = _D0_FULL  # everything a non-box node may keep


def classify(phi) -> Cls:
    """The exact set of classes whose inductive definitions phi satisfies."""
    if isinstance(phi, (Bot, Eq, Le, Lt, PrfAtom)):
        return _D0_FULL
    if isinstance(phi, InWAtom):
        return Cls.LA | Cls.SIGMA1 | Cls.SIGMA_B
    if isinstance(phi, Not):
        c = classify(phi.body)
        out = c & Cls.LA
        if Cls.DELTA0 in c:
            out |= Cls.DELTA0 | Cls.SIGMA1 | Cls.DELTA_B | Cls.SIGMA_B
        return out
    if isinstance(phi, (Imp, Iff)):
        l, r = classify(phi.left), classify(phi.right)
        out = l & r & Cls.LA
        if Cls.DELTA0 in l and Cls.DELTA0 in r:
            out |= Cls.DELTA0 | Cls.SIGMA1 | Cls.DELTA_B | Cls.SIGMA_B
        return out
    if isinstance(phi, (And, Or)):
        return classify(phi.left) & classify(phi.right) & _NOT_B
    if isinstance(phi, Forall):
        return classify(phi.body) & Cls.LA
    if isinstance(phi, Exists):
        return classify(phi.body) & (Cls.LA | Cls.SIGMA1 | Cls.SIGMA_B)
    if isinstance(phi, (BForall, BExists)):
        return classify(phi.body) & _NOT_B
    if isinstance(phi, Box):
        return Cls.B | Cls.DELTA_B | Cls.SIGMA_B
    raise TypeError(f"not a formula: {phi!r}")


# ------------------------------------------------------- positive Sigma1


def _exists_lt(a, b, fresh):
    """a < b as the positive existential: exists u (a + S(u) = b)."""
    u = fresh.take()
    return Exists(u, Eq(Add(a, Succ(u)), b))


def positive_sigma1_form(phi):
    """An N-equivalent Sigma1 formula with no negation or implication in
    which every atom is an equality.

    Follows the usual three steps: negation normal form, elimination of
    negated atoms by order flips, then elimination of < and <= atoms by
    existential sums.  Structured prf/inW atoms have no accessible
    arithmetic matrix and are rejected.
    """
    if Cls.SIGMA1 not in classify(phi):
        raise NormalFormError("input is not Sigma1")
    fresh = FreshVars(phi)

    def atom_pos(p):
        if isinstance(p, Eq):
            return p
        if isinstance(p, Lt):
            return _exists_lt(p.left, p.right, fresh)
        if isinstance(p, Le):
            u = fresh.take()
            return Exists(u, Eq(Add(p.left, u), p.right))
        if isinstance(p, Bot):
            return Eq(Zero(), Succ(Zero()))
        raise NormalFormError(f"structured atom not supported here: {p!r}")

    def atom_neg(p):
        if isinstance(p, Eq):
            return Or(_exists_lt(p.left, p.right, fresh), _exists_lt(p.right, p.left, fresh))
        if isinstance(p, Lt):
            return Or(Eq(p.left, p.right), _exists_lt(p.right, p.left, fresh))
        if isinstance(p, Le):
            return _exists_lt(p.right, p.left, fresh)
        if isinstance(p, Bot):
            return Eq(Zero(), Zero())
        raise NormalFormError(f"structured atom not supported here: {p!r}")

    def go(p, pos):
        if isinstance(p, (Eq, Le, Lt, Bot)):
            return atom_pos(p) if pos else atom_neg(p)
        if isinstance(p, (PrfAtom, InWAtom)):
            raise NormalFormError(f"structured atom not supported here: {p!r}")
        if isinstance(p, Not):
            return go(p.body, not pos)
        if isinstance(p, And):
            cls = And if pos else Or
            return cls(go(p.left, pos), go(p.right, pos))
        if isinstance(p, Or):
            cls = Or if pos else And
            return cls(go(p.left, pos), go(p.right, pos))
        if isinstance(p, Imp):
            if pos:
                return Or(go(p.left, False), go(p.right, True))
            return And(go(p.left, True), go(p.right, False))
        if isinstance(p, Iff):
            if pos:
                return And(
                    Or(go(p.left, False), go(p.right, True)),
                    Or(go(p.right, False), go(p.left, True)),
                )
            return Or(
                And(go(p.left, True), go(p.right, False)),
                And(go(p.right, True), go(p.left, False)),
            )
        if isinstance(p, BForall):
            if pos:
                return BForall(p.var, p.bound, go(p.body, True))
            return BExists(p.var, p.bound, go(p.body, False))
        if isinstance(p, BExists):
            if pos:
                return BExists(p.var, p.bound, go(p.body, True))
            return BForall(p.var, p.bound, go(p.body, False))
        if isinstance(p, Exists):
            if not pos:
                raise NormalFormError("negated unbounded exists is not Sigma1")
            return Exists(p.var, go(p.body, True))
        raise NormalFormError(f"node not allowed in a Sigma1 formula: {p!r}")

    return go(phi, True)


# ------------------------------------------ Sigma(B) -> exists Delta(B)


def sigma_b_to_exists_delta_b(phi):
    """A variable v and a DeltaB formula psi with phi equivalent to
    exists v psi.

    Structure follows the existential-collapse recursion: DeltaB formulas
    take a vacuous v; and/or, unbounded exists and bounded quantifiers
    merge the sub-results under one bound v, using bounded collection for
    forall-below-a-term.
    """
    c = classify(phi)
    if Cls.SIGMA_B not in c:
        raise NormalFormError("input is not Sigma(B)")
    fresh = FreshVars(phi)

    def rec(p):
        if Cls.DELTA_B in classify(p):
            return fresh.take(), p
        if isinstance(p, (And, Or)):
            v0, psi0 = rec(p.left)
            v1, psi1 = rec(p.right)
            v = fresh.take()
            body = type(p)(psi0, psi1)
            return v, BExists(v0, v, BExists(v1, v, body))
        if isinstance(p, Exists):
            v0, psi0 = rec(p.body)
            v = fresh.take()
            return v, BExists(p.var, v, BExists(v0, v, psi0))
        if isinstance(p, BExists):
            v0, psi0 = rec(p.body)
            v = fresh.take()
            return v, BExists(p.var, p.bound, BExists(v0, v, psi0))
        if isinstance(p, BForall):
            v0, psi0 = rec(p.body)
            v = fresh.take()
            return v, BForall(p.var, p.bound, BExists(v0, v, psi0))
        if isinstance(p, InWAtom):
            raise NormalFormError("inW atoms carry no accessible Delta0 matrix")
        raise NormalFormError(f"unexpected Sigma(B) shape: {p!r}")

    v, psi = rec(phi)
    return v, psi


# ------------------------------------------ Delta(B) sentence -> boxes


def delta_b_sentence_to_boxes(phi, registry=None, store=None):
    """Sentences psi_0..psi_{k-1} with phi equivalent to the disjunction of
    box psi_i; the empty list encodes bot.

    Closed Delta0 parts are decided by evaluation; bounded quantifiers are
    expanded at the values of their closed bounds.
    """
    if not is_sentence(phi):
        raise NormalFormError("input must be a sentence")
    if Cls.DELTA_B not in classify(phi):
        raise NormalFormError("input is not Delta(B)")

    top = Eq(Zero(), Zero())

    def rec(p):
        if Cls.DELTA0 in classify(p):
            return [top] if decide_delta0(p, registry, store) else []
        if isinstance(p, Box):
            return [p.body]
        if isinstance(p, And):
            left, right = rec(p.left), rec(p.right)
            return [And(a, b) for a in left for b in right]
        if isinstance(p, Or):
            return rec(p.left) + rec(p.right)
        if isinstance(p, BExists):
            m = eval_term(p.bound, {}, registry)
            out = []
            for i in range(m):
                out.extend(rec(substitute_num(p.body, p.var, i)))
            return out
        if isinstance(p, BForall):
            m = eval_term(p.bound, {}, registry)
            if m == 0:
                return [top]
            acc = rec(substitute_num(p.body, p.var, 0))
            for i in range(1, m):
                nxt = rec(substitute_num(p.body, p.var, i))
                acc = [And(a, b) for a in acc for b in nxt]
            return acc
        raise NormalFormError(f"unexpected Delta(B) shape: {p!r}")

    return rec(phi)


def substitute_num(phi, v, n):
    return substitute(phi, v, numeral(n))


# ----------------------------------------------------------- minus


def minus(phi):
    """Remove the outermost box of every maximal boxed subformula that is
    not inside a Sigma1 part.  Sigma1 parts are left alone, so e.g.
    box box a | box b becomes box a | b."""
    if Cls.SIGMA_B not in classify(phi):
        raise NormalFormError("input is not Sigma(B)")

    def rec(p):
        if Cls.SIGMA1 in classify(p):
            return p
        if isinstance(p, Box):
            return p.body
        if isinstance(p, (And, Or)):
            return type(p)(rec(p.left), rec(p.right))
        if isinstance(p, Exists):
            return Exists(p.var, rec(p.body))
        if isinstance(p, (BForall, BExists)):
            return type(p)(p.var, p.bound, rec(p.body))
        raise NormalFormError(f"unexpected Sigma(B) shape: {p!r}")

    return rec(phi)


# ----------------------------------------------------------- star


def star(phi):
    """The witness-pinning transform: a DeltaB formula psi and the list of
    fresh variables v such that phi is equivalent to exists-v psi, where the
    fresh variables record which disjuncts and bounded witnesses were used.
    """
    if Cls.DELTA_B not in classify(phi):
        raise NormalFormError("input is not Delta(B)")
    fresh = FreshVars(phi)

    def rec(p):
        if Cls.DELTA0 in classify(p) or isinstance(p, Box):
            return p, []
        if isinstance(p, And):
            l, u = rec(p.left)
            r, v = rec(p.right)
            return And(l, r), u + v
        if isinstance(p, Or):
            l, u = rec(p.left)
            r, v = rec(p.right)
            w = fresh.take()
            starred = Or(
                And(Eq(w, Zero()), l),
                And(Not(Eq(w, Zero())), r),
            )
            return starred, u + v + [w]
        if isinstance(p, BForall):
            b, v = rec(p.body)
            return BForall(p.var, p.bound, b), v
        if isinstance(p, BExists):
            b, v = rec(p.body)
            w = fresh.take()
            return BExists(p.var, p.bound, And(Eq(p.var, w), b)), v + [w]
        raise NormalFormError(f"unexpected Delta(B) shape: {p!r}")

    psi, vs = rec(phi)
    return psi, vs
