"""Proof synthesizers and proof transformers.

Everything here emits Hilbert proofs that the kernel checker accepts; no
synthesizer is trusted, each output can be (and in tests, is) re-checked.

The bounded-quantifier assemblies lean on three workhorse schemes: `cases`
(a numeral-bounded value is one of finitely many numerals), `leibniz`
(equals for equals in an arbitrary context), and `taut` (Boolean-skeleton
tautologies discharged by modus ponens).
"""

from __future__ import annotations

import warnings

from .classes import Cls, classify, minus, star
from .coding import code_sub_value, eval_term
from .kernel import (
    cases_disjunction,
    check_proof,
    handle_for,
    theory_plus,
)
from .proofs import (
    AxiomStep,
    CiteStep,
    ExtraStep,
    GenStep,
    MPStep,
    NecStep,
    Proof,
    ProofLine,
)
from .semantics import TV, Model, eval_sentence
from .syntax import (
    Add,
    And,
    BExists,
    BForall,
    Bot,
    Box,
    CodeSub,
    Eq,
    Exists,
    Forall,
    Iff,
    Imp,
    InWAtom,
    Le,
    Lt,
    Mul,
    Not,
    NumLit,
    Or,
    PrfAtom,
    Succ,
    Zero,
    free_vars,
    is_sentence,
    print_formula,
    substitute,
)


class SynthesisError(Exception):
    pass


class InconsistencyWarning(UserWarning):
    """A premise pattern that can only arise from an inconsistent theory."""


class ProofBuilder:
    """Accumulates proof lines, deduplicating repeated formulas."""

    def __init__(self):
        self.lines = []
        self._memo = {}

    def add(self, formula, just):
        idx = self._memo.get(formula)
        if idx is not None:
            return idx
        self.lines.append(ProofLine(formula, just))
        idx = len(self.lines) - 1
        self._memo[formula] = idx
        return idx

    def formula(self, idx):
        return self.lines[idx].formula

    def ax(self, tag, formula):
        return self.add(formula, AxiomStep(tag))

    def taut(self, formula):
        return self.ax("taut", formula)

    def mp(self, imp_idx, prem_idx):
        f = self.lines[imp_idx].formula
        if not isinstance(f, Imp):
            raise SynthesisError("modus ponens against a non-implication")
        return self.add(f.right, MPStep(imp_idx, prem_idx))

    def taut_mp(self, goal, premises):
        """Add the tautology P1 -> ... -> Pn -> goal, then discharge."""
        chain = goal
        for i in reversed(premises):
            chain = Imp(self.lines[i].formula, chain)
        idx = self.taut(chain)
        for i in premises:
            idx = self.mp(idx, i)
        return idx

    def merge(self, proof):
        """Splice another proof's lines in, remapping internal references;
        returns the index of its conclusion."""
        mapping = {}
        for i, ln in enumerate(proof.lines):
            j = ln.just
            if isinstance(j, MPStep):
                j = MPStep(mapping[j.imp], mapping[j.prem])
            elif isinstance(j, GenStep):
                j = GenStep(mapping[j.source], j.var)
            elif isinstance(j, NecStep):
                j = NecStep(mapping[j.source])
            mapping[i] = self.add(ln.formula, j)
        return mapping[len(proof.lines) - 1]

    def proof(self, conclusion_idx=None):
        """Finalize; re-derives the conclusion at the end if dedup left it
        earlier in the line sequence."""
        if conclusion_idx is not None and conclusion_idx != len(self.lines) - 1:
            f = self.lines[conclusion_idx].formula
            t = self.add(Imp(f, f), AxiomStep("taut"))
            self.lines.append(ProofLine(f, MPStep(t, conclusion_idx)))
        return Proof(tuple(self.lines))


# ------------------------------------------------------ equality plumbing


def _sym(pb, eq_idx):
    eq = pb.formula(eq_idx)
    a, b = eq.left, eq.right
    l1 = pb.ax("leibniz", Imp(Eq(a, b), Imp(Eq(a, a), Eq(b, a))))
    r = pb.ax("refl", Eq(a, a))
    return pb.mp(pb.mp(l1, eq_idx), r)


def _trans(pb, eq1_idx, eq2_idx):
    e1, e2 = pb.formula(eq1_idx), pb.formula(eq2_idx)
    a, b, c = e1.left, e1.right, e2.right
    if e2.left != b:
        raise SynthesisError("transitivity endpoints do not meet")
    l = pb.ax("leibniz", Imp(Eq(b, c), Imp(Eq(a, b), Eq(a, c))))
    return pb.mp(pb.mp(l, eq2_idx), eq1_idx)


def _cong(pb, eq_idx, ctx):
    """From s=t derive F(s)=F(t) for the term context ctx."""
    eq = pb.formula(eq_idx)
    s, t = eq.left, eq.right
    fs, ft = ctx(s), ctx(t)
    l = pb.ax("leibniz", Imp(Eq(s, t), Imp(Eq(fs, fs), Eq(fs, ft))))
    r = pb.ax("refl", Eq(fs, fs))
    return pb.mp(pb.mp(l, eq_idx), r)


def _term_eq(pb, t, registry=None):
    """Lines proving t = #n for the closed term t; returns (n, index)."""
    if isinstance(t, NumLit):
        return t.value, pb.ax("refl", Eq(t, t))
    if isinstance(t, Zero):
        return 0, pb.ax("lit", Eq(t, NumLit(0)))
    if isinstance(t, Succ):
        m, i = _term_eq(pb, t.arg, registry)
        j = _cong(pb, i, Succ)
        lit = pb.ax("lit", Eq(Succ(NumLit(m)), NumLit(m + 1)))
        return m + 1, _trans(pb, j, lit)
    if isinstance(t, (Add, Mul)):
        cls = type(t)
        a, i = _term_eq(pb, t.left, registry)
        b, j = _term_eq(pb, t.right, registry)
        s1 = _cong(pb, i, lambda z: cls(z, t.right))
        s2 = _cong(pb, j, lambda z: cls(NumLit(a), z))
        chained = _trans(pb, s1, s2)
        val = a + b if cls is Add else a * b
        lit = pb.ax("lit", Eq(cls(NumLit(a), NumLit(b)), NumLit(val)))
        return val, _trans(pb, chained, lit)
    if isinstance(t, CodeSub):
        val = code_sub_value(t, {}, registry)
        return val, pb.ax("lit", Eq(t, NumLit(val)))
    raise SynthesisError(f"term is not closed: {t!r}")


def prove_term_eq(t, registry=None):
    """The value n of the closed term t together with a proof of t = #n."""
    pb = ProofBuilder()
    n, idx = _term_eq(pb, t, registry)
    return n, pb.proof(idx)


# --------------------------------------------- bounded quantifier builders

_MAX_EXPANSION = 13  # skeleton-atom ceiling for the cases assembly


def _forall_lt(pb, x, t, k, t_eq_idx, body, inst_idxs):
    """Build forall x (x<t -> body) from instance proofs body[x:=#m], m<k."""
    if k > _MAX_EXPANSION:
        raise SynthesisError(f"bound {k} too large for tautology assembly")
    psi_x = body
    cases_idx = pb.ax("cases", Imp(Lt(x, NumLit(k)), cases_disjunction(x, k)))
    gs = []
    for m in range(k):
        inst = substitute(body, x, NumLit(m))
        lsym = pb.ax("leibniz", Imp(Eq(x, NumLit(m)), Imp(Eq(x, x), Eq(NumLit(m), x))))
        refl = pb.ax("refl", Eq(x, x))
        lsub = pb.ax("leibniz", Imp(Eq(NumLit(m), x), Imp(inst, psi_x)))
        g = pb.taut_mp(Imp(Eq(x, NumLit(m)), psi_x), [lsym, refl, lsub, inst_idxs[m]])
        gs.append(g)
    h = pb.taut_mp(Imp(Lt(x, NumLit(k)), psi_x), [cases_idx] + gs)
    g_idx = pb.add(Forall(x, Imp(Lt(x, NumLit(k)), psi_x)), GenStep(h, x))
    if t == NumLit(k):
        return g_idx
    sym = _sym(pb, t_eq_idx)  # #k = t
    lo = Forall(x, Imp(Lt(x, NumLit(k)), psi_x))
    hi = Forall(x, Imp(Lt(x, t), psi_x))
    lb = pb.ax("leibniz", Imp(Eq(NumLit(k), t), Imp(lo, hi)))
    return pb.mp(pb.mp(lb, sym), g_idx)


def _bforall_intro(pb, phi, k, t_eq_idx, inst_idxs):
    """Conclude the bounded-forall formula phi from its instance proofs."""
    x, t, body = phi.var, phi.bound, phi.body
    f = _forall_lt(pb, x, t, k, t_eq_idx, body, inst_idxs)
    bq = pb.ax("bqall", Iff(phi, Forall(x, Imp(Lt(x, t), body))))
    return pb.taut_mp(phi, [bq, f])


def _bexists_intro(pb, phi, m, inst_idx):
    """Conclude the bounded-exists formula phi from a witness proof at #m."""
    x, t, body = phi.var, phi.bound, phi.body
    lt = pb.ax("lit", Lt(NumLit(m), t))
    matrix = And(Lt(x, t), body)
    inst_matrix = And(Lt(NumLit(m), t), substitute(body, x, NumLit(m)))
    pair = pb.taut_mp(inst_matrix, [lt, inst_idx])
    ei = pb.ax("ei", Imp(inst_matrix, Exists(x, matrix)))
    e = pb.mp(ei, pair)
    bq = pb.ax("bqex", Iff(phi, Exists(x, matrix)))
    return pb.taut_mp(phi, [bq, e])


# ----------------------------------------------------- Sigma1 synthesis


def prove_true_sigma1(sigma, budget=64, registry=None, store=None):
    """A checking proof of the Sigma1 sentence sigma, if its truth is
    certified within the witness budget; None otherwise."""
    if Cls.SIGMA1 not in classify(sigma):
        raise SynthesisError("input is not Sigma1")
    if free_vars(sigma):
        raise SynthesisError("input must be a sentence")
    model = Model("triv", budget, {}, registry, None, store, None)
    pb = ProofBuilder()
    idx = _prove_pos(pb, sigma, model, registry)
    if idx is None:
        return None
    return pb.proof(idx)


def _ev(phi, model):
    return eval_sentence(phi, model)


def _prove_pos(pb, phi, model, registry):
    if isinstance(phi, Bot):
        return None
    if isinstance(phi, (Eq, Le, Lt, PrfAtom)):
        return pb.ax("lit", phi) if _ev(phi, model) is TV.TRUE else None
    if isinstance(phi, InWAtom):
        return None
    if isinstance(phi, Not):
        return _prove_neg(pb, phi.body, model, registry)
    if isinstance(phi, And):
        l = _prove_pos(pb, phi.left, model, registry)
        r = _prove_pos(pb, phi.right, model, registry) if l is not None else None
        if l is None or r is None:
            return None
        return pb.taut_mp(phi, [l, r])
    if isinstance(phi, Or):
        if _ev(phi.left, model) is TV.TRUE:
            l = _prove_pos(pb, phi.left, model, registry)
            if l is not None:
                return pb.taut_mp(phi, [l])
        if _ev(phi.right, model) is TV.TRUE:
            r = _prove_pos(pb, phi.right, model, registry)
            if r is not None:
                return pb.taut_mp(phi, [r])
        return None
    if isinstance(phi, Imp):
        if _ev(phi.left, model) is TV.FALSE:
            n = _prove_neg(pb, phi.left, model, registry)
            if n is not None:
                return pb.taut_mp(phi, [n])
        if _ev(phi.right, model) is TV.TRUE:
            r = _prove_pos(pb, phi.right, model, registry)
            if r is not None:
                return pb.taut_mp(phi, [r])
        return None
    if isinstance(phi, Iff):
        if _ev(phi.left, model) is TV.TRUE and _ev(phi.right, model) is TV.TRUE:
            l = _prove_pos(pb, phi.left, model, registry)
            r = _prove_pos(pb, phi.right, model, registry) if l is not None else None
            if r is not None:
                return pb.taut_mp(phi, [l, r])
        if _ev(phi.left, model) is TV.FALSE and _ev(phi.right, model) is TV.FALSE:
            l = _prove_neg(pb, phi.left, model, registry)
            r = _prove_neg(pb, phi.right, model, registry) if l is not None else None
            if r is not None:
                return pb.taut_mp(phi, [l, r])
        return None
    if isinstance(phi, Exists):
        for n in range(model.budget + 1):
            inst = substitute(phi.body, phi.var, NumLit(n))
            if _ev(inst, model) is TV.TRUE:
                p = _prove_pos(pb, inst, model, registry)
                if p is None:
                    return None
                ei = pb.ax("ei", Imp(inst, phi))
                return pb.mp(ei, p)
        return None
    if isinstance(phi, BForall):
        k = eval_term(phi.bound, {}, registry)
        idxs = []
        for m in range(k):
            inst = substitute(phi.body, phi.var, NumLit(m))
            p = _prove_pos(pb, inst, model, registry)
            if p is None:
                return None
            idxs.append(p)
        _, teq = _term_eq(pb, phi.bound, registry)
        return _bforall_intro(pb, phi, k, teq, idxs)
    if isinstance(phi, BExists):
        k = eval_term(phi.bound, {}, registry)
        for m in range(k):
            inst = substitute(phi.body, phi.var, NumLit(m))
            if _ev(inst, model) is TV.TRUE:
                p = _prove_pos(pb, inst, model, registry)
                if p is not None:
                    return _bexists_intro(pb, phi, m, p)
        return None
    return None  # unbounded forall, box: not Sigma1


def _prove_neg(pb, phi, model, registry):
    """Prove ~phi for a false closed Delta0 formula phi."""
    goal = Not(phi)
    if isinstance(phi, Bot):
        return pb.taut(goal)
    if isinstance(phi, (Eq, Le, Lt, PrfAtom)):
        return pb.ax("lit", goal) if _ev(phi, model) is TV.FALSE else None
    if isinstance(phi, InWAtom):
        return None
    if isinstance(phi, Not):
        p = _prove_pos(pb, phi.body, model, registry)
        return None if p is None else pb.taut_mp(goal, [p])
    if isinstance(phi, And):
        if _ev(phi.left, model) is TV.FALSE:
            n = _prove_neg(pb, phi.left, model, registry)
            if n is not None:
                return pb.taut_mp(goal, [n])
        if _ev(phi.right, model) is TV.FALSE:
            n = _prove_neg(pb, phi.right, model, registry)
            if n is not None:
                return pb.taut_mp(goal, [n])
        return None
    if isinstance(phi, Or):
        l = _prove_neg(pb, phi.left, model, registry)
        r = _prove_neg(pb, phi.right, model, registry) if l is not None else None
        if r is None:
            return None
        return pb.taut_mp(goal, [l, r])
    if isinstance(phi, Imp):
        l = _prove_pos(pb, phi.left, model, registry)
        r = _prove_neg(pb, phi.right, model, registry) if l is not None else None
        if r is None:
            return None
        return pb.taut_mp(goal, [l, r])
    if isinstance(phi, Iff):
        if _ev(phi.left, model) is TV.TRUE:
            l = _prove_pos(pb, phi.left, model, registry)
            r = _prove_neg(pb, phi.right, model, registry) if l is not None else None
        else:
            l = _prove_neg(pb, phi.left, model, registry)
            r = _prove_pos(pb, phi.right, model, registry) if l is not None else None
        if r is None:
            return None
        return pb.taut_mp(goal, [l, r])
    if isinstance(phi, BForall):
        x, t, body = phi.var, phi.bound, phi.body
        k = eval_term(t, {}, registry)
        for m in range(k):
            inst = substitute(body, x, NumLit(m))
            if _ev(inst, model) is TV.FALSE:
                nm = _prove_neg(pb, inst, model, registry)
                if nm is None:
                    return None
                lt = pb.ax("lit", Lt(NumLit(m), t))
                u = pb.ax(
                    "ui",
                    Imp(
                        Forall(x, Imp(Lt(x, t), body)),
                        Imp(Lt(NumLit(m), t), inst),
                    ),
                )
                not_u = pb.taut_mp(Not(Forall(x, Imp(Lt(x, t), body))), [u, lt, nm])
                bq = pb.ax("bqall", Iff(phi, Forall(x, Imp(Lt(x, t), body))))
                return pb.taut_mp(goal, [bq, not_u])
        return None
    if isinstance(phi, BExists):
        x, t, body = phi.var, phi.bound, phi.body
        k = eval_term(t, {}, registry)
        idxs = []
        for m in range(k):
            inst = substitute(body, x, NumLit(m))
            n = _prove_neg(pb, inst, model, registry)
            if n is None:
                return None
            idxs.append(n)
        _, teq = _term_eq(pb, t, registry)
        fa = _forall_lt(pb, x, t, k, teq, Not(body), idxs)
        u = pb.ax("ui", Imp(Forall(x, Imp(Lt(x, t), Not(body))), Imp(Lt(x, t), Not(body))))
        pointwise = pb.mp(u, fa)
        matrix = And(Lt(x, t), body)
        impbot = pb.taut_mp(Imp(matrix, Bot()), [pointwise])
        g = pb.add(Forall(x, Imp(matrix, Bot())), GenStep(impbot, x))
        qd = pb.ax(
            "qdistex",
            Imp(Forall(x, Imp(matrix, Bot())), Imp(Exists(x, matrix), Exists(x, Bot()))),
        )
        m2 = pb.mp(qd, g)
        qv = pb.ax("qvacex", Imp(Exists(x, Bot()), Bot()))
        notex = pb.taut_mp(Not(Exists(x, matrix)), [m2, qv])
        bq = pb.ax("bqex", Iff(phi, Exists(x, matrix)))
        return pb.taut_mp(goal, [bq, notex])
    return None


# ---------------------------------------------------- Sigma(B) synthesis


def rho_certified(phi, theory, store, registry, budget):
    """The evaluation side of the sentence-level completeness argument:
    does the provability reading of phi hold in the standard model, with
    box subformulas discharged by store lookups?"""
    c = classify(phi)
    if Cls.SIGMA1 in c:
        model = Model("triv", budget, {}, registry, None, store, None)
        return eval_sentence(phi, model) is TV.TRUE
    if isinstance(phi, Box):
        fcode = registry.code_of(phi)
        return store.find_proof(theory, fcode, budget) is not None
    if isinstance(phi, And):
        return rho_certified(phi.left, theory, store, registry, budget) and rho_certified(
            phi.right, theory, store, registry, budget
        )
    if isinstance(phi, Or):
        return rho_certified(phi.left, theory, store, registry, budget) or rho_certified(
            phi.right, theory, store, registry, budget
        )
    if isinstance(phi, Exists):
        for n in range(budget + 1):
            if rho_certified(
                substitute(phi.body, phi.var, NumLit(n)), theory, store, registry, budget
            ):
                return True
        return False
    if isinstance(phi, BForall):
        k = eval_term(phi.bound, {}, registry)
        return all(
            rho_certified(
                substitute(phi.body, phi.var, NumLit(m)), theory, store, registry, budget
            )
            for m in range(k)
        )
    if isinstance(phi, BExists):
        k = eval_term(phi.bound, {}, registry)
        return any(
            rho_certified(
                substitute(phi.body, phi.var, NumLit(m)), theory, store, registry, budget
            )
            for m in range(k)
        )
    return False


def prove_true_sigma_b(phi, theory, store, registry, budget=64):
    """A T-proof of the Sigma(B) sentence phi whenever its provability
    reading is certified; box subformulas cite stored theorems."""
    if Cls.SIGMA_B not in classify(phi):
        raise SynthesisError("input is not Sigma(B)")
    if free_vars(phi):
        raise SynthesisError("input must be a sentence")
    pb = ProofBuilder()
    idx = _sb(pb, phi, theory, store, registry, budget)
    if idx is None:
        return None
    return pb.proof(idx)


def _sb(pb, phi, theory, store, registry, budget):
    c = classify(phi)
    if Cls.SIGMA1 in c:
        sub = prove_true_sigma1(phi, budget, registry, store)
        return None if sub is None else pb.merge(sub)
    if isinstance(phi, Box):
        fcode = registry.code_of(phi)
        if store.find_proof(theory, fcode, budget) is None:
            return None
        return pb.add(phi, CiteStep(fcode))
    if isinstance(phi, And):
        l = _sb(pb, phi.left, theory, store, registry, budget)
        r = _sb(pb, phi.right, theory, store, registry, budget) if l is not None else None
        if r is None:
            return None
        return pb.taut_mp(phi, [l, r])
    if isinstance(phi, Or):
        if rho_certified(phi.left, theory, store, registry, budget):
            l = _sb(pb, phi.left, theory, store, registry, budget)
            if l is not None:
                return pb.taut_mp(phi, [l])
        if rho_certified(phi.right, theory, store, registry, budget):
            r = _sb(pb, phi.right, theory, store, registry, budget)
            if r is not None:
                return pb.taut_mp(phi, [r])
        return None
    if isinstance(phi, Exists):
        for n in range(budget + 1):
            inst = substitute(phi.body, phi.var, NumLit(n))
            if rho_certified(inst, theory, store, registry, budget):
                p = _sb(pb, inst, theory, store, registry, budget)
                if p is None:
                    return None
                ei = pb.ax("ei", Imp(inst, phi))
                return pb.mp(ei, p)
        return None
    if isinstance(phi, BForall):
        k = eval_term(phi.bound, {}, registry)
        idxs = []
        for m in range(k):
            inst = substitute(phi.body, phi.var, NumLit(m))
            p = _sb(pb, inst, theory, store, registry, budget)
            if p is None:
                return None
            idxs.append(p)
        _, teq = _term_eq(pb, phi.bound, registry)
        return _bforall_intro(pb, phi, k, teq, idxs)
    if isinstance(phi, BExists):
        k = eval_term(phi.bound, {}, registry)
        for m in range(k):
            inst = substitute(phi.body, phi.var, NumLit(m))
            if rho_certified(inst, theory, store, registry, budget):
                p = _sb(pb, inst, theory, store, registry, budget)
                if p is not None:
                    return _bexists_intro(pb, phi, m, p)
        return None
    return None


# ----------------------------------------------------- boxed deduction


def is_positive_boxed_combo(phi):
    """Built from boxed sentences by conjunction and disjunction only."""
    if isinstance(phi, Box):
        return True
    if isinstance(phi, (And, Or)):
        return is_positive_boxed_combo(phi.left) and is_positive_boxed_combo(phi.right)
    return False


def _self_box(pb, handle, sigma):
    """A proof of sigma -> box sigma for a positive boxed combination."""
    goal = Imp(sigma, Box(sigma))
    if handle.has_scheme("triv"):
        tr = pb.ax("triv", Iff(Box(sigma), sigma))
        return pb.taut_mp(goal, [tr])
    if handle.has_scheme("ver"):
        t0 = pb.taut(Imp(Bot(), sigma))
        n = pb.add(Box(Imp(Bot(), sigma)), NecStep(t0))
        k = pb.ax("k", Imp(Box(Imp(Bot(), sigma)), Imp(Box(Bot()), Box(sigma))))
        m = pb.mp(k, n)
        v = pb.ax("ver", Box(Bot()))
        bs = pb.mp(m, v)
        return pb.taut_mp(goal, [bs])
    if not handle.has_scheme("four"):
        raise SynthesisError(
            "boxed deduction needs a box-introduction scheme (4, triv, or ver)"
        )
    if isinstance(sigma, Box):
        return pb.ax("four", goal)
    if isinstance(sigma, And):
        a, b = sigma.left, sigma.right
        ia = _self_box(pb, handle, a)
        ib = _self_box(pb, handle, b)
        t1 = pb.taut(Imp(a, Imp(b, sigma)))
        n1 = pb.add(Box(Imp(a, Imp(b, sigma))), NecStep(t1))
        k1 = pb.ax("k", Imp(Box(Imp(a, Imp(b, sigma))), Imp(Box(a), Box(Imp(b, sigma)))))
        m1 = pb.mp(k1, n1)
        k2 = pb.ax("k", Imp(Box(Imp(b, sigma)), Imp(Box(b), Box(sigma))))
        return pb.taut_mp(goal, [ia, ib, m1, k2])
    if isinstance(sigma, Or):
        a, b = sigma.left, sigma.right
        ia = _self_box(pb, handle, a)
        ib = _self_box(pb, handle, b)
        t1 = pb.taut(Imp(a, sigma))
        n1 = pb.add(Box(Imp(a, sigma)), NecStep(t1))
        k1 = pb.ax("k", Imp(Box(Imp(a, sigma)), Imp(Box(a), Box(sigma))))
        m1 = pb.mp(k1, n1)
        t2 = pb.taut(Imp(b, sigma))
        n2 = pb.add(Box(Imp(b, sigma)), NecStep(t2))
        k2 = pb.ax("k", Imp(Box(Imp(b, sigma)), Imp(Box(b), Box(sigma))))
        m2 = pb.mp(k2, n2)
        return pb.taut_mp(goal, [ia, ib, m1, m2])
    raise SynthesisError("not a positive boxed combination")


def conj_of(sentences):
    """Right-nested conjunction; single element alone; empty not allowed."""
    if not sentences:
        raise SynthesisError("empty conjunction")
    out = sentences[-1]
    for s in reversed(sentences[:-1]):
        out = And(s, out)
    return out


def boxed_deduction(handle, xs, proof, store=None, registry=None):
    """Turn a proof of phi in T + X into a T-proof of (and X) -> phi.

    X members must be positive and/or combinations of boxed sentences, so
    sigma -> box sigma is synthesizable and the necessitation case goes
    through without touching induction.  The input proof must check under
    the theory extended by sorted(X) (see theory_plus).
    """
    xs = sorted(set(xs), key=print_formula)
    for s in xs:
        if free_vars(s):
            raise SynthesisError("hypotheses must be sentences")
        if not is_positive_boxed_combo(s):
            raise SynthesisError(f"hypothesis outside the boxed fragment: {s!r}")
    ext_id = theory_plus(handle.id, xs)
    ext = handle_for(ext_id)
    res = check_proof(ext, proof, store=store, registry=registry)
    if not res.ok:
        raise SynthesisError(f"input proof rejected at line {res.line}: {res.reason}")
    if not xs:
        return proof
    chi = conj_of(xs)
    n_base = len(handle.extras)
    pb = ProofBuilder()
    mapped = {}
    for i, ln in enumerate(proof.lines):
        f, j = ln.formula, ln.just
        if isinstance(j, ExtraStep) and j.index >= n_base:
            mapped[i] = pb.taut(Imp(chi, f))
            continue
        if isinstance(j, (AxiomStep, ExtraStep)):
            base = pb.add(f, j)
            mapped[i] = pb.taut_mp(Imp(chi, f), [base])
            continue
        if isinstance(j, CiteStep):
            if store is None or not store.holds(handle.id, j.code):
                raise SynthesisError("citation is not available in the base theory")
            base = pb.add(f, j)
            mapped[i] = pb.taut_mp(Imp(chi, f), [base])
            continue
        if isinstance(j, MPStep):
            mapped[i] = pb.taut_mp(Imp(chi, f), [mapped[j.imp], mapped[j.prem]])
            continue
        if isinstance(j, GenStep):
            src = pb.formula(mapped[j.source]).right
            g = pb.add(Forall(j.var, Imp(chi, src)), GenStep(mapped[j.source], j.var))
            qd = pb.ax(
                "qdistall",
                Imp(
                    Forall(j.var, Imp(chi, src)),
                    Imp(Forall(j.var, chi), Forall(j.var, src)),
                ),
            )
            m = pb.mp(qd, g)
            qv = pb.ax("qvacall", Imp(chi, Forall(j.var, chi)))
            mapped[i] = pb.taut_mp(Imp(chi, f), [m, qv])
            continue
        if isinstance(j, NecStep):
            src = pb.formula(mapped[j.source]).right
            n = pb.add(Box(Imp(chi, src)), NecStep(mapped[j.source]))
            k = pb.ax("k", Imp(Box(Imp(chi, src)), Imp(Box(chi), Box(src))))
            m = pb.mp(k, n)
            sb = _self_box(pb, handle, chi)
            mapped[i] = pb.taut_mp(Imp(chi, f), [sb, m])
            continue
        raise SynthesisError(f"unknown justification {j!r}")
    return pb.proof(mapped[len(proof.lines) - 1])


# ------------------------------------------- star/minus proof extraction


def _box_mono(pb, box_idx, imp_idx):
    """From box W and a proof of W -> V, derive box V (K reasoning)."""
    imp = pb.formula(imp_idx)
    n = pb.add(Box(imp), NecStep(imp_idx))
    k = pb.ax("k", Imp(Box(imp), Imp(Box(imp.left), Box(imp.right))))
    m = pb.mp(k, n)
    return pb.mp(m, box_idx)


def star_minus_target(phi, ps):
    """The sentence box (phi*)^-(p-bar) the extraction lemma expects."""
    starred, fresh = star(phi)
    if len(ps) != len(fresh):
        raise SynthesisError(f"expected {len(fresh)} witness numbers, got {len(ps)}")
    d = minus(starred)
    for v, p in zip(fresh, ps):
        d = substitute(d, v, NumLit(p))
    return Box(d)


def extract_from_star_minus(handle, phi, ps, proof, registry=None, store=None, budget=64):
    """Recover a T-proof of the Delta(B) sentence phi from a T-proof of
    box (phi*)^- at witness numerals p-bar.

    The lemma's hypothesis that T does not prove box bot is the caller's
    obligation; when a false Delta0 leaf (or an out-of-range bounded
    witness) shows the hypothesis failed, an InconsistencyWarning is
    emitted and None is returned.
    """
    if not is_sentence(phi) or Cls.DELTA_B not in classify(phi):
        raise SynthesisError("input must be a Delta(B) sentence")
    if not handle.has_scheme("k"):
        raise SynthesisError("extraction needs a theory containing K")
    expected = star_minus_target(phi, ps)
    if proof.conclusion != expected:
        raise SynthesisError(
            f"proof concludes {print_formula(proof.conclusion)}, "
            f"expected {print_formula(expected)}"
        )
    res = check_proof(handle, proof, store=store, registry=registry)
    if not res.ok:
        raise SynthesisError(f"input proof rejected at line {res.line}: {res.reason}")
    pb = ProofBuilder()
    box_idx = pb.merge(proof)
    idx = _extract(pb, phi, expected.body, box_idx, handle, registry, store, budget)
    if idx is None:
        return None
    return pb.proof(idx)


def _extract(pb, node, x_form, box_idx, handle, registry, store, budget):
    if Cls.DELTA0 in classify(node):
        if x_form != node:
            raise SynthesisError("instantiated transform does not match the Delta0 leaf")
        from .semantics import decide_delta0

        if not decide_delta0(node, registry, store):
            warnings.warn(
                f"false Delta0 leaf {print_formula(node)} under a box: "
                "the theory proves box bot",
                InconsistencyWarning,
            )
            return None
        sub = prove_true_sigma1(node, budget, registry, store)
        if sub is None:
            return None
        return pb.merge(sub)
    if isinstance(node, Box):
        if x_form != node.body:
            raise SynthesisError("instantiated transform does not match the box leaf")
        return box_idx
    if isinstance(node, And):
        la = pb.taut(Imp(x_form, x_form.left))
        ba = _box_mono(pb, box_idx, la)
        l = _extract(pb, node.left, x_form.left, ba, handle, registry, store, budget)
        if l is None:
            return None
        lb = pb.taut(Imp(x_form, x_form.right))
        bb = _box_mono(pb, box_idx, lb)
        r = _extract(pb, node.right, x_form.right, bb, handle, registry, store, budget)
        if r is None:
            return None
        return pb.taut_mp(node, [l, r])
    if isinstance(node, Or):
        # x_form is (#r=0 & A) | (~#r=0 & B)
        sel = x_form.left.left  # Eq(#r, 0)
        rv = sel.left.value
        if rv == 0:
            lit = pb.ax("lit", sel)
            imp = pb.taut_mp(Imp(x_form, x_form.left.right), [lit])
            side, sform = node.left, x_form.left.right
        else:
            lit = pb.ax("lit", Not(sel))
            imp = pb.taut_mp(Imp(x_form, x_form.right.right), [lit])
            side, sform = node.right, x_form.right.right
        b = _box_mono(pb, box_idx, imp)
        s = _extract(pb, side, sform, b, handle, registry, store, budget)
        if s is None:
            return None
        return pb.taut_mp(node, [s])
    if isinstance(node, BForall):
        xv, t, xb = x_form.var, x_form.bound, x_form.body
        k = eval_term(t, {}, registry)
        idxs = []
        for n in range(k):
            inst = substitute(xb, xv, NumLit(n))
            bq = pb.ax("bqall", Iff(x_form, Forall(xv, Imp(Lt(xv, t), xb))))
            u = pb.ax(
                "ui",
                Imp(Forall(xv, Imp(Lt(xv, t), xb)), Imp(Lt(NumLit(n), t), inst)),
            )
            lt = pb.ax("lit", Lt(NumLit(n), t))
            imp = pb.taut_mp(Imp(x_form, inst), [bq, u, lt])
            bn = _box_mono(pb, box_idx, imp)
            s = _extract(
                pb,
                substitute(node.body, node.var, NumLit(n)),
                inst,
                bn,
                handle,
                registry,
                store,
                budget,
            )
            if s is None:
                return None
            idxs.append(s)
        _, teq = _term_eq(pb, node.bound, registry)
        return _bforall_intro(pb, node, k, teq, idxs)
    if isinstance(node, BExists):
        xv, t = x_form.var, x_form.bound
        matrix = x_form.body  # Eq(xv, #w) & Xb
        sel, xb = matrix.left, matrix.right
        w = sel.right.value
        k = eval_term(t, {}, registry)
        if w >= k:
            warnings.warn(
                f"bounded witness {w} is not below the bound {k}: "
                "the theory proves box bot",
                InconsistencyWarning,
            )
            return None
        inst = substitute(xb, xv, NumLit(w))
        e_form = Exists(xv, And(Lt(xv, t), matrix))
        bq = pb.ax("bqex", Iff(x_form, e_form))
        lb = pb.ax("leibniz", Imp(Eq(xv, NumLit(w)), Imp(xb, inst)))
        f1 = pb.taut_mp(Imp(And(Lt(xv, t), matrix), inst), [lb])
        g = pb.add(Forall(xv, Imp(And(Lt(xv, t), matrix), inst)), GenStep(f1, xv))
        qd = pb.ax(
            "qdistex",
            Imp(
                Forall(xv, Imp(And(Lt(xv, t), matrix), inst)),
                Imp(e_form, Exists(xv, inst)),
            ),
        )
        m = pb.mp(qd, g)
        qv = pb.ax("qvacex", Imp(Exists(xv, inst), inst))
        imp = pb.taut_mp(Imp(x_form, inst), [bq, m, qv])
        b = _box_mono(pb, box_idx, imp)
        s = _extract(
            pb,
            substitute(node.body, node.var, NumLit(w)),
            inst,
            b,
            handle,
            registry,
            store,
            budget,
        )
        if s is None:
            return None
        return _bexists_intro(pb, node, w, s)
    raise SynthesisError(f"unexpected Delta(B) shape: {node!r}")
