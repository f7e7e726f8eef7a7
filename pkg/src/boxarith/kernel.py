"""Theories, axiom schemes, the proof checker, and the theorem store.

A theory handle bundles the arithmetic core (shared by every theory) with
the modal schemes of its base logic and any extra axiom sentences.  Scheme
membership is decided by pattern matching, so `is_axiom` is total.

Two scheme families are deliberately macro-level, as sanctioned theory-side:

* `taut` — any formula whose Boolean skeleton is a truth-table tautology
  (non-Boolean subformulas are opaque atoms, bot is the constant false);
* `lit`  — any true closed literal over =, <=, <, or prf, or the negation
  of a false one, re-validated by evaluation at check time.  Literal
  arithmetic like #2+#3=#5 is checked this way instead of by successor
  chains.

`leibniz` (a=b -> (phi(a) -> phi(b)) for an arbitrary context phi) is
admitted as a scheme: for box-free contexts it is plain identity logic,
and with boxes it is a K-provable principle, so it requires a theory
containing K.
"""

from __future__ import annotations

import threading
from dataclasses import dataclass

from .coding import EvalError, eval_term
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
    Formula,
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
    TheoryId,
    Var,
    Zero,
    free_vars,
    parse_theory,
    print_formula,
    print_theory,
    term_vars,
)

# modal schemes granted by each base logic; the arithmetic core is shared
SCHEMES_BY_TAG = {
    "paB": (),
    "k": ("k",),
    "k4": ("k", "four"),
    "kt": ("k", "t"),
    "s4": ("k", "four", "t"),
    "s41": ("k", "four", "t", "m"),
    "triv": ("k", "triv"),
    "gl": ("k", "four", "gl"),
    "ver": ("k", "ver"),
}

# Makinson: every consistent normal modal logic sits below Triv or Ver.
# Registry fact, not a theorem we prove.
MAKINSON_CEILINGS = {
    "paB": ("triv", "ver"),
    "k": ("triv", "ver"),
    "k4": ("triv", "ver"),
    "kt": ("triv",),
    "s4": ("triv",),
    "s41": ("triv",),
    "triv": ("triv",),
    "gl": ("ver",),
    "ver": ("ver",),
}

ARITH_SCHEMES = (
    "taut",
    "lit",
    "refl",
    "leibniz",
    "pa1",
    "pa2",
    "pa3",
    "pa4",
    "pa5",
    "pa6",
    "le_def",
    "lt_def",
    "ind",
    "cases",
    "ui",
    "ei",
    "qdistall",
    "qdistex",
    "qvacall",
    "qvacex",
    "bqall",
    "bqex",
)

MODAL_SCHEMES = ("k", "four", "t", "gl", "triv", "ver", "m")


@dataclass(frozen=True)
class TheoryHandle:
    id: TheoryId

    @property
    def tag(self):
        return self.id.tag

    @property
    def extras(self):
        return self.id.extras

    def has_scheme(self, tag):
        if tag in ARITH_SCHEMES:
            return True
        return tag in SCHEMES_BY_TAG[self.id.tag]

    def scheme_tags(self):
        return ARITH_SCHEMES + SCHEMES_BY_TAG[self.id.tag]

    def __repr__(self):
        return f"PA({print_theory(self.id)})"


def handle_for(theory_id):
    return TheoryHandle(theory_id)


def theory_plus(theory_id, sentences):
    """The theory extended by extra axiom sentences (deterministic order,
    duplicates dropped)."""
    new = [s for s in sorted(set(sentences), key=print_formula) if s not in theory_id.extras]
    return TheoryId(theory_id.tag, theory_id.extras + tuple(new))


# --------------------------------------------------------------- tautology


_MAX_TAUT_ATOMS = 16


def _skeleton(phi, atoms):
    """Reduce to a Boolean function over opaque subformula atoms."""
    if isinstance(phi, Bot):
        return ("const", False)
    if isinstance(phi, Not):
        return ("not", _skeleton(phi.body, atoms))
    if isinstance(phi, (And, Or, Imp, Iff)):
        return (
            type(phi).__name__.lower(),
            _skeleton(phi.left, atoms),
            _skeleton(phi.right, atoms),
        )
    if phi not in atoms:
        atoms[phi] = len(atoms)
    return ("atom", atoms[phi])


def _eval_skel(sk, bits):
    kind = sk[0]
    if kind == "const":
        return sk[1]
    if kind == "atom":
        return bits[sk[1]]
    if kind == "not":
        return not _eval_skel(sk[1], bits)
    a = _eval_skel(sk[1], bits)
    b = _eval_skel(sk[2], bits)
    if kind == "and":
        return a and b
    if kind == "or":
        return a or b
    if kind == "imp":
        return (not a) or b
    return a == b  # iff


def is_tautology(phi):
    atoms = {}
    sk = _skeleton(phi, atoms)
    n = len(atoms)
    if n > _MAX_TAUT_ATOMS:
        return False
    for mask in range(1 << n):
        bits = [(mask >> i) & 1 == 1 for i in range(n)]
        if not _eval_skel(sk, bits):
            return False
    return True


# --------------------------------------------------------------- literals


def _literal_true(phi, registry=None, store=None):
    """Truth of a closed literal over =, <=, <, prf, or a negation of one."""
    neg = False
    if isinstance(phi, Not):
        neg = True
        phi = phi.body
    if free_vars(phi):
        return False
    try:
        if isinstance(phi, Eq):
            val = eval_term(phi.left, {}, registry) == eval_term(phi.right, {}, registry)
        elif isinstance(phi, Le):
            val = eval_term(phi.left, {}, registry) <= eval_term(phi.right, {}, registry)
        elif isinstance(phi, Lt):
            val = eval_term(phi.left, {}, registry) < eval_term(phi.right, {}, registry)
        elif isinstance(phi, PrfAtom):
            val = _prf_true(phi, registry, store)
        else:
            return False
    except EvalError:
        return False
    return val != neg


def _prf_true(atom, registry, store):
    if registry is None:
        raise EvalError("prf literal needs a registry")
    tcode = eval_term(atom.target, {}, registry)
    wcode = eval_term(atom.witness, {}, registry)
    try:
        proof = registry.decode(wcode)
        target = registry.decode(tcode)
    except KeyError:
        return False
    if not isinstance(proof, Proof) or not isinstance(target, Formula):
        return False
    res = check_proof(handle_for(atom.theory), proof, store=store, registry=registry)
    return res.ok and proof.conclusion == target


# ------------------------------------------------------- scheme matchers


def _strip_foralls(phi):
    while isinstance(phi, Forall):
        phi = phi.body
    return phi


def _match_pa(tag, phi):
    if tag == "pa1":
        return (
            isinstance(phi, Not)
            and isinstance(phi.body, Eq)
            and isinstance(phi.body.left, Succ)
            and phi.body.right == Zero()
        )
    if tag == "pa2":
        return (
            isinstance(phi, Imp)
            and isinstance(phi.left, Eq)
            and isinstance(phi.left.left, Succ)
            and isinstance(phi.left.right, Succ)
            and isinstance(phi.right, Eq)
            and phi.right.left == phi.left.left.arg
            and phi.right.right == phi.left.right.arg
        )
    if tag == "pa3":
        return (
            isinstance(phi, Eq)
            and isinstance(phi.left, Add)
            and phi.left.right == Zero()
            and phi.right == phi.left.left
        )
    if tag == "pa4":
        return (
            isinstance(phi, Eq)
            and isinstance(phi.left, Add)
            and isinstance(phi.left.right, Succ)
            and phi.right == Succ(Add(phi.left.left, phi.left.right.arg))
        )
    if tag == "pa5":
        return (
            isinstance(phi, Eq)
            and isinstance(phi.left, Mul)
            and phi.left.right == Zero()
            and phi.right == Zero()
        )
    if tag == "pa6":
        return (
            isinstance(phi, Eq)
            and isinstance(phi.left, Mul)
            and isinstance(phi.left.right, Succ)
            and phi.right == Add(Mul(phi.left.left, phi.left.right.arg), phi.left.left)
        )
    raise ValueError(tag)


def _match_le_def(phi):
    if not (isinstance(phi, Iff) and isinstance(phi.left, Le) and isinstance(phi.right, Exists)):
        return False
    a, b = phi.left.left, phi.left.right
    u, body = phi.right.var, phi.right.body
    if u in term_vars(a) | term_vars(b):
        return False
    return body == Eq(Add(a, u), b)


def _match_lt_def(phi):
    return (
        isinstance(phi, Iff)
        and isinstance(phi.left, Lt)
        and phi.right == Le(Succ(phi.left.left), phi.left.right)
    )


def _match_ind(phi):
    from .syntax import substitute

    if not (isinstance(phi, Imp) and isinstance(phi.left, And) and isinstance(phi.right, Forall)):
        return False
    x = phi.right.var
    target = phi.right.body
    base, stepq = phi.left.left, phi.left.right
    if not (isinstance(stepq, Forall) and stepq.var == x and isinstance(stepq.body, Imp)):
        return False
    if stepq.body.left != target:
        return False
    try:
        if base != substitute(target, x, Zero()):
            return False
        return stepq.body.right == substitute(target, x, Succ(x))
    except Exception:
        return False


def _match_cases(phi):
    if not (isinstance(phi, Imp) and isinstance(phi.left, Lt)):
        return False
    t = phi.left.left
    bound = phi.left.right
    if not isinstance(bound, NumLit):
        return False
    n = bound.value
    if n == 0:
        return phi.right == Bot()
    want = Eq(t, NumLit(n - 1))
    for i in range(n - 2, -1, -1):
        want = Or(Eq(t, NumLit(i)), want)
    return phi.right == want


def cases_disjunction(t, n):
    """The right-nested disjunction t=#0 | ... | t=#(n-1); bot when n=0."""
    if n == 0:
        return Bot()
    out = Eq(t, NumLit(n - 1))
    for i in range(n - 2, -1, -1):
        out = Or(Eq(t, NumLit(i)), out)
    return out


def _match_leibniz(phi, allow_box):
    if not (isinstance(phi, Imp) and isinstance(phi.left, Eq) and isinstance(phi.right, Imp)):
        return False
    a, b = phi.left.left, phi.left.right
    A, B = phi.right.left, phi.right.right
    blocked = term_vars(a) | term_vars(b)

    def terms(s, t, bound, inbox):
        if s == t:
            return True
        if s == a and t == b:
            return not (blocked & bound) and (allow_box or not inbox)
        if type(s) is not type(t):
            return False
        if isinstance(s, Succ):
            return terms(s.arg, t.arg, bound, inbox)
        if isinstance(s, (Add, Mul)):
            return terms(s.left, t.left, bound, inbox) and terms(s.right, t.right, bound, inbox)
        if isinstance(s, CodeSub):
            if s.formula != t.formula or len(s.subst) != len(t.subst):
                return False
            return all(
                v == w and terms(p, q, bound, inbox)
                for (v, p), (w, q) in zip(s.subst, t.subst)
            )
        return False

    def forms(p, q, bound, inbox):
        if p == q:
            return True
        if type(p) is not type(q):
            return False
        if isinstance(p, (Eq, Le, Lt)):
            return terms(p.left, q.left, bound, inbox) and terms(p.right, q.right, bound, inbox)
        if isinstance(p, PrfAtom):
            return p.theory == q.theory and terms(p.target, q.target, bound, inbox) and terms(
                p.witness, q.witness, bound, inbox
            )
        if isinstance(p, InWAtom):
            return terms(p.member, q.member, bound, inbox) and terms(
                p.index, q.index, bound, inbox
            )
        if isinstance(p, Not):
            return forms(p.body, q.body, bound, inbox)
        if isinstance(p, (And, Or, Imp, Iff)):
            return forms(p.left, q.left, bound, inbox) and forms(p.right, q.right, bound, inbox)
        if isinstance(p, (Forall, Exists)):
            return p.var == q.var and forms(p.body, q.body, bound | {p.var}, inbox)
        if isinstance(p, (BForall, BExists)):
            return (
                p.var == q.var
                and terms(p.bound, q.bound, bound, inbox)
                and forms(p.body, q.body, bound | {p.var}, inbox)
            )
        if isinstance(p, Box):
            return forms(p.body, q.body, bound, True)
        return False

    return forms(A, B, frozenset(), False)


def _match_instance(body, inst, x):
    """Does inst equal body with some term t substituted for free x?
    Returns (ok, t); t is None when x has no free occurrence."""
    found = []

    def terms(s, r, bound):
        if s == Var(x.name) and x not in bound:
            found.append((r, frozenset(bound)))
            return True
        if s == r and x not in term_vars(s):
            return True
        if type(s) is not type(r):
            return False
        if isinstance(s, Succ):
            return terms(s.arg, r.arg, bound)
        if isinstance(s, (Add, Mul)):
            return terms(s.left, r.left, bound) and terms(s.right, r.right, bound)
        if isinstance(s, CodeSub):
            if s.formula != r.formula or len(s.subst) != len(r.subst):
                return False
            return all(
                v == w and terms(p, q, bound) for (v, p), (w, q) in zip(s.subst, r.subst)
            )
        return False

    def forms(p, q, bound):
        if x in bound or x not in free_vars(p):
            return p == q
        if type(p) is not type(q):
            return False
        if isinstance(p, (Eq, Le, Lt)):
            return terms(p.left, q.left, bound) and terms(p.right, q.right, bound)
        if isinstance(p, PrfAtom):
            return p.theory == q.theory and terms(p.target, q.target, bound) and terms(
                p.witness, q.witness, bound
            )
        if isinstance(p, InWAtom):
            return terms(p.member, q.member, bound) and terms(p.index, q.index, bound)
        if isinstance(p, Not):
            return forms(p.body, q.body, bound)
        if isinstance(p, (And, Or, Imp, Iff)):
            return forms(p.left, q.left, bound) and forms(p.right, q.right, bound)
        if isinstance(p, (Forall, Exists)):
            return p.var == q.var and forms(p.body, q.body, bound | {p.var})
        if isinstance(p, (BForall, BExists)):
            return (
                p.var == q.var
                and terms(p.bound, q.bound, bound)
                and forms(p.body, q.body, bound | {p.var})
            )
        if isinstance(p, Box):
            return forms(p.body, q.body, bound)
        return False

    if not forms(body, inst, frozenset()):
        return False, None
    if not found:
        return True, None
    t0 = found[0][0]
    for t, bound in found:
        if t != t0:
            return False, None
        if term_vars(t) & bound:
            return False, None  # would be captured: not a legal instance
    return True, t0


def _match_ui(phi):
    if not (isinstance(phi, Imp) and isinstance(phi.left, Forall)):
        return False
    ok, _ = _match_instance(phi.left.body, phi.right, phi.left.var)
    return ok


def _match_ei(phi):
    if not (isinstance(phi, Imp) and isinstance(phi.right, Exists)):
        return False
    ok, _ = _match_instance(phi.right.body, phi.left, phi.right.var)
    return ok


def _match_qdist(phi, quant):
    if not (isinstance(phi, Imp) and isinstance(phi.left, Forall)):
        return False
    x = phi.left.var
    if not isinstance(phi.left.body, Imp):
        return False
    a, b = phi.left.body.left, phi.left.body.right
    return phi.right == Imp(quant(x, a), quant(x, b))


def _match_qvacall(phi):
    return (
        isinstance(phi, Imp)
        and isinstance(phi.right, Forall)
        and phi.right.body == phi.left
        and phi.right.var not in free_vars(phi.left)
    )


def _match_qvacex(phi):
    return (
        isinstance(phi, Imp)
        and isinstance(phi.left, Exists)
        and phi.left.body == phi.right
        and phi.left.var not in free_vars(phi.right)
    )


def _match_bq(phi, bounded, quant, joiner):
    if not (isinstance(phi, Iff) and isinstance(phi.left, bounded)):
        return False
    bq = phi.left
    want = quant(bq.var, joiner(Lt(bq.var, bq.bound), bq.body))
    return phi.right == want


def _match_modal(tag, phi):
    if tag == "k":
        return (
            isinstance(phi, Imp)
            and isinstance(phi.left, Box)
            and isinstance(phi.left.body, Imp)
            and phi.right
            == Imp(Box(phi.left.body.left), Box(phi.left.body.right))
        )
    if tag == "four":
        return isinstance(phi, Imp) and isinstance(phi.left, Box) and phi.right == Box(phi.left)
    if tag == "t":
        return isinstance(phi, Imp) and isinstance(phi.left, Box) and phi.right == phi.left.body
    if tag == "gl":
        return (
            isinstance(phi, Imp)
            and isinstance(phi.left, Box)
            and isinstance(phi.left.body, Imp)
            and isinstance(phi.left.body.left, Box)
            and phi.left.body.right == phi.left.body.left.body
            and phi.right == phi.left.body.left
        )
    if tag == "triv":
        return isinstance(phi, Iff) and isinstance(phi.left, Box) and phi.right == phi.left.body
    if tag == "ver":
        return phi == Box(Bot())
    if tag == "m":
        if not (isinstance(phi, Imp) and isinstance(phi.left, Not)):
            return False
        dia = phi.left
        return (
            isinstance(dia.body, Box)
            and isinstance(dia.body.body, Not)
            and phi.right == Box(dia)
        )
    raise ValueError(tag)


def match_axiom(handle, tag, phi, registry=None, store=None):
    """Is phi an instance of the named scheme, available in this theory?
    Universal closures are accepted for every scheme."""
    if not handle.has_scheme(tag):
        return False
    phi = _strip_foralls(phi)
    if tag == "taut":
        return is_tautology(phi)
    if tag == "lit":
        return _literal_true(phi, registry, store)
    if tag == "refl":
        return isinstance(phi, Eq) and phi.left == phi.right
    if tag == "leibniz":
        return _match_leibniz(phi, allow_box=handle.has_scheme("k"))
    if tag in ("pa1", "pa2", "pa3", "pa4", "pa5", "pa6"):
        return _match_pa(tag, phi)
    if tag == "le_def":
        return _match_le_def(phi)
    if tag == "lt_def":
        return _match_lt_def(phi)
    if tag == "ind":
        return _match_ind(phi)
    if tag == "cases":
        return _match_cases(phi)
    if tag == "ui":
        return _match_ui(phi)
    if tag == "ei":
        return _match_ei(phi)
    if tag == "qdistall":
        return _match_qdist(phi, Forall)
    if tag == "qdistex":
        return _match_qdist(phi, Exists)
    if tag == "qvacall":
        return _match_qvacall(phi)
    if tag == "qvacex":
        return _match_qvacex(phi)
    if tag == "bqall":
        return _match_bq(phi, BForall, Forall, Imp)
    if tag == "bqex":
        return _match_bq(phi, BExists, Exists, And)
    if tag in MODAL_SCHEMES:
        return _match_modal(tag, phi)
    return False


def is_axiom(handle, phi, registry=None, store=None):
    """The first scheme tag phi instantiates in this theory, or None."""
    for tag in handle.scheme_tags():
        if match_axiom(handle, tag, phi, registry, store):
            return tag
    return None


# --------------------------------------------------------------- checking


@dataclass(frozen=True)
class CheckResult:
    ok: bool
    line: int = None
    reason: str = None

    def __bool__(self):
        return self.ok


def check_proof(handle, proof, store=None, registry=None):
    """One-pass check; reports the first failing line."""
    if not isinstance(proof, Proof) or not proof.lines:
        return CheckResult(False, None, "empty proof")
    for i, ln in enumerate(proof.lines):
        j = ln.just
        if isinstance(j, AxiomStep):
            if not match_axiom(handle, j.tag, ln.formula, registry, store):
                return CheckResult(False, i, f"not an instance of scheme {j.tag}")
        elif isinstance(j, ExtraStep):
            if j.index >= len(handle.extras):
                return CheckResult(False, i, f"theory has no extra axiom {j.index}")
            if ln.formula != handle.extras[j.index]:
                return CheckResult(False, i, "formula differs from the cited extra axiom")
        elif isinstance(j, MPStep):
            if j.imp >= i or j.prem >= i:
                return CheckResult(False, i, "modus ponens cites a later line")
            imp = proof.lines[j.imp].formula
            if not isinstance(imp, Imp):
                return CheckResult(False, i, "modus ponens major premise is not an implication")
            if proof.lines[j.prem].formula != imp.left or ln.formula != imp.right:
                return CheckResult(False, i, "modus ponens shapes do not match")
        elif isinstance(j, GenStep):
            if j.source >= i:
                return CheckResult(False, i, "generalization cites a later line")
            if ln.formula != Forall(j.var, proof.lines[j.source].formula):
                return CheckResult(False, i, "generalization shape does not match")
        elif isinstance(j, NecStep):
            if j.source >= i:
                return CheckResult(False, i, "necessitation cites a later line")
            if ln.formula != Box(proof.lines[j.source].formula):
                return CheckResult(False, i, "necessitation shape does not match")
        elif isinstance(j, CiteStep):
            if store is None or registry is None:
                return CheckResult(False, i, "citation needs a store and registry")
            if not store.holds(handle.id, j.code):
                return CheckResult(False, i, f"store has no record for code {j.code}")
            try:
                target = registry.decode(j.code)
            except KeyError:
                return CheckResult(False, i, f"code {j.code} is unbound")
            if target != ln.formula:
                return CheckResult(False, i, "cited code decodes to a different formula")
        else:
            return CheckResult(False, i, f"unknown justification {j!r}")
    return CheckResult(True)


# ----------------------------------------------------------------- store


class StoreError(Exception):
    pass


class TheoremStore:
    """Recorded theorems per theory: (formula code, proof code) pairs whose
    proofs check.  Writes are serialized; reads are snapshot-safe."""

    def __init__(self):
        self._records = {}  # TheoryId -> list[(fcode, pcode)]
        self._by_formula = {}  # TheoryId -> {fcode: [pcode, ...]}
        self.nec_depth = 0
        self.box_elim_closed = False
        self._lock = threading.Lock()

    def theories(self):
        return list(self._records)

    def records(self, theory_id):
        return list(self._records.get(theory_id, ()))

    def holds(self, theory_id, fcode):
        return fcode in self._by_formula.get(theory_id, ())

    def find_proof(self, theory_id, fcode, budget):
        """Smallest recorded proof code <= budget for this formula code."""
        codes = self._by_formula.get(theory_id, {}).get(fcode)
        if not codes:
            return None
        best = min(codes)
        return best if best <= budget else None

    def record(self, theory_id, proof, registry):
        """Check and record; returns (formula code, proof code)."""
        handle = handle_for(theory_id)
        res = check_proof(handle, proof, store=self, registry=registry)
        if not res.ok:
            raise StoreError(f"proof rejected at line {res.line}: {res.reason}")
        fcode = registry.code_of(proof.conclusion)
        pcode = registry.code_of(proof)
        with self._lock:
            pairs = self._records.setdefault(theory_id, [])
            if (fcode, pcode) not in pairs:
                pairs.append((fcode, pcode))
                self._by_formula.setdefault(theory_id, {}).setdefault(fcode, []).append(pcode)
        return fcode, pcode

    def nec_close(self, theory_id, registry, depth=1):
        """Materialize one or more levels of necessitation: for every
        recorded theorem phi, record box phi with the Nec-extended proof.
        Each call covers query depths up to the accumulated total."""
        for _ in range(depth):
            for fcode, pcode in self.records(theory_id):
                phi = registry.decode(fcode)
                boxed = Box(phi)
                bcode = registry.lookup(boxed)
                if bcode is not None and self.holds(theory_id, bcode):
                    continue
                base = registry.decode(pcode)
                ext = Proof(base.lines + (ProofLine(boxed, NecStep(len(base.lines) - 1)),))
                self.record(theory_id, ext, registry)
        self.nec_depth += depth

    def box_elim_violations(self, theory_id, registry):
        """Recorded box phi whose phi is not recorded.  Empty means the
        store witnesses closure under the box elimination rule."""
        out = []
        for fcode, _ in self.records(theory_id):
            phi = registry.decode(fcode)
            if isinstance(phi, Box):
                inner = registry.lookup(phi.body)
                if inner is None or not self.holds(theory_id, inner):
                    out.append(fcode)
        return out

    def box_elim_close(self, registry):
        """Audit every theory; set the flag only if no violations exist."""
        for thy in self.theories():
            if self.box_elim_violations(thy, registry):
                self.box_elim_closed = False
                return False
        self.box_elim_closed = True
        return True

    # ------------------------------------------------------- persistence

    def save(self, path):
        import os

        tmp = f"{path}.tmp"
        with open(tmp, "w") as fh:
            fh.write(f"boxarithstore v1 nec={self.nec_depth} boxelim={int(self.box_elim_closed)}\n")
            for thy in self._records:
                for fcode, pcode in self._records[thy]:
                    fh.write(f"{print_theory(thy)}\t{fcode}\t{pcode}\n")
        os.replace(tmp, path)

    @classmethod
    def load(cls, path, registry):
        store = cls()
        with open(path) as fh:
            header = fh.readline().rstrip("\n")
            if not header.startswith("boxarithstore v1"):
                raise StoreError(f"bad store header: {header!r}")
            parts = dict(
                kv.split("=", 1) for kv in header.split()[2:] if "=" in kv
            )
            for raw in fh:
                raw = raw.rstrip("\n")
                if not raw:
                    continue
                thy_txt, fcode_txt, pcode_txt = raw.split("\t")
                thy = parse_theory(thy_txt)
                fcode, pcode = int(fcode_txt), int(pcode_txt)
                proof = registry.decode(pcode)
                if registry.decode(fcode) != proof.conclusion:
                    raise StoreError(f"record {fcode}/{pcode} does not match the registry")
                res = check_proof(handle_for(thy), proof, store=store, registry=registry)
                if not res.ok:
                    raise StoreError(
                        f"stored proof {pcode} no longer checks: line {res.line}: {res.reason}"
                    )
                pairs = store._records.setdefault(thy, [])
                pairs.append((fcode, pcode))
                store._by_formula.setdefault(thy, {}).setdefault(fcode, []).append(pcode)
        store.nec_depth = int(parts.get("nec", 0))
        store.box_elim_closed = parts.get("boxelim", "0") == "1"
        return store


def pr_search(theory_id, fcode, store, budget):
    """PR semantics: the smallest stored proof code <= budget, if any."""
    return store.find_proof(theory_id, fcode, budget)


def store_record(theory_id, proof, store, registry):
    return store.record(theory_id, proof, registry)


def nec_close(theory_id, store, registry, depth=1):
    store.nec_close(theory_id, registry, depth)
