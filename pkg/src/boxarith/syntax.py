"""AST, parser and printer for the modal-arithmetic language.

Terms are built from 0, variables, S, +, *, numeral literals `#n`, and
dotted-code terms `code[F]{x:=t,...}` (the Goedel number of F with the
values of the mapped terms substituted as numerals).

Formulas add bot, =, <=, <, structured proof atoms `prf[thy](t,t)`,
r.e.-membership atoms `inW(t,t)`, the Boolean connectives, unbounded and
bounded quantifiers, and the modal operator `box`.

All nodes are immutable and hashable; operations here are pure.
"""

from __future__ import annotations

import functools
import re
from dataclasses import dataclass


class SyntaxError_(Exception):
    """Parse failure, with a token position."""

    def __init__(self, message, pos=None):
        super().__init__(message if pos is None else f"{message} (at token {pos})")
        self.pos = pos


def _cached_hash(cls):
    """Memoize the dataclass hash on the instance: nodes are immutable and
    deeply nested, and evaluation hashes the same nodes constantly."""
    base = cls.__hash__

    def __hash__(self):
        try:
            return self._hash_memo
        except AttributeError:
            h = base(self)
            object.__setattr__(self, "_hash_memo", h)
            return h

    cls.__hash__ = __hash__
    return cls


class CaptureError(Exception):
    """Substitution would capture a variable or break a bound-term invariant."""


# ---------------------------------------------------------------- terms


class Term:
    __slots__ = ()


@_cached_hash
@dataclass(frozen=True)
class Zero(Term):
    def __repr__(self):
        return "0"


@_cached_hash
@dataclass(frozen=True)
class Var(Term):
    name: str

    def __post_init__(self):
        if not re.fullmatch(r"[a-z][a-z0-9_]*", self.name):
            raise ValueError(f"bad variable name {self.name!r}")

    def __repr__(self):
        return self.name


@_cached_hash
@dataclass(frozen=True)
class Succ(Term):
    arg: Term

    def __repr__(self):
        return f"S({self.arg!r})"


@_cached_hash
@dataclass(frozen=True)
class Add(Term):
    left: Term
    right: Term

    def __repr__(self):
        return f"({self.left!r}+{self.right!r})"


@_cached_hash
@dataclass(frozen=True)
class Mul(Term):
    left: Term
    right: Term

    def __repr__(self):
        return f"({self.left!r}*{self.right!r})"


@_cached_hash
@dataclass(frozen=True)
class NumLit(Term):
    """The numeral n-bar, kept as a literal, never a Succ chain."""

    value: int

    def __post_init__(self):
        if self.value < 0:
            raise ValueError("numerals are naturals")

    def __repr__(self):
        return f"#{self.value}"


@_cached_hash
@dataclass(frozen=True)
class CodeSub(Term):
    """Dotted-code term: the code of `formula` with each mapped variable
    replaced by the numeral of its term's value.

    The substitution keys must be exactly the free variables of the coded
    formula; the term's own free variables are those of the mapped terms.
    """

    formula: "Formula"
    subst: tuple  # sorted tuple of (Var, Term)

    def __post_init__(self):
        pairs = tuple(sorted(self.subst, key=lambda p: p[0].name))
        object.__setattr__(self, "subst", pairs)
        keys = {v.name for v, _ in pairs}
        if len(keys) != len(pairs):
            raise ValueError("duplicate variable in code substitution")
        need = {v.name for v in free_vars(self.formula)}
        if keys != need:
            raise ValueError(
                f"code substitution covers {sorted(keys)}, formula needs {sorted(need)}"
            )

    def __repr__(self):
        inner = ",".join(f"{v!r}:={t!r}" for v, t in self.subst)
        return f"code[{self.formula!r}]{{{inner}}}"


def code_sub(formula, mapping):
    """Build a CodeSub from a dict Var -> Term."""
    return CodeSub(formula, tuple(mapping.items()))


# ---------------------------------------------------------------- theories

THEORY_TAGS = ("paB", "k", "k4", "kt", "s4", "s41", "triv", "gl", "ver")


@_cached_hash
@dataclass(frozen=True)
class TheoryId:
    """A base-logic tag plus optional extra axiom sentences."""

    tag: str
    extras: tuple = ()

    def __post_init__(self):
        if self.tag not in THEORY_TAGS:
            raise ValueError(f"unknown theory tag {self.tag!r}")
        for ax in self.extras:
            fv = free_vars(ax)
            if fv:
                raise ValueError(f"extra axiom has free variables {sorted(v.name for v in fv)}")

    def __repr__(self):
        if not self.extras:
            return self.tag
        inner = ";".join(repr(a) for a in self.extras)
        return f"{self.tag}+{{{inner}}}"


# ---------------------------------------------------------------- formulas


class Formula:
    __slots__ = ()


@_cached_hash
@dataclass(frozen=True)
class Bot(Formula):
    def __repr__(self):
        return "bot"


@_cached_hash
@dataclass(frozen=True)
class Eq(Formula):
    left: Term
    right: Term

    def __repr__(self):
        return f"{self.left!r}={self.right!r}"


@_cached_hash
@dataclass(frozen=True)
class Le(Formula):
    left: Term
    right: Term

    def __repr__(self):
        return f"{self.left!r}<={self.right!r}"


@_cached_hash
@dataclass(frozen=True)
class Lt(Formula):
    """First-class atom; stands for S(left) <= right in proofs and eval."""

    left: Term
    right: Term

    def __repr__(self):
        return f"{self.left!r}<{self.right!r}"


@_cached_hash
@dataclass(frozen=True)
class PrfAtom(Formula):
    """prf[T](x, y): y encodes a T-proof of the formula coded by x.

    Oracle-backed; classified as a Delta0 atom.
    """

    theory: TheoryId
    target: Term
    witness: Term

    def __repr__(self):
        return f"prf[{self.theory!r}]({self.target!r},{self.witness!r})"


@_cached_hash
@dataclass(frozen=True)
class InWAtom(Formula):
    """inW(x, y): x belongs to the y-th r.e. set. A Sigma1 atom."""

    member: Term
    index: Term

    def __repr__(self):
        return f"inW({self.member!r},{self.index!r})"


@_cached_hash
@dataclass(frozen=True)
class Not(Formula):
    body: Formula

    def __repr__(self):
        return f"~{self.body!r}"


@_cached_hash
@dataclass(frozen=True)
class And(Formula):
    left: Formula
    right: Formula

    def __repr__(self):
        return f"({self.left!r} & {self.right!r})"


@_cached_hash
@dataclass(frozen=True)
class Or(Formula):
    left: Formula
    right: Formula

    def __repr__(self):
        return f"({self.left!r} | {self.right!r})"


@_cached_hash
@dataclass(frozen=True)
class Imp(Formula):
    left: Formula
    right: Formula

    def __repr__(self):
        return f"({self.left!r} -> {self.right!r})"


@_cached_hash
@dataclass(frozen=True)
class Iff(Formula):
    left: Formula
    right: Formula

    def __repr__(self):
        return f"({self.left!r} <-> {self.right!r})"


@_cached_hash
@dataclass(frozen=True)
class Forall(Formula):
    var: Var
    body: Formula

    def __repr__(self):
        return f"forall {self.var!r} {self.body!r}"


@_cached_hash
@dataclass(frozen=True)
class Exists(Formula):
    var: Var
    body: Formula

    def __repr__(self):
        return f"exists {self.var!r} {self.body!r}"


@_cached_hash
@dataclass(frozen=True)
class BForall(Formula):
    """forall var < bound body; the bound term may not contain the variable."""

    var: Var
    bound: Term
    body: Formula

    def __post_init__(self):
        if self.var in term_vars(self.bound):
            raise ValueError(f"bound variable {self.var.name} occurs in its own bound")

    def __repr__(self):
        return f"forall {self.var!r} < {self.bound!r} {self.body!r}"


@_cached_hash
@dataclass(frozen=True)
class BExists(Formula):
    var: Var
    bound: Term
    body: Formula

    def __post_init__(self):
        if self.var in term_vars(self.bound):
            raise ValueError(f"bound variable {self.var.name} occurs in its own bound")

    def __repr__(self):
        return f"exists {self.var!r} < {self.bound!r} {self.body!r}"


@_cached_hash
@dataclass(frozen=True)
class Box(Formula):
    body: Formula

    def __repr__(self):
        return f"box {self.body!r}"


ATOMS = (Bot, Eq, Le, Lt, PrfAtom, InWAtom)
BINOPS = {And: "&", Or: "|", Imp: "->", Iff: "<->"}


# ---------------------------------------------------------------- queries


def term_vars(t):
    """All variables of a term (dotted-code terms contribute the mapped terms' vars)."""
    if isinstance(t, Var):
        return {t}
    if isinstance(t, Succ):
        return term_vars(t.arg)
    if isinstance(t, (Add, Mul)):
        return term_vars(t.left) | term_vars(t.right)
    if isinstance(t, CodeSub):
        out = set()
        for _, sub in t.subst:
            out |= term_vars(sub)
        return out
    return set()


@functools.lru_cache(maxsize=262144)
def free_vars_frozen(phi):
    """Frozen free-variable set, cached per node (formulas are immutable)."""
    if isinstance(phi, Bot):
        return frozenset()
    if isinstance(phi, (Eq, Le, Lt)):
        return frozenset(term_vars(phi.left) | term_vars(phi.right))
    if isinstance(phi, PrfAtom):
        return frozenset(term_vars(phi.target) | term_vars(phi.witness))
    if isinstance(phi, InWAtom):
        return frozenset(term_vars(phi.member) | term_vars(phi.index))
    if isinstance(phi, Not):
        return free_vars_frozen(phi.body)
    if isinstance(phi, (And, Or, Imp, Iff)):
        return free_vars_frozen(phi.left) | free_vars_frozen(phi.right)
    if isinstance(phi, (Forall, Exists)):
        return free_vars_frozen(phi.body) - {phi.var}
    if isinstance(phi, (BForall, BExists)):
        return frozenset(term_vars(phi.bound)) | (free_vars_frozen(phi.body) - {phi.var})
    if isinstance(phi, Box):
        return free_vars_frozen(phi.body)
    raise TypeError(f"not a formula: {phi!r}")


def free_vars(phi):
    """The set of free variables of a formula."""
    return set(free_vars_frozen(phi))


def is_sentence(phi):
    return not free_vars(phi)


def all_names(x):
    """Every variable name occurring anywhere (free, bound, inside coded
    formulas).  Used by fresh-name allocation, so over-collection is safe."""
    out = set()

    def t(term):
        if isinstance(term, Var):
            out.add(term.name)
        elif isinstance(term, Succ):
            t(term.arg)
        elif isinstance(term, (Add, Mul)):
            t(term.left)
            t(term.right)
        elif isinstance(term, CodeSub):
            f(term.formula)
            for v, s in term.subst:
                out.add(v.name)
                t(s)

    def f(phi):
        if isinstance(phi, (Eq, Le, Lt)):
            t(phi.left)
            t(phi.right)
        elif isinstance(phi, PrfAtom):
            t(phi.target)
            t(phi.witness)
            for ax in phi.theory.extras:
                f(ax)
        elif isinstance(phi, InWAtom):
            t(phi.member)
            t(phi.index)
        elif isinstance(phi, Not):
            f(phi.body)
        elif isinstance(phi, (And, Or, Imp, Iff)):
            f(phi.left)
            f(phi.right)
        elif isinstance(phi, (Forall, Exists)):
            out.add(phi.var.name)
            f(phi.body)
        elif isinstance(phi, (BForall, BExists)):
            out.add(phi.var.name)
            t(phi.bound)
            f(phi.body)
        elif isinstance(phi, Box):
            f(phi.body)

    if isinstance(x, Term):
        t(x)
    else:
        f(x)
    return out


class FreshVars:
    """Deterministic fresh-variable source: names v0, v1, ... starting past
    every index already used in the seed objects."""

    def __init__(self, *seeds):
        used = set()
        for s in seeds:
            used |= all_names(s)
        k = 0
        for name in used:
            m = re.fullmatch(r"v([0-9]+)", name)
            if m:
                k = max(k, int(m.group(1)) + 1)
        self._next = k

    def take(self):
        v = Var(f"v{self._next}")
        self._next += 1
        return v


# ---------------------------------------------------------------- substitution


def sub_term(t, v, s):
    if isinstance(t, Var):
        return s if t == v else t
    if isinstance(t, Succ):
        return Succ(sub_term(t.arg, v, s))
    if isinstance(t, Add):
        return Add(sub_term(t.left, v, s), sub_term(t.right, v, s))
    if isinstance(t, Mul):
        return Mul(sub_term(t.left, v, s), sub_term(t.right, v, s))
    if isinstance(t, CodeSub):
        return CodeSub(t.formula, tuple((w, sub_term(u, v, s)) for w, u in t.subst))
    return t


def substitute(phi, v, s):
    """Replace every free occurrence of v in phi by the term s.

    The caller guarantees s is substitutable for v (no capture); since terms
    have no binders this reduces to a shadowing check at quantifiers, and a
    CaptureError is raised if a quantifier of phi would capture a variable
    of s.
    """
    svars = term_vars(s)

    def go(p):
        if isinstance(p, Bot):
            return p
        if isinstance(p, (Eq, Le, Lt)):
            return type(p)(sub_term(p.left, v, s), sub_term(p.right, v, s))
        if isinstance(p, PrfAtom):
            return PrfAtom(p.theory, sub_term(p.target, v, s), sub_term(p.witness, v, s))
        if isinstance(p, InWAtom):
            return InWAtom(sub_term(p.member, v, s), sub_term(p.index, v, s))
        if isinstance(p, Not):
            return Not(go(p.body))
        if isinstance(p, (And, Or, Imp, Iff)):
            return type(p)(go(p.left), go(p.right))
        if isinstance(p, (Forall, Exists)):
            if p.var == v:
                return p
            if p.var in svars and v in free_vars(p.body):
                raise CaptureError(f"{p.var.name} of the substituted term would be captured")
            return type(p)(p.var, go(p.body))
        if isinstance(p, (BForall, BExists)):
            bound = sub_term(p.bound, v, s)
            if p.var == v:
                return type(p)(p.var, bound, p.body)
            if p.var in svars and v in free_vars(p.body):
                raise CaptureError(f"{p.var.name} of the substituted term would be captured")
            return type(p)(p.var, bound, go(p.body))
        if isinstance(p, Box):
            return Box(go(p.body))
        raise TypeError(f"not a formula: {p!r}")

    return go(phi)


def substitute_many(phi, env):
    """Simultaneous substitution from a dict Var -> closed Term.

    Only safe for closed replacement terms (numerals, codes); applied
    sequentially, which coincides with simultaneous substitution then.
    """
    for v, t in env.items():
        phi = substitute(phi, v, t)
    return phi


# ---------------------------------------------------------------- printer


def print_term(t):
    return repr(t)


def print_formula(phi):
    return repr(phi)


def print_theory(thy):
    return repr(thy)


# ---------------------------------------------------------------- parser

_TOKEN_RE = re.compile(
    r"""
    (?P<ws>\s+)
  | (?P<arrow2><->)
  | (?P<arrow>->)
  | (?P<le><=)
  | (?P<assign>:=)
  | (?P<lt><)
  | (?P<num>[0-9]+)
  | (?P<succ>S)
  | (?P<inw>inW)
  | (?P<pab>paB)
  | (?P<ident>[a-z][a-z0-9_]*)
  | (?P<punct>[()\[\]{},;=~&|+*#])
    """,
    re.VERBOSE,
)

KEYWORDS = {"forall", "exists", "box", "bot", "prf", "code"}


def _tokenize(text):
    tokens = []
    i = 0
    while i < len(text):
        m = _TOKEN_RE.match(text, i)
        if not m:
            raise SyntaxError_(f"unexpected character {text[i]!r}", i)
        i = m.end()
        kind = m.lastgroup
        if kind == "ws":
            continue
        tokens.append(m.group())
    return tokens


class _Parser:
    def __init__(self, text):
        self.toks = _tokenize(text)
        self.pos = 0

    def peek(self):
        return self.toks[self.pos] if self.pos < len(self.toks) else None

    def next(self):
        if self.pos >= len(self.toks):
            raise SyntaxError_("unexpected end of input", self.pos)
        tok = self.toks[self.pos]
        self.pos += 1
        return tok

    def expect(self, tok):
        got = self.next()
        if got != tok:
            raise SyntaxError_(f"expected {tok!r}, got {got!r}", self.pos - 1)

    # -- terms

    def term(self):
        tok = self.peek()
        if tok is None:
            raise SyntaxError_("expected a term", self.pos)
        if tok == "0":
            self.next()
            return Zero()
        if tok == "#":
            self.next()
            n = self.next()
            if not n.isdigit():
                raise SyntaxError_(f"expected digits after #, got {n!r}", self.pos - 1)
            return NumLit(int(n))
        if tok == "S":
            self.next()
            self.expect("(")
            arg = self.term()
            self.expect(")")
            return Succ(arg)
        if tok == "(":
            self.next()
            left = self.term()
            op = self.next()
            right = self.term()
            self.expect(")")
            if op == "+":
                return Add(left, right)
            if op == "*":
                return Mul(left, right)
            raise SyntaxError_(f"expected + or * in a term, got {op!r}", self.pos - 1)
        if tok == "code":
            self.next()
            self.expect("[")
            inner = self.formula()
            self.expect("]")
            self.expect("{")
            pairs = []
            if self.peek() != "}":
                while True:
                    v = self.next()
                    if v in KEYWORDS or not re.fullmatch(r"[a-z][a-z0-9_]*", v):
                        raise SyntaxError_(f"expected a variable, got {v!r}", self.pos - 1)
                    self.expect(":=")
                    pairs.append((Var(v), self.term()))
                    if self.peek() == ",":
                        self.next()
                        continue
                    break
            self.expect("}")
            return CodeSub(inner, tuple(pairs))
        if tok.isdigit():
            raise SyntaxError_(f"bare number {tok!r}; write #{tok} for a numeral", self.pos)
        if re.fullmatch(r"[a-z][a-z0-9_]*", tok) and tok not in KEYWORDS:
            self.next()
            return Var(tok)
        raise SyntaxError_(f"expected a term, got {tok!r}", self.pos)

    # -- theories

    def theory(self):
        tag = self.next()
        if tag not in THEORY_TAGS:
            raise SyntaxError_(f"unknown theory tag {tag!r}", self.pos - 1)
        extras = ()
        if self.peek() == "+":
            self.next()
            self.expect("{")
            acc = []
            if self.peek() != "}":
                while True:
                    acc.append(self.formula())
                    if self.peek() == ";":
                        self.next()
                        continue
                    break
            self.expect("}")
            extras = tuple(acc)
        return TheoryId(tag, extras)

    # -- formulas

    def formula(self):
        tok = self.peek()
        if tok is None:
            raise SyntaxError_("expected a formula", self.pos)
        if tok == "bot":
            self.next()
            return Bot()
        if tok == "~":
            self.next()
            return Not(self.formula())
        if tok == "box":
            self.next()
            return Box(self.formula())
        if tok in ("forall", "exists"):
            self.next()
            name = self.next()
            if name in KEYWORDS or not re.fullmatch(r"[a-z][a-z0-9_]*", name):
                raise SyntaxError_(f"expected a variable after {tok}, got {name!r}", self.pos - 1)
            v = Var(name)
            if self.peek() == "<":
                self.next()
                bound = self.term()
                body = self.formula()
                cls = BForall if tok == "forall" else BExists
                if v in term_vars(bound):
                    raise SyntaxError_(f"bound variable {v.name} occurs in its bound", self.pos)
                return cls(v, bound, body)
            body = self.formula()
            return (Forall if tok == "forall" else Exists)(v, body)
        if tok == "prf":
            self.next()
            self.expect("[")
            thy = self.theory()
            self.expect("]")
            self.expect("(")
            t1 = self.term()
            self.expect(",")
            t2 = self.term()
            self.expect(")")
            return PrfAtom(thy, t1, t2)
        if tok == "inW":
            self.next()
            self.expect("(")
            t1 = self.term()
            self.expect(",")
            t2 = self.term()
            self.expect(")")
            return InWAtom(t1, t2)
        if tok == "(":
            # Either a grouped formula, a binary connective, or an atom
            # whose left term is parenthesized, e.g. (x+y)=z.
            start = self.pos
            self.next()
            try:
                left = self.formula()
            except SyntaxError_:
                self.pos = start
                return self.atom()
            op = self.peek()
            if op in ("&", "|", "->", "<->"):
                self.next()
                right = self.formula()
                self.expect(")")
                cls = {"&": And, "|": Or, "->": Imp, "<->": Iff}[op]
                return cls(left, right)
            self.expect(")")
            return left
        return self.atom()

    def atom(self):
        t1 = self.term()
        op = self.next()
        if op == "=":
            return Eq(t1, self.term())
        if op == "<=":
            return Le(t1, self.term())
        if op == "<":
            return Lt(t1, self.term())
        raise SyntaxError_(f"expected =, <= or < after a term, got {op!r}", self.pos - 1)


def parse(text):
    """Parse canonical formula text; inverse of print_formula on its image."""
    p = _Parser(text)
    phi = p.formula()
    if p.peek() is not None:
        raise SyntaxError_(f"trailing input {p.peek()!r}", p.pos)
    return phi


def parse_term(text):
    p = _Parser(text)
    t = p.term()
    if p.peek() is not None:
        raise SyntaxError_(f"trailing input {p.peek()!r}", p.pos)
    return t


def parse_theory(text):
    p = _Parser(text)
    thy = p.theory()
    if p.peek() is not None:
        raise SyntaxError_(f"trailing input {p.peek()!r}", p.pos)
    return thy
