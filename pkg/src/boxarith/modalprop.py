"""Decision procedures for propositional modal logics, with countermodels.

Provability is decided by tableau-style satisfiability of the negation in
negation normal form.  Per logic:

  k, kt        modal depth decreases at every successor step;
  k4, s4       successors inherit boxed formulas, loops close back onto an
               ancestor (transitive frames admit cycles);
  gl           a diamond demand for X spawns a successor carrying X and
               box ~X (the frame has a last X-failure), which blocks any
               repeat of the same demand below, so recursion terminates
               on finite irreflexive trees;
  triv, ver    reduce to classical tautology checking (erase boxes /
               replace boxed subformulas by truth), which is exactly the
               one-point reflexive / one-point blind frame.

A `not provable` answer carries a Kripke countermodel that is re-verified
by model checking; a `provable` answer carries the closed refutation tree,
re-checkable by verify_certificate.
"""

from __future__ import annotations

import re
from dataclasses import dataclass, field

LOGICS = ("k", "k4", "kt", "s4", "gl", "triv", "ver")

def _cached_hash(cls):
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

_REFLEXIVE = ("kt", "s4")
_TRANSITIVE = ("k4", "s4", "gl")
_INHERIT_BOXES = ("k4", "s4", "gl")


# -------------------------------------------------------------- formulas


class PropFormula:
    __slots__ = ()


@_cached_hash
@dataclass(frozen=True)
class PVar(PropFormula):
    name: str

    def __repr__(self):
        return self.name


@_cached_hash
@dataclass(frozen=True)
class PBot(PropFormula):
    def __repr__(self):
        return "bot"


@_cached_hash
@dataclass(frozen=True)
class PNot(PropFormula):
    body: PropFormula

    def __repr__(self):
        return f"~{self.body!r}"


@_cached_hash
@dataclass(frozen=True)
class PAnd(PropFormula):
    left: PropFormula
    right: PropFormula

    def __repr__(self):
        return f"({self.left!r} & {self.right!r})"


@_cached_hash
@dataclass(frozen=True)
class POr(PropFormula):
    left: PropFormula
    right: PropFormula

    def __repr__(self):
        return f"({self.left!r} | {self.right!r})"


@_cached_hash
@dataclass(frozen=True)
class PImp(PropFormula):
    left: PropFormula
    right: PropFormula

    def __repr__(self):
        return f"({self.left!r} -> {self.right!r})"


@_cached_hash
@dataclass(frozen=True)
class PIff(PropFormula):
    left: PropFormula
    right: PropFormula

    def __repr__(self):
        return f"({self.left!r} <-> {self.right!r})"


@_cached_hash
@dataclass(frozen=True)
class PBox(PropFormula):
    body: PropFormula

    def __repr__(self):
        return f"box {self.body!r}"


def print_prop(phi):
    return repr(phi)


_PTOK = re.compile(r"\s*(<->|->|[()&|~]|box|bot|[a-z][a-z0-9_]*)")


def parse_prop(text):
    tokens = []
    i = 0
    while i < len(text):
        m = _PTOK.match(text, i)
        if not m or not m.group(1):
            if text[i:].strip():
                raise ValueError(f"bad token at {text[i:]!r}")
            break
        tokens.append(m.group(1))
        i = m.end()

    pos = [0]

    def peek():
        return tokens[pos[0]] if pos[0] < len(tokens) else None

    def take():
        t = peek()
        if t is None:
            raise ValueError("unexpected end of formula")
        pos[0] += 1
        return t

    def formula():
        t = peek()
        if t == "bot":
            take()
            return PBot()
        if t == "~":
            take()
            return PNot(formula())
        if t == "box":
            take()
            return PBox(formula())
        if t == "(":
            take()
            left = formula()
            op = peek()
            if op in ("&", "|", "->", "<->"):
                take()
                right = formula()
                if take() != ")":
                    raise ValueError("missing )")
                cls = {"&": PAnd, "|": POr, "->": PImp, "<->": PIff}[op]
                return cls(left, right)
            if take() != ")":
                raise ValueError("missing )")
            return left
        if t is not None and re.fullmatch(r"[a-z][a-z0-9_]*", t) and t != "box":
            take()
            return PVar(t)
        raise ValueError(f"unexpected token {t!r}")

    out = formula()
    if peek() is not None:
        raise ValueError(f"trailing input {peek()!r}")
    return out


# ------------------------------------------------------------------- NNF


@_cached_hash
@dataclass(frozen=True)
class LTrue:
    def __repr__(self):
        return "T"


@_cached_hash
@dataclass(frozen=True)
class LFalse:
    def __repr__(self):
        return "F"


@_cached_hash
@dataclass(frozen=True)
class LVar:
    name: str
    neg: bool

    def __repr__(self):
        return ("~" if self.neg else "") + self.name


@_cached_hash
@dataclass(frozen=True)
class NAnd:
    left: object
    right: object

    def __repr__(self):
        return f"({self.left!r} & {self.right!r})"


@_cached_hash
@dataclass(frozen=True)
class NOr:
    left: object
    right: object

    def __repr__(self):
        return f"({self.left!r} | {self.right!r})"


@_cached_hash
@dataclass(frozen=True)
class NBox:
    body: object

    def __repr__(self):
        return f"[]{self.body!r}"


@_cached_hash
@dataclass(frozen=True)
class NDia:
    body: object

    def __repr__(self):
        return f"<>{self.body!r}"


def nnf(phi, pos=True):
    if isinstance(phi, PVar):
        return LVar(phi.name, not pos)
    if isinstance(phi, PBot):
        return LFalse() if pos else LTrue()
    if isinstance(phi, PNot):
        return nnf(phi.body, not pos)
    if isinstance(phi, PAnd):
        cls = NAnd if pos else NOr
        return cls(nnf(phi.left, pos), nnf(phi.right, pos))
    if isinstance(phi, POr):
        cls = NOr if pos else NAnd
        return cls(nnf(phi.left, pos), nnf(phi.right, pos))
    if isinstance(phi, PImp):
        if pos:
            return NOr(nnf(phi.left, False), nnf(phi.right, True))
        return NAnd(nnf(phi.left, True), nnf(phi.right, False))
    if isinstance(phi, PIff):
        if pos:
            return NAnd(
                NOr(nnf(phi.left, False), nnf(phi.right, True)),
                NOr(nnf(phi.right, False), nnf(phi.left, True)),
            )
        return NOr(
            NAnd(nnf(phi.left, True), nnf(phi.right, False)),
            NAnd(nnf(phi.right, True), nnf(phi.left, False)),
        )
    if isinstance(phi, PBox):
        cls = NBox if pos else NDia
        return cls(nnf(phi.body, pos))
    raise TypeError(f"not a propositional formula: {phi!r}")


def nnf_neg(n):
    """Negation inside NNF."""
    if isinstance(n, LTrue):
        return LFalse()
    if isinstance(n, LFalse):
        return LTrue()
    if isinstance(n, LVar):
        return LVar(n.name, not n.neg)
    if isinstance(n, NAnd):
        return NOr(nnf_neg(n.left), nnf_neg(n.right))
    if isinstance(n, NOr):
        return NAnd(nnf_neg(n.left), nnf_neg(n.right))
    if isinstance(n, NBox):
        return NDia(nnf_neg(n.body))
    return NBox(nnf_neg(n.body))


# --------------------------------------------------------- Kripke models


@dataclass
class KripkeModel:
    worlds: tuple
    rel: frozenset  # pairs (i, j)
    val: dict  # world -> frozenset of variable names

    def successors(self, w):
        return [v for (u, v) in self.rel if u == w]


def model_check(model, w, phi):
    if isinstance(phi, PVar):
        return phi.name in model.val.get(w, frozenset())
    if isinstance(phi, PBot):
        return False
    if isinstance(phi, PNot):
        return not model_check(model, w, phi.body)
    if isinstance(phi, PAnd):
        return model_check(model, w, phi.left) and model_check(model, w, phi.right)
    if isinstance(phi, POr):
        return model_check(model, w, phi.left) or model_check(model, w, phi.right)
    if isinstance(phi, PImp):
        return (not model_check(model, w, phi.left)) or model_check(model, w, phi.right)
    if isinstance(phi, PIff):
        return model_check(model, w, phi.left) == model_check(model, w, phi.right)
    if isinstance(phi, PBox):
        return all(model_check(model, v, phi.body) for v in model.successors(w))
    raise TypeError(f"not a propositional formula: {phi!r}")


def frame_ok(model, logic):
    rel = model.rel
    if logic in _REFLEXIVE:
        if any((w, w) not in rel for w in model.worlds):
            return False
    if logic in _TRANSITIVE:
        for (a, b) in rel:
            for (c, d) in rel:
                if b == c and (a, d) not in rel:
                    return False
    if logic == "gl":
        # finite transitive and irreflexive = converse well-founded
        if any((w, w) in rel for w in model.worlds):
            return False
    return True


# ------------------------------------------------------------ the prover


@dataclass
class Trace:
    formulas: frozenset
    rule: str  # bot | clash | and | or | t | dia
    principal: object
    children: tuple


class _World:
    __slots__ = ("formulas", "valuation", "children", "wid")

    def __init__(self, formulas):
        self.formulas = formulas
        self.valuation = frozenset(
            f.name for f in formulas if isinstance(f, LVar) and not f.neg
        )
        self.children = []
        self.wid = None


def _succ_seed(logic, fs, demand):
    seed = {demand.body}
    for f in fs:
        if isinstance(f, NBox):
            seed.add(f.body)
            if logic in _INHERIT_BOXES:
                seed.add(f)
    if logic == "gl":
        seed.add(NBox(nnf_neg(demand.body)))
    return frozenset(seed)


class _Prover:
    def __init__(self, logic):
        self.logic = logic
        self.memo = {}
        self.inprogress = {}

    def sat(self, fs):
        """(True, world) if satisfiable at the root of some rooted frame,
        else (False, trace)."""
        if fs in self.memo:
            return self.memo[fs]
        if fs in self.inprogress:
            if self.logic in ("k4", "s4"):
                return True, self.inprogress[fs]  # loop back onto the ancestor
            return False, Trace(fs, "loop", None, ())
        placeholder = _World(fs)
        self.inprogress[fs] = placeholder
        try:
            res = self._expand(fs, placeholder)
        finally:
            del self.inprogress[fs]
        self.memo[fs] = res
        return res

    def _expand(self, fs, world):
        # formulas persist once added: a rule fires only when it would add
        # something new, so every chain of expansions strictly grows inside
        # the finite subformula closure and saturation terminates
        if any(isinstance(f, LFalse) for f in fs):
            return False, Trace(fs, "bot", None, ())
        pos = {f.name for f in fs if isinstance(f, LVar) and not f.neg}
        negv = {f.name for f in fs if isinstance(f, LVar) and f.neg}
        clash = pos & negv
        if clash:
            return False, Trace(fs, "clash", sorted(clash)[0], ())
        for f in sorted(fs, key=repr):
            if isinstance(f, NAnd) and not (f.left in fs and f.right in fs):
                child = fs | {f.left, f.right}
                ok, info = self.sat(child)
                if ok:
                    return True, info
                return False, Trace(fs, "and", f, (info,))
            if isinstance(f, NOr) and f.left not in fs and f.right not in fs:
                ok, info = self.sat(fs | {f.left})
                if ok:
                    return True, info
                ok2, info2 = self.sat(fs | {f.right})
                if ok2:
                    return True, info2
                return False, Trace(fs, "or", f, (info, info2))
        if self.logic in _REFLEXIVE:
            for f in sorted(fs, key=repr):
                if isinstance(f, NBox) and f.body not in fs:
                    child = fs | {f.body}
                    ok, info = self.sat(child)
                    if ok:
                        return True, info
                    return False, Trace(fs, "t", f, (info,))
        # saturated; spawn a successor per diamond demand
        world.formulas = fs
        world.valuation = frozenset(
            f.name for f in fs if isinstance(f, LVar) and not f.neg
        )
        world.children = []
        for f in sorted(fs, key=repr):
            if isinstance(f, NDia):
                seed = _succ_seed(self.logic, fs, f)
                ok, info = self.sat(seed)
                if not ok:
                    return False, Trace(fs, "dia", f, (info,))
                world.children.append(info)
        return True, world


def _collect_model(root, logic):
    worlds = []
    edges = set()
    seen = {}

    def visit(w):
        if id(w) in seen:
            return seen[id(w)]
        idx = len(worlds)
        seen[id(w)] = idx
        worlds.append(w)
        for c in w.children:
            ci = visit(c)
            edges.add((idx, ci))
        return idx

    visit(root)
    rel = set(edges)
    if logic in _TRANSITIVE:
        changed = True
        while changed:
            changed = False
            for (a, b) in list(rel):
                for (c, d) in list(rel):
                    if b == c and (a, d) not in rel:
                        rel.add((a, d))
                        changed = True
    if logic in _REFLEXIVE:
        for i in range(len(worlds)):
            rel.add((i, i))
    model = KripkeModel(
        tuple(range(len(worlds))),
        frozenset(rel),
        {i: w.valuation for i, w in enumerate(worlds)},
    )
    return model, 0


@dataclass
class Decision:
    logic: str
    formula: PropFormula
    provable: bool
    countermodel: object = None  # (KripkeModel, root world)
    certificate: object = None  # Trace, or a reduction marker for triv/ver


def _erase_boxes(phi):
    if isinstance(phi, PBox):
        return _erase_boxes(phi.body)
    if isinstance(phi, PNot):
        return PNot(_erase_boxes(phi.body))
    if isinstance(phi, (PAnd, POr, PImp, PIff)):
        return type(phi)(_erase_boxes(phi.left), _erase_boxes(phi.right))
    return phi


def _boxes_to_top(phi):
    if isinstance(phi, PBox):
        return PNot(PBot())
    if isinstance(phi, PNot):
        return PNot(_boxes_to_top(phi.body))
    if isinstance(phi, (PAnd, POr, PImp, PIff)):
        return type(phi)(_boxes_to_top(phi.left), _boxes_to_top(phi.right))
    return phi


def prop_vars(phi):
    if isinstance(phi, PVar):
        return {phi.name}
    if isinstance(phi, (PNot, PBox)):
        return prop_vars(phi.body)
    if isinstance(phi, (PAnd, POr, PImp, PIff)):
        return prop_vars(phi.left) | prop_vars(phi.right)
    return set()


def _classical_falsifier(phi):
    """An assignment making the box-free formula false, or None."""
    names = sorted(prop_vars(phi))

    def ev(p, asg):
        if isinstance(p, PVar):
            return p.name in asg
        if isinstance(p, PBot):
            return False
        if isinstance(p, PNot):
            return not ev(p.body, asg)
        if isinstance(p, PAnd):
            return ev(p.left, asg) and ev(p.right, asg)
        if isinstance(p, POr):
            return ev(p.left, asg) or ev(p.right, asg)
        if isinstance(p, PImp):
            return (not ev(p.left, asg)) or ev(p.right, asg)
        return ev(p.left, asg) == ev(p.right, asg)

    for mask in range(1 << len(names)):
        asg = frozenset(n for i, n in enumerate(names) if (mask >> i) & 1)
        if not ev(phi, asg):
            return asg
    return None


def decide(logic, phi):
    """Provability in the propositional modal logic, with a verified
    countermodel or a refutation certificate."""
    if logic not in LOGICS:
        raise ValueError(f"unknown logic {logic!r}")
    if logic in ("triv", "ver"):
        reduced = _erase_boxes(phi) if logic == "triv" else _boxes_to_top(phi)
        asg = _classical_falsifier(reduced)
        if asg is None:
            return Decision(logic, phi, True, certificate=("reduction", logic))
        rel = frozenset({(0, 0)}) if logic == "triv" else frozenset()
        model = KripkeModel((0,), rel, {0: asg})
        if model_check(model, 0, phi):
            raise AssertionError("countermodel failed verification")
        return Decision(logic, phi, False, countermodel=(model, 0))
    prover = _Prover(logic)
    root = frozenset({nnf(phi, pos=False)})
    ok, info = prover.sat(root)
    if not ok:
        return Decision(logic, phi, True, certificate=info)
    model, w = _collect_model(info, logic)
    if model_check(model, w, phi) or not frame_ok(model, logic):
        raise AssertionError("countermodel failed verification")
    return Decision(logic, phi, False, countermodel=(model, w))


def verify_certificate(logic, phi, trace):
    """Re-check a refutation tree node by node."""
    if logic in ("triv", "ver"):
        return trace == ("reduction", logic) and _classical_falsifier(
            _erase_boxes(phi) if logic == "triv" else _boxes_to_top(phi)
        ) is None
    if not isinstance(trace, Trace):
        return False
    if trace.formulas != frozenset({nnf(phi, pos=False)}):
        return False
    return _verify_node(logic, trace)


def _verify_node(logic, tr):
    fs = tr.formulas
    if tr.rule == "bot":
        return any(isinstance(f, LFalse) for f in fs)
    if tr.rule == "clash":
        return LVar(tr.principal, False) in fs and LVar(tr.principal, True) in fs
    if tr.rule == "and":
        f = tr.principal
        if not (isinstance(f, NAnd) and f in fs and len(tr.children) == 1):
            return False
        child = tr.children[0]
        return child.formulas == fs | {f.left, f.right} and _verify_node(logic, child)
    if tr.rule == "or":
        f = tr.principal
        if not (isinstance(f, NOr) and f in fs and len(tr.children) == 2):
            return False
        l, r = tr.children
        return (
            l.formulas == fs | {f.left}
            and r.formulas == fs | {f.right}
            and _verify_node(logic, l)
            and _verify_node(logic, r)
        )
    if tr.rule == "t":
        f = tr.principal
        if logic not in _REFLEXIVE:
            return False
        if not (isinstance(f, NBox) and f in fs and len(tr.children) == 1):
            return False
        child = tr.children[0]
        return child.formulas == fs | {f.body} and _verify_node(logic, child)
    if tr.rule == "dia":
        f = tr.principal
        if not (isinstance(f, NDia) and f in fs and len(tr.children) == 1):
            return False
        child = tr.children[0]
        return child.formulas == _succ_seed(logic, fs, f) and _verify_node(logic, child)
    return False  # 'loop' and anything else is not a closure


# --------------------------------------------------------------- MDP scan


@dataclass
class MdpReport:
    logic: str
    size_bound: int
    var_bound: int
    n_formulas: int
    n_provable: int
    n_violations: int
    samples: list = field(default_factory=list)
    exhaustive: bool = True


def enumerate_formulas(size_bound, var_bound):
    """All formulas (without <->) of the given node-count and variable
    budget, smallest sizes first."""
    vars_ = [PVar(f"p{i}" if i else "p") for i in range(var_bound)]
    by_size = {1: [PBot()] + vars_}
    for n in range(2, size_bound + 1):
        acc = []
        for f in by_size[n - 1]:
            acc.append(PNot(f))
            acc.append(PBox(f))
        for k in range(1, n - 1):
            for a in by_size[k]:
                for b in by_size[n - 1 - k]:
                    acc.append(PAnd(a, b))
                    acc.append(POr(a, b))
                    acc.append(PImp(a, b))
        by_size[n] = acc
    out = []
    for n in range(1, size_bound + 1):
        out.extend(by_size[n])
    return out


def mdp_scan(logic, size_bound, var_bound, sample_cap=10):
    """Scan all pairs (A, B) in the bounded formula space for violations of
    the modal disjunction property: provable box A | box B with neither A
    nor B provable.

    For the Kripke-complete logics the pair test reduces soundly to the
    tableau's own first expansion: the negation of box A | box B is a pair
    of diamond demands at a fresh root, and a fresh root above any two
    rooted frames stays in the class (K/K4/KT/S4/GL frames are closed under
    disjoint union plus a new root), so the disjunction is unprovable
    exactly when each demand's successor seed is satisfiable.  Each seed is
    checked once per formula by the real prover.
    """
    formulas = enumerate_formulas(size_bound, var_bound)
    n = len(formulas)
    if logic in ("triv", "ver"):
        reduce = _erase_boxes if logic == "triv" else _boxes_to_top
        prov = [(_classical_falsifier(reduce(f)) is None) for f in formulas]
        n_prov = sum(prov)
        violations = 0
        samples = []
        exhaustive = True
        for i, a in enumerate(formulas):
            for j, b in enumerate(formulas):
                if prov[i] or prov[j]:
                    continue
                pair = POr(PBox(a), PBox(b))
                if _classical_falsifier(reduce(pair)) is None:
                    violations += 1
                    if len(samples) < sample_cap:
                        samples.append((a, b))
            if samples and len(samples) >= sample_cap:
                exhaustive = False  # enough evidence; stop counting pairs
                break
        return MdpReport(logic, size_bound, var_bound, n, n_prov, violations, samples, exhaustive)
    prover = _Prover(logic)
    unprov = []
    bad = []  # unprovable A whose diamond seed is unsatisfiable
    n_prov = 0
    for f in formulas:
        neg = nnf(f, pos=False)
        ok, _ = prover.sat(frozenset({neg}))
        if not ok:
            n_prov += 1
            continue
        unprov.append(f)
        seed = _succ_seed(logic, frozenset({NDia(neg)}), NDia(neg))
        ok2, _ = prover.sat(seed)
        if not ok2:
            bad.append(f)
    violations = 0
    samples = []
    if bad:
        violations = len(bad) * len(unprov) * 2 - len(bad) * len(bad)
        for a in bad[:sample_cap]:
            samples.append((a, a))
    return MdpReport(logic, size_bound, var_bound, n, n_prov, violations, samples, True)


def makinson_check(formulas):
    """Sanity registry fact: K-provable formulas are provable in both of
    the two ceilings, Triv and Ver."""
    out = []
    for f in formulas:
        if decide("k", f).provable:
            if not (decide("triv", f).provable and decide("ver", f).provable):
                out.append(f)
    return out
