"""Rosser-style fixed points and the disjunction/correctness audit harness.

Every gallery builder reduces to the exact fixed-point constructor: where a
construction mentions the code of a derived sentence (a boxed sentence, a
disjunction), that sentence is added as an auxiliary fixed point whose
context formula is the corresponding combination of the primary contexts,
so the embedded numerals are registry-exact.

The audit operations never assert metatheorems: they search the store
within a budget and report what was found.  Smallest-proof comparisons use
registry indices as the proof ordering.
"""

from __future__ import annotations

from dataclasses import dataclass, field

from .classes import Cls, classify
from .coding import fixed_points
from .syntax import (
    And,
    BForall,
    Box,
    Exists,
    Forall,
    FreshVars,
    Iff,
    InWAtom,
    Not,
    NumLit,
    Or,
    PrfAtom,
    Succ,
    Var,
    free_vars,
    is_sentence,
)

GALLERY_KINDS = (
    "godel_sentence",
    "thm56_psi",
    "prop52_sigma",
    "prop44_pair",
    "lemma42_pair",
    "prop47_xi",
    "wmt_instance",
)


@dataclass(frozen=True)
class GalleryResult:
    kind: str
    sentences: tuple
    codes: tuple
    crossrefs: dict = field(default_factory=dict)


def _check_delta(delta, var):
    if Cls.DELTA0 not in classify(delta):
        raise ValueError("delta parameter must be Delta0")
    fv = free_vars(delta)
    if fv - {var}:
        raise ValueError(f"delta may only use the variable {var.name}")


def _placeholders(k, *seeds):
    fresh = FreshVars(*seeds)
    return [fresh.take() for _ in range(k)]


def _result(kind, registry, sentences, names):
    codes = tuple(registry.code_of(s) for s in sentences)
    return GalleryResult(kind, tuple(sentences), codes, dict(zip(names, codes)))


def godel_sentence(theory, registry):
    """The sentence asserting its own unprovability: psi = ~PR(code of psi)."""
    x0 = Var("x0")
    y = Var("y")
    ctx = Not(Exists(y, PrfAtom(theory, x0, y)))
    psi = fixed_points(registry, [ctx], [x0])[0]
    return _result("godel_sentence", registry, [psi], ["psi"])


def thm56_psi(theory, phi_x, x, registry):
    """psi = exists v (box phi(v) & forall y < v ~prf(code of psi, y))."""
    fv = free_vars(phi_x)
    if fv - {x}:
        raise ValueError(f"phi may only use the variable {x.name}")
    hole, yv = _placeholders(2, phi_x)
    body = And(Box(phi_x), BForall(yv, x, Not(PrfAtom(theory, hole, yv))))
    ctx = Exists(x, body)
    psi = fixed_points(registry, [ctx], [hole])[0]
    return _result("thm56_psi", registry, [psi], ["psi"])


def prop52_sigma(theory, phi, delta, x, registry):
    """sigma = exists v (delta(v) & forall y < v ~prf(code of (phi | sigma), y)),
    returned together with the disjunction phi | sigma it races against."""
    if not is_sentence(phi):
        raise ValueError("phi must be a sentence")
    _check_delta(delta, x)
    holes = _placeholders(2, phi, delta)
    yv = FreshVars(phi, delta, *holes).take()
    ctx_sigma = Exists(x, And(delta, BForall(yv, x, Not(PrfAtom(theory, holes[1], yv)))))
    ctx_dis = Or(phi, ctx_sigma)
    sigma, dis = fixed_points(registry, [ctx_sigma, ctx_dis], holes)
    return _result("prop52_sigma", registry, [sigma, dis], ["sigma", "phi_or_sigma"])


def prop44_pair(theory, delta, x, registry):
    """The Rosser pair racing delta against provability:

      sigma0 = exists v ((delta(v) | prf(c1, v)) & forall y < v ~prf(c2, y))
      sigma1 = exists y (prf(c2, y) & forall v < S(y) (~delta(v) & ~prf(c1, v)))

    where c1 codes sigma1 and c2 codes box sigma0.  The second bullet's
    bound is 'up to and including y', rendered as v < S(y)."""
    _check_delta(delta, x)
    h0, h1, h2 = _placeholders(3, delta)
    yv = FreshVars(delta, h0, h1, h2).take()
    ctx0 = Exists(
        x,
        And(
            Or(delta, PrfAtom(theory, h1, x)),
            BForall(yv, x, Not(PrfAtom(theory, h2, yv))),
        ),
    )
    ctx1 = Exists(
        yv,
        And(
            PrfAtom(theory, h2, yv),
            BForall(x, Succ(yv), And(Not(delta), Not(PrfAtom(theory, h1, x)))),
        ),
    )
    ctx2 = Box(ctx0)
    s0, s1, aux = fixed_points(registry, [ctx0, ctx1, ctx2], [h0, h1, h2])
    return _result("prop44_pair", registry, [s0, s1, aux], ["sigma0", "sigma1", "box_sigma0"])


def lemma42_pair(theory, delta, phi, x, registry):
    """The pair used to push a Sigma1 disjunct into a boxed one:

      psi0 = exists v ((delta(v) | prf(c2, v)) & forall y < v ~prf(c3, y))
      psi1 = exists y (prf(c3, y) & forall v < S(y) (~delta(v) & ~prf(c2, v)))

    with c2 the code of box psi1 and c3 the code of box (phi | psi0)."""
    if not is_sentence(phi):
        raise ValueError("phi must be a sentence")
    _check_delta(delta, x)
    h0, h1, h2, h3 = _placeholders(4, delta, phi)
    yv = FreshVars(delta, phi, h0, h1, h2, h3).take()
    ctx0 = Exists(
        x,
        And(
            Or(delta, PrfAtom(theory, h2, x)),
            BForall(yv, x, Not(PrfAtom(theory, h3, yv))),
        ),
    )
    ctx1 = Exists(
        yv,
        And(
            PrfAtom(theory, h3, yv),
            BForall(x, Succ(yv), And(Not(delta), Not(PrfAtom(theory, h2, x)))),
        ),
    )
    ctx2 = Box(ctx1)
    ctx3 = Box(Or(phi, ctx0))
    p0, p1, aux2, aux3 = fixed_points(registry, [ctx0, ctx1, ctx2, ctx3], [h0, h1, h2, h3])
    return _result(
        "lemma42_pair",
        registry,
        [p0, p1, aux2, aux3],
        ["psi0", "psi1", "box_psi1", "box_phi_or_psi0"],
    )


def prop47_xi(theory, delta, psis, x, registry):
    """xi_i = psi_i | exists v (delta(v) & forall y < v ~prf(c, y)), where c
    codes the disjunction box xi_0 | ... | box xi_{k-1}."""
    _check_delta(delta, x)
    for p in psis:
        if not is_sentence(p):
            raise ValueError("psi parameters must be sentences")
    k = len(psis)
    if k == 0:
        raise ValueError("need at least one sentence")
    holes = _placeholders(k + 1, delta, *psis)
    yv = FreshVars(delta, *psis, *holes).take()
    race = Exists(x, And(delta, BForall(yv, x, Not(PrfAtom(theory, holes[k], yv)))))
    ctxs = [Or(p, race) for p in psis]
    dis = Box(ctxs[k - 1])
    for i in range(k - 2, -1, -1):
        dis = Or(Box(ctxs[i]), dis)
    out = fixed_points(registry, ctxs + [dis], holes)
    names = [f"xi{i}" for i in range(k)] + ["box_disjunction"]
    return _result("prop47_xi", registry, out, names)


def wmt_instance(phi_x, x, e, registry):
    """The mechanistic-thesis schema for phi, plus its specialization at
    r.e. index e: box phi(x) holds exactly of the members of W_e."""
    fv = free_vars(phi_x)
    if fv - {x}:
        raise ValueError(f"phi may only use the variable {x.name}")
    yv = FreshVars(phi_x).take()
    schema = Exists(yv, Forall(x, Iff(Box(phi_x), InWAtom(x, yv))))
    special = Forall(x, Iff(Box(phi_x), InWAtom(x, NumLit(e))))
    codes = (registry.code_of(schema), registry.code_of(special))
    return GalleryResult(
        "wmt_instance",
        (schema, special),
        codes,
        {"schema": codes[0], "special": codes[1]},
    )


def build(kind, **params):
    """Dispatch a gallery construction by tag."""
    if kind not in GALLERY_KINDS:
        raise ValueError(f"unknown gallery kind {kind!r}")
    return globals()[kind](**params)


# ----------------------------------------------------------- DP/DC audits


@dataclass(frozen=True)
class AuditVerdict:
    verdict: str  # left | right | satisfied | candidate | unknown
    detail: str = ""


def check_dp(theory, phi, psi, store, registry, budget):
    """Budgeted disjunction-property probe: given that the store proves
    phi | psi, which disjunct does it prove?"""
    from .kernel import check_proof, handle_for
    from .proofs import AxiomStep, MPStep, Proof, ProofLine
    from .syntax import Imp

    dis_code = registry.lookup(Or(phi, psi))
    if dis_code is None or store.find_proof(theory, dis_code, budget) is None:
        return AuditVerdict("unknown", "no recorded proof of the disjunction")
    fcode = registry.lookup(phi)
    if fcode is not None and store.find_proof(theory, fcode, budget) is not None:
        return AuditVerdict("left", f"proof of the left disjunct at code {fcode}")
    gcode = registry.lookup(psi)
    if gcode is not None and store.find_proof(theory, gcode, budget) is not None:
        return AuditVerdict("right", f"proof of the right disjunct at code {gcode}")
    if phi == psi:
        pcode = store.find_proof(theory, dis_code, budget)
        base = registry.decode(pcode)
        taut = ProofLine(Imp(Or(phi, phi), phi), AxiomStep("taut"))
        ext = Proof(
            base.lines
            + (taut, ProofLine(phi, MPStep(len(base.lines), len(base.lines) - 1)))
        )
        if check_proof(handle_for(theory), ext, store=store, registry=registry).ok:
            return AuditVerdict("left", "derived from the recorded self-disjunction")
    return AuditVerdict(
        "candidate",
        "disjunction recorded but neither disjunct found at this budget",
    )


def check_dc(theory, phi, store, registry, budget):
    """Budgeted disjunctive-correctness probe with the right disjunct fixed
    to the provability assertion for phi."""
    fcode = registry.lookup(phi)
    if fcode is not None and store.find_proof(theory, fcode, budget) is not None:
        return AuditVerdict("satisfied", f"proof of the sentence at code {fcode}")
    pr = pr_sentence(theory, phi, registry)
    dcode = registry.lookup(Or(phi, pr))
    if dcode is not None and store.find_proof(theory, dcode, budget) is not None:
        return AuditVerdict(
            "unknown",
            "the disjunction with its provability assertion is recorded, "
            "but no proof of the sentence was found at this budget",
        )
    return AuditVerdict("unknown", "no relevant record in the store")


def pr_sentence(theory, phi, registry):
    """PR applied to the code of phi: exists y prf(code, y)."""
    y = FreshVars(phi).take()
    return Exists(y, PrfAtom(theory, NumLit(registry.code_of(phi)), y))
