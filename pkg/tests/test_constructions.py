import pytest

from boxarith.classes import Cls, classify
from boxarith.coding import CodeRegistry
from boxarith.constructions import (
    build,
    check_dc,
    check_dp,
    godel_sentence,
    lemma42_pair,
    pr_sentence,
    prop44_pair,
    prop47_xi,
    prop52_sigma,
    thm56_psi,
    wmt_instance,
)
from boxarith.kernel import TheoremStore
from boxarith.proofs import AxiomStep, NecStep, Proof, ProofLine
from boxarith.semantics import TV, WFamily, eval_sentence, prov_model, triv_model
from boxarith.synth import ProofBuilder
from boxarith.syntax import (
    Box,
    NumLit,
    Or,
    TheoryId,
    Var,
    parse,
    print_formula,
    substitute,
)

K = TheoryId("k")
K4 = TheoryId("k4")
x = Var("x")

FALSE_DELTA = parse("(x=S(0) & bot)")  # the chosen always-false delta shape


def test_godel_sentence_code_equation():
    reg = CodeRegistry()
    res = godel_sentence(K4, reg)
    psi = res.sentences[0]
    c = res.crossrefs["psi"]
    assert reg.code_of(psi) == c
    assert psi == parse(f"~exists y prf[k4](#{c},y)")
    assert res.kind == "godel_sentence"


def test_thm56_shape():
    reg = CodeRegistry()
    res = thm56_psi(K, parse("box (x=x)"), x, reg)
    psi = res.sentences[0]
    c = res.crossrefs["psi"]
    want = parse(f"exists x ((box box (x=x)) & forall v1 < x ~prf[k](#{c},v1))")
    assert psi == want
    assert Cls.SIGMA_B in classify(psi)


def test_prop44_pair_shapes_and_classes():
    reg = CodeRegistry()
    res = prop44_pair(K, FALSE_DELTA, x, reg)
    s0, s1, aux = res.sentences
    c1 = res.crossrefs["sigma1"]
    c2 = res.crossrefs["box_sigma0"]
    # the first bullet: exists x ((delta | prf(c1,x)) & forall y<x ~prf(c2,y))
    want0 = parse(
        f"exists x (((x=S(0) & bot) | prf[k](#{c1},x)) & forall v3 < x ~prf[k](#{c2},v3))"
    )
    assert s0 == want0
    # the second bullet uses the inclusive bound, rendered v < S(y)
    want1 = parse(
        f"exists v3 (prf[k](#{c2},v3) & forall x < S(v3) (~(x=S(0) & bot) & ~prf[k](#{c1},x)))"
    )
    assert s1 == want1
    assert aux == Box(s0)
    assert reg.code_of(aux) == c2
    assert Cls.SIGMA1 in classify(s0) and Cls.SIGMA1 in classify(s1)


def test_lemma42_pair_cross_reference_audit():
    reg = CodeRegistry()
    res = lemma42_pair(K, FALSE_DELTA, parse("0=0"), x, reg)
    p0, p1, aux2, aux3 = res.sentences
    assert Cls.SIGMA1 in classify(p0) and Cls.SIGMA1 in classify(p1)
    assert aux2 == Box(p1)
    assert aux3 == Box(Or(parse("0=0"), p0))
    assert reg.code_of(aux2) == res.crossrefs["box_psi1"]
    assert reg.code_of(aux3) == res.crossrefs["box_phi_or_psi0"]
    # the codes embedded inside p0 are exactly these two
    txt = print_formula(p0)
    assert f"#{res.crossrefs['box_psi1']}" in txt
    assert f"#{res.crossrefs['box_phi_or_psi0']}" in txt


def test_prop52_sigma_races_its_own_disjunction():
    reg = CodeRegistry()
    res = prop52_sigma(K, parse("box (0=0)"), FALSE_DELTA, x, reg)
    sigma, dis = res.sentences
    assert dis == Or(parse("box (0=0)"), sigma)
    assert f"#{res.crossrefs['phi_or_sigma']}" in print_formula(sigma)


def test_prop47_xi_disjunction_aux():
    reg = CodeRegistry()
    res = prop47_xi(K, FALSE_DELTA, [parse("box bot"), parse("box (0=0)")], x, reg)
    xi0, xi1, aux = res.sentences
    assert aux == Or(Box(xi0), Box(xi1))
    assert isinstance(xi0, Or) and xi0.left == parse("box bot")


def test_wmt_instance_shapes():
    reg = CodeRegistry()
    res = wmt_instance(parse("x=x"), x, 7, reg)
    schema, special = res.sentences
    assert schema == parse("exists v0 forall x (box (x=x) <-> inW(x,v0))")
    assert special == parse("forall x (box (x=x) <-> inW(x,#7))")


def test_wmt_instance_soundness_reading():
    # with W_e wired to the provability reading, the specialization is
    # true in the prov model on a budgeted range
    reg = CodeRegistry()
    store = TheoremStore()
    thy = K
    # record #n=#n for n <= 5
    for n in range(6):
        p = Proof((ProofLine(parse(f"#{n}=#{n}"), AxiomStep("lit")),))
        store.record(thy, p, reg)
    res = wmt_instance(parse("x=x"), x, 3, reg)
    special = res.sentences[1]
    fam = WFamily()

    def member(n, budget):
        code = reg.lookup(parse(f"#{n}=#{n}"))
        return code is not None and store.find_proof(thy, code, budget) is not None

    fam.register(3, member)
    m = prov_model(thy, store, reg, budget=len(reg) + 8, assignment={}, w_family=fam)
    # every recorded instance matches: box side true iff member certified
    body = special.body
    for n in range(6):
        inst = substitute(body, x, NumLit(n))
        assert eval_sentence(inst, m) is TV.TRUE


def test_build_dispatch_and_validation():
    reg = CodeRegistry()
    res = build("godel_sentence", theory=K, registry=reg)
    assert res.kind == "godel_sentence"
    with pytest.raises(ValueError):
        build("nonsense", registry=reg)
    with pytest.raises(ValueError):
        prop44_pair(K, parse("exists y (y=x)"), x, reg)  # delta not Delta0
    with pytest.raises(ValueError):
        thm56_psi(K, parse("(x=y)"), x, reg)  # stray free variable


# --------------------------------------------------------- DP/DC audits


def _store_with(reg, store, thy, *sentences):
    for s in sentences:
        pb = ProofBuilder()
        i = pb.ax("lit", parse("0=0"))
        i = pb.taut_mp(s, [i]) if s != parse("0=0") else i
        store.record(thy, pb.proof(i), reg)


def test_check_dp_ver_phenomenon():
    # the store proves box bot (Ver axiom) and records the disjunction
    # box bot | bot: the left disjunct is found, and the box-elimination
    # audit fails, which is exactly the advertised failure of MDP for Ver
    reg = CodeRegistry()
    store = TheoremStore()
    ver = TheoryId("ver")
    pb = ProofBuilder()
    i = pb.ax("ver", parse("box bot"))
    store.record(ver, pb.proof(i), reg)
    pb2 = ProofBuilder()
    i2 = pb2.ax("ver", parse("box bot"))
    i2 = pb2.taut_mp(parse("(box bot | bot)"), [i2])
    store.record(ver, pb2.proof(i2), reg)
    v = check_dp(ver, parse("box bot"), parse("bot"), store, reg, budget=99)
    assert v.verdict == "left"
    assert store.box_elim_violations(ver, reg) != []


def test_check_dp_trivial_and_unknown():
    reg = CodeRegistry()
    store = TheoremStore()
    phi = parse("(0=0 | bot)")
    # empty store: unknown
    assert check_dp(K, phi, phi, store, reg, budget=9).verdict == "unknown"
    # record only the self-disjunction phi | phi; left is derived
    pb = ProofBuilder()
    i = pb.ax("lit", parse("0=0"))
    i = pb.taut_mp(phi, [i])
    i = pb.taut_mp(Or(phi, phi), [i])
    store.record(K, pb.proof(i), reg)
    v = check_dp(K, phi, phi, store, reg, budget=99)
    assert v.verdict == "left"


def test_check_dp_candidate():
    from boxarith.proofs import ExtraStep

    reg = CodeRegistry()
    store = TheoremStore()
    a, b = parse("box bot"), parse("box (0=S(0))")
    thy = TheoryId("k", (Or(a, b),))
    store.record(thy, Proof((ProofLine(Or(a, b), ExtraStep(0)),)), reg)
    v = check_dp(thy, a, b, store, reg, budget=99)
    assert v.verdict == "candidate"


def test_check_dc_contract_examples():
    reg = CodeRegistry()
    store = TheoremStore()
    phi = parse("(0=0 | box bot)")
    _store_with(reg, store, K, phi)
    assert check_dc(K, phi, store, reg, budget=99).verdict == "satisfied"
    # only the disjunction with the provability assertion recorded
    reg2 = CodeRegistry()
    store2 = TheoremStore()
    psi = parse("box bot")
    pr = pr_sentence(K, psi, reg2)
    thy = TheoryId("k", (Or(psi, pr),))
    from boxarith.proofs import ExtraStep

    store2.record(thy, Proof((ProofLine(Or(psi, pr), ExtraStep(0)),)), reg2)
    assert check_dc(thy, psi, store2, reg2, budget=99).verdict == "unknown"
    assert check_dc(K, parse("bot"), TheoremStore(), reg, budget=9).verdict == "unknown"


def test_prop52_rosser_race_evaluation():
    # once phi | sigma is recorded, the dual race sentence is evaluator-true
    # and sigma itself cannot evaluate true
    reg = CodeRegistry()
    store = TheoremStore()
    phi = parse("box (0=0)")
    res = prop52_sigma(K, phi, FALSE_DELTA, x, reg)
    sigma, dis = res.sentences
    # record box(0=0) and then the disjunction
    pb = ProofBuilder()
    i = pb.ax("lit", parse("0=0"))
    i = pb.add(parse("box (0=0)"), NecStep(i))
    store.record(K, pb.proof(i), reg)
    pb2 = ProofBuilder()
    i2 = pb2.ax("lit", parse("0=0"))
    i2 = pb2.add(parse("box (0=0)"), NecStep(i2))
    i2 = pb2.taut_mp(dis, [i2])
    fcode, pcode = store.record(K, pb2.proof(i2), reg)
    m = triv_model(max(64, len(reg) + 8), registry=reg, store=store)
    assert eval_sentence(sigma, m) is not TV.TRUE
    yv = Var("y")
    dual = parse(
        f"exists y (prf[k](#{fcode},y) & forall x < S(y) ~(x=S(0) & bot))"
    )
    assert eval_sentence(dual, m) is TV.TRUE


def test_lemma42_evaluation_level_implication(rng):
    # scenario 1: the Sigma1 trigger exists x delta(x) is true, so the race
    # inside psi0 fires on the delta side before any proof appears
    reg = CodeRegistry()
    store = TheoremStore()
    delta = parse("x=#2")
    res = lemma42_pair(K, delta, parse("0=0"), x, reg)
    p0, p1, _, _ = res.sentences
    m = prov_model(K, store, reg, budget=max(64, len(reg) + 8))
    assert eval_sentence(parse("exists x (x=#2)"), m) is TV.TRUE
    assert eval_sentence(Or(p0, p1), m) is TV.TRUE

    # scenario 2: delta never fires, but recording a proof of the raced
    # sentence box (phi | psi0) makes psi1 come true at its proof index
    reg2 = CodeRegistry()
    store2 = TheoremStore()
    res2 = lemma42_pair(K, FALSE_DELTA, parse("0=0"), x, reg2)
    q0, q1, _, aux3 = res2.sentences
    pb = ProofBuilder()
    i = pb.ax("lit", parse("0=0"))
    i = pb.taut_mp(Or(parse("0=0"), q0), [i])
    i = pb.add(aux3, NecStep(i))
    store2.record(K, pb.proof(i), reg2)
    store2.nec_close(K, reg2)
    m2 = prov_model(K, store2, reg2, budget=len(reg2) + 16)
    assert eval_sentence(q1, m2) is TV.TRUE
    assert eval_sentence(Or(q0, q1), m2) is TV.TRUE
