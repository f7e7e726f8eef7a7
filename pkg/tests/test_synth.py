import warnings

import pytest

from boxarith.classes import Cls, classify
from boxarith.coding import CodeRegistry, eval_term
from boxarith.kernel import TheoremStore, check_proof, handle_for, theory_plus
from boxarith.proofs import (
    AxiomStep,
    ExtraStep,
    GenStep,
    NecStep,
    Proof,
    ProofLine,
)
from boxarith.semantics import TV, eval_sentence, triv_model
from boxarith.synth import (
    InconsistencyWarning,
    ProofBuilder,
    SynthesisError,
    boxed_deduction,
    conj_of,
    extract_from_star_minus,
    prove_term_eq,
    prove_true_sigma1,
    prove_true_sigma_b,
    rho_certified,
    star_minus_target,
)
from boxarith.syntax import (
    And,
    Box,
    Imp,
    Or,
    TheoryId,
    Var,
    parse,
    parse_term,
    print_formula,
)

from conftest import gen_sigma1, gen_term

K = TheoryId("k")
K4 = TheoryId("k4")
hK = handle_for(K)
hK4 = handle_for(K4)


# ------------------------------------------------------- prove_term_eq


def test_prove_term_eq_examples():
    n, p = prove_term_eq(parse_term("(S(0)+S(0))"))
    assert n == 2 and check_proof(hK, p).ok
    assert p.conclusion == parse("(S(0)+S(0))=#2")
    n, p = prove_term_eq(parse_term("0"))
    assert n == 0 and len(p) == 1 and check_proof(hK, p).ok
    n, p = prove_term_eq(parse_term("(#3*#2)"))
    assert n == 6 and check_proof(hK, p).ok


def test_prove_term_eq_random(rng):
    for _ in range(120):
        t = gen_term(rng, [], rng.randrange(0, 4))
        n, p = prove_term_eq(t)
        assert n == eval_term(t)
        assert check_proof(hK, p).ok
        assert p.conclusion.right.value == n


# ---------------------------------------------------- prove_true_sigma1


def test_sigma1_contract_examples():
    p = prove_true_sigma1(parse("exists y ((S(0)+S(y))=S(S(S(0))))"), budget=16)
    assert p is not None and check_proof(hK, p).ok
    p = prove_true_sigma1(parse("0=0"))
    assert p is not None and check_proof(hK, p).ok
    assert prove_true_sigma1(parse("0=S(0)")) is None


def test_sigma1_completeness_at_budget(rng):
    hits = 0
    for _ in range(150):
        phi = gen_sigma1(rng, [], rng.randrange(0, 4))
        truth = eval_sentence(phi, triv_model(50))
        p = prove_true_sigma1(phi, budget=50)
        if truth is TV.TRUE:
            assert p is not None, print_formula(phi)
            assert check_proof(hK, p).ok
            assert p.conclusion == phi
            hits += 1
        else:
            assert p is None
    assert hits > 30  # the generator produces plenty of true sentences


def test_sigma1_rejects_non_sigma1():
    with pytest.raises(SynthesisError):
        prove_true_sigma1(parse("box (0=0)"))
    with pytest.raises(SynthesisError):
        prove_true_sigma1(parse("x=x"))


# --------------------------------------------------- prove_true_sigma_b


def _seeded_world(nec_depth=2):
    reg = CodeRegistry()
    store = TheoremStore()
    pool = [parse("0=0"), parse("(0=0 | bot)"), parse("forall x (x=x)")]
    for phi in pool:
        if phi == parse("forall x (x=x)"):
            p = Proof(
                (
                    ProofLine(parse("x=x"), AxiomStep("refl")),
                    ProofLine(phi, GenStep(0, Var("x"))),
                )
            )
        else:
            pb = ProofBuilder()
            i = pb.ax("lit", parse("0=0"))
            if phi != parse("0=0"):
                i = pb.taut_mp(phi, [i])
            p = pb.proof(i)
        store.record(K, p, reg)
    if nec_depth:
        store.nec_close(K, reg, depth=nec_depth)
    return reg, store, pool


def test_sigma_b_contract_examples():
    reg, store, _ = _seeded_world()
    phi = parse("box (0=0)")
    p = prove_true_sigma_b(phi, K, store, reg)
    assert p is not None and check_proof(hK, p, store=store, registry=reg).ok
    assert any(ln.just.__class__.__name__ == "CiteStep" for ln in p.lines)
    p2 = prove_true_sigma_b(parse("(exists x (x=#2) | box bot)"), K, store, reg, budget=16)
    assert p2 is not None and check_proof(hK, p2, store=store, registry=reg).ok
    assert prove_true_sigma_b(parse("box bot"), K, TheoremStore(), reg) is None


def test_sigma_b_matches_certification(rng):
    from conftest import gen_sigma_b_sentence

    reg, store, pool = _seeded_world()
    box_pool = pool + [parse("bot"), parse("0=S(0)"), parse("box (0=0)")]
    agree = 0
    for _ in range(100):
        phi = gen_sigma_b_sentence(rng, rng.randrange(0, 4), box_pool=box_pool)
        cert = rho_certified(phi, K, store, reg, 48)
        p = prove_true_sigma_b(phi, K, store, reg, budget=48)
        assert (p is not None) == cert, print_formula(phi)
        if p is not None:
            assert check_proof(hK, p, store=store, registry=reg).ok
            assert p.conclusion == phi
            agree += 1
    assert agree > 10


# ------------------------------------------------------ boxed_deduction


def test_boxed_deduction_contract_examples():
    xs = [parse("box bot")]
    p = Proof(
        (
            ProofLine(parse("box bot"), ExtraStep(0)),
            ProofLine(parse("box box bot"), NecStep(0)),
        )
    )
    out = boxed_deduction(hK4, xs, p)
    assert out.conclusion == parse("(box bot -> box box bot)")
    assert check_proof(hK4, out).ok
    p_id = Proof((ProofLine(parse("0=0"), AxiomStep("lit")),))
    assert boxed_deduction(hK4, [], p_id) is p_id


def test_boxed_deduction_disjunctive_hypothesis():
    xs = [parse("(box (0=0) | box bot)")]
    p = Proof(
        (
            ProofLine(xs[0], ExtraStep(0)),
            ProofLine(Box(xs[0]), NecStep(0)),
        )
    )
    out = boxed_deduction(hK4, xs, p)
    assert check_proof(hK4, out).ok
    assert out.conclusion == Imp(xs[0], Box(xs[0]))


def test_boxed_deduction_rejects_outside_fragment():
    with pytest.raises(SynthesisError):
        boxed_deduction(hK4, [parse("~box bot")], Proof((ProofLine(parse("~box bot"), ExtraStep(0)),)))
    with pytest.raises(SynthesisError):
        boxed_deduction(hK4, [parse("x=x")], Proof((ProofLine(parse("x=x"), ExtraStep(0)),)))


def _random_ext_proof(rng, handle, xs):
    """A random derivation in T+X touching MP, Gen, and Nec."""
    ext = handle_for(theory_plus(handle.id, xs))
    pb = ProofBuilder()
    derived = []
    for i, s in enumerate(sorted(set(xs), key=print_formula)):
        derived.append(pb.add(s, ExtraStep(len(handle.extras) + i)))
    derived.append(pb.ax("lit", parse("0=0")))
    derived.append(pb.ax("refl", parse("x=x")))
    for _ in range(rng.randrange(2, 7)):
        roll = rng.random()
        src = rng.choice(derived)
        f = pb.formula(src)
        if roll < 0.4:
            derived.append(pb.add(Box(f), NecStep(src)))
        elif roll < 0.6:
            derived.append(pb.add(parse(f"forall z {f!r}"), GenStep(src, Var("z"))))
        elif roll < 0.8 and len(derived) >= 2:
            other = pb.formula(rng.choice(derived))
            derived.append(pb.taut_mp(Or(f, other), [src]))
        else:
            derived.append(pb.taut_mp(And(f, f), [src, src]))
    p = pb.proof(derived[-1])
    assert check_proof(ext, p).ok
    return p


def test_boxed_deduction_random(rng):
    pool = [
        parse("box bot"),
        parse("box (0=0)"),
        parse("(box bot | box forall x (x=x))"),
        parse("(box (0=0) & box box bot)"),
    ]
    for _ in range(60):
        xs = rng.sample(pool, rng.randrange(1, 4))
        p = _random_ext_proof(rng, hK4, xs)
        out = boxed_deduction(hK4, xs, p)
        assert check_proof(hK4, out).ok
        want = Imp(conj_of(sorted(set(xs), key=print_formula)), p.conclusion)
        assert out.conclusion == want


def test_disjunctive_split_mechanism():
    """The two-theory split: from a derivation under the hypothesis
    box a | box b, boxed deduction yields the implication, and each of the
    theories with box a (resp. box b) as an axiom re-derives the conclusion
    by one tautology and modus ponens."""
    a, b = parse("0=0"), parse("bot")
    hyp = Or(Box(a), Box(b))
    ext = handle_for(theory_plus(K4, [hyp]))
    # in T + {box a | box b}: derive box (a | b)
    pb = ProofBuilder()
    h = pb.add(hyp, ExtraStep(0))
    ta = pb.taut(Imp(a, Or(a, b)))
    na = pb.add(Box(Imp(a, Or(a, b))), NecStep(ta))
    ka = pb.ax("k", Imp(Box(Imp(a, Or(a, b))), Imp(Box(a), Box(Or(a, b)))))
    ma = pb.mp(ka, na)
    tb = pb.taut(Imp(b, Or(a, b)))
    nb = pb.add(Box(Imp(b, Or(a, b))), NecStep(tb))
    kb = pb.ax("k", Imp(Box(Imp(b, Or(a, b))), Imp(Box(b), Box(Or(a, b)))))
    mb = pb.mp(kb, nb)
    goal = Box(Or(a, b))
    end = pb.taut_mp(goal, [h, ma, mb])
    p = pb.proof(end)
    assert check_proof(ext, p).ok
    out = boxed_deduction(hK4, [hyp], p)
    assert out.conclusion == Imp(hyp, goal)
    assert check_proof(hK4, out).ok
    # each split theory discharges the hypothesis from its own axiom
    for side in (Box(a), Box(b)):
        ti = handle_for(theory_plus(K4, [side]))
        pb2 = ProofBuilder()
        ax = pb2.add(side, ExtraStep(len(hK4.extras) + 0))
        intro = pb2.taut_mp(hyp, [ax])
        imp = pb2.merge(out)
        final = pb2.mp(imp, intro)
        full = pb2.proof(final)
        assert full.conclusion == goal
        assert check_proof(ti, full).ok


def test_boxed_deduction_round_trip():
    # with a proof of the conjunction available, modus ponens re-derives phi
    xs = [parse("box bot")]
    p = Proof(
        (
            ProofLine(parse("box bot"), ExtraStep(0)),
            ProofLine(parse("box box bot"), NecStep(0)),
        )
    )
    out = boxed_deduction(hK4, xs, p)
    back = handle_for(TheoryId("k4", (parse("box bot"),)))
    pb = ProofBuilder()
    end = pb.merge(out)
    chi = pb.add(parse("box bot"), ExtraStep(0))
    final = pb.mp(end, chi)
    full = pb.proof(final)
    assert check_proof(back, full).ok
    assert full.conclusion == parse("box box bot")


# ------------------------------------------- extract_from_star_minus


def test_extract_contract_examples(rng):
    reg = CodeRegistry()
    store = TheoremStore()
    p0 = Proof(
        (
            ProofLine(parse("0=0"), AxiomStep("lit")),
            ProofLine(parse("box (0=0)"), NecStep(0)),
        )
    )
    # box psi: the given proof comes back
    got = extract_from_star_minus(hK, parse("box (0=0)"), [], p0, registry=reg, store=store)
    assert got is not None and got.conclusion == parse("box (0=0)")
    # plain Delta0: synthesized
    got2 = extract_from_star_minus(hK, parse("0=0"), [], p0, registry=reg, store=store)
    assert got2 is not None and got2.conclusion == parse("0=0")
    assert check_proof(hK, got2, registry=reg, store=store).ok


def _provable_pool():
    return [parse("0=0"), parse("(0=0 | bot)"), parse("~(0=S(0))"), parse("#2=#2")]


def _gen_true_delta_b(rng, depth, pool):
    """A Delta(B) sentence that is true when every box body is provable."""
    if depth <= 0:
        if rng.random() < 0.5:
            return Box(rng.choice(pool))
        return rng.choice([parse("0=0"), parse("#1<#3"), parse("~(#2=#5)")])
    roll = rng.random()
    if roll < 0.3:
        return Box(rng.choice(pool))
    if roll < 0.55:
        return And(_gen_true_delta_b(rng, depth - 1, pool), _gen_true_delta_b(rng, depth - 1, pool))
    if roll < 0.75:
        side = _gen_true_delta_b(rng, depth - 1, pool)
        other = rng.choice([parse("bot"), parse("box bot"), _gen_true_delta_b(rng, depth - 1, pool)])
        return Or(side, other) if rng.random() < 0.5 else Or(other, side)
    from boxarith.syntax import BExists, BForall, NumLit

    v = Var("b")
    if roll < 0.9:
        return BForall(v, NumLit(rng.randrange(0, 3)), _gen_true_delta_b(rng, depth - 1, pool))
    return BExists(v, NumLit(rng.randrange(1, 4)), _gen_true_delta_b(rng, depth - 1, pool))


def _plan_witnesses(phi, reg):
    """Choose star witnesses making (phi*)^- provable; None if impossible."""
    from boxarith.classes import Cls as _C
    from boxarith.classes import classify as _cl
    from boxarith.semantics import decide_delta0
    from boxarith.syntax import BExists, BForall, NumLit, substitute

    if _C.DELTA0 in _cl(phi):
        return [] if decide_delta0(phi, reg) else None
    if isinstance(phi, Box):
        return [] if _is_provable_body(phi.body) else None
    if isinstance(phi, And):
        l = _plan_witnesses(phi.left, reg)
        r = _plan_witnesses(phi.right, reg) if l is not None else None
        return None if r is None else l + r
    if isinstance(phi, Or):
        l = _plan_witnesses(phi.left, reg)
        if l is not None:
            r0 = _zero_witnesses(phi.right)
            return l + r0 + [0]
        r = _plan_witnesses(phi.right, reg)
        if r is not None:
            l0 = _zero_witnesses(phi.left)
            return l0 + r + [1]
        return None
    if isinstance(phi, BForall):
        k = eval_term(phi.bound, {}, reg)
        out = []
        for m in range(k):
            w = _plan_witnesses(substitute(phi.body, phi.var, NumLit(m)), reg)
            if w is None:
                return None
            if m == 0:
                out = w
            # all iterations share one tuple of fresh variables; the star
            # transform quantifies them outside the bounded forall, so a
            # single instantiation must work for every m.  The generator
            # only puts variable-free bodies under bounded foralls, making
            # every m agree.
        return out if k else _zero_witnesses(phi.body)
    if isinstance(phi, BExists):
        k = eval_term(phi.bound, {}, reg)
        for m in range(k):
            w = _plan_witnesses(substitute(phi.body, phi.var, NumLit(m)), reg)
            if w is not None:
                return w + [m]
        return None
    return None


def _zero_witnesses(phi):
    from boxarith.classes import star

    return [0] * len(star(phi)[1])


def _is_provable_body(body):
    return body in _provable_pool()


def test_extract_random(rng):
    reg = CodeRegistry()
    store = TheoremStore()
    pool = _provable_pool()
    done = 0
    for _ in range(200):
        if done >= 60:
            break
        phi = _gen_true_delta_b(rng, rng.randrange(0, 3), pool)
        ps = _plan_witnesses(phi, reg)
        if ps is None:
            continue
        target = star_minus_target(phi, ps)
        inner = prove_true_sigma_b_inner(target.body, reg)
        if inner is None:
            continue
        pb = ProofBuilder()
        c = pb.merge(inner)
        n = pb.add(target, NecStep(c))
        q = pb.proof(n)
        assert check_proof(hK, q, registry=reg, store=store).ok
        got = extract_from_star_minus(hK, phi, ps, q, registry=reg, store=store, budget=32)
        assert got is not None, print_formula(phi)
        assert got.conclusion == phi
        assert check_proof(hK, got, registry=reg, store=store).ok
        done += 1
    assert done >= 40


def prove_true_sigma_b_inner(psi, reg):
    """Prove the instantiated (phi*)^-: it is Sigma1-free of boxes except
    for bodies from the provable pool, so sigma1 synthesis plus taut/Nec
    machinery suffices after replacing box leaves by their own proofs."""
    pb = ProofBuilder()

    def go(p):
        if isinstance(p, Box):
            sub = prove_true_sigma1(p.body, budget=16, registry=reg)
            if sub is None:
                return None
            i = pb.merge(sub)
            return pb.add(p, NecStep(i))
        if Cls.SIGMA1 in classify(p):
            sub = prove_true_sigma1(p, budget=16, registry=reg)
            return None if sub is None else pb.merge(sub)
        if isinstance(p, And):
            l = go(p.left)
            r = go(p.right) if l is not None else None
            return None if r is None else pb.taut_mp(p, [l, r])
        if isinstance(p, Or):
            l = go(p.left)
            if l is not None:
                return pb.taut_mp(p, [l])
            r = go(p.right)
            return None if r is None else pb.taut_mp(p, [r])
        from boxarith.syntax import BExists, BForall, NumLit, substitute

        if isinstance(p, BForall):
            from boxarith.synth import _bforall_intro, _term_eq

            k = eval_term(p.bound, {}, reg)
            idxs = []
            for m in range(k):
                i = go(substitute(p.body, p.var, NumLit(m)))
                if i is None:
                    return None
                idxs.append(i)
            _, teq = _term_eq(pb, p.bound, reg)
            return _bforall_intro(pb, p, k, teq, idxs)
        if isinstance(p, BExists):
            from boxarith.synth import _bexists_intro

            k = eval_term(p.bound, {}, reg)
            for m in range(k):
                i = go(substitute(p.body, p.var, NumLit(m)))
                if i is not None:
                    return _bexists_intro(pb, p, m, i)
            return None
        return None

    idx = go(psi)
    return None if idx is None else pb.proof(idx)


def test_extract_bounded_with_variable_bodies():
    """Bounded quantifiers whose bodies genuinely use the bound variable:
    every instance is recovered separately and reassembled."""
    reg = CodeRegistry()
    store = TheoremStore()
    phi = parse("forall x < #2 box (x=x)")
    target = star_minus_target(phi, [])
    assert target == parse("box forall x < #2 (x=x)")
    inner = prove_true_sigma1(target.body, budget=8, registry=reg)
    pb = ProofBuilder()
    q = pb.proof(pb.add(target, NecStep(pb.merge(inner))))
    got = extract_from_star_minus(hK, phi, [], q, registry=reg, store=store)
    assert got is not None and got.conclusion == phi
    assert check_proof(hK, got, registry=reg, store=store).ok

    phi2 = parse("exists x < #3 box (x=#1)")
    target2 = star_minus_target(phi2, [1])
    inner2 = prove_true_sigma1(target2.body, budget=8, registry=reg)
    pb2 = ProofBuilder()
    q2 = pb2.proof(pb2.add(target2, NecStep(pb2.merge(inner2))))
    got2 = extract_from_star_minus(hK, phi2, [1], q2, registry=reg, store=store)
    assert got2 is not None and got2.conclusion == phi2
    assert check_proof(hK, got2, registry=reg, store=store).ok


def test_extract_inconsistency_warning():
    reg = CodeRegistry()
    phi = parse("(0=S(0) | box bot)")
    target = star_minus_target(phi, [0])
    thy = TheoryId("k", (target,))
    q = Proof((ProofLine(target, ExtraStep(0)),))
    with warnings.catch_warnings(record=True) as caught:
        warnings.simplefilter("always")
        got = extract_from_star_minus(handle_for(thy), phi, [0], q, registry=reg)
    assert got is None
    assert any(isinstance(w.message, InconsistencyWarning) for w in caught)


def test_extract_validates_the_given_proof():
    reg = CodeRegistry()
    p0 = Proof((ProofLine(parse("0=0"), AxiomStep("lit")),))
    with pytest.raises(SynthesisError):
        extract_from_star_minus(hK, parse("box (0=0)"), [], p0, registry=reg)
    with pytest.raises(SynthesisError):
        extract_from_star_minus(hK, parse("box (0=0)"), [3], p0, registry=reg)
