"""The boxarith command line: a thin adapter over the library modules.

State lives in two files: the registry journal (codes of formulas and
proofs) and the theorem store (recorded theorems per theory).  Commands
that touch the registry re-save the journal, so codes are stable across
runs; the store is written under an exclusive file lock.

Output is deterministic given the same arguments and state files.  With
--format records every command emits flat key=value lines.
"""

from __future__ import annotations

import argparse
import fcntl
import os
import sys

from . import classes, constructions, kernel, modalprop, semantics, synth, translate
from .coding import CodeRegistry, EvalError, RegistryError, UnboundCodeError, fixed_points
from .kernel import StoreError
from .proofs import proof_from_text, proof_to_text
from .synth import SynthesisError
from .syntax import (
    Bot,
    Box,
    CaptureError,
    Or,
    SyntaxError_,
    Var,
    parse,
    parse_theory,
    print_formula,
)


class CliError(Exception):
    pass


def _load_registry(path):
    if path and os.path.exists(path):
        return CodeRegistry.load(path)
    return CodeRegistry()


def _load_store(path, registry):
    if path and os.path.exists(path):
        return kernel.TheoremStore.load(path, registry)
    return kernel.TheoremStore()


def _save_state(args, registry, store):
    if args.journal:
        registry.save(args.journal)
    if args.store and store is not None:
        with open(args.store + ".lock", "w") as lk:
            fcntl.flock(lk, fcntl.LOCK_EX)
            try:
                store.save(args.store)
            finally:
                fcntl.flock(lk, fcntl.LOCK_UN)


class Out:
    def __init__(self, fmt):
        self.fmt = fmt

    def emit(self, key, value):
        if self.fmt == "records":
            print(f"{key}={value}")
        else:
            print(value)

    def record_only(self, key, value):
        if self.fmt == "records":
            print(f"{key}={value}")


def _theory(args):
    return parse_theory(args.theory)


def cmd_classify(args, out):
    c = classes.classify(parse(args.formula))
    names = c.names()
    out.emit("classes", ",".join(names) if names else "none")
    return 0


def cmd_normalize(args, out):
    phi = parse(args.formula)
    if args.rule == "possigma1":
        out.emit("result", print_formula(classes.positive_sigma1_form(phi)))
    elif args.rule == "s2d":
        v, psi = classes.sigma_b_to_exists_delta_b(phi)
        out.record_only("var", v.name)
        if out.fmt == "records":
            print(f"result={print_formula(psi)}")
        else:
            print(f"{v.name}\t{print_formula(psi)}")
    elif args.rule == "boxes":
        registry = _load_registry(args.journal)
        parts = classes.delta_b_sentence_to_boxes(phi, registry)
        if not parts:
            result = Bot()
        else:
            result = Box(parts[-1])
            for p in reversed(parts[:-1]):
                result = Or(Box(p), result)
        out.record_only("k", len(parts))
        out.emit("result", print_formula(result))
    elif args.rule == "minus":
        out.emit("result", print_formula(classes.minus(phi)))
    elif args.rule == "star":
        psi, fresh = classes.star(phi)
        out.record_only("fresh", ",".join(v.name for v in fresh))
        if out.fmt == "records":
            print(f"result={print_formula(psi)}")
        else:
            print(f"{','.join(v.name for v in fresh) or '-'}\t{print_formula(psi)}")
    return 0


def cmd_translate(args, out):
    phi = parse(args.formula)
    if args.mode == "alpha":
        result = translate.alpha(phi)
    elif args.mode == "beta":
        result = translate.beta(phi)
    else:
        registry = _load_registry(args.journal)
        tag = {"pi": "pi", "piprime": "pi_prime", "rho": "rho"}[args.mode]
        result = translate.pr_translate(
            translate.PrVariant(tag, _theory(args)), phi, registry
        )
        _save_state(args, registry, None)
    out.emit("result", print_formula(result))
    return 0


def cmd_eval(args, out):
    registry = _load_registry(args.journal)
    store = _load_store(args.store, registry)
    if args.model == "prov":
        model = semantics.prov_model(_theory(args), store, registry, args.budget)
    elif args.model == "ver":
        model = semantics.ver_model(args.budget, registry=registry, store=store)
    else:
        model = semantics.triv_model(args.budget, registry=registry, store=store)
    v = semantics.eval_sentence(parse(args.formula), model)
    out.emit("value", v.value)
    return 0


def cmd_prove(args, out):
    registry = _load_registry(args.journal)
    store = _load_store(args.store, registry)
    phi = parse(args.formula)
    thy = _theory(args)
    c = classes.classify(phi)
    if classes.Cls.SIGMA1 in c:
        proof = synth.prove_true_sigma1(phi, args.budget, registry, store)
    elif classes.Cls.SIGMA_B in c:
        proof = synth.prove_true_sigma_b(phi, thy, store, registry, args.budget)
    else:
        raise CliError("prove handles Sigma1 and Sigma(B) sentences")
    if proof is None:
        out.emit("found", 0)
        return 1
    out.record_only("found", 1)
    out.record_only("lines", len(proof))
    if args.record:
        fcode, pcode = store.record(thy, proof, registry)
        out.record_only("formula_code", fcode)
        out.record_only("proof_code", pcode)
        _save_state(args, registry, store)
    if out.fmt == "text":
        print(proof_to_text(proof))
    return 0


def cmd_check(args, out):
    registry = _load_registry(args.journal)
    store = _load_store(args.store, registry)
    with open(args.proof) as fh:
        proof = proof_from_text(fh.read())
    handle = kernel.handle_for(_theory(args))
    res = kernel.check_proof(handle, proof, store=store, registry=registry)
    if res.ok:
        out.emit("ok", 1)
        out.record_only("conclusion", print_formula(proof.conclusion))
        return 0
    out.emit("ok", 0)
    out.record_only("line", res.line)
    out.record_only("reason", res.reason)
    if out.fmt == "text":
        print(f"rejected at line {res.line}: {res.reason}")
    return 1


def cmd_store(args, out):
    registry = _load_registry(args.journal)
    store = _load_store(args.store, registry)
    if args.action == "list":
        for thy in store.theories():
            for fcode, pcode in store.records(thy):
                if out.fmt == "records":
                    print(f"record={thy!r}:{fcode}:{pcode}")
                else:
                    print(f"{thy!r}\t{fcode}\t{pcode}\t{print_formula(registry.decode(fcode))}")
        out.record_only("nec_depth", store.nec_depth)
        out.record_only("box_elim_closed", int(store.box_elim_closed))
        return 0
    if args.action == "record":
        with open(args.proof) as fh:
            proof = proof_from_text(fh.read())
        fcode, pcode = store.record(_theory(args), proof, registry)
        out.emit("formula_code", fcode)
        out.record_only("proof_code", pcode)
        _save_state(args, registry, store)
        return 0
    if args.action == "nec-close":
        store.nec_close(_theory(args), registry, args.depth)
        out.emit("nec_depth", store.nec_depth)
        _save_state(args, registry, store)
        return 0
    if args.action == "audit-box-elim":
        bad = []
        for thy in store.theories():
            bad.extend(store.box_elim_violations(thy, registry))
        closed = store.box_elim_close(registry)
        out.emit("box_elim_closed", int(closed))
        for code in bad:
            out.record_only("violation", code)
            if out.fmt == "text":
                print(f"violation: {print_formula(registry.decode(code))}")
        _save_state(args, registry, store)
        return 0
    raise CliError(f"unknown store action {args.action!r}")


def cmd_diag(args, out):
    registry = _load_registry(args.journal)
    xs = [Var(v.strip()) for v in args.vars.split(",")] if args.vars else []
    phis = [parse(f) for f in args.formulas]
    sentences = fixed_points(registry, phis, xs)
    for i, s in enumerate(sentences):
        code = registry.code_of(s)
        if out.fmt == "records":
            print(f"code{i}={code}")
            print(f"sentence{i}={print_formula(s)}")
        else:
            print(f"#{code}\t{print_formula(s)}")
    _save_state(args, registry, None)
    return 0


def cmd_gallery(args, out):
    registry = _load_registry(args.journal)
    kind = args.kind
    params = {"registry": registry}
    if kind != "wmt_instance":
        params["theory"] = _theory(args)
    if kind in ("thm56_psi", "wmt_instance"):
        params["phi_x"] = parse(args.phi)
        params["x"] = Var(args.x)
    if kind in ("prop52_sigma", "lemma42_pair"):
        params["phi"] = parse(args.phi)
    if kind in ("prop52_sigma", "prop44_pair", "lemma42_pair", "prop47_xi"):
        params["delta"] = parse(args.delta)
        params["x"] = Var(args.x)
    if kind == "prop47_xi":
        params["psis"] = [parse(p) for p in args.psi]
    if kind == "wmt_instance":
        params["e"] = args.e
    result = constructions.build(kind, **params)
    for name, code in result.crossrefs.items():
        out.record_only(f"code_{name}", code)
    for i, s in enumerate(result.sentences):
        if out.fmt == "records":
            print(f"sentence{i}={print_formula(s)}")
        else:
            print(f"#{result.codes[i]}\t{print_formula(s)}")
    _save_state(args, registry, None)
    return 0


def cmd_audit_dp(args, out):
    registry = _load_registry(args.journal)
    store = _load_store(args.store, registry)
    v = constructions.check_dp(
        _theory(args), parse(args.phi), parse(args.psi), store, registry, args.budget
    )
    out.emit("verdict", v.verdict)
    out.record_only("detail", v.detail)
    return 0


def cmd_audit_dc(args, out):
    registry = _load_registry(args.journal)
    store = _load_store(args.store, registry)
    v = constructions.check_dc(_theory(args), parse(args.phi), store, registry, args.budget)
    out.emit("verdict", v.verdict)
    out.record_only("detail", v.detail)
    return 0


def cmd_decide(args, out):
    d = modalprop.decide(args.logic, modalprop.parse_prop(args.formula))
    out.emit("provable", int(d.provable))
    if d.countermodel is not None:
        model, w = d.countermodel
        out.record_only("root", w)
        out.record_only("worlds", len(model.worlds))
        out.record_only("rel", ";".join(f"{a}-{b}" for a, b in sorted(model.rel)))
        for i in model.worlds:
            out.record_only(f"val{i}", ",".join(sorted(model.val.get(i, ()))) or "-")
        if out.fmt == "text":
            print(f"countermodel: {len(model.worlds)} worlds, root {w}")
            print("  rel:", sorted(model.rel))
            for i in model.worlds:
                print(f"  w{i}:", sorted(model.val.get(i, ())))
    return 0


def cmd_scan_mdp(args, out):
    rep = modalprop.mdp_scan(args.logic, args.size, args.vars)
    out.record_only("formulas", rep.n_formulas)
    out.record_only("provable", rep.n_provable)
    out.emit("violations", rep.n_violations)
    out.record_only("exhaustive", int(rep.exhaustive))
    for a, b in rep.samples:
        line = f"{modalprop.print_prop(a)} ;; {modalprop.print_prop(b)}"
        if out.fmt == "records":
            print(f"sample={line}")
        else:
            print(f"  violation pair: {line}")
    return 0


def build_parser():
    ap = argparse.ArgumentParser(
        prog="boxarith",
        description="workbench for modal arithmetic: classes, normal forms, "
        "translations, fixed points, proofs, and modal deciders",
    )
    ap.add_argument("--journal", default=None, help="registry journal path")
    ap.add_argument(
        "--store",
        default=os.environ.get("BOXARITH_STORE"),
        help="theorem store path (or $BOXARITH_STORE)",
    )
    ap.add_argument("--format", choices=("text", "records"), default="text")
    sub = ap.add_subparsers(dest="command", required=True)

    p = sub.add_parser("classify", help="formula classes")
    p.add_argument("formula")
    p.set_defaults(fn=cmd_classify)

    p = sub.add_parser("normalize", help="normal forms and transforms")
    p.add_argument("--rule", required=True, choices=("possigma1", "s2d", "boxes", "minus", "star"))
    p.add_argument("formula")
    p.set_defaults(fn=cmd_normalize)

    p = sub.add_parser("translate", help="alpha/beta and provability translations")
    p.add_argument("--mode", required=True, choices=("alpha", "beta", "pi", "piprime", "rho"))
    p.add_argument("--theory", default="k")
    p.add_argument("formula")
    p.set_defaults(fn=cmd_translate)

    p = sub.add_parser("eval", help="standard-model evaluation")
    p.add_argument("--model", default="triv", choices=("triv", "ver", "prov"))
    p.add_argument("--budget", type=int, default=64)
    p.add_argument("--theory", default="k")
    p.add_argument("formula")
    p.set_defaults(fn=cmd_eval)

    p = sub.add_parser("prove", help="synthesize a proof of a true sentence")
    p.add_argument("--theory", default="k")
    p.add_argument("--budget", type=int, default=64)
    p.add_argument("--record", action="store_true", help="record into the store")
    p.add_argument("formula")
    p.set_defaults(fn=cmd_prove)

    p = sub.add_parser("check", help="check a proof file")
    p.add_argument("--theory", default="k")
    p.add_argument("--proof", required=True)
    p.set_defaults(fn=cmd_check)

    p = sub.add_parser("store", help="theorem store management")
    p.add_argument("action", choices=("list", "record", "nec-close", "audit-box-elim"))
    p.add_argument("--theory", default="k")
    p.add_argument("--proof")
    p.add_argument("--depth", type=int, default=1)
    p.set_defaults(fn=cmd_store)

    p = sub.add_parser("diag", help="exact fixed points")
    p.add_argument("--vars", required=True, help="comma-separated placeholder variables")
    p.add_argument("formulas", nargs="+")
    p.set_defaults(fn=cmd_diag)

    p = sub.add_parser("gallery", help="fixed-point constructions")
    p.add_argument("--kind", required=True, choices=constructions.GALLERY_KINDS)
    p.add_argument("--theory", default="k")
    p.add_argument("--phi")
    p.add_argument("--delta")
    p.add_argument("--x", default="x")
    p.add_argument("--psi", action="append", default=[])
    p.add_argument("--e", type=int, default=0)
    p.set_defaults(fn=cmd_gallery)

    p = sub.add_parser("audit-dp", help="disjunction property probe")
    p.add_argument("--theory", default="k")
    p.add_argument("--budget", type=int, default=64)
    p.add_argument("phi")
    p.add_argument("psi")
    p.set_defaults(fn=cmd_audit_dp)

    p = sub.add_parser("audit-dc", help="disjunctive correctness probe")
    p.add_argument("--theory", default="k")
    p.add_argument("--budget", type=int, default=64)
    p.add_argument("phi")
    p.set_defaults(fn=cmd_audit_dc)

    p = sub.add_parser("decide", help="propositional modal provability")
    p.add_argument("--logic", required=True, choices=modalprop.LOGICS)
    p.add_argument("formula")
    p.set_defaults(fn=cmd_decide)

    p = sub.add_parser("scan-mdp", help="modal disjunction property scan")
    p.add_argument("--logic", required=True, choices=modalprop.LOGICS)
    p.add_argument("--size", type=int, default=6)
    p.add_argument("--vars", type=int, default=1)
    p.set_defaults(fn=cmd_scan_mdp)

    return ap


DOMAIN_ERRORS = (
    CliError,
    ValueError,
    KeyError,
    OSError,
    SyntaxError_,
    CaptureError,
    EvalError,
    RegistryError,
    UnboundCodeError,
    StoreError,
    SynthesisError,
)


def main(argv=None):
    ap = build_parser()
    args = ap.parse_args(argv)
    out = Out(args.format)
    try:
        return args.fn(args, out)
    except DOMAIN_ERRORS as e:
        print(f"error: {e}", file=sys.stderr)
        return 1


if __name__ == "__main__":
    sys.exit(main())
