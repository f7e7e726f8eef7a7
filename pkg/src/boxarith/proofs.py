"""Hilbert-style proof objects and their text form.

A proof is a sequence of lines, each a formula plus a justification:
an axiom-scheme tag, an extra axiom of the theory, modus ponens,
generalization, necessitation, or a citation of a stored theorem.
Checking lives in the kernel; this module only defines the data and the
line-oriented serialization used by the registry journal and the CLI.
"""

from __future__ import annotations

import re
from dataclasses import dataclass

from .syntax import Formula, Var, parse, print_formula

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



@_cached_hash
@dataclass(frozen=True)
class AxiomStep:
    tag: str

    def __repr__(self):
        return f"ax({self.tag})"


@_cached_hash
@dataclass(frozen=True)
class ExtraStep:
    index: int

    def __repr__(self):
        return f"extra({self.index})"


@_cached_hash
@dataclass(frozen=True)
class MPStep:
    imp: int  # earlier line holding (A -> B)
    prem: int  # earlier line holding A

    def __repr__(self):
        return f"mp({self.imp},{self.prem})"


@_cached_hash
@dataclass(frozen=True)
class GenStep:
    source: int
    var: Var

    def __repr__(self):
        return f"gen({self.source},{self.var.name})"


@_cached_hash
@dataclass(frozen=True)
class NecStep:
    source: int

    def __repr__(self):
        return f"nec({self.source})"


@_cached_hash
@dataclass(frozen=True)
class CiteStep:
    """Cites a theorem-store record by formula code (same theory)."""

    code: int

    def __repr__(self):
        return f"cite({self.code})"


Justification = (AxiomStep, ExtraStep, MPStep, GenStep, NecStep, CiteStep)


@_cached_hash
@dataclass(frozen=True)
class ProofLine:
    formula: Formula
    just: object

    def __repr__(self):
        return f"{self.just!r}\t{self.formula!r}"


@_cached_hash
@dataclass(frozen=True)
class Proof:
    lines: tuple

    @property
    def conclusion(self):
        if not self.lines:
            raise ValueError("empty proof has no conclusion")
        return self.lines[-1].formula

    def __len__(self):
        return len(self.lines)

    def __repr__(self):
        return f"<Proof of {self.conclusion!r} in {len(self.lines)} lines>"


def proof_to_text(p):
    """Multi-line text: one `justification<TAB>formula` per line."""
    return "\n".join(f"{ln.just!r}\t{print_formula(ln.formula)}" for ln in p.lines)


_JUST_RE = re.compile(
    r"ax\((?P<ax>[a-z0-9_]+)\)"
    r"|extra\((?P<extra>[0-9]+)\)"
    r"|mp\((?P<mp1>[0-9]+),(?P<mp2>[0-9]+)\)"
    r"|gen\((?P<gen1>[0-9]+),(?P<gen2>[a-z][a-z0-9_]*)\)"
    r"|nec\((?P<nec>[0-9]+)\)"
    r"|cite\((?P<cite>[0-9]+)\)"
)


def _parse_just(text):
    m = _JUST_RE.fullmatch(text.strip())
    if not m:
        raise ValueError(f"bad justification {text!r}")
    if m.group("ax") is not None:
        return AxiomStep(m.group("ax"))
    if m.group("extra") is not None:
        return ExtraStep(int(m.group("extra")))
    if m.group("mp1") is not None:
        return MPStep(int(m.group("mp1")), int(m.group("mp2")))
    if m.group("gen1") is not None:
        return GenStep(int(m.group("gen1")), Var(m.group("gen2")))
    if m.group("nec") is not None:
        return NecStep(int(m.group("nec")))
    return CiteStep(int(m.group("cite")))


def proof_from_text(text):
    lines = []
    for raw in text.splitlines():
        raw = raw.strip()
        if not raw:
            continue
        just_txt, _, formula_txt = raw.partition("\t")
        if not formula_txt:
            # tolerate single-space separation for hand-written proofs
            just_txt, _, formula_txt = raw.partition(" ")
        lines.append(ProofLine(parse(formula_txt), _parse_just(just_txt)))
    return Proof(tuple(lines))


_STEP_SEP = " ;; "


def proof_to_record(p):
    """Single-line form used by the registry journal."""
    return _STEP_SEP.join(f"{ln.just!r} {print_formula(ln.formula)}" for ln in p.lines)


def proof_from_record(text):
    lines = []
    for step in text.split(_STEP_SEP):
        just_txt, _, formula_txt = step.partition(" ")
        lines.append(ProofLine(parse(formula_txt), _parse_just(just_txt)))
    return Proof(tuple(lines))
