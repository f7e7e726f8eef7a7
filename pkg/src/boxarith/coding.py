"""Goedel numbering by interning, with forward references.

Codes are registry indices: the n-th distinct formula or proof interned
gets code n.  Fixed points are exact — the sentence produced by
`fixed_points` embeds numerals whose values are the codes of the produced
sentences themselves, which is possible because indices can be reserved
before the objects are constructed.

The registry persists as an append-only journal, one record per line,
`index<TAB>kind<TAB>canonical-text`, preceded by a checksum header.
Replay is deterministic: codes only depend on interning order.
"""

from __future__ import annotations

import hashlib
import os
import threading

from . import proofs as proofmod
from .syntax import (
    Add,
    CodeSub,
    Formula,
    Mul,
    NumLit,
    Succ,
    Var,
    Zero,
    free_vars,
    parse,
    print_formula,
    substitute,
)


class UnboundCodeError(KeyError):
    pass


class RegistryError(Exception):
    pass


class EvalError(Exception):
    pass


def numeral(n):
    """The numeral n-bar, as a literal term."""
    return NumLit(n)


def pair(x, y):
    """Cantor pairing; monotone in both slots, so x <= pair(x,y) and
    y <= pair(x,y), which is what witness packing relies on."""
    return (x + y) * (x + y + 1) // 2 + y


def unpair(z):
    w = int(((8 * z + 1) ** 0.5 - 1) // 2)
    while (w + 1) * (w + 2) // 2 <= z:
        w += 1
    while w * (w + 1) // 2 > z:
        w -= 1
    y = z - w * (w + 1) // 2
    return w - y, y


def pack_witnesses(values):
    """Right-folded pairing of a witness tuple into one number; the empty
    tuple packs to 0."""
    if not values:
        return 0
    out = values[-1]
    for v in reversed(values[:-1]):
        out = pair(v, out)
    return out


def unpack_witnesses(z, k):
    """Inverse of pack_witnesses for a known tuple length."""
    if k == 0:
        return []
    out = []
    for _ in range(k - 1):
        v, z = unpair(z)
        out.append(v)
    out.append(z)
    return out


_RESERVED = object()


class CodeRegistry:
    """Append-only interning table for formulas and proofs.

    Writes are serialized by an internal lock (single-writer contract);
    reads of bound entries are safe concurrently.
    """

    def __init__(self):
        self._entries = []  # list of Formula | Proof | _RESERVED
        self._codes = {}  # object -> first index
        self._lock = threading.Lock()

    def __len__(self):
        return len(self._entries)

    def code_of(self, obj):
        """Intern obj if new; always returns the first index it received."""
        if not isinstance(obj, (Formula, proofmod.Proof)):
            raise TypeError(f"only formulas and proofs are codeable, got {type(obj).__name__}")
        with self._lock:
            idx = self._codes.get(obj)
            if idx is None:
                idx = len(self._entries)
                self._entries.append(obj)
                self._codes[obj] = idx
            return idx

    def lookup(self, obj):
        """The code of obj if already interned, else None."""
        return self._codes.get(obj)

    def decode(self, n):
        if not isinstance(n, int) or n < 0 or n >= len(self._entries):
            raise UnboundCodeError(n)
        obj = self._entries[n]
        if obj is _RESERVED:
            raise UnboundCodeError(n)
        return obj

    def is_bound(self, n):
        return 0 <= n < len(self._entries) and self._entries[n] is not _RESERVED

    def reserve(self):
        """Allocate the next index without an object; bind() completes it."""
        with self._lock:
            idx = len(self._entries)
            self._entries.append(_RESERVED)
            return idx

    def bind(self, idx, obj):
        """Bind a reserved index.  If obj was already interned elsewhere the
        reverse map keeps the first index; callers needing exact codes must
        treat that as a failure (fixed_points does)."""
        with self._lock:
            if idx < 0 or idx >= len(self._entries) or self._entries[idx] is not _RESERVED:
                raise RegistryError(f"index {idx} is not a reserved slot")
            self._entries[idx] = obj
            self._codes.setdefault(obj, idx)

    def items(self):
        return list(enumerate(self._entries))

    # ------------------------------------------------------------ journal

    def record_lines(self):
        out = []
        for i, obj in enumerate(self._entries):
            if obj is _RESERVED:
                raise RegistryError(f"cannot persist: index {i} reserved but unbound")
            if isinstance(obj, Formula):
                out.append(f"{i}\tformula\t{print_formula(obj)}")
            else:
                out.append(f"{i}\tproof\t{proofmod.proof_to_record(obj)}")
        return out

    def save(self, path):
        body = "".join(ln + "\n" for ln in self.record_lines())
        digest = hashlib.sha256(body.encode()).hexdigest()
        tmp = f"{path}.tmp"
        with open(tmp, "w") as fh:
            fh.write(f"boxarithjournal v1 sha256={digest}\n")
            fh.write(body)
        os.replace(tmp, path)

    @classmethod
    def load(cls, path):
        with open(path) as fh:
            header = fh.readline().rstrip("\n")
            body = fh.read()
        if not header.startswith("boxarithjournal v1 sha256="):
            raise RegistryError(f"bad journal header: {header!r}")
        want = header.split("sha256=", 1)[1]
        if hashlib.sha256(body.encode()).hexdigest() != want:
            raise RegistryError("journal checksum mismatch")
        reg = cls()
        for raw in body.splitlines():
            if not raw:
                continue
            idx_txt, kind, payload = raw.split("\t", 2)
            idx = int(idx_txt)
            if idx != len(reg._entries):
                raise RegistryError(f"journal indices not consecutive at {idx}")
            if kind == "formula":
                obj = parse(payload)
            elif kind == "proof":
                obj = proofmod.proof_from_record(payload)
            else:
                raise RegistryError(f"unknown journal kind {kind!r}")
            reg._entries.append(obj)
            reg._codes.setdefault(obj, idx)
        return reg


# ------------------------------------------------------------ term values


def eval_term(t, env=None, registry=None):
    """Value of a term in the standard model.

    env maps Var to natural numbers and must cover the term's variables.
    Dotted-code terms need a registry (they intern on demand).
    """
    env = env or {}
    if isinstance(t, Zero):
        return 0
    if isinstance(t, Var):
        try:
            return env[t]
        except KeyError:
            raise EvalError(f"unbound variable {t.name}") from None
    if isinstance(t, Succ):
        return eval_term(t.arg, env, registry) + 1
    if isinstance(t, Add):
        return eval_term(t.left, env, registry) + eval_term(t.right, env, registry)
    if isinstance(t, Mul):
        return eval_term(t.left, env, registry) * eval_term(t.right, env, registry)
    if isinstance(t, NumLit):
        return t.value
    if isinstance(t, CodeSub):
        return code_sub_value(t, env, registry)
    raise TypeError(f"not a term: {t!r}")


def code_sub_value(t, env, registry):
    """Value of a dotted-code term: the code of the coded formula with the
    numerals of the mapped terms' values substituted for its free variables."""
    if registry is None:
        raise EvalError("dotted-code term needs a registry")
    phi = t.formula
    for v, sub in t.subst:
        phi = substitute(phi, v, numeral(eval_term(sub, env, registry)))
    return registry.code_of(phi)


# ------------------------------------------------------------ fixed points


def fixed_points(registry, phis, xs):
    """Effective fixed points: sentences psi_i with
    psi_i == phi_i substituted with the numerals of the codes of psi_0..psi_{k-1}.

    The equation holds syntactically (same AST), so the provable equivalence
    psi_i <-> phi_i(codes) is an instance of reflexivity.  Identical context
    formulas yield the identical sentence (they state the same equation).
    """
    k = len(phis)
    if len(xs) != k:
        raise ValueError("one placeholder variable per context formula")
    if len(set(xs)) != k:
        raise ValueError("placeholder variables must be distinct")
    declared = set(xs)
    deps = []
    for i, phi in enumerate(phis):
        fv = free_vars(phi)
        bad = fv - declared
        if bad:
            raise ValueError(
                f"context {i} has free variables {sorted(v.name for v in bad)} "
                "outside the declared placeholders"
            )
        deps.append({xs.index(v) for v in fv})

    codes: dict[int, int] = {}
    sentences: dict[int, Formula] = {}

    # alias identical contexts: same formula, same fixed point
    alias = {}
    seen = {}
    for i, phi in enumerate(phis):
        if phi in seen:
            alias[i] = seen[phi]
        else:
            seen[phi] = i

    primary = [i for i in range(k) if i not in alias]

    # resolve contexts whose dependencies are already fixed, repeatedly
    pending = set(primary)
    progress = True
    while progress:
        progress = False
        for i in sorted(pending):
            if any(alias.get(j, j) not in codes for j in deps[i]):
                continue
            psi = phis[i]
            for j in sorted(deps[i]):
                psi = substitute(psi, xs[j], numeral(codes[alias.get(j, j)]))
            codes[i] = registry.code_of(psi)
            sentences[i] = psi
            pending.discard(i)
            progress = True

    # the rest is genuinely circular: reserve, construct, bind
    if pending:
        order = sorted(pending)
        handles = {i: registry.reserve() for i in order}
        for i in order:
            psi = phis[i]
            for j in sorted(deps[i]):
                jj = alias.get(j, j)
                code = codes[jj] if jj in codes else handles[jj]
                psi = substitute(psi, xs[j], numeral(code))
            prior = registry.lookup(psi)
            if prior is not None and prior != handles[i]:
                raise RegistryError(
                    "fixed point collides with an already-interned formula; "
                    "codes cannot be exact for this registry state"
                )
            registry.bind(handles[i], psi)
            codes[i] = handles[i]
            sentences[i] = psi

    for i, j in alias.items():
        codes[i] = codes[j]
        sentences[i] = sentences[j]
    return [sentences[i] for i in range(k)]
