"""Buchberger's algorithm for ideals and submodules of graded free modules.

Elements are handled as raw ``{key: coefficient}`` dicts in the encoding of
their :class:`~hyperarr.algebra.FreeModule`; the public functions at the
bottom wrap and unwrap :class:`Poly` and :class:`ModuleElement`.

Pairs are selected Schreyer style: when basis element ``k`` arrives, the
pairs ``(i, k)`` kept are those whose multipliers ``lcm/lt_k`` minimally
generate ``(lt_1, ..., lt_{k-1}) : lt_k``.  Their S-polynomials, reduced with
a recorded trace, therefore generate the whole syzygy module (Schreyer's
theorem), which is what :mod:`hyperarr.resolution` relies on.  For ideals
pairs with coprime leading monomials are never reduced; when syzygies are
requested the Koszul relation is written down instead.
"""

from __future__ import annotations

import heapq
import logging
from collections import defaultdict
from contextlib import contextmanager
from dataclasses import dataclass, field
from typing import Sequence

from gmpy2 import mpq

from .algebra import FreeModule, ModuleElement, Poly, Ring, _add_into

log = logging.getLogger(__name__)

__all__ = [
    "Reducer",
    "Buchberger",
    "normal_form",
    "buchberger",
    "is_groebner",
    "spair_check",
    "audit",
    "AuditLog",
]


@dataclass
class AuditLog:
    """Outcome of the self-checks run on every Gröbner computation in an audit block."""

    runs: int = 0
    failures: list = field(default_factory=list)

    @property
    def ok(self) -> bool:
        return not self.failures


_audit_log: AuditLog | None = None


@contextmanager
def audit():
    """Self-check every Buchberger run finished inside the block.

    Checks: inputs reduce to zero modulo the basis; each basis element and
    each syzygy agrees with its trace certificate (untracked or pruned runs
    are certified through an independent tracked run); and every S-pair of
    the basis reduces to zero.
    """
    global _audit_log
    prev, _audit_log = _audit_log, AuditLog()
    log_ = _audit_log
    try:
        yield log_
    finally:
        _audit_log = prev


class Reducer:
    """A list of monic elements with cached leading data, used for division."""

    def __init__(self, module: FreeModule):
        self.module = module
        self.ring: Ring = module.ring
        self.elems: list[dict] = []
        self.lead: list[int] = []
        self.lmono: list[int] = []
        self.lexps: list[tuple[int, ...]] = []
        self.lcomp: list[int] = []
        self.tails: list[list] = []
        self.traces: list[dict | None] = []
        self.trace_items: list[list] = []
        self.by_comp: dict[int, list[tuple[int, int]]] = defaultdict(list)
        self.emscale = 0
        self.steps = 0

    def __len__(self):
        return len(self.elems)

    def append(self, f: dict, trace: dict | None = None) -> int:
        """Add ``f`` (made monic, trace scaled alike); return its index."""
        lk = max(f)
        lc = f[lk]
        if lc != 1:
            inv = 1 / lc
            f = {k: v * inv for k, v in f.items()}
            if trace is not None:
                trace = {k: v * inv for k, v in trace.items()}
        c, mk = self.module.split(lk)
        idx = len(self.elems)
        self.elems.append(f)
        self.lead.append(lk)
        self.lmono.append(mk)
        self.lexps.append(self.ring.exps(mk))
        self.lcomp.append(c)
        self.tails.append([(k, v) for k, v in f.items() if k != lk])
        self.traces.append(trace)
        self.trace_items.append(list(trace.items()) if trace is not None else [])
        self.by_comp[c].append((self.ring.rest(mk), idx))
        return idx

    def reduce(self, f: dict, trace: dict | None = None, full: bool = True):
        """Divide ``f`` in place; return ``(remainder, trace)``.

        With ``full`` every term is reduced, otherwise only leading terms.
        The trace, if given, is updated by the quotients times the stored
        traces of the divisors.
        """
        module = self.module
        V, cmask, offs, S, ms = module.vbits, module.cmask, module.offsets, module.scale, module.mscale
        plain = V == 0 and offs[0] == 0 and S == 1
        rmask = self.ring.R - 1
        G = self.ring.G
        by_comp = self.by_comp
        lmono, tails = self.lmono, self.tails
        titems = self.trace_items
        ems = self.emscale
        heap = [-k for k in f]
        heapq.heapify(heap)
        pop, push = heapq.heappop, heapq.heappush
        rem: dict = {}
        steps = 0
        while heap:
            k = -pop(heap)
            c = f.pop(k, None)
            if c is None:
                continue
            if plain:
                comp, mk = 0, k
            else:
                comp = k & cmask
                mk = ((k >> V) - offs[comp]) // S
            rest = (-mk) & rmask
            for r, i in by_comp.get(comp, ()):
                if ((rest | G) - r) & G == G:
                    break
            else:
                rem[k] = c
                if not full:
                    rem.update(f)
                    f.clear()
                    break
                continue
            steps += 1
            q = mk - lmono[i]
            sh = q * ms
            for kk, cc in tails[i]:
                nk = kk + sh
                v = f.get(nk)
                if v is None:
                    f[nk] = -c * cc
                    push(heap, -nk)
                else:
                    v -= c * cc
                    if v:
                        f[nk] = v
                    else:
                        del f[nk]
            if trace is not None:
                _add_into(trace, titems[i], q * ems, -c)
        self.steps += steps
        return rem, trace

    def interreduce(self) -> list[dict]:
        """Reduced basis: drop redundant leading terms, tail-reduce, all monic."""
        ring = self.ring
        order = sorted(range(len(self.elems)), key=lambda i: self.lead[i])
        keep: list[int] = []
        for i in order:
            ri = ring.rest(self.lmono[i])
            if any(
                self.lcomp[j] == self.lcomp[i] and ring.divides(ring.rest(self.lmono[j]), ri)
                for j in keep
            ):
                continue
            keep.append(i)
        out = []
        for i in keep:
            other = Reducer(self.module)
            for j in keep:
                if j != i:
                    other.append(self.elems[j])
            lk = self.lead[i]
            tail = {k: v for k, v in self.elems[i].items() if k != lk}
            rem, _ = other.reduce(tail)
            rem[lk] = mpq(1)
            out.append(rem)
        out.sort(key=max, reverse=True)
        return out


class Buchberger(Reducer):
    """Gröbner basis of the submodule generated by ``gens``.

    ``track`` records, for each basis element, its expression in terms of a
    free module ``E`` mapping onto the generators, and collects generators of
    the kernel of ``E -> module`` in :attr:`syzygies`.

    ``prune`` keeps only generators that are not already in the span of the
    earlier ones (homogeneous input, processed by degree), so the basis of
    ``E`` is a minimal generating set.  Without it every input generator,
    even zero, gets its own basis vector of ``E``.
    """

    def __init__(self, module: FreeModule, gens: Sequence[dict], *, shifts: Sequence[int] | None = None,
                 track: bool = False, prune: bool = False):
        super().__init__(module)
        self.track = track
        self.prune = prune
        self.inputs = [dict(g) for g in gens]
        if shifts is None:
            shifts = []
            for g in self.inputs:
                if not g:
                    raise ValueError("zero generator needs an explicit shift")
                shifts.append(max(module.degree(k) for k in g))
        self.input_shifts = list(shifts)
        n = len(self.inputs)
        self.evbits = max(n - 1, 0).bit_length()
        self.emscale = module.mscale << self.evbits
        # basis of E: images, shifts, Schreyer offsets
        self.e_images: list[dict] = []
        self.e_shifts: list[int] = []
        self.e_offsets: list[int] = []
        self.syzygies: list[dict] = []
        self._queue: list = []
        self._seq = 0
        self.spairs = 0
        self.done = False
        if not prune:
            for g, s in zip(self.inputs, self.input_shifts):
                self._new_e(g, s)
        for t, (g, s) in enumerate(zip(self.inputs, self.input_shifts)):
            self._push(s, 1, ("gen", t))

    # -- E bookkeeping -------------------------------------------------

    def _new_e(self, image: dict, shift: int) -> int:
        if image:
            off = max(image)
        else:
            # any offset gives a term order; zero generators sit at their degree
            off = self.module.key(0, 0) + shift * self.ring.D * self.module.mscale
        self.e_images.append(image)
        self.e_shifts.append(shift)
        self.e_offsets.append(off)
        return len(self.e_images) - 1

    def _e_key(self, idx: int) -> int:
        return (self.e_offsets[idx] << self.evbits) | idx

    @property
    def E(self) -> FreeModule:
        return FreeModule(self.ring, self.e_shifts, self.e_offsets, self.module.mscale, self.evbits)

    # -- queue ---------------------------------------------------------

    def _push(self, degree: int, kind: int, payload) -> None:
        self._seq += 1
        heapq.heappush(self._queue, (degree, kind, self._seq, payload))

    def _add(self, f: dict, trace: dict | None) -> int:
        k = self.append(f, trace)
        self._make_pairs(k)
        return k

    def _make_pairs(self, k: int) -> None:
        ek, ck = self.lexps[k], self.lcomp[k]
        rank_one = self.module.rank == 1
        cands = []
        for _, i in self.by_comp[ck]:
            if i == k:
                continue
            ei = self.lexps[i]
            lcm = tuple(a if a > b else b for a, b in zip(ei, ek))
            q = tuple(a - b for a, b in zip(lcm, ek))
            coprime = q == ei
            cands.append((sum(q), not coprime, i, q, lcm))
        cands.sort()
        kept: list[tuple[int, ...]] = []
        shift = self.module.shifts[ck]
        for _, not_coprime, i, q, lcm in cands:
            if any(all(a <= b for a, b in zip(p, q)) for p in kept):
                continue
            kept.append(q)
            coprime = not not_coprime
            if coprime and rank_one and not self.track:
                continue
            self._push(sum(lcm) + shift, 0, ("pair", i, k, lcm, coprime and rank_one))

    # -- main loop -----------------------------------------------------

    def run(self, max_degree: int | None = None) -> "Buchberger":
        """Process the queue (up to ``max_degree`` when given)."""
        q = self._queue
        while q:
            if max_degree is not None and q[0][0] > max_degree:
                return self
            degree, kind, _, payload = heapq.heappop(q)
            if kind == 0:
                self._do_pair(*payload[1:])
            else:
                self._do_gen(payload[1])
        self.done = True
        if _audit_log is not None:
            _audit_log.runs += 1
            problem = self.self_check()
            if problem:
                _audit_log.failures.append(problem)
        log.debug("groebner: %d elements, %d pairs, %d reduction steps",
                  len(self.elems), self.spairs, self.steps)
        return self

    def _do_pair(self, i: int, k: int, lcm, koszul: bool) -> None:
        self.spairs += 1
        ms, ems = self.module.mscale, self.emscale
        key_lcm = self.ring.key(lcm)
        qi, qk = key_lcm - self.lmono[i], key_lcm - self.lmono[k]
        if koszul:
            # g_k T_i - g_i T_k  (both monic polynomials times S(-s))
            pk = self._as_poly(k)
            pi = self._as_poly(i)
            syz: dict = {}
            for mk, c in pk.items():
                _add_into(syz, self.trace_items[i], mk * ems, c)
            for mk, c in pi.items():
                _add_into(syz, self.trace_items[k], mk * ems, -c)
            if syz:
                self.syzygies.append(syz)
            return
        f: dict = {}
        _add_into(f, self.tails[i], qi * ms, 1)
        _add_into(f, self.tails[k], qk * ms, -1)
        trace = None
        if self.track:
            trace = {}
            _add_into(trace, self.trace_items[i], qi * ems, 1)
            _add_into(trace, self.trace_items[k], qk * ems, -1)
        rem, trace = self.reduce(f, trace)
        if rem:
            self._add(rem, trace)
        elif trace:
            self.syzygies.append(trace)

    def _as_poly(self, i: int) -> dict:
        split = self.module.split
        return {split(k)[1]: v for k, v in self.elems[i].items()}

    def _do_gen(self, t: int) -> None:
        f = dict(self.inputs[t])
        if self.prune:
            rem, _ = self.reduce(f)
            if rem:
                lk = max(rem)
                inv = 1 / rem[lk]
                rem = {k: v * inv for k, v in rem.items()}
                idx = self._new_e(rem, self.input_shifts[t])
                self._add(rem, {self._e_key(idx): mpq(1)} if self.track else None)
            return
        trace = {self._e_key(t): mpq(1)} if self.track else None
        rem, trace = self.reduce(f, trace)
        if rem:
            self._add(rem, trace)
        elif trace:
            self.syzygies.append(trace)

    # -- self-checks ---------------------------------------------------

    def _image(self, combo: dict, images: list[dict]) -> dict:
        """Evaluate an element of E (keyed as in :attr:`E`) on the given images."""
        E, ms = self.E, self.module.mscale
        out: dict = {}
        for k, c in combo.items():
            comp, mk = E.split(k)
            _add_into(out, images[comp].items(), mk * ms, c)
        return out

    def _certificates_hold(self) -> str | None:
        for i, (f, tr) in enumerate(zip(self.elems, self.traces)):
            if tr is not None and self._image(tr, self.e_images) != f:
                return f"basis element {i} disagrees with its trace"
        for j, syz in enumerate(self.syzygies):
            if self._image(syz, self.e_images):
                return f"syzygy {j} does not map to zero"
        return None

    def self_check(self) -> str | None:
        """None when the run passes the audit, else a description of the failure."""
        global _audit_log
        red = Reducer(self.module)
        for f in self.elems:
            red.append(f)
        for t, g in enumerate(self.inputs):
            if g and red.reduce(dict(g))[0]:
                return f"input {t} is not in the span of the basis"
        if self.track:
            problem = self._certificates_hold()
            if problem:
                return problem
        if not self.track or self.prune:
            saved, _audit_log = _audit_log, None
            try:
                gens = [g for g in self.inputs if g]
                fresh = Buchberger(self.module, gens, track=True).run()
            finally:
                _audit_log = saved
            problem = fresh._certificates_hold()
            if problem:
                return "independent run: " + problem
            ref = Reducer(self.module)
            for f in fresh.elems:
                ref.append(f)
            for i, f in enumerate(self.elems):
                if ref.reduce(dict(f))[0]:
                    return f"basis element {i} is not in the span of the inputs"
        if not _spairs_vanish(self.module, self.elems):
            return "an S-pair of the basis does not reduce to zero"
        return None

    # -- results -------------------------------------------------------

    def basis(self) -> list[dict]:
        return list(self.elems)

    def minimal_generators(self) -> list[dict]:
        return list(self.e_images)


# ---------------------------------------------------------------------------
# public wrappers


def _unwrap(items) -> tuple[FreeModule, list[dict], str]:
    items = list(items)
    if not items:
        raise ValueError("need at least one element to fix the ambient module")
    first = items[0]
    if isinstance(first, Poly):
        module = FreeModule.ring_module(first.ring)
        for f in items:
            if not isinstance(f, Poly) or f.ring != first.ring:
                raise ValueError("ambient mismatch")
        return module, [dict(f.coeffs) for f in items], "poly"
    module = first.module
    for v in items:
        if not isinstance(v, ModuleElement) or v.module != module:
            raise ValueError("ambient mismatch")
    return module, [dict(v.coeffs) for v in items], "module"


def _wrap(module: FreeModule, d: dict, kind: str):
    if kind == "poly":
        return Poly(module.ring, d)
    return ModuleElement(module, d)


def buchberger(gens: Sequence, reduced: bool = True) -> list:
    """Reduced Gröbner basis (monic, auto-reduced) of the given generators.

    Accepts Polys (ideal) or ModuleElements of a common free module.  Empty
    input gives an empty basis.
    """
    gens = [g for g in gens if g]
    if not gens:
        return []
    module, dicts, kind = _unwrap(gens)
    bb = Buchberger(module, dicts).run()
    basis = bb.interreduce() if reduced else bb.basis()
    return [_wrap(module, d, kind) for d in basis]


def normal_form(f, basis: Sequence):
    """Fully reduced remainder of ``f`` on division by ``basis``."""
    basis = [g for g in basis if g]
    if not basis:
        raise ValueError("empty divisor list")
    module, dicts, kind = _unwrap(basis)
    m2, (fd,), kind2 = _unwrap([f]) if f else (module, [{}], kind)
    if m2 != module or kind2 != kind:
        raise ValueError("ambient mismatch")
    red = Reducer(module)
    for d in dicts:
        red.append(d)
    rem, _ = red.reduce(dict(fd))
    return _wrap(module, rem, kind)


def spair_check(basis: Sequence) -> bool:
    """Buchberger's criterion: every S-pair of ``basis`` reduces to zero."""
    basis = [g for g in basis if g]
    if not basis:
        return True
    module, dicts, _ = _unwrap(basis)
    return _spairs_vanish(module, dicts)


def _spairs_vanish(module: FreeModule, dicts: Sequence[dict]) -> bool:
    red = Reducer(module)
    for d in dicts:
        red.append(d)
    ring = module.ring
    ms = module.mscale
    n = len(red)
    for i in range(n):
        for k in range(i + 1, n):
            if red.lcomp[i] != red.lcomp[k]:
                continue
            lcm = tuple(max(a, b) for a, b in zip(red.lexps[i], red.lexps[k]))
            kl = ring.key(lcm)
            f: dict = {}
            _add_into(f, red.tails[i], (kl - red.lmono[i]) * ms, 1)
            _add_into(f, red.tails[k], (kl - red.lmono[k]) * ms, -1)
            rem, _ = red.reduce(f)
            if rem:
                return False
    return True


def is_groebner(basis: Sequence, gens: Sequence) -> bool:
    """Two-way membership plus the S-pair criterion."""
    gens = [g for g in gens if g]
    basis = [g for g in basis if g]
    if not gens or not basis:
        return not gens and not basis
    if any(normal_form(g, basis) for g in gens):
        return False
    if not spair_check(basis):
        return False
    # every basis element lies in the span of gens
    full = buchberger(gens)
    return not any(normal_form(b, full) for b in basis)
