"""Ideals of Q[x_1, ..., x_l]: membership, quotients, saturation, dimension.

Quotients and intersections are read off syzygy modules, so every
computation stays inside the homogeneous Buchberger engine.
"""

from __future__ import annotations

from itertools import combinations
from typing import Iterable

from .algebra import FreeModule, ModuleElement, Poly, Ring
from .groebner import Buchberger, buchberger, normal_form

__all__ = ["Ideal"]


class Ideal:
    """An ideal given by generators; its reduced Gröbner basis is computed once."""

    def __init__(self, generators: Iterable[Poly], ring: Ring | None = None):
        gens = list(generators)
        if ring is None:
            if not gens:
                raise ValueError("ring required for an ideal without generators")
            ring = gens[0].ring
        for g in gens:
            if g.ring != ring:
                raise ValueError("generators in different rings")
        self.ring = ring
        self.generators = [g for g in gens if g]
        self._gb: list[Poly] | None = None

    def __repr__(self):
        return f"Ideal<{', '.join(str(g) for g in self.generators)}>"

    def groebner(self) -> list[Poly]:
        if self._gb is None:
            self._gb = buchberger(self.generators)
        return self._gb

    def normal_form(self, f: Poly) -> Poly:
        gb = self.groebner()
        return normal_form(f, gb) if gb else f

    def contains(self, f: Poly) -> bool:
        return not self.normal_form(f)

    __contains__ = contains

    def contains_ideal(self, other: "Ideal") -> bool:
        return all(self.contains(g) for g in other.generators)

    def __eq__(self, other):
        if not isinstance(other, Ideal) or other.ring != self.ring:
            return NotImplemented
        return self.groebner() == other.groebner()

    def __hash__(self):
        return hash(tuple(self.groebner()))

    def is_zero(self) -> bool:
        return not self.generators

    def is_unit(self) -> bool:
        return any(g.is_constant() for g in self.groebner())

    def is_homogeneous(self) -> bool:
        return all(g.is_homogeneous() for g in self.generators)

    def lead_monomials(self) -> list[tuple[int, ...]]:
        return [g.lm() for g in self.groebner()]

    # -- dimension -----------------------------------------------------

    def krull_dim(self) -> int:
        """dim S/I from the initial ideal; -1 for the unit ideal."""
        if self.is_unit():
            return -1
        supports = [frozenset(i for i, e in enumerate(m) if e) for m in self.lead_monomials()]
        l = self.ring.nvars
        for size in range(l, -1, -1):
            for subset in combinations(range(l), size):
                s = set(subset)
                if not any(sup <= s for sup in supports):
                    return size
        return 0

    # -- quotients -----------------------------------------------------

    def _syzygy_first_components(self, f: Poly, others: list[Poly]) -> list[Poly]:
        module = FreeModule.ring_module(self.ring)
        cands = [dict(f.coeffs)] + [dict(g.coeffs) for g in others]
        shifts = [g.degree() for g in [f] + others]
        bb = Buchberger(module, cands, shifts=shifts, track=True).run()
        E = bb.E
        out = []
        for syz in bb.syzygies:
            first = {}
            for k, v in syz.items():
                c, mk = E.split(k)
                if c == 0:
                    first[mk] = v
            if first:
                out.append(Poly(self.ring, first))
        return out

    def quotient(self, f: Poly) -> "Ideal":
        """(I : f) = {g : g f in I}."""
        if not f:
            raise ValueError("quotient by the zero polynomial")
        if not self.generators:
            return Ideal([], self.ring)
        return Ideal(self._syzygy_first_components(f, self.generators), self.ring)

    def intersection(self, other: "Ideal") -> "Ideal":
        if not self.generators or not other.generators:
            return Ideal([], self.ring)
        # syzygies of (g_1..g_r, h_1..h_s): sum a_i g_i lies in both ideals
        module = FreeModule.ring_module(self.ring)
        gs, hs = self.generators, other.generators
        cands = [dict(g.coeffs) for g in gs + hs]
        bb = Buchberger(module, cands, shifts=[g.degree() for g in gs + hs], track=True).run()
        E = bb.E
        r = len(gs)
        out = []
        for syz in bb.syzygies:
            acc = self.ring.zero()
            parts: dict[int, dict] = {}
            for k, v in syz.items():
                c, mk = E.split(k)
                if c < r:
                    parts.setdefault(c, {})[mk] = v
            for c, d in parts.items():
                acc = acc + Poly(self.ring, d) * gs[c]
            if acc:
                out.append(acc)
        return Ideal(out, self.ring)

    def quotient_ideal(self, other: "Ideal") -> "Ideal":
        """(I : P), the kernel of g -> (g p_1, ..., g p_k) in (S/I)^k.

        Computed as the first components of the syzygies of (p_1, ..., p_k)
        together with I e_1, ..., I e_k in one free module of rank k.
        """
        ps = other.generators
        if not ps:
            raise ValueError("quotient by the zero ideal")
        if not self.generators:
            return Ideal([], self.ring)
        if len(ps) == 1:
            return Ideal(self.quotient(ps[0]).groebner(), self.ring)
        top = max(p.degree() for p in ps)
        F = FreeModule.graded(self.ring, [top - p.degree() for p in ps])
        cands = [dict(ModuleElement.from_components(F, ps).coeffs)]
        shifts = [top]
        gens = self.groebner()
        zero = self.ring.zero()
        for i, p in enumerate(ps):
            for g in gens:
                comps = [zero] * len(ps)
                comps[i] = g
                cands.append(dict(ModuleElement.from_components(F, comps).coeffs))
                shifts.append(g.degree() + top - p.degree())
        bb = Buchberger(F, cands, shifts=shifts, track=True).run()
        E = bb.E
        out = []
        for syz in bb.syzygies:
            first = {mk: v for k, v in syz.items() for c, mk in [E.split(k)] if c == 0}
            if first:
                out.append(Poly(self.ring, first))
        return Ideal(Ideal(out + gens, self.ring).groebner(), self.ring)

    def saturation(self, other: "Ideal") -> "Ideal":
        """(I : P^infinity), iterating quotients until the Gröbner bases agree."""
        current = Ideal(self.groebner(), self.ring)
        while True:
            nxt = self.__class__.quotient_ideal(current, other)
            if nxt == current:
                return current
            current = nxt

    # -- resolutions ---------------------------------------------------

    def resolution(self):
        """Minimal graded free resolution of S/I (homogeneous I)."""
        from .resolution import free_resolution, minimalize

        if not self.is_homogeneous():
            raise ValueError("resolution needs a homogeneous ideal")
        if not self.generators:
            res = free_resolution([], target=FreeModule.ring_module(self.ring))
            return minimalize(res)
        return minimalize(free_resolution(self.generators))
