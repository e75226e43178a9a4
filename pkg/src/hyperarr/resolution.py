"""Graded free resolutions, minimalization and Betti tables."""

from __future__ import annotations

from collections import Counter
from dataclasses import dataclass, field
from typing import Sequence

from .algebra import FreeModule, HomMatrix, ModuleElement, Poly, Ring, render
from .groebner import Buchberger

__all__ = [
    "GradedResolution",
    "BettiTable",
    "free_resolution",
    "syzygy_module",
    "minimalize",
    "projdim_and_depth",
    "format_module",
    "format_resolution",
]


@dataclass(frozen=True)
class BettiTable:
    """Graded Betti numbers b_{i,j} of a minimal resolution."""

    entries: dict = field(default_factory=dict)  # (i, j) -> multiplicity

    @classmethod
    def from_shifts(cls, shifts: Sequence[Sequence[int]]) -> "BettiTable":
        entries: Counter = Counter()
        for i, sh in enumerate(shifts):
            for j in sh:
                entries[(i, j)] += 1
        return cls(dict(entries))

    def total(self, i: int) -> int:
        return sum(m for (a, _), m in self.entries.items() if a == i)

    @property
    def totals(self) -> tuple[int, ...]:
        if not self.entries:
            return ()
        top = max(i for i, _ in self.entries)
        return tuple(self.total(i) for i in range(top + 1))

    @property
    def projdim(self) -> int:
        """Length of the resolution; -1 for the zero module."""
        return max((i for i, _ in self.entries), default=-1)

    def shifts(self, i: int) -> list[int]:
        """Sorted list of degrees j, with multiplicity, at homological index i."""
        out = []
        for (a, j), m in sorted(self.entries.items()):
            if a == i:
                out.extend([j] * m)
        return out

    def to_json(self) -> list[dict]:
        return [{"i": i, "j": j, "multiplicity": m} for (i, j), m in sorted(self.entries.items())]

    @classmethod
    def from_json(cls, data: list[dict]) -> "BettiTable":
        return cls({(d["i"], d["j"]): d["multiplicity"] for d in data})


class GradedResolution:
    """F_0 <- F_1 <- ... with ``maps[i-1]`` the differential F_i -> F_{i-1}."""

    def __init__(self, modules: Sequence[FreeModule], maps: Sequence[HomMatrix], minimal: bool = False):
        if len(maps) != max(len(modules) - 1, 0):
            raise ValueError("need one map between consecutive modules")
        for i, m in enumerate(maps):
            if m.source != modules[i + 1] or m.target != modules[i]:
                raise ValueError("maps do not chain")
        self.modules = list(modules)
        self.maps = list(maps)
        self.minimal = minimal

    @property
    def length(self) -> int:
        return len(self.maps)

    def shifts(self) -> list[list[int]]:
        return [sorted(m.shifts) for m in self.modules]

    def betti(self) -> BettiTable:
        if not self.minimal:
            raise ValueError("Betti numbers need a minimal resolution")
        return BettiTable.from_shifts([m.shifts for m in self.modules])

    def is_complex(self) -> bool:
        return all(self.maps[i].compose_is_zero(self.maps[i + 1]) for i in range(len(self.maps) - 1))

    def is_homogeneous(self) -> bool:
        return all(m.is_homogeneous() for m in self.maps)

    def has_unit_entries(self) -> bool:
        return any(_find_unit(m.grid()) is not None for m in self.maps)

    def is_exact_at(self, i: int) -> bool:
        """Spot check: syzygies of the map F_i -> F_{i-1} lie in the image of F_{i+1}."""
        from .groebner import buchberger, normal_form

        kernel = syzygy_module(self.maps[i - 1], minimal=False)
        if not kernel.columns:
            return True
        if i >= len(self.modules) - 1:
            return False
        image = buchberger(list(self.maps[i].columns))
        cols = [_recode(v, self.modules[i]) for v in kernel.columns]
        if not image:
            return not any(cols)
        return not any(normal_form(v, image) for v in cols if v)

    def to_json(self) -> dict:
        return {
            "minimal": self.minimal,
            "shifts": [list(m.shifts) for m in self.modules],
            "maps": [[[render(f) for f in row] for row in m.grid()] for m in self.maps],
        }

    def __str__(self):
        return format_resolution([m.shifts for m in self.modules])


def format_module(shifts: Sequence[int]) -> str:
    if not shifts:
        return "0"
    parts = []
    for j, m in sorted(Counter(shifts).items()):
        base = "S" if j == 0 else f"S(-{j})" if j > 0 else f"S({-j})"
        parts.append(base if m == 1 else f"{base}^{m}")
    return "+".join(parts)


def format_resolution(shifts: Sequence[Sequence[int]]) -> str:
    """Paper-style notation, highest homological degree first."""
    mods = [format_module(s) for s in shifts]
    return " -> ".join(["0"] + mods[::-1])


def _recode(v: ModuleElement, module: FreeModule) -> ModuleElement:
    return ModuleElement.from_components(module, v.components())


def _graded_from_dicts(ring: Ring, shifts, images: list[dict], target: FreeModule) -> HomMatrix:
    src = FreeModule.graded(ring, shifts)
    return HomMatrix(src, target, [ModuleElement(target, d) for d in images])


def _check_homogeneous(module: FreeModule, gens: Sequence[dict]) -> None:
    for g in gens:
        if len({module.degree(k) for k in g}) > 1:
            raise ValueError("free_resolution needs homogeneous input")


def free_resolution(gens: Sequence, target: FreeModule | None = None, *, shifts: Sequence[int] | None = None,
                    prune_first: bool = True, max_length: int | None = None) -> GradedResolution:
    """Resolve target / <gens> by iterated Schreyer syzygies.

    ``gens`` are Polys (then the target is S) or ModuleElements of
    ``target``.  Each later module is a minimal generating set of the
    kernel of the previous map, so the result is minimal whenever the first
    generators are (``prune_first``).  With ``prune_first=False`` the given
    generators are kept verbatim (zero ones too, which then need ``shifts``)
    and the result is minimal from F_2 on; :func:`minimalize` finishes it.
    """
    gens = list(gens)
    if gens and isinstance(gens[0], Poly):
        ring = gens[0].ring
        target = target or FreeModule.ring_module(ring)
        dicts = [dict(g.coeffs) for g in gens]
    else:
        if target is None:
            if not gens:
                raise ValueError("target module required")
            target = gens[0].module
        dicts = [dict(v.coeffs) for v in gens]
    ring = target.ring
    _check_homogeneous(target, dicts)
    if prune_first:
        kept = [(d, s) for d, s in zip(dicts, shifts or [None] * len(dicts)) if d]
        dicts = [d for d, _ in kept]
        shifts = None if shifts is None else [s for _, s in kept]

    # F_0 in graded order so that every module of the result is comparable
    base = FreeModule.graded(ring, target.shifts)
    modules = [base]
    maps: list[HomMatrix] = []
    current = target
    cands, cand_shifts, prune = dicts, shifts, prune_first
    while cands and (max_length is None or len(maps) < max_length):
        bb = Buchberger(current, cands, shifts=cand_shifts, track=True, prune=prune).run()
        E = bb.E
        images = [ModuleElement(current, d) for d in bb.minimal_generators()]
        src = FreeModule.graded(ring, E.shifts)
        cols = [ModuleElement.from_components(modules[-1], v.components()) for v in images]
        maps.append(HomMatrix(src, modules[-1], cols))
        modules.append(src)
        current = E
        cands = bb.syzygies
        cand_shifts, prune = None, True
    res = GradedResolution(modules, maps)
    res.minimal = prune_first and not res.has_unit_entries()
    return res


def syzygy_module(M: HomMatrix, minimal: bool = True) -> HomMatrix:
    """Generators of ker(M) as a map into M.source (minimal when homogeneous)."""
    source, target = M.source, M.target
    cols = [dict(c.coeffs) for c in M.columns]
    if not cols:
        return HomMatrix(FreeModule.graded(source.ring, []), source, [])
    bb = Buchberger(target, cols, shifts=list(source.shifts), track=True).run()
    E = bb.E
    syz = [ModuleElement(E, d) for d in bb.syzygies]
    vecs = [ModuleElement.from_components(source, v.components()) for v in syz]
    if minimal and vecs:
        bb2 = Buchberger(source, [dict(v.coeffs) for v in vecs], prune=True).run()
        vecs = [ModuleElement(source, d) for d in bb2.minimal_generators()]
    shifts = [v.degree() for v in vecs]
    if any(s is None for s in shifts):
        # inhomogeneous input: fall back on the top degree of each generator
        shifts = [max(source.degree(k) for k in v.coeffs) for v in vecs]
    return HomMatrix(FreeModule.graded(source.ring, shifts), source, vecs)


def _find_unit(grid: list[list[Poly]]):
    for i, row in enumerate(grid):
        for j, f in enumerate(row):
            if f and f.is_constant():
                return i, j
    return None


def minimalize(res: GradedResolution, start: int = 1) -> tuple[GradedResolution, BettiTable]:
    """Cancel unit entries until none are left; return the minimal resolution.

    Maps ``∂_i`` with ``i < start`` are left untouched (used to keep a given
    presentation fixed).
    """
    ring = res.modules[0].ring
    shifts = [list(m.shifts) for m in res.modules]
    grids = [m.grid() for m in res.maps]  # grids[i]: F_{i+1} -> F_i
    for idx in range(start - 1, len(grids)):
        while True:
            hit = _find_unit(grids[idx])
            if hit is None:
                break
            r, j = hit
            g = grids[idx]
            u = g[r][j].constant_term()
            inv = 1 / u
            for jj in range(len(g[0])):
                if jj == j or not g[r][jj]:
                    continue
                factor = g[r][jj] * inv
                for i in range(len(g)):
                    if g[i][j]:
                        g[i][jj] = g[i][jj] - factor * g[i][j]
            del g[r]
            for row in g:
                del row[j]
            if idx > 0:
                for row in grids[idx - 1]:
                    del row[r]
            if idx + 1 < len(grids):
                del grids[idx + 1][j]
            del shifts[idx][r]
            del shifts[idx + 1][j]
    # drop trailing zero modules
    while len(shifts) > 1 and not shifts[-1]:
        shifts.pop()
        grids.pop()
    modules = [FreeModule.graded(ring, s) for s in shifts]
    maps = [HomMatrix.from_rows(modules[i + 1], modules[i], grids[i]) for i in range(len(grids))]
    out = GradedResolution(modules, maps, minimal=True)
    if start > 1:
        out.minimal = not out.has_unit_entries()
    return out, BettiTable.from_shifts(shifts)


def projdim_and_depth(betti: BettiTable, nvars: int) -> tuple[int, int]:
    """Projective dimension and depth (Auslander–Buchsbaum) from a Betti table."""
    pd = betti.projdim
    return pd, nvars - pd
