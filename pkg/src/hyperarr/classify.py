"""Logarithmic derivations, Saito's criterion and the free / plus-one generated classification."""

from __future__ import annotations

import time
from collections import Counter
from dataclasses import dataclass, field
from itertools import combinations

from .algebra import Poly, Ring, rat
from .arrangement import Arrangement, ArrangementError
from .resolution import BettiTable, GradedResolution, format_resolution, free_resolution, minimalize

__all__ = [
    "Derivation",
    "DerivationModule",
    "Classification",
    "PreconditionError",
    "euler_field",
    "is_logarithmic",
    "derivation_module",
    "determinant",
    "saito_check",
    "classify",
    "verify_deletion_theorem",
    "verify_addition_theorem",
    "FREE",
    "POG",
    "OTHER",
]

FREE = "Free"
POG = "PlusOneGenerated"
OTHER = "Other"


class PreconditionError(ValueError):
    """An operation was called on input outside its contract."""


@dataclass(frozen=True)
class Derivation:
    """delta = sum_i f_i d/dx_i."""

    coefficients: tuple[Poly, ...]

    @property
    def ring(self) -> Ring:
        return self.coefficients[0].ring

    @property
    def pdeg(self) -> int | None:
        """Common degree of the nonzero coefficients, None if they differ or all vanish."""
        degs = {f.degree() for f in self.coefficients if f}
        if len(degs) != 1 or not all(f.is_homogeneous() for f in self.coefficients if f):
            return None
        return degs.pop()

    def is_zero(self) -> bool:
        return not any(self.coefficients)

    def apply(self, g: Poly) -> Poly:
        out = g.ring.zero()
        for i, f in enumerate(self.coefficients):
            if f:
                out = out + f * g.diff(i)
        return out

    def __str__(self):
        names = self.ring.names
        parts = []
        for f, x in zip(self.coefficients, names):
            if not f:
                continue
            s = str(f)
            if len(f) > 1:
                s = f"({s})"
            parts.append(f"{s}*d{x}")
        return " + ".join(parts) if parts else "0"

    def to_json(self) -> dict:
        return {"coefficients": [str(f) for f in self.coefficients], "pdeg": self.pdeg}


def euler_field(l: int | Ring) -> Derivation:
    ring = l if isinstance(l, Ring) else Ring.standard(l)
    if ring.nvars < 1:
        raise ValueError("need at least one variable")
    return Derivation(tuple(ring.gens()))


def _divides(a: Poly, b: Poly) -> bool:
    """Exact test a | b for a linear form a."""
    from .groebner import normal_form

    if not b:
        return True
    return not normal_form(b, [a.monic()])


def is_logarithmic(delta: Derivation, A: Arrangement) -> bool:
    """alpha_i divides delta(alpha_i) for every hyperplane."""
    for alpha in A.linear_forms():
        if not _divides(alpha, delta.apply(alpha)):
            return False
    return True


@dataclass
class DerivationModule:
    """Minimal generators of D(A) and the minimal graded resolution of D(A)."""

    generators: list[Derivation]
    shifts: list[list[int]]  # shifts[0]: pdegs of generators, shifts[i]: relations
    maps: list  # HomMatrix F_{i+1} -> F_i of the resolution of D(A)

    @property
    def pdegs(self) -> list[int]:
        return sorted(self.shifts[0])

    @property
    def projdim(self) -> int:
        return len(self.shifts) - 1

    def betti(self) -> BettiTable:
        return BettiTable.from_shifts(self.shifts)

    def resolution_string(self) -> str:
        mods = " -> ".join(_fmt(s) for s in self.shifts[::-1])
        return f"0 -> {mods} -> D(A)"

    def to_json(self) -> dict:
        return {
            "generators": [g.to_json() for g in self.generators],
            "shifts": self.shifts,
            "resolution": self.resolution_string(),
        }


def _fmt(shifts) -> str:
    from .resolution import format_module

    return format_module(shifts)


def _raw_resolution(A: Arrangement) -> GradedResolution:
    """Resolution of S/<dQ/dx_1, ..., dQ/dx_l, Q> with F_1 kept unpruned.

    From F_2 on this is a minimal resolution of D(A) (up to the shift n-1):
    syzygies (f_1..f_l, g) with sum f_i dQ/dx_i + g Q = 0 are exactly the
    logarithmic derivations.
    """
    n, l = len(A), A.nvars
    gens = A.jacobian_generators()
    return free_resolution(gens, shifts=[n - 1] * l + [n], prune_first=False)


def _derivations_from(A: Arrangement, raw: GradedResolution) -> DerivationModule:
    n, l = len(A), A.nvars
    if len(raw.maps) < 2:
        return DerivationModule([], [[]], [])
    grid = raw.maps[1].grid()
    gens = [Derivation(tuple(grid[i][j] for i in range(l))) for j in range(len(grid[0]))]
    shifts = [[s - (n - 1) for s in m.shifts] for m in raw.modules[2:]]
    return DerivationModule(gens, shifts, raw.maps[2:])


def derivation_module(A: Arrangement) -> DerivationModule:
    return _derivations_from(A, _raw_resolution(A))


def determinant(rows: list[list[Poly]]) -> Poly:
    """Laplace expansion along rows, memoized on the set of used columns."""
    m = len(rows)
    if m == 0:
        raise ValueError("empty matrix")
    ring = rows[0][0].ring
    memo: dict[tuple[int, ...], Poly] = {(): ring.one()}
    for r in range(m - 1, -1, -1):
        size = m - r
        nxt = {}
        for cols in combinations(range(m), size):
            acc = ring.zero()
            for pos, c in enumerate(cols):
                entry = rows[r][c]
                if not entry:
                    continue
                minor = memo[cols[:pos] + cols[pos + 1:]]
                if not minor:
                    continue
                term = entry * minor
                acc = acc - term if pos % 2 else acc + term
            nxt[cols] = acc
        memo = nxt
    return memo[tuple(range(m))]


def saito_check(candidates: list[Derivation], A: Arrangement) -> bool:
    """True iff det(delta_i(x_j)) = c Q(A) with c a nonzero constant.

    Raises PreconditionError when a candidate is not logarithmic.
    """
    l = A.nvars
    if len(candidates) != l:
        raise PreconditionError(f"Saito's criterion needs exactly {l} derivations")
    for k, d in enumerate(candidates):
        if len(d.coefficients) != l:
            raise PreconditionError(f"candidate {k} has the wrong number of coefficients")
        if not is_logarithmic(d, A):
            raise PreconditionError(f"candidate {k} is not logarithmic")
    det = determinant([list(d.coefficients) for d in candidates])
    if not det:
        return False
    Q = A.defining_polynomial()
    if det.degree() != Q.degree():
        return False
    c = det.lc() / Q.lc()
    return det == Q * c


@dataclass
class Classification:
    kind: str
    betti: BettiTable
    resolution: GradedResolution
    derivations: DerivationModule
    exponents: tuple[int, ...] | None = None
    poexp: tuple[int, ...] | None = None
    level: int | None = None
    alpha: Poly | None = None
    flags: list[str] = field(default_factory=list)
    timings: dict = field(default_factory=dict)

    @property
    def is_free(self) -> bool:
        return self.kind == FREE

    @property
    def is_pog(self) -> bool:
        return self.kind == POG

    @property
    def projdim(self) -> int:
        return self.betti.projdim

    def resolution_string(self) -> str:
        return format_resolution(self.betti_shifts())

    def betti_shifts(self) -> list[list[int]]:
        return [self.betti.shifts(i) for i in range(self.betti.projdim + 1)]

    def to_json(self, timings: bool = False) -> dict:
        out: dict = {"kind": self.kind}
        if self.exponents is not None:
            out["exponents"] = list(self.exponents)
        if self.poexp is not None:
            out["poexp"] = list(self.poexp)
            out["level"] = self.level
            out["alpha"] = str(self.alpha)
        out["projdim"] = self.projdim
        out["betti"] = self.betti.to_json()
        out["resolution"] = self.resolution_string()
        out["derivation_resolution"] = self.derivations.resolution_string()
        if self.flags:
            out["flags"] = list(self.flags)
        if timings:
            out["timings"] = {k: round(v, 6) for k, v in self.timings.items()}
        return out


def classify(A: Arrangement) -> Classification:
    """Free / plus-one generated / other, read off minimal resolutions of S/J(A) and D(A)."""
    t0 = time.perf_counter()
    n, l = len(A), A.nvars
    raw = _raw_resolution(A)
    t1 = time.perf_counter()
    res, betti = minimalize(raw)
    t2 = time.perf_counter()
    D = _derivations_from(A, raw)
    timings = {"resolution": t1 - t0, "minimalize": t2 - t1}
    flags: list[str] = []

    if n == 0:
        # Q = 1, so J is the unit ideal and every derivation is logarithmic
        D = DerivationModule(list(_unit_derivations(A.ring)), [[0] * l], [])
        return Classification(FREE, betti, res, D, exponents=(0,) * l, timings=timings)

    pd = betti.projdim
    if pd <= 2:
        if D.projdim != 0 or len(D.generators) != l:
            raise AssertionError("Terao's criterion and the derivation module disagree")
        return Classification(FREE, betti, res, D, exponents=tuple(D.pdegs), timings=timings)

    kind = OTHER
    poexp = level = alpha = None
    if pd == 3 and betti.total(3) == 1 and D.projdim == 1 and len(D.shifts[1]) == 1:
        top = D.shifts[1][0]
        d = top - 1
        rows = [i for i, s in enumerate(D.shifts[0]) if s == d]
        if rows and len(D.generators) == l + 1:
            col = D.maps[0].columns[0].components()
            hits = [col[i] for i in rows if col[i]]
            if hits:
                kind = POG
                level = d
                rest = Counter(D.shifts[0])
                rest[d] -= 1
                poexp = tuple(sorted(rest.elements()))
                alpha = hits[0]
            else:
                flags.append("shape of a plus-one generated resolution but the linear entry vanishes")
    return Classification(kind, betti, res, D, poexp=poexp, level=level, alpha=alpha, flags=flags,
                          timings=timings)


def _unit_derivations(ring: Ring):
    for i in range(ring.nvars):
        yield Derivation(tuple(ring.one() if j == i else ring.zero() for j in range(ring.nvars)))


# -- theorem harnesses -------------------------------------------------


def _restriction_size(A: Arrangement, h: int) -> int:
    return len(A.restriction(h))


def verify_deletion_theorem(A: Arrangement, h: int, base: Classification | None = None) -> dict:
    """Deleting a hyperplane from a free essential arrangement gives free or POG.

    In the POG case the poexp must equal exp(A) and the level must be
    |A minus H| - |A^H|.
    """
    if not A.is_essential():
        raise PreconditionError("arrangement is not essential")
    if not 0 <= h < len(A):
        raise ArrangementError(f"hyperplane index {h} out of range")
    base = base or classify(A)
    if not base.is_free:
        raise PreconditionError("arrangement is not free")
    B = A.deletion(h)
    cB = classify(B)
    restricted = _restriction_size(A, h)
    predicted_level = len(B) - restricted
    report = {
        "theorem": "deletion",
        "hyperplane": h,
        "n": len(A),
        "n_deleted": len(B),
        "n_restricted": restricted,
        "exponents": list(base.exponents),
        "deleted_kind": cB.kind,
        "predicted_poexp": list(base.exponents),
        "predicted_level": predicted_level,
    }
    holds = cB.kind in (FREE, POG)
    if cB.is_pog:
        report["computed_poexp"] = list(cB.poexp)
        report["computed_level"] = cB.level
        holds = holds and tuple(cB.poexp) == tuple(base.exponents) and cB.level == predicted_level
    elif cB.is_free:
        report["computed_exponents"] = list(cB.exponents)
    report["holds"] = holds
    return report


def verify_addition_theorem(A: Arrangement, h: int, deleted: Classification | None = None) -> dict:
    """Adding H to a free A minus H, under |A minus H| - |A^H| >= e_{l-2}."""
    if not A.is_essential():
        raise PreconditionError("arrangement is not essential")
    if not 0 <= h < len(A):
        raise ArrangementError(f"hyperplane index {h} out of range")
    B = A.deletion(h)
    deleted = deleted or classify(B)
    if not deleted.is_free:
        raise PreconditionError("the deletion is not free")
    e = sorted(deleted.exponents)
    l = A.nvars
    restricted = _restriction_size(A, h)
    gap = len(B) - restricted
    report = {
        "theorem": "addition",
        "hyperplane": h,
        "n": len(A),
        "n_deleted": len(B),
        "n_restricted": restricted,
        "deleted_exponents": e,
    }
    if l < 3 or gap < e[l - 3]:
        report["applicable"] = False
        report["holds"] = True
        return report
    predicted_poexp = tuple(e[: l - 2] + [e[l - 2] + 1, e[l - 1] + 1])
    predicted_level = e[l - 2] + e[l - 1] - len(A) + restricted + 1
    cA = classify(A)
    report.update(
        applicable=True,
        kind=cA.kind,
        predicted_poexp=list(predicted_poexp),
        predicted_level=predicted_level,
    )
    holds = cA.kind in (FREE, POG)
    if cA.is_pog:
        report["computed_poexp"] = list(cA.poexp)
        report["computed_level"] = cA.level
        holds = holds and tuple(cA.poexp) == predicted_poexp and cA.level == predicted_level
    elif cA.is_free:
        report["computed_exponents"] = list(cA.exponents)
    report["holds"] = holds
    return report
