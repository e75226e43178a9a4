"""Associated primes of S/J(A), all of the form I(X) for flats X of rank >= 2."""

from __future__ import annotations

import time
from dataclasses import dataclass

from .arrangement import Arrangement, ArrangementError, Flat
from .classify import Classification, PreconditionError, classify
from .ideals import Ideal

__all__ = [
    "AssociatedPrimes",
    "candidate_flats",
    "is_associated_oracle",
    "associated_primes",
    "cross_validate_ass",
    "FREE_SHORTCUT",
    "COMBINATORIAL",
    "ORACLE",
]

FREE_SHORTCUT = "free_shortcut"
COMBINATORIAL = "combinatorial_thm47"
ORACLE = "oracle_saturation"


@dataclass(frozen=True)
class AssociatedPrimes:
    flats: tuple[Flat, ...]
    method: str

    def __contains__(self, X: Flat) -> bool:
        return X in self.flats

    def embedded(self) -> tuple[Flat, ...]:
        return tuple(X for X in self.flats if X.rank > 2)

    def to_json(self, A: Arrangement) -> list[dict]:
        out = []
        for X in self.flats:
            gens = A.flat_prime_ideal(X).generators
            out.append({
                "flat": X.to_json(),
                "rank": X.rank,
                "generators": [str(g) for g in gens],
                "method": self.method,
            })
        return out


def _sorted(flats) -> tuple[Flat, ...]:
    return tuple(sorted(set(flats), key=lambda X: (X.rank, X.indices)))


def candidate_flats(A: Arrangement, projdim: int | None = None) -> list[Flat]:
    """Flats of rank 2..min(rank(A), projdim(S/J(A))).

    depth(S/J) = l - projdim bounds the dimension of every associated prime
    from below, so no prime of codimension above projdim can occur.
    """
    if projdim is None:
        projdim = classify(A).projdim
    top = min(A.rank, projdim)
    out: list[Flat] = []
    for r in range(2, top + 1):
        out.extend(A.flats(r))
    return out


def is_associated_oracle(A: Arrangement, X: Flat) -> bool:
    """Is I(X) associated to S/J(A)?

    Localizing at I(X) reduces the question to A_X; in coordinates where
    I(X) = <x_1..x_s> it asks whether the maximal graded ideal m is
    associated to S/J(A_X), i.e. whether J(A_X) : m is strictly larger.
    """
    if X.rank < 2:
        raise PreconditionError("flats of rank < 2 never give associated primes")
    if not A.is_flat(X):
        raise ArrangementError(f"{list(X.indices)} is not a flat of the arrangement")
    B, _ = A.essentialize(X)
    J = B.jacobian_ideal()
    m = Ideal(B.ring.gens(), B.ring)
    return J.quotient_ideal(m) != J


def _rank3_nonfree(A: Arrangement, X: Flat) -> bool:
    B, _ = A.essentialize(X)
    return not classify(B).is_free


def associated_primes(A: Arrangement, method: str | None = None,
                      classification: Classification | None = None) -> AssociatedPrimes:
    """Ass(S/J(A)) as a set of flats.

    Free arrangements have exactly the rank-2 flats; when projdim(S/J) = 3 the
    rank-3 flats with non-free localization are added; otherwise every
    candidate of rank >= 3 goes through the quotient oracle.  ``method``
    forces one route (used for cross-validation).
    """
    if len(A) < 2:
        return AssociatedPrimes((), method or FREE_SHORTCUT)
    c = classification or classify(A)
    rank2 = A.flats(2)
    if method is None:
        if c.is_free:
            method = FREE_SHORTCUT
        elif c.projdim == 3:
            method = COMBINATORIAL
        else:
            method = ORACLE
    if method == FREE_SHORTCUT:
        if not c.is_free:
            raise PreconditionError("free shortcut needs a free arrangement")
        return AssociatedPrimes(_sorted(rank2), method)
    if method == COMBINATORIAL:
        if c.projdim != 3:
            raise PreconditionError("the combinatorial rule needs projdim(S/J) = 3")
        extra = [X for X in A.flats(3) if _rank3_nonfree(A, X)]
        return AssociatedPrimes(_sorted(rank2 + extra), method)
    if method == ORACLE:
        extra = [X for X in candidate_flats(A, c.projdim) if X.rank >= 3 and is_associated_oracle(A, X)]
        return AssociatedPrimes(_sorted(rank2 + extra), method)
    raise ValueError(f"unknown method {method!r}")


def cross_validate_ass(A: Arrangement, classification: Classification | None = None) -> dict:
    """Compare the combinatorial rule with the quotient oracle (projdim 3 only)."""
    c = classification or classify(A)
    if c.projdim != 3:
        raise PreconditionError("cross-validation needs projdim(S/J) = 3")
    t0 = time.perf_counter()
    comb = associated_primes(A, COMBINATORIAL, c)
    t1 = time.perf_counter()
    orac = associated_primes(A, ORACLE, c)
    t2 = time.perf_counter()
    a, b = set(comb.flats), set(orac.flats)
    return {
        "agree": a == b,
        "combinatorial": [X.to_json() for X in comb.flats],
        "oracle": [X.to_json() for X in orac.flats],
        "only_combinatorial": sorted(X.to_json() for X in a - b),
        "only_oracle": sorted(X.to_json() for X in b - a),
        "timings": {"combinatorial": t1 - t0, "oracle": t2 - t1},
    }
