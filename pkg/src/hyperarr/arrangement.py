"""Central hyperplane arrangements over Q and their intersection lattices."""

from __future__ import annotations

from dataclasses import dataclass
from functools import cached_property
from itertools import combinations
from typing import Iterable, Sequence

from .algebra import DEFAULT_NAMES, ParseError, Poly, Ring, rat
from .ideals import Ideal
from .linalg import nullspace, primitive, rank, rref

__all__ = [
    "LinearForm",
    "Arrangement",
    "Flat",
    "IntersectionLattice",
    "ArrangementError",
    "cone",
    "brute_force_flats",
    "to_json",
    "from_json",
    "to_text",
    "from_text",
    "load",
]


class ArrangementError(ValueError):
    """Invalid arrangement input or a selector that does not fit it."""


@dataclass(frozen=True, order=True)
class LinearForm:
    """A hyperplane's normal vector: coprime integers, first nonzero entry positive."""

    coeffs: tuple[int, ...]

    def __post_init__(self):
        if not any(self.coeffs):
            raise ArrangementError("zero linear form")
        if primitive(self.coeffs) != tuple(self.coeffs):
            raise ArrangementError(f"linear form {self.coeffs} is not normalized")

    @classmethod
    def from_vector(cls, v: Sequence) -> "LinearForm":
        if not any(rat(x) for x in v):
            raise ArrangementError("zero linear form")
        return cls(primitive(v))

    def poly(self, ring: Ring) -> Poly:
        return ring.linear_form(self.coeffs)

    def render(self, names: Sequence[str]) -> str:
        return str(self.poly(Ring(names)))


@dataclass(frozen=True, order=True)
class Flat:
    """A flat X, keyed by the closed set of hyperplanes containing it."""

    indices: tuple[int, ...]
    rank: int

    def __len__(self):
        return len(self.indices)

    def to_json(self) -> list[int]:
        return list(self.indices)


def _default_names(l: int) -> tuple[str, ...]:
    return Ring.standard(l).names


class _Span:
    """Row-reduced basis of a span of normal vectors, with membership tests."""

    def __init__(self, rows: Sequence[Sequence]):
        self.rows, self.pivots = rref(rows) if rows else ([], [])

    def contains(self, v: Sequence) -> bool:
        w = [rat(x) for x in v]
        for row, p in zip(self.rows, self.pivots):
            if w[p]:
                f = w[p]
                w = [a - f * b for a, b in zip(w, row)]
        return not any(w)

    @property
    def dim(self) -> int:
        return len(self.pivots)


@dataclass(frozen=True)
class Arrangement:
    """An ordered list of distinct central hyperplanes in l variables."""

    forms: tuple[LinearForm, ...]
    names: tuple[str, ...]

    def __post_init__(self):
        l = len(self.names)
        for f in self.forms:
            if len(f.coeffs) != l:
                raise ArrangementError("form length does not match the variable count")
        if len(set(self.forms)) != len(self.forms):
            raise ArrangementError("duplicate hyperplane")

    # -- construction --------------------------------------------------

    @classmethod
    def from_vectors(cls, vectors: Iterable[Sequence], names: Sequence[str] | int | None = None) -> "Arrangement":
        vectors = [list(v) for v in vectors]
        if isinstance(names, int):
            names = _default_names(names)
        if names is None:
            if not vectors:
                raise ArrangementError("variable count needed for an empty arrangement")
            names = _default_names(len(vectors[0]))
        names = tuple(names)
        forms = []
        for v in vectors:
            if len(v) != len(names):
                raise ArrangementError(f"form {v} has {len(v)} coefficients, expected {len(names)}")
            f = LinearForm.from_vector(v)
            if f in forms:
                raise ArrangementError(f"duplicate hyperplane {f.render(names)}")
            forms.append(f)
        return cls(tuple(forms), names)

    @classmethod
    def parse(cls, items: Iterable, names: Sequence[str] | int | None = None) -> "Arrangement":
        """Build from coefficient vectors or linear-form strings (``"x - y"``)."""
        items = list(items)
        if isinstance(names, int):
            names = _default_names(names)
        if names is None and any(isinstance(s, str) for s in items):
            names = _infer_names(items)
        vectors = []
        for item in items:
            if isinstance(item, str):
                vectors.append(_parse_form(item, tuple(names)))
            else:
                vectors.append(list(item))
        return cls.from_vectors(vectors, names)

    @classmethod
    def boolean(cls, l: int) -> "Arrangement":
        return cls.from_vectors([[int(i == j) for j in range(l)] for i in range(l)], l)

    @classmethod
    def braid(cls, l: int) -> "Arrangement":
        vecs = []
        for i, j in combinations(range(l), 2):
            v = [0] * l
            v[i], v[j] = 1, -1
            vecs.append(v)
        return cls.from_vectors(vecs, l)

    # -- basic data ----------------------------------------------------

    @property
    def nvars(self) -> int:
        return len(self.names)

    def __len__(self):
        return len(self.forms)

    @cached_property
    def ring(self) -> Ring:
        return Ring(self.names)

    def vectors(self) -> list[tuple[int, ...]]:
        return [f.coeffs for f in self.forms]

    def linear_forms(self) -> list[Poly]:
        return [f.poly(self.ring) for f in self.forms]

    def render_forms(self) -> list[str]:
        return [str(p) for p in self.linear_forms()]

    def __str__(self):
        return "{" + ", ".join(self.render_forms()) + "}"

    def index_of(self, form: LinearForm | Sequence) -> int:
        if not isinstance(form, LinearForm):
            form = LinearForm.from_vector(form)
        try:
            return self.forms.index(form)
        except ValueError:
            raise ArrangementError("hyperplane not in the arrangement") from None

    def same_set(self, other: "Arrangement") -> bool:
        return self.names == other.names and set(self.forms) == set(other.forms)

    # -- polynomials ---------------------------------------------------

    def defining_polynomial(self) -> Poly:
        q = self.ring.one()
        for p in self.linear_forms():
            q = q * p
        return q

    def jacobian_generators(self) -> list[Poly]:
        """The partials of Q, followed by Q itself."""
        q = self.defining_polynomial()
        return [q.diff(i) for i in range(self.nvars)] + [q]

    def jacobian_ideal(self) -> Ideal:
        """<dQ/dx_1, ..., dQ/dx_l>; Q is dropped by the Euler relation (n >= 1)."""
        gens = self.jacobian_generators()
        if len(self) == 0:
            return Ideal([gens[-1]], self.ring)
        return Ideal(gens[:-1], self.ring)

    # -- lattice -------------------------------------------------------

    @cached_property
    def rank(self) -> int:
        return rank(self.vectors()) if self.forms else 0

    def is_essential(self) -> bool:
        return self.rank == self.nvars

    def closure(self, indices: Iterable[int]) -> Flat:
        idx = sorted(set(indices))
        for i in idx:
            if not 0 <= i < len(self):
                raise ArrangementError(f"hyperplane index {i} out of range")
        span = _Span([self.forms[i].coeffs for i in idx])
        closed = tuple(i for i, f in enumerate(self.forms) if span.contains(f.coeffs))
        return Flat(closed, span.dim)

    def flat(self, indices: Iterable[int]) -> Flat:
        """The flat cut out by the given hyperplanes (closure of the index set)."""
        return self.closure(indices)

    def is_flat(self, X: Flat) -> bool:
        return self.closure(X.indices) == X

    def center(self) -> Flat:
        return self.closure(range(len(self)))

    @cached_property
    def lattice(self) -> "IntersectionLattice":
        return IntersectionLattice.build(self)

    def flats(self, rank: int | None = None) -> list[Flat]:
        return self.lattice.flats(rank)

    # -- derived arrangements ------------------------------------------

    def _check_flat(self, X: Flat) -> None:
        if not self.is_flat(X):
            raise ArrangementError(f"{list(X.indices)} is not a flat of the arrangement")

    def localization(self, X: Flat) -> "Arrangement":
        """A_X: the hyperplanes containing X, in their original order."""
        self._check_flat(X)
        return Arrangement(tuple(self.forms[i] for i in X.indices), self.names)

    def deletion(self, i: int) -> "Arrangement":
        if not 0 <= i < len(self):
            raise ArrangementError(f"hyperplane index {i} out of range")
        return Arrangement(self.forms[:i] + self.forms[i + 1:], self.names)

    def addition(self, form: Sequence) -> "Arrangement":
        f = LinearForm.from_vector(form)
        if f in self.forms:
            raise ArrangementError("hyperplane already present")
        return Arrangement(self.forms + (f,), self.names)

    def restriction(self, i: int) -> "Arrangement":
        """A^H for H the i-th hyperplane, as an arrangement in l-1 variables."""
        if not 0 <= i < len(self):
            raise ArrangementError(f"hyperplane index {i} out of range")
        basis = nullspace([self.forms[i].coeffs])
        out: list[LinearForm] = []
        for j, f in enumerate(self.forms):
            if j == i:
                continue
            v = [sum((rat(a) * b for a, b in zip(f.coeffs, col)), rat(0)) for col in basis]
            if not any(v):
                continue
            g = LinearForm.from_vector(v)
            if g not in out:
                out.append(g)
        return Arrangement(tuple(out), _default_names(self.nvars - 1))

    def essentialize(self, X: Flat | None = None) -> tuple["Arrangement", list[list]]:
        """A_X in rank(X) coordinates plus the l x l change of coordinates used.

        Row k of the returned matrix is the k-th new coordinate written in the
        old ones; the first rank(X) rows span I(X).
        """
        if X is None:
            X = self.center()
        self._check_flat(X)
        vecs = [self.forms[i].coeffs for i in X.indices]
        rows, pivots = rref(vecs) if vecs else ([], [])
        l = self.nvars
        matrix = [list(r) for r in rows]
        for c in range(l):
            if c not in pivots:
                matrix.append([rat(int(c == j)) for j in range(l)])
        s = len(pivots)
        new = [LinearForm.from_vector([rat(v[p]) for p in pivots]) for v in vecs]
        return Arrangement(tuple(new), _default_names(s)), matrix

    def flat_prime_ideal(self, X: Flat) -> Ideal:
        """I(X), generated by rank(X) independent forms of A_X."""
        self._check_flat(X)
        chosen: list[int] = []
        for i in X.indices:
            if rank([self.forms[j].coeffs for j in chosen + [i]]) == len(chosen) + 1:
                chosen.append(i)
        return Ideal([self.forms[i].poly(self.ring) for i in chosen], self.ring)

    def transformed(self, matrix: Sequence[Sequence]) -> "Arrangement":
        """Image under the coordinate change x -> M x (forms become alpha o M)."""
        l = self.nvars
        if rank(matrix) != l:
            raise ArrangementError("singular change of coordinates")
        vecs = []
        for f in self.forms:
            vecs.append([sum((rat(f.coeffs[i]) * rat(matrix[i][j]) for i in range(l)), rat(0)) for j in range(l)])
        return Arrangement.from_vectors(vecs, self.names)

    def permuted(self, perm: Sequence[int]) -> "Arrangement":
        return Arrangement(tuple(self.forms[i] for i in perm), self.names)


def _infer_names(items) -> tuple[str, ...]:
    import re

    used = set()
    for s in items:
        if isinstance(s, str):
            used.update(re.findall(r"[A-Za-z_][A-Za-z_0-9]*", s))
    if used <= set(DEFAULT_NAMES):
        top = max((DEFAULT_NAMES.index(u) for u in used), default=0)
        return DEFAULT_NAMES[: top + 1]
    if all(re.fullmatch(r"x\d+", u) for u in used):
        top = max(int(u[1:]) for u in used)
        return tuple(f"x{i + 1}" for i in range(top))
    raise ArrangementError(f"cannot infer variables from {sorted(used)}; give them explicitly")


def _parse_form(text: str, names: tuple[str, ...]) -> list:
    try:
        p = Ring(names).parse(text)
    except ParseError as e:
        raise ArrangementError(str(e)) from None
    if not p:
        raise ArrangementError(f"zero form {text!r}")
    if p.constant_term():
        raise ArrangementError(f"{text!r} is not central (has a constant term); use cone to homogenize")
    if p.degree() != 1 or not p.is_homogeneous():
        raise ArrangementError(f"{text!r} is not a linear form")
    coeffs = [rat(0)] * len(names)
    for exps, c in p.terms():
        coeffs[exps.index(1)] = c
    return coeffs


def cone(affine: Iterable, names: Sequence[str] | int | None = None, new_name: str | None = None) -> Arrangement:
    """Coning: alpha + c becomes alpha + c*z, then the hyperplane z = 0 is appended.

    ``affine`` holds vectors ``[a_1, ..., a_l, c]`` or strings like ``"x - 1"``.
    """
    affine = list(affine)
    if isinstance(names, int):
        names = _default_names(names)
    if names is None:
        if any(isinstance(a, str) for a in affine):
            names = _infer_names(affine)
        else:
            names = _default_names(len(affine[0]) - 1)
    names = tuple(names)
    if new_name is None:
        new_name = next(n for n in ("z", "w", "h", "u", "v", "x0") if n not in names)
    vecs = []
    ring = Ring(names)
    for a in affine:
        if isinstance(a, str):
            p = ring.parse(a)
            if p.degree() > 1:
                raise ArrangementError(f"{a!r} is not affine linear")
            v = [rat(0)] * (len(names) + 1)
            for exps, c in p.terms():
                if any(exps):
                    v[exps.index(1)] = c
                else:
                    v[-1] = c
        else:
            v = [rat(x) for x in a]
            if len(v) != len(names) + 1:
                raise ArrangementError("affine forms need l coefficients plus a constant")
        if not any(v[:-1]):
            raise ArrangementError("zero form")
        vecs.append(v)
    vecs.append([0] * len(names) + [1])
    return Arrangement.from_vectors(vecs, names + (new_name,))


@dataclass
class IntersectionLattice:
    """L(A) by rank, with covering relations X < Y (rank(Y) = rank(X) + 1)."""

    levels: list[list[Flat]]
    covers: set[tuple[Flat, Flat]]

    @classmethod
    def build(cls, A: Arrangement) -> "IntersectionLattice":
        levels = [[Flat((), 0)]]
        covers: set = set()
        while True:
            nxt: dict[tuple[int, ...], Flat] = {}
            for X in levels[-1]:
                seen = set(X.indices)
                for h in range(len(A)):
                    if h in seen:
                        continue
                    Y = A.closure(X.indices + (h,))
                    seen.update(Y.indices)
                    Y = nxt.setdefault(Y.indices, Y)
                    covers.add((X, Y))
            if not nxt:
                break
            levels.append(sorted(nxt.values()))
        return cls(levels, covers)

    def flats(self, rank: int | None = None) -> list[Flat]:
        if rank is None:
            return [X for level in self.levels for X in level]
        if 0 <= rank < len(self.levels):
            return list(self.levels[rank])
        return []

    @property
    def rank(self) -> int:
        return len(self.levels) - 1

    def counts(self) -> list[int]:
        return [len(level) for level in self.levels]

    def center(self) -> Flat:
        (top,) = self.levels[-1]
        return top

    def to_json(self) -> dict:
        return {
            "levels": [[X.to_json() for X in level] for level in self.levels],
            "covers": sorted([X.to_json(), Y.to_json()] for X, Y in self.covers),
        }


def brute_force_flats(A: Arrangement) -> set[Flat]:
    """Closure of every one of the 2^n hyperplane subsets, deduplicated."""
    out = set()
    for k in range(len(A) + 1):
        for sub in combinations(range(len(A)), k):
            vecs = [A.forms[i].coeffs for i in sub]
            r = rank(vecs) if vecs else 0
            closed = tuple(i for i in range(len(A)) if (rank(vecs + [A.forms[i].coeffs]) if vecs else 1) == r)
            out.add(Flat(closed, r))
    return out


# -- file formats ------------------------------------------------------

FORMAT_NAME = "hyperarr-arrangement"
FORMAT_VERSION = 1


def to_json(A: Arrangement) -> dict:
    return {
        "format": FORMAT_NAME,
        "version": FORMAT_VERSION,
        "variables": list(A.names),
        "forms": [list(f.coeffs) for f in A.forms],
    }


def from_json(data: dict) -> Arrangement:
    if not isinstance(data, dict) or "forms" not in data:
        raise ArrangementError("JSON arrangement needs a 'forms' field")
    version = data.get("version", FORMAT_VERSION)
    if version != FORMAT_VERSION:
        raise ArrangementError(f"unsupported format version {version}")
    names = data.get("variables")
    forms = data["forms"]
    if names is None:
        if not forms or not isinstance(forms[0], list):
            raise ArrangementError("'variables' is required")
        names = len(forms[0])
    return Arrangement.parse(forms, names)


def to_text(A: Arrangement) -> str:
    lines = ["vars: " + ", ".join(A.names)]
    lines.extend(A.render_forms())
    return "\n".join(lines) + "\n"


def from_text(text: str) -> Arrangement:
    """One linear form per line; '#' starts a comment; optional ``vars: x, y`` header."""
    names = None
    forms: list[str] = []
    for raw in text.splitlines():
        line = raw.split("#", 1)[0].strip()
        if not line:
            continue
        if line.lower().startswith("vars:"):
            names = tuple(v.strip() for v in line[5:].replace(",", " ").split())
            if not names:
                raise ArrangementError("empty variable list")
            continue
        forms.extend(s.strip() for s in line.split(";") if s.strip())
    if names is None and not forms:
        raise ArrangementError("no forms given")
    return Arrangement.parse(forms, names)


def load(path) -> Arrangement:
    import json
    from pathlib import Path

    text = Path(path).read_text()
    if text.lstrip().startswith("{"):
        try:
            data = json.loads(text)
        except json.JSONDecodeError as e:
            raise ArrangementError(f"{path}: invalid JSON ({e})") from None
        return from_json(data)
    return from_text(text)
