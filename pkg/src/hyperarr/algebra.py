"""Exact polynomials over the rationals and graded free modules.

Monomials are packed into single Python integers.  A monomial with exponent
vector ``e`` in ``l`` variables has key::

    key = deg(e) * D - rest(e),    rest(e) = sum(e[i] << (BITS * i))

so the last variable occupies the most significant field of ``rest``.  With
this layout

* multiplying monomials is adding keys, and
* comparing keys as integers is the degree reverse lexicographic order.

Every field carries a spare guard bit, which makes divisibility a single
subtraction (see :meth:`Ring.divides`).

A term ``m * e_c`` of a free module is packed the same way::

    key = ((offset[c] + key(m) * scale) << vbits) | c

The per-component ``offset`` and the ``scale`` fix the module order.  Two
families are used: degree-then-position orders built from generator shifts
and Schreyer orders induced by the leading terms of a generating set.  Any
choice of offsets yields a term order compatible with multiplication.
"""

from __future__ import annotations

import re
from fractions import Fraction
from itertools import combinations
from typing import Iterable, Iterator, Sequence

from gmpy2 import mpq

__all__ = [
    "Rat",
    "rat",
    "Ring",
    "Poly",
    "FreeModule",
    "ModuleElement",
    "HomMatrix",
    "ParseError",
]

Rat = type(mpq(0))

BITS = 16
POS_BITS = 32
MAX_EXPONENT = (1 << (BITS - 1)) - 1

DEFAULT_NAMES = ("x", "y", "z", "t", "w")


class ParseError(ValueError):
    """Raised for malformed polynomial or arrangement text."""


def rat(value) -> Rat:
    """Coerce ints, Fractions, strings like ``'-2/3'`` and mpq to a Rat."""
    if isinstance(value, Rat):
        return value
    if isinstance(value, float):
        raise TypeError("floating point coefficients are not supported")
    if isinstance(value, Fraction):
        return mpq(value.numerator, value.denominator)
    return mpq(value)


def _add_into(acc: dict, items, shift: int, factor) -> None:
    """acc += factor * (items shifted by key offset ``shift``), in place."""
    for k, c in items:
        k += shift
        v = acc.get(k)
        if v is None:
            if c:
                acc[k] = factor * c
        else:
            v += factor * c
            if v:
                acc[k] = v
            else:
                del acc[k]


class Ring:
    """The polynomial ring Q[x_1, ..., x_l] with the degrevlex order."""

    __slots__ = ("names", "nvars", "R", "D", "G", "_rest_mask", "_dshift")

    def __init__(self, names: Sequence[str]):
        names = tuple(names)
        if len(set(names)) != len(names):
            raise ValueError("variable names must be distinct")
        for n in names:
            if not re.fullmatch(r"[A-Za-z_][A-Za-z_0-9]*", n):
                raise ValueError(f"bad variable name {n!r}")
        self.names = names
        self.nvars = len(names)
        self.R = 1 << (BITS * self.nvars)
        self.D = self.R << POS_BITS
        self._rest_mask = self.R - 1
        self._dshift = BITS * self.nvars + POS_BITS
        self.G = sum(1 << (BITS * i + BITS - 1) for i in range(self.nvars))

    @classmethod
    def standard(cls, nvars: int) -> "Ring":
        if nvars <= len(DEFAULT_NAMES):
            return cls(DEFAULT_NAMES[:nvars])
        return cls([f"x{i + 1}" for i in range(nvars)])

    def __eq__(self, other):
        return isinstance(other, Ring) and self.names == other.names

    def __hash__(self):
        return hash(("Ring", self.names))

    def __repr__(self):
        return f"Ring({', '.join(self.names)})"

    # -- monomial keys -------------------------------------------------

    def key(self, exps: Sequence[int]) -> int:
        if len(exps) != self.nvars:
            raise ValueError("exponent vector has the wrong length")
        rest = 0
        deg = 0
        for i, e in enumerate(exps):
            if e < 0 or e > MAX_EXPONENT:
                raise ValueError("exponent out of range")
            rest |= e << (BITS * i)
            deg += e
        return deg * self.D - rest

    def rest(self, key: int) -> int:
        return (-key) & self._rest_mask

    def exps(self, key: int) -> tuple[int, ...]:
        rest = (-key) & self._rest_mask
        mask = (1 << BITS) - 1
        return tuple((rest >> (BITS * i)) & mask for i in range(self.nvars))

    def degree(self, key: int) -> int:
        return (key + ((-key) & self._rest_mask)) >> self._dshift

    def divides(self, rest_a: int, rest_b: int) -> bool:
        """True when the monomial with packed exponents ``rest_a`` divides ``rest_b``."""
        G = self.G
        return ((rest_b | G) - rest_a) & G == G

    # -- constructors --------------------------------------------------

    def zero(self) -> "Poly":
        return Poly(self, {})

    def one(self) -> "Poly":
        return Poly(self, {0: mpq(1)})

    def const(self, c) -> "Poly":
        c = rat(c)
        return Poly(self, {0: c} if c else {})

    def var(self, i: int) -> "Poly":
        if not 0 <= i < self.nvars:
            raise IndexError("variable index out of range")
        e = [0] * self.nvars
        e[i] = 1
        return Poly(self, {self.key(e): mpq(1)})

    def gens(self) -> list["Poly"]:
        return [self.var(i) for i in range(self.nvars)]

    def monomial(self, exps: Sequence[int], coeff=1) -> "Poly":
        c = rat(coeff)
        return Poly(self, {self.key(exps): c} if c else {})

    def from_terms(self, terms: Iterable[tuple[Sequence[int], object]]) -> "Poly":
        acc: dict = {}
        _add_into(acc, ((self.key(e), rat(c)) for e, c in terms), 0, 1)
        return Poly(self, acc)

    def linear_form(self, coeffs: Sequence) -> "Poly":
        if len(coeffs) != self.nvars:
            raise ValueError("coefficient vector has the wrong length")
        return self.from_terms(
            ((tuple(int(j == i) for j in range(self.nvars)), c) for i, c in enumerate(coeffs))
        )

    def parse(self, text: str) -> "Poly":
        return _Parser(self, text).parse()


class Poly:
    """An immutable polynomial: a map from monomial keys to nonzero Rats."""

    __slots__ = ("ring", "coeffs")

    def __init__(self, ring: Ring, coeffs: dict):
        self.ring = ring
        self.coeffs = coeffs

    # -- inspection ----------------------------------------------------

    def is_zero(self) -> bool:
        return not self.coeffs

    def __bool__(self):
        return bool(self.coeffs)

    def __len__(self):
        return len(self.coeffs)

    def sorted_keys(self) -> list[int]:
        return sorted(self.coeffs, reverse=True)

    def terms(self) -> list[tuple[tuple[int, ...], Rat]]:
        """(exponents, coefficient) pairs, strictly descending in degrevlex."""
        ex = self.ring.exps
        return [(ex(k), self.coeffs[k]) for k in self.sorted_keys()]

    def lead_key(self) -> int:
        return max(self.coeffs)

    def lm(self) -> tuple[int, ...]:
        return self.ring.exps(self.lead_key())

    def lc(self) -> Rat:
        return self.coeffs[self.lead_key()]

    def degree(self) -> int:
        if not self.coeffs:
            return -1
        deg = self.ring.degree
        return max(deg(k) for k in self.coeffs)

    def is_homogeneous(self) -> bool:
        deg = self.ring.degree
        return len({deg(k) for k in self.coeffs}) <= 1

    def is_constant(self) -> bool:
        return not self.coeffs or (len(self.coeffs) == 1 and 0 in self.coeffs)

    def constant_term(self) -> Rat:
        return self.coeffs.get(0, mpq(0))

    def variables(self) -> set[int]:
        used: set[int] = set()
        for k in self.coeffs:
            used.update(i for i, e in enumerate(self.ring.exps(k)) if e)
        return used

    # -- arithmetic ----------------------------------------------------

    def _check(self, other: "Poly") -> None:
        if self.ring != other.ring:
            raise ValueError("polynomials live in different rings")

    def _coerce(self, other) -> "Poly":
        if isinstance(other, Poly):
            self._check(other)
            return other
        return self.ring.const(other)

    def __add__(self, other):
        other = self._coerce(other)
        acc = dict(self.coeffs)
        _add_into(acc, other.coeffs.items(), 0, 1)
        return Poly(self.ring, acc)

    __radd__ = __add__

    def __neg__(self):
        return Poly(self.ring, {k: -c for k, c in self.coeffs.items()})

    def __sub__(self, other):
        other = self._coerce(other)
        acc = dict(self.coeffs)
        _add_into(acc, other.coeffs.items(), 0, -1)
        return Poly(self.ring, acc)

    def __rsub__(self, other):
        return self._coerce(other) - self

    def __mul__(self, other):
        if isinstance(other, ModuleElement):
            return other.__rmul__(self)
        if not isinstance(other, Poly):
            c = rat(other)
            if not c:
                return self.ring.zero()
            return Poly(self.ring, {k: c * v for k, v in self.coeffs.items()})
        self._check(other)
        a, b = self.coeffs, other.coeffs
        if len(a) < len(b):
            a, b = b, a
        acc: dict = {}
        items = list(a.items())
        for kb, cb in b.items():
            _add_into(acc, items, kb, cb)
        return Poly(self.ring, acc)

    __rmul__ = __mul__

    def __pow__(self, n: int):
        if n < 0:
            raise ValueError("negative exponent")
        result = self.ring.one()
        base = self
        while n:
            if n & 1:
                result = result * base
            n >>= 1
            if n:
                base = base * base
        return result

    def scale_monomial(self, key: int, coeff=1) -> "Poly":
        c = rat(coeff)
        return Poly(self.ring, {k + key: c * v for k, v in self.coeffs.items()})

    def monic(self) -> "Poly":
        if not self.coeffs:
            return self
        return self * (1 / self.lc())

    def __eq__(self, other):
        if isinstance(other, Poly):
            return self.ring == other.ring and self.coeffs == other.coeffs
        if isinstance(other, (int, Fraction, Rat)):
            return self == self.ring.const(other)
        return NotImplemented

    def __hash__(self):
        return hash((self.ring, frozenset(self.coeffs.items())))

    # -- calculus and substitution -------------------------------------

    def diff(self, i: int) -> "Poly":
        """Partial derivative with respect to variable ``i``."""
        ring = self.ring
        if not 0 <= i < ring.nvars:
            raise IndexError("variable index out of range")
        step = ring.D - (1 << (BITS * i))  # key of x_i
        acc = {}
        for k, c in self.coeffs.items():
            e = ring.exps(k)[i]
            if e:
                acc[k - step] = c * e
        return Poly(ring, acc)

    def substitute(self, images: Sequence["Poly"]) -> "Poly":
        """Replace x_i by ``images[i]`` (all in a common target ring)."""
        if len(images) != self.ring.nvars:
            raise ValueError("need one image per variable")
        if not images:
            return self
        target = images[0].ring
        powers: list[dict[int, Poly]] = [{0: target.one()} for _ in images]

        def power(i: int, e: int) -> Poly:
            cache = powers[i]
            if e not in cache:
                cache[e] = power(i, e - 1) * images[i]
            return cache[e]

        acc: dict = {}
        for k, c in self.coeffs.items():
            term = target.const(c)
            for i, e in enumerate(self.ring.exps(k)):
                if e:
                    term = term * power(i, e)
            _add_into(acc, term.coeffs.items(), 0, 1)
        return Poly(target, acc)

    def linear_substitution(self, matrix: Sequence[Sequence]) -> "Poly":
        """Return f(Mx): x_i becomes sum_j M[i][j] x_j.  M must be invertible."""
        from .linalg import rank

        l = self.ring.nvars
        if len(matrix) != l or any(len(row) != l for row in matrix):
            raise ValueError("matrix must be l x l")
        if rank(matrix) != l:
            raise ValueError("singular change of coordinates")
        return self.substitute([self.ring.linear_form(row) for row in matrix])

    def evaluate(self, point: Sequence) -> Rat:
        vals = [rat(v) for v in point]
        total = mpq(0)
        for k, c in self.coeffs.items():
            term = c
            for v, e in zip(vals, self.ring.exps(k)):
                if e:
                    term *= v**e
            total += term
        return total

    # -- text ----------------------------------------------------------

    def __str__(self):
        return render(self)

    def __repr__(self):
        return f"Poly({render(self)!r})"


def _fmt_monomial(names, exps) -> str:
    parts = []
    for n, e in zip(names, exps):
        if e == 1:
            parts.append(n)
        elif e > 1:
            parts.append(f"{n}^{e}")
    return "*".join(parts)


def render(f: Poly) -> str:
    """Canonical text: terms in descending degrevlex order, e.g. ``2*x^2*y - 1/3*z``."""
    if not f.coeffs:
        return "0"
    out = []
    for i, (exps, c) in enumerate(f.terms()):
        neg = c < 0
        a = -c if neg else c
        mono = _fmt_monomial(f.ring.names, exps)
        if not mono:
            body = str(a)
        elif a == 1:
            body = mono
        else:
            body = f"{a}*{mono}"
        if i == 0:
            out.append(("-" if neg else "") + body)
        else:
            out.append((" - " if neg else " + ") + body)
    return "".join(out)


_TOKEN = re.compile(r"\s*(?:(\d+)|([A-Za-z_][A-Za-z_0-9]*)|(\*\*|[-+*/^()]))")


class _Parser:
    """Recursive descent parser for the canonical polynomial grammar.

    expr   := ['+'|'-'] term (('+'|'-') term)*
    term   := factor (('*'|'/') factor)*      division only by constants
    factor := atom ('^' INT)?
    atom   := INT | NAME | '(' expr ')' | '-' factor
    """

    def __init__(self, ring: Ring, text: str):
        self.ring = ring
        self.text = text
        self.tokens = []
        pos = 0
        text = text.rstrip()
        while pos < len(text):
            m = _TOKEN.match(text, pos)
            if not m or m.end() == pos:
                raise ParseError(f"unexpected character at {pos} in {self.text!r}")
            num, name, op = m.groups()
            if num is not None:
                self.tokens.append(("num", int(num)))
            elif name is not None:
                self.tokens.append(("name", name))
            else:
                self.tokens.append(("op", "^" if op == "**" else op))
            pos = m.end()
        self.i = 0

    def peek(self):
        return self.tokens[self.i] if self.i < len(self.tokens) else (None, None)

    def take(self, value=None):
        tok = self.peek()
        if tok[0] is None or (value is not None and tok[1] != value):
            raise ParseError(f"expected {value or 'token'} in {self.text!r}")
        self.i += 1
        return tok

    def parse(self) -> Poly:
        if not self.tokens:
            raise ParseError("empty expression")
        f = self.expr()
        if self.i != len(self.tokens):
            raise ParseError(f"trailing input in {self.text!r}")
        return f

    def expr(self) -> Poly:
        sign = 1
        if self.peek() in (("op", "+"), ("op", "-")):
            sign = -1 if self.take()[1] == "-" else 1
        f = self.term() * sign
        while self.peek() in (("op", "+"), ("op", "-")):
            op = self.take()[1]
            g = self.term()
            f = f + g if op == "+" else f - g
        return f

    def term(self) -> Poly:
        f = self.factor()
        while self.peek() in (("op", "*"), ("op", "/")):
            op = self.take()[1]
            g = self.factor()
            if op == "*":
                f = f * g
            else:
                if not g.is_constant() or g.is_zero():
                    raise ParseError("division is only allowed by nonzero constants")
                f = f * (1 / g.constant_term())
        return f

    def factor(self) -> Poly:
        f = self.atom()
        if self.peek() == ("op", "^"):
            self.take()
            kind, e = self.take()
            if kind != "num":
                raise ParseError("exponent must be a nonnegative integer")
            f = f**e
        return f

    def atom(self) -> Poly:
        kind, val = self.peek()
        if kind == "num":
            self.take()
            return self.ring.const(val)
        if kind == "name":
            self.take()
            try:
                return self.ring.var(self.ring.names.index(val))
            except ValueError:
                raise ParseError(f"unknown variable {val!r}") from None
        if (kind, val) == ("op", "("):
            self.take()
            f = self.expr()
            self.take(")")
            return f
        if (kind, val) == ("op", "-"):
            self.take()
            return -self.factor()
        raise ParseError(f"unexpected token {val!r} in {self.text!r}")


# ---------------------------------------------------------------------------
# graded free modules


class FreeModule:
    """A graded free module S(-s_0) + ... + S(-s_{r-1}) with a term order.

    ``shifts[c]`` is the degree of the c-th basis vector.
    """

    __slots__ = ("ring", "shifts", "offsets", "scale", "vbits", "mscale", "cmask")

    def __init__(self, ring: Ring, shifts, offsets, scale: int, vbits: int):
        self.ring = ring
        self.shifts = tuple(shifts)
        self.offsets = tuple(offsets)
        self.scale = scale
        self.vbits = vbits
        self.mscale = scale << vbits
        self.cmask = (1 << vbits) - 1
        if len(self.offsets) != len(self.shifts):
            raise ValueError("one offset per basis vector")
        if len(self.shifts) > (1 << vbits) and len(self.shifts) > 1:
            raise ValueError("too many basis vectors for position bits")

    @classmethod
    def graded(cls, ring: Ring, shifts: Sequence[int]) -> "FreeModule":
        """Degree-then-position order: internal degree, then index, then degrevlex."""
        shifts = tuple(shifts)
        vbits = max(len(shifts) - 1, 0).bit_length()
        offsets = [s * ring.D + c * ring.R for c, s in enumerate(shifts)]
        if len(shifts) == 1:
            offsets = [shifts[0] * ring.D]
        return cls(ring, shifts, offsets, 1, vbits)

    @classmethod
    def ring_module(cls, ring: Ring) -> "FreeModule":
        """S itself; keys coincide with polynomial keys."""
        return cls(ring, (0,), (0,), 1, 0)

    @classmethod
    def schreyer(cls, base: "FreeModule", lead_keys: Sequence[int], shifts: Sequence[int],
                 capacity: int | None = None) -> "FreeModule":
        """Order induced by the base-module leading terms of the images of the basis."""
        capacity = max(capacity or len(shifts), len(shifts))
        vbits = max(capacity - 1, 0).bit_length()
        return cls(base.ring, shifts, lead_keys, base.mscale, vbits)

    @property
    def rank(self) -> int:
        return len(self.shifts)

    def __eq__(self, other):
        return (
            isinstance(other, FreeModule)
            and self.ring == other.ring
            and self.shifts == other.shifts
            and self.offsets == other.offsets
            and self.scale == other.scale
            and self.vbits == other.vbits
        )

    def __hash__(self):
        return hash((self.ring, self.shifts, self.offsets, self.scale, self.vbits))

    def __repr__(self):
        return f"FreeModule(rank={self.rank}, shifts={list(self.shifts)})"

    def key(self, c: int, mkey: int) -> int:
        return ((self.offsets[c] + mkey * self.scale) << self.vbits) | c

    def split(self, key: int) -> tuple[int, int]:
        c = key & self.cmask
        return c, ((key >> self.vbits) - self.offsets[c]) // self.scale

    def degree(self, key: int) -> int:
        c, mk = self.split(key)
        return self.ring.degree(mk) + self.shifts[c]

    def basis(self, c: int) -> "ModuleElement":
        return ModuleElement(self, {self.key(c, 0): mpq(1)})

    def zero(self) -> "ModuleElement":
        return ModuleElement(self, {})

    def element(self, components: Sequence[Poly]) -> "ModuleElement":
        return ModuleElement.from_components(self, components)


class ModuleElement:
    """An element of a graded free module, stored as packed term keys."""

    __slots__ = ("module", "coeffs")

    def __init__(self, module: FreeModule, coeffs: dict):
        self.module = module
        self.coeffs = coeffs

    @classmethod
    def from_components(cls, module: FreeModule, components: Sequence[Poly]) -> "ModuleElement":
        if len(components) != module.rank:
            raise ValueError("need one component per basis vector")
        acc = {}
        for c, f in enumerate(components):
            if f.ring != module.ring:
                raise ValueError("component in the wrong ring")
            for k, v in f.coeffs.items():
                acc[module.key(c, k)] = v
        return cls(module, acc)

    def components(self) -> tuple[Poly, ...]:
        parts: list[dict] = [{} for _ in range(self.module.rank)]
        split = self.module.split
        for k, v in self.coeffs.items():
            c, mk = split(k)
            parts[c][mk] = v
        return tuple(Poly(self.module.ring, p) for p in parts)

    def terms(self) -> list[tuple[int, tuple[int, ...], Rat]]:
        """(component, exponents, coefficient), descending in the module order."""
        split, ex = self.module.split, self.module.ring.exps
        out = []
        for k in sorted(self.coeffs, reverse=True):
            c, mk = split(k)
            out.append((c, ex(mk), self.coeffs[k]))
        return out

    def is_zero(self) -> bool:
        return not self.coeffs

    def __bool__(self):
        return bool(self.coeffs)

    def degree(self) -> int | None:
        """Internal degree when homogeneous, None otherwise (or when zero)."""
        degs = {self.module.degree(k) for k in self.coeffs}
        return degs.pop() if len(degs) == 1 else None

    def _check(self, other: "ModuleElement") -> None:
        if self.module != other.module:
            raise ValueError("elements of different modules")

    def __add__(self, other: "ModuleElement") -> "ModuleElement":
        self._check(other)
        acc = dict(self.coeffs)
        _add_into(acc, other.coeffs.items(), 0, 1)
        return ModuleElement(self.module, acc)

    def __sub__(self, other: "ModuleElement") -> "ModuleElement":
        self._check(other)
        acc = dict(self.coeffs)
        _add_into(acc, other.coeffs.items(), 0, -1)
        return ModuleElement(self.module, acc)

    def __neg__(self):
        return ModuleElement(self.module, {k: -v for k, v in self.coeffs.items()})

    def __rmul__(self, f):
        """Scalar or polynomial multiple ``f * v``."""
        if not isinstance(f, Poly):
            f = self.module.ring.const(f)
        acc: dict = {}
        items = list(self.coeffs.items())
        ms = self.module.mscale
        for k, c in f.coeffs.items():
            _add_into(acc, items, k * ms, c)
        return ModuleElement(self.module, acc)

    def __eq__(self, other):
        return (
            isinstance(other, ModuleElement)
            and self.module == other.module
            and self.coeffs == other.coeffs
        )

    def __hash__(self):
        return hash((self.module, frozenset(self.coeffs.items())))

    def __repr__(self):
        return "(" + ", ".join(render(f) for f in self.components()) + ")"


class HomMatrix:
    """A degree-zero graded map between free modules given by its columns.

    ``columns[j]`` is the image of the j-th basis vector of ``source``.
    """

    __slots__ = ("source", "target", "columns")

    def __init__(self, source: FreeModule, target: FreeModule, columns: Sequence[ModuleElement]):
        if len(columns) != source.rank:
            raise ValueError("one column per source generator")
        for col in columns:
            if col.module != target:
                raise ValueError("column outside the target module")
        self.source = source
        self.target = target
        self.columns = tuple(columns)

    @classmethod
    def from_rows(cls, source: FreeModule, target: FreeModule, rows: Sequence[Sequence[Poly]]):
        cols = [
            ModuleElement.from_components(target, [rows[i][j] for i in range(target.rank)])
            for j in range(source.rank)
        ]
        return cls(source, target, cols)

    def grid(self) -> list[list[Poly]]:
        """Entries as rows x columns."""
        cols = [c.components() for c in self.columns]
        return [[cols[j][i] for j in range(self.source.rank)] for i in range(self.target.rank)]

    def entry(self, i: int, j: int) -> Poly:
        return self.columns[j].components()[i]

    def is_homogeneous(self) -> bool:
        for j, col in enumerate(self.columns):
            want = self.source.shifts[j]
            if any(self.target.degree(k) != want for k in col.coeffs):
                return False
        return True

    def apply(self, v: ModuleElement) -> ModuleElement:
        if v.module != self.source:
            raise ValueError("vector outside the source module")
        out = self.target.zero()
        for j, f in enumerate(v.components()):
            if f:
                out = out + f * self.columns[j]
        return out

    def compose_is_zero(self, inner: "HomMatrix") -> bool:
        """True when self o inner = 0."""
        return all(not self.apply(col) for col in inner.columns)


def monomials_of_degree(nvars: int, d: int) -> Iterator[tuple[int, ...]]:
    """All exponent vectors of total degree d (stars and bars)."""
    for bars in combinations(range(d + nvars - 1), nvars - 1):
        prev = -1
        exps = []
        for b in bars:
            exps.append(b - prev - 1)
            prev = b
        exps.append(d + nvars - 1 - prev - 1)
        yield tuple(exps)
