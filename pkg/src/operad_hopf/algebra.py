"""Exact arithmetic in the free commutative algebra on isomorphism-type generators.

Generators are :class:`TypeKey` values, monomials are sorted multisets of
generators, polynomials map monomials to ``fractions.Fraction`` coefficients,
and :class:`Tensor2` holds elements of the tensor square.  A size-1 generator
is normally identified with the algebra unit; builders take a
``keep_singletons`` flag because the Connes-Kreimer algebra does not make that
identification.
"""

from __future__ import annotations

from dataclasses import dataclass
from fractions import Fraction
from typing import Callable, Iterable, Iterator, Mapping

Coeff = Fraction | int


@dataclass(frozen=True, order=True)
class TypeKey:
    """Canonical name of an isomorphism type: (species tag, size, canonical bytes)."""

    tag: str
    size: int
    data: bytes

    @property
    def is_singleton(self) -> bool:
        return self.size == 1

    def wire(self) -> str:
        return f"{self.tag}:{self.size}:{self.data.hex()}"

    @staticmethod
    def from_wire(text: str) -> "TypeKey":
        tag, size, hexdata = text.split(":")
        return TypeKey(tag, int(size), bytes.fromhex(hexdata))


@dataclass(frozen=True, order=True)
class Monomial:
    """A sorted multiset of generators; the empty monomial is the unit."""

    factors: tuple[TypeKey, ...]

    def __mul__(self, other: "Monomial") -> "Monomial":
        return Monomial(tuple(sorted(self.factors + other.factors)))

    def __len__(self) -> int:
        return len(self.factors)

    @property
    def is_one(self) -> bool:
        return not self.factors

    def degree(self) -> int:
        return sum(k.size for k in self.factors)


ONE = Monomial(())


def monomial(keys: Iterable[TypeKey], keep_singletons: bool = False) -> Monomial:
    """Build a monomial, dropping size-1 generators unless told otherwise."""
    factors = [k for k in keys if keep_singletons or not k.is_singleton]
    return Monomial(tuple(sorted(factors)))


def _as_fraction(c: Coeff) -> Fraction:
    return c if isinstance(c, Fraction) else Fraction(c)


class Polynomial:
    """Sparse polynomial with Fraction coefficients; treat instances as immutable."""

    __slots__ = ("terms",)

    def __init__(self, terms: Mapping[Monomial, Coeff] | None = None):
        cleaned: dict[Monomial, Fraction] = {}
        if terms:
            for m, c in terms.items():
                c = _as_fraction(c)
                if c:
                    cleaned[m] = c
        self.terms = cleaned

    # -- constructors ------------------------------------------------

    @staticmethod
    def zero() -> "Polynomial":
        return Polynomial()

    @staticmethod
    def one() -> "Polynomial":
        return Polynomial({ONE: Fraction(1)})

    @staticmethod
    def constant(c: Coeff) -> "Polynomial":
        return Polynomial({ONE: _as_fraction(c)})

    @staticmethod
    def generator(key: TypeKey, keep_singletons: bool = False) -> "Polynomial":
        if key.is_singleton and not keep_singletons:
            return Polynomial.one()
        return Polynomial({Monomial((key,)): Fraction(1)})

    @staticmethod
    def of_monomial(m: Monomial, c: Coeff = 1) -> "Polynomial":
        return Polynomial({m: _as_fraction(c)})

    # -- ring operations ----------------------------------------------

    def __add__(self, other: "Polynomial") -> "Polynomial":
        out = dict(self.terms)
        for m, c in other.terms.items():
            s = out.get(m, Fraction(0)) + c
            if s:
                out[m] = s
            else:
                out.pop(m, None)
        return Polynomial(out)

    def __neg__(self) -> "Polynomial":
        return Polynomial({m: -c for m, c in self.terms.items()})

    def __sub__(self, other: "Polynomial") -> "Polynomial":
        return self + (-other)

    def __mul__(self, other: "Polynomial | Coeff") -> "Polynomial":
        if not isinstance(other, Polynomial):
            return self.scale(other)
        out: dict[Monomial, Fraction] = {}
        for m1, c1 in self.terms.items():
            for m2, c2 in other.terms.items():
                m = m1 * m2
                s = out.get(m, Fraction(0)) + c1 * c2
                if s:
                    out[m] = s
                else:
                    out.pop(m, None)
        return Polynomial(out)

    def __rmul__(self, other: Coeff) -> "Polynomial":
        return self.scale(other)

    def scale(self, c: Coeff) -> "Polynomial":
        c = _as_fraction(c)
        return Polynomial({m: c * v for m, v in self.terms.items()})

    def __pow__(self, n: int) -> "Polynomial":
        if n < 0:
            raise ValueError("negative polynomial power")
        result = Polynomial.one()
        for _ in range(n):
            result = result * self
        return result

    def __eq__(self, other: object) -> bool:
        return isinstance(other, Polynomial) and self.terms == other.terms

    def __hash__(self):  # pragma: no cover - polynomials are not dict keys
        return hash(frozenset(self.terms.items()))

    def __bool__(self) -> bool:
        return bool(self.terms)

    def is_constant(self) -> bool:
        return all(m.is_one for m in self.terms)

    def constant_term(self) -> Fraction:
        return self.terms.get(ONE, Fraction(0))

    # -- substitution and algebra maps ---------------------------------

    def substitute_generator(self, key: TypeKey, replacement: "Polynomial") -> "Polynomial":
        """Replace one generator by a polynomial, multiplicatively."""
        out = Polynomial.zero()
        for m, c in self.terms.items():
            hits = sum(1 for k in m.factors if k == key)
            rest = Monomial(tuple(k for k in m.factors if k != key))
            out = out + Polynomial.of_monomial(rest, c) * (replacement ** hits)
        return out

    def apply_generators(self, image: Callable[[TypeKey], "Polynomial"]) -> "Polynomial":
        """Extend ``image`` to an algebra map and apply it."""
        out = Polynomial.zero()
        for m, c in self.terms.items():
            term = Polynomial.constant(c)
            for k in m.factors:
                term = term * image(k)
            out = out + term
        return out

    # -- presentation ---------------------------------------------------

    def sorted_terms(self) -> list[tuple[Monomial, Fraction]]:
        return sorted(self.terms.items(), key=lambda t: t[0])

    def to_json_obj(self) -> list[dict]:
        return [
            {"coeff": str(c), "factors": [k.wire() for k in m.factors]}
            for m, c in self.sorted_terms()
        ]

    def render(self, namer: Callable[[TypeKey], str] | None = None, latex: bool = False) -> str:
        return render_terms(self.sorted_terms(), namer, latex)

    def __repr__(self) -> str:
        return f"Polynomial({self.render()})"


def _render_coeff(c: Fraction, latex: bool) -> str:
    if latex and c.denominator != 1:
        return rf"\frac{{{c.numerator}}}{{{c.denominator}}}"
    return str(c)


def _render_monomial(m: Monomial, namer: Callable[[TypeKey], str], latex: bool) -> str:
    if m.is_one:
        return "1"
    parts = []
    i = 0
    factors = m.factors
    while i < len(factors):
        j = i
        while j < len(factors) and factors[j] == factors[i]:
            j += 1
        name = namer(factors[i])
        base = f"t_{{{name}}}" if latex else f"t_{name}"
        if j - i > 1:
            base += f"^{{{j - i}}}" if latex else f"^{j - i}"
        parts.append(base)
        i = j
    sep = " " if latex else "*"
    return sep.join(parts)


def render_terms(
    terms: list[tuple[Monomial, Fraction]],
    namer: Callable[[TypeKey], str] | None = None,
    latex: bool = False,
) -> str:
    """Deterministic human-readable rendering of a term list."""
    if namer is None:
        namer = lambda k: k.wire()
    if not terms:
        return "0"
    chunks = []
    for m, c in terms:
        mono = _render_monomial(m, namer, latex)
        if mono == "1":
            body = _render_coeff(abs(c), latex)
        elif abs(c) == 1:
            body = mono
        else:
            body = f"{_render_coeff(abs(c), latex)}{' ' if latex else '*'}{mono}"
        sign = "-" if c < 0 else "+"
        chunks.append((sign, body))
    first_sign, first_body = chunks[0]
    out = ("-" if first_sign == "-" else "") + first_body
    for sign, body in chunks[1:]:
        out += f" {sign} {body}"
    return out


class Tensor2:
    """Element of the tensor square, as a sparse map (monomial, monomial) -> coeff."""

    __slots__ = ("terms",)

    def __init__(self, terms: Mapping[tuple[Monomial, Monomial], Coeff] | None = None):
        cleaned: dict[tuple[Monomial, Monomial], Fraction] = {}
        if terms:
            for key, c in terms.items():
                c = _as_fraction(c)
                if c:
                    cleaned[key] = c
        self.terms = cleaned

    @staticmethod
    def zero() -> "Tensor2":
        return Tensor2()

    @staticmethod
    def of(left: Polynomial, right: Polynomial) -> "Tensor2":
        out: dict[tuple[Monomial, Monomial], Fraction] = {}
        for m1, c1 in left.terms.items():
            for m2, c2 in right.terms.items():
                out[(m1, m2)] = out.get((m1, m2), Fraction(0)) + c1 * c2
        return Tensor2(out)

    @staticmethod
    def one() -> "Tensor2":
        return Tensor2({(ONE, ONE): Fraction(1)})

    def __add__(self, other: "Tensor2") -> "Tensor2":
        out = dict(self.terms)
        for key, c in other.terms.items():
            s = out.get(key, Fraction(0)) + c
            if s:
                out[key] = s
            else:
                out.pop(key, None)
        return Tensor2(out)

    def __sub__(self, other: "Tensor2") -> "Tensor2":
        return self + other.scale(-1)

    def __mul__(self, other: "Tensor2") -> "Tensor2":
        out: dict[tuple[Monomial, Monomial], Fraction] = {}
        for (l1, r1), c1 in self.terms.items():
            for (l2, r2), c2 in other.terms.items():
                key = (l1 * l2, r1 * r2)
                s = out.get(key, Fraction(0)) + c1 * c2
                if s:
                    out[key] = s
                else:
                    out.pop(key, None)
        return Tensor2(out)

    def scale(self, c: Coeff) -> "Tensor2":
        c = _as_fraction(c)
        return Tensor2({k: c * v for k, v in self.terms.items()})

    def __eq__(self, other: object) -> bool:
        return isinstance(other, Tensor2) and self.terms == other.terms

    def __bool__(self) -> bool:
        return bool(self.terms)

    def swap(self) -> "Tensor2":
        return Tensor2({(r, l): c for (l, r), c in self.terms.items()})

    def collapse(
        self,
        left: Callable[[Monomial], Polynomial],
        right: Callable[[Monomial], Polynomial],
    ) -> Polynomial:
        """Apply maps to the two sides and multiply, i.e. mu o (left (x) right)."""
        out = Polynomial.zero()
        for (l, r), c in self.terms.items():
            out = out + (left(l) * right(r)).scale(c)
        return out

    def map_sides(
        self,
        left: Callable[[Monomial], Polynomial],
        right: Callable[[Monomial], Polynomial],
    ) -> "Tensor2":
        """Apply algebra maps to the two tensor factors."""
        out = Tensor2.zero()
        for (l, r), c in self.terms.items():
            out = out + Tensor2.of(left(l), right(r)).scale(c)
        return out

    def sorted_terms(self) -> list[tuple[tuple[Monomial, Monomial], Fraction]]:
        return sorted(self.terms.items(), key=lambda t: t[0])

    def to_json_obj(self) -> list[dict]:
        return [
            {
                "coeff": str(c),
                "left": [k.wire() for k in l.factors],
                "right": [k.wire() for k in r.factors],
            }
            for (l, r), c in self.sorted_terms()
        ]

    def render(self, namer: Callable[[TypeKey], str] | None = None, latex: bool = False) -> str:
        if namer is None:
            namer = lambda k: k.wire()
        if not self.terms:
            return "0"
        otimes = r" \otimes " if latex else " (x) "
        parts = []
        for (l, r), c in self.sorted_terms():
            body = _render_monomial(l, namer, latex) + otimes + _render_monomial(r, namer, latex)
            if abs(c) != 1:
                body = f"{_render_coeff(abs(c), latex)} {body}"
            parts.append(("-" if c < 0 else "+", body))
        out = ("-" if parts[0][0] == "-" else "") + parts[0][1]
        for sign, body in parts[1:]:
            out += f" {sign} {body}"
        return out

    def __repr__(self) -> str:
        return f"Tensor2({self.render()})"


def tensor3_from_left(delta_outer: Tensor2, delta: Callable[[Monomial], Tensor2]):
    """(Delta (x) id) applied to a Tensor2, as a map into the triple tensor."""
    out: dict[tuple[Monomial, Monomial, Monomial], Fraction] = {}
    for (l, r), c in delta_outer.terms.items():
        for (l1, l2), c2 in delta(l).terms.items():
            key = (l1, l2, r)
            s = out.get(key, Fraction(0)) + c * c2
            if s:
                out[key] = s
            else:
                out.pop(key, None)
    return out


def tensor3_from_right(delta_outer: Tensor2, delta: Callable[[Monomial], Tensor2]):
    """(id (x) Delta) applied to a Tensor2, as a map into the triple tensor."""
    out: dict[tuple[Monomial, Monomial, Monomial], Fraction] = {}
    for (l, r), c in delta_outer.terms.items():
        for (r1, r2), c2 in delta(r).terms.items():
            key = (l, r1, r2)
            s = out.get(key, Fraction(0)) + c * c2
            if s:
                out[key] = s
            else:
                out.pop(key, None)
    return out
