"""The natural Hopf algebra of a set operad.

Generators are isomorphism-type keys of the operad's structures with the
singleton type identified with 1.  The coproduct sums over factorizations of
a fixed labelled representative; the antipode is the convolution inverse of
the identity, computed by the recursion

    S(t) = -t - sum over proper factorizations of S(assembly) * outer,

proper meaning 2 <= #blocks <= size - 1.
"""

from __future__ import annotations

from fractions import Fraction
from typing import Callable

from .algebra import Monomial, ONE, Polynomial, Tensor2, TypeKey, monomial
from .errors import SizeCapExceeded, SpeciesMismatch
from .operads import Assembly, Operad
from .structures import check_cap, sorted_labels


def assembly_monomial(assembly: Assembly, species) -> Monomial:
    """Monomial of the piece types, singleton factors dropped."""
    return monomial(species.key(p) for p in assembly.pieces)


GenMap = Callable[[TypeKey], Polynomial]


class HopfContext:
    """Caches representatives, coproducts, and antipodes for one operad."""

    def __init__(self, operad: Operad, max_size: int | None = None):
        self.operad = operad
        self.max_size = max_size
        self._reps: dict[int, dict[TypeKey, object]] = {}
        self._coproducts: dict[TypeKey, Tensor2] = {}
        self._antipodes: dict[TypeKey, Polynomial] = {}

    # -- types and representatives --------------------------------------

    def _check(self, n: int) -> None:
        if self.max_size is not None and n > self.max_size:
            raise SizeCapExceeded(n, self.max_size)
        check_cap(n, self.operad.species.tag)

    def _reps_for(self, n: int) -> dict[TypeKey, object]:
        if n not in self._reps:
            self._check(n)
            sp = self.operad.species
            reps: dict[TypeKey, object] = {}
            for s in sp.structures(frozenset(range(1, n + 1))):
                reps.setdefault(sp.key(s), s)
            self._reps[n] = reps
        return self._reps[n]

    def types(self, n: int) -> list[TypeKey]:
        """All generator keys of size n, in key order."""
        return sorted(self._reps_for(n))

    def representative(self, key: TypeKey):
        """First structure of this type in enumeration order on labels 1..n."""
        if key.tag != self.operad.species.tag:
            raise SpeciesMismatch(f"{key.tag} key in a {self.operad.species.tag} context")
        try:
            return self._reps_for(key.size)[key]
        except KeyError:
            raise KeyError(f"unknown type {key.wire()}") from None

    def key_of(self, structure) -> TypeKey:
        return self.operad.species.key(structure)

    # -- coproduct and counit --------------------------------------------

    def coproduct(self, key: TypeKey) -> Tensor2:
        if key.is_singleton:
            return Tensor2.one()
        cached = self._coproducts.get(key)
        if cached is None:
            cached = self.coproduct_of(self.representative(key))
            self._coproducts[key] = cached
        return cached

    def coproduct_of(self, structure) -> Tensor2:
        """Coproduct computed from an explicit labelled structure."""
        sp = self.operad.species
        self._check(len(sp.labels_of(structure)))
        out: dict = {}
        for f in self.operad.factorizations(structure):
            left = assembly_monomial(f.assembly, sp)
            right = monomial([sp.key(f.outer)])
            out[(left, right)] = out.get((left, right), 0) + 1
        return Tensor2(out)

    def coproduct_monomial(self, m: Monomial) -> Tensor2:
        out = Tensor2.one()
        for k in m.factors:
            out = out * self.coproduct(k)
        return out

    def coproduct_poly(self, p: Polynomial) -> Tensor2:
        out = Tensor2.zero()
        for m, c in p.terms.items():
            out = out + self.coproduct_monomial(m).scale(c)
        return out

    @staticmethod
    def counit_monomial(m: Monomial) -> Fraction:
        return Fraction(1) if m.is_one else Fraction(0)

    @staticmethod
    def counit_poly(p: Polynomial) -> Fraction:
        return p.terms.get(ONE, Fraction(0))

    # -- antipode ---------------------------------------------------------

    def antipode(self, key: TypeKey) -> Polynomial:
        """The antipode on one generator, by the convolution-inverse recursion."""
        if key.is_singleton:
            return Polynomial.one()
        cached = self._antipodes.get(key)
        if cached is not None:
            return cached
        sp = self.operad.species
        rep = self.representative(key)
        result = -Polynomial.generator(key)
        for f in self.operad.factorizations(rep, exclude_trivial=True):
            s_left = Polynomial.one()
            for piece in f.assembly.pieces:
                s_left = s_left * self.antipode(sp.key(piece))
            result = result - s_left * Polynomial.generator(sp.key(f.outer))
        self._antipodes[key] = result
        return result

    def antipode_monomial(self, m: Monomial) -> Polynomial:
        out = Polynomial.one()
        for k in m.factors:
            out = out * self.antipode(k)
        return out

    def antipode_poly(self, p: Polynomial) -> Polynomial:
        return p.apply_generators(self.antipode)

    # -- convolution --------------------------------------------------------

    def identity_map(self, key: TypeKey) -> Polynomial:
        return Polynomial.generator(key)

    @staticmethod
    def unit_counit_map(key: TypeKey) -> Polynomial:
        return Polynomial.one() if key.is_singleton else Polynomial.zero()

    def convolve(self, f: GenMap, g: GenMap) -> GenMap:
        """Convolution product mu o (f (x) g) o Delta on generators."""

        def as_algebra_map(h: GenMap) -> Callable[[Monomial], Polynomial]:
            def on_monomial(m: Monomial) -> Polynomial:
                out = Polynomial.one()
                for k in m.factors:
                    out = out * h(k)
                return out

            return on_monomial

        fm, gm = as_algebra_map(f), as_algebra_map(g)

        def result(key: TypeKey) -> Polynomial:
            if key.is_singleton:
                return f(key) * g(key)
            return self.coproduct(key).collapse(fm, gm)

        return result

    # -- small conveniences ---------------------------------------------------

    def generator_counts(self, max_size: int) -> dict[int, int]:
        return {n: len(self.types(n)) for n in range(1, max_size + 1)}
