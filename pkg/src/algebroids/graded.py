"""Weighted graded-commutative polynomial algebras over exact rationals.

Generators come in two kinds: even coordinates (cochain degree 0, weight >= 1,
so every (degree, weight) block is finite dimensional) and odd generators
(cochain degree 1, any integer weight).  Elements are sparse rational linear
combinations of monomials.  Derivations are stored by their generator images
and extended by the graded Leibniz rule

    D(uv) = D(u) v + (-1)^{|D||u|} u D(v),

with Koszul signs throughout.  All coefficients are `fractions.Fraction`;
floats are rejected, since every downstream rank computation must be exact.

Values are immutable after construction and safe to share between threads;
all operations return fresh objects.
"""

from __future__ import annotations

from fractions import Fraction
from itertools import combinations
from typing import Iterable, Mapping, Sequence

Rational = Fraction

ORIGIN_FIBER = "fiber-dual"
ORIGIN_VERTICAL = "vertical-form"
ORIGIN_LEAFWISE = "leafwise-form"
_ORIGINS = (ORIGIN_FIBER, ORIGIN_VERTICAL, ORIGIN_LEAFWISE)


class MixedGeneratorSets(ValueError):
    """Raised when operands live over different generator sets."""


class HomogeneityError(ValueError):
    """Raised when an element fails a required degree or weight homogeneity."""


def rational(value) -> Rational:
    """Coerce to Fraction, refusing floats (exact arithmetic only)."""
    if isinstance(value, float):
        raise TypeError("floating point coefficients are not allowed")
    return Fraction(value)


class GeneratorSet:
    """Ordered even/odd generators with weights.

    The global generator order is declaration order: all evens first, then all
    odds.  Odd generators carry an origin tag used by filtration and
    verticality bookkeeping downstream.
    """

    __slots__ = (
        "evens", "odds", "even_names", "even_weights", "odd_names",
        "odd_weights", "odd_origins", "_even_index", "_odd_index",
        "_key", "_hash", "_basis_cache", "_origin_masks", "_unit",
    )

    def __init__(self, evens: Iterable[tuple[str, int]],
                 odds: Iterable[tuple[str, int, str]]):
        self.evens = tuple((str(n), int(w)) for n, w in evens)
        self.odds = tuple((str(n), int(w), str(t)) for n, w, t in odds)
        names = [n for n, _ in self.evens] + [n for n, _, _ in self.odds]
        if len(set(names)) != len(names):
            raise ValueError("generator names must be unique")
        for n, w in self.evens:
            if w < 1:
                raise ValueError(f"even generator {n!r} must have weight >= 1, got {w}")
        for n, _, t in self.odds:
            if t not in _ORIGINS:
                raise ValueError(f"unknown origin tag {t!r} on odd generator {n!r}")
        self.even_names = tuple(n for n, _ in self.evens)
        self.even_weights = tuple(w for _, w in self.evens)
        self.odd_names = tuple(n for n, _, _ in self.odds)
        self.odd_weights = tuple(w for _, w, _ in self.odds)
        self.odd_origins = tuple(t for _, _, t in self.odds)
        self._even_index = {n: i for i, n in enumerate(self.even_names)}
        self._odd_index = {n: i for i, n in enumerate(self.odd_names)}
        self._key = (self.evens, self.odds)
        self._hash = hash(self._key)
        self._basis_cache: dict[tuple[int, int], tuple] = {}
        self._origin_masks: dict[str, int] = {}
        self._unit = None

    def __eq__(self, other):
        return isinstance(other, GeneratorSet) and self._key == other._key

    def __hash__(self):
        return self._hash

    def __repr__(self):
        return f"GeneratorSet(evens={list(self.even_names)}, odds={list(self.odd_names)})"

    # -- lookups ----------------------------------------------------------

    def is_even(self, name: str) -> bool:
        return name in self._even_index

    def is_odd(self, name: str) -> bool:
        return name in self._odd_index

    def even_index(self, name: str) -> int:
        return self._even_index[name]

    def odd_index(self, name: str) -> int:
        return self._odd_index[name]

    def names(self) -> tuple[str, ...]:
        return self.even_names + self.odd_names

    def degree_of(self, name: str) -> int:
        if name in self._odd_index:
            return 1
        if name in self._even_index:
            return 0
        raise KeyError(name)

    def weight_of(self, name: str) -> int:
        if name in self._even_index:
            return self.even_weights[self._even_index[name]]
        if name in self._odd_index:
            return self.odd_weights[self._odd_index[name]]
        raise KeyError(name)

    def origin_mask(self, origin: str) -> int:
        """Bitmask of the odd generators carrying the given origin tag."""
        mask = self._origin_masks.get(origin)
        if mask is None:
            mask = 0
            for i, t in enumerate(self.odd_origins):
                if t == origin:
                    mask |= 1 << i
            self._origin_masks[origin] = mask
        return mask

    # -- monomials ---------------------------------------------------------

    def unit_monomial(self) -> "GradedMonomial":
        if self._unit is None:
            self._unit = GradedMonomial((0,) * len(self.evens), 0)
        return self._unit

    def monomial_weight(self, m: "GradedMonomial") -> int:
        w = 0
        for e, gw in zip(m.evens, self.even_weights):
            if e:
                w += e * gw
        mask = m.mask
        while mask:
            low = mask & -mask
            w += self.odd_weights[low.bit_length() - 1]
            mask ^= low
        return w

    def monomial_degree(self, m: "GradedMonomial") -> int:
        return m.mask.bit_count()

    def monomial_key(self, m: "GradedMonomial"):
        """Graded-lex sort key: higher total exponent first, then lex on the
        exponent vector in declaration order (evens then odds)."""
        bits = tuple((m.mask >> i) & 1 for i in range(len(self.odds)))
        grade = sum(m.evens) + m.mask.bit_count()
        return (-grade, tuple(-e for e in m.evens), tuple(-b for b in bits))

    def subset_names(self, mask: int) -> tuple[str, ...]:
        out = []
        while mask:
            low = mask & -mask
            out.append(self.odd_names[low.bit_length() - 1])
            mask ^= low
        return tuple(out)

    def format_monomial(self, m: "GradedMonomial") -> str:
        parts = []
        for name, e in zip(self.even_names, m.evens):
            if e == 1:
                parts.append(name)
            elif e > 1:
                parts.append(f"{name}^{e}")
        parts.extend(self.subset_names(m.mask))
        return "*".join(parts) if parts else "1"

    def basis(self, degree: int, weight: int) -> tuple["GradedMonomial", ...]:
        """All monomials of the given cochain degree and weight, in the global
        graded-lex order.  Deterministic; cached per generator set."""
        cached = self._basis_cache.get((degree, weight))
        if cached is not None:
            return cached
        out: list[GradedMonomial] = []
        if degree >= 0:
            n_odd = len(self.odds)
            for subset in combinations(range(n_odd), degree):
                mask = 0
                wsum = 0
                for i in subset:
                    mask |= 1 << i
                    wsum += self.odd_weights[i]
                rest = weight - wsum
                if rest < 0:
                    continue
                for evens in _even_weight_exponents(self.even_weights, rest):
                    out.append(GradedMonomial(evens, mask))
        out.sort(key=self.monomial_key)
        result = tuple(out)
        self._basis_cache[(degree, weight)] = result
        return result

    # -- element constructors ----------------------------------------------

    def zero(self) -> "GradedElement":
        return GradedElement(self, {})

    def scalar(self, value) -> "GradedElement":
        c = rational(value)
        if c == 0:
            return self.zero()
        return GradedElement(self, {self.unit_monomial(): c})

    def var(self, name: str) -> "GradedElement":
        if name in self._even_index:
            evens = [0] * len(self.evens)
            evens[self._even_index[name]] = 1
            return GradedElement(self, {GradedMonomial(tuple(evens), 0): Fraction(1)})
        if name in self._odd_index:
            mono = GradedMonomial((0,) * len(self.evens), 1 << self._odd_index[name])
            return GradedElement(self, {mono: Fraction(1)})
        raise KeyError(name)

    def product(self, *names: str) -> "GradedElement":
        out = self.scalar(1)
        for n in names:
            out = out * self.var(n)
        return out


def _even_weight_exponents(weights: tuple[int, ...], target: int):
    """Exponent tuples e with sum(e_i * w_i) == target (all weights >= 1)."""
    n = len(weights)
    out: list[tuple[int, ...]] = []
    acc = [0] * n

    def rec(i: int, remaining: int):
        if i == n:
            if remaining == 0:
                out.append(tuple(acc))
            return
        w = weights[i]
        for e in range(remaining // w + 1):
            acc[i] = e
            rec(i + 1, remaining - e * w)
        acc[i] = 0

    if target >= 0:
        rec(0, target)
    return out


class GradedMonomial:
    """A monomial: even exponent vector plus a bitmask of odd generators.

    The odd subset is strictly increasing in the global generator order;
    cochain degree is the popcount of the mask.
    """

    __slots__ = ("evens", "mask", "_hash")

    def __init__(self, evens: tuple[int, ...], mask: int):
        self.evens = evens
        self.mask = mask
        self._hash = hash((evens, mask))

    def __eq__(self, other):
        return (self.mask == other.mask and self.evens == other.evens
                if isinstance(other, GradedMonomial) else NotImplemented)

    def __hash__(self):
        return self._hash

    def __repr__(self):
        return f"GradedMonomial({self.evens}, {bin(self.mask)})"

    @property
    def degree(self) -> int:
        return self.mask.bit_count()

    def even_exponents(self, gens: GeneratorSet) -> dict[str, int]:
        return {n: e for n, e in zip(gens.even_names, self.evens) if e}

    def odd_subset(self, gens: GeneratorSet) -> tuple[str, ...]:
        return gens.subset_names(self.mask)


def _merge_sign(mask_a: int, mask_b: int) -> int:
    """Koszul sign of merging the (disjoint) odd factors of mask_b past mask_a.

    Equals (-1)^inversions where inversions counts pairs a > b with a in
    mask_a, b in mask_b.
    """
    sign = 1
    rest = mask_b
    while rest:
        low = rest & -rest
        j = low.bit_length()
        if (mask_a >> j).bit_count() & 1:
            sign = -sign
        rest ^= low
    return sign


class GradedElement:
    """A sparse rational combination of monomials over one generator set."""

    __slots__ = ("gens", "terms")
    __hash__ = None

    def __init__(self, gens: GeneratorSet, terms: Mapping[GradedMonomial, Rational]):
        clean: dict[GradedMonomial, Rational] = {}
        for m, c in terms.items():
            c = rational(c)
            if c != 0:
                clean[m] = c
        self.gens = gens
        self.terms = clean

    # -- basics -------------------------------------------------------------

    def is_zero(self) -> bool:
        return not self.terms

    def __bool__(self):
        return bool(self.terms)

    def __eq__(self, other):
        if not isinstance(other, GradedElement):
            return NotImplemented
        return self.gens == other.gens and self.terms == other.terms

    def _check_same(self, other: "GradedElement"):
        if self.gens != other.gens:
            raise MixedGeneratorSets("operands live over different generator sets")

    def __add__(self, other: "GradedElement") -> "GradedElement":
        self._check_same(other)
        terms = dict(self.terms)
        for m, c in other.terms.items():
            s = terms.get(m, 0) + c
            if s:
                terms[m] = s
            else:
                terms.pop(m, None)
        return GradedElement(self.gens, terms)

    def __neg__(self) -> "GradedElement":
        return GradedElement(self.gens, {m: -c for m, c in self.terms.items()})

    def __sub__(self, other: "GradedElement") -> "GradedElement":
        return self + (-other)

    def scale(self, value) -> "GradedElement":
        c = rational(value)
        if c == 0:
            return self.gens.zero()
        return GradedElement(self.gens, {m: c * v for m, v in self.terms.items()})

    def __mul__(self, other):
        if isinstance(other, (int, Fraction)):
            return self.scale(other)
        if not isinstance(other, GradedElement):
            return NotImplemented
        self._check_same(other)
        out: dict[GradedMonomial, Rational] = {}
        for m1, c1 in self.terms.items():
            for m2, c2 in other.terms.items():
                if m1.mask & m2.mask:
                    continue  # odd square vanishes
                sign = _merge_sign(m1.mask, m2.mask)
                key = GradedMonomial(
                    tuple(a + b for a, b in zip(m1.evens, m2.evens)),
                    m1.mask | m2.mask,
                )
                s = out.get(key, 0) + sign * c1 * c2
                if s:
                    out[key] = s
                else:
                    out.pop(key, None)
        return GradedElement(self.gens, out)

    def __rmul__(self, other):
        if isinstance(other, (int, Fraction)):
            return self.scale(other)
        return NotImplemented

    # -- grading ------------------------------------------------------------

    def cochain_degree(self) -> int | None:
        """Common cochain degree of all terms; None for zero."""
        deg = None
        for m in self.terms:
            d = m.degree
            if deg is None:
                deg = d
            elif deg != d:
                raise HomogeneityError("element is not degree homogeneous")
        return deg

    def weight(self) -> int | None:
        """Common weight of all terms; None for zero."""
        w = None
        for m in self.terms:
            mw = self.gens.monomial_weight(m)
            if w is None:
                w = mw
            elif w != mw:
                raise HomogeneityError("element is not weight homogeneous")
        return w

    def is_homogeneous(self) -> bool:
        try:
            self.cochain_degree()
            self.weight()
        except HomogeneityError:
            return False
        return True

    def weight_split(self) -> dict[int, "GradedElement"]:
        parts: dict[int, dict] = {}
        for m, c in self.terms.items():
            parts.setdefault(self.gens.monomial_weight(m), {})[m] = c
        return {w: GradedElement(self.gens, t) for w, t in sorted(parts.items())}

    def weight_component(self, w: int) -> "GradedElement":
        return GradedElement(
            self.gens,
            {m: c for m, c in self.terms.items() if self.gens.monomial_weight(m) == w},
        )

    def diff_even(self, name: str) -> "GradedElement":
        """Partial derivative with respect to an even generator."""
        i = self.gens.even_index(name)
        out: dict[GradedMonomial, Rational] = {}
        for m, c in self.terms.items():
            e = m.evens[i]
            if not e:
                continue
            evens = list(m.evens)
            evens[i] = e - 1
            key = GradedMonomial(tuple(evens), m.mask)
            s = out.get(key, 0) + c * e
            if s:
                out[key] = s
        return GradedElement(self.gens, out)

    def coefficient(self, m: GradedMonomial) -> Rational:
        return self.terms.get(m, Fraction(0))

    def __str__(self):
        return format_element(self)

    def __repr__(self):
        return f"<GradedElement {format_element(self)}>"


def format_element(el: GradedElement) -> str:
    """Canonical string: graded-lex term order, '*' products, 'p/q' rationals."""
    if el.is_zero():
        return "0"
    gens = el.gens
    parts = []
    for m in sorted(el.terms, key=gens.monomial_key):
        c = el.terms[m]
        mono = gens.format_monomial(m)
        if mono == "1":
            body = str(abs(c))
        elif abs(c) == 1:
            body = mono
        else:
            body = f"{abs(c)}*{mono}"
        parts.append(("- " if c < 0 else "+ ") + body)
    first = parts[0]
    text = first[2:] if first.startswith("+ ") else "-" + first[2:]
    for p in parts[1:]:
        text += " " + p
    return text


class GradedDerivation:
    """A degree-d graded derivation, stored by its generator images.

    The image of generator g must be homogeneous of cochain degree
    deg(g) + d (or zero).  Extension to arbitrary elements is by the graded
    Leibniz rule with Koszul signs; the degree parity of the derivation is
    what enters the signs, so negative degrees behave like their parity.
    """

    __slots__ = ("gens", "degree", "images", "_cache")

    def __init__(self, gens: GeneratorSet, degree: int,
                 images: Mapping[str, GradedElement], check: bool = True):
        self.gens = gens
        self.degree = int(degree)
        clean: dict[str, GradedElement] = {}
        for name, el in images.items():
            if el.is_zero():
                continue
            if check:
                if el.gens != gens:
                    raise MixedGeneratorSets(f"image of {name!r} lives over a different generator set")
                target = gens.degree_of(name) + self.degree
                d = el.cochain_degree()
                if d != target:
                    raise HomogeneityError(
                        f"image of {name!r} has degree {d}, expected {target}")
            clean[name] = el
        self.images = clean
        self._cache: dict[GradedMonomial, GradedElement] = {}

    def image(self, name: str) -> GradedElement:
        el = self.images.get(name)
        return el if el is not None else self.gens.zero()

    def is_zero(self) -> bool:
        return not self.images

    def __eq__(self, other):
        if not isinstance(other, GradedDerivation):
            return NotImplemented
        if self.gens != other.gens:
            return False
        names = set(self.images) | set(other.images)
        return all(self.image(n) == other.image(n) for n in names)

    __hash__ = None

    def __add__(self, other: "GradedDerivation") -> "GradedDerivation":
        if self.gens != other.gens or self.degree != other.degree:
            raise ValueError("can only add derivations of equal degree over one generator set")
        names = set(self.images) | set(other.images)
        return GradedDerivation(
            self.gens, self.degree,
            {n: self.image(n) + other.image(n) for n in names}, check=False)

    def __sub__(self, other: "GradedDerivation") -> "GradedDerivation":
        return self + other.scale(-1)

    def scale(self, value) -> "GradedDerivation":
        return GradedDerivation(
            self.gens, self.degree,
            {n: el.scale(value) for n, el in self.images.items()}, check=False)

    def apply(self, a: GradedElement) -> GradedElement:
        if a.gens != self.gens:
            raise MixedGeneratorSets("element lives over a different generator set")
        out = self.gens.zero()
        for m, c in a.terms.items():
            img = self._apply_monomial(m)
            if img.terms:
                out = out + img.scale(c)
        return out

    def _apply_monomial(self, m: GradedMonomial) -> GradedElement:
        cached = self._cache.get(m)
        if cached is not None:
            return cached
        gens = self.gens
        odd_parity = self.degree & 1
        total = gens.zero()
        # even factors first: the prefix is even, so no Koszul sign appears
        for i, e in enumerate(m.evens):
            if not e:
                continue
            img = self.images.get(gens.even_names[i])
            if img is None:
                continue
            evens = list(m.evens)
            evens[i] = e - 1
            rest_even = GradedElement(gens, {GradedMonomial(tuple(evens), 0): Fraction(e)})
            odd_part = GradedElement(gens, {GradedMonomial((0,) * len(m.evens), m.mask): Fraction(1)})
            total = total + rest_even * img * odd_part
        # odd factors in increasing order; prefix degree = position in the subset
        mask = m.mask
        pos = 0
        zero_evens = (0,) * len(m.evens)
        while mask:
            low = mask & -mask
            j = low.bit_length() - 1
            img = self.images.get(gens.odd_names[j])
            if img is not None:
                below = m.mask & (low - 1)
                above = m.mask & ~((low << 1) - 1)
                sign = -1 if (odd_parity and (pos & 1)) else 1
                prefix = GradedElement(gens, {GradedMonomial(m.evens, below): Fraction(sign)})
                suffix = GradedElement(gens, {GradedMonomial(zero_evens, above): Fraction(1)})
                total = total + prefix * img * suffix
            pos += 1
            mask ^= low
        self._cache[m] = total
        return total

    def weight_shifts(self) -> set[int]:
        """All weight shifts present among the generator images."""
        shifts = set()
        for name, el in self.images.items():
            wg = self.gens.weight_of(name)
            for w in el.weight_split():
                shifts.add(w - wg)
        return shifts

    def is_weight_preserving(self) -> bool:
        return self.weight_shifts() <= {0}

    def weight_component(self, shift: int) -> "GradedDerivation":
        return GradedDerivation(
            self.gens, self.degree,
            {n: el.weight_component(self.gens.weight_of(n) + shift)
             for n, el in self.images.items()},
            check=False)

    def __repr__(self):
        body = ", ".join(f"{n} -> {format_element(e)}" for n, e in self.images.items())
        return f"<GradedDerivation deg={self.degree} {{{body}}}>"


def zero_derivation(gens: GeneratorSet, degree: int) -> GradedDerivation:
    return GradedDerivation(gens, degree, {}, check=False)


# -- module-level operation surface -----------------------------------------

def basis_enumerate(gens: GeneratorSet, degree: int, weight: int):
    """Every monomial of exactly this (degree, weight), in the global order."""
    return list(gens.basis(degree, weight))


def multiply(a: GradedElement, b: GradedElement) -> GradedElement:
    return a * b


def apply_derivation(D: GradedDerivation, a: GradedElement) -> GradedElement:
    return D.apply(a)


def derivation_commutator(D1: GradedDerivation, D2: GradedDerivation) -> GradedDerivation:
    """Graded commutator [D1, D2] = D1 D2 - (-1)^{|D1||D2|} D2 D1."""
    if D1.gens != D2.gens:
        raise MixedGeneratorSets("derivations live over different generator sets")
    sign = -1 if (D1.degree & 1) and (D2.degree & 1) else 1
    images = {}
    for name in D1.gens.names():
        img = D1.apply(D2.image(name)) - D2.apply(D1.image(name)).scale(sign)
        if not img.is_zero():
            images[name] = img
    return GradedDerivation(D1.gens, D1.degree + D2.degree, images, check=False)


def transport_element(el: GradedElement, gens: GeneratorSet,
                      rename: Mapping[str, str] | None = None) -> GradedElement:
    """Re-express an element over another generator set, matching by name.

    Used when a presentation's polynomials are lifted to an enlarged
    coordinate system (pull-backs).  Every generator appearing in `el` must
    map to a generator of the same parity in `gens`.
    """
    rename = rename or {}
    src = el.gens
    even_map = [gens.even_index(rename.get(n, n)) for n in src.even_names]
    odd_map = [gens.odd_index(rename.get(n, n)) for n in src.odd_names]
    out: dict[GradedMonomial, Rational] = {}
    for m, c in el.terms.items():
        evens = [0] * len(gens.evens)
        for i, e in enumerate(m.evens):
            if e:
                evens[even_map[i]] += e
        mask = 0
        sign = 1
        rest = m.mask
        while rest:
            low = rest & -rest
            j = odd_map[low.bit_length() - 1]
            bit = 1 << j
            # odd generators must stay in increasing order; count swaps
            if mask & bit:
                sign = 0
                break
            if (mask >> (j + 1)).bit_count() & 1:
                sign = -sign
            mask |= bit
            rest ^= low
        if sign:
            key = GradedMonomial(tuple(evens), mask)
            s = out.get(key, 0) + sign * c
            if s:
                out[key] = s
            else:
                out.pop(key, None)
    return GradedElement(gens, out)
