"""The deformation complex of a Lie algebroid, in both pictures.

Degree-k cochains are either (k+1)-multiderivations (c, s_c) on sections, or
equivalently degree-k derivations of the de Rham algebra (vector fields on
the shifted graded manifold).  The dictionary between the pictures acts on
generators by

    D_c(x^a)  =  sum_{i_1<...<i_k}  s^a_{i_1..i_k}  xi^{i_1}..xi^{i_k},
    D_c(xi^m) = -sum_{i_1<...<i_{k+1}} c^m_{i_1..i_{k+1}} xi^{i_1}..xi^{i_{k+1}},

using the determinant pairing xi^{j_1}..xi^{j_k}(e_{i_1},..,e_{i_k}) =
det(delta^{j_s}_{i_t}).  With these conventions the dictionary intertwines the
multiderivation differential with [d_A, -] on the nose (global sign +1),
which the test suite asserts on every corpus cochain.

Degree -1 cochains (contractions) exist in the derivation picture only;
conversions to the multiderivation picture reject them.
"""

from __future__ import annotations

from dataclasses import dataclass
from fractions import Fraction
from itertools import combinations, product
from typing import Mapping, Sequence

from .algebroid import (
    AlgebroidPresentation,
    DeRhamComplex,
    SectionVector,
    TangentVector,
    anchor_field,
    section_bracket,
    tangent_apply,
    tangent_commutator,
    vec_add,
    vec_eq,
    vec_is_zero,
    vec_scale,
)
from .graded import (
    GeneratorSet,
    GradedDerivation,
    GradedElement,
    GradedMonomial,
    MixedGeneratorSets,
    derivation_commutator,
    zero_derivation,
)


class DefCochain:
    """A deformation cochain: a degree-k derivation of the de Rham algebra."""

    __slots__ = ("gens", "degree", "derivation")

    def __init__(self, derivation: GradedDerivation):
        if derivation.degree < -1 and not derivation.is_zero():
            raise ValueError("deformation cochains have degree >= -1")
        self.gens = derivation.gens
        self.degree = derivation.degree
        self.derivation = derivation

    def image(self, name: str) -> GradedElement:
        return self.derivation.image(name)

    def apply(self, a: GradedElement) -> GradedElement:
        return self.derivation.apply(a)

    def is_zero(self) -> bool:
        return self.derivation.is_zero()

    def __eq__(self, other):
        if not isinstance(other, DefCochain):
            return NotImplemented
        return self.derivation == other.derivation

    __hash__ = None

    def __add__(self, other: "DefCochain") -> "DefCochain":
        return DefCochain(self.derivation + other.derivation)

    def scale(self, value) -> "DefCochain":
        return DefCochain(self.derivation.scale(value))

    def __repr__(self):
        return f"<DefCochain deg={self.degree} {self.derivation.images}>"


def def_delta(X: DefCochain, complex: DeRhamComplex) -> DefCochain:
    """The differential [d_A, X]."""
    if X.gens != complex.generators:
        raise MixedGeneratorSets("cochain does not live over the complex's generators")
    return DefCochain(derivation_commutator(complex.differential, X.derivation))


def def_bracket(X: DefCochain, Y: DefCochain) -> DefCochain:
    """The graded Lie bracket: the commutator of derivations."""
    return DefCochain(derivation_commutator(X.derivation, Y.derivation))


class Multiderivation:
    """A (k+1)-multiderivation: antisymmetric values table plus symbol.

    `values` maps increasing frame-index tuples of length k+1 to section
    vectors; `symbol` maps increasing tuples of length k to tangent vectors.
    Inputs on unsorted tuples are normalized with the permutation sign;
    conflicting duplicate entries are rejected.
    """

    def __init__(self, pres: AlgebroidPresentation, arity: int,
                 values: Mapping[Sequence[int], SectionVector] | None = None,
                 symbol: Mapping[Sequence[int], TangentVector] | None = None):
        if arity < 1:
            raise ValueError("arity must be >= 1")
        self.pres = pres
        self.arity = int(arity)
        self.values: dict[tuple[int, ...], SectionVector] = {}
        self.symbol: dict[tuple[int, ...], TangentVector] = {}
        for key, vec in (values or {}).items():
            self._insert(self.values, key, vec, self.arity)
        for key, vec in (symbol or {}).items():
            self._insert(self.symbol, key, vec, self.arity - 1)
        if pres.dim == 0 and any(not vec_is_zero(v) for v in self.symbol.values()):
            raise ValueError("symbol must vanish over a point")

    def _insert(self, table, key, vec, length):
        key = tuple(key)
        if len(key) != length:
            raise ValueError(f"table key {key} has length {len(key)}, expected {length}")
        if len(set(key)) != len(key):
            if any(not el.is_zero() for el in vec.values()):
                raise ValueError(f"entry on repeated indices {key} must vanish")
            return
        order = tuple(sorted(key))
        sign = _perm_sign(key, order)
        vec = {k: el.scale(sign) for k, el in vec.items() if not el.is_zero()}
        if order in table:
            if not vec_eq(table[order], vec):
                raise ValueError(f"conflicting duplicate entry on {key} (not antisymmetric)")
            return
        if vec:
            table[order] = vec

    def value_at(self, key: Sequence[int]) -> SectionVector:
        key = tuple(key)
        if len(set(key)) != len(key):
            return {}
        order = tuple(sorted(key))
        vec = self.values.get(order)
        if vec is None:
            return {}
        sign = _perm_sign(key, order)
        return vec_scale(vec, sign) if sign < 0 else dict(vec)

    def symbol_at(self, key: Sequence[int]) -> TangentVector:
        key = tuple(key)
        if len(set(key)) != len(key):
            return {}
        order = tuple(sorted(key))
        vec = self.symbol.get(order)
        if vec is None:
            return {}
        sign = _perm_sign(key, order)
        return vec_scale(vec, sign) if sign < 0 else dict(vec)

    def is_zero(self) -> bool:
        return not self.values and not self.symbol

    def __eq__(self, other):
        if not isinstance(other, Multiderivation):
            return NotImplemented
        if self.arity != other.arity:
            return False
        keys_v = set(self.values) | set(other.values)
        keys_s = set(self.symbol) | set(other.symbol)
        return (all(vec_eq(self.value_at(k), other.value_at(k)) for k in keys_v)
                and all(vec_eq(self.symbol_at(k), other.symbol_at(k)) for k in keys_s))

    __hash__ = None

    def __repr__(self):
        return f"<Multiderivation arity={self.arity} values on {sorted(self.values)}>"


def _perm_sign(seq: Sequence[int], sorted_seq: Sequence[int]) -> int:
    seq = list(seq)
    sign = 1
    for i in range(len(seq)):
        j = seq.index(sorted_seq[i], i)
        if j != i:
            seq[i], seq[j] = seq[j], seq[i]
            sign = -sign
    return sign


def multiderivation_apply(c: Multiderivation,
                          sections: Sequence[SectionVector]) -> SectionVector:
    """Evaluate c on polynomial sections, with the Leibniz corrections.

    c(a_1,..,a_{k+1}) = sum_I (prod f) c(e_I)
                      + sum_t (-1)^{k+1-t} sum_i s_c(a_1,..â_t..)(f_t^i) e_i
    """
    pres = c.pres
    gens = pres.generators
    k1 = c.arity
    if len(sections) != k1:
        raise ValueError(f"expected {k1} sections, got {len(sections)}")
    out: SectionVector = {}
    # multilinear contraction of the values table
    for combo in product(*[list(s.items()) for s in sections]):
        idx = tuple(i for i, _ in combo)
        coeff = None
        for _, f in combo:
            coeff = f if coeff is None else coeff * f
        for m, el in c.value_at(idx).items():
            term = el if coeff is None else coeff * el
            cur = out.get(m, gens.zero()) + term
            if cur.is_zero():
                out.pop(m, None)
            else:
                out[m] = cur
    # Leibniz corrections through the symbol
    for t in range(k1):
        rest = sections[:t] + list(sections[t + 1:])
        sgn = -1 if ((k1 - 1 - t) & 1) else 1
        sc = symbol_apply(c, rest)
        if not sc:
            continue
        for i, f in sections[t].items():
            g = tangent_apply(pres, sc, f)
            if g.is_zero():
                continue
            cur = out.get(i, gens.zero()) + g.scale(sgn)
            if cur.is_zero():
                out.pop(i, None)
            else:
                out[i] = cur
    return out


def symbol_apply(c: Multiderivation,
                 sections: Sequence[SectionVector]) -> TangentVector:
    """Contract the symbol with k sections (it is function-linear in each slot)."""
    pres = c.pres
    gens = pres.generators
    out: TangentVector = {}
    if len(sections) != c.arity - 1:
        raise ValueError(f"symbol takes {c.arity - 1} sections")
    for combo in product(*[list(s.items()) for s in sections]):
        idx = tuple(i for i, _ in combo)
        coeff = None
        for _, f in combo:
            coeff = f if coeff is None else coeff * f
        for a, el in c.symbol_at(idx).items():
            term = el if coeff is None else coeff * el
            cur = out.get(a, gens.zero()) + term
            if cur.is_zero():
                out.pop(a, None)
            else:
                out[a] = cur
    return out


def from_multiderivation(c: Multiderivation, pres: AlgebroidPresentation) -> DefCochain:
    """The derivation D_c determined by the tables (see module docstring)."""
    gens = pres.generators
    k = c.arity - 1
    images: dict[str, GradedElement] = {}
    for a, coord in enumerate(gens.even_names):
        img = gens.zero()
        for key, vec in c.symbol.items():
            el = vec.get(a)
            if el is not None:
                img = img + el * _odd_monomial(gens, key)
        if not img.is_zero():
            images[coord] = img
    for m, dual in enumerate(gens.odd_names):
        img = gens.zero()
        for key, vec in c.values.items():
            el = vec.get(m)
            if el is not None:
                img = img - el * _odd_monomial(gens, key)
        if not img.is_zero():
            images[dual] = img
    return DefCochain(GradedDerivation(gens, k, images))


def _odd_monomial(gens: GeneratorSet, indices: tuple[int, ...]) -> GradedElement:
    mask = 0
    for i in indices:
        mask |= 1 << i
    return GradedElement(gens, {GradedMonomial((0,) * len(gens.evens), mask): Fraction(1)})


def to_multiderivation(X: DefCochain, pres: AlgebroidPresentation) -> Multiderivation:
    """Extract the tables from generator images; inverse of `from_multiderivation`."""
    if X.degree < 0:
        raise ValueError("degree -1 cochains have no multiderivation picture")
    gens = pres.generators
    k = X.degree
    symbol: dict[tuple[int, ...], TangentVector] = {}
    values: dict[tuple[int, ...], SectionVector] = {}
    for a, coord in enumerate(gens.even_names):
        for key, poly in _split_by_mask(X.image(coord), gens).items():
            symbol.setdefault(key, {})[a] = poly
    for m, dual in enumerate(gens.odd_names):
        for key, poly in _split_by_mask(X.image(dual), gens).items():
            values.setdefault(key, {})[m] = -poly
    return Multiderivation(pres, k + 1, values=values, symbol=symbol)


def _split_by_mask(el: GradedElement, gens: GeneratorSet
                   ) -> dict[tuple[int, ...], GradedElement]:
    """Group an element by its odd factor subset, keeping even polynomial parts."""
    out: dict[tuple[int, ...], dict] = {}
    n = len(gens.evens)
    for mono, coeff in el.terms.items():
        idx = []
        mask = mono.mask
        while mask:
            low = mask & -mask
            idx.append(low.bit_length() - 1)
            mask ^= low
        key = tuple(idx)
        out.setdefault(key, {})[GradedMonomial(mono.evens, 0)] = coeff
    return {key: GradedElement(gens, terms) for key, terms in out.items()}


def delta_multiderivation(c: Multiderivation,
                          pres: AlgebroidPresentation) -> Multiderivation:
    """The multiderivation differential, computed on frame sections.

    Values:  delta c(a_0..a_{k+1}) = sum_t (-1)^t [a_t, c(..â_t..)]
             + sum_{t<u} (-1)^{t+u} c([a_t,a_u], ..â_t..â_u..).
    Symbol:  s_{delta c}(a_0..a_k) = sum_t (-1)^t [rho(a_t), s_c(..â_t..)]
             + sum_{t<u} (-1)^{t+u} s_c([a_t,a_u], ..â_t..â_u..)
             + (-1)^k rho(c(a_0..a_k)),
    the unique symbol making the values table satisfy the Leibniz rule.
    """
    gens = pres.generators
    k1 = c.arity          # arity of c
    r = pres.rank
    frames = [pres.frame_section(i) for i in range(r)]
    values: dict[tuple[int, ...], SectionVector] = {}
    for key in combinations(range(r), k1 + 1):
        acc: SectionVector = {}
        for t in range(k1 + 1):
            rest = [frames[key[u]] for u in range(k1 + 1) if u != t]
            inner = multiderivation_apply(c, rest)
            term = section_bracket(pres, frames[key[t]], inner)
            acc = vec_add(acc, vec_scale(term, -1) if (t & 1) else term)
        for t in range(k1 + 1):
            for u in range(t + 1, k1 + 1):
                br = section_bracket(pres, frames[key[t]], frames[key[u]])
                rest = [frames[key[v]] for v in range(k1 + 1) if v not in (t, u)]
                term = multiderivation_apply(c, [br] + rest)
                acc = vec_add(acc, vec_scale(term, -1) if ((t + u) & 1) else term)
        if not vec_is_zero(acc):
            values[key] = acc
    symbol: dict[tuple[int, ...], TangentVector] = {}
    if pres.dim:
        for key in combinations(range(r), k1):
            acc: TangentVector = {}
            for t in range(k1):
                rest = [frames[key[u]] for u in range(k1) if u != t]
                sc = symbol_apply(c, rest)
                term = tangent_commutator(pres, anchor_field(pres, frames[key[t]]), sc)
                acc = vec_add(acc, vec_scale(term, -1) if (t & 1) else term)
            for t in range(k1):
                for u in range(t + 1, k1):
                    br = section_bracket(pres, frames[key[t]], frames[key[u]])
                    rest = [frames[key[v]] for v in range(k1) if v not in (t, u)]
                    term = symbol_apply(c, [br] + rest)
                    acc = vec_add(acc, vec_scale(term, -1) if ((t + u) & 1) else term)
            term = anchor_field(pres, multiderivation_apply(c, [frames[i] for i in key]))
            acc = vec_add(acc, vec_scale(term, -1) if ((k1 - 1) & 1) else term)
            if not vec_is_zero(acc):
                symbol[key] = acc
    return Multiderivation(pres, k1 + 1, values=values, symbol=symbol)


@dataclass
class McDefectReport:
    defect: DefCochain
    is_mc: bool


def mc_defect(c: Multiderivation, pres: AlgebroidPresentation) -> McDefectReport:
    """Maurer-Cartan defect of an arity-2 cochain relative to the background.

    The deformed differential is d + D_c; its square vanishes iff
    [d, D_c] + D_c D_c = 0, which is delta c + 1/2 [c, c] in cochain terms.
    """
    if c.arity != 2:
        raise ValueError("Maurer-Cartan cochains have arity 2 (degree 1)")
    gens = pres.generators
    Dc = from_multiderivation(c, pres).derivation
    d = pres.de_rham().differential
    comm = derivation_commutator(d, Dc)
    square_images = {}
    for name in gens.names():
        img = Dc.apply(Dc.image(name))
        if not img.is_zero():
            square_images[name] = img
    square = GradedDerivation(gens, 2, square_images, check=False)
    defect = comm + square
    return McDefectReport(defect=DefCochain(defect), is_mc=defect.is_zero())


def deform(pres: AlgebroidPresentation, c: Multiderivation) -> AlgebroidPresentation:
    """Add an arity-2 cochain to the bracket table and its symbol to the anchor."""
    if c.arity != 2:
        raise ValueError("deformations are arity-2 cochains")
    gens = pres.generators
    structure: dict[tuple[str, str], SectionVector] = {}
    for (i, j) in set(pres.structure) | set(c.values):
        vec = vec_add(pres.structure_vector(i, j), c.value_at((i, j)))
        if not vec_is_zero(vec):
            structure[(gens.odd_names[i], gens.odd_names[j])] = vec
    anchor: dict[tuple[str, str], GradedElement] = {}
    for (a, i), el in pres.anchor.items():
        anchor[(gens.even_names[a], gens.odd_names[i])] = el
    for (i,), tv in c.symbol.items():
        for a, el in tv.items():
            key = (gens.even_names[a], gens.odd_names[i])
            cur = anchor.get(key, gens.zero()) + el
            if cur.is_zero():
                anchor.pop(key, None)
            else:
                anchor[key] = cur
    return AlgebroidPresentation(f"{pres.name}'", pres.base, pres.frame,
                                 anchor=anchor, structure=structure)
