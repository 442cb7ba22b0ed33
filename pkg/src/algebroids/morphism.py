"""Algebroid morphisms, pull-back of forms, and relative cochains.

A morphism F: A -> B is stored contravariantly by the generator images of the
pull-back algebra map F*: C(B) -> C(A); construction verifies the chain-map
law F* d_B = d_A F* on every generator of C(B).

Relative cochains Z: C(B) -> C(A) extend from generator images by

    Z(uv) = Z(u) F*(v) + (-1)^{|Z||u|} F*(u) Z(v),

and carry the differential delta Z = d_A Z - (-1)^{|Z|} Z d_B.  The two DG
module maps  X |-> X o F*  and  Y |-> F* o Y  land in this space.
"""

from __future__ import annotations

from fractions import Fraction
from typing import Mapping

from .algebroid import AlgebroidPresentation
from .deformation import DefCochain
from .graded import (
    GradedDerivation,
    GradedElement,
    GradedMonomial,
    MixedGeneratorSets,
)


class MorphismChainError(ValueError):
    """The generator assignment does not commute with the differentials."""


class AlgebroidMorphism:
    """A morphism F: source -> target, stored by F* on target generators."""

    def __init__(self, source: AlgebroidPresentation, target: AlgebroidPresentation,
                 images: Mapping[str, GradedElement], check: bool = True):
        self.source = source
        self.target = target
        sg = source.generators
        tg = target.generators
        self.images: dict[str, GradedElement] = {}
        for name in tg.names():
            el = images.get(name)
            if el is None:
                el = sg.zero()
            if el.gens != sg:
                raise MixedGeneratorSets(f"image of {name!r} is not over the source algebra")
            if check and not el.is_zero():
                if el.cochain_degree() != tg.degree_of(name):
                    raise ValueError(f"image of {name!r} must have degree {tg.degree_of(name)}")
                if el.weight_split().keys() - {tg.weight_of(name)}:
                    raise ValueError(f"image of {name!r} must have weight {tg.weight_of(name)}")
            self.images[name] = el
        if check:
            dA = source.de_rham().differential
            dB = target.de_rham().differential
            for name in tg.names():
                lhs = self.pullback(dB.image(name))
                rhs = dA.apply(self.images[name])
                if lhs != rhs:
                    raise MorphismChainError(
                        f"F* d_B != d_A F* on generator {name!r} "
                        f"({source.name} -> {target.name})")

    @classmethod
    def identity(cls, pres: AlgebroidPresentation) -> "AlgebroidMorphism":
        gens = pres.generators
        return cls(pres, pres, {n: gens.var(n) for n in gens.names()}, check=False)

    def pullback(self, omega: GradedElement) -> GradedElement:
        """Multiplicative extension of the generator images."""
        tg = self.target.generators
        sg = self.source.generators
        if omega.gens != tg:
            raise MixedGeneratorSets("form does not live over the target algebra")
        out = sg.zero()
        for mono, coeff in omega.terms.items():
            term = sg.scalar(coeff)
            for i, e in enumerate(mono.evens):
                if not e:
                    continue
                img = self.images[tg.even_names[i]]
                for _ in range(e):
                    term = term * img
                if term.is_zero():
                    break
            mask = mono.mask
            while mask and not term.is_zero():
                low = mask & -mask
                term = term * self.images[tg.odd_names[low.bit_length() - 1]]
                mask ^= low
            out = out + term
        return out

    def __repr__(self):
        return f"<AlgebroidMorphism {self.source.name} -> {self.target.name}>"


def pullback_forms(F: AlgebroidMorphism, omega: GradedElement) -> GradedElement:
    return F.pullback(omega)


class RelativeCochain:
    """A degree-|Z| relative cochain along F, stored by target-generator images."""

    __slots__ = ("F", "degree", "images")

    def __init__(self, F: AlgebroidMorphism, degree: int,
                 images: Mapping[str, GradedElement], check: bool = True):
        self.F = F
        self.degree = int(degree)
        sg = F.source.generators
        tg = F.target.generators
        clean: dict[str, GradedElement] = {}
        for name, el in images.items():
            if el.is_zero():
                continue
            if check:
                if el.gens != sg:
                    raise MixedGeneratorSets(f"image of {name!r} is not over the source algebra")
                want = tg.degree_of(name) + self.degree
                if el.cochain_degree() != want:
                    raise ValueError(f"image of {name!r} must have degree {want}")
            clean[name] = el
        self.images = clean

    def image(self, name: str) -> GradedElement:
        el = self.images.get(name)
        return el if el is not None else self.F.source.generators.zero()

    def is_zero(self) -> bool:
        return not self.images

    def __eq__(self, other):
        if not isinstance(other, RelativeCochain):
            return NotImplemented
        names = set(self.images) | set(other.images)
        return all(self.image(n) == other.image(n) for n in names)

    __hash__ = None

    def __add__(self, other: "RelativeCochain") -> "RelativeCochain":
        if self.degree != other.degree:
            raise ValueError("cannot add relative cochains of different degrees")
        names = set(self.images) | set(other.images)
        return RelativeCochain(self.F, self.degree,
                               {n: self.image(n) + other.image(n) for n in names},
                               check=False)

    def scale(self, value) -> "RelativeCochain":
        return RelativeCochain(self.F, self.degree,
                               {n: el.scale(value) for n, el in self.images.items()},
                               check=False)

    def apply(self, omega: GradedElement) -> GradedElement:
        """Leibniz extension with F* on the untouched factors."""
        tg = self.F.target.generators
        sg = self.F.source.generators
        if omega.gens != tg:
            raise MixedGeneratorSets("argument does not live over the target algebra")
        parity = self.degree & 1
        out = sg.zero()
        for mono, coeff in omega.terms.items():
            factors: list[str] = []
            for i, e in enumerate(mono.evens):
                factors.extend([tg.even_names[i]] * e)
            mask = mono.mask
            while mask:
                low = mask & -mask
                factors.append(tg.odd_names[low.bit_length() - 1])
                mask ^= low
            prefix_degree = 0
            for pos, name in enumerate(factors):
                img = self.images.get(name)
                if img is not None:
                    term = sg.scalar(coeff)
                    if parity and (prefix_degree & 1):
                        term = term.scale(-1)
                    for other in factors[:pos]:
                        term = term * self.F.images[other]
                    term = term * img
                    for other in factors[pos + 1:]:
                        term = term * self.F.images[other]
                    out = out + term
                prefix_degree += tg.degree_of(name)
        return out

    def __repr__(self):
        return f"<RelativeCochain deg={self.degree} along {self.F!r}>"


def relative_delta(Z: RelativeCochain, F: AlgebroidMorphism) -> RelativeCochain:
    """delta Z = d_A o Z - (-1)^{|Z|} Z o d_B, recorded on target generators."""
    dA = F.source.de_rham().differential
    dB = F.target.de_rham().differential
    sign = -1 if (Z.degree & 1) else 1
    images = {}
    for name in F.target.generators.names():
        img = dA.apply(Z.image(name)) - Z.apply(dB.image(name)).scale(sign)
        if not img.is_zero():
            images[name] = img
    return RelativeCochain(F, Z.degree + 1, images, check=False)


def lower_star(F: AlgebroidMorphism, X: DefCochain) -> RelativeCochain:
    """X |-> X o F* for a deformation cochain on the source."""
    if X.gens != F.source.generators:
        raise MixedGeneratorSets("cochain does not live on the source algebroid")
    images = {}
    for name in F.target.generators.names():
        img = X.apply(F.images[name])
        if not img.is_zero():
            images[name] = img
    return RelativeCochain(F, X.degree, images, check=False)


def upper_star(F: AlgebroidMorphism, Y: DefCochain) -> RelativeCochain:
    """Y |-> F* o Y for a deformation cochain on the target."""
    if Y.gens != F.target.generators:
        raise MixedGeneratorSets("cochain does not live on the target algebroid")
    images = {}
    for name in F.target.generators.names():
        img = F.pullback(Y.image(name))
        if not img.is_zero():
            images[name] = img
    return RelativeCochain(F, Y.degree, images, check=False)
