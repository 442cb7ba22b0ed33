"""Blockwise views of the cochain complexes the engine computes with.

Every complex here decomposes into finite (degree, weight) blocks with a
canonical ordered basis, and knows how to apply its differential and to take
coordinates of a value in a block basis.  Three families cover everything:

* `ElementComplex` - spans of algebra monomials with a derivation
  differential (de Rham complexes, form algebras, vertical complexes).
* `DeformationComplex` - derivation-valued cochains spanned by mu d/dg with
  differential [d, -]; an optional generator restriction carves out the
  subcomplex of derivations supported on chosen directions (used for the
  kernel of the projection's lower-star map).
* `RelativeComplex` - cochains along a morphism, spanned by mu d/dg for
  target generators g with source-algebra coefficients mu.

Weights of basis cochains are weight(mu) - weight(g), so all complexes share
one bookkeeping convention and induced maps can be compared blockwise.
"""

from __future__ import annotations

from fractions import Fraction
from typing import Callable, Iterable, Sequence

from .algebroid import DeRhamComplex
from .deformation import DefCochain
from .graded import (
    GeneratorSet,
    GradedDerivation,
    GradedElement,
    GradedMonomial,
    derivation_commutator,
)
from .linalg import SparseRationalMatrix
from .morphism import AlgebroidMorphism, RelativeCochain, relative_delta


class BlockDecompositionError(ValueError):
    """A value leaves the span of the block basis (broken subcomplex?)."""


class ElementComplex:
    """Monomial-spanned blocks of a graded algebra with a derivation differential."""

    def __init__(self, gens: GeneratorSet, differential: GradedDerivation,
                 label: str = "", monomial_filter: Callable[[GradedMonomial], bool] | None = None):
        self.gens = gens
        self.differential = differential
        self.label = label
        self.monomial_filter = monomial_filter
        self._keys: dict[tuple[int, int], tuple] = {}
        self._matrices: dict[tuple[int, int], SparseRationalMatrix] = {}

    @classmethod
    def of_de_rham(cls, complex: DeRhamComplex, label: str = "") -> "ElementComplex":
        return cls(complex.generators, complex.differential,
                   label or f"C({complex.presentation.name})")

    def block_keys(self, degree: int, weight: int):
        cached = self._keys.get((degree, weight))
        if cached is None:
            keys = self.gens.basis(degree, weight)
            if self.monomial_filter is not None:
                keys = tuple(m for m in keys if self.monomial_filter(m))
            self._keys[(degree, weight)] = keys
            cached = keys
        return cached

    def block_dim(self, degree: int, weight: int) -> int:
        return len(self.block_keys(degree, weight))

    def key_value(self, key: GradedMonomial) -> GradedElement:
        return GradedElement(self.gens, {key: Fraction(1)})

    def apply_d(self, value: GradedElement) -> GradedElement:
        return self.differential.apply(value)

    def decompose(self, value: GradedElement, degree: int, weight: int) -> dict:
        index = {m: i for i, m in enumerate(self.block_keys(degree, weight))}
        out = {}
        for mono, coeff in value.terms.items():
            i = index.get(mono)
            if i is None:
                raise BlockDecompositionError(
                    f"{self.label}: term {self.gens.format_monomial(mono)} "
                    f"outside block ({degree},{weight})")
            out[i] = coeff
        return out

    def matrix(self, degree: int, weight: int) -> SparseRationalMatrix:
        cached = self._matrices.get((degree, weight))
        if cached is not None:
            return cached
        src = self.block_keys(degree, weight)
        dst_dim = self.block_dim(degree + 1, weight)
        entries = {}
        for col, key in enumerate(src):
            img = self.apply_d(self.key_value(key))
            for row, v in self.decompose(img, degree + 1, weight).items():
                entries[(row, col)] = v
        mat = SparseRationalMatrix(dst_dim, len(src), entries)
        self._matrices[(degree, weight)] = mat
        return mat


class DeformationComplex:
    """Blocks of derivation-valued cochains with differential [d, -].

    Basis cochains are mu d/dg: the derivation sending generator g to the
    monomial mu and every other generator to zero.  With `allowed_gens` the
    basis is restricted to derivations supported on those generators; the
    block matrices then assert that the differential stays supported there.
    """

    def __init__(self, complex: DeRhamComplex, label: str = "",
                 allowed_gens: Sequence[str] | None = None):
        self.complex = complex
        self.gens = complex.generators
        self.label = label or f"C_def({complex.presentation.name})"
        names = self.gens.names()
        if allowed_gens is not None:
            allowed = set(allowed_gens)
            names = tuple(n for n in names if n in allowed)
        self.support = names
        self._keys: dict[tuple[int, int], tuple] = {}
        self._matrices: dict[tuple[int, int], SparseRationalMatrix] = {}

    def block_keys(self, degree: int, weight: int):
        cached = self._keys.get((degree, weight))
        if cached is not None:
            return cached
        keys = []
        for name in self.support:
            mu_deg = degree + self.gens.degree_of(name)
            mu_w = weight + self.gens.weight_of(name)
            for mono in self.gens.basis(mu_deg, mu_w):
                keys.append((name, mono))
        result = tuple(keys)
        self._keys[(degree, weight)] = result
        return result

    def block_dim(self, degree: int, weight: int) -> int:
        return len(self.block_keys(degree, weight))

    def key_value(self, key) -> DefCochain:
        name, mono = key
        el = GradedElement(self.gens, {mono: Fraction(1)})
        degree = mono.degree - self.gens.degree_of(name)
        return DefCochain(GradedDerivation(self.gens, degree, {name: el}, check=False))

    def apply_d(self, value: DefCochain) -> DefCochain:
        return DefCochain(derivation_commutator(self.complex.differential, value.derivation))

    def decompose(self, value: DefCochain, degree: int, weight: int) -> dict:
        index = {k: i for i, k in enumerate(self.block_keys(degree, weight))}
        out = {}
        support = set(self.support)
        for name, el in value.derivation.images.items():
            if el.is_zero():
                continue
            if name not in support:
                raise BlockDecompositionError(
                    f"{self.label}: image on generator {name!r} outside the allowed support")
            for mono, coeff in el.terms.items():
                i = index.get((name, mono))
                if i is None:
                    raise BlockDecompositionError(
                        f"{self.label}: term {name} -> {self.gens.format_monomial(mono)} "
                        f"outside block ({degree},{weight})")
                out[i] = coeff
        return out

    def matrix(self, degree: int, weight: int) -> SparseRationalMatrix:
        cached = self._matrices.get((degree, weight))
        if cached is not None:
            return cached
        src = self.block_keys(degree, weight)
        dst_dim = self.block_dim(degree + 1, weight)
        entries = {}
        for col, key in enumerate(src):
            img = self.apply_d(self.key_value(key))
            for row, v in self.decompose(img, degree + 1, weight).items():
                entries[(row, col)] = v
        mat = SparseRationalMatrix(dst_dim, len(src), entries)
        self._matrices[(degree, weight)] = mat
        return mat


class RelativeComplex:
    """Blocks of relative cochains along a morphism F: source -> target.

    Basis cochains send one target generator g to a source monomial mu and
    every other generator to zero; differential is delta from `morphism`.
    """

    def __init__(self, F: AlgebroidMorphism, label: str = ""):
        self.F = F
        self.source_gens = F.source.generators
        self.target_gens = F.target.generators
        self.label = label or f"C({F.source.name}->{F.target.name})"
        self._keys: dict[tuple[int, int], tuple] = {}
        self._matrices: dict[tuple[int, int], SparseRationalMatrix] = {}

    def block_keys(self, degree: int, weight: int):
        cached = self._keys.get((degree, weight))
        if cached is not None:
            return cached
        keys = []
        for name in self.target_gens.names():
            mu_deg = degree + self.target_gens.degree_of(name)
            mu_w = weight + self.target_gens.weight_of(name)
            for mono in self.source_gens.basis(mu_deg, mu_w):
                keys.append((name, mono))
        result = tuple(keys)
        self._keys[(degree, weight)] = result
        return result

    def block_dim(self, degree: int, weight: int) -> int:
        return len(self.block_keys(degree, weight))

    def key_value(self, key) -> RelativeCochain:
        name, mono = key
        el = GradedElement(self.source_gens, {mono: Fraction(1)})
        degree = mono.degree - self.target_gens.degree_of(name)
        return RelativeCochain(self.F, degree, {name: el}, check=False)

    def apply_d(self, value: RelativeCochain) -> RelativeCochain:
        return relative_delta(value, self.F)

    def decompose(self, value: RelativeCochain, degree: int, weight: int) -> dict:
        index = {k: i for i, k in enumerate(self.block_keys(degree, weight))}
        out = {}
        for name, el in value.images.items():
            for mono, coeff in el.terms.items():
                i = index.get((name, mono))
                if i is None:
                    raise BlockDecompositionError(
                        f"{self.label}: term {name} -> "
                        f"{self.source_gens.format_monomial(mono)} outside block "
                        f"({degree},{weight})")
                out[i] = coeff
        return out

    def matrix(self, degree: int, weight: int) -> SparseRationalMatrix:
        cached = self._matrices.get((degree, weight))
        if cached is not None:
            return cached
        src = self.block_keys(degree, weight)
        dst_dim = self.block_dim(degree + 1, weight)
        entries = {}
        for col, key in enumerate(src):
            img = self.apply_d(self.key_value(key))
            for row, v in self.decompose(img, degree + 1, weight).items():
                entries[(row, col)] = v
        mat = SparseRationalMatrix(dst_dim, len(src), entries)
        self._matrices[(degree, weight)] = mat
        return mat


class ChainMap:
    """A degree-0 map of block complexes, given by a function on values."""

    def __init__(self, source, target, fn: Callable, label: str = ""):
        self.source = source
        self.target = target
        self.fn = fn
        self.label = label or "chain map"

    def verify_chain_law(self, degree: int, weight: int) -> bool:
        """d o f == f o d on the block basis, compared in coordinates."""
        for key in self.source.block_keys(degree, weight):
            x = self.source.key_value(key)
            lhs = self.target.apply_d(self.fn(x))
            rhs = self.fn(self.source.apply_d(x))
            lc = self.target.decompose(lhs, degree + 1, weight)
            rc = self.target.decompose(rhs, degree + 1, weight)
            if lc != rc:
                return False
        return True

    def matrix(self, degree: int, weight: int) -> SparseRationalMatrix:
        src = self.source.block_keys(degree, weight)
        dst_dim = self.target.block_dim(degree, weight)
        entries = {}
        for col, key in enumerate(src):
            img = self.fn(self.source.key_value(key))
            for row, v in self.target.decompose(img, degree, weight).items():
                entries[(row, col)] = v
        return SparseRationalMatrix(dst_dim, len(src), entries)
