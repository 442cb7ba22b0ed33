"""Pull-back algebroids along coordinate submersions and their filtration.

The submersions are trivial projections P = M x R^k -> M with weighted fiber
coordinates.  The pull-back presentation has vertical sections v_a (anchored
to d/du_a) and horizontal lifts of the original frame; with horizontal lifts
the mixed brackets vanish and the structure table pulls back verbatim, so the
construction stays closed-form and `validate` certifies it.

The algebra of the pull-back carries the filtration by count of lifted
(fiber-dual) odd factors.  The associated graded differential is the vertical
de Rham differential, and the E0/E1 pages of both the form complex and the
relative deformation complex are computed blockwise here.  The kernel of the
projection's lower-star map has an explicit contracting homotopy, built from
the decomposition V = L_J + i_K of derivations of a form algebra into a Lie
part and a contraction part.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from fractions import Fraction
from typing import Iterable, Mapping, Sequence

from .algebroid import (
    AlgebroidPresentation,
    DeRhamComplex,
    build_differential,
    presentation_generators,
    validate,
)
from .complexes import DeformationComplex, ElementComplex, RelativeComplex
from .deformation import DefCochain
from .graded import (
    ORIGIN_FIBER,
    ORIGIN_VERTICAL,
    GeneratorSet,
    GradedDerivation,
    GradedElement,
    GradedMonomial,
    derivation_commutator,
    transport_element,
    zero_derivation,
)
from .linalg import SparseRationalMatrix
from .morphism import AlgebroidMorphism


@dataclass(frozen=True)
class SubmersionSpec:
    """A coordinate projection M x R^k -> M with weighted fiber coordinates."""
    base: tuple[tuple[str, int], ...]
    fibers: tuple[tuple[str, int], ...]

    def __init__(self, base: Iterable[tuple[str, int]], fibers: Iterable[tuple[str, int]]):
        object.__setattr__(self, "base", tuple((str(n), int(w)) for n, w in base))
        object.__setattr__(self, "fibers", tuple((str(n), int(w)) for n, w in fibers))
        if not self.fibers:
            raise ValueError("a submersion needs at least one fiber coordinate")
        base_names = {n for n, _ in self.base}
        fiber_names = [n for n, _ in self.fibers]
        if len(set(fiber_names)) != len(fiber_names) or base_names & set(fiber_names):
            raise ValueError("fiber coordinate names must be fresh and distinct")
        for n, w in self.fibers:
            if w < 1:
                raise ValueError(f"fiber coordinate {n!r} needs weight >= 1")


@dataclass
class PullbackPresentation:
    """The pull-back algebroid with its projection morphism."""
    presentation: AlgebroidPresentation
    projection: AlgebroidMorphism             # from the pull-back to the original
    vertical_marker: tuple[str, ...]          # names of the vertical frame sections
    submersion: SubmersionSpec
    source: AlgebroidPresentation

    def vertical_mask(self) -> int:
        gens = self.presentation.generators
        mask = 0
        for name in self.vertical_marker:
            mask |= 1 << gens.odd_index(name)
        return mask


def vertical_section_name(fiber_coord: str) -> str:
    return f"v_{fiber_coord}"


def pullback_algebroid(pres: AlgebroidPresentation, sub: SubmersionSpec) -> PullbackPresentation:
    """Build the pull-back presentation over P = M x R^k and its projection."""
    if sub.base != pres.base:
        raise ValueError("submersion base does not match the presentation's base")
    taken = set(pres.generators.names()) | {n for n, _ in sub.fibers}
    vertical = []
    for n, w in sub.fibers:
        vn = vertical_section_name(n)
        if vn in taken:
            raise ValueError(f"vertical section name {vn!r} collides with an existing name")
        taken.add(vn)
        vertical.append((vn, w))
    base = list(pres.base) + list(sub.fibers)
    frame = vertical + list(pres.frame)
    origins = [ORIGIN_VERTICAL] * len(vertical) + [ORIGIN_FIBER] * len(pres.frame)
    gens = presentation_generators(base, frame, origins)
    k = len(vertical)
    anchor: dict[tuple[str, str], GradedElement] = {}
    for a, (u_name, _) in enumerate(sub.fibers):
        anchor[(u_name, vertical[a][0])] = gens.scalar(1)
    for (a, i), el in pres.anchor.items():
        coord = pres.generators.even_names[a]
        sec = pres.generators.odd_names[i]
        anchor[(coord, sec)] = transport_element(el, gens)
    structure: dict[tuple[str, str], dict[int, GradedElement]] = {}
    for (i, j), vec in pres.structure.items():
        si = pres.generators.odd_names[i]
        sj = pres.generators.odd_names[j]
        structure[(si, sj)] = {m + k: transport_element(el, gens) for m, el in vec.items()}
    result = AlgebroidPresentation(f"{pres.name}_pullback", base, frame,
                                   anchor=anchor, structure=structure,
                                   frame_origins=origins)
    report = validate(result)
    if not report.passed:
        raise AssertionError(f"pull-back of {pres.name} failed validation")
    images = {}
    for name in pres.generators.names():
        images[name] = result.generators.var(name)
    projection = AlgebroidMorphism(result, pres, images)
    return PullbackPresentation(result, projection, tuple(n for n, _ in vertical), sub, pres)


@dataclass
class SesReport:
    """Exactness bookkeeping for  0 -> VP -> pull-back -> pulled-back A -> 0."""
    rank_additivity: bool
    inclusion_injective: bool
    projection_surjective: bool
    composition_zero: bool

    @property
    def passed(self) -> bool:
        return (self.rank_additivity and self.inclusion_injective
                and self.projection_surjective and self.composition_zero)


def ses_check(ppres: PullbackPresentation,
              inclusion: SparseRationalMatrix | None = None,
              projection: SparseRationalMatrix | None = None) -> SesReport:
    """Verify the short exact sequence at frame level, as exact matrix facts.

    The default matrices are the canonical ones; tests pass mutated matrices
    to exercise the failure branches.
    """
    pres = ppres.presentation
    k = len(ppres.vertical_marker)
    r = pres.rank - k
    gens = pres.generators
    if inclusion is None:
        entries = {}
        for col, name in enumerate(ppres.vertical_marker):
            entries[(gens.odd_index(name), col)] = Fraction(1)
        inclusion = SparseRationalMatrix(pres.rank, k, entries)
    if projection is None:
        vert = set(ppres.vertical_marker)
        entries = {}
        row = 0
        for i, name in enumerate(gens.odd_names):
            if name not in vert:
                entries[(row, i)] = Fraction(1)
                row += 1
        projection = SparseRationalMatrix(r, pres.rank, entries)
    comp = projection @ inclusion
    return SesReport(
        rank_additivity=(k + r == pres.rank),
        inclusion_injective=(inclusion.rank() == k),
        projection_surjective=(projection.rank() == r),
        composition_zero=comp.is_zero(),
    )


def vertical_de_rham(ppres: PullbackPresentation) -> GradedDerivation:
    """The fiberwise de Rham differential: u_a -> eta^a, everything else -> 0."""
    gens = ppres.presentation.generators
    images = {}
    for u_name, _ in ppres.submersion.fibers:
        images[u_name] = gens.var(vertical_section_name(u_name))
    return GradedDerivation(gens, 1, images)


def filtration_level(a: GradedElement) -> int | None:
    """Minimum count of lifted (fiber-dual) odd factors; None for zero."""
    if a.is_zero():
        return None
    fib = a.gens.origin_mask(ORIGIN_FIBER)
    return min((m.mask & fib).bit_count() for m in a.terms)


@dataclass
class SpectralBlock:
    kind: str
    p: int
    q: int
    weight: int
    e0_dimension: int
    d0_matrix: SparseRationalMatrix
    e1_dimension: int


def _bigrade_keys_dr(ppres: PullbackPresentation, p: int, q: int, weight: int):
    gens = ppres.presentation.generators
    fib = gens.origin_mask(ORIGIN_FIBER)
    vert = gens.origin_mask(ORIGIN_VERTICAL)
    keys = []
    for mono in gens.basis(p + q, weight):
        if (mono.mask & fib).bit_count() == p and (mono.mask & vert).bit_count() == q:
            keys.append(mono)
    return keys


def _bigrade_keys_def(ppres: PullbackPresentation, p: int, q: int, weight: int):
    """Relative-cochain basis keys (g over A, mu over the pull-back) of
    filtration level p and vertical form degree q."""
    gens = ppres.presentation.generators
    agens = ppres.source.generators
    fib = gens.origin_mask(ORIGIN_FIBER)
    vert = gens.origin_mask(ORIGIN_VERTICAL)
    keys = []
    for name in agens.names():
        dg = agens.degree_of(name)
        mu_deg = p + q + dg
        mu_w = weight + agens.weight_of(name)
        if mu_deg < 0:
            continue
        for mono in gens.basis(mu_deg, mu_w):
            if ((mono.mask & fib).bit_count() - dg == p
                    and (mono.mask & vert).bit_count() == q):
                keys.append((name, mono))
    return keys


def e_page(ppres: PullbackPresentation, kind: str, p: int, q: int,
           weight: int) -> SpectralBlock:
    """E0 dimension, the d0 matrix, and the E1 dimension at (p, q, weight).

    d0 is computed two ways and asserted equal: by projecting the full
    differential to the associated graded, and by applying the vertical de
    Rham differential alone.
    """
    if kind not in ("dr", "def"):
        raise ValueError("kind must be 'dr' or 'def'")
    if q < 0 or p < (0 if kind == "dr" else -1):
        raise ValueError(f"bigrade ({p},{q}) out of range for kind {kind!r}")
    dv = vertical_de_rham(ppres)
    d0 = _d0_matrix(ppres, kind, p, q, weight, dv)
    d0_prev = _d0_matrix(ppres, kind, p, q - 1, weight, dv) if q > 0 else None
    dim = d0.cols
    kernel = dim - d0.rank() if dim else 0
    image = d0_prev.rank() if d0_prev is not None else 0
    return SpectralBlock(kind=kind, p=p, q=q, weight=weight,
                         e0_dimension=dim, d0_matrix=d0,
                         e1_dimension=kernel - image)


def _d0_matrix(ppres: PullbackPresentation, kind: str, p: int, q: int,
               weight: int, dv: GradedDerivation) -> SparseRationalMatrix:
    gens = ppres.presentation.generators
    d_full = ppres.presentation.de_rham().differential
    if kind == "dr":
        src = _bigrade_keys_dr(ppres, p, q, weight)
        dst = _bigrade_keys_dr(ppres, p, q + 1, weight)
        index = {m: i for i, m in enumerate(dst)}
        entries = {}
        for col, mono in enumerate(src):
            one = GradedElement(gens, {mono: Fraction(1)})
            full = d_full.apply(one)
            vert_only = dv.apply(one)
            proj = {m: c for m, c in full.terms.items() if m in index}
            if proj != dict(vert_only.terms):
                raise AssertionError("d0 differs from the vertical differential on the page")
            for m, c in proj.items():
                entries[(index[m], col)] = c
        return SparseRationalMatrix(len(dst), len(src), entries)
    # kind == "def": relative cochains along the projection
    rel = RelativeComplex(ppres.projection)
    src = _bigrade_keys_def(ppres, p, q, weight)
    dst = _bigrade_keys_def(ppres, p, q + 1, weight)
    index = {k: i for i, k in enumerate(dst)}
    entries = {}
    for col, (name, mono) in enumerate(src):
        z = rel.key_value((name, mono))
        dz = rel.apply_d(z)
        proj = {}
        for g, el in dz.images.items():
            for m, c in el.terms.items():
                key = (g, m)
                if key in index:
                    proj[key] = c
        expected = dv.apply(GradedElement(gens, {mono: Fraction(1)}))
        expected_terms = {(name, m): c for m, c in expected.terms.items()}
        if proj != expected_terms:
            raise AssertionError("def-page d0 differs from the vertical differential")
        for key, c in proj.items():
            entries[(index[key], col)] = c
    return SparseRationalMatrix(len(dst), len(src), entries)


def e1_d1_matrix(ppres: PullbackPresentation, kind: str, p: int,
                 weight: int) -> SparseRationalMatrix:
    """The induced differential on the q = 0 line of the E1 page.

    Representatives of E1^{p,0} are the basis vectors with no fiber
    coordinates and no vertical odd factors; the full differential keeps that
    span, and the resulting matrix is returned in the canonical basis
    identification with the original complex.
    """
    gens = ppres.presentation.generators
    vert_even = {n for n, _ in ppres.submersion.fibers}
    vmask = gens.origin_mask(ORIGIN_VERTICAL)

    def base_like(mono: GradedMonomial) -> bool:
        if mono.mask & vmask:
            return False
        return all(e == 0 for e, n in zip(mono.evens, gens.even_names) if n in vert_even)

    if kind == "dr":
        d_full = ppres.presentation.de_rham().differential
        src = [m for m in _bigrade_keys_dr(ppres, p, 0, weight) if base_like(m)]
        dst = [m for m in _bigrade_keys_dr(ppres, p + 1, 0, weight) if base_like(m)]
        index = {m: i for i, m in enumerate(dst)}
        entries = {}
        for col, mono in enumerate(src):
            img = d_full.apply(GradedElement(gens, {mono: Fraction(1)}))
            for m, c in img.terms.items():
                row = index.get(m)
                if row is None:
                    raise AssertionError("E1 line is not preserved by the differential")
                entries[(row, col)] = c
        return SparseRationalMatrix(len(dst), len(src), entries)
    rel = RelativeComplex(ppres.projection)
    src = [k for k in _bigrade_keys_def(ppres, p, 0, weight) if base_like(k[1])]
    dst = [k for k in _bigrade_keys_def(ppres, p + 1, 0, weight) if base_like(k[1])]
    index = {k: i for i, k in enumerate(dst)}
    entries = {}
    for col, key in enumerate(src):
        dz = rel.apply_d(rel.key_value(key))
        for g, el in dz.images.items():
            for m, c in el.terms.items():
                row = index.get((g, m))
                if row is None:
                    raise AssertionError("E1 line is not preserved by the differential")
                entries[(row, col)] = c
    return SparseRationalMatrix(len(dst), len(src), entries)


# -- form algebras and the Lie/contraction decomposition -----------------------

class FormComplex:
    """The de Rham algebra of a weighted coordinate space.

    Odd generators are the coordinate differentials d<name>; the ones dual to
    the chosen vertical coordinates are tagged as vertical forms.
    """

    def __init__(self, coords: Sequence[tuple[str, int]],
                 vertical: Iterable[str] = ()):
        vertical = set(vertical)
        unknown = vertical - {n for n, _ in coords}
        if unknown:
            raise ValueError(f"unknown vertical coordinates {sorted(unknown)}")
        odds = []
        for n, w in coords:
            tag = ORIGIN_VERTICAL if n in vertical else ORIGIN_FIBER
            odds.append((f"d{n}", w, tag))
        self.coords = tuple((str(n), int(w)) for n, w in coords)
        self.vertical = frozenset(vertical)
        self.gens = GeneratorSet(self.coords, odds)
        self.d = GradedDerivation(
            self.gens, 1, {n: self.gens.var(f"d{n}") for n, _ in coords})

    def dual_name(self, coord: str) -> str:
        return f"d{coord}"


@dataclass
class FormValuedVectorField:
    """J = sum_c J^c (x) d/dc with form coefficients of one common degree."""
    form_degree: int
    components: dict[str, GradedElement]

    def is_zero(self) -> bool:
        return all(el.is_zero() for el in self.components.values())

    def is_vertical(self, fc: FormComplex) -> bool:
        return all(el.is_zero() for c, el in self.components.items()
                   if c not in fc.vertical)


def contraction_of(fc: FormComplex, J: FormValuedVectorField) -> GradedDerivation:
    """i_J: kills coordinates, sends each differential to the J component."""
    images = {fc.dual_name(c): el for c, el in J.components.items() if not el.is_zero()}
    return GradedDerivation(fc.gens, J.form_degree - 1, images, check=False)


def lie_of(fc: FormComplex, J: FormValuedVectorField) -> GradedDerivation:
    """L_J = [i_J, d]."""
    return derivation_commutator(contraction_of(fc, J), fc.d)


def fn_decompose(fc: FormComplex, V: GradedDerivation
                 ) -> tuple[FormValuedVectorField, FormValuedVectorField]:
    """Split a derivation of the form algebra as V = L_J + i_K, uniquely.

    J is read off the coordinate images; K collects what remains on the
    differentials.  The reconstruction is verified on every generator.
    """
    if V.gens != fc.gens:
        raise ValueError("derivation does not live on this form algebra")
    d = V.degree
    J = FormValuedVectorField(d, {c: V.image(c) for c, _ in fc.coords})
    LJ = lie_of(fc, J)
    K = FormValuedVectorField(
        d + 1, {c: V.image(fc.dual_name(c)) - LJ.image(fc.dual_name(c))
                for c, _ in fc.coords})
    recon = LJ + contraction_of(fc, K)
    if recon != V:
        raise AssertionError("Lie/contraction decomposition failed to reconstruct")
    return J, K


def homotopy_h(fc: FormComplex, V: GradedDerivation,
               vertical_check: bool = True) -> GradedDerivation:
    """h(V) = (-1)^{|V|} i_J, the contracting homotopy on vertical derivations.

    Satisfies V = [d, h(V)] + h([d, V]) exactly.
    """
    J, K = fn_decompose(fc, V)
    if vertical_check and not (J.is_vertical(fc) and K.is_vertical(fc)):
        raise ValueError("derivation is not vertical: J or K has horizontal components")
    sign = -1 if (V.degree & 1) else 1
    return contraction_of(fc, J).scale(sign)


# -- kernel of the projection's lower-star map ---------------------------------

def kernel_complex(ppres: PullbackPresentation) -> DeformationComplex:
    """Derivations of the pull-back algebra killing the lifted subalgebra."""
    names = [n for n, _ in ppres.submersion.fibers]
    names += list(ppres.vertical_marker)
    return DeformationComplex(ppres.presentation.de_rham(),
                              label=f"K({ppres.presentation.name})",
                              allowed_gens=names)


def kernel_homotopy(ppres: PullbackPresentation, X: DefCochain) -> DefCochain:
    """h(X) = (-1)^{|X|} (eta^a -> X(u_a)): contracting homotopy of the kernel."""
    gens = ppres.presentation.generators
    sign = -1 if (X.degree & 1) else 1
    images = {}
    for u_name, _ in ppres.submersion.fibers:
        img = X.image(u_name)
        if not img.is_zero():
            images[vertical_section_name(u_name)] = img.scale(sign)
    return DefCochain(GradedDerivation(gens, X.degree - 1, images, check=False))


@dataclass
class KernelBlockReport:
    degree: int
    weight: int
    dimension: int
    betti: int
    homotopy_ok: bool

    @property
    def passed(self) -> bool:
        return self.betti == 0 and self.homotopy_ok


def kernel_acyclicity_check(ppres: PullbackPresentation, degree: int,
                            weight: int) -> KernelBlockReport:
    """Assemble one block of the kernel subcomplex and certify acyclicity.

    Reports the blockwise cohomology dimension (from exact ranks) and whether
    X = delta(h X) + h(delta X) holds on every basis cochain of the block.
    """
    K = kernel_complex(ppres)
    dim = K.block_dim(degree, weight)
    d_out = K.matrix(degree, weight)
    d_in = K.matrix(degree - 1, weight)
    betti = (dim - d_out.rank() - d_in.rank()) if dim else 0
    homotopy_ok = True
    for key in K.block_keys(degree, weight):
        X = K.key_value(key)
        lhs = K.apply_d(kernel_homotopy(ppres, X)) + kernel_homotopy(ppres, K.apply_d(X))
        if lhs.derivation != X.derivation:
            homotopy_ok = False
            break
    return KernelBlockReport(degree=degree, weight=weight, dimension=dim,
                             betti=betti, homotopy_ok=homotopy_ok)
