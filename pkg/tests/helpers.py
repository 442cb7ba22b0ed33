"""Seeded random generators for property tests."""

from fractions import Fraction

from algebroids.deformation import DefCochain
from algebroids.graded import GeneratorSet, GradedDerivation, GradedElement


def random_element(gens: GeneratorSet, degree: int, weight: int, rng,
                   max_terms: int = 3) -> GradedElement:
    basis = gens.basis(degree, weight)
    if not basis:
        return gens.zero()
    terms = {}
    for _ in range(rng.randint(1, max_terms)):
        m = rng.choice(basis)
        c = rng.randint(-3, 3)
        if c:
            terms[m] = Fraction(c)
    return GradedElement(gens, terms)


def random_inhomogeneous(gens: GeneratorSet, rng, degrees=(0, 1, 2),
                         weights=(0, 1, 2)) -> GradedElement:
    el = gens.zero()
    for _ in range(3):
        el = el + random_element(gens, rng.choice(degrees), rng.choice(weights), rng)
    return el


def random_derivation(gens: GeneratorSet, degree: int, rng,
                      weight_shifts=(-1, 0, 1), max_weight: int = 3) -> GradedDerivation:
    images = {}
    for name in gens.names():
        target_degree = gens.degree_of(name) + degree
        if target_degree < 0:
            continue
        shift = rng.choice(weight_shifts)
        w = gens.weight_of(name) + shift
        if w > max_weight:
            continue
        img = random_element(gens, target_degree, w, rng)
        if not img.is_zero():
            images[name] = img
    return GradedDerivation(gens, degree, images)


def random_def_cochain(pres, degree: int, rng, **kw) -> DefCochain:
    return DefCochain(random_derivation(pres.generators, degree, rng, **kw))
