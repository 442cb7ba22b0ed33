import random
from fractions import Fraction
from itertools import product

import pytest

from algebroids.graded import (
    ORIGIN_FIBER,
    GeneratorSet,
    GradedDerivation,
    GradedElement,
    GradedMonomial,
    HomogeneityError,
    MixedGeneratorSets,
    apply_derivation,
    basis_enumerate,
    derivation_commutator,
    multiply,
    transport_element,
)

from helpers import random_derivation, random_element, random_inhomogeneous


def tr1_gens():
    return GeneratorSet([("x", 1)], [("X", 1, ORIGIN_FIBER)])


def sl2_gens():
    return GeneratorSet([], [("e1", 0, ORIGIN_FIBER), ("e2", 0, ORIGIN_FIBER),
                             ("e3", 0, ORIGIN_FIBER)])


def mixed_gens():
    return GeneratorSet([("x", 1), ("y", 2)],
                        [("a", 1, ORIGIN_FIBER), ("b", 0, ORIGIN_FIBER),
                         ("c", 2, ORIGIN_FIBER)])


def test_generator_set_rejects_bad_input():
    with pytest.raises(ValueError):
        GeneratorSet([("x", 0)], [])
    with pytest.raises(ValueError):
        GeneratorSet([("x", 1), ("x", 1)], [])
    with pytest.raises(ValueError):
        GeneratorSet([], [("a", 0, "nonsense")])


def test_basis_enumerate_examples():
    g = tr1_gens()
    assert [m.even_exponents(g) for m in basis_enumerate(g, 0, 2)] == [{"x": 2}]
    deg1 = basis_enumerate(g, 1, 2)
    assert len(deg1) == 1
    assert deg1[0].even_exponents(g) == {"x": 1}
    assert deg1[0].odd_subset(g) == ("X",)
    s = sl2_gens()
    deg2 = basis_enumerate(s, 2, 0)
    assert [m.odd_subset(s) for m in deg2] == [("e1", "e2"), ("e1", "e3"), ("e2", "e3")]
    assert basis_enumerate(g, 0, -1) == []
    assert basis_enumerate(g, 3, 1) == []


def test_basis_product_formula_and_brute_force():
    g = mixed_gens()
    # independent route: generate all monomials with bounded exponents, filter
    names_even = g.even_names
    for degree in range(0, 4):
        for weight in range(0, 5):
            got = basis_enumerate(g, degree, weight)
            brute = []
            for ex in product(range(weight + 1), repeat=len(names_even)):
                wsum = sum(e * w for e, w in zip(ex, g.even_weights))
                for mask in range(1 << len(g.odds)):
                    if mask.bit_count() != degree:
                        continue
                    total = wsum + sum(g.odd_weights[i] for i in range(len(g.odds))
                                       if mask & (1 << i))
                    if total == weight:
                        brute.append((tuple(ex), mask))
            assert len(got) == len(brute)
            assert {(m.evens, m.mask) for m in got} == set(brute)
            # product formula: sum over odd subsets of even-partition counts
            count = 0
            for mask in range(1 << len(g.odds)):
                if mask.bit_count() != degree:
                    continue
                rest = weight - sum(g.odd_weights[i] for i in range(len(g.odds))
                                    if mask & (1 << i))
                count += sum(1 for ex in product(range(max(rest, 0) + 1),
                                                 repeat=len(names_even))
                             if sum(e * w for e, w in zip(ex, g.even_weights)) == rest)
            assert len(got) == count


def test_multiply_examples():
    s = sl2_gens()
    xi1, xi2 = s.var("e1"), s.var("e2")
    assert multiply(xi1, xi2) == s.product("e1", "e2")
    assert multiply(xi2, xi1) == s.product("e1", "e2").scale(-1)
    assert multiply(xi1, xi1).is_zero()
    # distributivity: (x + ab) x = x^2 + x ab
    g = GeneratorSet([("x", 1)], [("a", 0, ORIGIN_FIBER), ("b", 0, ORIGIN_FIBER)])
    x = g.var("x")
    ab = g.product("a", "b")
    assert (x + ab) * x == g.product("x", "x") + x * ab


def test_multiply_rejects_mixed_generator_sets():
    with pytest.raises(MixedGeneratorSets):
        multiply(tr1_gens().var("x"), sl2_gens().var("e1"))


def test_multiply_associative_commutative_random():
    rng = random.Random(11)
    g = mixed_gens()
    for _ in range(60):
        a = random_inhomogeneous(g, rng)
        b = random_inhomogeneous(g, rng)
        c = random_inhomogeneous(g, rng)
        assert (a * b) * c == a * (b * c)
    # graded commutativity on homogeneous pieces: ab = (-1)^{|a||b|} ba
    for _ in range(60):
        da, db = rng.choice([0, 1, 2]), rng.choice([0, 1, 2])
        a = random_element(g, da, rng.choice([0, 1, 2, 3]), rng)
        b = random_element(g, db, rng.choice([0, 1, 2, 3]), rng)
        sign = -1 if (da & 1) and (db & 1) else 1
        assert a * b == (b * a).scale(sign)


def test_homogeneity_checks():
    g = mixed_gens()
    el = g.var("x") + g.var("a")
    with pytest.raises(HomogeneityError):
        el.cochain_degree()
    mixed_w = g.var("x") + g.var("y")
    assert mixed_w.cochain_degree() == 0
    with pytest.raises(HomogeneityError):
        mixed_w.weight()
    assert mixed_w.weight_component(2) == g.var("y")
    assert list(mixed_w.weight_split()) == [1, 2]
    assert g.zero().cochain_degree() is None


def test_apply_derivation_examples():
    g = tr1_gens()
    d = GradedDerivation(g, 1, {"x": g.var("X")})
    assert apply_derivation(d, g.product("x", "x")) == g.product("x", "X").scale(2)
    assert apply_derivation(d, g.product("x", "X")).is_zero()
    iota = GradedDerivation(g, -1, {"X": g.scalar(1)})
    assert apply_derivation(iota, g.product("x", "X")) == g.var("x")


def test_derivation_image_homogeneity_enforced():
    g = mixed_gens()
    with pytest.raises(HomogeneityError):
        GradedDerivation(g, 1, {"x": g.var("x")})  # degree 0 image for degree-1 map
    # degree below -1 must be zero
    with pytest.raises(Exception):
        GradedDerivation(g, -2, {"a": g.scalar(1)})


def test_leibniz_rule_random():
    rng = random.Random(23)
    g = mixed_gens()
    for _ in range(80):
        deg = rng.choice([-1, 0, 1, 2])
        D = random_derivation(g, deg, rng)
        da = rng.choice([0, 1, 2])
        a = random_element(g, da, rng.choice([0, 1, 2, 3]), rng)
        b = random_inhomogeneous(g, rng)
        sign = -1 if (deg & 1) and (da & 1) else 1
        assert D.apply(a * b) == D.apply(a) * b + (a * D.apply(b)).scale(sign)


def test_commutator_examples():
    g = tr1_gens()
    d = GradedDerivation(g, 1, {"x": g.var("X")})
    assert derivation_commutator(d, d).is_zero()
    iota = GradedDerivation(g, -1, {"X": g.scalar(1)})
    lie = derivation_commutator(iota, d)
    assert lie.image("x") == g.scalar(1)
    assert lie.image("X").is_zero()
    odd = GradedDerivation(g, 1, {"x": g.var("X")})
    assert derivation_commutator(odd, odd).is_zero()


def test_commutator_antisymmetry_and_jacobi_random():
    rng = random.Random(5)
    g = mixed_gens()
    for _ in range(25):
        degs = [rng.choice([-1, 0, 1]) for _ in range(3)]
        D1, D2, D3 = (random_derivation(g, d, rng) for d in degs)
        sign12 = -1 if (degs[0] & 1) and (degs[1] & 1) else 1
        c12 = derivation_commutator(D1, D2)
        c21 = derivation_commutator(D2, D1)
        assert c12 == c21.scale(-sign12)
        # graded Jacobi: [D1,[D2,D3]] = [[D1,D2],D3] + (-1)^{|D1||D2|}[D2,[D1,D3]]
        lhs = derivation_commutator(D1, derivation_commutator(D2, D3))
        rhs = derivation_commutator(derivation_commutator(D1, D2), D3) + \
            derivation_commutator(D2, derivation_commutator(D1, D3)).scale(sign12)
        assert lhs == rhs


def test_weight_preserving_derivations_map_blocks():
    g = mixed_gens()
    # weight-preserving degree +1 derivation: x -> a (weights 1=1), y -> c (2=2)
    D = GradedDerivation(g, 1, {"x": g.var("a"), "y": g.var("c")})
    assert D.is_weight_preserving()
    for degree in range(0, 3):
        for weight in range(0, 5):
            for mono in g.basis(degree, weight):
                img = D.apply(GradedElement(g, {mono: Fraction(1)}))
                if img.is_zero():
                    continue
                assert img.cochain_degree() == degree + 1
                assert img.weight() == weight


def test_weight_components_of_derivation():
    g = mixed_gens()
    D = GradedDerivation(g, 1, {"x": g.var("a") + g.var("c")})
    assert D.weight_shifts() == {0, 1}
    assert D.weight_component(1).image("x") == g.var("c")
    assert not D.is_weight_preserving()


def test_transport_element_preserves_products():
    g = mixed_gens()
    big = GeneratorSet(
        [("u", 1), ("x", 1), ("y", 2)],
        [("b", 0, ORIGIN_FIBER), ("a", 1, ORIGIN_FIBER), ("c", 2, ORIGIN_FIBER)])
    rng = random.Random(3)
    for _ in range(40):
        a = random_inhomogeneous(g, rng)
        b = random_inhomogeneous(g, rng)
        assert transport_element(a * b, big) == \
            transport_element(a, big) * transport_element(b, big)


def test_element_formatting():
    g = mixed_gens()
    el = g.product("x", "x") - g.var("y").scale(Fraction(3, 2))
    assert str(el) == "x^2 - 3/2*y"
    assert str(g.zero()) == "0"
    assert str(g.scalar(1)) == "1"
