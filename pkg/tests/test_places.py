import random
from fractions import Fraction

import pytest

from heightforge.ball import Ball
from heightforge.errors import UnsupportedPrime
from heightforge.exact import Poly, vp
from heightforge.field import NumberField, norm
from heightforge.places import (
    PPower,
    PowerProduct,
    abs_value,
    archimedean_places,
    candidate_finite_places,
    finite_places_above,
    product_formula_check,
)

from test_field import random_element


def test_archimedean_place_counts(fields):
    assert [v.local_degree for v in archimedean_places(fields["Q(sqrt2)"])] == [1, 1]
    assert [v.local_degree for v in archimedean_places(fields["Q(i)"])] == [2]
    cubic = archimedean_places(fields["cubic"])
    assert sorted(v.local_degree for v in cubic) == [1, 2]
    for K in fields.values():
        assert sum(v.local_degree for v in archimedean_places(K)) == K.degree


def test_finite_places_of_gaussian_field(fields):
    K = fields["Q(i)"]
    five = finite_places_above(K, 5)
    assert [(v.ramification_e, v.residue_f) for v in five] == [(1, 1), (1, 1)]
    three = finite_places_above(K, 3)
    assert [(v.ramification_e, v.residue_f) for v in three] == [(1, 2)]
    two = finite_places_above(K, 2)
    assert [(v.ramification_e, v.residue_f) for v in two] == [(2, 1)]


def test_local_degrees_sum_to_d(fields):
    for K in fields.values():
        for p in [2, 3, 5, 7, 11, 23]:
            try:
                places = finite_places_above(K, p)
            except UnsupportedPrime:
                continue
            assert sum(v.local_degree for v in places) == K.degree
            for v in places:
                assert v.local_factor().degree == v.local_degree


def test_unsupported_prime():
    with pytest.raises(UnsupportedPrime):
        finite_places_above(NumberField([-5, 0, 1]), 2)


def test_absolute_value_examples(Q, fields):
    half = Q(Fraction(1, 2))
    (v2,) = finite_places_above(Q, 2)
    assert abs_value(half, v2) == PPower(2, Fraction(1))
    K = fields["Q(i)"]
    (w,) = finite_places_above(K, 2)
    assert abs_value(K.gen + 1, w, normalized=False) == PPower(2, Fraction(-1, 2))
    assert abs_value(K(2), w) == PPower(2, Fraction(-1))
    assert abs_value(K.zero, w).is_zero()


def _padic_root(f: Poly, r0: int, p: int, k: int) -> int:
    """Newton iteration for a simple root, used as an independent oracle."""
    m = p**k
    r = r0
    df = f.derivative()
    for _ in range(k.bit_length() + 2):
        r = (r - int(f(r)) * pow(int(df(r)), -1, m)) % m
    return r


def test_split_place_values_against_padic_root(fields):
    rng = random.Random(4)
    for name, p in [("Q(i)", 5), ("Q(i)", 13), ("Q(sqrt2)", 7), ("Q(sqrt5)", 11), ("cubic", 5)]:
        K = fields[name]
        for v in finite_places_above(K, p):
            if v.local_degree != 1:
                continue
            r0 = (-v.residue_factor[0]) % p
            root = _padic_root(K.defining_poly, r0, p, 60)
            for _ in range(20):
                beta = random_element(K, rng, bound=30, den=p * 2)
                if beta.is_zero():
                    continue
                val = int(beta.num(root)) % p**60
                expected = -(vp(val, p) - vp(beta.den, p))
                assert abs_value(beta, v, normalized=False) == PPower(p, Fraction(expected))


def test_multiplicativity(fields):
    rng = random.Random(6)
    for name in ["Q(i)", "cubic", "Q(sqrt5)"]:
        K = fields[name]
        places = archimedean_places(K) + [v for p in (2, 3, 5, 11) for v in finite_places_above(K, p)]
        for _ in range(10):
            a, b = random_element(K, rng), random_element(K, rng)
            if a.is_zero() or b.is_zero():
                continue
            for v in places:
                lhs = abs_value(a * b, v)
                rhs = abs_value(a, v) * abs_value(b, v)
                if isinstance(lhs, PPower):
                    assert lhs == rhs
                else:
                    assert lhs.overlaps(rhs)


def test_integral_elements_have_norm_at_most_one(fields):
    rng = random.Random(8)
    for K in fields.values():
        for _ in range(10):
            beta = K(Poly([rng.randint(-20, 20) for _ in range(K.degree)]))
            if beta.is_zero():
                continue
            for p in candidate_finite_places([beta]):
                for v in finite_places_above(K, p):
                    assert abs_value(beta, v) <= PPower.one(p)


def test_candidate_places(Q, fields):
    assert candidate_finite_places([Q(Fraction(3, 2))]) == [2, 3]
    assert candidate_finite_places([Q(3), Q(4)]) == []
    K = fields["Q(sqrt2)"]
    assert 2 in candidate_finite_places([K.gen, K(2)])


def test_product_formula_examples(Q, fields):
    rep = product_formula_check(Q(Fraction(1, 2)))
    assert rep.passed and rep.finite_product == 2 and rep.archimedean_product.contains(Fraction(1, 2))
    K = fields["Q(i)"]
    rep = product_formula_check(K.gen + 1)
    assert rep.passed and rep.finite_product == Fraction(1, 2) and rep.norm == 2


def test_product_formula_random(fields):
    rng = random.Random(10)
    for K in fields.values():
        for _ in range(8):
            beta = random_element(K, rng, bound=9, den=6)
            if beta.is_zero():
                continue
            rep = product_formula_check(beta)
            assert rep.passed
            assert rep.finite_product == 1 / abs(norm(beta))


def test_power_product_exact():
    x = PowerProduct.of([PPower(2, Fraction(1, 2)), PPower(3, Fraction(-1)), PPower(2, Fraction(1, 2))])
    assert x.to_fraction() == Fraction(2, 3)
    y = PowerProduct.of([PPower(2, Fraction(1, 3))])
    assert not y.is_rational()
    assert (y**3).to_fraction() == 2
    assert y.to_ball().overlaps(Ball(2).rpow(Fraction(1, 3)))
