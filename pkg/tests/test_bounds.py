import random
import warnings
from fractions import Fraction

import pytest

from heightforge.bounds import (
    TrivialBoundWarning,
    check_congruence,
    height_lower_bound,
    l1_infty,
    verify_point,
)
from heightforge.errors import BoundInapplicable, CongruenceFailure, NotOnVariety
from heightforge.exact import Poly
from heightforge.field import NumberField
from heightforge.functionals import HomogeneousPoly, monomials
from heightforge.heights import ProjectiveVector
from heightforge.parsing import parse_homogeneous


def form(text, N=2):
    return parse_homogeneous(text, N)


def test_congruence_examples():
    assert check_congruence(form("x^2 + 3*x*y + 3*y^2"), form("x^2"), 3)
    assert check_congruence(form("x^2"), form("x^2"), 5)
    assert not check_congruence(form("x^2 + y^2"), form("x^2"), 3)
    with pytest.raises(ValueError):
        check_congruence(form("x^2"), form("x^3"), 3)


def test_l1_examples():
    assert l1_infty(form("x^2")) == 1
    assert l1_infty(form("x^2 + 3*x*y + 3*y^2")) == 7
    assert l1_infty(form("x^2 - 2*x*y + 4*y^2")) == 7


def test_bound_examples():
    assert height_lower_bound(form("x^2+3*x*y+3*y^2"), form("x^2"), 3) == 3
    assert height_lower_bound(form("x*y + 2*y^2"), form("x*y"), 2) == 2
    with pytest.warns(TrivialBoundWarning):
        assert height_lower_bound(form("x^2 + y^2"), form("x^2 + 2*y^2"), 1) == Fraction(1, 3)
    with pytest.raises(CongruenceFailure):
        height_lower_bound(form("x^2 - y^2"), form("x^2"), 3)


def test_verify_point_tight_case():
    K = NumberField(Poly([3, 3, 1]))
    rep = verify_point(ProjectiveVector.of(K, [K.gen, 1]), form("x^2+3*x*y+3*y^2"), form("x^2"), 3, 1e-10)
    assert rep.bound == 3 and rep.passed and rep.tight
    assert rep.height_power.width <= 1e-9


def test_verify_point_errors(Q):
    with pytest.raises(NotOnVariety):
        verify_point(ProjectiveVector.of(Q, [1, 2]), form("x^2 - y^2"), form("x^2"), 1)
    with pytest.raises(BoundInapplicable):
        verify_point(ProjectiveVector.of(Q, [0, 1]), form("x^2 + x*y"), form("x^2"), 1)


def test_verify_point_random_rational_points(Q):
    """Points on lines through rational points: the bound is never violated."""
    rng = random.Random(30)
    for _ in range(20):
        a = [rng.randint(-9, 9), rng.randint(1, 9)]
        m = rng.randint(2, 7)
        # F = (a2*x - a1*y) * L, with L a random linear form
        L = (rng.randint(-4, 4), rng.randint(-4, 4))
        F = HomogeneousPoly(Q, 2, 2, {(2, 0): a[1] * L[0], (1, 1): a[1] * L[1] - a[0] * L[0], (0, 2): -a[0] * L[1]})
        if F.is_zero():
            continue
        T = HomogeneousPoly(Q, 2, 2, {e: (c.to_rational() + m * rng.randint(-2, 2)) for e, c in F.terms.items()})
        T = T + HomogeneousPoly(Q, 2, 2, {(2, 0): m})
        pt = ProjectiveVector.of(Q, a)
        if T(pt.coords).is_zero():
            continue
        with warnings.catch_warnings():
            warnings.simplefilter("ignore", TrivialBoundWarning)
            assert verify_point(pt, F, T, m).passed


def test_bound_monotone_and_antitone():
    rng = random.Random(31)
    for _ in range(50):
        m = rng.randint(1, 30)
        coeffs = {e: rng.randint(-9, 9) for e in monomials(2, 2)}
        T = parse_homogeneous(" + ".join(f"({c})*x^{e[0]}*y^{e[1]}" for e, c in coeffs.items()), 2, 2)
        if T.is_zero():
            continue
        with warnings.catch_warnings():
            warnings.simplefilter("ignore", TrivialBoundWarning)
            b1 = height_lower_bound(T, T, m)
            b2 = height_lower_bound(T, T, 2 * m)
            bigger = T + parse_homogeneous("x^2", 2)
            if l1_infty(bigger) >= l1_infty(T):
                assert height_lower_bound(bigger, bigger, m) <= b1
        assert b2 >= b1


def test_congruence_is_transitive():
    rng = random.Random(32)
    for _ in range(50):
        m = rng.randint(2, 12)
        F = {e: rng.randint(-20, 20) for e in monomials(3, 2)}
        T1 = {e: c + m * rng.randint(-3, 3) for e, c in F.items()}
        T2 = {e: c + m * rng.randint(-3, 3) for e, c in F.items()}
        mk = lambda d: parse_homogeneous(" + ".join(f"({c})*x1^{e[0]}*x2^{e[1]}*x3^{e[2]}" for e, c in d.items()), 3)
        F_, A, B = mk(F), mk(T1), mk(T2)
        if any(p.is_zero() for p in (F_, A, B)) or (A - B).is_zero():
            continue
        assert check_congruence(F_, A, m) and check_congruence(F_, B, m)
        assert all(c.to_rational() % m == 0 for c in (A - B).terms.values())
