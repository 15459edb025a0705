import random
from fractions import Fraction

from heightforge.exact import Poly, factor_mod_p, gf_pow
from heightforge.padic import hensel_lift, phi_expansion, single_slope_certificate


def _product(polys):
    out = Poly([1])
    for g in polys:
        out = out * g
    return out


def test_hensel_lift_reproduces_f():
    rng = random.Random(9)
    for _ in range(30):
        p = rng.choice([3, 5, 7, 11, 13])
        deg = rng.randint(2, 6)
        f = Poly([rng.randint(-20, 20) for _ in range(deg)] + [1])
        factors = factor_mod_p(f, p)
        groups = [gf_pow(list(g.coeffs), e, p) for g, e in factors]
        k = rng.choice([5, 20, 40])
        lifted = hensel_lift(f, groups, p, k)
        pk = p**k
        diff = _product(lifted) - f
        assert all(c % pk == 0 for c in diff.coeffs)
        for G, grp in zip(lifted, groups):
            assert G.lc == 1
            assert [c % p for c in G.coeffs] == grp


def test_phi_expansion_roundtrip():
    phi = Poly([1, 1])
    f = Poly([2, 2, 1])
    parts = phi_expansion(f, phi)
    assert sum((a * phi**i for i, a in enumerate(parts)), Poly()) == f


def test_single_slope_certificate_gaussian_integers_at_2():
    # x^2 + 1 = (x+1)^2 - 2(x+1) + 2, Eisenstein in x+1
    assert single_slope_certificate(Poly([1, 0, 1]), Poly([1, 1]), 2, 2, 20) == Fraction(1, 2)


def test_certificate_rejects_two_slopes():
    # x^2 - 4x + ... with roots of different valuations: (x-2)(x-4) at p = 2 via phi = x
    G = Poly([8, -6, 1])
    assert single_slope_certificate(G, Poly([0, 1]), 2, 2, 20) is None


def test_certificate_rejects_integral_slope():
    # x^2 - 4 over Q_2: slope 1 has denominator 1 < e = 2
    assert single_slope_certificate(Poly([-4, 0, 1]), Poly([0, 1]), 2, 2, 20) is None
