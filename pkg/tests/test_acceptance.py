"""Acceptance criteria 1-12.  A summary line per criterion is printed at the end of the run."""

import random
import time
from fractions import Fraction

import pytest

from heightforge.ball import Ball, mpf_to_fraction
from heightforge.bounds import verify_point
from heightforge.cli import main
from heightforge.errors import KernelMeetsSubspace, TVanishesAtPoint, UnsupportedPrime
from heightforge.exact import Poly, determinant, prime_divisors, vp
from heightforge.field import NumberField, minimal_polynomial, norm, rational_field
from heightforge.functionals import (
    HomogeneousPoly,
    LinearMap,
    monomials,
    sup_norm,
    u_local_projective,
    u_subspace,
    u_witness_oracle_projective,
    verify_identity_projective,
    verify_identity_subspace,
)
from heightforge.parsing import parse_homogeneous
from heightforge.heights import (
    ProjectiveVector,
    mahler_measure,
    projective_height,
    projective_height_report,
    wedge_coordinates,
    weil_height,
)
from heightforge.places import (
    FinitePlace,
    PowerProduct,
    PPower,
    archimedean_places,
    finite_places_above,
    product_formula_check,
)

from conftest import CORPUS, LEHMER

LEHMER_DIGITS = "1.176280818259"


@pytest.fixture(scope="module")
def corpus():
    return {name: (rational_field() if name == "Q" else NumberField(f)) for name, f in CORPUS.items()}


def random_element(K, rng, bound=6, den=(1, 1, 1, 2, 3)):
    while True:
        x = K(Poly([Fraction(rng.randint(-bound, bound), rng.choice(den)) for _ in range(K.degree)]))
        if not x.is_zero():
            return x


def random_form(K, rng, N, M, bound=4, density=0.7):
    terms = {}
    for e in monomials(N, M):
        if rng.random() < density:
            terms[e] = K(Poly([rng.randint(-bound, bound) for _ in range(min(K.degree, 2))]))
    return HomogeneousPoly(K, N, M, terms)


def projective_fixtures(corpus):
    """30 pairs (a, T) with T(a) != 0, N <= 3, M <= 3; the first is the worked pair."""
    Q = corpus["Q"]
    out = [(ProjectiveVector.of(Q, [1, 2]), HomogeneousPoly(Q, 2, 2, {(1, 1): 1}))]
    rng = random.Random(600)
    names = ["Q", "Q(i)", "Q(sqrt2)", "Q(sqrt5)", "cubic", "lehmer"]
    while len(out) < 30:
        name = names[len(out) % len(names)]
        K = corpus[name]
        N = rng.randint(2, 3)
        M = rng.randint(1, 2) if name == "lehmer" else rng.randint(1, 3)
        a = ProjectiveVector.of(K, [random_element(K, rng, 4, (1, 2, 3)) for _ in range(N)])
        T = random_form(K, rng, N, M)
        if T.is_zero() or T(a.coords).is_zero():
            continue
        out.append((a, T))
    return out


def subspace_fixtures(corpus):
    """20 pairs (basis, Psi) with N <= 4, M <= 2; the first is span{(3, 4)}, psi = (1, 0)."""
    Q = corpus["Q"]
    out = [([ProjectiveVector.of(Q, [3, 4])], LinearMap.of(Q, [[1, 0]]))]
    rng = random.Random(800)
    names = ["Q", "Q(i)", "Q(sqrt2)", "Q(sqrt5)", "cubic"]
    while len(out) < 20:
        K = corpus[names[len(out) % len(names)]]
        N = rng.randint(2, 4)
        M = rng.randint(1, min(2, N - 1))
        basis = [
            ProjectiveVector.of(K, [random_element(K, rng, 5) if rng.random() < 0.8 else 0 for _ in range(N)])
            for _ in range(M)
        ]
        Psi = LinearMap.of(K, [[rng.randint(-3, 3) for _ in range(N)] for _ in range(M)])
        images = [Psi(w) for w in basis]
        if wedge_coordinates(basis).is_zero() or K(determinant(images)).is_zero():
            continue
        out.append((basis, Psi))
    return out


def zero_set_element(a, M, rng):
    """A random homogeneous f of degree M with f(a) = 0: sum_j g_j * (a_n z_j - a_j z_n)."""
    K = a.field
    N = len(a)
    n = next(i for i, c in enumerate(a.coords) if not c.is_zero())
    f = HomogeneousPoly(K, N, M, {})
    for j in range(N):
        if j == n:
            continue
        g = random_form(K, rng, N, M - 1, bound=6)
        lin = HomogeneousPoly(K, N, 1, {})
        lin = lin + HomogeneousPoly.monomial(K, [int(i == j) for i in range(N)], a.coords[n])
        lin = lin - HomogeneousPoly.monomial(K, [int(i == n) for i in range(N)], a.coords[j])
        f = f + g * lin
    return f


def cyclotomic(n: int) -> Poly:
    f = Poly([-1] + [0] * (n - 1) + [1])
    for d in range(1, n):
        if n % d == 0:
            f = f // cyclotomic(d)
    return f


# --------------------------------------------------------------------------


@pytest.mark.criterion(1, "Lehmer fixture: mahler measure 1.17..., radius <= 1e-10, stable to 12 digits")
def test_criterion_01_lehmer():
    start = time.perf_counter()
    f = Poly(LEHMER)
    values = [mahler_measure(f, r) for r in (1e-10, 1e-20, 1e-40)]
    elapsed = time.perf_counter() - start
    first = values[0]
    assert str(float(first.mid)).startswith("1.17")
    assert float(first.rad) <= 1e-10
    for v in values:
        digits = f"{mpf_to_fraction(v.mid).__float__():.15f}"[: len(LEHMER_DIGITS)]
        assert digits == LEHMER_DIGITS
        assert v.overlaps(first)
    assert elapsed < 1.0


@pytest.mark.criterion(2, "Kronecker suite: mu(Phi_n) and mu(x*Phi_n) contain 1, radius <= 1e-12, n <= 20")
def test_criterion_02_kronecker():
    for n in range(1, 21):
        phi = cyclotomic(n)
        for f in (phi, phi * Poly([0, 1])):
            mu = mahler_measure(f, 1e-12)
            assert mu.contains(1), (n, mu)
            assert float(mu.rad) <= 1e-12


@pytest.mark.criterion(3, "Product formula: exact finite part and Archimedean enclosure, 200 random beta")
def test_criterion_03_product_formula(corpus):
    start = time.perf_counter()
    rng = random.Random(300)
    names = list(corpus)
    for i in range(200):
        K = corpus[names[i % len(names)]]
        beta = random_element(K, rng, 9, (1, 2, 3, 5, 7))
        rep = product_formula_check(beta, 1e-10)
        assert rep.finite_product == 1 / abs(norm(beta))
        assert rep.archimedean_product.contains(abs(norm(beta)))
        assert rep.normalized_product.contains(1)
        assert rep.passed
    assert time.perf_counter() - start < 60


@pytest.mark.criterion(4, "Two-path Weil height: places vs mu(minpoly)^(1/deg), 100 random alpha, deg <= 6")
def test_criterion_04_two_path_height(corpus):
    fields = [corpus[n] for n in ("Q", "Q(i)", "Q(sqrt2)", "Q(sqrt5)", "cubic")]
    fields += [NumberField([1, 1, 1, 1, 1]), NumberField([-1, -1, 0, 0, 0, 0, 1]), NumberField([1] * 7)]
    rng = random.Random(400)
    for i in range(100):
        K = fields[i % len(fields)]
        alpha = random_element(K, rng, 3, (1, 1, 2, 3))
        f = minimal_polynomial(alpha)
        assert f.degree <= 6
        h = weil_height(alpha, 1e-11)
        mu = mahler_measure(f, 1e-11).rpow(Fraction(1, f.degree))
        assert float(h.rad) + float(mu.rad) <= 1e-10
        assert h.overlaps(mu), (alpha, h, mu)


@pytest.mark.criterion(5, "H((1, alpha, ..., alpha^N)) = h(alpha)^N, 25 random pairs")
def test_criterion_05_moment_vector(corpus):
    rng = random.Random(500)
    names = ["Q", "Q(i)", "Q(sqrt2)", "Q(sqrt5)", "cubic"]
    for i in range(25):
        K = corpus[names[i % len(names)]]
        alpha = random_element(K, rng, 5)
        N = rng.randint(1, 4)
        H = projective_height(ProjectiveVector(K, tuple(alpha**k for k in range(N + 1))), 1e-10)
        h = weil_height(alpha, 1e-10 / (2 * N * 10**N))
        assert float(H.rad) <= 1e-10
        assert H.overlaps(h**N), (alpha, N)


@pytest.mark.criterion(6, "H(a)^M * U(a, T) contains 1, width <= 1e-8, 30 fixtures incl. a = (1,2), T = x1*x2")
def test_criterion_06_projective_identity(corpus):
    start = time.perf_counter()
    fixtures = projective_fixtures(corpus)
    assert len(fixtures) == 30
    for a, T in fixtures:
        rep = verify_identity_projective(a, T, 1e-8)
        assert rep.value.contains(1) and float(rep.value.width) <= 1e-8
        assert rep.passed
    a, T = fixtures[0]
    rows = {r["place"]: r for r in verify_identity_projective(a, T, 1e-8).rows}
    assert rows["2:x"]["U_v"] == PPower(2, Fraction(-1))
    u_inf = rows["inf0"]["U_v"]
    assert u_inf.rad == 0 and mpf_to_fraction(u_inf.mid) == Fraction(1, 2)
    assert time.perf_counter() - start < 120


@pytest.mark.criterion(7, "Witness optimality: oracle = closed form exactly (finite), within 2x tol (infinite)")
def test_criterion_07_witness(corpus):
    tol = 1e-9
    for a, T in projective_fixtures(corpus):
        places = verify_identity_projective(a, T, 1e-8).rows
        for row in places:
            v = _place(a.field, row["place"])
            closed = u_local_projective(a, T, v)
            oracle = u_witness_oracle_projective(a, T, v, tol)
            if isinstance(v, FinitePlace):
                assert oracle == closed, (row["place"], oracle, closed)
            else:
                assert abs(float(oracle.mid) - float(closed.mid)) <= 2 * tol


@pytest.mark.criterion(8, "H(W) * U(W, Psi) contains 1, width <= 1e-8, 20 fixtures incl. span{(3,4)}")
def test_criterion_08_subspace_identity(corpus):
    fixtures = subspace_fixtures(corpus)
    assert len(fixtures) == 20
    for basis, Psi in fixtures:
        rep = verify_identity_subspace(basis, Psi, 1e-8)
        assert rep.value.contains(1) and float(rep.value.width) <= 1e-8
        assert rep.passed
    basis, Psi = fixtures[0]
    rep = verify_identity_subspace(basis, Psi, 1e-8)
    rows = {r["place"]: r for r in rep.rows}
    inf = rows["inf0"]
    assert inf["H_v"].rad == 0 and mpf_to_fraction(inf["H_v"].mid) == 4
    assert inf["U_v"].rad == 0 and mpf_to_fraction(inf["U_v"].mid) == Fraction(3, 4)
    three = rows["3:x"]
    assert three["H_v"] == PPower.one(3) and three["U_v"] == PPower(3, Fraction(-1))
    exact = Fraction(4) * Fraction(3, 4) * rep.finite_exact.to_fraction()
    assert exact == 1
    assert u_subspace(basis, Psi).contains(Fraction(1, 4))


def _unimodular(M, rng):
    C = [[int(i == j) for j in range(M)] for i in range(M)]
    for _ in range(4):
        i, j = rng.sample(range(M), 2) if M > 1 else (0, 0)
        if i != j:
            k = rng.randint(-3, 3)
            C[i] = [x + k * y for x, y in zip(C[i], C[j])]
    if rng.random() < 0.5:
        C[0] = [-x for x in C[0]]
    return C


def _rational_change(M, rng):
    while True:
        C = [[Fraction(rng.randint(-6, 6), rng.randint(1, 5)) for _ in range(M)] for _ in range(M)]
        d = determinant(C)
        if d != 0 and abs(d) != 1:
            return C, d


def _apply(C, basis):
    K = basis[0].field
    N = len(basis[0])
    return [ProjectiveVector(K, tuple(sum((K(c) * w.coords[k] for c, w in zip(row, basis)), K.zero) for k in range(N)))
            for row in C]


def _parts(basis):
    rep = projective_height_report(wedge_coordinates(basis).as_projective(), 1e-12)
    finite = PowerProduct.of(f.value for f in rep.finite)
    arch = Ball(1)
    for f in rep.archimedean:
        arch = arch * f.value
    return rep.value, finite, arch


def _abs_rational_power_product(d: Fraction) -> PowerProduct:
    """prod over finite places of |d|_v for rational d, which is 1/|d|."""
    return PowerProduct.of(PPower(p, Fraction(-vp(d, p))) for p in prime_divisors(d))


@pytest.mark.criterion(9, "Basis invariance of subspace heights, 10 unimodular + 10 rational changes per fixture")
def test_criterion_09_basis_invariance(corpus):
    rng = random.Random(900)
    for basis, _ in subspace_fixtures(corpus):
        M = len(basis)
        total, finite, arch = _parts(basis)
        for _ in range(10):
            new = _apply(_unimodular(M, rng), basis)
            t2, f2, a2 = _parts(new)
            assert f2 == finite
            assert a2.overlaps(arch) and t2.overlaps(total)
            assert float(t2.rad) <= 1e-10
        for _ in range(10):
            C, d = _rational_change(M, rng)
            new = _apply(C, basis)
            t2, f2, a2 = _parts(new)
            # the wedge scales by det C: finite parts move by prod |det|_v, arch parts by |det|
            assert f2 == finite * _abs_rational_power_product(d)
            assert a2.overlaps(arch * Ball(abs(d)))
            assert t2.overlaps(total)
            assert float(t2.rad) <= 1e-10


@pytest.mark.criterion(10, "Tight bound: F = x^2+3xy+3y^2, T = x^2, m = 3 gives bound 3 and H(a)^2 containing 3")
def test_criterion_10_tight_bound():
    K = NumberField([3, 3, 1])
    F = parse_homogeneous("x^2+3*x*y+3*y^2", 2)
    T = parse_homogeneous("x^2", 2)
    rep = verify_point(ProjectiveVector.of(K, [K.gen, 1]), F, T, 3, 1e-10)
    assert rep.bound == 3
    assert rep.height_power.contains(3) and float(rep.height_power.width) <= 1e-9
    assert rep.passed and rep.tight


@pytest.mark.criterion(11, "Infimum property: U_v <= nu_v(T - f) for 100 random f in Z(a) per fixture")
def test_criterion_11_infimum(corpus):
    rng = random.Random(1100)
    violations = []
    for a, T in projective_fixtures(corpus):
        places = [_place(a.field, r["place"]) for r in verify_identity_projective(a, T, 1e-8).rows]
        closed = {v: u_local_projective(a, T, v) for v in places}
        for _ in range(100):
            f = zero_set_element(a, T.degree, rng)
            assert f(a.coords).is_zero()
            diff = T - f
            for v in places:
                nu = sup_norm(diff, v, 1e-7)
                if isinstance(v, FinitePlace):
                    if closed[v] > nu:
                        violations.append((v.id, closed[v], nu))
                elif float(closed[v].lower) > float(nu.upper):
                    violations.append((v.id, closed[v], nu))
    assert violations == []


@pytest.mark.criterion(12, "Error paths: UNSUPPORTED_PRIME, T_VANISHES, KERNEL_MEETS_SUBSPACE, exit codes 2/1")
def test_criterion_12_errors(corpus, capsys):
    Q = corpus["Q"]
    with pytest.raises(UnsupportedPrime):
        finite_places_above(NumberField([-5, 0, 1]), 2)
    with pytest.raises(TVanishesAtPoint):
        verify_identity_projective(ProjectiveVector.of(Q, [1, 2]), HomogeneousPoly(Q, 2, 2, {(0, 2): 1, (1, 1): -2}))
    basis = [ProjectiveVector.of(Q, [1, 2, 3]), ProjectiveVector.of(Q, [0, 1, 1])]
    with pytest.raises(KernelMeetsSubspace):
        u_subspace(basis, LinearMap.of(Q, [[0, 0, 1], [0, 0, 2]]))

    assert main(["places", "--field", "x^2-5", "--primes", "2"]) == 2
    assert main(["verify-projective", "--point", "[1,2]", "--poly", "x2^2-2*x1*x2"]) == 2
    assert main(["verify-subspace", "--basis", "[[1,2,3],[0,1,1]]", "--map", "[[0,0,1],[0,0,2]]"]) == 2
    assert main(["mahler", "x^2 + + 1)"]) == 2
    assert main(["bound", "--F", "x^2+y^2", "--T", "x^2", "--m", "3"]) == 1
    assert main(["mahler", "x^10+x^9-x^7-x^6-x^5-x^4-x^3+x+1", "--tol", "1e-60", "--prec-cap", "64"]) == 1
    assert main(["verify-projective", "--point", "[1,2]", "--poly", "x1*x2"]) == 0
    err = capsys.readouterr().err
    for code in ("UNSUPPORTED_PRIME", "T_VANISHES", "KERNEL_MEETS_SUBSPACE", "PARSE_ERROR", "PRECISION_EXHAUSTED"):
        assert code in err


def _place(K, place_id):
    if place_id.startswith("inf"):
        return next(v for v in archimedean_places(K) if v.id == place_id)
    p = int(place_id.split(":")[0])
    return next(v for v in finite_places_above(K, p) if v.id == place_id)
