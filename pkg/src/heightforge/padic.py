"""Hensel lifting and Newton polygons over Z_p, truncated at p**k."""

from __future__ import annotations

from fractions import Fraction

from .exact import (
    Poly,
    gf_mul,
    gf_xgcd,
    vp,
)


def _mod(f: Poly, m: int) -> Poly:
    return Poly(c % m for c in f.coeffs)


def _divmod_monic(a: Poly, b: Poly, m: int) -> tuple[Poly, Poly]:
    """Division by a monic ``b`` in (Z/m)[x]."""
    r = [c % m for c in a.coeffs]
    db = b.degree
    if len(r) - 1 < db:
        return Poly(), Poly(r)
    q = [0] * (len(r) - db)
    for k in range(len(r) - 1 - db, -1, -1):
        c = r[k + db] % m
        q[k] = c
        if c:
            for j, y in enumerate(b.coeffs):
                r[k + j] = (r[k + j] - c * y) % m
    return Poly(q), Poly(r[:db])


def _lift_pair(f: Poly, g: Poly, h: Poly, p: int, k: int) -> tuple[Poly, Poly]:
    """Quadratic Hensel lifting of ``f = g*h mod p`` (all monic) to ``p**k``."""
    _, s_, t_ = gf_xgcd(list(g.coeffs), list(h.coeffs), p)
    s, t = Poly(s_), Poly(t_)
    m = p
    while m < p**k:
        m2 = m * m
        e = _mod(f - g * h, m2)
        q, r = _divmod_monic(s * e, h, m2)
        g_new = _mod(g + t * e + q * g, m2)
        h_new = _mod(h + r, m2)
        b = _mod(s * g_new + t * h_new - 1, m2)
        c, d = _divmod_monic(s * b, h_new, m2)
        s = _mod(s - d, m2)
        t = _mod(t - t * b - c * g_new, m2)
        g, h, m = g_new, h_new, m2
    pk = p**k
    return _mod(g, pk), _mod(h, pk)


def hensel_lift(f: Poly, factors: list[list[int]], p: int, k: int) -> list[Poly]:
    """Lift pairwise coprime monic factors of ``f mod p`` to ``p**k``.

    ``f`` must be monic with ``f = prod(factors) mod p``.  Returns monic integer
    polynomials with coefficients in ``[0, p**k)``.
    """
    pk = p**k
    if len(factors) == 1:
        return [_mod(f, pk)]
    half = len(factors) // 2
    left, right = factors[:half], factors[half:]
    gl = [1]
    for a in left:
        gl = gf_mul(gl, a, p)
    gr = [1]
    for a in right:
        gr = gf_mul(gr, a, p)
    G, H = _lift_pair(f, Poly(gl), Poly(gr), p, k)
    return hensel_lift(G, left, p, k) + hensel_lift(H, right, p, k)


def phi_expansion(f: Poly, phi: Poly) -> list[Poly]:
    """Coefficients ``a_i`` with ``f = sum a_i * phi**i`` and ``deg a_i < deg phi``."""
    out = []
    while not f.is_zero():
        f, r = divmod(f, phi)
        out.append(r)
    return out


def poly_valuation(f: Poly, p: int):
    """Minimum p-adic valuation of the coefficients (``inf`` for zero)."""
    return min((vp(c, p) for c in f.coeffs if c), default=float("inf"))


def single_slope_certificate(G: Poly, phi: Poly, e: int, p: int, k: int) -> Fraction | None:
    """Check that the phi-Newton polygon of ``G`` is one side with slope denominator ``e``.

    ``G`` is known modulo ``p**k`` and satisfies ``G = phi**e mod p``.  On
    success returns the slope ``h/e`` with ``gcd(h, e) = 1`` (so ``G`` is
    irreducible over Q_p with ramification ``e``); otherwise ``None``.
    """
    coeffs = phi_expansion(G, phi)
    if len(coeffs) != e + 1 or coeffs[e] != 1:
        return None
    vals = [poly_valuation(_mod(a, p**k), p) for a in coeffs]
    h = vals[0]
    if h >= k:
        return None
    slope = Fraction(h, e)
    if slope.denominator != e:
        return None
    for i in range(1, e):
        if vals[i] < slope * (e - i):
            return None
    return slope
