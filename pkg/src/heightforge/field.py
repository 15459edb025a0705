"""Number fields Q[x]/(f) with f monic and integral, and their elements."""

from __future__ import annotations

import math
import threading
from fractions import Fraction
from functools import cached_property
from typing import Iterable

from .errors import IrreducibilityNotCertified
from .exact import (
    Poly,
    content_primitive,
    discriminant,
    factor_mod_p,
    gf_from_poly,
    gf_gcd,
    gf_mul,
    gf_pow,
    poly_gcd,
    poly_xgcd,
    resultant,
    squarefree_decomposition,
)

IRREDUCIBILITY_PRIME_BOUND = 200


def _small_primes(bound: int) -> list[int]:
    sieve = bytearray([1]) * (bound + 1)
    sieve[:2] = b"\x00\x00"
    for i in range(2, int(bound**0.5) + 1):
        if sieve[i]:
            sieve[i * i :: i] = bytearray(len(sieve[i * i :: i]))
    return [i for i, flag in enumerate(sieve) if flag]


def certify_irreducible(f: Poly) -> bool:
    """Degree-pattern certificate over the good primes up to 200.

    Any factor over Q of degree k would force k to be a sum of factor degrees
    modulo every prime not dividing the discriminant, so an empty intersection
    of those subset sums (apart from 0 and deg f) proves irreducibility.
    """
    d = f.degree
    if d == 1:
        return True
    sqf = squarefree_decomposition(f)
    if len(sqf) != 1 or sqf[0][1] != 1:
        return False
    disc = discriminant(f)
    possible = set(range(1, d))
    for p in _small_primes(IRREDUCIBILITY_PRIME_BOUND):
        if disc.numerator % p == 0 or f.lc % p == 0:
            continue
        sums = {0}
        for g, mult in factor_mod_p(f, p):
            for _ in range(mult):
                sums |= {s + g.degree for s in sums}
        possible &= sums
        if not possible:
            return True
    return False


class NumberField:
    """The field Q(theta) with theta a root of a monic irreducible integer polynomial."""

    def __init__(self, defining_poly: Poly | Iterable[int], *, check: bool = True):
        f = defining_poly if isinstance(defining_poly, Poly) else Poly(defining_poly)
        if f.degree < 1:
            raise ValueError("defining polynomial must have degree >= 1")
        if not f.is_integral() or f.lc != 1:
            raise ValueError(
                "defining polynomial must be monic with integer coefficients; "
                "replace x by x/lc and clear denominators"
            )
        if check and not certify_irreducible(f):
            raise IrreducibilityNotCertified(f"irreducibility not certified for {f}")
        self.defining_poly = f
        self.degree = f.degree
        self._lock = threading.Lock()
        self._cache: dict = {}

    def __repr__(self) -> str:
        return f"NumberField({self.defining_poly.to_str('t')})"

    def __eq__(self, other) -> bool:
        return isinstance(other, NumberField) and self.defining_poly == other.defining_poly

    def __hash__(self) -> int:
        return hash(("NumberField", self.defining_poly))

    @cached_property
    def discriminant(self) -> Fraction:
        return discriminant(self.defining_poly)

    def cached(self, key, compute):
        """Memoize ``compute()`` under ``key``; duplicate work is harmless."""
        with self._lock:
            if key in self._cache:
                return self._cache[key]
        value = compute()
        with self._lock:
            return self._cache.setdefault(key, value)

    # element construction
    def __call__(self, value) -> FieldElement:
        if isinstance(value, FieldElement):
            if value.field != self:
                raise ValueError("element belongs to a different field")
            return value
        if isinstance(value, (int, Fraction)):
            return FieldElement.from_poly(self, Poly((value,)))
        if isinstance(value, Poly):
            return FieldElement.from_poly(self, value)
        if isinstance(value, (list, tuple)):
            return FieldElement.from_poly(self, Poly(value))
        raise TypeError(f"cannot convert {type(value).__name__} to a field element")

    @property
    def gen(self) -> FieldElement:
        return self(Poly((0, 1)))

    @property
    def zero(self) -> FieldElement:
        return self(0)

    @property
    def one(self) -> FieldElement:
        return self(1)


class FieldElement:
    """``numerator(theta) / denominator`` with an integer polynomial numerator."""

    __slots__ = ("field", "num", "den")

    def __init__(self, field: NumberField, num: Poly, den: int = 1):
        # callers guarantee deg num < d, den > 0 and gcd(content, den) = 1
        self.field = field
        self.num = num
        self.den = den

    @classmethod
    def from_poly(cls, field: NumberField, poly: Poly) -> FieldElement:
        den = poly.denominator()
        num = Poly(int(c * den) for c in poly.coeffs)
        num = num % field.defining_poly
        return cls._normalized(field, num, den)

    @classmethod
    def _normalized(cls, field, num: Poly, den: int) -> FieldElement:
        if num.is_zero():
            return cls(field, num, 1)
        if den < 0:
            num, den = -num, -den
        g = math.gcd(den, *num.coeffs)
        if g > 1:
            num = Poly(c // g for c in num.coeffs)
            den //= g
        return cls(field, num, den)

    def as_poly(self) -> Poly:
        """Representation ``b(x)`` with rational coefficients."""
        return Poly(Fraction(c, self.den) for c in self.num.coeffs)

    def is_zero(self) -> bool:
        return self.num.is_zero()

    def is_rational(self) -> bool:
        return self.num.degree <= 0

    def to_rational(self) -> Fraction:
        if not self.is_rational():
            raise ValueError("element is not rational")
        return Fraction(self.num[0], self.den)

    def _coerce(self, other) -> FieldElement | None:
        if isinstance(other, FieldElement):
            if other.field is not self.field and other.field != self.field:
                raise ValueError("elements of different fields")
            return other
        if isinstance(other, (int, Fraction)):
            return self.field(other)
        return None

    def __eq__(self, other) -> bool:
        o = self._coerce(other) if isinstance(other, (FieldElement, int, Fraction)) else None
        if o is None:
            return NotImplemented
        return self.num == o.num and self.den == o.den

    def __hash__(self) -> int:
        return hash((self.num, self.den))

    def __add__(self, other):
        o = self._coerce(other)
        if o is None:
            return NotImplemented
        return FieldElement._normalized(self.field, self.num * o.den + o.num * self.den, self.den * o.den)

    __radd__ = __add__

    def __neg__(self):
        return FieldElement(self.field, -self.num, self.den)

    def __sub__(self, other):
        o = self._coerce(other)
        if o is None:
            return NotImplemented
        return self + (-o)

    def __rsub__(self, other):
        return (-self) + other

    def __mul__(self, other):
        o = self._coerce(other)
        if o is None:
            return NotImplemented
        num = (self.num * o.num) % self.field.defining_poly
        return FieldElement._normalized(self.field, num, self.den * o.den)

    __rmul__ = __mul__

    def inverse(self) -> FieldElement:
        if self.is_zero():
            raise ZeroDivisionError("inverse of zero in a number field")
        d, s, _ = poly_xgcd(self.num, self.field.defining_poly)
        # d = 1 since f is irreducible and deg num < deg f
        return FieldElement.from_poly(self.field, s * self.den)

    def __truediv__(self, other):
        o = self._coerce(other)
        if o is None:
            return NotImplemented
        return self * o.inverse()

    def __rtruediv__(self, other):
        o = self._coerce(other)
        if o is None:
            return NotImplemented
        return o * self.inverse()

    def __pow__(self, n: int):
        if n < 0:
            return self.inverse() ** (-n)
        out, base = self.field.one, self
        while n:
            if n & 1:
                out = out * base
            base = base * base
            n >>= 1
        return out

    def evaluate(self, point):
        """Image under the embedding theta -> point (a Ball or ComplexBall)."""
        value = point * 0 + self.num(point)
        return value / self.den

    def __repr__(self) -> str:
        body = self.num.to_str("t")
        return body if self.den == 1 else f"({body})/{self.den}"

    __str__ = __repr__


def norm(beta: FieldElement) -> Fraction:
    """Field norm down to Q, sign included."""
    K = beta.field
    if beta.is_zero():
        return Fraction(0)
    return resultant(K.defining_poly, beta.num) / Fraction(beta.den) ** K.degree


def trace(beta: FieldElement) -> Fraction:
    cp = characteristic_polynomial(beta)
    return -Fraction(cp[cp.degree - 1])


def characteristic_polynomial(beta: FieldElement) -> Poly:
    """Monic characteristic polynomial of multiplication by ``beta``.

    Interpolated from ``N(c - beta)`` at ``c = 0..d``.
    """
    K = beta.field
    d = K.degree
    xs = list(range(d + 1))
    ys = [norm(K(c) - beta) for c in xs]
    out = Poly()
    for i, xi in enumerate(xs):
        basis = Poly((1,))
        denom = Fraction(1)
        for j, xj in enumerate(xs):
            if j != i:
                basis = basis * Poly((-xj, 1))
                denom *= xi - xj
        out = out + basis * (ys[i] / denom)
    return out


def minimal_polynomial(beta: FieldElement) -> Poly:
    """Primitive integer minimal polynomial with positive leading coefficient."""
    cp = characteristic_polynomial(beta)
    radical = cp // poly_gcd(cp, cp.derivative())
    prim = content_primitive(radical)[1]
    return prim if prim.lc > 0 else -prim


def p_maximality_test(K: NumberField, p: int) -> bool:
    """Dedekind's criterion: is Z[theta] maximal at ``p``?"""
    f = K.defining_poly
    if K.discriminant.numerator % (p * p) != 0:
        return True
    factors = factor_mod_p(f, p)
    g = [1]
    h = [1]
    for fac, e in factors:
        gf = list(fac.coeffs)
        g = gf_mul(g, gf, p)
        h = gf_mul(h, gf_pow(gf, e - 1, p), p)
    G = Poly(g)
    H = Poly(h)
    F = (G * H - f) * Fraction(1, p)
    Fbar = gf_from_poly(F, p)
    common = gf_gcd(gf_gcd(Fbar, g, p), h, p) if Fbar else gf_gcd(g, h, p)
    return len(common) == 1


def rational_field() -> NumberField:
    """Q presented as Q[t]/(t)."""
    return NumberField(Poly((0, 1)))


def field_from_minpoly(g: Poly) -> tuple[NumberField, FieldElement]:
    """Present a root of an irreducible integer ``g`` inside a monic field.

    Returns ``(K, alpha)`` with K = Q[y]/(G) where G is the monic transform of
    ``g`` under y = lc(g) x and alpha = theta / lc(g).
    """
    _, g = content_primitive(g)
    if g.lc < 0:
        g = -g
    a = g.lc
    n = g.degree
    G = Poly(g[i] * a ** (n - 1 - i) for i in range(n)) + Poly([0] * n + [1])
    K = NumberField(G)
    return K, K.gen / a
