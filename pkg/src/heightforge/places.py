"""Places of a number field and the two normalized absolute values on them.

Archimedean places come from certified complex roots of the defining
polynomial (one place per real root or conjugate pair).  Finite places above
``p`` come from Hensel-lifted local factors of the defining polynomial; the
valuation of an element is read off a resultant against the local factor.

Finite absolute values are exact: a :class:`PPower` holds ``p**exponent``
with a rational exponent.  Archimedean ones are :class:`~heightforge.ball.Ball`
enclosures.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field as dc_field
from fractions import Fraction
from typing import Iterable, Union

from mpmath import iv

from .ball import (
    Ball,
    ComplexBall,
    InsufficientPrecision,
    isolate_roots,
    isolate_roots_at,
    refine,
    working_precision,
)
from .errors import PrecisionExhausted, UnsupportedPrime
from .exact import Poly, factor_integer, factor_mod_p, gf_pow, prime_divisors, resultant, vp
from .field import FieldElement, NumberField, norm, p_maximality_test
from .padic import hensel_lift, single_slope_certificate

LIFT_START = 20
LIFT_MARGIN = 10
LIFT_CAP = 5120


@dataclass(frozen=True)
class PPower:
    """The exact real number ``p**exponent``; ``exponent=None`` encodes 0."""

    p: int
    exponent: Fraction | None

    @classmethod
    def one(cls, p: int) -> PPower:
        return cls(p, Fraction(0))

    @classmethod
    def zero(cls, p: int) -> PPower:
        return cls(p, None)

    def is_zero(self) -> bool:
        return self.exponent is None

    def _check(self, other: PPower):
        if not isinstance(other, PPower) or other.p != self.p:
            raise ValueError("PPower values at different primes do not combine")

    def __mul__(self, other: PPower) -> PPower:
        self._check(other)
        if self.is_zero() or other.is_zero():
            return PPower.zero(self.p)
        return PPower(self.p, self.exponent + other.exponent)

    def __truediv__(self, other: PPower) -> PPower:
        self._check(other)
        if other.is_zero():
            raise ZeroDivisionError("division by an exact zero")
        if self.is_zero():
            return self
        return PPower(self.p, self.exponent - other.exponent)

    def __pow__(self, e) -> PPower:
        e = Fraction(e)
        if self.is_zero():
            if e <= 0:
                raise ZeroDivisionError("non-positive power of zero")
            return self
        return PPower(self.p, self.exponent * e)

    def _key(self):
        return -math.inf if self.is_zero() else self.exponent

    def __lt__(self, other: PPower) -> bool:
        self._check(other)
        return self._key() < other._key()

    def __le__(self, other: PPower) -> bool:
        self._check(other)
        return self._key() <= other._key()

    def __gt__(self, other: PPower) -> bool:
        return other < self

    def __ge__(self, other: PPower) -> bool:
        return other <= self

    def to_fraction(self) -> Fraction:
        if self.is_zero():
            return Fraction(0)
        if self.exponent.denominator != 1:
            raise ValueError(f"{self} is irrational")
        return Fraction(self.p) ** self.exponent.numerator

    def to_ball(self) -> Ball:
        if self.is_zero():
            return Ball(0)
        if self.exponent.denominator == 1:
            return Ball(self.to_fraction())
        return Ball(self.p).rpow(self.exponent)

    def __float__(self) -> float:
        return 0.0 if self.is_zero() else float(self.p) ** float(self.exponent)

    def __str__(self) -> str:
        return "0" if self.is_zero() else f"{self.p}^({self.exponent})"


@dataclass(frozen=True)
class PowerProduct:
    """Exact product ``prod p**e_p`` over finitely many primes, or 0."""

    exponents: tuple[tuple[int, Fraction], ...] = ()
    zero: bool = False

    @classmethod
    def of(cls, values: Iterable[PPower]) -> PowerProduct:
        acc: dict[int, Fraction] = {}
        for v in values:
            if v.is_zero():
                return cls(zero=True)
            acc[v.p] = acc.get(v.p, Fraction(0)) + v.exponent
        return cls(tuple(sorted((p, e) for p, e in acc.items() if e != 0)))

    def __mul__(self, other: PowerProduct) -> PowerProduct:
        if self.zero or other.zero:
            return PowerProduct(zero=True)
        return PowerProduct.of(PPower(p, e) for p, e in self.exponents + other.exponents)

    def __pow__(self, e) -> PowerProduct:
        e = Fraction(e)
        if self.zero:
            return self
        return PowerProduct(tuple((p, x * e) for p, x in self.exponents if x * e != 0))

    def is_rational(self) -> bool:
        return self.zero or all(e.denominator == 1 for _, e in self.exponents)

    def to_fraction(self) -> Fraction:
        if self.zero:
            return Fraction(0)
        if not self.is_rational():
            raise ValueError("irrational power product")
        out = Fraction(1)
        for p, e in self.exponents:
            out *= Fraction(p) ** e.numerator
        return out

    def to_ball(self) -> Ball:
        if self.zero:
            return Ball(0)
        out = Ball(1)
        for p, e in self.exponents:
            out = out * PPower(p, e).to_ball()
        return out

    def __str__(self) -> str:
        if self.zero:
            return "0"
        if not self.exponents:
            return "1"
        return " * ".join(f"{p}^({e})" for p, e in self.exponents)


@dataclass(frozen=True, eq=False)
class ArchimedeanPlace:
    field: NumberField
    index: int
    is_real: bool
    base_root: ComplexBall = dc_field(repr=False)

    @property
    def local_degree(self) -> int:
        return 1 if self.is_real else 2

    @property
    def id(self) -> str:
        return f"inf{self.index}"

    def root(self, prec: int | None = None) -> ComplexBall:
        """The embedding's root, enclosed at ``prec`` bits (default: current)."""
        if prec is None:
            return _root_for(self)
        with working_precision(prec):
            return _root_for(self)

    def __eq__(self, other) -> bool:
        return isinstance(other, ArchimedeanPlace) and (self.field, self.index) == (other.field, other.index)

    def __hash__(self) -> int:
        return hash(("inf", self.field, self.index))


@dataclass(frozen=True, eq=False)
class FinitePlace:
    field: NumberField
    p: int
    residue_factor: Poly  # monic irreducible factor of f mod p
    ramification_e: int
    residue_f: int
    group: int  # position among the coprime factor groups mod p

    @property
    def local_degree(self) -> int:
        return self.ramification_e * self.residue_f

    @property
    def id(self) -> str:
        return f"{self.p}:{self.residue_factor.to_str('x').replace(' ', '')}"

    @property
    def precision_k(self) -> int:
        return LIFT_START

    def local_factor(self, k: int = LIFT_START) -> Poly:
        """Monic p-adic factor of the defining polynomial, modulo ``p**k``."""
        return _lifted_factors(self.field, self.p, k)[self.group]

    def __eq__(self, other) -> bool:
        return isinstance(other, FinitePlace) and (self.field, self.p, self.group) == (
            other.field,
            other.p,
            other.group,
        )

    def __hash__(self) -> int:
        return hash((self.p, self.field, self.group))


Place = Union[ArchimedeanPlace, FinitePlace]


# ----------------------------------------------------------------- Archimedean


def _base_roots(K: NumberField) -> list[ComplexBall]:
    return K.cached("roots_base", lambda: isolate_roots(K.defining_poly, target_radius=1e-6))


def archimedean_places(K: NumberField) -> list[ArchimedeanPlace]:
    def compute():
        roots = _base_roots(K)
        reals = [r for r in roots if r.is_real()]
        uppers = [r for r in roots if not r.is_real() and r.imag.lower > 0]
        ordered_sorted = sorted(reals + uppers, key=lambda r: (float(r.real.mid), float(r.imag.mid)))
        places = [
            ArchimedeanPlace(K, i, r.is_real(), r) for i, r in enumerate(ordered_sorted)
        ]
        if sum(v.local_degree for v in places) != K.degree:
            raise PrecisionExhausted("root classification does not account for every embedding")
        return places

    return K.cached("arch_places", compute)


def _place_roots_base(K: NumberField) -> list[ComplexBall]:
    return [v.base_root for v in archimedean_places(K)]


def _arch_abs(beta: FieldElement, v: ArchimedeanPlace, normalized: bool) -> Ball:
    """Archimedean absolute value at the current working precision."""
    if beta.is_zero():
        return Ball(0)
    root = _root_for(v)
    value = abs(beta.evaluate(root))
    if value.contains_zero():
        raise InsufficientPrecision("embedding value not separated from 0")
    if normalized:
        return value.rpow(Fraction(v.local_degree, beta.field.degree))
    return value


def _root_for(v: ArchimedeanPlace) -> ComplexBall:
    prec = iv.prec
    K = v.field

    def compute():
        base = _place_roots_base(K)
        with working_precision(prec):
            try:
                fresh = isolate_roots_at(K.defining_poly, prec)
            except InsufficientPrecision:
                return None
            cands = [r for r in fresh if r.is_real() or r.imag.lower > 0]
            return [min(cands, key=lambda r, b=b: abs(r.mid - b.mid)) for b in base]

    roots = K.cached(("place_roots", prec), compute)
    if roots is None:
        raise InsufficientPrecision("root isolation failed at this precision")
    return roots[v.index]


# --------------------------------------------------------------------- finite


def _factor_groups(K: NumberField, p: int):
    return K.cached(("factors", p), lambda: factor_mod_p(K.defining_poly, p))


def _lifted_factors(K: NumberField, p: int, k: int) -> list[Poly]:
    def compute():
        groups = [gf_pow(list(g.coeffs), e, p) for g, e in _factor_groups(K, p)]
        return hensel_lift(K.defining_poly, groups, p, k)

    return K.cached(("lift", p, k), compute)


def finite_places_above(K: NumberField, p: int) -> list[FinitePlace]:
    """One place per prime of K above ``p``; raises UnsupportedPrime outside the certified class."""

    def compute():
        if not p_maximality_test(K, p):
            raise UnsupportedPrime(p, "Z[theta] is not p-maximal (Dedekind criterion fails)")
        places = []
        for j, (g, e) in enumerate(_factor_groups(K, p)):
            if e > 1:
                k = LIFT_START
                while True:
                    G = _lifted_factors(K, p, k)[j]
                    slope = single_slope_certificate(G, g, e, p, k)
                    if slope is not None:
                        break
                    if k >= LIFT_CAP:
                        raise UnsupportedPrime(
                            p, f"repeated factor ({g.to_str('x')})^{e} lacks a single-slope certificate"
                        )
                    k *= 2
            places.append(FinitePlace(K, p, g, e, g.degree, j))
        if sum(v.local_degree for v in places) != K.degree:
            raise UnsupportedPrime(p, "local degrees do not sum to the field degree")
        return places

    return K.cached(("finite_places", p), compute)


def finite_valuation(beta: FieldElement, v: FinitePlace) -> Fraction | None:
    """``w`` with ``||beta||_v = p**(-w)``; ``None`` for beta = 0."""
    if beta.is_zero():
        return None
    p = v.p
    k = LIFT_START
    while k <= LIFT_CAP:
        G = v.local_factor(k)
        r = resultant(G, beta.num)
        val = vp(r, p)
        if val <= k - LIFT_MARGIN:
            return Fraction(val, v.local_degree) - vp(beta.den, p)
        k *= 2
    raise PrecisionExhausted(f"valuation at {v.id} not resolved below p^{LIFT_CAP}")


def _finite_abs(beta: FieldElement, v: FinitePlace, normalized: bool) -> PPower:
    w = finite_valuation(beta, v)
    if w is None:
        return PPower.zero(v.p)
    if normalized:
        return PPower(v.p, -w * Fraction(v.local_degree, beta.field.degree))
    return PPower(v.p, -w)


def abs_value(
    beta: FieldElement,
    v: Place,
    normalized: bool = True,
    target_radius: float | None = None,
):
    """``|beta|_v`` (normalized) or ``||beta||_v``.

    Finite places give an exact :class:`PPower`.  Archimedean places give a
    Ball, computed at the current working precision unless ``target_radius``
    asks for adaptive refinement.
    """
    if isinstance(v, FinitePlace):
        return _finite_abs(beta, v, normalized)
    if target_radius is None:
        return _arch_abs(beta, v, normalized)
    return refine(lambda prec: _arch_abs(beta, v, normalized), target_radius)


def candidate_finite_places(elements: Iterable[FieldElement]) -> list[int]:
    """Primes outside of which ``max_i |a_i|_v = 1`` at every finite place."""
    elems = [a for a in elements if not a.is_zero()]
    if not elems:
        raise ValueError("all elements are zero")
    K = elems[0].field
    primes: set[int] = set()
    g = 0
    for a in elems:
        if a.den > 1:
            primes.update(factor_integer(a.den))
        integral_norm = resultant(K.defining_poly, a.num)
        g = math.gcd(g, abs(integral_norm.numerator))
    if g > 1:
        primes.update(factor_integer(g))
    disc = K.discriminant
    if abs(disc) != 1:
        primes.update(prime_divisors(disc))
    return sorted(primes)


def all_places(K: NumberField, primes: Iterable[int]) -> list[Place]:
    out: list[Place] = list(archimedean_places(K))
    for p in sorted(set(primes)):
        out.extend(finite_places_above(K, p))
    return out


@dataclass
class ProductFormulaReport:
    element: str
    norm: Fraction
    finite_product: Fraction
    archimedean_product: Ball
    normalized_product: Ball
    rows: list[dict]
    passed: bool


def product_formula_check(beta: FieldElement, target_radius: float = 1e-10) -> ProductFormulaReport:
    """Check prod_v ||beta||_v^{d_v} = 1 split into its exact and numeric halves."""
    if beta.is_zero():
        raise ValueError("product formula needs a nonzero element")
    K = beta.field
    N = norm(beta)
    primes = candidate_finite_places([beta])
    rows = []
    finite = []
    for p in primes:
        for v in finite_places_above(K, p):
            u = _finite_abs(beta, v, normalized=False)
            finite.append(u ** v.local_degree)
            rows.append({"place": v.id, "d_v": v.local_degree, "abs": u})
    finite_product = PowerProduct.of(finite).to_fraction()
    arch = archimedean_places(K)

    def arch_product(prec):
        out = Ball(1)
        for v in arch:
            out = out * _arch_abs(beta, v, normalized=False) ** v.local_degree
        return out

    arch_ball = refine(arch_product, target_radius * max(1, float(abs(N))))

    def normalized_product(prec):
        out = PowerProduct.of(
            _finite_abs(beta, v, normalized=True) for p in primes for v in finite_places_above(K, p)
        ).to_ball()
        for v in arch:
            out = out * _arch_abs(beta, v, normalized=True)
        return out

    norm_ball = refine(normalized_product, target_radius)
    for v in arch:
        rows.append({"place": v.id, "d_v": v.local_degree, "abs": None})
    passed = finite_product == 1 / abs(N) and arch_ball.contains(abs(N)) and norm_ball.contains(1)
    return ProductFormulaReport(str(beta), N, finite_product, arch_ball, norm_ball, rows, passed)
