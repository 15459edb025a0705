"""Exact integer, rational and polynomial arithmetic.

Univariate polynomials are held by :class:`Poly`, whose coefficients are
Python ``int`` or :class:`fractions.Fraction` (low degree first).  A ``Poly``
with integer coefficients plays the role of an integer polynomial; there is
no separate class.

Polynomials over the field with ``p`` elements use bare lists of ints in
``[0, p)`` (low degree first, no trailing zeros) and the ``gf_*`` helpers.
"""

from __future__ import annotations

import math
import random
from fractions import Fraction
from typing import Iterable, Sequence

import sympy


def _norm(c):
    if isinstance(c, Fraction) and c.denominator == 1:
        return c.numerator
    return c


class Poly:
    """Immutable dense univariate polynomial over Z or Q."""

    __slots__ = ("coeffs",)

    def __init__(self, coeffs: Iterable = ()):
        c = [_norm(x) for x in coeffs]
        while c and c[-1] == 0:
            c.pop()
        object.__setattr__(self, "coeffs", tuple(c))

    def __setattr__(self, name, value):
        raise AttributeError("Poly is immutable")

    @classmethod
    def x(cls) -> Poly:
        return cls((0, 1))

    @classmethod
    def const(cls, c) -> Poly:
        return cls((c,))

    @classmethod
    def from_roots(cls, roots: Iterable) -> Poly:
        out = cls((1,))
        for r in roots:
            out = out * cls((-r, 1))
        return out

    @property
    def degree(self) -> int:
        """Degree, with ``-1`` for the zero polynomial."""
        return len(self.coeffs) - 1

    @property
    def lc(self):
        return self.coeffs[-1] if self.coeffs else 0

    def is_zero(self) -> bool:
        return not self.coeffs

    def is_integral(self) -> bool:
        return all(isinstance(c, int) for c in self.coeffs)

    def __getitem__(self, i: int):
        return self.coeffs[i] if 0 <= i < len(self.coeffs) else 0

    def __len__(self) -> int:
        return len(self.coeffs)

    def __iter__(self):
        return iter(self.coeffs)

    def __eq__(self, other) -> bool:
        if isinstance(other, Poly):
            return self.coeffs == other.coeffs
        if isinstance(other, (int, Fraction)):
            return self.coeffs == Poly((other,)).coeffs
        return NotImplemented

    def __hash__(self) -> int:
        return hash(self.coeffs)

    def _coerce(self, other) -> Poly:
        if isinstance(other, Poly):
            return other
        if isinstance(other, (int, Fraction)):
            return Poly((other,))
        raise TypeError(f"cannot combine Poly with {type(other).__name__}")

    def __add__(self, other) -> Poly:
        try:
            o = self._coerce(other)
        except TypeError:
            return NotImplemented
        n = max(len(self), len(o))
        return Poly(self[i] + o[i] for i in range(n))

    __radd__ = __add__

    def __neg__(self) -> Poly:
        return Poly(-c for c in self.coeffs)

    def __sub__(self, other) -> Poly:
        try:
            o = self._coerce(other)
        except TypeError:
            return NotImplemented
        return self + (-o)

    def __rsub__(self, other) -> Poly:
        return (-self) + other

    def __mul__(self, other) -> Poly:
        if isinstance(other, (int, Fraction)):
            return Poly(c * other for c in self.coeffs)
        if not isinstance(other, Poly):
            return NotImplemented
        if self.is_zero() or other.is_zero():
            return Poly()
        out = [0] * (len(self) + len(other) - 1)
        for i, a in enumerate(self.coeffs):
            if a:
                for j, b in enumerate(other.coeffs):
                    out[i + j] += a * b
        return Poly(out)

    __rmul__ = __mul__

    def __pow__(self, n: int) -> Poly:
        if n < 0:
            raise ValueError("negative exponent")
        result, base = Poly((1,)), self
        while n:
            if n & 1:
                result = result * base
            base = base * base
            n >>= 1
        return result

    def __divmod__(self, other) -> tuple[Poly, Poly]:
        o = self._coerce(other)
        if o.is_zero():
            raise ZeroDivisionError("polynomial division by zero")
        r = list(self.coeffs)
        dq = len(r) - len(o)
        if dq < 0:
            return Poly(), self
        q = [0] * (dq + 1)
        lead = o.lc
        unit = lead in (1, -1)
        for k in range(dq, -1, -1):
            c = r[k + o.degree]
            if c == 0:
                continue
            c = c * lead if unit else Fraction(c) / lead
            q[k] = c
            for j, b in enumerate(o.coeffs):
                r[k + j] -= c * b
        return Poly(q), Poly(r[: o.degree] if o.degree > 0 else [])

    def __floordiv__(self, other) -> Poly:
        return divmod(self, other)[0]

    def __mod__(self, other) -> Poly:
        return divmod(self, other)[1]

    def __call__(self, x):
        """Horner evaluation; ``x`` may be any ring element supporting + and *."""
        if not self.coeffs:
            return 0 * x if not isinstance(x, (int, Fraction)) else 0
        acc = self.coeffs[-1]
        for c in reversed(self.coeffs[:-1]):
            acc = acc * x + c
        return acc

    def derivative(self) -> Poly:
        return Poly(i * c for i, c in enumerate(self.coeffs) if i)

    def monic(self) -> Poly:
        if self.is_zero():
            return self
        lead = self.lc
        return Poly(Fraction(c) / lead for c in self.coeffs)

    def compose(self, other: Poly) -> Poly:
        return self(other) if self.degree > 0 else self

    def shift(self, c) -> Poly:
        """Return ``f(x + c)``."""
        return self.compose(Poly((c, 1)))

    def map(self, fn) -> Poly:
        return Poly(fn(c) for c in self.coeffs)

    def denominator(self) -> int:
        return math.lcm(1, *(Fraction(c).denominator for c in self.coeffs))

    def __repr__(self) -> str:
        return f"Poly({list(self.coeffs)!r})"

    def to_str(self, var: str = "x") -> str:
        if not self.coeffs:
            return "0"
        parts = []
        for i in range(len(self.coeffs) - 1, -1, -1):
            c = self.coeffs[i]
            if c == 0:
                continue
            sign = "-" if c < 0 else "+"
            a = abs(c)
            if i == 0:
                body = str(a)
            else:
                mono = var if i == 1 else f"{var}^{i}"
                body = mono if a == 1 else f"{a}*{mono}"
            parts.append((sign, body))
        s0, b0 = parts[0]
        out = ("-" if s0 == "-" else "") + b0
        for s, b in parts[1:]:
            out += f" {s} {b}"
        return out

    __str__ = to_str


# ---------------------------------------------------------------- Z and Q[x]


def content_primitive(f: Poly) -> tuple[int | Fraction, Poly]:
    """Split ``f`` into a positive content and a primitive part.

    For rational input the content is rational and the primitive part has
    coprime integer coefficients.
    """
    if f.is_zero():
        raise ValueError("content of the zero polynomial")
    den = f.denominator()
    ints = [int(c * den) for c in f.coeffs]
    g = math.gcd(*ints)
    content = Fraction(g, den)
    return _norm(content), Poly(c // g for c in ints)


def poly_gcd(f: Poly, g: Poly) -> Poly:
    """Monic gcd over Q."""
    a, b = f, g
    while not b.is_zero():
        a, b = b, a % b
    return a.monic()


def poly_xgcd(f: Poly, g: Poly) -> tuple[Poly, Poly, Poly]:
    """Return ``(d, s, t)`` with ``s*f + t*g = d`` and ``d`` monic."""
    r0, r1 = f, g
    s0, s1 = Poly((1,)), Poly()
    t0, t1 = Poly(), Poly((1,))
    while not r1.is_zero():
        q, r = divmod(r0, r1)
        r0, r1 = r1, r
        s0, s1 = s1, s0 - q * s1
        t0, t1 = t1, t0 - q * t1
    lead = r0.lc
    if lead == 0:
        return r0, s0, t0
    inv = Fraction(1) / lead
    return r0 * inv, s0 * inv, t0 * inv


def squarefree_decomposition(f: Poly) -> list[tuple[Poly, int]]:
    """Yun's algorithm over Q; factors returned primitive with positive lc."""
    if f.degree < 1:
        return []
    out = []
    a = f.monic()
    b = a.derivative()
    c = poly_gcd(a, b)
    w = a // c
    y = b // c
    z = y - w.derivative()
    i = 1
    while w.degree > 0:
        g = poly_gcd(w, z)
        w = w // g
        y = z // g
        z = y - w.derivative()
        if g.degree > 0:
            prim = content_primitive(g)[1]
            out.append((prim if prim.lc > 0 else -prim, i))
        i += 1
    return out


def _int_prem(a: Poly, b: Poly) -> Poly:
    """Pseudo-remainder ``lc(b)^(deg a - deg b + 1) * a mod b`` in Z[x]."""
    r = list(a.coeffs)
    db = b.degree
    lead = b.lc
    delta = len(r) - len(b)
    for k in range(delta, -1, -1):
        c = r[k + db]
        r = [x * lead for x in r]
        for j, bj in enumerate(b.coeffs):
            r[k + j] -= c * bj
    return Poly(r[:db])


def resultant(f: Poly, g: Poly) -> Fraction:
    """Resultant of two nonzero polynomials via the subresultant PRS."""
    if f.is_zero() or g.is_zero():
        raise ValueError("resultant of a zero polynomial")
    df, dg = f.degree, g.degree
    if df == 0 or dg == 0:
        return Fraction(f.lc) ** dg if df == 0 else Fraction(g.lc) ** df
    ca, A = content_primitive(f)
    cb, B = content_primitive(g)
    t = Fraction(ca) ** dg * Fraction(cb) ** df
    s = 1
    if A.degree < B.degree:
        A, B = B, A
        if df * dg % 2:
            s = -s
    gg = hh = 1
    while True:
        da, db = A.degree, B.degree
        delta = da - db
        if da % 2 and db % 2:
            s = -s
        R = _int_prem(A, B)
        if R.is_zero():
            return Fraction(0)
        A = B
        div = gg * hh**delta
        B = Poly(c // div for c in R.coeffs)
        gg = A.lc
        hh = gg**delta // hh ** (delta - 1) if delta >= 1 else hh
        if B.degree == 0:
            da = A.degree
            lead = Fraction(B.lc) ** da
            h_final = lead / Fraction(hh) ** (da - 1)
            return s * t * h_final


def discriminant(f: Poly) -> Fraction:
    if f.degree < 1:
        raise ValueError("discriminant of a constant polynomial")
    d = f.degree
    sign = -1 if (d * (d - 1) // 2) % 2 else 1
    return sign * resultant(f, f.derivative()) / Fraction(f.lc)


# ------------------------------------------------------------------ integers


def factor_integer(n: int) -> list[int]:
    """Prime factors of ``|n|`` with multiplicity, ascending."""
    if n == 0:
        raise ValueError("cannot factor 0")
    out = []
    for p, e in sorted(sympy.factorint(abs(n)).items()):
        out.extend([int(p)] * int(e))
    return out


def prime_divisors(n: int | Fraction) -> set[int]:
    """Primes dividing the numerator or denominator of a nonzero rational."""
    q = Fraction(n)
    if q == 0:
        return set()
    return set(factor_integer(q.numerator)) | set(factor_integer(q.denominator))


def is_prime(n: int) -> bool:
    return bool(sympy.isprime(n))


def vp(n: int | Fraction, p: int) -> int | float:
    """p-adic valuation of a rational; ``inf`` for zero."""
    q = Fraction(n)
    if q == 0:
        return math.inf
    v, a, b = 0, q.numerator, q.denominator
    while a % p == 0:
        a //= p
        v += 1
    while b % p == 0:
        b //= p
        v -= 1
    return v


# -------------------------------------------------------------- F_p[x] lists


def gf_strip(a: list[int]) -> list[int]:
    while a and a[-1] == 0:
        a.pop()
    return a


def gf_from_poly(f: Poly, p: int) -> list[int]:
    if not f.is_integral():
        den = f.denominator()
        if den % p == 0:
            raise ValueError(f"polynomial is not p-integral at {p}")
        inv = pow(den, -1, p)
        return gf_strip([int(c * den) * inv % p for c in f.coeffs])
    return gf_strip([c % p for c in f.coeffs])


def gf_add(a, b, p):
    n = max(len(a), len(b))
    return gf_strip([((a[i] if i < len(a) else 0) + (b[i] if i < len(b) else 0)) % p for i in range(n)])


def gf_sub(a, b, p):
    n = max(len(a), len(b))
    return gf_strip([((a[i] if i < len(a) else 0) - (b[i] if i < len(b) else 0)) % p for i in range(n)])


def gf_mul(a, b, p):
    if not a or not b:
        return []
    out = [0] * (len(a) + len(b) - 1)
    for i, x in enumerate(a):
        if x:
            for j, y in enumerate(b):
                out[i + j] += x * y
    return gf_strip([c % p for c in out])


def gf_scale(a, c, p):
    return gf_strip([x * c % p for x in a])


def gf_divmod(a, b, p):
    if not b:
        raise ZeroDivisionError("division by zero polynomial mod p")
    r = list(a)
    db = len(b) - 1
    if len(r) - 1 < db:
        return [], r
    inv = pow(b[-1], -1, p)
    q = [0] * (len(r) - db)
    for k in range(len(r) - 1 - db, -1, -1):
        c = r[k + db] * inv % p
        q[k] = c
        if c:
            for j, y in enumerate(b):
                r[k + j] = (r[k + j] - c * y) % p
    return gf_strip(q), gf_strip(r[:db])


def gf_rem(a, b, p):
    return gf_divmod(a, b, p)[1]


def gf_quo(a, b, p):
    return gf_divmod(a, b, p)[0]


def gf_monic(a, p):
    if not a:
        return a
    return gf_scale(a, pow(a[-1], -1, p), p)


def gf_gcd(a, b, p):
    while b:
        a, b = b, gf_rem(a, b, p)
    return gf_monic(a, p)


def gf_xgcd(a, b, p):
    """Return ``(g, s, t)`` with ``s*a + t*b = g`` monic."""
    r0, r1, s0, s1, t0, t1 = a, b, [1], [], [], [1]
    while r1:
        q, r = gf_divmod(r0, r1, p)
        r0, r1 = r1, r
        s0, s1 = s1, gf_sub(s0, gf_mul(q, s1, p), p)
        t0, t1 = t1, gf_sub(t0, gf_mul(q, t1, p), p)
    inv = pow(r0[-1], -1, p)
    return gf_scale(r0, inv, p), gf_scale(s0, inv, p), gf_scale(t0, inv, p)


def gf_powmod(a, n, m, p):
    result, base = [1], gf_rem(a, m, p)
    while n:
        if n & 1:
            result = gf_rem(gf_mul(result, base, p), m, p)
        base = gf_rem(gf_mul(base, base, p), m, p)
        n >>= 1
    return result


def gf_deriv(a, p):
    return gf_strip([i * c % p for i, c in enumerate(a)][1:])


def gf_pow(a, n, p):
    result = [1]
    for _ in range(n):
        result = gf_mul(result, a, p)
    return result


def gf_sqf_list(f, p):
    """Squarefree decomposition of a monic ``f``: list of ``(factor, multiplicity)``."""
    n = 1
    factors = []
    f = list(f)
    while True:
        done = False
        F = gf_deriv(f, p)
        if F:
            g = gf_gcd(f, F, p)
            h = gf_quo(f, g, p)
            i = 1
            while h != [1]:
                G = gf_gcd(g, h, p)
                H = gf_quo(h, G, p)
                if len(H) > 1:
                    factors.append((H, i * n))
                g, h, i = gf_quo(g, G, p), G, i + 1
            if g == [1]:
                done = True
            else:
                f = g
        if done:
            break
        # f is now a p-th power; over F_p the coefficient roots are themselves
        d = (len(f) - 1) // p
        f = [f[i * p] for i in range(d + 1)]
        n *= p
    return factors


def gf_ddf(f, p):
    """Distinct-degree factorization of a monic squarefree ``f``."""
    out = []
    x = [0, 1]
    h = x
    i = 1
    f = list(f)
    while 2 * i <= len(f) - 1:
        h = gf_powmod(h, p, f, p)
        g = gf_gcd(f, gf_sub(h, x, p), p)
        if g != [1]:
            out.append((g, i))
            f = gf_quo(f, g, p)
            h = gf_rem(h, f, p)
        i += 1
    if len(f) > 1:
        out.append((f, len(f) - 1))
    return out


def gf_edf(f, d, p, rng: random.Random):
    """Cantor-Zassenhaus equal-degree splitting into degree-``d`` factors."""
    n = len(f) - 1
    if n == d:
        return [f]
    while True:
        a = gf_strip([rng.randrange(p) for _ in range(n)])
        if len(a) < 2:
            continue
        if p == 2:
            b = a
            t = a
            for _ in range(d - 1):
                t = gf_rem(gf_mul(t, t, p), f, p)
                b = gf_add(b, t, p)
        else:
            b = gf_sub(gf_powmod(a, (p**d - 1) // 2, f, p), [1], p)
        g = gf_gcd(f, b, p)
        if 0 < len(g) - 1 < n:
            return gf_edf(g, d, p, rng) + gf_edf(gf_quo(f, g, p), d, p, rng)


def gf_factor(f, p, seed: int = 0) -> list[tuple[list[int], int]]:
    """Monic irreducible factorization of a nonzero ``f`` (lc dropped)."""
    rng = random.Random(seed)
    f = gf_monic(list(f), p)
    found: dict[tuple, int] = {}
    for sq, mult in gf_sqf_list(f, p):
        for g, d in gf_ddf(sq, p):
            for h in gf_edf(g, d, p, rng):
                key = tuple(h)
                found[key] = found.get(key, 0) + mult
    return sorted(((list(k), m) for k, m in found.items()), key=lambda km: (len(km[0]), km[0][::-1]))


def factor_mod_p(f: Poly, p: int) -> list[tuple[Poly, int]]:
    """Distinct monic irreducible factors of ``f`` over F_p with multiplicities."""
    a = gf_from_poly(f, p)
    if not a:
        raise ValueError(f"polynomial vanishes identically mod {p}")
    return [(Poly(g), m) for g, m in gf_factor(a, p)]


# ------------------------------------------------------------- linear algebra


def determinant(rows: Sequence[Sequence]):
    """Determinant by Gaussian elimination over any exact field.

    Entries must support ``+ - * /`` and comparison with ``0``.
    """
    n = len(rows)
    if n == 0:
        return 1
    m = [list(r) for r in rows]
    if any(len(r) != n for r in m):
        raise ValueError("determinant of a non-square matrix")
    det = None
    sign = 1
    for col in range(n):
        pivot = next((r for r in range(col, n) if m[r][col] != 0), None)
        if pivot is None:
            return m[0][0] * 0
        if pivot != col:
            m[col], m[pivot] = m[pivot], m[col]
            sign = -sign
        piv = m[col][col]
        det = piv if det is None else det * piv
        for r in range(col + 1, n):
            if m[r][col] != 0:
                factor = m[r][col] / piv
                m[r] = [a - factor * b for a, b in zip(m[r], m[col])]
    return det if sign == 1 else -det
