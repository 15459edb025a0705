"""Midpoint-radius enclosures and certified complex root isolation.

A :class:`Ball` wraps an outward-rounded ``mpmath.iv`` interval; arithmetic
runs at the interval context's current precision, which callers set with
:func:`working_precision`.  :func:`refine` is the adaptive driver that reruns
a computation at doubled precision until its output is tight enough.
"""

from __future__ import annotations

import math
import os
from contextlib import contextmanager
from fractions import Fraction
from typing import Callable, Iterable

import mpmath
import numpy as np
from mpmath import iv, mpf

from .errors import PrecisionExhausted
from .exact import Poly, squarefree_decomposition

START_PREC = 64
DEFAULT_PREC_CAP = 8192
_IVMPF = type(iv.mpf(0))


def prec_cap() -> int:
    """Precision cap in bits; ``HEIGHTFORGE_PREC_CAP`` overrides the default."""
    env = os.environ.get("HEIGHTFORGE_PREC_CAP")
    return int(env) if env else DEFAULT_PREC_CAP


@contextmanager
def working_precision(bits: int):
    """Set the interval context precision for the duration of a block."""
    saved = iv.prec
    iv.prec = bits
    try:
        yield
    finally:
        iv.prec = saved


def _raw(t) -> mpf:
    # mpf(raw) would round to the mp context precision
    x = mpf.__new__(mpf)
    x._mpf_ = t
    return x


class InsufficientPrecision(Exception):
    """Raised inside a computation that should be retried at higher precision."""


def _interval(x) -> "iv.mpf":
    if isinstance(x, Ball):
        return x.iv
    if isinstance(x, int):
        return iv.mpf(x)
    if isinstance(x, Fraction):
        if x.denominator == 1:
            return iv.mpf(x.numerator)
        return iv.mpf(x.numerator) / iv.mpf(x.denominator)
    if isinstance(x, (float, mpf)) or hasattr(x, "_mpi_"):
        return iv.mpf(x)
    raise TypeError(f"cannot enclose {type(x).__name__}")


class Ball:
    """Real enclosure ``[lower, upper]`` presented as midpoint and radius."""

    __slots__ = ("iv",)

    def __init__(self, value=0):
        self.iv = value if isinstance(value, _IVMPF) else _interval(value)

    @classmethod
    def from_bounds(cls, lo, hi) -> Ball:
        return cls(iv.mpf([lo, hi]))

    @classmethod
    def from_mid_rad(cls, mid, rad) -> Ball:
        m = _interval(mid)
        r = _interval(rad)
        return cls(iv.mpf([(m - r).a, (m + r).b]))

    @property
    def lower(self) -> mpf:
        return _raw(self.iv._mpi_[0])

    @property
    def upper(self) -> mpf:
        return _raw(self.iv._mpi_[1])

    @property
    def mid(self) -> mpf:
        return mpmath.ldexp(mpmath.fadd(self.lower, self.upper, exact=True), -1)

    @property
    def rad(self) -> mpf:
        with mpmath.workprec(64):
            return mpmath.fsub(self.upper, self.lower, rounding="u") / 2

    @property
    def width(self) -> mpf:
        return 2 * self.rad

    def is_exact_zero(self) -> bool:
        return self.lower == 0 and self.upper == 0

    def contains(self, x) -> bool:
        if isinstance(x, (int, Fraction)):
            return mpf_to_fraction(self.lower) <= x <= mpf_to_fraction(self.upper)
        v = _interval(x)
        return self.lower <= _raw(v._mpi_[0]) and _raw(v._mpi_[1]) <= self.upper

    def contains_zero(self) -> bool:
        return self.lower <= 0 <= self.upper

    def overlaps(self, other) -> bool:
        o = other if isinstance(other, Ball) else Ball(other)
        return self.lower <= o.upper and o.lower <= self.upper

    def __float__(self) -> float:
        return float(self.mid)

    def __repr__(self) -> str:
        return f"Ball({mpmath.nstr(self.mid, 20)} +/- {mpmath.nstr(self.rad, 3)})"

    def _wrap(self, other):
        try:
            return _interval(other)
        except TypeError:
            return None

    def __add__(self, other):
        o = self._wrap(other)
        return NotImplemented if o is None else Ball(self.iv + o)

    __radd__ = __add__

    def __sub__(self, other):
        o = self._wrap(other)
        return NotImplemented if o is None else Ball(self.iv - o)

    def __rsub__(self, other):
        o = self._wrap(other)
        return NotImplemented if o is None else Ball(o - self.iv)

    def __mul__(self, other):
        o = self._wrap(other)
        return NotImplemented if o is None else Ball(self.iv * o)

    __rmul__ = __mul__

    def __truediv__(self, other):
        o = self._wrap(other)
        if o is None:
            return NotImplemented
        if _raw(o._mpi_[0]) <= 0 <= _raw(o._mpi_[1]):
            raise ZeroDivisionError("divisor enclosure contains 0")
        return Ball(self.iv / o)

    def __rtruediv__(self, other):
        o = self._wrap(other)
        if o is None:
            return NotImplemented
        return Ball(o) / self

    def __neg__(self):
        return Ball(-self.iv)

    def __pow__(self, e):
        if isinstance(e, int):
            if e < 0:
                return Ball(1) / (self**-e)
            return Ball(self.iv**e)
        return self.rpow(Fraction(e))

    def rpow(self, e: Fraction) -> Ball:
        """``x**e`` for rational ``e``; needs a positive enclosure unless x is exactly 0."""
        e = Fraction(e)
        if e.denominator == 1:
            return self ** e.numerator
        if self.is_exact_zero() and e > 0:
            return Ball(0)
        if self.lower <= 0:
            raise ValueError("rational power of an enclosure touching <= 0")
        return Ball(iv.exp(iv.log(self.iv) * _interval(e)))

    def sqrt(self) -> Ball:
        if self.lower < 0:
            raise ValueError("square root of an enclosure reaching below 0")
        return Ball(iv.sqrt(self.iv))

    def __abs__(self) -> Ball:
        lo, hi = self.lower, self.upper
        if lo >= 0:
            return self
        if hi <= 0:
            return -self
        return Ball(iv.mpf([0, max(-lo, hi)]))

    def log(self) -> Ball:
        if self.lower <= 0:
            raise ValueError("log of an enclosure touching <= 0")
        return Ball(iv.log(self.iv))


def ball_max(*items) -> Ball:
    """Enclosure of the pointwise maximum."""
    bs = [b if isinstance(b, Ball) else Ball(b) for b in items]
    lo = max(b.lower for b in bs)
    hi = max(b.upper for b in bs)
    return Ball(iv.mpf([lo, hi]))


def ball_product(items: Iterable) -> Ball:
    out = Ball(1)
    for b in items:
        out = out * b
    return out


class ComplexBall:
    """Rectangular complex enclosure."""

    __slots__ = ("real", "imag")

    def __init__(self, real, imag=0):
        self.real = real if isinstance(real, Ball) else Ball(real)
        self.imag = imag if isinstance(imag, Ball) else Ball(imag)

    @classmethod
    def from_mpc(cls, z, rad=0) -> ComplexBall:
        if not isinstance(z, mpmath.mpc):
            z = mpmath.mpc(z)
        if rad:
            return cls(Ball.from_mid_rad(z.real, rad), Ball.from_mid_rad(z.imag, rad))
        return cls(Ball(iv.mpf(z.real)), Ball(iv.mpf(z.imag)))

    @property
    def mid(self) -> mpmath.mpc:
        return mpmath.mpc(self.real.mid, self.imag.mid)

    @property
    def rad(self) -> mpf:
        return max(self.real.rad, self.imag.rad)

    def is_real(self) -> bool:
        return self.imag.is_exact_zero()

    def conjugate(self) -> ComplexBall:
        return ComplexBall(self.real, -self.imag)

    def _coerce(self, other):
        if isinstance(other, ComplexBall):
            return other
        if isinstance(other, (Ball, int, Fraction)):
            return ComplexBall(other)
        return None

    def __add__(self, other):
        o = self._coerce(other)
        if o is None:
            return NotImplemented
        return ComplexBall(self.real + o.real, self.imag + o.imag)

    __radd__ = __add__

    def __sub__(self, other):
        o = self._coerce(other)
        if o is None:
            return NotImplemented
        return ComplexBall(self.real - o.real, self.imag - o.imag)

    def __rsub__(self, other):
        return (-self) + other

    def __neg__(self):
        return ComplexBall(-self.real, -self.imag)

    def __mul__(self, other):
        o = self._coerce(other)
        if o is None:
            return NotImplemented
        if o.is_real():
            return ComplexBall(self.real * o.real, self.imag * o.real)
        if self.is_real():
            return ComplexBall(self.real * o.real, self.real * o.imag)
        return ComplexBall(
            self.real * o.real - self.imag * o.imag,
            self.real * o.imag + self.imag * o.real,
        )

    __rmul__ = __mul__

    def abs2(self) -> Ball:
        return Ball(self.real.iv**2 + self.imag.iv**2)

    def __truediv__(self, other):
        o = self._coerce(other)
        if o is None:
            return NotImplemented
        if o.is_real():
            return ComplexBall(self.real / o.real, self.imag / o.real)
        den = o.abs2()
        num = self * o.conjugate()
        return ComplexBall(num.real / den, num.imag / den)

    def __abs__(self) -> Ball:
        if self.is_real():
            return abs(self.real)
        return self.abs2().sqrt()

    def __pow__(self, n: int):
        if n < 0:
            return ComplexBall(1) / (self ** -n)
        out, base = ComplexBall(1), self
        while n:
            if n & 1:
                out = out * base
            base = base * base
            n >>= 1
        return out

    def __repr__(self) -> str:
        return f"ComplexBall({self.real!r}, {self.imag!r})"


def refine(
    compute: Callable[[int], Ball],
    target_radius: float,
    start_prec: int = START_PREC,
    cap: int | None = None,
) -> Ball:
    """Rerun ``compute(prec)`` with doubling precision until its radius is small enough.

    ``compute`` may raise :class:`InsufficientPrecision` to request a retry.
    """
    cap = prec_cap() if cap is None else cap
    prec = start_prec
    last = None
    while prec <= cap:
        with working_precision(prec):
            try:
                out = compute(prec)
            except InsufficientPrecision:
                out = None
        if out is not None:
            last = out
            if out.rad <= target_radius:
                return out
        prec *= 2
    detail = f"; last radius {mpmath.nstr(last.rad, 3)}" if last is not None else ""
    raise PrecisionExhausted(
        f"radius {target_radius:g} not reached within {cap} bits{detail}"
    )


# ------------------------------------------------------------ root isolation


def _aberth_float(coeffs: list[complex], n: int, iters: int = 500) -> np.ndarray:
    a = np.array(coeffs[::-1], dtype=complex)  # high degree first
    da = np.polyder(a)
    scale = max(abs(complex(c)) for c in coeffs[:-1]) / abs(coeffs[-1])
    radius = min(1 + scale, max(1e-3, abs(coeffs[0] / coeffs[-1]) ** (1 / n) if coeffs[0] else 1.0))
    radius = max(radius, 0.5)
    k = np.arange(n)
    z = radius * np.exp(1j * (2 * np.pi * k / n + 0.4))
    for _ in range(iters):
        pz = np.polyval(a, z)
        dz = np.polyval(da, z)
        with np.errstate(all="ignore"):
            ratio = pz / dz
            diff = z[:, None] - z[None, :]
            np.fill_diagonal(diff, 1)
            inv = 1 / diff
            np.fill_diagonal(inv, 0)
            s = inv.sum(axis=1)
            w = ratio / (1 - ratio * s)
        w = np.where(np.isfinite(w), w, 0)
        z = z - w
        if np.all(np.abs(w) <= 1e-15 * np.maximum(1, np.abs(z))):
            break
    return z


def _aberth_mp(f: Poly, z: list, prec: int) -> list:
    n = f.degree
    df = f.derivative()
    fc = [mpf(c.numerator) / c.denominator if isinstance(c, Fraction) else mpf(c) for c in f.coeffs]
    dfc = [mpf(c.numerator) / c.denominator if isinstance(c, Fraction) else mpf(c) for c in df.coeffs]
    tol = mpf(2) ** (-prec + 4)
    for _ in range(4 * int(math.log2(prec)) + 20):
        new = []
        biggest = mpf(0)
        for i in range(n):
            zi = z[i]
            pz = mpmath.polyval(fc[::-1], zi)
            dz = mpmath.polyval(dfc[::-1], zi)
            if pz == 0:
                new.append(zi)
                continue
            ratio = pz / dz if dz != 0 else mpf(0)
            s = mpmath.fsum(1 / (zi - z[j]) for j in range(n) if j != i)
            den = 1 - ratio * s
            w = ratio / den if den != 0 else ratio
            new.append(zi - w)
            biggest = max(biggest, abs(w) / max(1, abs(zi)))
        z = new
        if biggest <= tol:
            break
    return z


def _inclusion_radii(f: Poly, z: list) -> list:
    """Certified radii: each root lies in a disc about z_i of radius n*|W_i|."""
    n = f.degree
    centers = [ComplexBall.from_mpc(zi) for zi in z]
    lead = Ball(f.lc)
    radii = []
    for i, ci in enumerate(centers):
        val = f(ci)
        if isinstance(val, (int, Fraction)):
            val = ComplexBall(val)
        den = ComplexBall(lead)
        for j, cj in enumerate(centers):
            if j != i:
                den = den * (ci - cj)
        try:
            w = abs(val) / abs(den)
        except (ZeroDivisionError, ValueError):
            raise InsufficientPrecision("coincident approximations")
        radii.append(w.upper * n)
    return radii


def mpf_to_fraction(x: mpf) -> Fraction:
    if not isinstance(x, mpf):
        x = mpf(x)
    sign, man, exp, _ = x._mpf_
    if not man:
        return Fraction(0)
    value = Fraction(int(man)) * Fraction(2) ** int(exp)
    return -value if sign else value


def _isolate_squarefree(f: Poly, prec: int) -> list[ComplexBall]:
    n = f.degree
    if n == 1:
        r = Fraction(-f[0]) / f[1]
        return [ComplexBall(Ball(r), Ball(0))]
    fl = [complex(float(c)) for c in f.coeffs]
    z0 = _aberth_float(fl, n)
    with mpmath.workprec(prec + 16):
        z = _aberth_mp(f, [mpmath.mpc(complex(c)) for c in z0], prec + 16)
        radii = _inclusion_radii(f, z)
        # symmetrize: snap near-real roots onto the axis, mirror the upper half
        real, upper, lower = [], [], []
        for zi, ri in zip(z, radii):
            if abs(zi.imag) <= ri:
                real.append(mpmath.mpc(zi.real, 0))
            elif zi.imag > 0:
                upper.append(zi)
            else:
                lower.append(zi)
        if len(upper) != len(lower):
            raise InsufficientPrecision("conjugate pairing failed")
        z = real + upper + [mpmath.conj(u) for u in upper]
        radii = _inclusion_radii(f, z)
        for i in range(n):
            for j in range(i + 1, n):
                gap = abs(z[i] - z[j])
                if gap <= (radii[i] + radii[j]) * (1 + mpf(2) ** (-prec)):
                    raise InsufficientPrecision("inclusion discs overlap")
        out = []
        for i, (zi, ri) in enumerate(zip(z, radii)):
            if i < len(real):
                c = mpf_to_fraction(zi.real)
                if ri > 0 or f(c) != 0:
                    lo, hi = c - mpf_to_fraction(ri), c + mpf_to_fraction(ri)
                    if not f(lo) * f(hi) < 0:
                        raise InsufficientPrecision("no sign change on a real disc")
                out.append(ComplexBall(Ball.from_mid_rad(zi.real, ri), Ball(0)))
            else:
                if abs(zi.imag) <= ri:
                    raise InsufficientPrecision("complex disc touches the real axis")
                out.append(ComplexBall.from_mpc(zi, ri))
        return sorted(out, key=_root_key)


def _root_key(b: ComplexBall):
    return (float(b.real.mid), float(b.imag.mid))


def isolate_roots_at(f: Poly, prec: int) -> list[ComplexBall]:
    """One isolation attempt at ``prec`` bits; ``f`` must be squarefree."""
    if f.degree < 1:
        raise ValueError("constant polynomial has no roots")
    return _isolate_squarefree(f, prec)


def isolate_roots(f: Poly, target_radius: float = 1e-10, cap: int | None = None) -> list[ComplexBall]:
    """Certified, pairwise disjoint enclosures of all roots of a squarefree ``f``."""
    if f.degree < 1:
        raise ValueError("constant polynomial has no roots")
    sqf = squarefree_decomposition(f)
    if len(sqf) != 1 or sqf[0][1] != 1:
        raise ValueError("isolate_roots requires a squarefree polynomial")
    cap = prec_cap() if cap is None else cap
    prec = START_PREC
    while prec <= cap:
        with working_precision(prec):
            try:
                roots = _isolate_squarefree(f, prec)
            except InsufficientPrecision:
                roots = None
        if roots is not None and all(r.rad <= target_radius for r in roots):
            return roots
        prec *= 2
    raise PrecisionExhausted(f"root isolation did not reach radius {target_radius:g} within {cap} bits")
