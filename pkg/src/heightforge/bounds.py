"""Height lower bounds on X(F) from an auxiliary T congruent to F modulo m.

If ``T = F mod m`` and ``a`` lies on ``F = 0`` but not on ``T = 0`` then

    H(a)**deg F >= m / L1(T),

where ``L1(T)`` is the sum of the absolute values of the coefficients of T.
"""

from __future__ import annotations

import warnings
from dataclasses import dataclass
from fractions import Fraction

from .ball import Ball, mpf_to_fraction
from .errors import BoundInapplicable, CongruenceFailure, NotOnVariety
from .field import NumberField
from .functionals import HomogeneousPoly
from .heights import ProjectiveVector, projective_height


class TrivialBoundWarning(UserWarning):
    """The bound does not exceed 1, so it says nothing beyond H >= 1."""


def _integer_coefficients(P: HomogeneousPoly) -> dict:
    out = {}
    for e, c in P.terms.items():
        if not c.is_rational() or c.to_rational().denominator != 1:
            raise ValueError(f"coefficient {c} is not a rational integer")
        out[e] = c.to_rational().numerator
    return out


def _same_shape(F: HomogeneousPoly, T: HomogeneousPoly):
    if (F.num_vars, F.degree) != (T.num_vars, T.degree):
        raise ValueError(
            f"F has {F.num_vars} variables and degree {F.degree}, "
            f"T has {T.num_vars} variables and degree {T.degree}"
        )


def check_congruence(F: HomogeneousPoly, T: HomogeneousPoly, m: int) -> bool:
    """True iff every coefficient of ``T - F`` is divisible by ``m``."""
    _same_shape(F, T)
    if m == 0:
        raise ValueError("modulus must be a nonzero integer")
    f, t = _integer_coefficients(F), _integer_coefficients(T)
    return all((t.get(e, 0) - f.get(e, 0)) % m == 0 for e in set(f) | set(t))


def l1_infty(T: HomogeneousPoly) -> int:
    """Sum of the absolute values of the (integer) coefficients of T."""
    if T.is_zero():
        raise ValueError("L1 norm of the zero polynomial is not a valid bound denominator")
    return sum(abs(c) for c in _integer_coefficients(T).values())


def height_lower_bound(F: HomogeneousPoly, T: HomogeneousPoly, m: int) -> Fraction:
    """``m / L1(T)``, a lower bound for ``H(a)**deg F`` on X(F) minus X(T)."""
    if not check_congruence(F, T, m):
        raise CongruenceFailure(f"T is not congruent to F modulo {m}")
    bound = Fraction(abs(m), l1_infty(T))
    if bound <= 1:
        warnings.warn(f"bound {bound} <= 1 is trivial", TrivialBoundWarning, stacklevel=2)
    return bound


def over_field(P: HomogeneousPoly, K: NumberField) -> HomogeneousPoly:
    """The same rational polynomial with coefficients viewed in K."""
    return HomogeneousPoly(K, P.num_vars, P.degree, {e: K(c.to_rational()) for e, c in P.terms.items()})


@dataclass
class PointReport:
    bound: Fraction
    height_power: Ball
    degree: int
    passed: bool
    tight: bool


def verify_point(a: ProjectiveVector, F: HomogeneousPoly, T: HomogeneousPoly, m: int, tolerance: float = 1e-10) -> PointReport:
    """Check the bound at one point of X(F) outside X(T); membership is decided exactly."""
    _same_shape(F, T)
    if len(a) != F.num_vars:
        raise ValueError(f"point has {len(a)} coordinates, F has {F.num_vars} variables")
    K = a.field
    if not over_field(F, K)(a.coords).is_zero():
        raise NotOnVariety("F(a) != 0")
    if over_field(T, K)(a.coords).is_zero():
        raise BoundInapplicable("T(a) = 0, the point lies on X(T)")
    with warnings.catch_warnings():
        warnings.simplefilter("ignore", TrivialBoundWarning)
        bound = height_lower_bound(F, T, m)
    H = projective_height(a, tolerance / (4 * max(1, F.degree) * float(bound)))
    value = H ** F.degree
    passed = mpf_to_fraction(value.upper) >= bound - Fraction(tolerance)
    tight = value.contains(bound)
    return PointReport(bound, value, F.degree, passed, tight)
