"""Weil height, Mahler measure, projective heights and subspace heights.

Every height is a product of local factors.  Finite factors are exact prime
powers collected in a :class:`~heightforge.places.PowerProduct`; Archimedean
factors are Ball enclosures recomputed at increasing precision until the
product meets the requested radius.
"""

from __future__ import annotations

from dataclasses import dataclass
from itertools import combinations
from math import comb
from typing import Iterable, Sequence

import sympy

from .ball import Ball, ball_max, isolate_roots_at, refine
from .errors import DependentBasis
from .exact import Poly, content_primitive, determinant, squarefree_decomposition
from .field import FieldElement, NumberField, field_from_minpoly
from .places import (
    PPower,
    PowerProduct,
    abs_value,
    archimedean_places,
    candidate_finite_places,
    finite_places_above,
)

DEFAULT_RADIUS = 1e-10


@dataclass(frozen=True)
class ProjectiveVector:
    field: NumberField
    coords: tuple[FieldElement, ...]

    def __post_init__(self):
        if not self.coords:
            raise ValueError("a projective vector needs at least one coordinate")
        if all(c.is_zero() for c in self.coords):
            raise ValueError("the zero vector has no projective height")
        if any(c.field != self.field for c in self.coords):
            raise ValueError("all coordinates must lie in the same field")

    @classmethod
    def of(cls, field: NumberField, values: Iterable) -> ProjectiveVector:
        return cls(field, tuple(field(v) for v in values))

    def __len__(self) -> int:
        return len(self.coords)

    def scale(self, lam: FieldElement) -> ProjectiveVector:
        return ProjectiveVector(self.field, tuple(lam * c for c in self.coords))

    def nonzero(self) -> list[FieldElement]:
        return [c for c in self.coords if not c.is_zero()]


@dataclass(frozen=True)
class WedgeVector:
    """Coordinates of ``w_1 ^ ... ^ w_M`` in the basis ``e_I``, ``I`` ascending."""

    field: NumberField
    N: int
    M: int
    coords: dict

    def __post_init__(self):
        if len(self.coords) != comb(self.N, self.M):
            raise ValueError("wrong number of wedge coordinates")

    def index_sets(self) -> list[tuple[int, ...]]:
        return list(self.coords)

    def is_zero(self) -> bool:
        return all(c.is_zero() for c in self.coords.values())

    def as_projective(self) -> ProjectiveVector:
        return ProjectiveVector(self.field, tuple(self.coords.values()))


def index_sets(N: int, M: int) -> list[tuple[int, ...]]:
    """The M-subsets of {1..N} in lexicographic order."""
    return list(combinations(range(1, N + 1), M))


@dataclass
class LocalFactor:
    place: str
    value: object  # Ball or PPower


@dataclass
class HeightReport:
    value: Ball
    archimedean: list[LocalFactor]
    finite: list[LocalFactor]


# --------------------------------------------------------------------- local


def local_projective_height(a: ProjectiveVector, v, normalized: bool = True):
    """``max_i |a_i|_v``; exact at finite places, a Ball at the current precision otherwise."""
    values = [abs_value(c, v, normalized) for c in a.nonzero()]
    if isinstance(values[0], PPower):
        return max(values)
    return ball_max(*values)


def _finite_parts(a: ProjectiveVector) -> list[LocalFactor]:
    out = []
    for p in candidate_finite_places(a.coords):
        for v in finite_places_above(a.field, p):
            out.append(LocalFactor(v.id, local_projective_height(a, v)))
    return out


def projective_height_report(a: ProjectiveVector, target_radius: float = DEFAULT_RADIUS) -> HeightReport:
    finite = _finite_parts(a)
    exact = PowerProduct.of(f.value for f in finite)
    arch_places = archimedean_places(a.field)
    arch: list[LocalFactor] = []

    def compute(prec):
        arch.clear()
        out = exact.to_ball()
        for v in arch_places:
            h = local_projective_height(a, v)
            arch.append(LocalFactor(v.id, h))
            out = out * h
        return out

    value = refine(compute, target_radius)
    return HeightReport(value, list(arch), finite)


def projective_height(a: ProjectiveVector, target_radius: float = DEFAULT_RADIUS) -> Ball:
    """``H(a) = prod_v max_i |a_i|_v`` with max norms at every place."""
    return projective_height_report(a, target_radius).value


# --------------------------------------------------------------- Weil height


def _as_field_element(alpha) -> FieldElement:
    if isinstance(alpha, FieldElement):
        return alpha
    if isinstance(alpha, Poly):
        return field_from_minpoly(alpha)[1]
    raise TypeError("expected a FieldElement or an irreducible integer polynomial")


def weil_height_report(alpha, target_radius: float = DEFAULT_RADIUS) -> HeightReport:
    alpha = _as_field_element(alpha)
    K = alpha.field
    if alpha.is_zero():
        return HeightReport(Ball(1), [], [])
    finite = []
    for p in candidate_finite_places([alpha]):
        for v in finite_places_above(K, p):
            finite.append(LocalFactor(v.id, max(PPower.one(p), abs_value(alpha, v))))
    exact = PowerProduct.of(f.value for f in finite)
    arch_places = archimedean_places(K)
    arch: list[LocalFactor] = []

    def compute(prec):
        arch.clear()
        out = exact.to_ball()
        for v in arch_places:
            m = ball_max(1, abs_value(alpha, v))
            arch.append(LocalFactor(v.id, m))
            out = out * m
        return out

    value = refine(compute, target_radius)
    return HeightReport(value, list(arch), finite)


def weil_height(alpha, target_radius: float = DEFAULT_RADIUS) -> Ball:
    """Absolute multiplicative Weil height ``prod_v max{1, |alpha|_v}``.

    ``alpha`` is a field element, or an irreducible integer polynomial
    standing for any one of its roots.
    """
    return weil_height_report(alpha, target_radius).value


# ------------------------------------------------------------ Mahler measure


def _primitive(f: Poly) -> Poly:
    if f.degree < 1:
        raise ValueError("Mahler measure of a constant polynomial is not defined here")
    _, g = content_primitive(f)
    return g


def mahler_measure(f: Poly, target_radius: float = DEFAULT_RADIUS) -> Ball:
    """``|lc| * prod max(1, |root|)`` over the roots of the primitive part of ``f``."""
    g = _primitive(f)
    parts = squarefree_decomposition(g)

    def compute(prec):
        out = Ball(abs(g.lc))
        for h, mult in parts:
            if h.degree < 1:
                continue
            for r in isolate_roots_at(h, prec):
                out = out * ball_max(1, abs(r)) ** mult
        return out

    return refine(compute, target_radius)


def mahler_measure_via_heights(f: Poly, target_radius: float = DEFAULT_RADIUS) -> Ball:
    """``prod_k h(alpha_k)`` over the roots of ``f`` with multiplicity.

    Each irreducible factor ``g`` contributes ``h(alpha)**deg g`` computed
    through the places of Q(alpha).
    """
    g = _primitive(f)
    expr = sympy.Poly(list(reversed(g.coeffs)), sympy.Symbol("x"))
    _, factors = expr.factor_list()
    out = Ball(1)
    for fac, mult in factors:
        q = Poly(int(c) for c in reversed(fac.all_coeffs()))
        _, q = content_primitive(q)
        if q.lc < 0:
            q = -q
        K, alpha = _irreducible_field(q)
        h = weil_height(alpha, target_radius / (4 * g.degree))
        out = out * h ** (q.degree * mult)
    return out


def _irreducible_field(q: Poly) -> tuple[NumberField, FieldElement]:
    # irreducibility comes from the factorization over Q
    a = q.lc
    n = q.degree
    G = Poly(q[i] * a ** (n - 1 - i) for i in range(n)) + Poly([0] * n + [1])
    K = NumberField(G, check=False)
    return K, K.gen / a


# ---------------------------------------------------------- subspace heights


def _coords(w) -> Sequence[FieldElement]:
    return w.coords if isinstance(w, ProjectiveVector) else w


def minors(rows: Sequence[Sequence[FieldElement]], field: NumberField) -> dict:
    """Maximal minors indexed by ascending column sets, rows in the given order.

    Shared by wedge coordinates and the exterior power of a linear map so both
    use one sign convention.
    """
    M = len(rows)
    N = len(rows[0])
    if any(len(r) != N for r in rows):
        raise ValueError("rows have different lengths")
    if M > N:
        raise ValueError(f"{M} rows cannot be independent in dimension {N}")
    out = {}
    for I in index_sets(N, M):
        out[I] = field(determinant([[r[i - 1] for i in I] for r in rows]))
    return out


def wedge_coordinates(basis: Sequence[ProjectiveVector], field: NumberField | None = None) -> WedgeVector:
    """All M x M minors of the basis matrix, columns ascending, rows as given."""
    if not basis:
        raise ValueError("empty basis")
    K = field or basis[0].field
    rows = [[K(c) for c in _coords(w)] for w in basis]
    return WedgeVector(K, len(rows[0]), len(rows), minors(rows, K))


def subspace_height(basis: Sequence[ProjectiveVector], target_radius: float = DEFAULT_RADIUS) -> Ball:
    """Height of the subspace spanned by ``basis`` via its Pluecker coordinates."""
    w = wedge_coordinates(basis)
    if w.is_zero():
        raise DependentBasis("basis vectors are linearly dependent")
    return projective_height(w.as_projective(), target_radius)
