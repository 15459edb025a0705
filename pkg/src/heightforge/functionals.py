"""Sup norms, quotient norms U_v and the global identities they satisfy.

``U_v(a, T)`` is computed from its closed form ``|T(a)|_v / H_v(a)**M``.  The
infimum that defines it is only exercised by the witness oracle and by the
tests, which compare the closed form against ``nu_v(T - f)`` for explicit
``f`` vanishing at ``a``.

Sup norms: at a finite place the sup over the unit polydisc is the Gauss
norm (largest coefficient).  At an Archimedean place the sup lives on the
torus ``|z_i| = 1`` by the maximum modulus principle and is bracketed by a
branch-and-bound search over phases, see :func:`sup_norm_arch`.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field as dc_field
from fractions import Fraction
from itertools import combinations_with_replacement
from typing import Iterable, Sequence

import numpy as np

from .ball import Ball, ball_max, refine, working_precision
from .errors import (
    DependentBasis,
    KernelMeetsSubspace,
    PrecisionExhausted,
    TVanishesAtPoint,
)
from .exact import Poly
from .field import FieldElement, NumberField
from .heights import (
    DEFAULT_RADIUS,
    ProjectiveVector,
    WedgeVector,
    local_projective_height,
    minors,
    wedge_coordinates,
    weil_height,
)
from .places import (
    ArchimedeanPlace,
    FinitePlace,
    PPower,
    PowerProduct,
    abs_value,
    all_places,
    candidate_finite_places,
)

SUP_GRID = 64
SUP_MAX_VARS = 3
SUP_CELL_BUDGET = 4_000_000
SUP_BATCH = 50_000


# --------------------------------------------------------------------- types


@dataclass(frozen=True)
class HomogeneousPoly:
    """Homogeneous polynomial in ``num_vars`` variables; ``terms`` maps exponent tuples to coefficients."""

    field: NumberField
    num_vars: int
    degree: int
    terms: dict = dc_field(hash=False)

    def __post_init__(self):
        clean = {}
        for e, c in self.terms.items():
            e = tuple(int(x) for x in e)
            if len(e) != self.num_vars or any(x < 0 for x in e):
                raise ValueError(f"bad exponent vector {e}")
            if sum(e) != self.degree:
                raise ValueError(f"monomial {e} does not have degree {self.degree}")
            c = self.field(c)
            if not c.is_zero():
                clean[e] = clean[e] + c if e in clean else c
                if clean[e].is_zero():
                    del clean[e]
        object.__setattr__(self, "terms", dict(sorted(clean.items(), reverse=True)))

    @classmethod
    def monomial(cls, field: NumberField, exponents: Sequence[int], coeff=1) -> HomogeneousPoly:
        return cls(field, len(exponents), sum(exponents), {tuple(exponents): coeff})

    def is_zero(self) -> bool:
        return not self.terms

    def coefficients(self) -> list[FieldElement]:
        return list(self.terms.values())

    def __call__(self, point: Sequence) -> FieldElement:
        if len(point) != self.num_vars:
            raise ValueError("point has the wrong number of coordinates")
        out = self.field.zero
        for e, c in self.terms.items():
            term = c
            for x, k in zip(point, e):
                if k:
                    term = term * x**k
            out = out + term
        return out

    def _check(self, other: HomogeneousPoly):
        if (self.field, self.num_vars, self.degree) != (other.field, other.num_vars, other.degree):
            raise ValueError("polynomials live in different spaces")

    def __add__(self, other: HomogeneousPoly) -> HomogeneousPoly:
        self._check(other)
        terms = dict(self.terms)
        for e, c in other.terms.items():
            terms[e] = terms[e] + c if e in terms else c
        return HomogeneousPoly(self.field, self.num_vars, self.degree, terms)

    def __neg__(self) -> HomogeneousPoly:
        return self.scale(-1)

    def __sub__(self, other: HomogeneousPoly) -> HomogeneousPoly:
        return self + (-other)

    def scale(self, c) -> HomogeneousPoly:
        c = self.field(c)
        return HomogeneousPoly(self.field, self.num_vars, self.degree, {e: c * x for e, x in self.terms.items()})

    def __mul__(self, other: HomogeneousPoly) -> HomogeneousPoly:
        if not isinstance(other, HomogeneousPoly):
            return self.scale(other)
        if self.num_vars != other.num_vars:
            raise ValueError("polynomials in different numbers of variables")
        terms: dict = {}
        for e1, c1 in self.terms.items():
            for e2, c2 in other.terms.items():
                e = tuple(a + b for a, b in zip(e1, e2))
                terms[e] = terms[e] + c1 * c2 if e in terms else c1 * c2
        return HomogeneousPoly(self.field, self.num_vars, self.degree + other.degree, terms)

    def __str__(self) -> str:
        if not self.terms:
            return "0"
        out = ""
        for e, c in self.terms.items():
            mono = "*".join(f"x{i + 1}" + (f"^{k}" if k > 1 else "") for i, k in enumerate(e) if k)
            if c.is_rational():
                r = c.to_rational()
                sign, r = ("-", -r) if r < 0 else ("+", r)
                coeff = "" if r == 1 and mono else str(r)
            else:
                sign, coeff = "+", f"({c})"
            body = "*".join(x for x in (coeff, mono) if x)
            out += (f" {sign} " if out else ("-" if sign == "-" else "")) + body
        return out


def monomials(num_vars: int, degree: int) -> list[tuple[int, ...]]:
    out = []
    for combo in combinations_with_replacement(range(num_vars), degree):
        e = [0] * num_vars
        for i in combo:
            e[i] += 1
        out.append(tuple(e))
    return out


@dataclass(frozen=True)
class LinearFunctional:
    field: NumberField
    coefficients: tuple[FieldElement, ...]

    @classmethod
    def of(cls, field: NumberField, values: Iterable) -> LinearFunctional:
        return cls(field, tuple(field(v) for v in values))

    def __len__(self) -> int:
        return len(self.coefficients)

    def __call__(self, x) -> FieldElement:
        coords = getattr(x, "coords", x)
        if isinstance(coords, dict):
            coords = list(coords.values())
        if len(coords) != len(self.coefficients):
            raise ValueError("functional and vector have different dimensions")
        out = self.field.zero
        for c, a in zip(self.coefficients, coords):
            out = out + c * a
        return out


@dataclass(frozen=True)
class LinearMap:
    """An M x N matrix acting on column vectors of K^N."""

    field: NumberField
    rows: tuple[tuple[FieldElement, ...], ...]

    @classmethod
    def of(cls, field: NumberField, rows: Iterable[Iterable]) -> LinearMap:
        return cls(field, tuple(tuple(field(c) for c in r) for r in rows))

    @property
    def shape(self) -> tuple[int, int]:
        return len(self.rows), len(self.rows[0])

    def __call__(self, x) -> list[FieldElement]:
        coords = x.coords if isinstance(x, ProjectiveVector) else x
        return [LinearFunctional(self.field, r)(coords) for r in self.rows]

    def is_surjective(self) -> bool:
        return any(not c.is_zero() for c in minors(self.rows, self.field).values())


# ----------------------------------------------------------------- sup norms


def _zero_like(v):
    return PPower.zero(v.p) if isinstance(v, FinitePlace) else Ball(0)


def sup_norm_finite(T: HomogeneousPoly, v: FinitePlace) -> PPower:
    """Gauss norm: the largest normalized absolute value of a coefficient."""
    if T.is_zero():
        return PPower.zero(v.p)
    return max(abs_value(c, v) for c in T.coefficients())


def _embedded_coefficients(T: HomogeneousPoly, v: ArchimedeanPlace):
    with working_precision(128):
        root = v.root()
        out = []
        for e, c in T.terms.items():
            z = c.evaluate(root)
            mid = complex(z.mid)
            err = float(z.rad) + abs(mid) * 2.0**-52
            out.append((e, mid, err))
    return out


def _torus_square(terms):
    """Fourier coefficients of ``|T(e^{i phi})|^2`` with the last phase fixed at 0."""
    G: dict = {}
    for e1, c1, _ in terms:
        for e2, c2, _ in terms:
            m = tuple(a - b for a, b in zip(e1[:-1], e2[:-1]))
            G[m] = G.get(m, 0) + c1 * c2.conjugate()
    freqs = np.array(list(G), dtype=float).reshape(len(G), -1)
    coeffs = np.array(list(G.values()), dtype=complex)
    return freqs, coeffs


def _eval_square(centers, freqs, coeffs):
    """Values and gradients of the real trigonometric polynomial at many points."""
    vals = np.empty(len(centers))
    grads = np.empty_like(centers)
    for s in range(0, len(centers), SUP_BATCH):
        E = np.exp(1j * (centers[s : s + SUP_BATCH] @ freqs.T)) * coeffs
        vals[s : s + SUP_BATCH] = E.sum(axis=1).real
        grads[s : s + SUP_BATCH] = (E @ (1j * freqs)).real
    return vals, grads


def torus_sup_bounds(terms, tolerance: float) -> tuple[float, float]:
    """Bracket ``sup |T|`` over the unit polydisc, for ``T`` given by float coefficients.

    Homogeneity lets one phase be fixed, so the search runs over N-1 phases.
    Each cell of half-width ``delta`` around ``c`` is bounded by the second
    order estimate ``g(c) + delta*|grad g(c)|_1 + delta**2 * S2 / 2`` for
    ``g = |T|^2``, where ``S2`` bounds every directional second derivative.
    Cells that cannot beat the best sampled value are discarded.
    """
    if not terms:
        return 0.0, 0.0
    coef_err = sum(err for _, _, err in terms)
    l1 = sum(abs(c) for _, c, _ in terms)
    D = len(terms[0][0]) - 1
    freqs, coeffs = _torus_square(terms)
    total = float(np.abs(coeffs).sum())
    # rounding in the float evaluation, sized a priori
    pad = 8 * len(coeffs) * total * 2.0**-52 + 1e-300
    slack = coef_err + 1e-15 * l1

    def finish(lo_g, hi_g):
        lo = max(math.sqrt(max(lo_g - pad, 0.0)) - slack, 0.0)
        hi = math.sqrt(hi_g + pad) + slack
        return lo, hi

    if D == 0:
        g = float(coeffs.sum().real)
        return finish(g, g)
    S2 = float((np.abs(coeffs) * np.abs(freqs).sum(axis=1) ** 2).sum())
    n0 = SUP_GRID
    axes = [(np.arange(n0) + 0.5) * (2 * np.pi / n0)] * D
    centers = np.stack(np.meshgrid(*axes, indexing="ij"), axis=-1).reshape(-1, D)
    delta = np.pi / n0
    best = -np.inf
    offsets = np.stack(np.meshgrid(*([[-0.5, 0.5]] * D), indexing="ij"), axis=-1).reshape(-1, D)
    for _ in range(80):
        vals, grads = _eval_square(centers, freqs, coeffs)
        best = max(best, float(vals.max()))
        upper = vals + delta * np.abs(grads).sum(axis=1) + 0.5 * delta * delta * S2
        hi = float(upper.max())
        lo, top = finish(best, hi)
        if top - lo <= tolerance:
            return lo, top
        keep = centers[upper >= best - pad]
        if len(keep) * len(offsets) > SUP_CELL_BUDGET:
            break
        centers = (keep[:, None, :] + offsets[None, :, :] * delta).reshape(-1, D)
        delta /= 2
    raise PrecisionExhausted(f"sup norm not resolved to {tolerance:g} within the cell budget")


def sup_norm_arch(T: HomogeneousPoly, v: ArchimedeanPlace, tolerance: float = 1e-9) -> Ball:
    """Enclosure of ``nu_v(T)``, the sup of ``|T(z)|_v`` over the closed unit polydisc."""
    if T.num_vars > SUP_MAX_VARS:
        raise ValueError(f"Archimedean sup norms support at most {SUP_MAX_VARS} variables")
    if T.is_zero():
        return Ball(0)
    lo, hi = torus_sup_bounds(_embedded_coefficients(T, v), tolerance)
    e = v.local_degree / T.field.degree
    return Ball.from_bounds(float(np.nextafter(lo**e, 0)), float(np.nextafter(hi**e, np.inf)))


def sup_norm(T: HomogeneousPoly, v, tolerance: float = 1e-9):
    if isinstance(v, FinitePlace):
        return sup_norm_finite(T, v)
    return sup_norm_arch(T, v, tolerance)


def dual_norm(psi: LinearFunctional, v):
    """Operator norm of ``psi`` against the max norm at ``v``.

    Finite places: largest ``|c_i|_v``.  Archimedean places: the sum norm
    ``(sum ||c_i||_v)**(d_v/d)``, at the current working precision.
    """
    nonzero = [c for c in psi.coefficients if not c.is_zero()]
    if isinstance(v, FinitePlace):
        if not nonzero:
            return PPower.zero(v.p)
        return max(abs_value(c, v) for c in nonzero)
    total = Ball(0)
    for c in nonzero:
        total = total + abs_value(c, v, normalized=False)
    if not nonzero:
        return total
    return total.rpow(Fraction(v.local_degree, psi.field.degree))


# ------------------------------------------------------ projective U values


def u_local_projective(a: ProjectiveVector, T: HomogeneousPoly, v):
    """``U_v(a, T) = |T(a)|_v / H_v(a)**M``."""
    _check_compatible(a, T)
    value = T(a.coords)
    if value.is_zero():
        return _zero_like(v)
    return abs_value(value, v) / local_projective_height(a, v) ** T.degree


def _argmax_coordinate(a: ProjectiveVector, v) -> int:
    values = [(i, abs_value(c, v)) for i, c in enumerate(a.coords) if not c.is_zero()]
    if isinstance(v, FinitePlace):
        return max(values, key=lambda t: t[1]._key())[0]
    return max(values, key=lambda t: t[1].mid)[0]


def witness_polynomial(a: ProjectiveVector, T: HomogeneousPoly, n: int) -> HomogeneousPoly:
    """``f* = T - T(a) * (z_n / a_n)**M``, which vanishes at ``a``."""
    e = [0] * T.num_vars
    e[n] = T.degree
    scale = T(a.coords) / a.coords[n] ** T.degree
    return T - HomogeneousPoly.monomial(T.field, e, scale)


def u_witness_oracle_projective(a: ProjectiveVector, T: HomogeneousPoly, v, tolerance: float = 1e-12):
    """``nu_v(T - f*)`` for the explicit witness ``f*`` vanishing at ``a``."""
    _check_compatible(a, T)
    if T(a.coords).is_zero():
        raise TVanishesAtPoint("T(a) = 0, the witness is undefined")
    n = _argmax_coordinate(a, v)
    f_star = witness_polynomial(a, T, n)
    if not f_star(a.coords).is_zero():
        raise AssertionError("witness does not vanish at a")
    return sup_norm(T - f_star, v, tolerance)


def _check_compatible(a: ProjectiveVector, T: HomogeneousPoly):
    if len(a) != T.num_vars:
        raise ValueError(f"point has {len(a)} coordinates but T has {T.num_vars} variables")
    if a.field != T.field:
        raise ValueError("point and polynomial live in different fields")


def _u_places(a: ProjectiveVector, value: FieldElement):
    primes = set(candidate_finite_places(a.coords)) | set(candidate_finite_places([value]))
    return all_places(a.field, primes)


@dataclass
class IdentityReport:
    value: Ball
    height: Ball
    u: Ball
    exponent: int
    rows: list[dict]
    tolerance: float
    passed: bool
    finite_exact: PowerProduct | None = None


def _identity(places, local_h, local_u, local_t, exponent: int, tolerance: float) -> IdentityReport:
    """Evaluate ``prod H_v**exponent`` and ``prod U_v`` place by place and multiply."""
    finite = [v for v in places if isinstance(v, FinitePlace)]
    arch = [v for v in places if isinstance(v, ArchimedeanPlace)]
    rows = []
    for v in finite:
        rows.append({"place": v.id, "H_v": local_h(v), "U_v": local_u(v), "T_v": local_t(v)})
    h_exact = PowerProduct.of(r["H_v"] ** exponent for r in rows)
    u_exact = PowerProduct.of(r["U_v"] for r in rows)
    state: dict = {}

    def compute(prec):
        h = h_exact.to_ball()
        u = u_exact.to_ball()
        arch_rows = []
        for v in arch:
            hv, uv = local_h(v), local_u(v)
            arch_rows.append({"place": v.id, "H_v": hv, "U_v": uv, "T_v": local_t(v)})
            h = h * hv**exponent
            u = u * uv
        state.update(h=h, u=u, rows=arch_rows)
        return h * u

    value = refine(compute, tolerance / 2)
    rows = state["rows"] + rows
    passed = value.contains(1) and float(value.width) <= tolerance
    return IdentityReport(value, state["h"], state["u"], exponent, rows, tolerance, passed, h_exact * u_exact)


def u_global_projective(a: ProjectiveVector, T: HomogeneousPoly, target_radius: float = DEFAULT_RADIUS) -> Ball:
    """``U(a, T) = prod_v U_v(a, T)``."""
    _check_compatible(a, T)
    value = T(a.coords)
    if value.is_zero():
        raise TVanishesAtPoint("T(a) = 0")
    places = _u_places(a, value)
    exact = PowerProduct.of(u_local_projective(a, T, v) for v in places if isinstance(v, FinitePlace))
    arch = [v for v in places if isinstance(v, ArchimedeanPlace)]

    def compute(prec):
        out = exact.to_ball()
        for v in arch:
            out = out * u_local_projective(a, T, v)
        return out

    return refine(compute, target_radius)


def verify_identity_projective(a: ProjectiveVector, T: HomogeneousPoly, tolerance: float = 1e-10) -> IdentityReport:
    """Check ``H(a)**M * U(a, T) = 1`` with per-place rows."""
    _check_compatible(a, T)
    value = T(a.coords)
    if value.is_zero():
        raise TVanishesAtPoint("T(a) = 0")
    return _identity(
        _u_places(a, value),
        lambda v: local_projective_height(a, v),
        lambda v: u_local_projective(a, T, v),
        lambda v: abs_value(value, v),
        T.degree,
        tolerance,
    )


# ------------------------------------------------------------ dual U values


def u_local_dual(w, psi: LinearFunctional, v):
    """``U_v(w, psi) = |psi(w)|_v / H_v(w)``."""
    w = _as_vector(w)
    value = psi(w)
    if value.is_zero():
        return _zero_like(v)
    return abs_value(value, v) / local_projective_height(w, v)


def u_witness_oracle_dual(w, psi: LinearFunctional, v):
    """Dual norm of ``x -> psi(w) * x_n / w_n`` with ``|w_n|_v`` maximal."""
    w = _as_vector(w)
    value = psi(w)
    if value.is_zero():
        raise KernelMeetsSubspace("psi(w) = 0")
    n = _argmax_coordinate(w, v)
    coeffs = [psi.field.zero] * len(w)
    coeffs[n] = value / w.coords[n]
    phi = LinearFunctional(psi.field, tuple(coeffs))
    if not (psi(w) - phi(w)).is_zero():
        raise AssertionError("witness functional does not match psi at w")
    return dual_norm(phi, v)


def _as_vector(w) -> ProjectiveVector:
    if isinstance(w, WedgeVector):
        return w.as_projective()
    return w


def exterior_power_map(Psi: LinearMap) -> LinearFunctional:
    """``w_1 ^ ... ^ w_M -> det(Psi(w_i))``; coefficients are the maximal minors of Psi."""
    M, N = Psi.shape
    if M > N:
        raise ValueError(f"cannot take the {M}-th exterior power on a space of dimension {N}")
    return LinearFunctional(Psi.field, tuple(minors(Psi.rows, Psi.field).values()))


def _subspace_setup(basis: Sequence[ProjectiveVector], Psi: LinearMap):
    M, N = Psi.shape
    if len(basis) != M:
        raise ValueError(f"Psi has {M} rows but the basis has {len(basis)} vectors")
    if any(len(w) != N for w in basis):
        raise ValueError(f"basis vectors must have {N} coordinates")
    wedge = wedge_coordinates(basis)
    if wedge.is_zero():
        raise DependentBasis("basis vectors are linearly dependent")
    phi = exterior_power_map(Psi)
    value = phi(wedge)
    if value.is_zero():
        raise KernelMeetsSubspace("det(Psi(w_i)) = 0, so W meets the kernel of Psi")
    w = wedge.as_projective()
    primes = set(candidate_finite_places(w.coords)) | set(candidate_finite_places([value]))
    return w, phi, value, all_places(w.field, primes)


def u_subspace(basis: Sequence[ProjectiveVector], Psi: LinearMap, target_radius: float = DEFAULT_RADIUS) -> Ball:
    """``U(W, Psi)`` as the product of dual U values on the wedge."""
    w, phi, _, places = _subspace_setup(basis, Psi)
    exact = PowerProduct.of(u_local_dual(w, phi, v) for v in places if isinstance(v, FinitePlace))
    arch = [v for v in places if isinstance(v, ArchimedeanPlace)]

    def compute(prec):
        out = exact.to_ball()
        for v in arch:
            out = out * u_local_dual(w, phi, v)
        return out

    return refine(compute, target_radius)


def verify_identity_subspace(basis: Sequence[ProjectiveVector], Psi: LinearMap, tolerance: float = 1e-10) -> IdentityReport:
    """Check ``H(W) * U(W, Psi) = 1`` with per-place rows."""
    w, phi, value, places = _subspace_setup(basis, Psi)
    return _identity(
        places,
        lambda v: local_projective_height(w, v),
        lambda v: u_local_dual(w, phi, v),
        lambda v: abs_value(value, v),
        1,
        tolerance,
    )


# ---------------------------------------------------------------- univariate


def homogenize(T: Poly, N: int, field: NumberField) -> HomogeneousPoly:
    """``z0**N * T(z1/z0)`` as a form in (z0, z1); requires ``deg T <= N``."""
    if T.degree > N:
        raise ValueError(f"deg T = {T.degree} exceeds N = {N}")
    return HomogeneousPoly(field, 2, N, {(N - k, k): c for k, c in enumerate(T.coeffs) if c})


@dataclass
class UnivariateReport:
    u: Ball
    height: Ball
    N: int
    observed_exponent: Ball | None
    identity_value: Ball
    rows: list[dict]
    passed: bool


def univariate_u(alpha: FieldElement, T: Poly, N: int, target_radius: float = DEFAULT_RADIUS) -> UnivariateReport:
    """Local and global ``U_v(alpha, T) = |T(alpha)|_v / max{1, |alpha|_v}**N``.

    The report carries ``h(alpha)**N * U`` and the exponent ``e`` for which
    ``h(alpha)**e * U = 1`` is actually observed.
    """
    K = alpha.field
    value = T(alpha) if T.degree >= 0 else K.zero
    value = K(value) if not isinstance(value, FieldElement) else value
    if value.is_zero():
        raise TVanishesAtPoint("T(alpha) = 0")
    primes = set(candidate_finite_places([alpha])) | set(candidate_finite_places([value]))
    places = all_places(K, primes)
    Th = homogenize(T, max(N, T.degree, 0), K) if T.degree >= 0 else None

    def local_max(v):
        a = abs_value(alpha, v)
        if isinstance(v, FinitePlace):
            return max(PPower.one(v.p), a)
        return ball_max(1, a)

    finite = [v for v in places if isinstance(v, FinitePlace)]
    arch = [v for v in places if isinstance(v, ArchimedeanPlace)]
    rows = []
    for v in finite:
        rows.append(
            {
                "place": v.id,
                "T_v": abs_value(value, v),
                "max_v": local_max(v),
                "U_v": abs_value(value, v) / local_max(v) ** N,
                "nu_v": sup_norm_finite(Th, v),
            }
        )
    exact = PowerProduct.of(r["U_v"] for r in rows)
    state: dict = {}

    def compute(prec):
        out = exact.to_ball()
        arch_rows = []
        for v in arch:
            t, m = abs_value(value, v), local_max(v)
            u = t / m**N
            arch_rows.append({"place": v.id, "T_v": t, "max_v": m, "U_v": u})
            out = out * u
        state["rows"] = arch_rows
        return out

    U = refine(compute, target_radius)
    for r, v in zip(state["rows"], arch):
        r["nu_v"] = sup_norm_arch(Th, v, 1e-9)
    h = weil_height(alpha, target_radius)
    identity = h**N * U
    exponent = None
    if h.lower > 1:
        exponent = -U.log() / h.log()
    passed = identity.overlaps(1)
    return UnivariateReport(U, h, N, exponent, identity, state["rows"] + rows, passed)
