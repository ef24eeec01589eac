"""Cox ring of the toric variety of a lattice polytope.

The ring is ``C[x_1, ..., x_k]`` with one variable per facet normal (ray),
graded by the class group ``Z^k / im F^T``. Degrees are carried as concrete
offset vectors ``a`` in ``Z^k``; the graded piece of degree ``[a]`` has the
monomial basis ``x^(F^T m + a)`` for the lattice points ``m`` with
``F^T m + a >= 0``.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from typing import Sequence

import numpy as np

from .lattice import smith_normal_form
from .polytope import (
    DegeneratePolytopeError,
    LatticePolytope,
    Support,
    points_in_polytope,
)


class HomogenizationError(ValueError):
    pass


@dataclass(frozen=True)
class GradedDegree:
    """A class in Cl(X), remembered together with a divisor representative."""

    representative: tuple[int, ...] = field(compare=False)
    canonical: tuple


@dataclass(frozen=True, eq=False)
class CoxRing:
    """Rays ``F`` (n x k) and the class-group presentation derived from SNF(F^T).

    ``free_part`` (k-n rows) and ``torsion_part`` (rows with ``torsion_moduli``)
    together map an exponent vector to its canonical degree.
    """

    F: np.ndarray
    free_part: np.ndarray
    torsion_part: np.ndarray
    torsion_moduli: tuple[int, ...]
    polytope: LatticePolytope | None = None
    _cache: dict = field(default_factory=dict, repr=False)

    @property
    def n(self) -> int:
        return self.F.shape[0]

    @property
    def k(self) -> int:
        return self.F.shape[1]

    @classmethod
    def from_rays(cls, F, polytope: LatticePolytope | None = None) -> "CoxRing":
        F = np.asarray(F, dtype=np.int64)
        n, k = F.shape
        snf = smith_normal_form(F.T.tolist())
        if snf.rank < n:
            raise DegeneratePolytopeError(
                f"ray matrix has rank {snf.rank} < {n}; the fan is not complete"
            )
        U = np.array(snf.U, dtype=np.int64)
        tors = [i for i, m in enumerate(snf.invariant_factors) if m > 1]
        return cls(
            F=F,
            free_part=U[n:],
            torsion_part=U[tors].reshape(len(tors), k),
            torsion_moduli=tuple(snf.invariant_factors[i] for i in tors),
            polytope=polytope,
        )

    def degree_projection(self, a) -> tuple:
        """Canonical form of the class of ``a`` (free coordinates, torsion residues)."""
        a = np.asarray(a, dtype=np.int64)
        free = tuple(int(x) for x in self.free_part @ a)
        tors = tuple(
            int(x) % m for x, m in zip(self.torsion_part @ a, self.torsion_moduli)
        )
        return free, tors

    def degree(self, a) -> GradedDegree:
        rep = tuple(int(x) for x in np.asarray(a).reshape(-1))
        if len(rep) != self.k:
            raise ValueError(f"degree representative must have length {self.k}")
        return GradedDegree(rep, self.degree_projection(rep))

    def graded_points(self, a) -> np.ndarray:
        """Lattice points ``m`` with ``F^T m + a >= 0`` (lexicographic)."""
        key = tuple(int(x) for x in np.asarray(a).reshape(-1))
        if key not in self._cache:
            self._cache[key] = points_in_polytope(self.F, np.array(key, dtype=np.int64))
        return self._cache[key]

    def monomials(self, points, a) -> np.ndarray:
        return np.asarray(points, dtype=np.int64) @ self.F + np.asarray(a, dtype=np.int64)


def build_cox_ring(P: LatticePolytope) -> CoxRing:
    """Cox ring of the toric variety given by the normal fan of ``P``."""
    if not P.is_full_dimensional:
        raise DegeneratePolytopeError("the polytope must be full-dimensional")
    return CoxRing.from_rays(P.normals, polytope=P)


@dataclass(frozen=True, eq=False)
class CoxPolynomial:
    """Homogeneous element of a Cox ring.

    ``points`` holds the lattice points the terms came from when the polynomial
    was built by homogenization; it is ``None`` otherwise.
    """

    ring: CoxRing
    exponents: np.ndarray
    coeffs: np.ndarray
    degree: GradedDegree
    points: np.ndarray | None = None

    def __post_init__(self):
        E = np.asarray(self.exponents, dtype=np.int64).reshape(-1, self.ring.k)
        c = np.asarray(self.coeffs, dtype=complex).reshape(-1)
        if E.shape[0] != c.shape[0]:
            raise ValueError("exponent and coefficient counts differ")
        if np.any(E < 0):
            raise ValueError("Cox monomials must have nonnegative exponents")
        if len({tuple(r) for r in E.tolist()}) != len(E):
            raise ValueError("repeated monomial")
        for e in E:
            if self.ring.degree_projection(e) != self.degree.canonical:
                raise ValueError(f"monomial {tuple(e)} is not of degree {self.degree.canonical}")
        object.__setattr__(self, "exponents", E)
        object.__setattr__(self, "coeffs", c)

    @classmethod
    def from_terms(cls, ring: CoxRing, terms) -> "CoxPolynomial":
        terms = list(terms)
        E = np.array([t[0] for t in terms], dtype=np.int64).reshape(-1, ring.k)
        c = np.array([t[1] for t in terms], dtype=complex)
        return cls(ring, E, c, ring.degree(E[0]))

    def lattice_support(self) -> np.ndarray:
        """Points ``m`` with ``F^T m + a = e`` for each exponent ``e``."""
        if self.points is not None:
            return self.points
        a = np.array(self.degree.representative, dtype=np.int64)
        rhs = (self.exponents - a).T.astype(float)
        m = np.rint(np.linalg.lstsq(self.ring.F.T.astype(float), rhs, rcond=None)[0]).T
        m = m.astype(np.int64)
        if not np.array_equal(m @ self.ring.F + a, self.exponents):
            raise ValueError("exponents are not in the graded piece of the representative")
        return m

    def __call__(self, z) -> complex:
        return evaluate(self, z)

    def as_dict(self) -> dict[tuple[int, ...], complex]:
        return {tuple(int(x) for x in e): complex(c) for e, c in zip(self.exponents, self.coeffs)}


@dataclass(frozen=True)
class LaurentSystem:
    """A square system of Laurent polynomials on the n-torus."""

    polynomials: tuple[Support, ...]

    def __post_init__(self):
        polys = tuple(self.polynomials)
        if not polys:
            raise ValueError("empty system")
        n = polys[0].dim
        if any(p.dim != n for p in polys):
            raise ValueError("equations live in different dimensions")
        if len(polys) != n:
            raise ValueError(f"system is not square: {len(polys)} equations in {n} variables")
        object.__setattr__(self, "polynomials", polys)

    @property
    def n(self) -> int:
        return len(self.polynomials)

    def __iter__(self):
        return iter(self.polynomials)

    def __getitem__(self, i) -> Support:
        return self.polynomials[i]

    def __call__(self, t) -> np.ndarray:
        return np.array([p(t) for p in self.polynomials])


def homogenize(ring: CoxRing, s: Support, a) -> CoxPolynomial:
    """Map ``sum c_m t^m`` to ``sum c_m x^(F^T m + a)``."""
    a = np.asarray(a, dtype=np.int64)
    E = s.exponents @ ring.F + a
    bad = np.argwhere(E < 0)
    if len(bad):
        t, i = bad[0]
        raise HomogenizationError(
            f"exponent m={tuple(int(x) for x in s.exponents[t])} violates facet {int(i)}: "
            f"<u_{int(i)}, m> + a_{int(i)} = {int(E[t, i])} < 0"
        )
    return CoxPolynomial(ring, E, s.coeffs.copy(), ring.degree(a), points=s.exponents.copy())


def graded_basis(ring: CoxRing, a) -> np.ndarray:
    """Monomial exponents spanning the graded piece of degree ``[a]``."""
    return ring.monomials(ring.graded_points(a), a)


def monomial_values(exponents, z) -> np.ndarray:
    """``z^e`` for every row ``e`` of ``exponents`` (with ``0^0 = 1``)."""
    z = np.asarray(z, dtype=complex)
    return np.prod(z ** np.asarray(exponents), axis=-1)


def evaluate(p: CoxPolynomial, z) -> complex:
    return complex(np.sum(p.coeffs * monomial_values(p.exponents, z)))


@dataclass(frozen=True)
class PiImage:
    """Image of Cox coordinates under the quotient map.

    ``torus`` is the point of (C*)^n, or ``None`` when some coordinate vanishes;
    ``boundary`` lists the (0-based) rays whose coordinate is zero.
    """

    torus: np.ndarray | None
    boundary: frozenset[int]

    @property
    def on_boundary(self) -> bool:
        return bool(self.boundary)


def pi_map(ring: CoxRing, z: Sequence[complex], zero_tol: float = 0.0) -> PiImage:
    """``t_i = prod_l z_l^(F_il)``; coordinates with ``|z_l| <= zero_tol`` count as zero."""
    z = np.asarray(z, dtype=complex)
    if z.shape != (ring.k,):
        raise ValueError(f"expected {ring.k} Cox coordinates")
    zero = frozenset(int(i) for i in np.nonzero(np.abs(z) <= zero_tol)[0])
    if zero:
        return PiImage(None, zero)
    return PiImage(monomial_values(ring.F, z), frozenset())
