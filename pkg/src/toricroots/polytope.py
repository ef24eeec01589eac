"""Lattice polytopes: Newton polytopes, facet representations, lattice points,
Minkowski sums and mixed volumes.

Facet normals are stored as the columns of an integer matrix ``F`` (n x k) with
offsets ``a`` so that a polytope is ``{m : F.T @ m + a >= 0}``. Normals are
primitive and point inward.
"""

from __future__ import annotations

import itertools
import math
from dataclasses import dataclass, field
from typing import Iterable, Sequence

import numpy as np
from scipy.optimize import linprog
from scipy.spatial import ConvexHull

from .lattice import determinant, lattice_generates, primitive_vector, rank


class DegeneratePolytopeError(ValueError):
    """Raised when a full-dimensional polytope was required."""


class UnboundedPolytopeError(ValueError):
    pass


@dataclass(frozen=True)
class Support:
    """Exponents and coefficients of a Laurent polynomial.

    ``exponents`` has shape (terms, n); ``coeffs`` is a complex vector.
    """

    exponents: np.ndarray
    coeffs: np.ndarray

    def __post_init__(self):
        E = np.asarray(self.exponents, dtype=np.int64)
        if E.ndim == 1:
            E = E.reshape(-1, 1)
        c = np.asarray(self.coeffs, dtype=complex).reshape(-1)
        if E.shape[0] != c.shape[0]:
            raise ValueError("exponent and coefficient counts differ")
        if E.shape[0] == 0:
            raise ValueError("empty support")
        if len({tuple(r) for r in E.tolist()}) != E.shape[0]:
            raise ValueError("repeated exponent in support")
        object.__setattr__(self, "exponents", E)
        object.__setattr__(self, "coeffs", c)

    @property
    def dim(self) -> int:
        return self.exponents.shape[1]

    @classmethod
    def from_terms(cls, terms: Iterable[tuple[Sequence[int], complex]]) -> "Support":
        """Build from ``(exponent, coeff)`` pairs, summing repeated exponents."""
        acc: dict[tuple[int, ...], complex] = {}
        for m, c in terms:
            key = tuple(int(x) for x in m)
            acc[key] = acc.get(key, 0) + complex(c)
        keys = list(acc)
        return cls(np.array(keys, dtype=np.int64), np.array([acc[k] for k in keys]))

    def nonzero(self) -> "Support":
        keep = self.coeffs != 0
        if not keep.any():
            raise ValueError("all coefficients are zero")
        return Support(self.exponents[keep], self.coeffs[keep])

    def __call__(self, t) -> complex:
        t = np.asarray(t, dtype=complex)
        return complex(np.sum(self.coeffs * np.prod(t ** self.exponents, axis=1)))


@dataclass(frozen=True, eq=False)
class LatticePolytope:
    """Convex hull of finitely many lattice points.

    For full-dimensional polytopes ``normals``/``offsets`` hold the minimal
    facet representation. Lower-dimensional polytopes (points, segments, ...)
    carry their vertices only and an empty facet list.
    """

    dim: int
    vertices: np.ndarray
    normals: np.ndarray
    offsets: np.ndarray
    affine_dim: int
    _points: list = field(default_factory=list, repr=False, compare=False)

    @property
    def n_facets(self) -> int:
        return self.normals.shape[1]

    @property
    def is_full_dimensional(self) -> bool:
        return self.affine_dim == self.dim

    def slack(self, m) -> np.ndarray:
        """``F.T @ m + a`` for one point or a stack of points (rows)."""
        m = np.asarray(m)
        return m @ self.normals + self.offsets

    def contains(self, m) -> bool:
        if not self.is_full_dimensional:
            raise DegeneratePolytopeError("membership test needs a facet representation")
        return bool(np.all(self.slack(m) >= 0))

    def lattice_points(self) -> np.ndarray:
        return lattice_points(self)

    def facet_set(self) -> set[tuple[tuple[int, ...], int]]:
        return {
            (tuple(int(x) for x in self.normals[:, i]), int(self.offsets[i]))
            for i in range(self.n_facets)
        }

    def __eq__(self, other):
        if not isinstance(other, LatticePolytope):
            return NotImplemented
        return (
            self.dim == other.dim
            and self.affine_dim == other.affine_dim
            and {tuple(v) for v in self.vertices.tolist()}
            == {tuple(v) for v in other.vertices.tolist()}
        )

    __hash__ = None

    def __repr__(self):
        verts = [tuple(v) for v in self.vertices.tolist()]
        return f"LatticePolytope(dim={self.dim}, affine_dim={self.affine_dim}, vertices={verts})"


def _sorted_unique(points: np.ndarray) -> np.ndarray:
    pts = np.unique(np.asarray(points, dtype=np.int64), axis=0)
    return pts


def _affine_dim(points: np.ndarray) -> int:
    if len(points) <= 1:
        return 0
    return rank((points[1:] - points[0]).tolist())


def _facet_normal(simplex_points: np.ndarray) -> tuple[int, ...]:
    """Integer normal to the hyperplane through n points in Z^n (cofactor expansion)."""
    D = (simplex_points[1:] - simplex_points[0]).tolist()
    n = simplex_points.shape[1]
    comps = []
    for j in range(n):
        minor = [row[:j] + row[j + 1:] for row in D]
        comps.append((-1) ** j * determinant(minor))
    return primitive_vector(comps)


def _order_normals(normals: list[tuple[int, ...]], n: int) -> list[int]:
    if n == 2:
        # counterclockwise from the positive x-axis
        key = lambda i: math.atan2(normals[i][1], normals[i][0]) % (2 * math.pi)
        return sorted(range(len(normals)), key=key)
    return sorted(range(len(normals)), key=lambda i: tuple(-x for x in normals[i]))


def facet_representation(points) -> LatticePolytope:
    """Exact minimal facet representation of the convex hull of lattice points.

    Qhull proposes the supporting hyperplanes; every normal is then recomputed
    with integer cofactors, made primitive and inward, and its offset is taken
    exactly as ``-min <u, m>`` over the input points.

    Raises
    ------
    DegeneratePolytopeError
        If the points do not affinely span the ambient space.
    """
    pts = _sorted_unique(np.atleast_2d(np.asarray(points, dtype=np.int64)))
    n = pts.shape[1]
    d = _affine_dim(pts)
    if d < n:
        raise DegeneratePolytopeError(
            f"convex hull has affine dimension {d} < ambient dimension {n}"
        )
    if n == 1:
        normals = [(1,), (-1,)]
    else:
        hull = ConvexHull(pts.astype(float))
        normals = []
        seen = set()
        for simplex in hull.simplices:
            u = _facet_normal(pts[simplex])
            vals = pts @ np.array(u, dtype=np.int64)
            if vals.min() == vals.max():
                continue
            if np.any(vals < vals[simplex[0]]):
                u = tuple(-x for x in u)
            if u not in seen:
                seen.add(u)
                normals.append(u)
    order = _order_normals(normals, n)
    F = np.array([normals[i] for i in order], dtype=np.int64).T.reshape(n, -1)
    a = -(pts @ F).min(axis=0)
    slack = pts @ F + a
    for i in range(F.shape[1]):
        on = pts[slack[:, i] == 0]
        if _affine_dim(on) != n - 1:
            raise RuntimeError(f"hull produced a non-facet hyperplane {tuple(F[:, i])}")
    # vertices are the points whose active facet normals have full rank
    verts = []
    for idx in range(len(pts)):
        active = np.nonzero(slack[idx] == 0)[0]
        if len(active) >= n and rank(F[:, active].T.tolist()) == n:
            verts.append(pts[idx])
    V = np.array(verts, dtype=np.int64).reshape(-1, n)
    return LatticePolytope(dim=n, vertices=V, normals=F, offsets=a, affine_dim=n)


def _lower_dim_vertices(pts: np.ndarray, d: int) -> np.ndarray:
    if d == 0:
        return pts[:1]
    base = pts[0]
    diffs = (pts - base).astype(float)
    # orthonormal coordinates on the affine hull
    _, _, vt = np.linalg.svd(diffs, full_matrices=False)
    coords = diffs @ vt[:d].T
    if d == 1:
        idx = {int(np.argmin(coords[:, 0])), int(np.argmax(coords[:, 0]))}
    else:
        idx = set(ConvexHull(coords).vertices.tolist())
    return _sorted_unique(pts[sorted(idx)])


def polytope_from_points(points) -> LatticePolytope:
    pts = _sorted_unique(np.atleast_2d(np.asarray(points, dtype=np.int64)))
    n = pts.shape[1]
    d = _affine_dim(pts)
    if d == n:
        return facet_representation(pts)
    return LatticePolytope(
        dim=n,
        vertices=_lower_dim_vertices(pts, d),
        normals=np.zeros((n, 0), dtype=np.int64),
        offsets=np.zeros(0, dtype=np.int64),
        affine_dim=d,
    )


def newton_polytope(s: Support) -> LatticePolytope:
    """Convex hull of the exponents carrying a nonzero coefficient."""
    return polytope_from_points(s.nonzero().exponents)


def minkowski_sum(P: LatticePolytope, Q: LatticePolytope) -> LatticePolytope:
    if P.dim != Q.dim:
        raise ValueError(f"dimension mismatch: {P.dim} vs {Q.dim}")
    sums = (P.vertices[:, None, :] + Q.vertices[None, :, :]).reshape(-1, P.dim)
    return polytope_from_points(sums)


def minkowski_sum_all(polys: Sequence[LatticePolytope]) -> LatticePolytope:
    out = polys[0]
    for Q in polys[1:]:
        out = minkowski_sum(out, Q)
    return out


def standard_simplex(n: int, d: int = 1) -> LatticePolytope:
    pts = np.vstack([np.zeros((1, n), dtype=np.int64), d * np.eye(n, dtype=np.int64)])
    return polytope_from_points(pts)


def divisor_offsets(Pj: LatticePolytope, F) -> np.ndarray:
    """Offsets ``a_i = -min_{m in Pj} <u_i, m>`` of ``Pj`` against every column of ``F``."""
    F = np.asarray(F, dtype=np.int64)
    return -(Pj.vertices @ F).min(axis=0)


# ---------------------------------------------------------------- lattice points


def bounding_box(F, a) -> tuple[np.ndarray, np.ndarray] | None:
    """Integer box containing ``{m : F.T m + a >= 0}``; None if it is empty."""
    F = np.asarray(F, dtype=float)
    a = np.asarray(a, dtype=float)
    n = F.shape[0]
    lo = np.empty(n, dtype=np.int64)
    hi = np.empty(n, dtype=np.int64)
    for j in range(n):
        for sgn in (1.0, -1.0):
            c = np.zeros(n)
            c[j] = sgn
            res = linprog(c, A_ub=-F.T, b_ub=a, bounds=[(None, None)] * n, method="highs")
            if res.status == 2:
                return None
            if res.status == 3:
                raise UnboundedPolytopeError("polytope {F^T m + a >= 0} is unbounded")
            if res.status != 0:
                raise RuntimeError(f"bounding-box LP failed: {res.message}")
            if sgn > 0:
                lo[j] = math.floor(res.fun + 1e-7)
            else:
                hi[j] = math.ceil(-res.fun - 1e-7)
    if np.any(lo > hi):
        return None
    return lo, hi


def _box_points(lo: np.ndarray, hi: np.ndarray, F: np.ndarray, a: np.ndarray):
    """Yield, in lexicographic order, the box points satisfying ``F.T m + a >= 0``."""
    n = len(lo)
    if n == 1:
        grid = np.arange(lo[0], hi[0] + 1, dtype=np.int64).reshape(-1, 1)
        yield grid[np.all(grid @ F + a >= 0, axis=1)]
        return
    rest = [np.arange(lo[j], hi[j] + 1, dtype=np.int64) for j in range(1, n)]
    tail = np.stack(np.meshgrid(*rest, indexing="ij"), axis=-1).reshape(-1, n - 1)
    tail_val = tail @ F[1:] + a
    for x0 in range(int(lo[0]), int(hi[0]) + 1):
        keep = np.all(tail_val + x0 * F[0] >= 0, axis=1)
        if keep.any():
            sel = tail[keep]
            yield np.hstack([np.full((len(sel), 1), x0, dtype=np.int64), sel])


def points_in_polytope(F, a, box=None) -> np.ndarray:
    """All lattice points of ``{m : F.T m + a >= 0}``, lexicographically sorted."""
    F = np.asarray(F, dtype=np.int64)
    a = np.asarray(a, dtype=np.int64)
    n = F.shape[0]
    if box is None:
        box = bounding_box(F, a)
        if box is None:
            return np.zeros((0, n), dtype=np.int64)
    lo, hi = box
    chunks = list(_box_points(np.asarray(lo), np.asarray(hi), F, a))
    if not chunks:
        return np.zeros((0, n), dtype=np.int64)
    return np.vstack(chunks)


def count_points_in_polytope(F, a, box) -> int:
    F = np.asarray(F, dtype=np.int64)
    a = np.asarray(a, dtype=np.int64)
    return sum(len(c) for c in _box_points(np.asarray(box[0]), np.asarray(box[1]), F, a))


def lattice_points(P: LatticePolytope) -> np.ndarray:
    """Lattice points of a polytope in lexicographic order."""
    if P._points:
        return P._points[0]
    if P.affine_dim == 0:
        pts = P.vertices[:1].copy()
    elif not P.is_full_dimensional:
        raise DegeneratePolytopeError(
            "lattice_points needs a full-dimensional polytope or a single point"
        )
    else:
        box = (P.vertices.min(axis=0), P.vertices.max(axis=0))
        pts = points_in_polytope(P.normals, P.offsets, box)
    P._points.append(pts)
    return pts


# ---------------------------------------------------------------- mixed volume


def mixed_volume(polys: Sequence[LatticePolytope], P0: LatticePolytope | None = None) -> int:
    """Mixed volume by signed lattice-point counts over all subsets.

    ``MV = sum_{J} (-1)^{n-|J|} |(P0 + P_J) ∩ Z^n|`` where ``P0`` must give a
    basepoint free divisor; by default ``P0`` is the Minkowski sum of the
    inputs. Every sum ``P0 + P_J`` is expressed through the common normal fan
    of ``P0 + P_1 + ... + P_n`` so only one convex hull is needed.
    """
    polys = list(polys)
    if not polys:
        raise ValueError("need at least one polytope")
    n = polys[0].dim
    if any(P.dim != n for P in polys) or len(polys) != n:
        raise ValueError(f"mixed volume needs {n} polytopes in dimension {n}, got {len(polys)}")
    total = minkowski_sum_all(polys)
    if P0 is None:
        P0 = total
    elif P0.dim != n:
        raise ValueError("P0 dimension mismatch")
    Q = minkowski_sum(P0, total)
    if not Q.is_full_dimensional:
        raise DegeneratePolytopeError("P0 + P_1 + ... + P_n is not full-dimensional")
    F = Q.normals
    offs = [divisor_offsets(P, F) for P in polys]
    lows = [P.vertices.min(axis=0) for P in polys]
    highs = [P.vertices.max(axis=0) for P in polys]
    a0 = divisor_offsets(P0, F)
    lo0, hi0 = P0.vertices.min(axis=0), P0.vertices.max(axis=0)
    mv = 0
    for ell in range(n + 1):
        for J in itertools.combinations(range(n), ell):
            a = a0 + sum((offs[j] for j in J), np.zeros_like(a0))
            lo = lo0 + sum((lows[j] for j in J), np.zeros_like(lo0))
            hi = hi0 + sum((highs[j] for j in J), np.zeros_like(hi0))
            mv += (-1) ** (n - ell) * count_points_in_polytope(F, a, (lo, hi))
    return int(mv)


def generate_alpha0(P: LatticePolytope, max_dilation: int = 16) -> LatticePolytope:
    """Smallest dilate ``d * Delta_n`` whose lattice-point differences generate Z^n."""
    if not P.is_full_dimensional:
        raise DegeneratePolytopeError("generate_alpha0 needs a full-dimensional polytope")
    for d in range(1, max_dilation + 1):
        S = standard_simplex(P.dim, d)
        if generates_lattice(S):
            return S
    raise RuntimeError("no generating simplex dilate found")


def generates_lattice(P0: LatticePolytope) -> bool:
    """Whether the differences ``P0 ∩ M - m`` span the full lattice."""
    pts = lattice_points(P0) if P0.is_full_dimensional or P0.affine_dim == 0 else P0.vertices
    return lattice_generates((pts - pts[0]).tolist(), P0.dim)


def validate_alpha0(P0: LatticePolytope, n: int) -> LatticePolytope:
    """Check a user supplied auxiliary polytope."""
    if P0.dim != n:
        raise ValueError(f"alpha0 polytope has dimension {P0.dim}, expected {n}")
    if not P0.is_full_dimensional:
        raise DegeneratePolytopeError("alpha0 polytope must be full-dimensional")
    if not generates_lattice(P0):
        raise ValueError("lattice points of the alpha0 polytope do not generate Z^n")
    return P0
