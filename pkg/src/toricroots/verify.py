"""Solution quality metrics and numerical regularity probes."""

from __future__ import annotations

import math
from dataclasses import dataclass
from typing import Sequence

import numpy as np

from .cox import CoxPolynomial, CoxRing, monomial_values
from .polytope import LatticePolytope, divisor_offsets, lattice_points

# floor applied before taking logarithms so exact zeros give finite digit counts
_RESIDUAL_FLOOR = 1e-300


@dataclass(frozen=True)
class ResidualReport:
    per_equation: np.ndarray
    max: float
    mean_digits: float


def equation_residual(f: CoxPolynomial, z) -> float:
    """``|f(z)| / sum |c z^e|``; 0/0 counts as 0, x/0 as infinity."""
    terms = f.coeffs * monomial_values(f.exponents, z)
    num = abs(terms.sum())
    den = np.abs(terms).sum()
    if den == 0:
        return 0.0 if num == 0 else math.inf
    return float(num / den)


def residual(fs: Sequence[CoxPolynomial], z) -> ResidualReport:
    """Term-magnitude normalized backward error of ``z`` for each equation."""
    z = np.asarray(z, dtype=complex)
    if not np.any(z):
        raise ValueError("residual of the zero vector is undefined")
    r = np.array([equation_residual(f, z) for f in fs])
    return ResidualReport(per_equation=r, max=float(r.max()), mean_digits=mean_digits(r))


def mean_digits(residuals) -> float:
    """``-log10`` of the geometric mean."""
    r = np.maximum(np.asarray(residuals, dtype=float), _RESIDUAL_FLOOR)
    if r.size == 0:
        return math.inf
    return float(-np.mean(np.log10(r)))


def residual_digits(residuals) -> tuple[int, int]:
    """``(D_mean, D_max)``: ceil of -log10 of the geometric mean and of the max."""
    r = np.maximum(np.asarray(residuals, dtype=float), _RESIDUAL_FLOOR)
    if r.size == 0:
        return 0, 0
    return math.ceil(mean_digits(r)), math.ceil(-math.log10(r.max()))


@dataclass(frozen=True)
class RankReport:
    rank: int
    gap_ratio: float
    singular_values: np.ndarray


def numerical_rank(M, rank_tol: float = 1e-8) -> RankReport:
    """Rank of ``M`` with singular values below ``rank_tol * sigma_max`` dropped."""
    M = np.asarray(M)
    if M.size == 0:
        return RankReport(0, math.inf, np.zeros(0))
    s = np.linalg.svd(M, compute_uv=False)
    if s[0] == 0:
        return RankReport(0, math.inf, s)
    r = int(np.sum(s > rank_tol * s[0]))
    gap = math.inf if r == len(s) or s[r] == 0 else float(s[r - 1] / s[r])
    return RankReport(r, gap, s)


@dataclass(frozen=True)
class CorankReport:
    corank: int
    rows: int
    gap_ratio: float
    singular_values: np.ndarray


def hilbert_corank(ring: CoxRing, fs: Sequence[CoxPolynomial], target, rank_tol: float = 1e-8):
    """Observed dimension of ``(S/I)`` in degree ``[target]``.

    The corank of the resultant matrix equals the Hilbert function of the
    ideal at that degree when the rank decision is exact.
    """
    from .solver import resultant_map

    R = resultant_map(ring, fs, target)
    rows = R.matrix.shape[0]
    rep = numerical_rank(R.matrix, rank_tol)
    return CorankReport(rows - rep.rank, rows, rep.gap_ratio, rep.singular_values)


def lagrange_matrix(ring: CoxRing, zs, a) -> np.ndarray:
    """Columns ``p_j``: the degree-``[a]`` monomials evaluated at ``z_j``, scaled to unit max."""
    B = ring.monomials(ring.graded_points(a), a)
    cols = []
    for z in zs:
        p = monomial_values(B, z)
        scale = np.abs(p).max()
        cols.append(p / scale if scale > 0 else p)
    return np.array(cols).T.reshape(len(B), len(cols))


def lagrange_rank(ring: CoxRing, zs, a, rank_tol: float = 1e-8) -> RankReport:
    return numerical_rank(lagrange_matrix(ring, zs, a), rank_tol)


def moment_map(ring: CoxRing, P: LatticePolytope, z) -> np.ndarray:
    """Weighted average of the lattice points of ``P`` with weights ``|x^(F^T m + a)|``."""
    pts = lattice_points(P)
    a = divisor_offsets(P, ring.F)
    w = np.abs(monomial_values(ring.monomials(pts, a), z))
    total = w.sum()
    if not total > 0:
        raise ValueError("every monomial of P vanishes at z (exceptional point)")
    return (w / total) @ pts
