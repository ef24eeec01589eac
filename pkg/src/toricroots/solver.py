"""Eigenvalue solver computing Cox coordinates of the roots of a Laurent system.

Pipeline: Newton polytopes -> Cox ring of their Minkowski sum -> homogenized
equations -> resultant matrix in degree ``alpha + alpha0`` -> cokernel ->
multiplication matrices for the monomials of degree ``alpha0`` divided by a
generic ``h0`` -> joint eigenvalues -> Cox coordinates from the binomial
system ``x^b_i = lambda_i``.
"""

from __future__ import annotations

import logging
import math
import os
import time
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass, field
from typing import Sequence

import numpy as np
import scipy.linalg

from .cox import (
    CoxPolynomial,
    CoxRing,
    LaurentSystem,
    build_cox_ring,
    homogenize,
    monomial_values,
    pi_map,
)
from .lattice import SnfDecomposition, smith_normal_form
from .polytope import (
    DegeneratePolytopeError,
    LatticePolytope,
    divisor_offsets,
    generate_alpha0,
    minkowski_sum_all,
    mixed_volume,
    newton_polytope,
    validate_alpha0,
)
from .verify import residual

log = logging.getLogger(__name__)


class SolverError(RuntimeError):
    pass


class RegularityError(SolverError):
    """The resultant matrix does not have the expected corank."""

    def __init__(self, message, observed_corank=None, expected_corank=None, gap_ratio=None):
        super().__init__(message)
        self.observed_corank = observed_corank
        self.expected_corank = expected_corank
        self.gap_ratio = gap_ratio


class BasisSelectionError(SolverError):
    pass


@dataclass
class SolveOptions:
    tol: float = 1e-6
    rank_tol: float = 1e-8
    seed: int = 0
    newton_max_iter: int = 50
    newton_tol: float = 1e-14
    alpha0_override: LatticePolytope | None = None
    zero_threshold: float = 1e-8
    threads: int | None = None

    def __post_init__(self):
        for name in ("tol", "rank_tol", "newton_tol", "zero_threshold"):
            if not getattr(self, name) > 0:
                raise ValueError(f"{name} must be positive")
        if not self.tol < 1:
            raise ValueError("tol must lie in (0, 1)")
        if self.newton_max_iter < 1:
            raise ValueError("newton_max_iter must be at least 1")


class PointIndex:
    """Vectorized lookup from lattice points to row positions."""

    def __init__(self, points: np.ndarray):
        points = np.asarray(points, dtype=np.int64)
        self.points = points
        n = points.shape[1]
        if len(points) == 0:
            self.lo = np.zeros(n, dtype=np.int64)
            self.shape = np.zeros(n, dtype=np.int64)
            self.table = np.zeros(0, dtype=np.int64)
            return
        self.lo = points.min(axis=0)
        self.shape = points.max(axis=0) - self.lo + 1
        self.table = np.full(int(np.prod(self.shape)), -1, dtype=np.int64)
        self.table[self._flat(points)] = np.arange(len(points))

    def _flat(self, pts):
        return np.ravel_multi_index(tuple((pts - self.lo).T), tuple(self.shape))

    def __call__(self, pts) -> np.ndarray:
        """Row of each point (last axis), ``-1`` where the point is absent."""
        pts = np.asarray(pts, dtype=np.int64)
        flat = pts.reshape(-1, pts.shape[-1])
        out = np.full(len(flat), -1, dtype=np.int64)
        if self.table.size:
            rel = flat - self.lo
            ok = np.all((rel >= 0) & (rel < self.shape), axis=1)
            out[ok] = self.table[self._flat(flat[ok])]
        return out.reshape(pts.shape[:-1])


@dataclass
class ResultantMatrix:
    """Matrix of ``(q_1, ..., q_n) -> sum q_i f_i`` in monomial bases.

    Rows are the lattice points of the target degree, columns the pairs
    ``(equation, lattice point of target - deg f_i)``.
    """

    matrix: np.ndarray
    target: np.ndarray
    row_points: np.ndarray
    col_equation: np.ndarray
    col_points: np.ndarray
    index: PointIndex


def resultant_map(ring: CoxRing, fs: Sequence[CoxPolynomial], target) -> ResultantMatrix:
    target = np.asarray(target, dtype=np.int64)
    rows = ring.graded_points(target)
    index = PointIndex(rows)
    blocks, eqs, cpts = [], [], []
    for i, f in enumerate(fs):
        a_i = np.array(f.degree.representative, dtype=np.int64)
        shifts = ring.graded_points(target - a_i)
        support = f.lattice_support()
        idx = index(shifts[:, None, :] + support[None, :, :])
        if np.any(idx < 0):
            raise SolverError("product monomial outside the row basis (graded piece mismatch)")
        block = np.zeros((len(rows), len(shifts)), dtype=complex)
        cols = np.broadcast_to(np.arange(len(shifts))[:, None], idx.shape)
        block[idx.ravel(), cols.ravel()] = np.broadcast_to(f.coeffs, idx.shape).ravel()
        blocks.append(block)
        eqs.append(np.full(len(shifts), i))
        cpts.append(shifts)
    n = ring.n
    return ResultantMatrix(
        matrix=np.hstack(blocks) if blocks else np.zeros((len(rows), 0), dtype=complex),
        target=target,
        row_points=rows,
        col_equation=np.concatenate(eqs) if eqs else np.zeros(0, dtype=np.int64),
        col_points=np.vstack(cpts) if cpts else np.zeros((0, n), dtype=np.int64),
        index=index,
    )


@dataclass
class CokernelInfo:
    singular_values: np.ndarray
    observed_corank: int
    gap_ratio: float


def cokernel(R: ResultantMatrix | np.ndarray, delta: int, rank_tol: float = 1e-8):
    """Rows spanning the left null space of the resultant matrix.

    Returns ``(N, info)`` with ``N`` of shape (delta, rows) and orthonormal
    rows. Raises :class:`RegularityError` when the numerical corank is not
    ``delta``.
    """
    M = R.matrix if isinstance(R, ResultantMatrix) else np.asarray(R)
    rows = M.shape[0]
    if delta < 1:
        raise ValueError("expected corank must be at least 1")
    if delta > rows:
        raise RegularityError(
            f"expected corank {delta} exceeds the {rows} rows", None, delta, None
        )
    if M.shape[1]:
        U, s, _ = scipy.linalg.svd(M, full_matrices=True, lapack_driver="gesdd")
    else:
        U, s = np.eye(rows, dtype=complex), np.zeros(0)
    sv = np.zeros(rows)
    sv[: min(rows, len(s))] = s[:rows]
    scale = sv[0] if sv[0] > 0 else 1.0
    observed_rank = int(np.sum(sv > rank_tol * scale))
    observed = rows - observed_rank
    r = rows - delta
    below = sv[r - 1] if r >= 1 else math.inf
    gap = math.inf if sv[r] == 0 else float(below / sv[r])
    info = CokernelInfo(sv, observed, gap)
    if observed != delta:
        raise RegularityError(
            f"resultant matrix has numerical corank {observed}, expected {delta} "
            f"(gap ratio {gap:.3g})",
            observed,
            delta,
            gap,
        )
    return U[:, r:].conj().T, info


@dataclass
class BasisSelection:
    W: np.ndarray
    Nstar: np.ndarray
    condition: float
    singular_values: np.ndarray


def select_basis(N, index: PointIndex, h0: CoxPolynomial, basis_points, rank_tol=1e-8):
    """SVD choice of ``B``: the orthogonal complement of ``ker N_h0`` in ``S_alpha``."""
    delta = N.shape[0]
    support = h0.lattice_support()
    idx = index(np.asarray(basis_points)[:, None, :] + support[None, :, :])
    if np.any(idx < 0):
        raise SolverError("h0 * S_alpha leaves the row basis")
    Nh0 = N[:, idx] @ h0.coeffs
    _, s, Wh = np.linalg.svd(Nh0, full_matrices=False)
    # N has orthonormal rows, so |h0| bounds the scale even when N_h0 collapses
    ref = max(s[0] if len(s) else 0.0, float(np.linalg.norm(h0.coeffs)))
    if len(s) < delta or s[delta - 1] <= rank_tol * ref:
        got = int(np.sum(s > rank_tol * ref)) if len(s) else 0
        raise BasisSelectionError(
            f"N_h0 has rank {got} < {delta}: h0 not generic or a root is a basepoint"
        )
    W = Wh[:delta].conj().T
    return BasisSelection(W, Nh0 @ W, float(s[0] / s[delta - 1]), s)


def multiplication_matrices(N, index: PointIndex, sel: BasisSelection, basis_points, alpha0_points):
    """``M_i = (N*)^-1 N_i W`` for every lattice point ``m_i`` of degree alpha0."""
    basis_points = np.asarray(basis_points)
    lu = scipy.linalg.lu_factor(sel.Nstar)
    out = []
    for m in np.asarray(alpha0_points):
        idx = index(basis_points + m)
        if np.any(idx < 0):
            raise SolverError("x^b_i * S_alpha leaves the row basis")
        out.append(scipy.linalg.lu_solve(lu, N[:, idx] @ sel.W))
    return out


@dataclass
class EigenData:
    mult_matrices: list
    lam: np.ndarray
    redraws: int = 0
    clustered: bool = False
    min_gap: float = math.inf


def simultaneous_eigenvalues(mats, rng: np.random.Generator, max_redraws: int = 3) -> EigenData:
    """Joint eigenvalues of commuting matrices by triangularizing a random combination.

    ``lam[i, j]`` is the eigenvalue of ``mats[i]`` on the j-th common
    eigenvector.
    """
    mats = [np.asarray(M, dtype=complex) for M in mats]
    delta = mats[0].shape[0]
    redraws = 0
    while True:
        coeffs = rng.standard_normal(len(mats))
        C = sum(c * M for c, M in zip(coeffs, mats))
        T, Q = scipy.linalg.schur(C, output="complex")
        d = np.diag(T)
        scale = max(np.abs(d).max(), np.linalg.norm(C, 2), np.finfo(float).tiny)
        if delta > 1:
            diffs = np.abs(d[:, None] - d[None, :]) + np.diag(np.full(delta, np.inf))
            gap = float(diffs.min())
        else:
            gap = math.inf
        clustered = gap < 1e-12 * scale
        if not clustered or redraws >= max_redraws:
            break
        redraws += 1
    if clustered:
        log.warning("eigenvalues of the random combination are clustered (gap %.3g)", gap)
    Qh = Q.conj().T
    lam = np.array([np.diag(Qh @ M @ Q) for M in mats])
    return EigenData(mats, lam, redraws, clustered, gap)


@dataclass
class Recovery:
    z: np.ndarray
    method: str
    recovered: bool
    error: float


def binomial_error(A: np.ndarray, lam: np.ndarray, z) -> float:
    """``max_i |z^b_i - lambda_i| / (1 + |lambda_i|)`` with ``b_i`` the columns of ``A``."""
    vals = monomial_values(A.T, z)
    return float(np.max(np.abs(vals - lam) / (1 + np.abs(lam))))


def _snf_point(lam: np.ndarray, snf: SnfDecomposition, A: np.ndarray) -> np.ndarray:
    """Logarithmic solution of ``x^b_i = lambda_i`` through the Smith form of ``A``.

    The SNF fixes a coherent choice of phases. Its transform ``U`` may have
    large entries, so the magnitudes are taken from the minimum-norm real
    solution of ``A^T log|x| = log|lambda|`` instead, which keeps the Cox
    coordinates balanced.
    """
    k = A.shape[0]
    r = snf.rank
    V = np.array(snf.V, dtype=float)[:, :r]
    U = np.array(snf.U, dtype=float)
    m = np.array(snf.invariant_factors, dtype=float)
    w = (np.log(lam.astype(complex)) @ V) / m
    logy = np.concatenate([w, np.zeros(k - r, dtype=complex)])
    phase = (logy @ U).imag
    logabs = np.linalg.lstsq(A.T.astype(float), np.log(np.abs(lam)), rcond=None)[0]
    return np.exp(logabs + 1j * phase)


def _gauss_newton(A, lam, x, max_iter, tol):
    """Damped Gauss-Newton on ``x^b_i = lambda_i`` with minimum-norm steps."""
    B = A.T
    k = B.shape[1]
    scale = 1 + np.abs(lam).max()
    with np.errstate(all="ignore"):
        F = monomial_values(B, x) - lam
    norm = np.linalg.norm(F)
    if not np.isfinite(norm):
        return x
    for _ in range(max_iter):
        if np.abs(F).max() <= tol * scale:
            break
        J = np.zeros((B.shape[0], k), dtype=complex)
        for l in range(k):
            rows = B[:, l] > 0
            if rows.any():
                E = B[rows].copy()
                E[:, l] -= 1
                J[rows, l] = B[rows, l] * monomial_values(E, x)
        if not np.all(np.isfinite(J)):
            break
        step = np.linalg.lstsq(J, -F, rcond=None)[0]
        t = 1.0
        while t > 1e-6:
            xn = x + t * step
            with np.errstate(all="ignore"):
                Fn = monomial_values(B, xn) - lam
            nn = np.linalg.norm(Fn)
            if np.isfinite(nn) and nn < norm:
                break
            t *= 0.5
        else:
            break
        x, F, norm = xn, Fn, nn
    return x


def recover_coordinates(
    lam_col,
    A,
    opts: SolveOptions,
    snf: SnfDecomposition | None = None,
    rng: np.random.Generator | None = None,
    restarts: int = 5,
) -> Recovery:
    """One point on ``{x : x^b_i = lambda_i}``, ``b_i`` the columns of ``A`` (k x n0).

    Uses the Smith normal form of ``A`` and logarithms when every ``lambda_i``
    is safely away from zero, and damped Newton otherwise or when the log
    route fails its accuracy check.
    """
    A = np.asarray(A, dtype=np.int64)
    lam = np.asarray(lam_col, dtype=complex)
    k = A.shape[0]
    gate = 1e-10
    if snf is None:
        snf = smith_normal_form(A.tolist())
    rng = rng if rng is not None else np.random.default_rng(opts.seed)
    mags = np.abs(lam)
    norm = np.linalg.norm(lam)
    starts = []
    if norm > 0 and mags.min() > 0:
        with np.errstate(all="ignore"):
            z = _snf_point(lam, snf, A)
        if np.all(np.isfinite(z)):
            if mags.min() / norm > opts.tol:
                err = binomial_error(A, lam, z)
                if err <= gate:
                    return Recovery(z, "snf", True, err)
            # below the switch the log point is only a Newton start
            starts.append(z)
    best = None
    for attempt in range(restarts + len(starts)):
        if attempt < len(starts):
            x0 = starts[attempt]
        else:
            x0 = np.exp(2j * np.pi * rng.random(k))
        z = _gauss_newton(A, lam, x0, opts.newton_max_iter, opts.newton_tol)
        with np.errstate(all="ignore"):
            err = binomial_error(A, lam, z)
        if not np.isfinite(err):
            err = math.inf
        if best is None or err < best.error:
            best = Recovery(z, "newton", err <= gate, err)
        if err <= opts.newton_tol * 10:
            break
    if not best.recovered:
        log.warning("Newton failed to recover a root (binomial error %.3g)", best.error)
    return best


@dataclass
class Solution:
    cox: np.ndarray
    torus: np.ndarray | None
    residual: float
    boundary_incidence: frozenset[int]
    recovered: bool = True
    method: str = "snf"

    @property
    def divisors(self) -> tuple[int, ...]:
        """1-based labels ``i`` of the divisors ``D_i`` containing the root."""
        return tuple(sorted(i + 1 for i in self.boundary_incidence))


@dataclass
class SolveResult:
    solutions: list[Solution]
    delta: int
    ring: CoxRing
    equations: list[CoxPolynomial]
    alpha: np.ndarray
    alpha0: np.ndarray
    alpha0_polytope: LatticePolytope
    polytope: LatticePolytope
    h0: CoxPolynomial
    eigen: EigenData
    basis: BasisSelection
    cokernel: CokernelInfo
    timings: dict = field(default_factory=dict)
    warnings: list = field(default_factory=list)
    h0_retries: int = 0
    alpha_enlarged: bool = False
    resultant_shape: tuple = (0, 0)

    @property
    def k(self) -> int:
        return self.ring.k

    @property
    def n_alpha0(self) -> int:
        return len(self.eigen.mult_matrices)

    @property
    def all_recovered(self) -> bool:
        return all(s.recovered for s in self.solutions)

    @property
    def residuals(self) -> np.ndarray:
        return np.array([s.residual for s in self.solutions])


def chart_representative(ring: CoxRing, P: LatticePolytope, z) -> np.ndarray:
    """Orbit representative of ``z`` in the affine chart of its dominant vertex.

    The vertex ``v`` of ``P`` maximizing ``|z^(F^T v + a)|`` picks the chart;
    a real group element ``exp(K c)``, ``F K = 0``, sets every coordinate whose
    ray is not in the cone of ``v`` to modulus one. The remaining coordinates
    are then affine chart coordinates of modulus at most about one, and a
    small one means the root is close to that divisor, whatever
    representative recovery returned.
    """
    z = np.asarray(z, dtype=complex)
    K = scipy.linalg.null_space(ring.F.astype(float))
    if K.shape[1] == 0:
        return z
    with np.errstate(divide="ignore"):
        logz = np.log(np.abs(z))
    S = ring.F.T @ P.vertices.T + P.offsets[:, None]  # slacks, rays x vertices
    zero = np.isneginf(logz)
    logw = np.where(S > 0, S * np.where(zero, 0.0, logz)[:, None], 0.0).sum(axis=0)
    logw[(S[zero] > 0).any(axis=0)] = -np.inf
    j = int(np.argmax(logw))
    if not np.isfinite(logw[j]):
        return z
    out = S[:, j] > 0
    c = np.linalg.lstsq(K[out], -logz[out], rcond=None)[0]
    return z * np.exp(K @ c)


def _boundary(z, threshold):
    z = np.asarray(z)
    cut = threshold * np.abs(z).max()
    return frozenset(int(i) for i in np.nonzero(np.abs(z) <= cut)[0])


def _thread_count(opts: SolveOptions) -> int:
    if opts.threads is not None:
        return max(1, int(opts.threads))
    env = os.environ.get("SOLVER_THREADS")
    return max(1, int(env)) if env else 1


def solve(system: LaurentSystem | Sequence, opts: SolveOptions | None = None) -> SolveResult:
    """Cox coordinates of all roots of a square Laurent system on its toric compactification."""
    opts = opts or SolveOptions()
    if not isinstance(system, LaurentSystem):
        system = LaurentSystem(tuple(system))
    timings = {}
    clock = time.perf_counter()

    def lap(name):
        nonlocal clock
        now = time.perf_counter()
        timings[name] = now - clock
        clock = now

    supports = [s.nonzero() for s in system]
    polys = [newton_polytope(s) for s in supports]
    P = minkowski_sum_all(polys)
    if not P.is_full_dimensional:
        raise DegeneratePolytopeError(
            f"Minkowski sum of the Newton polytopes has dimension {P.affine_dim} < {P.dim}; "
            "the system is not zero-dimensional"
        )
    ring = build_cox_ring(P)
    F = ring.F
    offsets = [divisor_offsets(Pj, F) for Pj in polys]
    alpha = np.sum(offsets, axis=0)
    if opts.alpha0_override is not None:
        P0 = validate_alpha0(opts.alpha0_override, P.dim)
    else:
        P0 = generate_alpha0(P)
    alpha0 = divisor_offsets(P0, F)
    fs = [homogenize(ring, s, a) for s, a in zip(supports, offsets)]
    delta = mixed_volume(polys)
    lap("polytopes")
    if delta == 0:
        raise SolverError("mixed volume is zero: the system has no isolated roots")

    enlarged = False
    try:
        R = resultant_map(ring, fs, alpha + alpha0)
        lap("resultant")
        N, cok = cokernel(R, delta, opts.rank_tol)
    except RegularityError as exc:
        log.warning("corank check failed at alpha + alpha0 (%s); enlarging alpha by alpha0", exc)
        alpha = alpha + alpha0
        enlarged = True
        R = resultant_map(ring, fs, alpha + alpha0)
        N, cok = cokernel(R, delta, opts.rank_tol)
    lap("cokernel")

    seeds = np.random.SeedSequence(opts.seed).spawn(3)
    h0_rng, eig_rng = (np.random.default_rng(s) for s in seeds[:2])
    col_seeds = seeds[2].spawn(delta)
    basis_points = ring.graded_points(alpha)
    alpha0_points = ring.graded_points(alpha0)
    A = ring.monomials(alpha0_points, alpha0).T
    retries = 0
    while True:
        c = h0_rng.standard_normal(len(alpha0_points))
        h0 = CoxPolynomial(ring, A.T, c, ring.degree(alpha0), points=alpha0_points)
        try:
            sel = select_basis(N, R.index, h0, basis_points, opts.rank_tol)
            break
        except BasisSelectionError:
            if retries >= 3:
                raise
            retries += 1
    mats = multiplication_matrices(N, R.index, sel, basis_points, alpha0_points)
    lap("multiplication")
    eig = simultaneous_eigenvalues(mats, eig_rng)
    lap("eigenvalues")

    snf = smith_normal_form(A.tolist())

    def recover(j):
        rng = np.random.default_rng(col_seeds[j])
        return recover_coordinates(eig.lam[:, j], A, opts, snf=snf, rng=rng)

    threads = _thread_count(opts)
    if threads > 1:
        with ThreadPoolExecutor(max_workers=threads) as pool:
            recs = list(pool.map(recover, range(delta)))
    else:
        recs = [recover(j) for j in range(delta)]
    lap("recovery")

    solutions = []
    for rec in recs:
        if np.all(np.isfinite(rec.z)) and np.abs(rec.z).max() > 0:
            rec = Recovery(chart_representative(ring, P, rec.z), rec.method, rec.recovered, rec.error)
        inc = _boundary(rec.z, opts.zero_threshold)
        torus = None if inc else pi_map(ring, rec.z).torus
        res = residual(fs, rec.z).max
        solutions.append(Solution(rec.z, torus, res, inc, rec.recovered, rec.method))
    lap("residuals")

    warnings = []
    if eig.clustered:
        warnings.append("clustered eigenvalues: roots may not be simple")
    if enlarged:
        warnings.append("alpha enlarged by alpha0 after a failed corank check")
    unrec = sum(not s.recovered for s in solutions)
    if unrec:
        warnings.append(f"{unrec} root(s) not recovered")
    return SolveResult(
        solutions=solutions,
        delta=delta,
        ring=ring,
        equations=fs,
        alpha=alpha,
        alpha0=alpha0,
        alpha0_polytope=P0,
        polytope=P,
        h0=h0,
        eigen=eig,
        basis=sel,
        cokernel=cok,
        timings=timings,
        warnings=warnings,
        h0_retries=retries,
        alpha_enlarged=enlarged,
        resultant_shape=R.matrix.shape,
    )
