"""Random sparse systems and the blended-facet near-degeneracy family."""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .cox import LaurentSystem
from .polytope import Support, minkowski_sum_all, newton_polytope


@dataclass(frozen=True)
class GeneratorSpec:
    n: int
    nz: int
    d_max: int
    mode: str = "mixed"
    seed: int = 0

    def __post_init__(self):
        for name in ("n", "nz", "d_max"):
            if getattr(self, name) < 1:
                raise ValueError(f"{name} must be positive")
        if self.mode not in ("mixed", "unmixed"):
            raise ValueError(f"mode must be 'mixed' or 'unmixed', got {self.mode!r}")


def _random_support(rng, n, nz, d_max) -> np.ndarray:
    pts = rng.integers(0, d_max + 1, size=(nz, n))
    return pts - pts[0]


def random_system(spec: GeneratorSpec) -> LaurentSystem:
    """Supports of ``nz`` uniform points in ``{0..d_max}^n`` shifted by the first point.

    Coincident points have their standard normal coefficients added. In
    unmixed mode one support is drawn and shared by all equations.
    """
    rng = np.random.default_rng(spec.seed)
    shared = _random_support(rng, spec.n, spec.nz, spec.d_max) if spec.mode == "unmixed" else None
    polys = []
    for _ in range(spec.n):
        pts = shared if shared is not None else _random_support(rng, spec.n, spec.nz, spec.d_max)
        c = rng.standard_normal(spec.nz)
        polys.append(Support.from_terms(zip(map(tuple, pts.tolist()), c)))
    return LaurentSystem(tuple(polys))


def facet_face(s: Support, u) -> np.ndarray:
    """Boolean mask of the terms of ``s`` minimizing ``<u, m>``."""
    vals = s.exponents @ np.asarray(u, dtype=np.int64)
    return vals == vals.min()


def blend_facet(system: LaurentSystem, facet: int, e: float, pair=(0, 1)) -> LaurentSystem:
    """Push equation ``pair[1]`` toward ``pair[0]`` on one facet.

    On the face of the Newton polytopes in the direction of ray ``facet``
    (0-based column of the ray matrix of the Minkowski sum) the coefficients
    of the second equation become ``10^-e c_2 + (1 - 10^-e) c_1``. As ``e``
    grows, the restrictions to that face acquire common roots and some
    solutions drift onto the corresponding divisor.
    """
    i, j = pair
    P = minkowski_sum_all([newton_polytope(s) for s in system])
    if not 0 <= facet < P.n_facets:
        raise IndexError(f"facet index {facet} out of range for {P.n_facets} rays")
    u = P.normals[:, facet]
    fi, fj = system[i], system[j]
    face_i = {tuple(m) for m in fi.exponents[facet_face(fi, u)].tolist()}
    face_j = {tuple(m) for m in fj.exponents[facet_face(fj, u)].tolist()}
    if face_i != face_j:
        raise ValueError("the two equations do not share the lattice points of this facet")
    ci = dict(zip(map(tuple, fi.exponents.tolist()), fi.coeffs))
    w = 10.0 ** (-e)
    coeffs = fj.coeffs.copy()
    for t, m in enumerate(map(tuple, fj.exponents.tolist())):
        if m in face_j:
            coeffs[t] = w * fj.coeffs[t] + (1 - w) * ci[m]
    polys = list(system)
    polys[j] = Support(fj.exponents.copy(), coeffs)
    return LaurentSystem(tuple(polys))


def unmixed_pair(points, seed: int = 0) -> LaurentSystem:
    """Two equations with the given common support and standard normal coefficients."""
    rng = np.random.default_rng(seed)
    pts = np.asarray(points, dtype=np.int64)
    return LaurentSystem(
        tuple(Support(pts.copy(), rng.standard_normal(len(pts))) for _ in range(2))
    )
