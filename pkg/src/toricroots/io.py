"""JSON file formats for systems, auxiliary polytopes and solver results.

System file::

    {"schema_version": 1, "dimension": 2,
     "equations": [[{"exponent": [0, 0], "re": 1.0, "im": 0.0}, ...], ...],
     "options": {"tol": 1e-6, "seed": 0}}

Exponents are exact integers; coefficients are decimal floats.
"""

from __future__ import annotations

import csv
import io as _io
import json
import math
from dataclasses import dataclass, field
from typing import Any

import numpy as np

from .cox import LaurentSystem
from .polytope import LatticePolytope, Support, polytope_from_points
from .verify import mean_digits, residual_digits

SCHEMA_VERSION = 1
OPTION_KEYS = {"tol", "rank_tol", "seed", "newton_max_iter", "newton_tol", "zero_threshold"}


class ParseError(ValueError):
    """Malformed input file; ``line``/``column`` locate JSON syntax errors."""

    def __init__(self, message, line=None, column=None, path=None):
        where = f"line {line}, column {column}: " if line is not None else ""
        if path:
            where += f"at {path}: "
        super().__init__(where + message)
        self.line = line
        self.column = column
        self.path = path


@dataclass
class SystemFile:
    system: LaurentSystem
    options: dict = field(default_factory=dict)


def _load(text: str) -> Any:
    try:
        return json.loads(text)
    except json.JSONDecodeError as exc:
        raise ParseError(exc.msg, exc.lineno, exc.colno) from None


def _check_version(doc, path="$"):
    v = doc.get("schema_version", SCHEMA_VERSION)
    if v != SCHEMA_VERSION:
        raise ParseError(f"unsupported schema_version {v!r}", path=f"{path}.schema_version")


def _int(x, path) -> int:
    if isinstance(x, bool) or not isinstance(x, int):
        raise ParseError(f"expected an integer, got {x!r}", path=path)
    return x


def _real(x, path) -> float:
    if isinstance(x, bool) or not isinstance(x, (int, float)) or not math.isfinite(x):
        raise ParseError(f"expected a finite number, got {x!r}", path=path)
    return float(x)


def parse_system(text: str) -> SystemFile:
    doc = _load(text)
    if not isinstance(doc, dict):
        raise ParseError("top level must be an object", path="$")
    _check_version(doc)
    if "dimension" not in doc:
        raise ParseError("missing 'dimension'", path="$")
    n = _int(doc["dimension"], "$.dimension")
    if n < 1:
        raise ParseError("dimension must be positive", path="$.dimension")
    eqs = doc.get("equations")
    if not isinstance(eqs, list) or not eqs:
        raise ParseError("'equations' must be a nonempty list", path="$.equations")
    if len(eqs) != n:
        raise ParseError(f"system is not square: {len(eqs)} equations, dimension {n}", path="$.equations")
    supports = []
    for i, eq in enumerate(eqs):
        p = f"$.equations[{i}]"
        if not isinstance(eq, list) or not eq:
            raise ParseError("an equation must be a nonempty list of terms", path=p)
        terms = []
        for t, term in enumerate(eq):
            q = f"{p}[{t}]"
            if not isinstance(term, dict) or "exponent" not in term:
                raise ParseError("a term needs an 'exponent'", path=q)
            e = term["exponent"]
            if not isinstance(e, list) or len(e) != n:
                raise ParseError(f"exponent must be a list of {n} integers", path=f"{q}.exponent")
            e = [_int(x, f"{q}.exponent[{j}]") for j, x in enumerate(e)]
            c = complex(_real(term.get("re", 0.0), f"{q}.re"), _real(term.get("im", 0.0), f"{q}.im"))
            terms.append((e, c))
        supports.append(Support.from_terms(terms))
    opts = doc.get("options", {}) or {}
    if not isinstance(opts, dict):
        raise ParseError("'options' must be an object", path="$.options")
    unknown = set(opts) - OPTION_KEYS
    if unknown:
        raise ParseError(f"unknown option(s) {sorted(unknown)}", path="$.options")
    return SystemFile(LaurentSystem(tuple(supports)), dict(opts))


def system_to_dict(system: LaurentSystem, options: dict | None = None) -> dict:
    eqs = []
    for s in system:
        eqs.append(
            [
                {"exponent": [int(x) for x in e], "re": float(c.real), "im": float(c.imag)}
                for e, c in zip(s.exponents, s.coeffs)
            ]
        )
    doc = {"schema_version": SCHEMA_VERSION, "dimension": system.n, "equations": eqs}
    if options:
        doc["options"] = dict(options)
    return doc


def dump_system(system: LaurentSystem, options: dict | None = None) -> str:
    return json.dumps(system_to_dict(system, options), indent=1) + "\n"


def parse_polytope(text: str) -> LatticePolytope:
    """``{"vertices": [[...], ...]}`` or a bare list of integer points."""
    doc = _load(text)
    if isinstance(doc, dict):
        _check_version(doc)
        pts = doc.get("vertices", doc.get("points"))
        path = "$.vertices"
    else:
        pts, path = doc, "$"
    if not isinstance(pts, list) or not pts:
        raise ParseError("expected a nonempty list of integer points", path=path)
    rows = []
    for i, v in enumerate(pts):
        if not isinstance(v, list) or len(v) != len(pts[0]) or not v:
            raise ParseError("points must be integer lists of equal length", path=f"{path}[{i}]")
        rows.append([_int(x, f"{path}[{i}][{j}]") for j, x in enumerate(v)])
    return polytope_from_points(np.array(rows, dtype=np.int64))


def _cplx(v) -> list:
    return [[float(x.real), float(x.imag)] for x in np.asarray(v, dtype=complex)]


def result_to_dict(result) -> dict:
    """Results document for a :class:`~toricroots.solver.SolveResult`."""
    res = result.residuals
    d_mean, d_max = residual_digits(res)
    summary = {
        "delta": result.delta,
        "n": result.ring.n,
        "k": result.k,
        "n_alpha0": result.n_alpha0,
        "t": float(sum(result.timings.values())),
        "D_mean": d_mean,
        "D_max": d_max,
        "mean_digits": mean_digits(res),
        "max_residual": float(res.max()),
        "recovered": int(sum(s.recovered for s in result.solutions)),
        "cond_Nstar": result.basis.condition,
        "cokernel_gap_ratio": result.cokernel.gap_ratio,
        "eigenvalue_gap": result.eigen.min_gap,
        "h0_retries": result.h0_retries,
        "alpha_enlarged": result.alpha_enlarged,
        "resultant_shape": list(result.resultant_shape),
    }
    sols = []
    for s in result.solutions:
        sols.append(
            {
                "cox": _cplx(s.cox),
                "torus": None if s.torus is None else _cplx(s.torus),
                "boundary_divisors": list(s.divisors),
                "residual": s.residual,
                "recovered": s.recovered,
                "method": s.method,
            }
        )
    return {
        "schema_version": SCHEMA_VERSION,
        "summary": summary,
        "rays": result.ring.F.tolist(),
        "alpha": result.alpha.tolist(),
        "alpha0": result.alpha0.tolist(),
        "timings": dict(result.timings),
        "warnings": list(result.warnings),
        "solutions": sols,
    }


def dump_result(result) -> str:
    doc = result_to_dict(result)
    # inf gap ratios are legal in Python's JSON dialect; keep them readable as strings
    s = doc["summary"]
    for key in ("cokernel_gap_ratio", "eigenvalue_gap", "cond_Nstar"):
        if not math.isfinite(s[key]):
            s[key] = str(s[key])
    return json.dumps(doc, indent=1) + "\n"


def result_csv(result) -> str:
    """One row per solution with real/imag parts of the Cox and torus coordinates."""
    k, n = result.k, result.ring.n
    header = ["index", "residual", "recovered", "method", "boundary_divisors"]
    header += [f"cox{i}_{p}" for i in range(1, k + 1) for p in ("re", "im")]
    header += [f"t{i}_{p}" for i in range(1, n + 1) for p in ("re", "im")]
    buf = _io.StringIO()
    w = csv.writer(buf, lineterminator="\n")
    w.writerow(header)
    for j, s in enumerate(result.solutions):
        row = [j, repr(s.residual), int(s.recovered), s.method, " ".join(map(str, s.divisors))]
        row += [repr(float(p)) for z in s.cox for p in (z.real, z.imag)]
        if s.torus is None:
            row += [""] * (2 * n)
        else:
            row += [repr(float(p)) for z in s.torus for p in (z.real, z.imag)]
        w.writerow(row)
    return buf.getvalue()


def parse_result_cox(text: str) -> list[np.ndarray]:
    """Cox coordinates of every solution in a results document."""
    doc = _load(text)
    if not isinstance(doc, dict) or not isinstance(doc.get("solutions"), list):
        raise ParseError("results document needs a 'solutions' list", path="$")
    _check_version(doc)
    out = []
    for j, s in enumerate(doc["solutions"]):
        try:
            out.append(np.array([complex(re, im) for re, im in s["cox"]]))
        except (KeyError, TypeError, ValueError):
            raise ParseError("malformed Cox coordinates", path=f"$.solutions[{j}].cox") from None
    return out
