"""Command-line interface.

Subcommands: ``solve``, ``mixed-volume``, ``generate``, ``degenerate-family``
and ``plot-data``. Exit codes: 0 success, 1 other solver error, 2 some roots
unrecovered or above the residual threshold, 3 regularity failure, 4 parse
error.
"""

from __future__ import annotations

import argparse
import csv
import io as _io
import json
import logging
import sys
from concurrent.futures import ThreadPoolExecutor
from pathlib import Path

import numpy as np

from . import io
from .cox import HomogenizationError, build_cox_ring
from .generators import GeneratorSpec, blend_facet, random_system
from .polytope import DegeneratePolytopeError, minkowski_sum_all, mixed_volume, newton_polytope
from .solver import RegularityError, SolveOptions, SolverError, chart_representative, solve
from .verify import moment_map

EXIT_OK, EXIT_ERROR, EXIT_PARTIAL, EXIT_REGULARITY, EXIT_PARSE = 0, 1, 2, 3, 4


class CliError(Exception):
    def __init__(self, message, code):
        super().__init__(message)
        self.code = code


def _read(path: str) -> str:
    if path == "-":
        return sys.stdin.read()
    try:
        return Path(path).read_text()
    except OSError as exc:
        raise CliError(str(exc), EXIT_PARSE) from None


def _write(text: str, path: str | None):
    if path in (None, "-"):
        sys.stdout.write(text)
    else:
        Path(path).write_text(text)


def _load_system(path):
    try:
        return io.parse_system(_read(path))
    except (io.ParseError, ValueError) as exc:
        raise CliError(f"parse error: {exc}", EXIT_PARSE) from None


def _options(args, file_opts: dict) -> SolveOptions:
    kw = dict(file_opts)
    for name in ("tol", "rank_tol", "seed"):
        v = getattr(args, name, None)
        if v is not None:
            kw[name] = v
    if getattr(args, "alpha0", None):
        try:
            kw["alpha0_override"] = io.parse_polytope(_read(args.alpha0))
        except (io.ParseError, ValueError) as exc:
            raise CliError(f"parse error in alpha0 file: {exc}", EXIT_PARSE) from None
    try:
        return SolveOptions(**kw)
    except (TypeError, ValueError) as exc:
        raise CliError(f"invalid options: {exc}", EXIT_PARSE) from None


def _solve(system, opts):
    try:
        return solve(system, opts)
    except RegularityError as exc:
        raise CliError(f"regularity failure: {exc}", EXIT_REGULARITY) from None
    except (SolverError, DegeneratePolytopeError, HomogenizationError, ValueError) as exc:
        raise CliError(str(exc), EXIT_ERROR) from None


def _status(result, threshold) -> int:
    ok = all(s.recovered and s.residual <= threshold for s in result.solutions)
    return EXIT_OK if ok else EXIT_PARTIAL


def cmd_solve(args) -> int:
    sf = _load_system(args.input)
    opts = _options(args, sf.options)
    result = _solve(sf.system, opts)
    text = io.result_csv(result) if args.format == "csv" else io.dump_result(result)
    _write(text, args.output)
    s = io.result_to_dict(result)["summary"]
    print(
        f"delta={s['delta']} k={s['k']} n_alpha0={s['n_alpha0']} t={s['t']:.3f}s "
        f"D_mean={s['D_mean']} D_max={s['D_max']} recovered={s['recovered']}/{s['delta']}",
        file=sys.stderr if args.output in (None, "-") else sys.stdout,
    )
    for w in result.warnings:
        print(f"warning: {w}", file=sys.stderr)
    return _status(result, args.residual_threshold)


def cmd_mixed_volume(args) -> int:
    sf = _load_system(args.input)
    polys = [newton_polytope(s.nonzero()) for s in sf.system]
    print(mixed_volume(polys))
    return EXIT_OK


def cmd_generate(args) -> int:
    try:
        spec = GeneratorSpec(args.n, args.nz, args.d_max, args.mode, args.seed)
    except ValueError as exc:
        raise CliError(str(exc), EXIT_PARSE) from None
    _write(io.dump_system(random_system(spec)), args.output)
    return EXIT_OK


def _parse_e_values(text: str) -> list[float]:
    out = []
    for part in text.split(","):
        part = part.strip()
        if ":" in part:
            lo, hi = (int(x) for x in part.split(":"))
            out.extend(float(e) for e in range(lo, hi + 1))
        elif part:
            out.append(float(part))
    if not out:
        raise ValueError("no e values")
    return out


def cmd_degenerate_family(args) -> int:
    sf = _load_system(args.input)
    opts = _options(args, sf.options)
    try:
        es = _parse_e_values(args.e)
    except ValueError as exc:
        raise CliError(f"bad --e list: {exc}", EXIT_PARSE) from None
    P = minkowski_sum_all([newton_polytope(s.nonzero()) for s in sf.system])
    if not 1 <= args.facet <= P.n_facets:
        raise CliError(f"facet index {args.facet} out of range 1..{P.n_facets}", EXIT_ERROR)

    def run(e):
        try:
            system = blend_facet(sf.system, args.facet - 1, e)
        except ValueError as exc:
            raise CliError(str(exc), EXIT_ERROR) from None
        return e, _solve(system, opts)

    threads = max(1, args.jobs)
    if threads > 1:
        with ThreadPoolExecutor(max_workers=threads) as pool:
            runs = list(pool.map(run, es))
    else:
        runs = [run(e) for e in es]
    rows = []
    status = EXIT_OK
    for e, res in runs:
        r = res.residuals
        near = min(float(np.abs(s.cox).min() / np.abs(s.cox).max()) for s in res.solutions)
        rows.append(
            {
                "e": e,
                "r_min": float(r.min()),
                "r_max": float(r.max()),
                "min_relative_coordinate": near,
                "boundary_solutions": sum(bool(s.boundary_incidence) for s in res.solutions),
                "delta": res.delta,
            }
        )
        status = max(status, _status(res, args.residual_threshold))
    if args.format == "csv":
        buf = _io.StringIO()
        w = csv.DictWriter(buf, fieldnames=list(rows[0]), lineterminator="\n")
        w.writeheader()
        w.writerows(rows)
        text = buf.getvalue()
    else:
        text = json.dumps({"schema_version": io.SCHEMA_VERSION, "facet": args.facet, "rows": rows}, indent=1) + "\n"
    _write(text, args.output)
    return status


def cmd_plot_data(args) -> int:
    sf = _load_system(args.input)
    opts = _options(args, sf.options)
    if args.results:
        try:
            zs = io.parse_result_cox(_read(args.results))
        except io.ParseError as exc:
            raise CliError(f"parse error: {exc}", EXIT_PARSE) from None
        P = minkowski_sum_all([newton_polytope(s.nonzero()) for s in sf.system])
        ring = build_cox_ring(P)
        if any(len(z) != ring.k for z in zs):
            raise CliError("results do not match the system's Cox ring", EXIT_PARSE)
    else:
        result = _solve(sf.system, opts)
        zs = [s.cox for s in result.solutions]
        P, ring = result.polytope, result.ring
    n = P.dim
    coords = [f"x{i}" for i in range(1, n + 1)]
    if args.format == "json":
        doc = {
            "schema_version": io.SCHEMA_VERSION,
            "moment_points": [moment_map(ring, P, z).tolist() for z in zs],
            "vertices": P.vertices.tolist(),
            "lattice_points": P.lattice_points().tolist(),
        }
        _write(json.dumps(doc, indent=1) + "\n", args.output)
        return EXIT_OK
    buf = _io.StringIO()
    w = csv.writer(buf, lineterminator="\n")
    w.writerow(["solution", *coords, "boundary_divisors"])
    for j, z in enumerate(zs):
        mu = moment_map(ring, P, z)
        zc = np.abs(chart_representative(ring, P, z))
        inc = np.nonzero(zc <= opts.zero_threshold * zc.max())[0] + 1
        w.writerow([j, *map(repr, mu.tolist()), " ".join(map(str, inc))])
    _write(buf.getvalue(), args.output)
    if args.polytope_output:
        buf = _io.StringIO()
        w = csv.writer(buf, lineterminator="\n")
        w.writerow(["kind", *coords])
        for v in P.vertices.tolist():
            w.writerow(["vertex", *v])
        for m in P.lattice_points().tolist():
            w.writerow(["lattice_point", *m])
        _write(buf.getvalue(), args.polytope_output)
    return EXIT_OK


def _solver_flags(p):
    p.add_argument("--tol", type=float, help="switch between log and Newton recovery (default 1e-6)")
    p.add_argument("--rank-tol", dest="rank_tol", type=float, help="relative singular value cutoff")
    p.add_argument("--seed", type=int, help="seed for h0, eigenvalue mixing and Newton starts")
    p.add_argument("--alpha0", help="JSON file with the vertices of the auxiliary polytope")
    p.add_argument(
        "--residual-threshold", type=float, default=1e-6,
        help="residual above which a root counts as failed (exit code 2)",
    )


def build_parser() -> argparse.ArgumentParser:
    ap = argparse.ArgumentParser(prog="toricroots", description=__doc__.split("\n")[0])
    ap.add_argument("-v", "--verbose", action="store_true")
    sub = ap.add_subparsers(dest="command", required=True)

    p = sub.add_parser("solve", help="solve a system file")
    p.add_argument("input")
    _solver_flags(p)
    p.add_argument("--output", "-o")
    p.add_argument("--format", choices=("json", "csv"), default="json")
    p.set_defaults(func=cmd_solve)

    p = sub.add_parser("mixed-volume", help="print the mixed volume of the Newton polytopes")
    p.add_argument("input")
    p.set_defaults(func=cmd_mixed_volume)

    p = sub.add_parser("generate", help="write a random system file")
    p.add_argument("--n", type=int, required=True)
    p.add_argument("--nz", type=int, required=True, help="points drawn per support")
    p.add_argument("--d-max", dest="d_max", type=int, required=True)
    p.add_argument("--mode", choices=("mixed", "unmixed"), default="mixed")
    p.add_argument("--seed", type=int, default=0)
    p.add_argument("--output", "-o")
    p.set_defaults(func=cmd_generate)

    p = sub.add_parser("degenerate-family", help="residuals along the blended-facet family")
    p.add_argument("input")
    p.add_argument("--facet", type=int, required=True, help="1-based ray index of the Minkowski sum")
    p.add_argument("--e", default="0:12", help="comma list of values or lo:hi ranges")
    p.add_argument("--jobs", type=int, default=1)
    _solver_flags(p)
    p.add_argument("--output", "-o")
    p.add_argument("--format", choices=("json", "csv"), default="csv")
    p.set_defaults(func=cmd_degenerate_family)

    p = sub.add_parser("plot-data", help="moment-map images of the roots as CSV")
    p.add_argument("input")
    p.add_argument("--results", help="results JSON whose Cox coordinates to map")
    p.add_argument("--polytope-output", help="CSV file for the vertices and lattice points")
    _solver_flags(p)
    p.add_argument("--output", "-o")
    p.add_argument("--format", choices=("json", "csv"), default="csv")
    p.set_defaults(func=cmd_plot_data)
    return ap


def main(argv=None) -> int:
    args = build_parser().parse_args(argv)
    logging.basicConfig(
        level=logging.INFO if args.verbose else logging.ERROR, format="%(levelname)s: %(message)s"
    )
    try:
        return args.func(args)
    except CliError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return exc.code


if __name__ == "__main__":
    sys.exit(main())
