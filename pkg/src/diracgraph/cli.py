"""Command line front end.

Exit codes: 0 on success, 1 for invalid input, 2 when the computation left
parts of the search region unresolved.
"""

from __future__ import annotations

import argparse
import csv
import logging
import os
import sys

import numpy as np

from . import solver
from .errors import DiracGraphError, TopologyMismatch
from .graph import InternalEdge
from .io import dump_json, load_problem, problem_to_dict, report_header
from .oracle import oracle_char_fn, oracle_matrix
from .roots import Rect, muller
from .star import star_point_spectrum
from .symmetry import is_C_symmetric, is_T_symmetric, parity_transform
from .transmission import is_self_adjoint, rank_deficiency


EXIT_OK, EXIT_INPUT, EXIT_UNRESOLVED = 0, 1, 2


def _default_tol() -> float:
    try:
        return float(os.environ.get("DIRAC_GRAPH_TOL", "1e-10"))
    except ValueError:
        return 1e-10


DEFAULT_TOL = _default_tol()


def _emit(obj, out):
    text = dump_json(obj, out)
    if out is None:
        print(text)


def cmd_spectrum(args) -> int:
    p = load_problem(args.input)
    rep = solver.find_eigenvalues(p, Rect(*args.region), tol=args.tol, max_depth=args.max_depth, jobs=args.jobs)
    _emit({**report_header("spectrum"), **rep.to_dict()}, args.out)
    return EXIT_OK if rep.complete else EXIT_UNRESOLVED


def cmd_classify(args) -> int:
    p = load_problem(args.input)
    c = p.conditions
    rank = rank_deficiency(c.A, c.B)
    sa = is_self_adjoint(c)
    ess = solver.essential_spectrum(p)
    out = {
        **report_header("classify"),
        "self_adjoint": bool(sa),
        "self_adjoint_per_vertex": sa.per_vertex,
        "T_symmetric": bool(is_T_symmetric(c)),
        "C_symmetric": bool(is_C_symmetric(c, p.graph)),
        "essential_spectrum": ess.to_dict(),
        "rank_deficient": rank.deficient,
        "rank": rank.rank,
    }
    _emit(out, args.out)
    return EXIT_OK


def cmd_scan(args) -> int:
    p = load_problem(args.input)
    re0, re1, im0, im1 = args.grid[:4]
    nx, ny = int(args.grid[4]), int(args.grid[5])
    if nx < 1 or ny < 1:
        raise DiracGraphError("grid sizes must be positive")
    xs = np.linspace(re0, re1, nx)
    ys = np.linspace(im0, im1, ny)
    Z = (xs[None, :] + 1j * ys[:, None]).ravel()
    region = Rect(min(re0, re1), max(re0, re1), min(im0, im1), max(im0, im1))
    excl = solver._exclusions(p, region, solver.RAY_MARGIN)
    F = solver._char_fn_masked(p)(Z)
    handle = open(args.out, "w", newline="") if args.out else sys.stdout
    try:
        w = csv.writer(handle)
        w.writerow(["re", "im", "abs_F", "arg_F", "flag"])
        for z, f in zip(Z, F):
            flag = ""
            if any(abs(z - c) <= r for c, r in excl):
                flag = "excluded"
            elif not np.isfinite(f):
                flag = "undefined"
            w.writerow([repr(float(z.real)), repr(float(z.imag)), repr(float(abs(f))), repr(float(np.angle(f))), flag])
    finally:
        if handle is not sys.stdout:
            handle.close()
    return EXIT_OK


def cmd_star(args) -> int:
    p = load_problem(args.input)
    g = p.graph
    if len(g.vertices) != 1 or g.internal or any(e.rho != -1 for e in g.external):
        raise TopologyMismatch(
            "the star command needs one vertex with outgoing half-lines only; use 'spectrum' for other graphs"
        )
    res = star_point_spectrum(p.conditions.A, p.conditions.B, g.mass, seed=args.seed)
    out = {**report_header("star"), **res.to_dict()}
    out["reference_checks"] = [solver.check_reference_point(p, z).to_dict() for z in res.reference_candidates]
    _emit(out, args.out)
    return EXIT_OK


def _oracle_target(p, order):
    """Function to polish on: the determinant, or its smallest eigenvalue at multiple roots."""
    if order <= 1:
        return lambda z: oracle_char_fn(p, z)

    def smallest(z):
        w = np.linalg.eigvals(oracle_matrix(p, z))
        return complex(w[np.argmin(np.abs(w))])

    return smallest


def cmd_verify(args) -> int:
    p = load_problem(args.input)
    rep = solver.find_eigenvalues(p, Rect(*args.region), tol=args.tol, max_depth=args.max_depth, jobs=args.jobs)
    rows, worst = [], 0.0
    for ev in rep.eigenvalues:
        f = _oracle_target(p, ev.zero_order)
        zo, ok = muller(f, ev.z, 1e-6 * max(1.0, abs(ev.z)), args.tol)
        d = float(abs(zo - ev.z))
        worst = max(worst, d)
        rows.append({"solver": ev.z, "oracle": zo, "distance": d, "converged": ok})
    out = {
        **report_header("verify"),
        "roots": rows,
        "max_distance": worst,
        "max_boundary_residual": max((ev.residual for ev in rep.eigenvalues), default=0.0),
        "unresolved": len(rep.unresolved),
    }
    _emit(out, args.out)
    return EXIT_OK if rep.complete else EXIT_UNRESOLVED


def cmd_flip(args) -> int:
    p = load_problem(args.input)
    if args.all_internal:
        flipped = [e.id for e in p.graph.edges if isinstance(e, InternalEdge)]
    else:
        flipped = list(args.edges or [])
    q, S = parity_transform(p, flipped)
    dump_json(problem_to_dict(q), args.out)
    det_s = float(round(np.linalg.det(S)))
    rng = np.random.default_rng(args.seed)
    worst = 0.0
    for z in rng.uniform(-0.9, 0.9, 20) + 1j * rng.uniform(0.1, 2.0, 20) * rng.choice([-1, 1], 20):
        f, ft = solver.char_fn(p, z), solver.char_fn(q, z)
        worst = max(worst, abs(ft - det_s * f) / max(abs(f), 1e-300))
    verdict = {"det_S": det_s, "max_relative_deviation": worst}
    same = worst < 1e-10
    if args.region:
        r1 = solver.find_eigenvalues(p, Rect(*args.region), tol=args.tol)
        r2 = solver.find_eigenvalues(q, Rect(*args.region), tol=args.tol)
        a, b = np.sort_complex(r1.values), np.sort_complex(r2.values)
        same = same and len(a) == len(b) and (len(a) == 0 or float(np.max(np.abs(a - b))) < 1e-8)
    verdict["verdict"] = "spectra identical" if same else "spectra differ"
    _emit({**report_header("flip"), "flipped": flipped, **verdict}, args.report)
    return EXIT_OK


def build_parser() -> argparse.ArgumentParser:
    ap = argparse.ArgumentParser(prog="diracgraph", description="Spectra of Dirac operators on metric graphs")
    ap.add_argument("--seed", type=int, default=0, help="seed for randomized internals")
    ap.add_argument("--jobs", type=int, default=1, help="worker threads for the root search")
    ap.add_argument("-v", "--verbose", action="store_true")
    sub = ap.add_subparsers(dest="command", required=True)

    def region(sp, required=True):
        sp.add_argument("--region", type=float, nargs=4, metavar=("RE0", "RE1", "IM0", "IM1"), required=required)

    def common(sp):
        sp.add_argument("--tol", type=float, default=DEFAULT_TOL)
        sp.add_argument("--max-depth", type=int, default=40)

    sp = sub.add_parser("spectrum", help="eigenvalues in a rectangle")
    sp.add_argument("input")
    region(sp)
    common(sp)
    sp.add_argument("--out")
    sp.set_defaults(func=cmd_spectrum)

    sp = sub.add_parser("classify", help="self-adjointness, T/C symmetry, essential spectrum")
    sp.add_argument("input")
    sp.add_argument("--out")
    sp.set_defaults(func=cmd_classify)

    sp = sub.add_parser("scan", help="|F| and arg F on a grid, as CSV")
    sp.add_argument("input")
    sp.add_argument("--grid", type=float, nargs=6, required=True, metavar=("RE0", "RE1", "IM0", "IM1", "NX", "NY"))
    sp.add_argument("--out")
    sp.set_defaults(func=cmd_scan)

    sp = sub.add_parser("star", help="closed-form spectrum of a star graph")
    sp.add_argument("input")
    sp.add_argument("--out")
    sp.set_defaults(func=cmd_star)

    sp = sub.add_parser("verify", help="cross-check located eigenvalues with the transfer-matrix system")
    sp.add_argument("input")
    region(sp)
    common(sp)
    sp.add_argument("--out")
    sp.set_defaults(func=cmd_verify)

    sp = sub.add_parser("flip", help="reverse edge orientations and compare spectra")
    sp.add_argument("input")
    sp.add_argument("--edges", nargs="*")
    sp.add_argument("--all-internal", action="store_true")
    sp.add_argument("--out", required=True, help="where to write the transformed problem")
    sp.add_argument("--report", help="where to write the verdict (default: stdout)")
    region(sp, required=False)
    common(sp)
    sp.set_defaults(func=cmd_flip)
    return ap


def main(argv=None) -> int:
    args = build_parser().parse_args(argv)
    logging.basicConfig(level=logging.INFO if args.verbose else logging.WARNING, format="%(levelname)s: %(message)s")
    try:
        return args.func(args)
    except (DiracGraphError, ValueError, KeyError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_INPUT


if __name__ == "__main__":
    sys.exit(main())
