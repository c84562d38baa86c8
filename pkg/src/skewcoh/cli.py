"""Command-line interface.

Exit codes: 0 success, 1 verification failure, 2 input or constraint error.
Set ``COHERENCE_LOG`` to ``quiet``, ``info`` or ``debug`` for log output.
"""
from __future__ import annotations

import argparse
import csv
import json
import logging
import os
import re
import sys
import time

import numpy as np

from . import coherence as coh
from .bases import gell_mann_basis, partition_basis
from .errors import CoherenceError, NotPositive
from .linalg import RngSeed, check_density, maximally_mixed, pure_state, random_density
from .measurements import (
    GsmSet,
    MubSet,
    MumSet,
    build_gsm,
    build_mub_prime,
    build_mum,
    builtin_sic,
    max_positive_t,
    max_positive_t_gsm,
    verify_povm_family,
)
from .serialization import FormatError, dump_json, family_from_json, family_to_json, load_json, matrix_from_json, matrix_to_json
from .verification import run_suite

log = logging.getLogger("skewcoh")

EXIT_OK = 0
EXIT_FAIL = 1
EXIT_INPUT = 2

_LOG_LEVELS = {"quiet": logging.WARNING, "info": logging.INFO, "debug": logging.DEBUG}


class InputError(Exception):
    pass


def _setup_logging() -> None:
    level = _LOG_LEVELS.get(os.environ.get("COHERENCE_LOG", "quiet").lower(), logging.WARNING)
    logging.basicConfig(level=level, format="%(levelname)s %(name)s: %(message)s", stream=sys.stderr)


def _fmt(x: float) -> str:
    return f"{x:#.12g}"


def _dim(value: str) -> int:
    d = int(value)
    if d < 2:
        raise argparse.ArgumentTypeError("dimension must be >= 2")
    return d


def _dim_range(value: str) -> list[int]:
    m = re.fullmatch(r"(\d+)(?:\.\.(\d+))?", value.strip())
    if not m:
        raise argparse.ArgumentTypeError(f"expected D or LO..HI, got {value!r}")
    lo = int(m.group(1))
    hi = int(m.group(2) or lo)
    if lo < 2 or hi > 6 or lo > hi:
        raise argparse.ArgumentTypeError("dimension range must lie within 2..6")
    return list(range(lo, hi + 1))


def _alpha(value: str) -> float:
    a = float(value)
    if not 0.0 < a < 1.0:
        raise argparse.ArgumentTypeError("alpha must lie in (0, 1)")
    return a


def _positive_int(value: str) -> int:
    n = int(value)
    if n < 1:
        raise argparse.ArgumentTypeError("expected a positive integer")
    return n


def _positive_float(value: str) -> float:
    x = float(value)
    if not x > 0:
        raise argparse.ArgumentTypeError("expected a positive number")
    return x


def _seed(value: str) -> int:
    n = int(value, 0)
    if not 0 <= n < 2**64:
        raise argparse.ArgumentTypeError("seed must be a 64-bit unsigned integer")
    return n


def _random_state_spec(value: str) -> dict:
    fields = dict(part.split("=", 1) for part in re.split(r"[,\s]+", value.strip()) if "=" in part)
    if set(fields) != {"rank", "seed"}:
        raise argparse.ArgumentTypeError("expected 'rank=R seed=S'")
    return {"rank": _positive_int(fields["rank"]), "seed": _seed(fields["seed"])}


# -- build ---------------------------------------------------------------------------------


def _build_family(kind: str, d: int, t: float | None, max_t: bool):
    if kind in ("mum", "gsm") and (t is None) == (not max_t):
        raise InputError(f"build {kind} needs exactly one of --t or --max-t")
    if kind == "mum":
        part = partition_basis(gell_mann_basis(d))
        return build_mum(part, max_positive_t(part) if max_t else t)
    if kind == "gsm":
        basis = gell_mann_basis(d)
        return build_gsm(basis, max_positive_t_gsm(basis) if max_t else t)
    if kind == "mub":
        return build_mub_prime(d)
    return builtin_sic(d)


def cmd_build(args) -> int:
    family = _build_family(args.kind, args.dim, args.t, args.max_t)
    out = args.out or f"{args.kind}_d{args.dim}.json"
    dump_json(family_to_json(family), out)
    if isinstance(family, MumSet):
        print(f"t = {_fmt(family.t)}")
        print(f"kappa = {_fmt(family.kappa)}")
    elif isinstance(family, GsmSet):
        if family.t is not None:
            print(f"t = {_fmt(family.t)}")
        print(f"a = {_fmt(family.a)}")
    print(f"wrote {out}")
    return EXIT_OK


def cmd_basis_export(args) -> int:
    d = args.dim
    basis = gell_mann_basis(d)
    entries = []
    if args.partitioned:
        part = partition_basis(basis)
        for b in range(d + 1):
            for n in range(d - 1):
                entries.append({"n": n + 1, "b": b + 1, **matrix_to_json(part.groups[b, n])})
    else:
        entries = [{"k": k + 1, **matrix_to_json(op)} for k, op in enumerate(basis.ops)]
    dump_json(entries, args.out)
    print(f"wrote {len(entries)} operators to {args.out}")
    return EXIT_OK


# -- states and measurements ------------------------------------------------------------------


def _load_state(args, d: int | None) -> tuple[np.ndarray, str]:
    chosen = [x for x in (args.state, args.random_state, args.pure, args.maximally_mixed) if x]
    if len(chosen) != 1:
        raise InputError("choose exactly one of --state, --random-state, --pure, --maximally-mixed")
    if args.state:
        rho = matrix_from_json(load_json(args.state), where=str(args.state))
        try:
            rho = check_density(rho)
        except (CoherenceError, ValueError) as exc:
            raise InputError(f"{args.state}: {exc}") from exc
        if d is not None and rho.shape[0] != d:
            raise InputError(f"{args.state}: state dimension {rho.shape[0]} does not match {d}")
        return rho, str(args.state)
    if d is None:
        raise InputError("--dim is required for generated states without a measurement file")
    if args.random_state:
        spec = args.random_state
        return random_density(d, spec["rank"], RngSeed(spec["seed"])), f"random(rank={spec['rank']},seed={spec['seed']})"
    if args.pure:
        psi = np.zeros(d)
        psi[0] = 1.0
        return pure_state(psi), "pure|0>"
    return maximally_mixed(d), "maximally-mixed"


def _load_measurements(paths) -> list:
    families = []
    for path in paths or []:
        family = family_from_json(load_json(path))
        report = verify_povm_family(family)
        if not report.passed:
            raise InputError(f"{path}: measurement fails {', '.join(report.failed)} " f"(residuals {json.dumps({k: report.residuals[k] for k in report.failed})})")
        families.append(family)
    dims = {f.dim for f in families}
    if len(dims) > 1:
        raise InputError(f"measurement files disagree on dimension: {sorted(dims)}")
    return families


def _print_report(rep: coh.CoherenceReport) -> None:
    print(f"state {rep.state_id}  d={rep.dim}  alpha={rep.alpha}")
    print(f"{'quantity':<10} {'brute':>20} {'closed':>20} {'residual':>12}")
    for name, q in rep.quantities.items():
        brute = "-" if q.brute is None else f"{q.brute:.15g}"
        res = "-" if q.residual is None else f"{q.residual:.3e}"
        print(f"{name:<10} {brute:>20} {q.closed:>20.15g} {res:>12}")
    if rep.c_u is not None:
        print(f"{'c_u':<10} {rep.c_u.estimate:>20.15g} {rep.c_u.closed:>20.15g}  +/- {rep.c_u.std_error:.3e} (z={rep.c_u.z_score:.2f})")
    print(f"ordering ok: {rep.ordering_ok}" + (" (degenerate)" if rep.ordering_degenerate else ""))


def cmd_compute(args) -> int:
    families = _load_measurements(args.measurement)
    d = families[0].dim if families else args.dim
    if families and args.dim is not None and args.dim != d:
        raise InputError(f"--dim {args.dim} does not match measurement dimension {d}")
    rho, state_id = _load_state(args, d)
    kw = {}
    for f in families:
        if isinstance(f, MumSet):
            kw["mum"] = f
        elif isinstance(f, MubSet):
            kw["mub"] = f
        elif f.t is None:
            kw["sic"] = f
        else:
            kw["gsm"] = f
    if args.samples is not None and args.seed is None:
        raise InputError("--samples requires --seed")
    rep = coh.relations_report(rho, alpha=args.alpha, samples=args.samples, seed=args.seed, state_id=state_id, **kw)
    if args.out:
        dump_json(rep.to_json(), args.out)
    _print_report(rep)
    return EXIT_OK


def cmd_cu_estimate(args) -> int:
    rho, state_id = _load_state(args, args.dim)
    est = coh.c_u_monte_carlo(rho, args.samples, RngSeed(args.seed), args.alpha)
    z = est.z_score
    result = {
        "dim": rho.shape[0],
        "state_id": state_id,
        "alpha": args.alpha,
        "samples": args.samples,
        "seed": args.seed,
        "estimate": est.estimate,
        "std_error": est.std_error,
        "closed": est.closed,
        "z": z,
    }
    if args.out:
        dump_json(result, args.out)
    print(json.dumps(result, indent=2))
    if abs(z) > 4:
        print(f"|z| = {abs(z):.2f} > 4: either a bug or a rare fluctuation; rerun with another --seed to tell them apart", file=sys.stderr)
        return EXIT_FAIL
    return EXIT_OK


# -- verify and figure ---------------------------------------------------------------------------


def cmd_verify(args) -> int:
    start = time.perf_counter()
    suite = run_suite(args.dims, args.trials, args.seed, args.tol)
    print(f"{'identity':<22} {'max residual':>14} {'tol':>9} {'worst d':>8}  seed/stream")
    for r in suite.results.values():
        flag = "ok" if r.passed else "FAIL"
        print(f"{r.name:<22} {r.max_residual:>14.3e} {r.tol:>9.1e} {r.dim!s:>8}  {r.seed:<14} {flag}")
    print(f"{len(suite.results)} identities, {time.perf_counter() - start:.1f} s")
    if not suite.passed:
        for r in suite.results.values():
            if not r.passed:
                print(f"FAILED {r.name}: residual {r.max_residual:.3e} > {r.tol:.1e} at d={r.dim}, seed/stream {r.seed}", file=sys.stderr)
        return EXIT_FAIL
    return EXIT_OK


def figure1_rows(dmax: int) -> list[tuple[int, float, float, float]]:
    """Pure-state values of C_max, C_MUB and C_SIC for d = 2..dmax."""
    return [(d, (d - 1) / d, (d - 1) / (d + 1), (d - 1) / (d * (d + 1))) for d in range(2, dmax + 1)]


def cmd_figure1(args) -> int:
    with open(args.out, "w", newline="", encoding="utf-8") as fh:
        writer = csv.writer(fh, lineterminator="\n")
        writer.writerow(["d", "c_max", "c_mub", "c_sic"])
        for d, cmax, cmub, csic in figure1_rows(args.dmax):
            writer.writerow([d, f"{cmax:.15g}", f"{cmub:.15g}", f"{csic:.15g}"])
    print(f"wrote {args.dmax - 1} rows to {args.out}")
    return EXIT_OK


# -- parser ----------------------------------------------------------------------------------------


def _add_state_options(p, dim_required=False):
    p.add_argument("--dim", type=_dim, required=dim_required)
    p.add_argument("--state", help="density matrix in matrix JSON format")
    p.add_argument("--random-state", type=_random_state_spec, metavar="'rank=R seed=S'")
    p.add_argument("--pure", action="store_true", help="use |0><0|")
    p.add_argument("--maximally-mixed", action="store_true", help="use I/d")
    p.add_argument("--alpha", type=_alpha, default=0.5)


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(prog="skewcoh", description="Average skew-information coherence over complementary measurements.")
    sub = parser.add_subparsers(dest="command", required=True)

    p = sub.add_parser("build", help="build and serialize a measurement family")
    p.add_argument("kind", choices=["mum", "gsm", "mub", "sic"])
    p.add_argument("--dim", type=_dim, required=True)
    p.add_argument("--t", type=float)
    p.add_argument("--max-t", action="store_true", help="use the largest t keeping every element positive")
    p.add_argument("--out")
    p.set_defaults(func=cmd_build)

    p = sub.add_parser("basis", help="operator basis utilities")
    bsub = p.add_subparsers(dest="basis_command", required=True)
    e = bsub.add_parser("export", help="write the Gell-Mann basis as JSON")
    e.add_argument("--dim", type=_dim, required=True)
    e.add_argument("--out", required=True)
    e.add_argument("--partitioned", action="store_true", help="label operators by (n, b)")
    e.set_defaults(func=cmd_basis_export)

    p = sub.add_parser("compute", help="coherence report for a state")
    p.add_argument("--measurement", action="append", help="measurement JSON file (repeatable)")
    _add_state_options(p)
    p.add_argument("--samples", type=_positive_int, help="add a Haar Monte Carlo estimate")
    p.add_argument("--seed", type=_seed)
    p.add_argument("--out")
    p.set_defaults(func=cmd_compute)

    p = sub.add_parser("verify", help="run the seeded identity suite")
    p.add_argument("--dims", type=_dim_range, default=_dim_range("2..6"))
    p.add_argument("--trials", type=_positive_int, default=50)
    p.add_argument("--seed", type=_seed, default=0)
    p.add_argument("--tol", type=_positive_float, default=1e-9)
    p.set_defaults(func=cmd_verify)

    p = sub.add_parser("figure1", help="pure-state curves as CSV")
    p.add_argument("--dmax", type=_dim, default=30)
    p.add_argument("--out", default="figure1.csv")
    p.set_defaults(func=cmd_figure1)

    p = sub.add_parser("cu-estimate", help="Monte Carlo Haar average against its closed form")
    _add_state_options(p)
    p.add_argument("--samples", type=_positive_int, default=10_000)
    p.add_argument("--seed", type=_seed, required=True)
    p.add_argument("--out")
    p.set_defaults(func=cmd_cu_estimate)
    return parser


def main(argv=None) -> int:
    _setup_logging()
    args = build_parser().parse_args(argv)
    try:
        return args.func(args)
    except NotPositive as exc:
        print(f"error: NotPositive: {exc}", file=sys.stderr)
        return EXIT_INPUT
    except (CoherenceError, FormatError, InputError, ValueError, OSError) as exc:
        print(f"error: {type(exc).__name__}: {exc}", file=sys.stderr)
        return EXIT_INPUT


if __name__ == "__main__":
    sys.exit(main())
