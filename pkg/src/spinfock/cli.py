"""Command-line front end.

    spinfock verify      symbolic identity suites (JSON report array)
    spinfock spectrum    closed-form levels
    spinfock wavefunction  radial state on a grid (CSV)
    spinfock oracle      closed form vs finite-difference eigenvalues
    spinfock dirac       relativistic reduction, energies and residuals
    spinfock parse       canonical form of an operator expression

Exit codes: 0 success, 1 check failure, 2 usage error, 3 numerical
non-convergence.  Exact quantities are written as "p/q" strings, floats with
17 significant digits.  ``--config FILE`` reads flat ``key=value`` lines
mirroring the long flags; relative ``--output`` paths are resolved against
``$SPINFOCK_OUTPUT_DIR`` when it is set.
"""
import argparse
import csv
import io
import json
import os
import sys
from fractions import Fraction

from . import dirac, numoracle, susy, symcheck
from .models import ModelError, ModelId, observable_names, parse_model, radial_reduce
from .opalg import ParseError, THREE_D, parse_expr, radial

EXIT_OK, EXIT_FAIL, EXIT_USAGE, EXIT_NUMERIC = 0, 1, 2, 3
OUTPUT_DIR_ENV = "SPINFOCK_OUTPUT_DIR"


class UsageError(Exception):
    pass


def fmt_float(x):
    return f"{float(x):.16e}"


def fmt_exact(q):
    return str(Fraction(q))


def rational(text):
    try:
        value = Fraction(text.strip())
    except (ValueError, ZeroDivisionError):
        raise argparse.ArgumentTypeError(f"not a rational number: {text!r}")
    if "." in text:
        raise argparse.ArgumentTypeError(f"use fraction syntax such as 1/2, not {text!r}")
    return value


def rational_list(text):
    return [rational(t) for t in text.split(",") if t.strip()]


def grid_spec(text):
    try:
        m, rmax = text.split(":")
        return int(m), float(rmax)
    except ValueError:
        raise argparse.ArgumentTypeError(f"grid must look like M:r_max, got {text!r}")


def model_list(text):
    if text.strip().lower() == "all":
        return list(ModelId)
    try:
        return [parse_model(t) for t in text.split(",")]
    except ModelError as exc:
        raise argparse.ArgumentTypeError(str(exc))


def model_one(text):
    try:
        return parse_model(text)
    except ModelError as exc:
        raise argparse.ArgumentTypeError(str(exc))


def positive_float(text):
    value = float(text)
    if not value > 0:
        raise argparse.ArgumentTypeError(f"must be positive: {text}")
    return value


class _Parser(argparse.ArgumentParser):
    def error(self, message):
        raise UsageError(f"{self.prog}: {message}")


def build_parser():
    parser = _Parser(prog="spinfock", description=__doc__.split("\n\n")[0])
    sub = parser.add_subparsers(dest="command", required=True, parser_class=_Parser)

    def common(p, formats=("json", "csv")):
        p.add_argument("--config", help="flat key=value file mirroring the long flags")
        p.add_argument("--output", help="output file (default: stdout)")
        if formats:
            p.add_argument("--format", choices=formats, default=formats[0])

    p = sub.add_parser("verify", help="run the symbolic identity suites")
    common(p)
    p.add_argument("--model", type=model_list, default="all")
    p.add_argument("--j-set", type=rational_list, default=None,
                   help="quantum numbers for FACTORIZE/INTERTWINE (l for HA)")
    p.add_argument("--reading", choices=("per_mass", "verbatim"), default="per_mass")

    p = sub.add_parser("spectrum", help="closed-form levels")
    common(p)
    p.add_argument("--model", type=model_one, default="dipole")
    p.add_argument("--j", type=rational, default="1/2")
    p.add_argument("--n-max", type=int, default=2)
    p.add_argument("--mass", type=rational, default="1")
    p.add_argument("--alpha", type=rational, default="1", help="coupling (q for HA)")

    p = sub.add_parser("wavefunction", help="radial state sampled on a grid (CSV)")
    common(p, formats=("csv",))
    p.add_argument("--model", type=model_one, default="dipole")
    p.add_argument("--j", type=rational, default="1/2")
    p.add_argument("--n", type=int, default=0)
    p.add_argument("--kappa", type=rational, default=None)
    p.add_argument("--grid", type=grid_spec, default="12000:240")
    p.add_argument("--r-min", type=positive_float, default=1e-3)
    p.add_argument("--source", choices=("analytic", "oracle"), default="analytic")
    p.add_argument("--normalize", action="store_true",
                   help="rescale to unit norm (constants are left at 1 otherwise)")

    p = sub.add_parser("oracle", help="closed form vs numerical eigenvalues")
    common(p)
    p.add_argument("--model", type=model_one, default="dipole")
    p.add_argument("--j", type=rational_list, default="1/2")
    p.add_argument("--n-max", type=int, default=1)
    p.add_argument("--grid", type=grid_spec, default="12000:240")
    p.add_argument("--r-min", type=positive_float, default=1e-3)
    p.add_argument("--tol", type=positive_float, default=None,
                   help="relative tolerance (default 1e-3 on the production grid, else 5e-3)")

    p = sub.add_parser("dirac", help="relativistic reduction, energies and residuals")
    common(p)
    p.add_argument("--mass", type=rational, default="1")
    p.add_argument("--alpha", type=rational, default="1")
    p.add_argument("--j-set", type=rational_list, default="1/2")
    p.add_argument("--n-max", type=int, default=0)
    p.add_argument("--points", type=int, default=20)
    p.add_argument("--h", type=positive_float, default=1e-3)
    p.add_argument("--seed", type=int, default=0)
    p.add_argument("--tol", type=positive_float, default=1e-4)

    p = sub.add_parser("parse", help="canonical form of an operator expression")
    common(p, formats=("text", "json"))
    p.add_argument("expression")
    p.add_argument("--context", choices=("three_d", "radial"), default="three_d")
    p.add_argument("--j", type=rational, default=None)
    p.add_argument("--model", type=model_one, default=None,
                   help="bind the model's observables (H, L1, J1, R1/Rhat1, C)")
    return parser


def _read_config(path):
    values = {}
    with open(path) as fh:
        for lineno, line in enumerate(fh, 1):
            line = line.strip()
            if not line or line.startswith("#"):
                continue
            if "=" not in line:
                raise UsageError(f"{path}:{lineno}: expected key=value")
            key, value = line.split("=", 1)
            key, value = key.strip().replace("-", "_"), value.strip()
            if value.lower() in ("true", "false"):
                value = value.lower() == "true"
            values[key] = value
    return values


def _parse(argv):
    parser = build_parser()
    args = parser.parse_args(argv)
    if getattr(args, "config", None):
        config = _read_config(args.config)
        subparser = parser._subparsers._group_actions[0].choices[args.command]
        known = {a.dest for a in subparser._actions}
        unknown = sorted(set(config) - known)
        if unknown:
            raise UsageError(f"unknown config keys: {', '.join(unknown)}")
        subparser.set_defaults(**config)
        args = parser.parse_args(argv)
    return args


def _emit(args, text):
    if not args.output:
        sys.stdout.write(text)
        return
    path = args.output
    base = os.environ.get(OUTPUT_DIR_ENV)
    if base and not os.path.isabs(path):
        path = os.path.join(base, path)
    os.makedirs(os.path.dirname(os.path.abspath(path)), exist_ok=True)
    with open(path, "w", newline="") as fh:
        fh.write(text)


def _json(obj):
    return json.dumps(obj, indent=2) + "\n"


def _csv(header, rows):
    buf = io.StringIO()
    writer = csv.writer(buf, lineterminator="\n")
    writer.writerow(header)
    for row in rows:
        writer.writerow([row.get(h, "") for h in header])
    return buf.getvalue()


# --------------------------------------------------------------------------


def cmd_verify(args):
    models = args.model
    j_sets = None
    if args.j_set:
        j_sets = {m: tuple(args.j_set) for m in models}
    reports = symcheck.run_suite(models, j_sets=j_sets, reading=args.reading)
    rows = [r.to_dict() for r in reports]
    if args.format == "json":
        text = _json(rows)
    else:
        flat = [dict(r, params=json.dumps(r["params"]), passed=str(r["passed"]).lower())
                for r in rows]
        text = _csv(["suite", "identity", "model", "params", "passed", "residual_terms",
                     "witness", "note"], flat)
    _emit(args, text)
    return EXIT_OK if all(r.passed for r in reports) else EXIT_FAIL


def cmd_spectrum(args):
    entries = susy.spectrum(args.model, args.j, args.n_max)
    rows = []
    for e in entries:
        rows.append({
            "model": e.model.name,
            "j": fmt_exact(e.j),
            "n": e.n,
            "N": fmt_exact(e.N),
            "epsilon": fmt_exact(e.epsilon),
            "E": fmt_exact(e.energy(args.mass, args.alpha)),
            "E_formula": e.E_phys,
            "kappa_degeneracy": e.kappa_degeneracy,
            "partners": [[p[0], fmt_exact(p[1])] for p in e.partners],
        })
    if args.format == "json":
        text = _json({"command": "spectrum", "mass": fmt_exact(args.mass),
                      "coupling": fmt_exact(args.alpha), "rows": rows})
    else:
        flat = [dict(r, partners=";".join(f"{n}:{j}" for n, j in r["partners"])) for r in rows]
        text = _csv(["model", "j", "n", "N", "epsilon", "E", "E_formula", "kappa_degeneracy",
                     "partners"], flat)
    _emit(args, text)
    return EXIT_OK


def _grid(args):
    M, r_max = args.grid
    return numoracle.RadialGrid(args.r_min, r_max, M)


def cmd_wavefunction(args):
    grid = _grid(args)
    j = args.j
    meta = {"model": args.model.name, "source": args.source}
    if args.source == "analytic":
        gf = susy.excited_state(args.model, j, args.n, args.kappa, grid=grid)
    else:
        A = numoracle.discretize(radial_reduce(args.model, j), grid)
        mult = 2 if args.model is ModelId.SPIN_ORBIT else 1
        k = mult * (args.n + 1)
        eps, gf = numoracle.eigensolve(A, k, (-1.0, -1e-6))[k - mult]
        gf.label.update({"j": j, "n": args.n})
        meta["epsilon"] = fmt_float(eps)
    if args.normalize:
        gf = gf.normalized()
    _emit(args, gf.to_csv(io.StringIO(), metadata=meta))
    return EXIT_OK


def _default_tol(grid):
    prod = numoracle.PRODUCTION_GRID
    if grid.M >= prod.M and grid.r_max >= prod.r_max:
        return 1e-3
    return 5e-3


def cmd_oracle(args):
    grid = _grid(args)
    tol = args.tol or _default_tol(grid)
    rows = []
    for j in args.j:
        A = numoracle.discretize(radial_reduce(args.model, j), grid)
        mult = 2 if args.model is ModelId.SPIN_ORBIT else 1
        pairs = numoracle.eigensolve(A, mult * (args.n_max + 1), (-1.0, -1e-6))
        for entry in susy.spectrum(args.model, j, args.n_max):
            level = [pairs[mult * entry.n + i][0] for i in range(mult)]
            exact = float(entry.epsilon)
            rel = abs(level[0] - exact) / abs(exact)
            row = {
                "model": args.model.name,
                "j": fmt_exact(j),
                "n": entry.n,
                "closed_form": fmt_exact(entry.epsilon),
                "numeric": fmt_float(level[0]),
                "rel_error": fmt_float(rel),
                "tol": fmt_float(tol),
                "passed": bool(rel <= tol),
            }
            if mult == 2:
                row["numeric_partner"] = fmt_float(level[1])
                row["pair_split"] = fmt_float(abs(level[1] - level[0]))
            rows.append(row)
    grid_meta = {"M": grid.M, "r_min": fmt_float(grid.r_min), "r_max": fmt_float(grid.r_max)}
    if args.format == "json":
        text = _json({"command": "oracle", "grid": grid_meta, "rows": rows})
    else:
        header = ["model", "j", "n", "closed_form", "numeric", "rel_error", "tol", "passed"]
        if args.model is ModelId.SPIN_ORBIT:
            header += ["numeric_partner", "pair_split"]
        text = _csv(header, [dict(r, passed=str(r["passed"]).lower()) for r in rows])
    _emit(args, text)
    return EXIT_OK if all(r["passed"] for r in rows) else EXIT_FAIL


def cmd_dirac(args):
    reduction = dirac.verify_reduction()
    m, alpha = args.mass, args.alpha
    energies, residuals = [], []
    points_resc = numoracle.sample_points(args.points, args.seed)
    for j in args.j_set:
        for n in range(args.n_max + 1):
            N = j + n + 1
            E = dirac.rel_energy(m, alpha, N)
            energies.append({
                "j": fmt_exact(j),
                "n": n,
                "N": fmt_exact(N),
                "E": fmt_float(E),
                "E_nonrel": fmt_float(float(m) - float(m) * float(alpha) ** 2 / (2 * float(N) ** 2)),
                "gap": fmt_float(dirac.nonrel_limit_gap(m, alpha, N)),
                "epsilon": fmt_exact(dirac.energy_consistency(m, alpha, N)),
            })
            lam = 2 * float(alpha) * E
            _, res = dirac.reconstruct_xi(float(m), float(alpha), j, n, j,
                                          points_resc / lam, args.h)
            residuals.append({
                "j": fmt_exact(j),
                "n": n,
                "kappa": fmt_exact(j),
                "h": fmt_float(args.h),
                "residual": fmt_float(res),
                "passed": bool(res <= args.tol),
            })
    ok = reduction.passed and all(r["passed"] for r in residuals)
    if args.format == "json":
        text = _json({
            "command": "dirac",
            "mass": fmt_exact(m),
            "alpha": fmt_exact(alpha),
            "seed": args.seed,
            "reduction": reduction.to_dict(),
            "energies": energies,
            "residuals": residuals,
        })
    else:
        rows = [dict(e, **{k: v for k, v in r.items() if k not in e}) for e, r in zip(energies, residuals)]
        for r in rows:
            r["passed"] = str(r["passed"]).lower()
            r["reduction_passed"] = str(reduction.passed).lower()
        text = _csv(["j", "n", "N", "E", "E_nonrel", "gap", "epsilon", "kappa", "h", "residual",
                     "passed", "reduction_passed"], rows)
    _emit(args, text)
    return EXIT_OK if ok else EXIT_FAIL


def cmd_parse(args):
    if args.context == "radial":
        context = radial(args.j)
        names = None
    else:
        context = THREE_D
        names = observable_names(args.model) if args.model else observable_names(ModelId.HA)
    try:
        op = parse_expr(args.expression, context, names=names)
    except ParseError as exc:
        raise UsageError(str(exc))
    if args.format == "json":
        text = _json({"command": "parse", "input": args.expression, "canonical": str(op),
                      "terms": len(op)})
    else:
        text = str(op) + "\n"
    _emit(args, text)
    return EXIT_OK


COMMANDS = {
    "verify": cmd_verify,
    "spectrum": cmd_spectrum,
    "wavefunction": cmd_wavefunction,
    "oracle": cmd_oracle,
    "dirac": cmd_dirac,
    "parse": cmd_parse,
}


def run_command(argv):
    """Run one CLI invocation and return its exit status."""
    try:
        args = _parse(argv)
        return COMMANDS[args.command](args)
    except UsageError as exc:
        print(exc, file=sys.stderr)
        return EXIT_USAGE
    except (numoracle.ConvergenceError, numoracle.InsufficientStatesError,
            susy.UnderResolvedGridError) as exc:
        print(f"spinfock: numerical failure: {exc}", file=sys.stderr)
        return EXIT_NUMERIC
    except (ModelError, ValueError) as exc:
        print(f"spinfock: {exc}", file=sys.stderr)
        return EXIT_USAGE


def main(argv=None):
    try:
        status = run_command(sys.argv[1:] if argv is None else argv)
    except BrokenPipeError:
        # downstream closed the pipe (e.g. `| head`)
        sys.stderr.close()
        status = EXIT_OK
    sys.exit(status)


if __name__ == "__main__":
    main()


def load_schema():
    """The JSON schema for every document the CLI emits (``$defs`` keyed by command)."""
    from importlib.resources import files
    return json.loads(files(__package__).joinpath("schema.json").read_text())
