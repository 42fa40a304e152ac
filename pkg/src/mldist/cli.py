"""Command-line front end.

Every command writes one table to stdout (CSV by default, or JSON) whose
header records the full parameter set, seed and library version, so that the
same argv always produces byte-identical output.  Failures print a one-line
JSON record to stderr and exit with 2 (domain), 3 (numerical) or
4 (statistical check failed).
"""

from __future__ import annotations

import argparse
import json
import os
import sys
from typing import Optional, Sequence

import numpy as np

from . import __version__
from .errors import DomainError, MLDistError, StatisticalTestFailure
from .ml_core import MLParams, ml_cdf, ml_laplace, ml_mellin, ml_pdf, mellin_strip
from .pathway import (PathwayParams, PrabhakarParams, pathway_norm_const, pathway_pdf,
                      fstar_scaled, pathway_regime)
from .sampling import sample_batch
from .series import SeriesPolicy
from .stable_levy import StableParams, levy_cdf, levy_pdf
from .tables import render_csv, render_json
from .verify import (CSV_COLUMNS, TransformProbe, clt_convergence_report, levy_limit_report,
                     run_checks, transform_oracle)

SEED_ENV = "MLDIST_SEED"


class _Parser(argparse.ArgumentParser):
    def error(self, message):
        raise DomainError(message)


def _floats(text: str) -> list:
    try:
        return [float(v) for v in text.split(",") if v.strip()]
    except ValueError:
        raise DomainError(f"expected a comma-separated list of numbers, got {text!r}")


def _ints(text: str) -> list:
    try:
        return [int(v) for v in text.split(",") if v.strip()]
    except ValueError:
        raise DomainError(f"expected a comma-separated list of integers, got {text!r}")


def _grid(args, flag: str) -> list:
    explicit = getattr(args, flag, None)
    if explicit is not None and args.grid is not None:
        raise DomainError(f"give either --{flag} or --grid, not both")
    if explicit is not None:
        return _floats(explicit)
    if args.grid is None:
        raise DomainError(f"one of --{flag} or --grid is required")
    start, stop, count = args.grid
    count = int(count)
    if count < 1:
        raise DomainError("grid count must be >= 1")
    if args.spacing == "log":
        if not 0 < start <= stop:
            raise DomainError("log grid needs 0 < start <= stop")
        return [float(v) for v in np.geomspace(start, stop, count)]
    return [float(v) for v in np.linspace(start, stop, count)]


def _policy(args) -> SeriesPolicy:
    return SeriesPolicy(rel_tol=args.rel_tol, max_terms=args.max_terms,
                        cancel_guard=args.cancel_guard, tail_threshold=args.tail_threshold)


def _require(args, *names):
    missing = [n for n in names if getattr(args, n) is None]
    if missing:
        raise DomainError("missing required flag(s): " + ", ".join("--" + m.replace("_", "-") for m in missing))


def _ml_params(args) -> MLParams:
    _require(args, "alpha", "beta")
    return MLParams(args.alpha, args.beta, 1.0 if args.delta is None else args.delta)


def _meta(args, **extra) -> dict:
    m = {"command": args.command, "version": __version__, "seed": args.seed,
         "stream_id": args.stream_id}
    m.update(extra)
    return m


def _policy_meta(pol: SeriesPolicy) -> dict:
    return {"rel_tol": pol.rel_tol, "max_terms": pol.max_terms,
            "cancel_guard": pol.cancel_guard, "tail_threshold": pol.tail_threshold}


# ----------------------------------------------------------------------------
# commands; each returns (meta, columns, rows)


def cmd_pdf(args):
    p, pol = _ml_params(args), _policy(args)
    fn = ml_pdf if args.command == "pdf" else ml_cdf
    rows = []
    for x in _grid(args, "x"):
        r = fn(x, p, pol)
        rows.append([x, r.value, r.abs_err_est, r.method])
    return _meta(args, params=p.echo(), **_policy_meta(pol)), ["x", "value", "abs_err_est", "method"], rows


def cmd_transform(args):
    p = _ml_params(args)
    s_values = _grid(args, "s")
    kind = args.kind
    if kind == "laplace":
        analytic = [ml_laplace(s, p) for s in s_values]
        probe = TransformProbe(tuple(s_values), "laplace")
    else:
        analytic = [ml_mellin(s, p) for s in s_values]
        probe = TransformProbe(tuple(s_values), "mellin", mellin_strip(p))
    cols = ["s", "analytic"]
    if args.oracle:
        pol = _policy(args)
        oracle = transform_oracle(lambda x: ml_pdf(x, p, pol), probe)
        rows = [[s, a, float(o), abs(a - float(o))] for s, a, o in zip(s_values, analytic, oracle)]
        cols += ["oracle", "abs_diff"]
    else:
        rows = [[s, a] for s, a in zip(s_values, analytic)]
    return _meta(args, params=p.echo(), kind=kind), cols, rows


def cmd_sample(args):
    if args.size is None or args.size < 1:
        raise DomainError("--size must be a positive integer")
    dist = args.dist
    if dist == "ml":
        params = _ml_params(args)
    elif dist == "levy":
        _require(args, "alpha")
        params = StableParams(args.alpha)
    elif dist == "gamma":
        _require(args, "beta")
        params = (args.beta, 1.0 if args.delta is None else args.delta)
        if not params[0] > 0 or not params[1] > 0:
            raise DomainError("gamma sampling needs beta > 0 and delta > 0")
    else:
        params = _pathway_params(args)
    batch = sample_batch(dist, params, args.size, args.seed, args.stream_id, n=args.n or 1,
                         chunks=args.chunks)
    meta = {"command": args.command}
    meta.update(batch.header())
    return meta, ["value"], [[float(v)] for v in batch.values]


def cmd_levy(args):
    _require(args, "alpha")
    sp = StableParams(args.alpha)
    pol = _policy(args)
    rows = []
    for u in _grid(args, "x"):
        if sp.alpha == 1:
            rows.append([u, None, levy_cdf(u, sp, pol)])
        else:
            rows.append([u, levy_pdf(u, sp, pol).value, levy_cdf(u, sp, pol)])
    return _meta(args, params=sp.echo()), ["u", "pdf", "cdf"], rows


def _pathway_params(args) -> PathwayParams:
    _require(args, "eta", "a", "alpha", "q")
    return PathwayParams(args.eta, args.a, args.alpha, args.q)


def cmd_pathway(args):
    pw = _pathway_params(args)
    reg = pathway_regime(pw)
    xs = _grid(args, "x")
    cols = ["x", "pdf"]
    rows = [[x, pathway_pdf(x, pw)] for x in xs]
    extra = {}
    if args.beta is not None:
        if reg.family != "type2":
            raise DomainError("the finite-beta f* column needs q > 1 so that delta = a(q-1) > 0")
        gamma = 1 / (pw.q - 1) if args.gamma is None else args.gamma
        # finite-beta f* column; its beta -> inf limit is the type-2 density
        pp = PrabhakarParams(pw.eta, gamma, pw.alpha, args.beta, pw.a * (pw.q - 1), c=pathway_norm_const(pw))
        pol = _policy(args)
        for row in rows:
            row.append(fstar_scaled(row[0], args.beta, pp, pol).value if row[0] > 0 else None)
        cols.append("fstar_scaled")
        extra = {"beta": args.beta, "gamma": gamma}
    meta = _meta(args, params=pw.echo(), family=reg.family, norm_const=pathway_norm_const(pw),
                 support_upper=pw.support[1], tsallis=reg.tsallis,
                 superstatistics=reg.superstatistics, **extra)
    return meta, cols, rows


def _report_table(args, report):
    meta = {"command": args.command}
    meta.update(report.meta())
    return meta, list(CSV_COLUMNS), report.rows()


def cmd_limit_clt(args):
    p = _ml_params(args)
    _require(args, "n")
    report = clt_convergence_report(p, _ints(args.n), TransformProbe(tuple(_grid(args, "s"))),
                                    args.mc_size, args.seed, args.stream_id)
    return _report_table(args, report)


def cmd_limit_levy(args):
    _require(args, "alpha", "betas")
    p = MLParams(args.alpha, 1.0, 1.0 if args.delta is None else args.delta)
    report = levy_limit_report(p, _floats(args.betas), TransformProbe(tuple(_grid(args, "s"))),
                               args.mc_size, args.seed, args.stream_id)
    return _report_table(args, report)


def cmd_verify(args):
    p = _ml_params(args)
    checks = run_checks(p, args.size or 100_000, args.seed, args.stream_id)
    rows = [[c.name, c.value, c.target, c.tolerance, c.passed] for c in checks]
    meta = _meta(args, params=p.echo(), size=args.size or 100_000, all_passed=all(c.passed for c in checks))
    return meta, ["check", "value", "target", "tolerance", "passed"], rows


COMMANDS = {
    "pdf": cmd_pdf, "cdf": cmd_pdf, "transform": cmd_transform, "sample": cmd_sample,
    "levy": cmd_levy, "pathway": cmd_pathway, "limit-clt": cmd_limit_clt,
    "limit-levy": cmd_limit_levy, "verify": cmd_verify,
}


def build_parser() -> argparse.ArgumentParser:
    ap = _Parser(prog="mldist", description="Mittag-Leffler, positive stable and pathway distributions.")
    ap.add_argument("command", choices=sorted(COMMANDS))
    g = ap.add_argument_group("parameters")
    for name in ("alpha", "beta", "delta", "eta", "a", "q"):
        g.add_argument(f"--{name}", type=float)
    g.add_argument("--gamma", type=float, help="f* series parameter for pathway --beta (default 1/(q-1))")
    g.add_argument("--kind", choices=("laplace", "mellin"), default="laplace")
    g.add_argument("--dist", choices=("ml", "levy", "gamma", "pathway"), default="ml")
    grid = ap.add_argument_group("grids")
    grid.add_argument("--x", help="comma-separated evaluation points")
    grid.add_argument("--s", help="comma-separated transform arguments")
    grid.add_argument("--grid", nargs=3, type=float, metavar=("START", "STOP", "COUNT"))
    grid.add_argument("--spacing", choices=("linear", "log"), default="linear")
    grid.add_argument("--n", help="sample-size sequence (limit-clt) or stable-mean n (sample)")
    grid.add_argument("--betas", help="beta sequence for limit-levy")
    mc = ap.add_argument_group("sampling")
    env_seed = os.environ.get(SEED_ENV)
    mc.add_argument("--seed", type=int, default=int(env_seed) if env_seed else 0)
    mc.add_argument("--stream-id", type=int, default=0)
    mc.add_argument("--size", type=int)
    mc.add_argument("--chunks", type=int, default=1)
    mc.add_argument("--mc-size", type=int, default=0)
    mc.add_argument("--oracle", action="store_true", help="add a quadrature column to transform")
    tol = ap.add_argument_group("series policy")
    tol.add_argument("--rel-tol", type=float, default=1e-12)
    tol.add_argument("--max-terms", type=int, default=10000)
    tol.add_argument("--cancel-guard", type=float, default=1e8)
    tol.add_argument("--tail-threshold", type=float, default=30.0)
    ap.add_argument("--format", choices=("csv", "json"), default="csv")
    return ap


def _error_record(exc: BaseException, code: int) -> str:
    return json.dumps({"error": type(exc).__name__, "exit_code": code, "message": str(exc)})


def run_cli(argv: Optional[Sequence[str]] = None, stdout=None, stderr=None) -> int:
    stdout = sys.stdout if stdout is None else stdout
    stderr = sys.stderr if stderr is None else stderr
    try:
        args = build_parser().parse_args(argv)
        if args.command == "sample" and args.n is not None:
            args.n = int(args.n)
        elif args.command == "sample":
            args.n = 1
        if args.gamma is not None and args.command != "pathway":
            raise DomainError("--gamma only applies to the pathway command (with --beta)")
        meta, cols, rows = COMMANDS[args.command](args)
        render = render_json if args.format == "json" else render_csv
        stdout.write(render(meta, cols, rows))
        if args.command == "verify" and not meta["all_passed"]:
            failed = [r[0] for r in rows if not r[-1]]
            raise StatisticalTestFailure("failed checks: " + ", ".join(failed))
        return 0
    except MLDistError as exc:
        stderr.write(_error_record(exc, exc.exit_code) + "\n")
        return exc.exit_code
    except (ValueError, OverflowError, ArithmeticError) as exc:
        code = 2 if isinstance(exc, ValueError) else 3
        stderr.write(_error_record(exc, code) + "\n")
        return code


def main() -> None:
    sys.exit(run_cli())


if __name__ == "__main__":
    main()
