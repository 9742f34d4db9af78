"""Command-line entry point: ``polygelfand <subcommand> [flags]``.

Exit codes: 0 success, 1 domain error, 2 numerical failure, 64 usage error.
"""

from __future__ import annotations

import argparse
import logging
import math
import os
import sys
from concurrent.futures import ProcessPoolExecutor

import numpy as np

from . import asymptotics, constants, explicit, io, shooting, spectrum, stability
from .radial_ode import (InitialConditions, IntegrationError, IntegratorConfig,
                         ProblemSpec, integrate)
from .testfunctions import bump

EXIT_DOMAIN, EXIT_NUMERIC, EXIT_USAGE = 1, 2, 64
WORKERS_ENV = "POLYGELFAND_WORKERS"


class UsageError(Exception):
    pass


class Parser(argparse.ArgumentParser):
    def error(self, message):
        self.print_usage(sys.stderr)
        self.exit(EXIT_USAGE, f"{self.prog}: error: {message}\n")


def floats(text):
    """Comma-separated floats; empty string gives an empty tuple."""
    return tuple(float(x) for x in text.split(",") if x.strip())


def int_range(text):
    """'5..30', '3,5,7' or a mix like '3,5..7' (inclusive)."""
    out = []
    for part in text.split(","):
        if ".." in part:
            a, b = map(int, part.split(".."))
            if b < a:
                raise UsageError(f"empty range {part!r}")
            out.extend(range(a, b + 1))
        elif part.strip():
            out.append(int(part))
    return out


def table_spec(text):
    """'r1..r2:steps' -> (r1, r2, steps)."""
    span, _, steps = text.partition(":")
    a, b = span.split("..")
    return float(a), float(b), int(steps or 101)


def _config(args, **extra):
    kw = {k: getattr(args, k) for k in ("rtol", "atol", "r0") if getattr(args, k, None) is not None}
    if getattr(args, "rmax", None) is not None:
        kw["r_max"] = args.rmax
    kw.update(extra)
    return IntegratorConfig(**kw)


def _emit(args, payload):
    text = io.dumps(payload)
    if getattr(args, "output", None):
        with open(args.output, "w") as fh:
            fh.write(text)
    else:
        sys.stdout.write(text)


# -- subcommands -----------------------------------------------------------------

def cmd_integrate(args):
    problem = ProblemSpec(args.m, args.n)
    ic = InitialConditions(args.ic)
    if len(ic) != problem.m:
        raise ValueError(f"--ic needs {problem.m} values")
    traj = integrate(problem, ic, _config(args))
    outcome = shooting.classify(traj)
    if args.format == "csv":
        if not args.output:
            raise UsageError("--format csv needs --output (a JSON sidecar is written next to it)")
        io.write_trajectory(traj, args.output)
        return
    _emit(args, {
        "m": problem.m, "n": problem.n, "ic": ic.alpha,
        "terminal_event": traj.terminal_event, "r_event": traj.r_event,
        "outcome": outcome.tag, "samples": len(traj), "terminal": traj.terminal,
    })


def cmd_shoot(args):
    if args.m % 2:
        raise shooting.DomainError(f"Phi_alpha is defined for m even (got m={args.m})")
    if len(args.beta_prime) + 2 != args.m:
        raise ValueError(f"--beta-prime needs m - 2 = {args.m - 2} values")
    res = shooting.phi_alpha(args.n, args.alpha, args.beta_prime, args.tol, _config(args))
    _emit(args, {"phi": res.phi_estimate, "bracket": res.bracket,
                 "evaluations": res.evaluations, "warnings": res.warnings})


def cmd_scan_phi(args):
    pairs = shooting.scan_phi_monotonicity(args.n, args.alpha, args.axis, args.grid,
                                           args.base or None, args.m, args.tol, _config(args))
    _emit(args, {"axis": args.axis, "scan": [{"t": t, "phi": p} for t, p in pairs]})


def cmd_asymptotics(args):
    traj = io.read_trajectory(args.trajectory)
    _emit(args, asymptotics.analyze(traj))


def cmd_constants(args):
    table = constants.constants_table(args.n, args.k, args.m, args.alpha, args.beta)
    payload = {"table": table}
    if args.verify:
        rng = np.random.default_rng(args.seed)
        checks = []
        for variant in constants.VARIANTS:
            q = constants.HRQuery(args.n, args.k, args.alpha, args.beta)
            a = 1.0 + math.e + rng.uniform(0, 2)
            phi = bump(a, a * rng.uniform(1.5, 4))
            try:
                lhs, rhs, margin = constants.verify_hr_inequality(q, variant, phi, R=math.e)
            except ValueError as exc:
                checks.append({"variant": variant, "error": str(exc)})
                continue
            checks.append({"variant": variant, "support": phi.support, "lhs": lhs,
                           "rhs": rhs, "margin": margin})
        payload["verify"] = checks
    _emit(args, payload)


def cmd_spectrum(args):
    if args.plot_data:
        t, p = spectrum.plot_samples(args.m, args.n)
        io.write_csv(args.plot_data, ["t", "P"], zip(t, p))
    if args.scan:
        reports = [spectrum.Pm_roots(args.m, n, args.tol) for n in int_range(args.scan)]
        _emit(args, {"m": args.m, "scan": [
            {"n": r.n, "lambda_S": r.lambda_S, "has_nonreal": r.has_nonreal} for r in reports]})
        return
    if args.n is None:
        raise UsageError("spectrum needs --n or --scan")
    rep = spectrum.Pm_roots(args.m, args.n, args.tol)
    payload = {"report": rep}
    if args.m % 2 == 0:
        payload["n_star"] = spectrum.n_star(args.m)
    _emit(args, payload)


def cmd_stability(args):
    traj = io.read_trajectory(args.trajectory)
    family = {"scaled": "scaled_cutoff", "dyadic": "dyadic", None: None}[args.family]
    payload = {"search": stability.instability_search(traj, family=family)}
    if args.certify:
        payload["certificate"] = stability.socs_certificate(traj)
    _emit(args, payload)


def cmd_explicit(args):
    sol = explicit.ExplicitSolution(args.m, args.lam)
    if args.table:
        a, b, steps = args.table
        r = np.linspace(a, b, steps)
        u = explicit.eval_explicit(sol, r)
        if args.format == "csv":
            out = open(args.output, "w", newline="") if args.output else sys.stdout
            try:
                io.write_csv(out, ["r", "u"], zip(r, u))
            finally:
                if out is not sys.stdout:
                    out.close()
            return
        _emit(args, {"m": args.m, "lambda": args.lam, "r": r, "u": u})
        return
    payload = {"m": args.m, "lambda": args.lam, "n": 2 * args.m, "c": sol.c}
    if args.emit_ic or not args.residual:
        if args.m >= 2:
            alpha, beta = explicit.explicit_initial_values(args.m, args.lam)
            payload.update(alpha=alpha, beta=beta)
        else:
            payload.update(alpha=sol.c, beta=[])
    if args.residual:
        r = np.geomspace(0.1, 10, 200)
        payload["residual"] = explicit.explicit_residual(args.m, r, args.lam)
        payload["residual_range"] = [0.1, 10.0]
    _emit(args, payload)


# -- sweep ------------------------------------------------------------------------

def _sweep_job(job):
    task, key, params = job
    try:
        if task == "spectrum":
            m, n = params
            rep = spectrum.Pm_roots(m, n)
            return key, {"has_nonreal": rep.has_nonreal, "lambda_S": rep.lambda_S}
        if task == "phi":
            m, n, alpha, tol, cfg = params
            res = shooting.phi_alpha(n, alpha, (0.0,) * (m - 2), tol, cfg)
            return key, {"phi": res.phi_estimate, "bracket": res.bracket}
        if task == "classify":
            m, n, ic, cfg = params
            out = shooting.classify(integrate(ProblemSpec(m, n), InitialConditions(ic), cfg))
            return key, {"ic": ic, "outcome": out.tag.value, "r_event": out.r_event}
    except (ValueError, RuntimeError) as exc:
        return key, {"error": f"{type(exc).__name__}: {exc}"}
    raise ValueError(f"unknown sweep task {task!r}")


def sweep_jobs(args):
    rng = np.random.default_rng(args.seed)
    cfg = _config(args)
    jobs = []
    for m in int_range(args.m):
        for n in int_range(args.n):
            if args.task == "spectrum":
                jobs.append(("spectrum", (m, n), (m, n)))
            elif args.task == "phi":
                for i, a in enumerate(args.alpha):
                    jobs.append(("phi", (m, n, i), (m, n, a, args.tol, cfg)))
            else:
                for i in range(args.samples):
                    ic = (float(rng.uniform(-1, 1)), *map(float, rng.uniform(-2, 2, m - 1)))
                    jobs.append(("classify", (m, n, i), (m, n, ic, cfg)))
    return jobs


def run_sweep(jobs, workers):
    if workers <= 1:
        results = [_sweep_job(j) for j in jobs]
    else:
        with ProcessPoolExecutor(max_workers=workers) as pool:
            results = list(pool.map(_sweep_job, jobs))
    return sorted(results, key=lambda kv: kv[0])


def cmd_sweep(args):
    workers = args.workers or int(os.environ.get(WORKERS_ENV, "1"))
    results = run_sweep(sweep_jobs(args), workers)
    _emit(args, {"task": args.task, "seed": args.seed,
                 "results": [{"key": list(k), **v} for k, v in results]})


# -- parser -------------------------------------------------------------------------

def _integrator_flags(p, rmax=None):
    p.add_argument("--rmax", type=float, default=rmax, help="integration horizon")
    p.add_argument("--rtol", type=float)
    p.add_argument("--atol", type=float)
    p.add_argument("--r0", type=float, help="start offset from the origin")


def build_parser():
    common = Parser(add_help=False)
    common.add_argument("--config", help="flat key=value file; explicit flags win")
    common.add_argument("--output", "-o", help="output path (default: stdout)")
    common.add_argument("--format", choices=("json", "csv"), default="json")
    common.add_argument("--seed", type=int, default=0)
    common.add_argument("-v", "--verbose", action="store_true")

    parser = Parser(prog="polygelfand",
                    description="Radial solutions of (-Delta)^m u = e^u.")
    sub = parser.add_subparsers(dest="command", required=True, parser_class=Parser)

    p = sub.add_parser("integrate", parents=[common], help="integrate one Cauchy problem")
    p.add_argument("--m", type=int, required=True)
    p.add_argument("--n", type=int, required=True)
    p.add_argument("--ic", type=floats, required=True, help="alpha_0,...,alpha_{m-1}")
    _integrator_flags(p)
    p.set_defaults(func=cmd_integrate)

    p = sub.add_parser("shoot", parents=[common], help="bisect for Phi_alpha")
    p.add_argument("--m", type=int, required=True)
    p.add_argument("--n", type=int, required=True)
    p.add_argument("--alpha", type=float, required=True)
    p.add_argument("--beta-prime", type=floats, default=())
    p.add_argument("--tol", type=float, default=1e-6)
    _integrator_flags(p)
    p.set_defaults(func=cmd_shoot)

    p = sub.add_parser("scan-phi", parents=[common], help="Phi_alpha along one axis")
    p.add_argument("--m", type=int, required=True)
    p.add_argument("--n", type=int, required=True)
    p.add_argument("--alpha", type=float, default=0.0)
    p.add_argument("--axis", type=int, default=1)
    p.add_argument("--grid", type=floats, required=True)
    p.add_argument("--base", type=floats, default=())
    p.add_argument("--tol", type=float, default=1e-6)
    _integrator_flags(p)
    p.set_defaults(func=cmd_scan_phi)

    p = sub.add_parser("asymptotics", parents=[common], help="tail regime of a trajectory CSV")
    p.add_argument("--trajectory", required=True)
    p.set_defaults(func=cmd_asymptotics)

    p = sub.add_parser("constants", parents=[common], help="Hardy-Rellich and related constants")
    p.add_argument("--n", type=int, required=True)
    p.add_argument("--k", type=int, default=1)
    p.add_argument("--m", type=int)
    p.add_argument("--alpha", type=float, default=0.0)
    p.add_argument("--beta", type=float, default=0.0)
    p.add_argument("--verify", action="store_true", help="quadrature check on random bumps")
    p.set_defaults(func=cmd_constants)

    p = sub.add_parser("spectrum", parents=[common], help="roots of P_m")
    p.add_argument("--m", type=int, required=True)
    p.add_argument("--n", type=int)
    p.add_argument("--scan", help="dimension range, e.g. 5..30")
    p.add_argument("--tol", type=float, default=1e-8)
    p.add_argument("--plot-data", help="write (t, P_m(t)) samples to this CSV")
    p.set_defaults(func=cmd_spectrum)

    p = sub.add_parser("stability", parents=[common], help="quadratic-form tests")
    p.add_argument("--trajectory", required=True)
    p.add_argument("--family", choices=("scaled", "dyadic"))
    p.add_argument("--certify", action="store_true")
    p.set_defaults(func=cmd_stability)

    p = sub.add_parser("explicit", parents=[common], help="closed-form n = 2m solutions")
    p.add_argument("--m", type=int, required=True)
    p.add_argument("--lambda", dest="lam", type=float, default=1.0)
    g = p.add_mutually_exclusive_group()
    g.add_argument("--emit-ic", action="store_true")
    g.add_argument("--residual", action="store_true")
    g.add_argument("--table", type=table_spec, help="r1..r2:steps")
    p.set_defaults(func=cmd_explicit)

    p = sub.add_parser("sweep", parents=[common], help="parallel grid over (m, n, ic)")
    p.add_argument("--task", choices=("classify", "phi", "spectrum"), default="classify")
    p.add_argument("--m", required=True, help="e.g. 2,4 or 1..3")
    p.add_argument("--n", required=True, help="e.g. 3..9")
    p.add_argument("--alpha", type=floats, default=(0.0,))
    p.add_argument("--samples", type=int, default=5, help="random ICs per (m, n)")
    p.add_argument("--tol", type=float, default=1e-6)
    p.add_argument("--workers", type=int, help=f"default: ${WORKERS_ENV} or 1")
    _integrator_flags(p)
    p.set_defaults(func=cmd_sweep)
    return parser, sub


def read_config(path):
    out = {}
    with open(path) as fh:
        for lineno, line in enumerate(fh, 1):
            line = line.split("#", 1)[0].strip()
            if not line:
                continue
            key, sep, value = line.partition("=")
            if not sep:
                raise UsageError(f"{path}:{lineno}: expected key=value")
            out[key.strip().replace("-", "_")] = value.strip()
    return out


def _apply_config(subparser, values):
    defaults = {}
    actions = {a.dest: a for a in subparser._actions}
    for key, raw in values.items():
        action = actions.get(key)
        if action is None or key in ("help", "config"):
            raise UsageError(f"unknown config key {key!r}")
        if isinstance(action, argparse._StoreTrueAction):
            defaults[key] = raw.lower() in ("1", "true", "yes", "on")
        else:
            defaults[key] = action.type(raw) if action.type else raw
        action.required = False
    subparser.set_defaults(**defaults)


def main(argv=None):
    argv = list(sys.argv[1:] if argv is None else argv)
    parser, sub = build_parser()
    pre = argparse.ArgumentParser(add_help=False)
    pre.add_argument("--config")
    known, _ = pre.parse_known_args(argv)
    command = next((a for a in argv if a in sub.choices), None)
    try:
        if known.config and command:
            _apply_config(sub.choices[command], read_config(known.config))
    except UsageError as exc:
        print(f"polygelfand: error: {exc}", file=sys.stderr)
        return EXIT_USAGE
    except OSError as exc:
        print(f"polygelfand: {exc}", file=sys.stderr)
        return EXIT_USAGE
    args = parser.parse_args(argv)
    try:
        logging.basicConfig(level=logging.INFO if args.verbose else logging.WARNING,
                            format="%(levelname)s %(name)s: %(message)s")
        args.func(args)
    except UsageError as exc:
        print(f"polygelfand: error: {exc}", file=sys.stderr)
        return EXIT_USAGE
    except (IntegrationError, shooting.ShootingError) as exc:
        print(f"polygelfand: numerical failure: {exc}", file=sys.stderr)
        return EXIT_NUMERIC
    except (ValueError, NotImplementedError) as exc:
        print(f"polygelfand: domain error: {exc}", file=sys.stderr)
        return EXIT_DOMAIN
    except OSError as exc:
        print(f"polygelfand: {exc}", file=sys.stderr)
        return EXIT_DOMAIN
    return 0


if __name__ == "__main__":
    sys.exit(main())
