"""Command-line front end.

    curlcurl convergence --dim 2 --example ex1 --n 12 20 28 --kappa 1 --out runs/ex1
    curlcurl pointsource --n 120 --kappa -10000 --out runs/ps
    curlcurl maxwell --dim 2 --config ring.json --out runs/ring
    curlcurl spectrum --dim 2 --n 8 --kappa 1 --out runs/spectrum

Every command writes a JSON report (``"schema": 1``) next to its data files.
The exit status is 0 iff every solve converged and all outputs were written.
"""
import argparse
import json
import math
import sys
import time
from pathlib import Path

import numpy as np

from .basis import gauss_legendre
from .fields import GridSnapshot, divergence_max, error_norms, evaluate_field_2d, project_rhs_2d, \
    project_rhs_3d
from .maxwell import MaxwellConfig, MaxwellSolveError, run_maxwell_2d, run_maxwell_3d
from .problems import point_source_2d, ring_current, ring_permittivity, smooth_2d, smooth_3d, \
    two_point_current
from .solver2d import CurlCurlConfig, ResonanceError, discretization, pgmres_2d
from .solver3d import pgmres_3d
from .spectra import (MAX_N_2D, MAX_N_3D, assemble_dense_2d, assemble_dense_3d_interior,
                      preconditioned_spectrum, write_spectrum)

EXAMPLES = {"ex1": 2, "ex5": 3}
EXIT_NOT_CONVERGED = 1
EXIT_USAGE = 2
EXIT_RESONANCE = 3


def _fmt(x):
    if isinstance(x, (bool, np.bool_)):
        return "true" if x else "false"
    if isinstance(x, (int, np.integer)):
        return str(int(x))
    if isinstance(x, (float, np.floating)):
        x = float(x)
        if not math.isfinite(x):
            raise ValueError("report values must be finite")
        s = "%.17g" % x
        return s if any(c in s for c in ".en") else s + ".0"
    return None


def dumps17(obj, indent=2, _level=0):
    """JSON text with every float written to 17 significant digits."""
    pad = " " * (indent * (_level + 1))
    end = " " * (indent * _level)
    s = _fmt(obj)
    if s is not None:
        return s
    if obj is None or isinstance(obj, str):
        return json.dumps(obj)
    if isinstance(obj, dict):
        if not obj:
            return "{}"
        items = [f"{pad}{json.dumps(str(k))}: {dumps17(v, indent, _level + 1)}" for k, v in obj.items()]
        return "{\n" + ",\n".join(items) + "\n" + end + "}"
    if isinstance(obj, (list, tuple, np.ndarray)):
        if len(obj) == 0:
            return "[]"
        return "[" + ", ".join(dumps17(v, indent, _level + 1) for v in obj) + "]"
    raise TypeError(f"cannot serialize {type(obj).__name__}")


def _write_report(path, report):
    path = Path(path)
    path.parent.mkdir(parents=True, exist_ok=True)
    path.write_text(dumps17(report) + "\n")
    return str(path)


def _base_report(args, argv):
    return {"schema": 1, "command": args.command, "argv": list(argv)}


def _solver_cfg(args, kappa):
    return CurlCurlConfig(kappa, args.eps, args.max_iter)


def cmd_convergence(args, argv):
    dim = EXAMPLES[args.example]
    if args.dim is not None and args.dim != dim:
        raise _Usage(f"example {args.example} is {dim}D, got --dim {args.dim}")
    out = Path(args.out)
    out.mkdir(parents=True, exist_ok=True)
    prob = smooth_2d() if dim == 2 else smooth_3d()
    rows, runs, ok = [], [], True
    for N in args.n:
        t0 = time.perf_counter()
        disc = discretization(N)
        cfg = _solver_cfg(args, args.kappa)
        if dim == 2:
            F = project_rhs_2d(prob.source(args.kappa), N)
            U, rep = pgmres_2d(F, cfg, disc.eig, disc.S, disc.M, precondition=not args.no_precond)
        else:
            F = project_rhs_3d(prob.source(args.kappa), N)
            U, rep = pgmres_3d(F, cfg, disc, precondition=not args.no_precond)
        wall = time.perf_counter() - t0
        err = error_norms(U, prob.u, prob.curl)
        div = divergence_max(U, 64 if dim == 2 else 16)
        ok &= rep.converged
        rows.append((N, rep.iterations, err.l2, err.hcurl, wall))
        runs.append({"N": N, "kappa": args.kappa, "eps": args.eps, "iterations": rep.iterations,
                     "converged": rep.converged, "residual_history": rep.residual_history,
                     "l2_error": err.l2, "hcurl_error": err.hcurl, "max_div": div,
                     "wall_time_s": wall})
    csv = out / "convergence.csv"
    with open(csv, "w") as fh:
        fh.write("N,iters,l2,hcurl,time\n")
        for N, its, l2, hc, wall in rows:
            fh.write(f"{N},{its},{l2:.17g},{hc:.17g},{wall:.17g}\n")
    report = dict(_base_report(args, argv), dim=dim, example=args.example, runs=runs,
                  files=[str(csv), str(out / "report.json")])
    _write_report(out / "report.json", report)
    return report, ok


def cmd_pointsource(args, argv):
    if not args.sigma > 0:
        raise _Usage("--sigma must be positive")
    out = Path(args.out)
    t0 = time.perf_counter()
    N = args.n
    disc = discretization(N)
    F = project_rhs_2d(point_source_2d(args.sigma), N, gauss_legendre(args.quad or 2 * N))
    U, rep = pgmres_2d(F, _solver_cfg(args, args.kappa), disc.eig, disc.S, disc.M,
                       precondition=not args.no_precond)
    wall = time.perf_counter() - t0
    x = np.linspace(-1.0, 1.0, args.resolution)
    u, _ = evaluate_field_2d(U, x)
    snap = GridSnapshot((x, x), u[:1], {"N": N, "kappa": args.kappa, "sigma": args.sigma,
                                        "field": "u1"})
    files = [str(p) for p in snap.write(out / "u1")]
    report = dict(_base_report(args, argv), N=N, kappa=args.kappa, eps=args.eps,
                  sigma=args.sigma, iterations=rep.iterations, converged=rep.converged,
                  residual_history=rep.residual_history, max_div=divergence_max(U, 64),
                  wall_time_s=wall, files=files + [str(out / "report.json")])
    _write_report(out / "report.json", report)
    return report, rep.converged


_MAXWELL_KEYS = {"N", "tau", "T", "eps0", "mu0", "medium", "eps_r", "source", "sigma",
                 "snapshot_times", "snapshot_resolution", "eps", "max_iter"}


def _maxwell_config(args):
    conf = {}
    if args.config:
        try:
            conf = json.loads(Path(args.config).read_text())
        except (OSError, json.JSONDecodeError) as exc:
            raise _Usage(f"cannot read config file: {exc}")
        if not isinstance(conf, dict):
            raise _Usage("config file must hold a JSON object")
        unknown = set(conf) - _MAXWELL_KEYS
        if unknown:
            raise _Usage(f"unknown config field {sorted(unknown)[0]!r}")
    for key, flag in (("N", args.n), ("tau", args.tau), ("T", args.T), ("eps", args.eps),
                      ("max_iter", args.max_iter)):
        if flag is not None:
            conf[key] = flag
    dim = args.dim
    defaults = {"N": 32, "tau": 0.02 if dim == 3 else 0.01, "T": 0.0, "eps0": 1.0, "mu0": 1.0,
                "medium": "vacuum", "source": "point", "snapshot_times": [],
                "snapshot_resolution": 65 if dim == 2 else 17, "eps": 1e-12, "max_iter": 500}
    conf = dict(defaults, **conf)

    def num(key, kind=float):
        try:
            return kind(conf[key])
        except (TypeError, ValueError):
            raise _Usage(f"config field {key!r} must be a number")

    medium = conf["medium"]
    if medium == "ring":
        if dim == 3:
            raise _Usage("config field 'medium': 'ring' is 2D only")
        eps_r = ring_permittivity
    elif medium == "vacuum":
        eps_r = num("eps_r") if "eps_r" in conf else 1.0
    else:
        raise _Usage(f"config field 'medium' must be 'ring' or 'vacuum', got {medium!r}")
    source = conf["source"]
    if source == "point":
        sigma = num("sigma") if "sigma" in conf else (0.04 if dim == 2 else 0.05)
        J = ring_current(sigma) if dim == 2 else two_point_current(sigma)
    elif source == "none":
        J = None
    else:
        raise _Usage(f"config field 'source' must be 'point' or 'none', got {source!r}")
    try:
        times = tuple(float(t) for t in conf["snapshot_times"])
    except (TypeError, ValueError):
        raise _Usage("config field 'snapshot_times' must be a list of numbers")
    try:
        return MaxwellConfig(N=num("N", int), tau=num("tau"), T=num("T"), eps0=num("eps0"),
                             mu0=num("mu0"), eps_r=eps_r, J=J, snapshot_times=times,
                             snapshot_resolution=num("snapshot_resolution", int),
                             solver_eps=num("eps"), max_iter=num("max_iter", int))
    except ValueError as exc:
        raise _Usage(f"invalid config: {exc}")


def cmd_maxwell(args, argv):
    cfg = _maxwell_config(args)
    runner = run_maxwell_2d if args.dim == 2 else run_maxwell_3d
    try:
        run = runner(cfg)
    except MaxwellSolveError as exc:
        report = dict(_base_report(args, argv), error=str(exc), step=exc.step)
        _write_report(Path(args.out) / "report.json", report)
        return report, False
    rep = run.write(cfg, args.out)
    report = dict(_base_report(args, argv), dim=args.dim, **rep,
                  iterations=run.iterations, wall_time_s=run.wall_time)
    report["files"] = rep["files"] + [str(Path(args.out) / "report.json")]
    _write_report(Path(args.out) / "report.json", report)
    return report, True


def cmd_spectrum(args, argv):
    cap = MAX_N_2D if args.dim == 2 else MAX_N_3D
    if args.n > cap:
        raise _Usage(f"--n {args.n} exceeds the dense capacity limit {cap} for dim {args.dim}")
    t0 = time.perf_counter()
    pair = (assemble_dense_2d if args.dim == 2 else assemble_dense_3d_interior)(args.n, args.kappa)
    eigs = preconditioned_spectrum(pair)
    out = Path(args.out)
    summary = write_spectrum(out / "spectrum", eigs, pair)
    report = dict(_base_report(args, argv), **{k: v for k, v in summary.items() if k != "schema"},
                  wall_time_s=time.perf_counter() - t0,
                  files=[str(out / "spectrum.csv"), str(out / "spectrum.json"),
                         str(out / "report.json")])
    _write_report(out / "report.json", report)
    return report, True


class _Usage(Exception):
    pass


def _order(text):
    try:
        n = int(text)
    except ValueError:
        raise argparse.ArgumentTypeError(f"invalid order {text!r}")
    if n < 4:
        raise argparse.ArgumentTypeError(f"polynomial order must be >= 4, got {n}")
    return n


def build_parser():
    p = argparse.ArgumentParser(prog="curlcurl", description=__doc__.split("\n")[0])
    sub = p.add_subparsers(dest="command", required=True)

    def solver_flags(sp, kappa=1.0):
        sp.add_argument("--kappa", type=float, default=kappa)
        sp.add_argument("--eps", type=float, default=1e-12)
        sp.add_argument("--max-iter", type=int, default=500)
        sp.add_argument("--no-precond", action="store_true",
                        help="plain GMRES without the auxiliary preconditioner")

    c = sub.add_parser("convergence", help="error/iteration sweep over N for a manufactured solution")
    c.add_argument("--dim", type=int, choices=(2, 3))
    c.add_argument("--example", choices=sorted(EXAMPLES), default="ex1")
    c.add_argument("--n", type=_order, nargs="+", required=True)
    solver_flags(c)
    c.add_argument("--out", default="runs/convergence")

    s = sub.add_parser("pointsource", help="2D solve driven by two Gaussian point sources")
    s.add_argument("--n", type=_order, default=128)
    solver_flags(s, kappa=-10000.0)
    s.add_argument("--sigma", type=float, default=0.01)
    s.add_argument("--quad", type=int, default=None, help="quadrature points per axis (default 2N)")
    s.add_argument("--resolution", type=int, default=201)
    s.add_argument("--out", default="runs/pointsource")

    m = sub.add_parser("maxwell", help="Crank-Nicolson Maxwell run from a JSON config")
    m.add_argument("--dim", type=int, choices=(2, 3), default=2)
    m.add_argument("--config", default=None)
    m.add_argument("--n", type=_order, default=None)
    m.add_argument("--tau", type=float, default=None)
    m.add_argument("--T", type=float, default=None)
    m.add_argument("--eps", type=float, default=None)
    m.add_argument("--max-iter", type=int, default=None)
    m.add_argument("--out", default="runs/maxwell")

    e = sub.add_parser("spectrum", help="eigenvalues of the preconditioned dense operator")
    e.add_argument("--dim", type=int, choices=(2, 3), default=2)
    e.add_argument("--n", type=_order, required=True)
    e.add_argument("--kappa", type=float, default=1.0)
    e.add_argument("--out", default="runs/spectrum")
    return p


COMMANDS = {"convergence": cmd_convergence, "pointsource": cmd_pointsource,
            "maxwell": cmd_maxwell, "spectrum": cmd_spectrum}


def main(argv=None):
    argv = sys.argv[1:] if argv is None else list(argv)
    parser = build_parser()
    args = parser.parse_args(argv)
    if getattr(args, "eps", None) is not None and not args.eps > 0:
        parser.error("--eps must be positive")
    try:
        report, ok = COMMANDS[args.command](args, argv)
    except _Usage as exc:
        parser.error(str(exc))
    except ResonanceError as exc:
        print(f"resonance: {exc}", file=sys.stderr)
        return EXIT_RESONANCE
    print(json.dumps({k: report[k] for k in ("command", "files") if k in report}))
    return 0 if ok else EXIT_NOT_CONVERGED


if __name__ == "__main__":
    sys.exit(main())
