"""Command-line entry point: ``sggmm {simulate,fit,eval,replicate}``."""
import argparse
import logging
import os
import sys
import time

import numpy as np

from . import io
from .errors import GGMMError, InvalidInput
from .evalmetrics import recovery_report
from .glasso import GlassoConfig
from .mixture import EmControl, MixtureParams, em_fit
from .modelsel import PenaltyConfig, ebic, select
from .replicate import ReplicateConfig, run as run_replicate, summarize, write_summary
from .simulate import chain_precision, sample_mixture

log = logging.getLogger("sggmm")


def resolve_seed(seed):
    if seed is not None:
        return seed
    env = os.environ.get("GGMM_SEED")
    if env is None:
        return 0
    try:
        return int(env)
    except ValueError:
        raise InvalidInput(f"GGMM_SEED must be an integer, got {env!r}") from None


def parse_scheme(spec, p, diag, offdiag):
    thetas = []
    for tok in spec.split(":"):
        tok = tok.strip().lower()
        if not tok.startswith("chain") or not tok[5:].isdigit():
            raise InvalidInput(f"unknown component scheme {tok!r} (expected chainD, e.g. chain1)")
        thetas.append(chain_precision(p, int(tok[5:]), diag, offdiag))
    return np.stack(thetas)


def parse_pi(spec, k):
    vals = [float(v) for v in spec.split(",")]
    if len(vals) == 1 and k == 2:
        vals = [vals[0], 1.0 - vals[0]]
    elif len(vals) == 1 and k == 1:
        vals = [1.0]
    if len(vals) != k:
        raise InvalidInput(f"--pi gives {len(vals)} weights for {k} components")
    pi = np.array(vals)
    if abs(pi.sum() - 1.0) > 1e-9:
        raise InvalidInput(f"--pi weights sum to {pi.sum()}, not 1")
    return pi / pi.sum()


def cmd_simulate(args):
    seed = resolve_seed(args.seed)
    if args.params:
        params = io.params_from_json(io.load_json(args.params))
    else:
        thetas = parse_scheme(args.scheme, args.p, args.diag, args.offdiag)
        params = MixtureParams(parse_pi(args.pi, len(thetas)), thetas)
    x, truth = sample_mixture(params, args.n, seed)
    header = [f"V{i + 1}" for i in range(params.p)] if args.header else None
    io.write_csv(args.out, x, header)
    io.dump_json(args.truth, io.truth_to_json(truth))
    log.info("wrote %d x %d data to %s and truth to %s", x.shape[0], x.shape[1], args.out, args.truth)
    return 0


def cmd_fit(args):
    seed = resolve_seed(args.seed)
    x, names = io.read_csv(args.data, header=args.header)
    if args.center:
        x = x - x.mean(axis=0)
    n, p = x.shape
    gcfg = GlassoConfig(max_sweeps=args.glasso_max_sweeps, conv_tol=args.glasso_tol)
    ctrl = EmControl(tol=args.tol, max_iters=args.max_iters, restarts=args.restarts,
                     seed=seed, init=args.init, glasso=gcfg)
    pcfg = PenaltyConfig(args.lambda_scheme, args.c1, args.c2, args.grid, args.gamma_ebic,
                         args.penalized_ebic)
    t0 = time.perf_counter()
    if args.lam is not None:
        fit = em_fit(x, args.k, args.lam, ctrl)
        grid, values, chosen = [args.lam], [ebic(fit, x, pcfg.gamma_ebic, pcfg.penalized_ebic)], args.lam
    else:
        sel = select(x, args.k, pcfg, ctrl)
        fit, grid, values, chosen = sel.chosen_fit, sel.grid, sel.ebic_values, sel.chosen_lambda
    elapsed = time.perf_counter() - t0
    out = {
        "schema_version": io.SCHEMA_VERSION, "kind": "fit",
        "n": n, **io.params_to_json(fit.params),
        "columns": names,
        "lambda_scheme": None if args.lam is not None else args.lambda_scheme,
        "chosen_lambda": chosen, "grid": grid,
        "ebic": [v if np.isfinite(v) else None for v in values],
        "edges": io.edge_lists(fit.params),
        "loglik_trace": fit.loglik_trace,
        "converged": fit.converged, "glasso_converged": fit.glasso_converged,
        "iterations": fit.iterations, "restart_index": fit.restart_index,
        "seed": seed, "center": args.center,
        "wall_clock_seconds": elapsed,
    }
    io.dump_json(args.out, out)
    if args.dot_dir:
        for k, theta in enumerate(fit.params.thetas):
            io.atomic_write(os.path.join(args.dot_dir, f"cluster{k + 1}.dot"),
                            io.to_dot(theta, f"cluster{k + 1}", names))
    if not fit.converged:
        log.warning("EM stopped at max_iters=%d without meeting tol", args.max_iters)
    log.info("lambda=%.4g pi=%s -> %s", chosen, np.round(fit.params.pi, 4).tolist(), args.out)
    return 0


def cmd_eval(args):
    fit = io.params_from_json(io.load_json(args.fit, "fit"))
    truth = io.params_from_json(io.load_json(args.truth, "truth"))
    io.check_compatible(fit, truth)
    rr = recovery_report(fit, truth, ad_reduce=args.ad)
    io.dump_json(args.out, {"schema_version": io.SCHEMA_VERSION, "kind": "metrics",
                            "ad_reduce": args.ad, **rr.to_dict()})
    for k, c in enumerate(rr.per_cluster):
        log.info("cluster %d: F=%.4f f1=%.4f tp=%d fp=%d", k + 1, c.frobenius, c.f1, c.tp, c.fp)
    log.info("pi AD=%.4f", rr.pi_ad)
    return 0


def cmd_replicate(args):
    schemes = ("nlogp", "logp") if args.scheme == "both" else (args.scheme,)
    cfg = ReplicateConfig(schemes=schemes, ns=tuple(args.ns), reps=args.reps, p=args.p,
                          seed=resolve_seed(args.seed), c1=args.c1, c2=args.c2,
                          grid_size=args.grid, gamma_ebic=args.gamma_ebic,
                          restarts=args.restarts, jobs=args.jobs)
    cells = run_replicate(cfg, args.out_dir, resume=not args.no_resume)
    rows = summarize(cfg, cells)
    write_summary(cfg, rows, args.out_dir)
    for r in rows:
        log.info("%s n=%d cluster %d: AD=%.4f F=%.4f f1=%.3f tp=%.1f fp=%.1f",
                 r["scheme"], r["n"], r["cluster"], r["ad"], r["frobenius"], r["f1"], r["tp"], r["fp"])
    return 0


def _penalty_flags(sp):
    sp.add_argument("--c1", type=float, default=0.1)
    sp.add_argument("--c2", type=float, default=0.25)
    sp.add_argument("--grid", type=int, default=10, help="number of penalty values")
    sp.add_argument("--gamma-ebic", type=float, default=0.5)
    sp.add_argument("--restarts", type=int, default=5)


def build_parser():
    ap = argparse.ArgumentParser(prog="sggmm", description="Sparse Gaussian graphical mixture models")
    ap.add_argument("-v", "--verbose", action="store_true")
    sub = ap.add_subparsers(dest="command", required=True)

    sp = sub.add_parser("simulate", help="sample data from a banded-precision mixture")
    sp.add_argument("--p", type=int, default=10)
    sp.add_argument("--n", type=int, default=300)
    sp.add_argument("--seed", type=int, default=None)
    sp.add_argument("--scheme", default="chain1:chain2",
                    help="colon-separated components, chainD = band at |i-j| = D")
    sp.add_argument("--pi", default="0.5", help="first weight for K=2, or comma list")
    sp.add_argument("--diag", type=float, default=1.0)
    sp.add_argument("--offdiag", type=float, default=-0.4)
    sp.add_argument("--params", help="truth-format JSON with pi and thetas (overrides --scheme)")
    sp.add_argument("--header", action="store_true")
    sp.add_argument("--out", default="data.csv")
    sp.add_argument("--truth", default="truth.json")
    sp.set_defaults(func=cmd_simulate)

    sp = sub.add_parser("fit", help="penalized EM with EBIC penalty selection")
    sp.add_argument("--data", required=True)
    sp.add_argument("--k", type=int, default=2)
    sp.add_argument("--lambda-scheme", choices=("nlogp", "logp"), default="nlogp")
    sp.add_argument("--lambda", dest="lam", type=float, default=None,
                    help="fit a single fixed penalty instead of a grid")
    _penalty_flags(sp)
    sp.add_argument("--penalized-ebic", action="store_true")
    sp.add_argument("--seed", type=int, default=None)
    sp.add_argument("--init", choices=("dirichlet", "kmeans"), default="dirichlet")
    sp.add_argument("--max-iters", type=int, default=500)
    sp.add_argument("--tol", type=float, default=1e-6)
    sp.add_argument("--glasso-tol", type=float, default=1e-6)
    sp.add_argument("--glasso-max-sweeps", type=int, default=200)
    sp.add_argument("--center", action=argparse.BooleanOptionalAction, default=True)
    sp.add_argument("--header", action="store_true")
    sp.add_argument("--dot-dir", default=None)
    sp.add_argument("--out", default="fit.json")
    sp.set_defaults(func=cmd_fit)

    sp = sub.add_parser("eval", help="score a fit against a truth file")
    sp.add_argument("--fit", required=True)
    sp.add_argument("--truth", required=True)
    sp.add_argument("--ad", choices=("max", "mean"), default="max")
    sp.add_argument("--out", default="metrics.json")
    sp.set_defaults(func=cmd_eval)

    sp = sub.add_parser("replicate", help="Monte Carlo sweep over n for both penalty schemes")
    sp.add_argument("--scheme", choices=("nlogp", "logp", "both"), default="both")
    sp.add_argument("--ns", type=int, nargs="+", default=[100, 300, 800, 2000, 5000])
    sp.add_argument("--reps", type=int, default=10)
    sp.add_argument("--p", type=int, default=10)
    _penalty_flags(sp)
    sp.add_argument("--seed", type=int, default=None)
    sp.add_argument("--jobs", type=int, default=1)
    sp.add_argument("--no-resume", action="store_true")
    sp.add_argument("--out-dir", default="replicate_out")
    sp.set_defaults(func=cmd_replicate)
    return ap


def main(argv=None):
    args = build_parser().parse_args(argv)
    logging.basicConfig(level=logging.DEBUG if args.verbose else logging.INFO,
                        format="%(levelname)s %(message)s")
    try:
        return args.func(args)
    except (GGMMError, OSError) as exc:
        log.error("%s: %s", type(exc).__name__, exc)
        return 1


if __name__ == "__main__":
    sys.exit(main())
