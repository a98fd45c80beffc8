"""Monte Carlo sweep over sample sizes and penalty schemes.

Every cell (scheme, n, rep) simulates from the two-chain mixture, selects a
penalty by EBIC and scores the chosen fit. Data and fit seeds depend only on
``(seed, n, rep)``, so the two schemes see identical datasets.
"""
from concurrent.futures import ProcessPoolExecutor
from dataclasses import dataclass, asdict
import json
import logging
import os

import numpy as np

from .errors import GGMMError
from .evalmetrics import recovery_report
from .io import atomic_write, dump_json, fmt, SCHEMA_VERSION
from .mixture import EmControl
from .modelsel import PenaltyConfig, select
from .simulate import paper_params, sample_mixture

log = logging.getLogger(__name__)

DEFAULT_NS = (100, 300, 800, 2000, 5000)
METRICS = ("ad", "frobenius", "f1", "tp", "fp", "precision", "recall")


@dataclass(frozen=True)
class ReplicateConfig:
    schemes: tuple = ("nlogp", "logp")
    ns: tuple = DEFAULT_NS
    reps: int = 10
    p: int = 10
    pi: float = 0.5
    seed: int = 0
    c1: float = 0.1
    c2: float = 0.25
    grid_size: int = 10
    gamma_ebic: float = 0.5
    restarts: int = 5
    max_iters: int = 500
    tol: float = 1e-6
    jobs: int = 1


def cell_seeds(seed, n, rep):
    data_ss, fit_ss = np.random.SeedSequence([seed, n, rep]).spawn(2)
    return int(data_ss.generate_state(1)[0]), int(fit_ss.generate_state(1)[0])


def run_cell(cfg, scheme, n, rep):
    """One simulate-select-score cell. Failures are reported, not raised."""
    truth = paper_params(cfg.p, cfg.pi)
    data_seed, fit_seed = cell_seeds(cfg.seed, n, rep)
    x, _ = sample_mixture(truth, n, data_seed)
    pcfg = PenaltyConfig(scheme, cfg.c1, cfg.c2, cfg.grid_size, cfg.gamma_ebic)
    ctrl = EmControl(tol=cfg.tol, max_iters=cfg.max_iters, restarts=cfg.restarts, seed=fit_seed)
    out = {"scheme": scheme, "n": n, "rep": rep, "data_seed": data_seed}
    try:
        sel = select(x, 2, pcfg, ctrl)
    except GGMMError as exc:
        out["error"] = f"{type(exc).__name__}: {exc}"
        return out
    rr = recovery_report(sel.chosen_fit.params, truth)
    out.update(chosen_lambda=sel.chosen_lambda, converged=sel.chosen_fit.converged,
               **rr.to_dict())
    return out


def _cell_path(out_dir, scheme, n, rep):
    return os.path.join(out_dir, "cells", f"{scheme}-n{n}-r{rep}.json")


def _config_key(cfg):
    d = asdict(cfg)
    d.pop("jobs")
    return json.dumps(d, sort_keys=True, default=list)


def _run_and_store(args):
    cfg, scheme, n, rep, path = args
    res = run_cell(cfg, scheme, n, rep)
    res["config_key"] = _config_key(cfg)
    if path is not None:
        dump_json(path, res)
    return res


def run(cfg, out_dir=None, resume=True):
    """Run every cell and return the list of cell results.

    With ``out_dir`` each finished cell is persisted under ``cells/``; with
    ``resume`` an existing cell file from the same config is reused.
    """
    tasks, results = [], {}
    for scheme in cfg.schemes:
        for n in cfg.ns:
            for rep in range(cfg.reps):
                path = _cell_path(out_dir, scheme, n, rep) if out_dir else None
                if path and resume and os.path.exists(path):
                    with open(path) as fh:
                        prev = json.load(fh)
                    if prev.get("config_key") == _config_key(cfg):
                        results[(scheme, n, rep)] = prev
                        continue
                tasks.append((cfg, scheme, n, rep, path))
    if cfg.jobs > 1 and len(tasks) > 1:
        with ProcessPoolExecutor(max_workers=cfg.jobs) as pool:
            done = list(pool.map(_run_and_store, tasks))
    else:
        done = [_run_and_store(t) for t in tasks]
    for t, res in zip(tasks, done):
        results[t[1:4]] = res
    return [results[key] for key in sorted(results, key=lambda s: (cfg.schemes.index(s[0]), s[1], s[2]))]


def summarize(cfg, cells):
    """Mean of each metric per (scheme, n, cluster) over successful reps."""
    rows = []
    for scheme in cfg.schemes:
        for n in cfg.ns:
            ok = [c for c in cells if c["scheme"] == scheme and c["n"] == n and "error" not in c]
            failed = sum(1 for c in cells if c["scheme"] == scheme and c["n"] == n and "error" in c)
            for k in range(2):
                row = {"scheme": scheme, "n": n, "cluster": k + 1, "reps": len(ok), "failed": failed}
                for m in METRICS:
                    if not ok:
                        row[m] = float("nan")
                    elif m == "ad":
                        row[m] = float(np.mean([c["pi_ad"] for c in ok]))
                    else:
                        row[m] = float(np.mean([c["per_cluster"][k][m] for c in ok]))
                rows.append(row)
    return rows


def write_summary(cfg, rows, out_dir):
    cols = ["scheme", "n", "cluster", "reps", "failed", *METRICS]
    lines = [",".join(cols)]
    for r in rows:
        lines.append(",".join(fmt(r[c]) if isinstance(r[c], float) else str(r[c]) for c in cols))
    atomic_write(os.path.join(out_dir, "summary.csv"), "\n".join(lines) + "\n")
    dump_json(os.path.join(out_dir, "summary.json"),
              {"schema_version": SCHEMA_VERSION, "kind": "summary",
               "config": {k: list(v) if isinstance(v, tuple) else v
                          for k, v in asdict(cfg).items() if k != "jobs"},
               "rows": rows})
