"""Command-line entry point: ``mixclust <subcommand> ...``.

Exit status is 0 on success, 1 on a usage error and 2 when the command
itself fails.
"""

from __future__ import annotations

import argparse
import sys
from pathlib import Path

from . import io as mio
from .bench import InitPolicy, config_from_specfile, render_csv, run_experiment
from .cluster import bregman_hard_cluster, default_delta, default_tmax, error_decomposition, iterative_cluster
from .config import ConfigError, load_spec_file
from .divergence import chernoff_family
from .families import parse_family
from .loss import loss
from .model import make_labels, sample_dataset
from .spectral import SpectralConfig, spectral_init


class UsageError(Exception):
    pass


class Parser(argparse.ArgumentParser):
    def error(self, message):
        raise UsageError(f"{self.prog}: error: {message}")


def build_parser() -> Parser:
    p = Parser(prog="mixclust", description="Optimal-rate clustering of parametric mixtures.")
    sub = p.add_subparsers(dest="command", parser_class=Parser, metavar="COMMAND")
    sub.required = True

    c = sub.add_parser("chernoff", help="Chernoff information of a model spec")
    c.add_argument("--spec", required=True)
    c.add_argument("--header", action="store_true", help="print a header row first")

    s = sub.add_parser("simulate", help="draw labels and a dataset from a spec")
    s.add_argument("--spec", required=True)
    s.add_argument("--n", type=int)
    s.add_argument("--alpha", type=float)
    s.add_argument("--seed", type=int)
    s.add_argument("--data", required=True, help="output CSV")
    s.add_argument("--labels", required=True, help="output label file")

    i = sub.add_parser("init", help="spectral initialisation")
    i.add_argument("--data", required=True)
    i.add_argument("--k", type=int, required=True)
    i.add_argument("--restarts", type=int, default=10)
    i.add_argument("--lloyd-iters", type=int, default=20)
    i.add_argument("--seed", type=int, default=0)
    i.add_argument("--sufficient-stat", help="family name (e.g. poisson) or spec file")
    i.add_argument("--out", required=True)

    cl = sub.add_parser("cluster", help="run an iterative clustering algorithm")
    cl.add_argument("--data", required=True)
    cl.add_argument("--spec-shape", required=True, help="spec file giving families and k")
    cl.add_argument("--init", required=True, help="label file or 'spectral'")
    cl.add_argument("--algo", choices=("likelihood", "bregman"), default="likelihood")
    cl.add_argument("--tmax", type=int)
    cl.add_argument("--seed", type=int, default=0)
    cl.add_argument("--restarts", type=int, default=10)
    cl.add_argument("--out", required=True)

    sc = sub.add_parser("score", help="misclustering loss between two label files")
    sc.add_argument("--true", required=True, dest="true_labels")
    sc.add_argument("--pred", required=True)
    sc.add_argument("--k", type=int)

    b = sub.add_parser("benchmark", help="Monte Carlo rate experiment")
    b.add_argument("--config", required=True)
    b.add_argument("--out", help="CSV path (default: 'output' key or stdout)")
    b.add_argument("--replicates", type=int)
    b.add_argument("--master-seed", type=int)
    b.add_argument("--init", help="truth | spectral | corrupted(rho)")
    b.add_argument("--algos", help="comma-separated subset of oracle,likelihood,bregman,spectral_only")
    b.add_argument("--tmax", type=int)
    b.add_argument("--jobs", type=int, default=1)
    b.add_argument("--no-timing", action="store_true", help="write wall_ms as 0")

    dg = sub.add_parser("diagnose", help="ideal/excess error decomposition")
    dg.add_argument("--data", required=True)
    dg.add_argument("--spec", required=True)
    dg.add_argument("--true", required=True, dest="true_labels")
    dg.add_argument("--pred", required=True)
    dg.add_argument("--delta", type=float, help="default: sqrt(Chernoff)")
    return p


def _cmd_chernoff(args, out):
    sf = load_spec_file(args.spec)
    res = chernoff_family(sf.spec)
    if args.header:
        out.write("value,t_star,pair_a,pair_b\n")
    a, b = res.pair
    out.write(f"{res.value!r},{res.t_star!r},{a + 1},{b + 1}\n")


def _cmd_simulate(args, out):
    sf = load_spec_file(args.spec)
    n = args.n if args.n is not None else sf.n
    if n is None:
        raise UsageError("simulate: error: --n is required when the spec has no 'n'")
    alpha = args.alpha if args.alpha is not None else sf.alpha
    seed = args.seed if args.seed is not None else sf.seed
    z = make_labels(n, sf.k, alpha, seed)
    X = sample_dataset(sf.spec, z, seed)
    mio.write_data(args.data, X)
    mio.write_labels(args.labels, z)


def _stat_families(text, d):
    if Path(text).exists():
        sf = load_spec_file(text, require_params=False)
        if sf.d != d:
            raise ValueError(f"{text}: spec has d={sf.d}, data has {d} columns")
        return sf.families
    return (parse_family(text),) * d


def _cmd_init(args, out):
    X = mio.read_data(args.data)
    families = _stat_families(args.sufficient_stat, X.shape[1]) if args.sufficient_stat else None
    cfg = SpectralConfig(args.k, args.restarts, args.lloyd_iters, args.seed, families is not None)
    mio.write_labels(args.out, spectral_init(X, cfg, families))


def _cmd_cluster(args, out):
    X = mio.read_data(args.data)
    sf = load_spec_file(args.spec_shape, require_params=False)
    if sf.d != X.shape[1]:
        raise ValueError(f"{args.spec_shape}: d={sf.d} but the data has {X.shape[1]} columns")
    expfam = all(f.expfam for f in sf.families)
    if args.init == "spectral":
        cfg = SpectralConfig(sf.k, args.restarts, 20, args.seed, expfam)
        z0 = spectral_init(X, cfg, sf.families)
    else:
        z0 = mio.read_labels(args.init)
    tmax = args.tmax if args.tmax is not None else default_tmax(X.shape[0])
    run = iterative_cluster if args.algo == "likelihood" else bregman_hard_cluster
    result = run(X, sf.families, sf.k, z0, tmax)
    mio.write_labels(args.out, result.labels)
    out.write(f"iterations={result.iterations_run} converged={int(result.converged)} "
              f"empty_cluster_events={result.empty_cluster_events}\n")


def _cmd_score(args, out):
    z1 = mio.read_labels(args.true_labels)
    z2 = mio.read_labels(args.pred)
    k = args.k or int(max(z1.max(initial=0), z2.max(initial=0)) + 1)
    k = max(k, 1)
    report = loss(z1, z2, k)
    out.write("mistakes,rate\n")
    out.write(f"{report.mistakes},{report.rate!r}\n")


def _cmd_benchmark(args, out):
    sf = load_spec_file(args.config)
    overrides = dict(
        replicates=args.replicates,
        master_seed=args.master_seed,
        t_max=args.tmax,
        init=InitPolicy.parse(args.init) if args.init else None,
        algos=tuple(a.strip() for a in args.algos.split(",")) if args.algos else None,
        timing=False if args.no_timing else None,
    )
    cfg = config_from_specfile(sf, args.config, **overrides)
    jobs = args.jobs
    if args.jobs == 1 and "jobs" in sf.extras:
        jobs = int(sf.extras["jobs"][0])
    records, summary = run_experiment(cfg, jobs)
    text = render_csv(records, summary)
    path = args.out or cfg.output_path
    if path:
        try:
            with open(path, "w", encoding="utf-8", newline="") as fh:
                fh.write(text)
        except OSError as exc:
            raise OSError(f"cannot write {path}: {exc.strerror}") from None
    else:
        out.write(text)


def _cmd_diagnose(args, out):
    X = mio.read_data(args.data)
    sf = load_spec_file(args.spec)
    z_star = mio.read_labels(args.true_labels)
    z_hat = mio.read_labels(args.pred)
    delta = args.delta if args.delta is not None else default_delta(chernoff_family(sf.spec).value)
    dec = error_decomposition(X, sf.spec, z_star, z_hat, delta)
    out.write("loss,xi_ideal,xi_excess,delta\n")
    out.write(f"{dec.loss},{dec.xi_ideal!r},{dec.xi_excess!r},{delta!r}\n")


COMMANDS = {
    "chernoff": _cmd_chernoff,
    "simulate": _cmd_simulate,
    "init": _cmd_init,
    "cluster": _cmd_cluster,
    "score": _cmd_score,
    "benchmark": _cmd_benchmark,
    "diagnose": _cmd_diagnose,
}


def main(argv=None, out=None, err=None) -> int:
    out = out or sys.stdout
    err = err or sys.stderr
    parser = build_parser()
    try:
        args = parser.parse_args(argv)
        COMMANDS[args.command](args, out)
    except UsageError as exc:
        err.write(f"{exc}\n")
        err.write(parser.format_usage())
        return 1
    except (ConfigError, ValueError, TypeError, OSError, RuntimeError) as exc:
        err.write(f"mixclust: {exc}\n")
        return 2
    return 0


def main_entry() -> None:
    sys.exit(main())


if __name__ == "__main__":
    main_entry()
