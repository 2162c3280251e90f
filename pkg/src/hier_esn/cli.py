"""Command-line entry point: ``hier-esn <subcommand> ...``."""

from __future__ import annotations

import argparse
import json
import logging
import os
import sys

import numpy as np

from .analysis import memory_capacity, node_state_distribution, sub_reservoir_spectrum
from .harness import (ExperimentConfig, evaluate_genome, load_matrix, run_experiment,
                      run_matrix, summary_stats)
from .numerics import derive_seed
from .optimizer import optimize
from .readout import DEFAULT_LAMBDA
from .reservoir import HyperParams, load_network, network_to_dict
from .tasks import (TASK_DEFAULTS, gen_mackey_glass, gen_mso12, gen_narma10, load_santa_fe,
                    make_task, write_csv)


def _add_cell_args(p):
    p.add_argument("--task", choices=sorted(TASK_DEFAULTS), required=True)
    p.add_argument("--architecture", choices=("shallow", "wide", "deep"), default="deep")
    p.add_argument("--total-nodes", type=int, default=300)
    p.add_argument("--n-subs", type=int, default=3)
    p.add_argument("--lambda", dest="lam", type=float, default=DEFAULT_LAMBDA)
    p.add_argument("--data-path")
    p.add_argument("--seed", type=int, default=0, help="root seed")


def _config_from_args(args, **extra) -> ExperimentConfig:
    return ExperimentConfig(task=args.task, architecture=args.architecture,
                            total_nodes=args.total_nodes, n_subs=args.n_subs, lam=args.lam,
                            data_path=args.data_path, root_seed=args.seed, **extra)


def cmd_generate(args):
    if args.task == "narma10":
        u, y = gen_narma10(args.length, args.seed)
        write_csv(args.out, {"t": np.arange(args.length), "u": u.values, "y": y.values})
        return
    if args.task == "mackey_glass":
        s = gen_mackey_glass(args.length, seed=args.seed)
    elif args.task == "mso12":
        s = gen_mso12(args.length)
    else:
        if not args.data_path:
            raise FileNotFoundError("santa_fe needs --data-path")
        s = load_santa_fe(args.data_path)
    write_csv(args.out, {"t": np.arange(len(s)), "value": s.values})


def cmd_optimize(args):
    ga = {"generations": args.generations, "population_size": args.population,
          "crossover_rate": args.crossover_rate, "mutation_rate": args.mutation_rate}
    cfg = _config_from_args(args, ga=ga)
    split = make_task(cfg.task, derive_seed(cfg.root_seed, "task"), cfg.data_path)
    result = optimize(cfg.ga_config(), cfg.template(), split)
    os.makedirs(args.out, exist_ok=True)
    result.save_json(os.path.join(args.out, "ga_result.json"))
    result.save_csv(os.path.join(args.out, "ga_history.csv"))
    topo = cfg.template().with_params(HyperParams.from_genes(result.best_genome))
    with open(os.path.join(args.out, "network.json"), "w") as fh:
        json.dump(network_to_dict(topo, cfg.final_seeds()[0]), fh, indent=2)
    print(f"best validation NRMSE {result.best_nrmse:.6g} after {result.evaluations} evaluations")


def _read_genome(text):
    if os.path.isfile(text):
        with open(text) as fh:
            doc = json.load(fh)
        if isinstance(doc, dict):
            if "best_genome" in doc:
                return doc["best_genome"]
            return [v for p in doc["params"] for v in
                    (p["input_scaling"], p["spectral_radius"], p["leaky_rate"])]
        return doc
    return [float(x) for x in text.split(",")]


def cmd_evaluate(args):
    cfg = _config_from_args(args, n_final_seeds=args.n_seeds)
    genome = _read_genome(args.genome)
    scores = evaluate_genome(cfg, genome)
    doc = {"genome": genome, "seeds": cfg.final_seeds(), "nrmse": scores,
           "stats": summary_stats(scores)}
    text = json.dumps(doc, indent=2)
    if args.out:
        with open(args.out, "w") as fh:
            fh.write(text)
    print(text)


def cmd_analyze(args):
    net = load_network(args.network)
    os.makedirs(args.out, exist_ok=True)
    if args.probe == "states":
        task = args.task or "narma10"
        split = make_task(task, derive_seed(args.seed, "task"), args.data_path)
        start, stop = split.test_range
        dist = node_state_distribution(net, split.inputs[start - split.transient:stop],
                                       washout=split.transient)
        dist.to_csv(os.path.join(args.out, "states.csv"))
    elif args.probe == "spectrum":
        prof = sub_reservoir_spectrum(net, fft_len=args.fft_len,
                                      mso_length=args.fft_len + 100)
        prof.to_csv(args.out)
    else:
        res = memory_capacity(net, max_delay=args.max_delay, mc_seed=args.seed)
        res.to_csv(os.path.join(args.out, "mc.csv"))
        res.to_json(os.path.join(args.out, "mc.json"))
        print(f"memory capacity {res.total:.4f}")


def _apply_overrides(cfg: ExperimentConfig, args):
    if args.seed is not None:
        cfg.root_seed = args.seed
    if args.out:
        cfg.out_dir = args.out if cfg.out_dir is None else cfg.out_dir
    if args.generations is not None:
        cfg.ga = {**cfg.ga, "generations": args.generations}
    return cfg


def cmd_experiment(args):
    cfg = _apply_overrides(ExperimentConfig.load(args.config), args)
    if cfg.task == "santa_fe" and (not cfg.data_path or not os.path.isfile(cfg.data_path)):
        raise FileNotFoundError(f"Santa Fe data file not found: {cfg.data_path}")
    res = run_experiment(cfg)
    print(json.dumps(res.stats, indent=2))


def cmd_matrix(args):
    cfgs = load_matrix(args.configs)
    out = args.out or "."
    for i, c in enumerate(cfgs):
        if args.seed is not None:
            c.root_seed = derive_seed(args.seed, i)
        if args.generations is not None:
            c.ga = {**c.ga, "generations": args.generations}
        if c.out_dir is None:
            c.out_dir = os.path.join(out, f"cell{i:03d}-{c.label}")
    os.makedirs(out, exist_ok=True)
    results = run_matrix(cfgs, out_path=os.path.join(out, "matrix.csv"))
    failed = [r for r in results if r.error]
    for r in failed:
        print(f"failed cell: {r.error}", file=sys.stderr)
    print(f"{len(results) - len(failed)}/{len(results)} cells completed")
    return 1 if failed else 0


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(prog="hier-esn", description=__doc__)
    parser.add_argument("-v", "--verbose", action="store_true")
    sub = parser.add_subparsers(dest="command", required=True)

    p = sub.add_parser("generate", help="write a benchmark series to CSV")
    p.add_argument("task", choices=sorted(TASK_DEFAULTS))
    p.add_argument("--length", type=int, default=5000)
    p.add_argument("--seed", type=int, default=0)
    p.add_argument("--data-path")
    p.add_argument("--out", required=True)
    p.set_defaults(func=cmd_generate)

    p = sub.add_parser("optimize", help="run the GA for one cell")
    _add_cell_args(p)
    p.add_argument("--generations", type=int, default=300)
    p.add_argument("--population", type=int, default=15)
    p.add_argument("--crossover-rate", type=float, default=0.33)
    p.add_argument("--mutation-rate", type=float, default=0.33)
    p.add_argument("--out", required=True, help="output directory")
    p.set_defaults(func=cmd_optimize)

    p = sub.add_parser("evaluate", help="score a genome on fresh build seeds")
    _add_cell_args(p)
    p.add_argument("--genome", required=True,
                   help="comma-separated genes, or a ga_result.json / network.json path")
    p.add_argument("--n-seeds", type=int, default=10)
    p.add_argument("--out")
    p.set_defaults(func=cmd_evaluate)

    p = sub.add_parser("analyze", help="reservoir-quality probes")
    p.add_argument("probe", choices=("states", "spectrum", "mc"))
    p.add_argument("--network", required=True, help="network JSON document")
    p.add_argument("--out", required=True, help="output directory")
    p.add_argument("--task", choices=sorted(TASK_DEFAULTS))
    p.add_argument("--data-path")
    p.add_argument("--seed", type=int, default=0)
    p.add_argument("--fft-len", type=int, default=4096)
    p.add_argument("--max-delay", type=int, default=100)
    p.set_defaults(func=cmd_analyze)

    for name, helptext, func, argname in (
            ("experiment", "run one config file", cmd_experiment, "config"),
            ("matrix", "run a list of configs", cmd_matrix, "configs")):
        p = sub.add_parser(name, help=helptext)
        p.add_argument(argname)
        p.add_argument("--seed", type=int, default=None, help="override the root seed")
        p.add_argument("--generations", type=int, default=None)
        p.add_argument("--out")
        p.set_defaults(func=func)
    return parser


def main(argv=None) -> int:
    parser = build_parser()
    args = parser.parse_args(argv)
    logging.basicConfig(level=logging.INFO if args.verbose else logging.WARNING,
                        format="%(levelname)s %(name)s: %(message)s")
    try:
        status = args.func(args)
    except (OSError, ValueError, ArithmeticError, KeyError, RuntimeError) as exc:
        print(f"hier-esn {args.command}: error: {exc}", file=sys.stderr)
        return 1
    return int(status or 0)


if __name__ == "__main__":
    sys.exit(main())
