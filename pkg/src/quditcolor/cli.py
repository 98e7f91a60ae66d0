"""Command-line front end.

Subcommands: ``solve`` (run a batch, write JSON stats), ``sweep`` (increase
the color count until a conflict-free coloring appears), ``gradcheck``
(verify analytic gradients against finite differences on an instance), and
``info`` (print parsed graph statistics).

Exit codes: 0 success, 1 invalid configuration or failed check, 2 I/O or
parse failure.
"""

from __future__ import annotations

import argparse
import json
import os
import sys
from dataclasses import dataclass, field
from pathlib import Path

import numpy as np

from .energy import CostParams
from .gradient import check_gradient
from .graph import GraphParseError, load_graph
from .harness import (hp_to_dict, run_batch, stats_to_dict, sweep_colors,
                      write_trajectory_csv)
from .qudits import AngleState, build_ops
from .solver import ConstantAlpha, ExponentialAlpha, Hyperparameters

WORKERS_ENV = "QUDITCOLOR_WORKERS"


class ConfigError(ValueError):
    """Raised for invalid configuration values or unknown keys."""


# keys accepted in a config file, with their parsers; colors stays a string
# because sweep accepts a LO:HI range
_CONFIG_PARSERS = {
    "graph": str,
    "format": str,
    "method": str,
    "colors": str,
    "steps": int,
    "gamma": float,
    "alpha": str,
    "eta": float,
    "f": float,
    "f_tilde": float,
    "h": float,
    "runs": int,
    "patience": int,
    "fix": str,
    "seed": int,
    "workers": int,
    "out": str,
    "trajectories": str,
    "coloring": str,
    "include_t_end": lambda v: v.lower() in ("1", "true", "yes"),
}


@dataclass
class RunConfig:
    """Fully resolved invocation: instance, hyperparameters, outputs."""

    graph: str
    method: str = "qdlqa"
    colors: str | None = None
    format: str | None = None
    steps: int = 1000
    gamma: float = 1.0
    alpha: str = "1"
    eta: float = 0.5
    f: float = 0.0
    f_tilde: float = 1.0
    h: float = 3.0
    runs: int = 100
    patience: int = 100
    fix: str = "max_degree"
    seed: int = 0
    workers: int = field(default_factory=lambda: int(os.environ.get(WORKERS_ENV, "1")))
    out: str | None = None
    trajectories: str | None = None
    coloring: str | None = None
    include_t_end: bool = False


def parse_alpha(text: str):
    """"N" -> constant schedule; "exp:RATE:CAP" -> exponential schedule."""
    text = str(text).strip()
    if text.startswith("exp:"):
        parts = text.split(":")
        if len(parts) != 3:
            raise ConfigError(f"alpha schedule {text!r} must be exp:RATE:CAP")
        try:
            return ExponentialAlpha(rate=float(parts[1]), cap=int(parts[2]))
        except ValueError as exc:
            raise ConfigError(f"bad alpha schedule {text!r}: {exc}") from None
    try:
        return ConstantAlpha(int(text))
    except ValueError:
        raise ConfigError(f"alpha must be an integer or exp:RATE:CAP, got {text!r}") from None


def parse_fix(text: str):
    if text in ("max_degree", "degree_one", "none"):
        return None if text == "none" else text
    try:
        return int(text)
    except ValueError:
        raise ConfigError(
            f"fix must be max_degree, degree_one, none, or a node index, got {text!r}"
        ) from None


def read_config_file(path) -> dict:
    """Parse a flat ``key = value`` file with ``#`` comments."""
    values = {}
    for lineno, raw in enumerate(Path(path).read_text().splitlines(), start=1):
        line = raw.split("#", 1)[0].strip()
        if not line:
            continue
        if "=" not in line:
            raise ConfigError(f"{path}:{lineno}: expected key = value, got {line!r}")
        key, _, value = line.partition("=")
        key, value = key.strip(), value.strip()
        if key not in _CONFIG_PARSERS:
            raise ConfigError(f"{path}:{lineno}: unknown key {key!r}")
        try:
            values[key] = _CONFIG_PARSERS[key](value)
        except (TypeError, ValueError) as exc:
            raise ConfigError(f"{path}:{lineno}: bad value for {key}: {exc}") from None
    return values


def load_config(args: argparse.Namespace) -> RunConfig:
    """Merge defaults, config file, and flag overrides (flags win)."""
    values = {}
    if getattr(args, "config", None):
        values.update(read_config_file(args.config))
    for key in _CONFIG_PARSERS:
        flag_value = getattr(args, key, None)
        if flag_value is not None:
            values[key] = flag_value
    if "graph" not in values:
        raise ConfigError("an input graph is required (--graph)")
    config = RunConfig(**values)
    if config.colors is None:
        raise ConfigError("the number of colors is required (--colors)")
    if config.method not in ("qdlqa", "qdgd"):
        raise ConfigError(f"method must be qdlqa or qdgd, got {config.method!r}")
    _warn_ignored(config)
    return config


_METHOD_IGNORES = {"qdlqa": {"patience": 100, "f_tilde": 1.0},
                   "qdgd": {"f": 0.0, "alpha": "1"}}


def _warn_ignored(config: RunConfig) -> None:
    for name, default in _METHOD_IGNORES[config.method].items():
        if getattr(config, name) != default:
            print(f"warning: {name} is ignored by method {config.method}",
                  file=sys.stderr)


def _colors_int(config: RunConfig) -> int:
    try:
        return int(config.colors)
    except (TypeError, ValueError):
        raise ConfigError(f"colors must be an integer, got {config.colors!r}") from None


def config_to_hp(config: RunConfig, colors: int) -> Hyperparameters:
    hp = Hyperparameters(
        method=config.method,
        num_colors=colors,
        n_steps=config.steps,
        gamma=config.gamma,
        alpha=parse_alpha(config.alpha),
        eta=config.eta,
        f=config.f,
        f_tilde=config.f_tilde,
        h=config.h,
        n_runs=config.runs,
        patience=config.patience,
        fix_strategy=parse_fix(config.fix),
        master_seed=config.seed,
        include_t_end=config.include_t_end,
    )
    try:
        hp.validate()
    except ValueError as exc:
        raise ConfigError(str(exc)) from None
    return hp


def _resolved_config_dict(config: RunConfig, hp: Hyperparameters) -> dict:
    out = hp_to_dict(hp)
    out["graph_file"] = config.graph
    out["format"] = config.format
    out["workers"] = config.workers
    return out


def _write_coloring(path, coloring, original_ids) -> None:
    with open(path, "w") as fh:
        for node, color in enumerate(coloring):
            fh.write(f"{original_ids[node]} {int(color)}\n")


def _cmd_solve(args) -> int:
    config = load_config(args)
    hp = config_to_hp(config, _colors_int(config))
    graph, original_ids = load_graph(config.graph, config.format)
    stats = run_batch(graph, hp, workers=config.workers,
                      record_trajectories=config.trajectories is not None)
    payload = stats_to_dict(stats, graph, hp, _resolved_config_dict(config, hp))
    if config.out:
        with open(config.out, "w") as fh:
            json.dump(payload, fh, indent=2)
            fh.write("\n")
    else:
        json.dump(payload, sys.stdout, indent=2)
        print()
    if config.trajectories:
        try:
            write_trajectory_csv(config.trajectories, stats.records, "e_potts")
        except ValueError as exc:
            # early-stopped runs leave unequal step grids; stats are still valid
            print(f"warning: trajectory CSV not written: {exc}", file=sys.stderr)
    if config.coloring:
        best = min(stats.records, key=lambda r: r.best_energy)
        _write_coloring(config.coloring, best.best_coloring, original_ids)
    if not args.quiet:
        print(f"best {stats.best_overall} in {stats.n_min}/{hp.n_runs} runs "
              f"(mean {stats.mean_best:.2f})", file=sys.stderr)
    return 0


def _cmd_sweep(args) -> int:
    config = load_config(args)
    lo, sep, hi = str(config.colors).partition(":")
    # --colors may be "LO:HI" for sweeps; a single value sweeps one point
    try:
        c_lo = int(lo)
        c_hi = int(hi) if sep else c_lo
    except ValueError:
        raise ConfigError(f"sweep expects --colors LO:HI, got {config.colors!r}") from None
    if c_hi < c_lo:
        raise ConfigError("sweep range must be ascending")
    hp = config_to_hp(config, c_lo)
    graph, _ = load_graph(config.graph, config.format)
    result = sweep_colors(graph, hp, range(c_lo, c_hi + 1),
                          force_full=args.force_full, workers=config.workers)
    payload = {
        "config": _resolved_config_dict(config, hp),
        "graph": {"nodes": graph.num_nodes, "edges": graph.num_edges},
        "chi_upper": result.chi_upper,
        "sweep": {str(c): {k: v for k, v in stats_to_dict(s, graph, hp).items()
                           if k not in ("config", "graph", "per_run")}
                  for c, s in result.batches.items()},
    }
    text = json.dumps(payload, indent=2)
    if config.out:
        Path(config.out).write_text(text + "\n")
    else:
        print(text)
    return 0


def _cmd_gradcheck(args) -> int:
    graph, _ = load_graph(args.graph, args.format)
    ops = build_ops(args.colors)
    rng = np.random.default_rng(args.seed)
    worst = 0.0
    flagged = 0
    for _ in range(args.points):
        t = float(rng.uniform(0.0, 1.0)) if args.t is None else args.t
        angles = rng.uniform(-np.pi, np.pi,
                             size=(graph.num_nodes - 1, args.colors - 1))
        state = AngleState(graph.num_nodes, args.colors, angles,
                           fixed_node=graph.j_max)
        params = CostParams(gamma=args.gamma, h=args.h, t=t)
        report = check_gradient(state, graph, ops, params,
                                step=args.step, tol=args.tol, rng=rng)
        worst = max(worst, report.max_rel_error)
        flagged += int(report.clamp_flags.sum())
        if not report.passed:
            print(f"FAIL at t={t:.4f}: max relative error "
                  f"{report.max_rel_error:.3e} (tol {args.tol:g})")
            return 1
    print(f"gradcheck OK: {args.points} points, max relative error {worst:.3e} "
          f"(tol {args.tol:g}, {flagged} clamp-flagged components excluded)")
    return 0


def _cmd_info(args) -> int:
    graph, _ = load_graph(args.graph, args.format)
    print(f"{Path(args.graph).name}: {graph.num_nodes} nodes, "
          f"{graph.num_edges} edges, density {100 * graph.density:.2f}%, "
          f"max degree {graph.max_degree} (node {graph.j_max})")
    return 0


def _add_instance_flags(parser) -> None:
    parser.add_argument("--graph", help="instance file (.col or edge list)")
    parser.add_argument("--format", choices=["dimacs", "edgelist"],
                        help="override format auto-detection")


def _add_hyper_flags(parser) -> None:
    parser.add_argument("--method", choices=["qdlqa", "qdgd"])
    parser.add_argument("--colors", help="number of colors (sweep: LO:HI)")
    parser.add_argument("--steps", type=int, help="outer steps / step budget")
    parser.add_argument("--gamma", type=float, help="regularizer weight")
    parser.add_argument("--alpha", help="inner steps per time: N or exp:RATE:CAP")
    parser.add_argument("--eta", type=float, help="learning rate")
    parser.add_argument("--f", type=float, help="annealing init angle noise")
    parser.add_argument("--f-tilde", dest="f_tilde", type=float,
                        help="gradient-descent init scale")
    parser.add_argument("--h", type=float, help="coupling noise cap")
    parser.add_argument("--runs", type=int, help="independent runs per batch")
    parser.add_argument("--patience", type=int,
                        help="qdgd early stop: steps without improvement")
    parser.add_argument("--fix", help="fixed node: max_degree|degree_one|none|INDEX")
    parser.add_argument("--seed", type=int, help="master seed")
    parser.add_argument("--workers", type=int,
                        help=f"parallel runs (default ${WORKERS_ENV} or 1)")
    parser.add_argument("--include-t-end", dest="include_t_end",
                        action="store_const", const=True,
                        help="also optimize at t = 1 (annealing endpoint)")
    parser.add_argument("--config", help="key = value config file")
    parser.add_argument("--out", help="stats JSON path (default: stdout)")
    parser.add_argument("--trajectories", help="write per-step CSV here")
    parser.add_argument("--coloring", help="write best coloring here")
    parser.add_argument("--quiet", action="store_true")


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="quditcolor",
        description="Graph coloring via qudit product states: annealed or "
                    "direct gradient optimization.")
    sub = parser.add_subparsers(dest="command", required=True)

    solve = sub.add_parser("solve", help="run a batch on one instance")
    _add_instance_flags(solve)
    _add_hyper_flags(solve)

    sweep = sub.add_parser("sweep", help="sweep color counts for an upper bound")
    _add_instance_flags(sweep)
    _add_hyper_flags(sweep)
    sweep.add_argument("--force-full", action="store_true",
                       help="do not stop at the first conflict-free count")

    grad = sub.add_parser("gradcheck", help="verify gradients on an instance")
    _add_instance_flags(grad)
    grad.add_argument("--colors", type=int, required=True)
    grad.add_argument("--points", type=int, default=20)
    grad.add_argument("--step", type=float, default=1e-5)
    grad.add_argument("--tol", type=float, default=1e-4)
    grad.add_argument("--gamma", type=float, default=1.0)
    grad.add_argument("--h", type=float, default=3.0)
    grad.add_argument("--t", type=float, default=None,
                      help="fix the annealing time (default: random per point)")
    grad.add_argument("--seed", type=int, default=0)

    info = sub.add_parser("info", help="print parsed graph statistics")
    _add_instance_flags(info)
    return parser


def main(argv=None) -> int:
    parser = build_parser()
    args = parser.parse_args(argv)
    commands = {"solve": _cmd_solve, "sweep": _cmd_sweep,
                "gradcheck": _cmd_gradcheck, "info": _cmd_info}
    try:
        return commands[args.command](args)
    except ConfigError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 1
    except GraphParseError as exc:
        print(f"parse error: {exc}", file=sys.stderr)
        return 2
    except OSError as exc:
        print(f"i/o error: {exc}", file=sys.stderr)
        return 2


def run() -> None:
    sys.exit(main())


if __name__ == "__main__":
    run()
