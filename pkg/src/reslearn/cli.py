"""Command-line pipeline: generate, measure, learn, eval, experiment.

Exit codes: 0 success, 1 usage or parse failure, 2 infeasible or
numerical failure. Every metrics JSON embeds the resolved run config,
so outputs are reproducible from their own provenance.
"""

import argparse
import json
import sys
import time

import numpy as np

from . import convex as convex_mod
from . import datasets, exact, lsq, metrics
from .exceptions import (
    FileFormatError,
    InvalidPairError,
    InvalidParameterError,
    ResLearnError,
)
from .graph import Graph, num_pairs, read_graph, write_graph
from .measurements import (
    NoiseSpec,
    measure,
    read_measurements,
    sample_pairs,
    write_measurements,
)

_SOLVERS = ("gd", "cd", "convex", "exact", "tree", "ppr")


class _Parser(argparse.ArgumentParser):
    """argparse exits 2 on usage errors; the contract here is 1."""

    def error(self, message):
        self.print_usage(sys.stderr)
        sys.stderr.write(f"{self.prog}: error: {message}\n")
        raise SystemExit(1)


def read_matrix(path):
    """Dense matrix file: header 'n <count>', then n whitespace rows."""
    n = None
    rows = []
    with open(path, "r", encoding="utf-8") as fh:
        for lineno, raw in enumerate(fh, start=1):
            line = raw.split("#", 1)[0].strip()
            if not line:
                continue
            parts = line.split()
            if n is None:
                if len(parts) != 2 or parts[0] != "n":
                    raise FileFormatError(
                        "expected header 'n <count>'", path=path, line=lineno
                    )
                n = int(parts[1])
                continue
            if len(parts) != n:
                raise FileFormatError(
                    f"expected {n} values, got {len(parts)}",
                    path=path,
                    line=lineno,
                )
            try:
                rows.append([float(p) for p in parts])
            except ValueError:
                raise FileFormatError(
                    "could not parse row", path=path, line=lineno
                ) from None
    if n is None or len(rows) != n:
        raise FileFormatError(
            f"expected {n or 'a header and'} rows, got {len(rows)}", path=path
        )
    return np.array(rows)


def write_matrix(mat, path):
    mat = np.asarray(mat)
    with open(path, "w", encoding="utf-8") as fh:
        fh.write(f"n {mat.shape[0]}\n")
        for row in mat:
            fh.write(" ".join(f"{x:.17g}" for x in row) + "\n")


def _add_config_flag(sub):
    sub.add_argument(
        "--config",
        help="key=value file supplying defaults for this subcommand's flags",
    )


def _add_solver_flags(sub):
    sub.add_argument("--solver", choices=_SOLVERS, default="gd")
    sub.add_argument("--seed", type=int, default=0)
    sub.add_argument("--max-iters", type=int, default=None)
    sub.add_argument("--block-size", type=int, default=None)
    sub.add_argument("--alpha", type=float, default=None, help="ppr teleport")
    sub.add_argument(
        "--lambda-grid",
        default=None,
        help="comma-separated ridge values for the spectral initialization",
    )
    sub.add_argument("--rho-max", type=float, default=None)


def build_parser():
    parser = _Parser(prog="reslearn", description=__doc__)
    subs = parser.add_subparsers(dest="command", parser_class=_Parser)

    p_gen = subs.add_parser("generate", help="write a graph file")
    p_gen.add_argument("spec", nargs="+", help="grid ROWS COLS | knn N K")
    p_gen.add_argument("--seed", type=int, default=0)
    p_gen.add_argument("--out-graph", required=True)
    _add_config_flag(p_gen)

    p_meas = subs.add_parser("measure", help="sample pairs and measure them")
    p_meas.add_argument("--graph", required=True)
    p_meas.add_argument("--f", type=float, required=True)
    p_meas.add_argument("--sigma2", type=float, default=0.0)
    p_meas.add_argument("--seed", type=int, default=0)
    p_meas.add_argument(
        "--measurements", required=True, help="output measurement file"
    )
    _add_config_flag(p_meas)

    p_learn = subs.add_parser("learn", help="fit a graph to measurements")
    p_learn.add_argument(
        "--measurements",
        required=True,
        help="measurement file (dense matrix file for --solver ppr)",
    )
    p_learn.add_argument("--truth", help="true graph file for extra metrics")
    p_learn.add_argument("--out-graph")
    p_learn.add_argument("--out-metrics")
    p_learn.add_argument("--out-trace")
    _add_solver_flags(p_learn)
    _add_config_flag(p_learn)

    p_eval = subs.add_parser("eval", help="score an existing graph file")
    p_eval.add_argument("--graph", required=True)
    p_eval.add_argument("--measurements")
    p_eval.add_argument("--truth")
    p_eval.add_argument("--out-metrics")
    _add_config_flag(p_eval)

    p_exp = subs.add_parser(
        "experiment", help="repeated measure+learn runs, aggregated CSV"
    )
    src = p_exp.add_mutually_exclusive_group(required=True)
    src.add_argument("--graph", help="true graph file")
    src.add_argument("--gen", help="generator spec, e.g. 'grid 8 8'")
    p_exp.add_argument("--f", type=float, required=True)
    p_exp.add_argument("--sigma2", type=float, default=0.0)
    p_exp.add_argument("--reps", type=int, default=1)
    p_exp.add_argument("--out-metrics", required=True, help="aggregate CSV")
    _add_solver_flags(p_exp)
    _add_config_flag(p_exp)

    parser.sub_map = {
        "generate": p_gen,
        "measure": p_meas,
        "learn": p_learn,
        "eval": p_eval,
        "experiment": p_exp,
    }
    return parser


def _apply_config_file(parser, argv):
    """Pre-scan for --config and install its values as parser defaults."""
    if argv is None:
        argv = sys.argv[1:]
    argv = list(argv)
    path = None
    for i, tok in enumerate(argv):
        if tok == "--config" and i + 1 < len(argv):
            path = argv[i + 1]
        elif tok.startswith("--config="):
            path = tok.split("=", 1)[1]
    if path is None:
        return argv
    defaults = {}
    try:
        with open(path, "r", encoding="utf-8") as fh:
            for lineno, raw in enumerate(fh, start=1):
                line = raw.split("#", 1)[0].strip()
                if not line:
                    continue
                if "=" not in line:
                    raise FileFormatError(
                        f"expected key=value, got {line!r}", path=path, line=lineno
                    )
                key, value = line.split("=", 1)
                defaults[key.strip().replace("-", "_")] = value.strip()
    except OSError as exc:
        raise FileFormatError(f"cannot read config: {exc}", path=path) from exc
    known = set()
    for sub in parser.sub_map.values():
        for action in sub._actions:
            if action.dest != "help":
                known.add(action.dest)
    unknown = set(defaults) - known
    if unknown:
        raise FileFormatError(
            f"unknown config keys: {sorted(unknown)}", path=path
        )
    for sub in parser.sub_map.values():
        typed = {}
        for action in sub._actions:
            if action.dest in defaults:
                raw_val = defaults[action.dest]
                typed[action.dest] = (
                    action.type(raw_val) if action.type else raw_val
                )
        if typed:
            sub.set_defaults(**typed)
    return argv


def _config_echo(args, keys):
    return {k: getattr(args, k) for k in keys if hasattr(args, k)}


def _parse_generator(tokens, seed):
    if not tokens:
        raise InvalidParameterError("empty generator spec")
    kind = tokens[0]
    if kind == "grid":
        if len(tokens) != 3:
            raise InvalidParameterError("usage: grid ROWS COLS")
        return datasets.gen_grid(int(tokens[1]), int(tokens[2]))
    if kind == "knn":
        if len(tokens) != 3:
            raise InvalidParameterError("usage: knn N K")
        return datasets.gen_knn(int(tokens[1]), int(tokens[2]), seed=seed)
    raise InvalidParameterError(f"unknown generator {kind!r}")


def _parse_lambda_grid(text):
    if text is None:
        return None
    try:
        return [float(tok) for tok in text.split(",") if tok.strip() != ""]
    except ValueError:
        raise InvalidParameterError(
            f"bad --lambda-grid value {text!r}"
        ) from None


def _run_solver(args, ms, solver_seed=None):
    """Dispatch one solver run; returns (graph, result_or_None, extra)."""
    solver = args.solver
    seed = solver_seed if solver_seed is not None else args.seed
    lambda_grid = _parse_lambda_grid(args.lambda_grid)
    if solver in ("gd", "cd"):
        cfg = lsq.SolverConfig(
            max_iters=args.max_iters,
            block_size=args.block_size or 0,
            lambda_grid=lambda_grid,
            seed=seed,
        )
        result = (
            lsq.solve_gd(ms, cfg) if solver == "gd" else lsq.solve_block_cd(ms, cfg)
        )
        return result.graph, result, {}
    if solver == "convex":
        kwargs = {"seed": seed}
        if args.rho_max is not None:
            kwargs["rho_max"] = args.rho_max
        if args.max_iters is not None:
            kwargs["inner_max_iters"] = args.max_iters
        cfg = convex_mod.PenaltyConfig(**kwargs)
        result, report = convex_mod.solve_convex(ms, cfg)
        return result.graph, result, {"feasibility": report}
    if solver == "exact":
        n = ms.n
        if len(ms) != num_pairs(n):
            raise InvalidParameterError(
                f"exact solver needs all {num_pairs(n)} pairs, got {len(ms)}"
            )
        table = np.zeros((n, n))
        table[ms.us, ms.vs] = ms.values
        table += table.T
        g = exact.reconstruct_full(table)
        return g, None, {}
    if solver == "tree":
        g = exact.reconstruct_tree(ms)
        return g, None, {}
    raise InvalidParameterError(f"solver {solver!r} not usable here")


def _metrics_for(g, ms, truth, result, wall, config_echo):
    return metrics.build_metrics(
        h=g,
        ms=ms,
        truth=truth,
        objective=result.objective if result is not None else None,
        runtime_seconds=wall,
        config=config_echo,
    )


def _write_metrics(payload, path):
    text = json.dumps(payload, indent=2, sort_keys=True)
    if path:
        with open(path, "w", encoding="utf-8") as fh:
            fh.write(text + "\n")
    else:
        print(text)


def cmd_generate(args):
    g = _parse_generator(args.spec, args.seed)
    write_graph(g, args.out_graph)
    return 0


def cmd_measure(args):
    g = read_graph(args.graph)
    ss = np.random.SeedSequence([args.seed])
    pair_seed, noise_seed = ss.spawn(2)
    pairs = sample_pairs(g.n, args.f, seed=pair_seed)
    ms = measure(g, pairs, NoiseSpec(args.sigma2, seed=noise_seed))
    write_measurements(ms, args.measurements)
    return 0


def cmd_learn(args):
    start = time.perf_counter()
    truth = read_graph(args.truth) if args.truth else None
    keys = (
        "solver seed max_iters block_size alpha lambda_grid rho_max "
        "measurements truth"
    ).split()
    echo = _config_echo(args, keys)

    if args.solver == "ppr":
        if args.alpha is None:
            raise InvalidParameterError("--solver ppr needs --alpha")
        p_matrix = read_matrix(args.measurements)
        g = exact.reconstruct_from_ppr(p_matrix, args.alpha)
        ms = None
        result = None
        extra = {}
    else:
        ms = read_measurements(args.measurements)
        g, result, extra = _run_solver(args, ms)

    wall = time.perf_counter() - start
    if args.out_graph:
        write_graph(g, args.out_graph)
    if args.out_trace:
        trace = (
            result.objective_trace
            if result is not None
            else [(0, metrics.build_metrics(h=g, ms=ms)["objective"], wall)]
        )
        lsq.write_trace(
            [(it, o if o is not None else float("nan"), t) for it, o, t in trace],
            args.out_trace,
        )
    payload = _metrics_for(g, ms, truth, result, wall, echo)
    if "feasibility" in extra:
        report = extra["feasibility"]
        payload["max_relative_violation"] = report.max_relative_violation()
        payload["feasible_at_tol"] = report.feasible_at_tol
        if args.out_metrics:
            convex_mod.write_feasibility_report(
                report, args.out_metrics + ".feasibility.csv"
            )
    _write_metrics(payload, args.out_metrics)
    return 0


def cmd_eval(args):
    g = read_graph(args.graph)
    ms = read_measurements(args.measurements) if args.measurements else None
    truth = read_graph(args.truth) if args.truth else None
    echo = _config_echo(args, ["graph", "measurements", "truth"])
    payload = metrics.build_metrics(h=g, ms=ms, truth=truth, config=echo)
    _write_metrics(payload, args.out_metrics)
    return 0


def cmd_experiment(args):
    if args.solver == "ppr":
        raise InvalidParameterError(
            "experiment drives the measurement pipeline; ppr takes a matrix, "
            "use 'learn --solver ppr'"
        )
    if args.reps < 1:
        raise InvalidParameterError("--reps must be >= 1")
    truth = (
        read_graph(args.graph)
        if args.graph
        else _parse_generator(args.gen.split(), args.seed)
    )
    keys = (
        "gen graph f sigma2 seed reps solver max_iters block_size "
        "lambda_grid rho_max"
    ).split()
    echo = _config_echo(args, keys)

    fields = (
        "objective normalized_objective generalization_error "
        "edges_learned baseline runtime_seconds"
    ).split()
    rows = []
    for rep in range(args.reps):
        ss = np.random.SeedSequence([args.seed, rep])
        pair_seed, noise_seed, solver_seed = ss.spawn(3)
        start = time.perf_counter()
        pairs = sample_pairs(truth.n, args.f, seed=pair_seed)
        ms = measure(truth, pairs, NoiseSpec(args.sigma2, seed=noise_seed))
        g, result, _ = _run_solver(
            args, ms, solver_seed=int(solver_seed.generate_state(1)[0])
        )
        wall = time.perf_counter() - start
        payload = _metrics_for(g, ms, truth, result, wall, {})
        rows.append([payload[f] for f in fields])

    mat = np.array(
        [[np.nan if v is None else float(v) for v in row] for row in rows]
    )
    with open(args.out_metrics, "w", encoding="utf-8") as fh:
        for k in sorted(echo):
            fh.write(f"# {k}={echo[k]}\n")
        fh.write("rep," + ",".join(fields) + "\n")
        for rep, row in enumerate(rows):
            cells = ["" if v is None else f"{v:.10g}" for v in row]
            fh.write(f"{rep}," + ",".join(cells) + "\n")
        means = np.nanmean(mat, axis=0)
        fh.write("mean," + ",".join(f"{v:.10g}" for v in means) + "\n")
        if args.reps > 1:
            stds = np.nanstd(mat, axis=0, ddof=1)
            fh.write("std," + ",".join(f"{v:.10g}" for v in stds) + "\n")
        else:
            fh.write("std," + ",".join([""] * len(fields)) + "\n")
    return 0


def main(argv=None):
    parser = build_parser()
    try:
        argv = _apply_config_file(parser, argv)
        args = parser.parse_args(argv)
        if args.command is None:
            parser.error("a subcommand is required")
        handler = {
            "generate": cmd_generate,
            "measure": cmd_measure,
            "learn": cmd_learn,
            "eval": cmd_eval,
            "experiment": cmd_experiment,
        }[args.command]
        return handler(args)
    except (FileFormatError, InvalidParameterError, InvalidPairError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 1
    except OSError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 1
    except ResLearnError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 2


if __name__ == "__main__":
    sys.exit(main())
