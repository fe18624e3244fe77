"""Command-line front end: seeded experiments with CSV/JSON artifacts.

Subcommands: gen, exact, curves, randomized, localize, expansion, census,
campaign.  Flag precedence is CLI > --config file > built-in defaults, and
every run is fully determined by its configuration plus master seed.

Exit codes: 0 success, 2 usage error (bad flags), 3 input error (bad files
or values), 4 budget refusal, 5 verification failure.
"""

from __future__ import annotations

import argparse
import json
import math
import sys
import time
from concurrent.futures import ProcessPoolExecutor
from fractions import Fraction

from . import exact as exact_mod
from . import records
from .construction import (
    CandidateSpec,
    construct_resolving,
    default_target_size,
    draw_census_set,
    estimate_failure_rate,
    typicality_census,
)
from .exponents import regime, regime_from_degree, threshold_curves
from .graphs import (
    Graph,
    GraphFormatError,
    RandomGraphSpec,
    audit_expansion,
    generate_gnp,
    predicted_diameter,
    read_edge_list,
    write_edge_list,
)
from .localization import LocalizationIndex, observe
from .seeding import derive_seed, CAMPAIGN_TRIAL

EXIT_OK = 0
EXIT_USAGE = 2
EXIT_INPUT = 3
EXIT_BUDGET = 4
EXIT_VERIFY = 5


class InputError(ValueError):
    """Bad input file or parameter combination (exit code 3)."""


# ---------------------------------------------------------------------------
# Option plumbing
# ---------------------------------------------------------------------------

DEFAULTS: dict[str, dict] = {
    "gen": {"n": 100, "p": None, "x": None, "seed": 0, "out": "graph.edges",
            "threads": 1},
    "exact": {"graph": None, "budget": exact_mod.DEFAULT_BUDGET, "out": None,
              "format": "json", "threads": 1},
    "curves": {
        "levels": "1,4",
        "points": 1000,
        "x_min": None,
        "tol": 1e-12,
        "rational": False,
        "out": "curves.csv",
        "format": "csv",
        "threads": 1,
    },
    "randomized": {
        "graph": None,
        "n": None,
        "p": None,
        "x": None,
        "graph_seed": 0,
        "r": None,
        "growth": 2.0,
        "max_rounds": 12,
        "seed": 0,
        "out": None,
        "format": "json",
        "threads": 1,
    },
    "localize": {
        "graph": None,
        "sensors": "auto",
        "source": "sweep",
        "budget": exact_mod.DEFAULT_BUDGET,
        "out": None,
        "threads": 1,
    },
    "expansion": {
        "graph": None,
        "n": None,
        "p": None,
        "x": None,
        "graph_seed": 0,
        "samples": 100,
        "multiplier": 3.0,
        "seed": 0,
        "out": "expansion.csv",
        "format": "csv",
        "threads": 1,
    },
    "census": {
        "graph": None,
        "n": None,
        "p": None,
        "x": None,
        "graph_seed": 0,
        "set": None,
        "set_size": None,
        "k": None,
        "seed": 0,
        "out": "census.csv",
        "format": "csv",
        "threads": 1,
    },
    "campaign": {"config_file": None, "threads": 1, "out": "campaign.csv",
                 "timings": False, "format": "csv"},
}


def _emit_table(
    cfg: dict,
    header: list[str],
    rows: list,
    config: dict,
    extra_comments: tuple[str, ...] = (),
) -> None:
    """Write tabular results as CSV (default) or a JSON record array."""
    fmt = cfg.get("format", "csv")
    if fmt == "csv":
        records.write_csv(cfg["out"], header, rows, config=config,
                          extra_comments=list(extra_comments))
    elif fmt == "json":
        payload = {
            "records": [
                {key: records.format_value(val) for key, val in zip(header, row)}
                for row in rows
            ]
        }
        records.write_json(cfg["out"], payload, config=config)
    else:
        raise InputError(f"unknown format {fmt!r} (choose csv or json)")


def _merge_config(command: str, args: argparse.Namespace) -> dict:
    cfg = dict(DEFAULTS[command])
    provided = vars(args)
    file_cfg = {}
    if provided.get("config"):
        with open(provided["config"], "r", encoding="utf-8") as fh:
            file_cfg = json.load(fh)
        unknown = set(file_cfg) - set(cfg)
        if unknown:
            raise InputError(f"unknown config keys for {command}: {sorted(unknown)}")
    cfg.update(file_cfg)
    for key, value in provided.items():
        if key in cfg and value is not None:
            cfg[key] = value
    return cfg


def _build_graph(cfg: dict) -> tuple[Graph, dict]:
    """Graph from --graph file or a (n, p|x, graph_seed) generation spec."""
    if cfg.get("graph"):
        g = read_edge_list(cfg["graph"])
        return g, {"graph": cfg["graph"]}
    if cfg.get("n") is None:
        raise InputError("give --graph FILE or --n with --p/--x")
    spec = RandomGraphSpec(
        n=int(cfg["n"]),
        p=cfg.get("p"),
        x=cfg.get("x"),
        seed=int(cfg.get("graph_seed", 0)),
    )
    return generate_gnp(spec), {
        "n": spec.n,
        "p": spec.p,
        "x": spec.x,
        "graph_seed": spec.seed,
    }


# ---------------------------------------------------------------------------
# Subcommands
# ---------------------------------------------------------------------------


def cmd_gen(cfg: dict) -> int:
    spec = RandomGraphSpec(
        n=int(cfg["n"]), p=cfg.get("p"), x=cfg.get("x"), seed=int(cfg["seed"])
    )
    g = generate_gnp(spec)
    out = cfg["out"]
    write_edge_list(g, out)
    # The edge-list format has no comment syntax, so the config rides in a
    # sibling JSON file.
    records.write_json(
        out + ".json",
        {"n": g.n, "m": g.num_edges},
        config={"command": "gen", "n": spec.n, "p": spec.p, "x": spec.x, "seed": spec.seed},
    )
    print(f"wrote {out}: n={g.n} m={g.num_edges}")
    return EXIT_OK


def cmd_exact(cfg: dict) -> int:
    if not cfg.get("graph"):
        raise InputError("exact needs --graph FILE")
    g = read_edge_list(cfg["graph"])
    result = exact_mod.dimension_report(g, budget=int(cfg["budget"]))
    payload = result.to_json_dict()
    config = {"command": "exact", "graph": cfg["graph"], "budget": int(cfg["budget"])}
    if cfg.get("format", "json") == "csv":
        if not cfg.get("out"):
            raise InputError("csv format needs --out")
        header = ["beta", "beta_ms_out", "beta_ms", "subsets_examined"]
        row = [payload["beta"], payload["beta_ms_out"], payload["beta_ms"],
               payload["subsets_examined"]]
        records.write_csv(cfg["out"], header, [row], config=config)
    elif cfg.get("out"):
        records.write_json(cfg["out"], payload, config=config)
    else:
        print(json.dumps({"config": config, **payload}, sort_keys=True, indent=2))
    return EXIT_OK


def cmd_curves(cfg: dict) -> int:
    levels = tuple(int(t) for t in str(cfg["levels"]).split(",") if t)
    rational = bool(cfg["rational"])
    x_min = cfg.get("x_min")
    if x_min is not None and rational:
        x_min = Fraction(str(x_min))
    curves = threshold_curves(
        levels=levels,
        points=int(cfg["points"]),
        x_min=x_min,
        tol=float(cfg["tol"]),
        rational=rational,
    )
    config = {
        "command": "curves",
        "levels": list(levels),
        "points": int(cfg["points"]),
        "x_min": None if cfg.get("x_min") is None else str(cfg["x_min"]),
        "tol": float(cfg["tol"]),
        "rational": rational,
    }
    rows = []
    for curve in curves:
        for x, y in curve.points:
            rows.append((x, y, curve.level))
    _emit_table(cfg, ["x", "y", "level"], rows, config)
    print(f"wrote {cfg['out']}: {len(rows)} points across levels {list(levels)}")
    return EXIT_OK


def cmd_randomized(cfg: dict) -> int:
    g, graph_cfg = _build_graph(cfg)
    target = cfg.get("r")
    if target is None:
        target = default_target_size(g.n, cfg.get("x"))
    spec = CandidateSpec(
        r=float(target),
        growth=float(cfg["growth"]),
        max_rounds=int(cfg["max_rounds"]),
        seed=int(cfg["seed"]),
    )
    result = construct_resolving(g, spec)
    config = {
        "command": "randomized",
        **graph_cfg,
        "r": spec.r,
        "growth": spec.growth,
        "max_rounds": spec.max_rounds,
        "seed": spec.seed,
    }
    payload = result.to_json_dict()
    if cfg.get("format", "json") == "csv":
        if not cfg.get("out"):
            raise InputError("csv format needs --out")
        header = ["round", "r", "sample_size", "verdict", "witness_u", "witness_v"]
        rows = [
            (rec.round, rec.target, rec.sample_size,
             "resolving" if rec.resolving else "collision",
             rec.witness[0] if rec.witness else "",
             rec.witness[1] if rec.witness else "")
            for rec in result.rounds
        ]
        records.write_csv(
            cfg["out"], header, rows, config=config,
            extra_comments=[f"summary: success={result.success}"],
        )
    elif cfg.get("out"):
        records.write_json(cfg["out"], payload, config=config)
    else:
        print(json.dumps({"config": config, **payload}, sort_keys=True, indent=2))
    if not result.success:
        print(
            f"no resolving set within {spec.max_rounds} rounds; "
            f"last witness {result.last_witness}",
            file=sys.stderr,
        )
        return EXIT_VERIFY
    return EXIT_OK


def cmd_localize(cfg: dict) -> int:
    if not cfg.get("graph"):
        raise InputError("localize needs --graph FILE")
    g = read_edge_list(cfg["graph"])
    sensors_cfg = cfg["sensors"]
    if sensors_cfg == "auto":
        outcome = exact_mod.multiset_dimension_exact(g, budget=int(cfg["budget"]))
        if outcome.witness is None:
            print("graph has no multiset resolving set; cannot auto-place sensors",
                  file=sys.stderr)
            return EXIT_VERIFY
        sensors = outcome.witness
    else:
        sensors = tuple(int(t) for t in str(sensors_cfg).split(",") if t != "")
    index = LocalizationIndex(g, sensors)
    sources = range(g.n) if cfg["source"] == "sweep" else [int(cfg["source"])]
    transcripts = []
    all_unique = True
    for v0 in sources:
        obs = observe(g, sensors, v0, horizon=index.horizon)
        recovered = index.candidates(obs)
        all_unique = all_unique and recovered == (v0,)
        transcripts.append(
            {
                "sensors": list(sensors),
                "source": int(v0),
                "observation": list(obs.counts),
                "recovered": list(recovered),
            }
        )
    if cfg.get("out"):
        records.write_json_lines(cfg["out"], transcripts)
        print(f"wrote {cfg['out']}: {len(transcripts)} transcripts, "
              f"{'all' if all_unique else 'NOT all'} uniquely recovered")
    else:
        for t in transcripts:
            print(json.dumps(t, sort_keys=True, separators=(",", ":")))
    return EXIT_OK


def cmd_expansion(cfg: dict) -> int:
    g, graph_cfg = _build_graph(cfg)
    if cfg.get("x") is not None:
        params = regime(g.n, float(cfg["x"]))
    else:
        params = regime_from_degree(g.n, g.average_degree)
    report = audit_expansion(
        g,
        params,
        sample_size=int(cfg["samples"]),
        seed=int(cfg["seed"]),
        multiplier=float(cfg["multiplier"]),
    )
    config = {
        "command": "expansion",
        **graph_cfg,
        "samples": int(cfg["samples"]),
        "multiplier": float(cfg["multiplier"]),
        "seed": int(cfg["seed"]),
    }
    rows = []
    for cell in report.levels:
        for idx, obs in enumerate(cell.observed):
            rows.append(
                (
                    cell.level,
                    cell.source_size,
                    idx,
                    obs,
                    cell.expected,
                    abs(obs - cell.expected),
                    cell.flagged,
                )
            )
    summary = (
        f"summary: partial={report.partial} "
        f"flagged_cells={len(report.flagged_cells)} "
        f"tolerance_scale={report.params.spread_tolerance:.6g}"
    )
    _emit_table(
        cfg,
        ["level", "source_size", "sample", "observed", "expected", "deviation", "flagged"],
        rows,
        config,
        extra_comments=(summary,),
    )
    print(f"wrote {cfg['out']}: {len(rows)} rows; {summary}")
    return EXIT_OK


def cmd_census(cfg: dict) -> int:
    g, graph_cfg = _build_graph(cfg)
    if cfg.get("set"):
        members = tuple(int(t) for t in str(cfg["set"]).split(",") if t != "")
    else:
        size = cfg.get("set_size") or math.isqrt(g.n) + (0 if math.isqrt(g.n) ** 2 == g.n else 1)
        members = draw_census_set(g, int(size), int(cfg["seed"]))
    if cfg.get("k") is not None:
        k = int(cfg["k"])
    else:
        k = max(predicted_diameter(g.n, g.average_degree) - 1, 0)
    report = typicality_census(g, members, k)
    config = {
        "command": "census",
        **graph_cfg,
        "set_size": len(members),
        "k": k,
        "seed": int(cfg["seed"]),
    }
    rows = [
        (
            lvl.level,
            lvl.atypical_count,
            g.n - lvl.atypical_count,
            lvl.allowed_coordinates,
        )
        for lvl in report.levels
    ]
    summary = (
        f"summary: typical={report.typical_count} "
        f"bound={report.signature_space_bound} "
        f"collision_forced={report.collision_forced}"
    )
    _emit_table(
        cfg,
        ["level", "atypical", "typical", "allowed_coords"],
        rows,
        config,
        extra_comments=(summary,),
    )
    print(f"wrote {cfg['out']}: {len(rows)} levels; {summary}")
    return EXIT_OK


# ---------------------------------------------------------------------------
# Campaigns
# ---------------------------------------------------------------------------


def _campaign_census_depth(params: dict) -> int:
    if params.get("k") is not None:
        return int(params["k"])
    spec = RandomGraphSpec(
        n=int(params["n"]), p=params.get("p"), x=params.get("x"), seed=0
    )
    # Expected (not measured) degree keeps the column set identical across
    # trials, a schema requirement.
    return max(predicted_diameter(spec.n, spec.expected_degree) - 1, 0)


def _campaign_columns(command: str, params: dict) -> list[str]:
    """Measured-quantity columns, derivable without running any trial."""
    if command == "randomized":
        return ["success", "rounds_used", "set_size"]
    if command == "failure-rate":
        return ["failure_rate", "failures"]
    if command == "exact":
        return ["beta", "beta_ms_out", "beta_ms"]
    if command == "expansion":
        radius = regime(int(params["n"]), float(params["x"])).sparse_radius
        return [
            f"max_dev_L{level}_s{s}"
            for s in (1, 2)
            for level in range(radius + 2)
        ]
    if command == "census":
        depth = _campaign_census_depth(params)
        cols = [f"atypical_frac_L{level}" for level in range(depth + 1)]
        return cols + ["collision_forced"]
    raise InputError(f"unknown campaign command {command!r}")


def _campaign_trial(task: tuple) -> tuple[int, list, float]:
    """One seeded trial: (ok flag, quantity values in column order, elapsed ms).

    Per-draw precondition failures (e.g. a disconnected random graph) are
    recorded as ok=0 with empty value cells so a long campaign never dies on
    one bad sample; configuration errors (budget refusals, unknown commands)
    still abort the whole campaign.
    """
    command, params, trial, trial_seed = task
    start = time.perf_counter()
    try:
        values = _campaign_measurements(command, params, trial_seed)
        ok = 1
    except (exact_mod.BudgetExceededError, InputError):
        raise
    except ValueError as exc:
        print(f"trial {trial} (seed {trial_seed}) skipped: {exc}", file=sys.stderr)
        values = [""] * len(_campaign_columns(command, params))
        ok = 0
    return ok, values, (time.perf_counter() - start) * 1e3


def _campaign_measurements(command: str, params: dict, trial_seed: int) -> list:
    n = params.get("n")
    x = params.get("x")
    values: list = []
    if command == "randomized":
        g = generate_gnp(RandomGraphSpec(n=n, p=params.get("p"), x=x, seed=trial_seed))
        target = params.get("r") or default_target_size(g.n, x)
        spec = CandidateSpec(
            r=float(target),
            growth=float(params.get("growth", 2.0)),
            max_rounds=int(params.get("max_rounds", 12)),
            seed=trial_seed,
        )
        result = construct_resolving(g, spec)
        values = [
            int(result.success),
            result.rounds_used,
            len(result.resolving_set) if result.resolving_set else -1,
        ]
    elif command == "failure-rate":
        g = generate_gnp(RandomGraphSpec(n=n, p=params.get("p"), x=x, seed=trial_seed))
        est = estimate_failure_rate(
            g, float(params["r"]), int(params.get("trials_per_graph", 20)), trial_seed
        )
        values = [est.rate, est.failures]
    elif command == "expansion":
        g = generate_gnp(RandomGraphSpec(n=n, p=params.get("p"), x=x, seed=trial_seed))
        report = audit_expansion(
            g,
            regime(g.n, float(x)),
            sample_size=int(params.get("samples", 50)),
            seed=trial_seed,
            multiplier=float(params.get("multiplier", 3.0)),
        )
        cells = {
            (cell.level, cell.source_size): cell.max_abs_deviation
            for cell in report.levels
        }
        radius = report.params.sparse_radius
        values = [cells[(level, s)] for s in (1, 2) for level in range(radius + 2)]
    elif command == "census":
        g = generate_gnp(RandomGraphSpec(n=n, p=params.get("p"), x=x, seed=trial_seed))
        size = int(params.get("set_size") or math.isqrt(g.n))
        members = draw_census_set(g, size, trial_seed)
        report = typicality_census(g, members, _campaign_census_depth(params))
        values = [lvl.atypical_count / g.n for lvl in report.levels]
        values.append(int(report.collision_forced))
    elif command == "exact":
        g = generate_gnp(RandomGraphSpec(n=n, p=params.get("p"), x=x, seed=trial_seed))
        result = exact_mod.dimension_report(g, budget=int(params.get("budget", 16)))
        values = [
            result.metric_dim,
            result.outer_multiset_dim,
            "inf" if math.isinf(result.multiset_dim) else result.multiset_dim,
        ]
    else:
        raise InputError(f"unknown campaign command {command!r}")
    return values


def cmd_campaign(cfg: dict) -> int:
    if not cfg.get("config_file"):
        raise InputError("campaign needs a config file")
    with open(cfg["config_file"], "r", encoding="utf-8") as fh:
        plan = json.load(fh)
    for key in ("command", "trials", "seed"):
        if key not in plan:
            raise InputError(f"campaign config missing {key!r}")
    command = plan["command"]
    trials = int(plan["trials"])
    master = int(plan["seed"])
    params = plan.get("params", {})
    timings = bool(cfg.get("timings"))
    columns = _campaign_columns(command, params)
    tasks = [
        (command, params, t, derive_seed(master, CAMPAIGN_TRIAL, t))
        for t in range(trials)
    ]
    threads = int(cfg["threads"])
    if threads > 1 and tasks:
        with ProcessPoolExecutor(max_workers=threads) as pool:
            outcomes = list(pool.map(_campaign_trial, tasks))
    else:
        outcomes = [_campaign_trial(t) for t in tasks]
    header = ["trial", "seed", "n", "x", "ok", *columns]
    if timings:
        header.append("wall_ms")
    rows = []
    for (command_, params_, trial, trial_seed), (ok, values, elapsed) in zip(tasks, outcomes):
        row = [trial, trial_seed, params.get("n"), params.get("x"), ok, *values]
        if timings:
            row.append(elapsed)
        rows.append(row)  # one row per trial, order fixed by trial index
    # Worker count is an execution detail, not configuration: identical plans
    # must give byte-identical files at any thread count.
    config = {
        "command": "campaign",
        "campaign": {k: plan[k] for k in ("command", "trials", "seed")},
        "params": params,
    }
    _emit_table(cfg, header, rows, config)
    print(f"wrote {cfg['out']}: {len(rows)} trial rows")
    return EXIT_OK


# ---------------------------------------------------------------------------
# Parser and dispatch
# ---------------------------------------------------------------------------


def _build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="msetdim",
        description="Multiset resolving sets on random and user-supplied graphs.",
        epilog="Exit codes: 0 ok, 2 usage, 3 input error, 4 budget refusal, "
        "5 verification failure.",
    )
    sub = parser.add_subparsers(dest="command", required=True)

    def add(name: str, help_text: str) -> argparse.ArgumentParser:
        p = sub.add_parser(name, help=help_text, argument_default=None)
        p.add_argument("--config", help="JSON file with defaults for this command")
        p.add_argument("--out", help="output path")
        p.add_argument("--format", choices=("csv", "json"),
                       help="output format where the command supports both")
        p.add_argument(
            "--threads", type=int,
            help="worker pool size (campaign); outputs never depend on it",
        )
        return p

    p = add("gen", "sample a seeded binomial random graph to an edge-list file")
    p.add_argument("--n", type=int)
    p.add_argument("--p", type=float)
    p.add_argument("--x", type=float)
    p.add_argument("--seed", type=int)

    p = add("exact", "exhaustive dimensions of a small graph (JSON)")
    p.add_argument("--graph")
    p.add_argument("--budget", type=int)

    p = add("curves", "threshold-exponent level curves (CSV)")
    p.add_argument("--levels")
    p.add_argument("--points", type=int)
    p.add_argument("--x-min", dest="x_min")
    p.add_argument("--tol", type=float)
    p.add_argument("--rational", action="store_const", const=True)

    p = add("randomized", "sample-verify-grow construction (JSON round log)")
    p.add_argument("--graph")
    p.add_argument("--n", type=int)
    p.add_argument("--p", type=float)
    p.add_argument("--x", type=float)
    p.add_argument("--graph-seed", dest="graph_seed", type=int)
    p.add_argument("--r", type=float)
    p.add_argument("--growth", type=float)
    p.add_argument("--max-rounds", dest="max_rounds", type=int)
    p.add_argument("--seed", type=int)

    p = add("localize", "spread/observe/identify transcripts (JSON lines)")
    p.add_argument("--graph")
    p.add_argument("--sensors", help='"auto" or comma-separated vertices')
    p.add_argument("--source", help='vertex id or "sweep"')
    p.add_argument("--budget", type=int)

    p = add("expansion", "sphere-size audit on a random graph (CSV)")
    p.add_argument("--graph")
    p.add_argument("--n", type=int)
    p.add_argument("--p", type=float)
    p.add_argument("--x", type=float)
    p.add_argument("--graph-seed", dest="graph_seed", type=int)
    p.add_argument("--samples", type=int)
    p.add_argument("--multiplier", type=float)
    p.add_argument("--seed", type=int)

    p = add("census", "typical/atypical vertex census (CSV)")
    p.add_argument("--graph")
    p.add_argument("--n", type=int)
    p.add_argument("--p", type=float)
    p.add_argument("--x", type=float)
    p.add_argument("--graph-seed", dest="graph_seed", type=int)
    p.add_argument("--set", help="comma-separated sensor vertices")
    p.add_argument("--set-size", dest="set_size", type=int)
    p.add_argument("--k", type=int)
    p.add_argument("--seed", type=int)

    p = add("campaign", "aggregate seeded trials of another command (CSV)")
    p.add_argument("config_file", nargs="?")
    p.add_argument("--timings", action="store_const", const=True,
                   help="include wall-clock column (breaks byte determinism)")

    return parser


_HANDLERS = {
    "gen": cmd_gen,
    "exact": cmd_exact,
    "curves": cmd_curves,
    "randomized": cmd_randomized,
    "localize": cmd_localize,
    "expansion": cmd_expansion,
    "census": cmd_census,
    "campaign": cmd_campaign,
}


def main(argv: list[str] | None = None) -> int:
    parser = _build_parser()
    args = parser.parse_args(argv)
    try:
        cfg = _merge_config(args.command, args)
        return _HANDLERS[args.command](cfg)
    except exact_mod.BudgetExceededError as exc:
        print(f"budget refusal: {exc}", file=sys.stderr)
        return EXIT_BUDGET
    except (InputError, GraphFormatError, FileNotFoundError, json.JSONDecodeError) as exc:
        print(f"input error: {exc}", file=sys.stderr)
        return EXIT_INPUT
    except ValueError as exc:
        print(f"input error: {exc}", file=sys.stderr)
        return EXIT_INPUT


if __name__ == "__main__":
    sys.exit(main())
