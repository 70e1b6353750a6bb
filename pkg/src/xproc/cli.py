"""Batch command line: spectra, profiles, exact values, simulation, checks.

Output is deterministic byte-for-byte for a fixed config (including the
seed): floats print with 17 significant digits in JSON and 12 in CSV, key
order is fixed, and no timestamps are embedded. Exit codes: 0 success,
1 verification failures, 2 config errors.
"""

from __future__ import annotations

import argparse
import json
import os
import sys

import numpy as np

from . import __version__
from . import diagnostics, dynamics, fourier, spectral, verify
from .generator import build_level_generator
from .statespace import StateCapExceeded
from .graph import (
    Graph, is_complete, is_edge_subgraph, load_graph, make_complete, make_cycle,
    make_half_complete_cycle, max_degree, to_json_dict, uniform_rate,
)

SCHEMA_VERSION = "xproc-report-1"


class ConfigError(Exception):
    """A bad flag or config value; the message names the field."""


# ---------------------------------------------------------------------------
# deterministic serialization
# ---------------------------------------------------------------------------

def _float_repr(x: float, digits: int) -> str:
    if x != x or x in (float("inf"), float("-inf")):
        raise ValueError(f"cannot serialize non-finite value {x}")
    return format(x, f".{digits}g")


def dumps_json(obj, indent: int = 0) -> str:
    pad = "  " * indent
    inner = "  " * (indent + 1)
    if isinstance(obj, bool) or isinstance(obj, np.bool_):
        return "true" if obj else "false"
    if isinstance(obj, (int, np.integer)):
        return str(int(obj))
    if isinstance(obj, (float, np.floating)):
        return _float_repr(float(obj), 17)
    if isinstance(obj, str):
        return json.dumps(obj)
    if obj is None:
        return "null"
    if isinstance(obj, dict):
        if not obj:
            return "{}"
        items = [
            f"{inner}{json.dumps(str(k))}: {dumps_json(v, indent + 1)}"
            for k, v in obj.items()
        ]
        return "{\n" + ",\n".join(items) + "\n" + pad + "}"
    if isinstance(obj, (list, tuple)):
        if len(obj) == 0:
            return "[]"
        items = [f"{inner}{dumps_json(v, indent + 1)}" for v in obj]
        return "[\n" + ",\n".join(items) + "\n" + pad + "]"
    raise TypeError(f"cannot serialize {type(obj).__name__}")


def format_csv(header: list[str], rows: list[tuple], config: dict) -> str:
    lines = [f"# schema={SCHEMA_VERSION} config={json.dumps(config, sort_keys=True)}"]
    lines.append(",".join(header))
    for row in rows:
        cells = []
        for cell in row:
            if isinstance(cell, bool):
                cells.append("true" if cell else "false")
            elif isinstance(cell, (int, np.integer)):
                cells.append(str(int(cell)))
            elif isinstance(cell, (float, np.floating)):
                cells.append(_float_repr(float(cell), 12))
            else:
                cells.append(str(cell))
        lines.append(",".join(cells))
    return "\n".join(lines) + "\n"


def emit(text: str, out: str | None) -> None:
    if out:
        with open(out, "w") as fh:
            fh.write(text)
    else:
        sys.stdout.write(text)


def report(config: dict, body: dict) -> dict:
    return {"schema_version": SCHEMA_VERSION, "config": config, **body}


# ---------------------------------------------------------------------------
# flag parsing helpers
# ---------------------------------------------------------------------------

def resolve_graph(spec: str | None, rate: float | None, rate_policy: str,
                  field: str = "--graph") -> Graph:
    if not spec:
        raise ConfigError(f"{field} is required")
    if spec.startswith("@"):
        g = load_graph(spec[1:])
        if rate_policy == "one-over-max-degree":
            d = max_degree(g)
            g = Graph(g.n, tuple((u, v, 1.0 / d) for u, v, _ in g.edges))
        elif rate is not None:
            g = Graph(g.n, tuple((u, v, rate) for u, v, _ in g.edges))
        return g
    head, _, arg = spec.partition(":")
    makers = {
        "complete": make_complete,
        "cycle": make_cycle,
        "half_complete_cycle": make_half_complete_cycle,
    }
    if head not in makers:
        raise ConfigError(
            f"{field}: unknown family {head!r}; expected complete, cycle, "
            "half_complete_cycle, or @file.json"
        )
    try:
        size = int(arg)
    except ValueError:
        raise ConfigError(f"{field}: family parameter must be an integer, got {arg!r}")
    if rate_policy == "one-over-max-degree":
        probe = makers[head](size, 1.0)
        return makers[head](size, 1.0 / max_degree(probe))
    if rate is None:
        raise ConfigError(f"--rate is required with rate policy 'uniform' for {field}")
    if rate <= 0:
        raise ConfigError(f"--rate must be > 0, got {rate}")
    return makers[head](size, rate)


def resolve_function(spec: str | None, n: int) -> fourier.BooleanFunction:
    if not spec:
        raise ConfigError("--function is required")
    if spec.startswith("@"):
        with open(spec[1:]) as fh:
            raw = json.load(fh)
        if not isinstance(raw, dict) or "n" not in raw or "values" not in raw:
            raise ConfigError(
                "--function: table file must be {\"n\": int, \"values\": [...]}"
            )
        if raw["n"] != n:
            raise ConfigError(
                f"--function: table is for n={raw['n']} but the graph has n={n}"
            )
        return fourier.from_table(n, raw["values"])
    try:
        return fourier.make_function(n, spec)
    except ValueError as exc:
        raise ConfigError(f"--function: {exc}")


def parse_levels(spec: str, n: int) -> list[int]:
    if spec == "all":
        return list(range(n + 1))
    try:
        level = int(spec)
    except ValueError:
        raise ConfigError(f"--level must be an integer or 'all', got {spec!r}")
    if not (0 <= level <= n):
        raise ConfigError(f"--level must be in 0..{n}, got {level}")
    return [level]


def parse_n_grid(spec: str) -> list[int]:
    try:
        lo, _, hi = spec.partition(":")
        a, b = int(lo), int(hi)
    except ValueError:
        raise ConfigError(f"--n-grid must look like a:b, got {spec!r}")
    if a > b:
        raise ConfigError(f"--n-grid must be nondecreasing, got {spec!r}")
    return list(range(a, b + 1))


def config_echo(args: argparse.Namespace, keys: list[str]) -> dict:
    echo = {"subcommand": args.subcommand}
    for key in keys:
        value = getattr(args, key.replace("-", "_"))
        if value is not None:
            echo[key] = value
    cap = os.environ.get("XPROC_STATE_CAP")
    if cap:
        echo["state_cap"] = int(cap)
    return echo


# ---------------------------------------------------------------------------
# subcommands
# ---------------------------------------------------------------------------

def cmd_spectrum(args) -> int:
    g = resolve_graph(args.graph, args.rate, args.rate_policy)
    levels = parse_levels(args.level, g.n)
    config = config_echo(args, ["graph", "rate", "rate_policy", "level", "format"])
    bases = []
    for level in levels:
        gen = build_level_generator(g, level)
        if args.dump_matrix:
            rows = [tuple(row) for row in gen.matrix]
            path = args.dump_matrix
            if len(levels) > 1:
                root, ext = os.path.splitext(path)
                path = f"{root}.level{level}{ext or '.csv'}"
            emit(format_csv([f"c{j}" for j in range(gen.space.size)], rows, config), path)
        bases.append(spectral.eigendecompose(gen))
    rows = []
    for level, basis in zip(levels, bases):
        for gid, group in enumerate(basis.groups):
            for i in group:
                rows.append((level, i, float(basis.eigenvalues[i]), gid))
    if args.format == "csv":
        emit(format_csv(["level", "index", "eigenvalue", "multiplicity_group_id"],
                        rows, config), args.out)
    else:
        body = {
            "graph": to_json_dict(g),
            "spectrum": [
                {"level": l, "index": i, "eigenvalue": lam, "multiplicity_group_id": gid}
                for l, i, lam, gid in rows
            ],
        }
        emit(dumps_json(report(config, body)) + "\n", args.out)
    return 0


def cmd_profile(args) -> int:
    if args.n_grid:
        return _profile_sweep(args)
    g = resolve_graph(args.graph, args.rate, args.rate_policy)
    f = resolve_function(args.function, g.n)
    config = config_echo(args, ["graph", "rate", "rate_policy", "function", "format"])
    profile = fourier.spectral_profile(f, spectral.all_level_bases(g))
    if args.format == "csv":
        emit(format_csv(["level", "eigenvalue", "coeff_sq"],
                        fourier.profile_csv_rows(profile), config), args.out)
    else:
        emit(dumps_json(report(config, fourier.profile_summary(profile))) + "\n",
             args.out)
    return 0


def _profile_sweep(args) -> int:
    """Sensitivity tabulation of one (graph family, function) over an n-grid."""
    if not args.graph or ":" in args.graph or args.graph.startswith("@"):
        raise ConfigError(
            "--graph: with --n-grid give a bare family name "
            "(complete, cycle, half_complete_cycle); the grid supplies the size"
        )
    family = args.graph
    if family not in ("complete", "cycle", "half_complete_cycle"):
        raise ConfigError(f"--graph: unknown family {family!r}")
    n_grid = parse_n_grid(args.n_grid)
    if family == "half_complete_cycle" and any(n % 2 for n in n_grid):
        raise ConfigError("--n-grid: half_complete_cycle needs even vertex counts")
    if family == "cycle" and min(n_grid) < 3:
        raise ConfigError("--n-grid: cycle needs n >= 3")
    try:
        k_grid = [float(s) for s in (args.k or "1.0").split(",")]
    except ValueError:
        raise ConfigError(f"--k: expected a comma-separated list of thresholds, got {args.k!r}")
    if any(k <= 0 for k in k_grid):
        raise ConfigError("--k: thresholds must be > 0")
    function_spec = args.function
    if not function_spec or function_spec.startswith("@"):
        raise ConfigError("--function: a named family is required with --n-grid")

    def make_instance(n: int):
        if family == "complete":
            spec = f"complete:{n}"
        elif family == "cycle":
            spec = f"cycle:{n}"
        else:
            spec = f"half_complete_cycle:{n // 2}"
        g = resolve_graph(spec, args.rate, args.rate_policy)
        return g, resolve_function(function_spec, g.n)

    config = config_echo(args, ["graph", "rate", "rate_policy", "function",
                                "n-grid", "k", "format"])
    sweep = diagnostics.sensitivity_profile(
        make_instance, n_grid, k_grid,
        family=f"{family}/{function_spec}",
    )
    emit(dumps_json(report(config, sweep.to_dict())) + "\n", args.out)
    return 0


def cmd_exact(args) -> int:
    g = resolve_graph(args.graph, args.rate, args.rate_policy)
    f = resolve_function(args.function, g.n)
    if args.t is None and args.eps is None:
        raise ConfigError("--t and/or --eps is required for 'exact'")
    config = config_echo(args, ["graph", "rate", "rate_policy", "function", "t", "eps"])
    profile = fourier.spectral_profile(f, spectral.all_level_bases(g))
    body: dict = {"mean": profile.mean, "variance": profile.variance()}
    if args.t is not None:
        body["t"] = args.t
        body["correlation"] = fourier.exact_correlation(profile, args.t)
        body["covariance"] = fourier.exact_covariance(profile, args.t)
    if args.eps is not None:
        body["eps"] = args.eps
        body["flip_probability"] = fourier.exact_flip_probability(profile, args.eps)
    emit(dumps_json(report(config, body)) + "\n", args.out)
    return 0


def cmd_simulate(args) -> int:
    g = resolve_graph(args.graph, args.rate, args.rate_policy)
    f = resolve_function(args.function, g.n)
    if args.t is None and args.eps is None:
        raise ConfigError("--t and/or --eps is required for 'simulate'")
    level = None
    if args.level != "all":
        level = parse_levels(args.level, g.n)[0]
    config = config_echo(args, ["graph", "rate", "rate_policy", "function", "t",
                                "eps", "level", "samples", "seed"])
    spec = dynamics.SimulationSpec(level=level, seed=args.seed, samples=args.samples)
    body: dict = {}
    if args.t is not None:
        est = dynamics.estimate_covariance(g, f, args.t, spec)
        body["covariance"] = {
            "t": args.t, "point": est.point,
            "std_error": est.std_error, "samples": est.samples,
        }
    if args.eps is not None:
        est = dynamics.estimate_flip_probability(g, f, args.eps, spec)
        body["flip_probability"] = {
            "eps": args.eps, "point": est.point,
            "std_error": est.std_error, "samples": est.samples,
        }
    emit(dumps_json(report(config, body)) + "\n", args.out)
    return 0


def cmd_verify(args) -> int:
    if args.suite != "all":
        raise ConfigError(f"--suite: only 'all' is supported, got {args.suite!r}")
    config = config_echo(args, ["suite", "nmax", "seed", "mc_samples"])
    result = verify.run_suite(nmax=args.nmax, seed=args.seed,
                              mc_samples=args.mc_samples)
    emit(dumps_json(report(config, result)) + "\n", args.out)
    return 0 if result["violations"] == 0 else 1


def cmd_compare(args) -> int:
    g_a = resolve_graph(args.graph, args.rate, args.rate_policy)
    g_b = resolve_graph(args.graph_b, args.rate_b, args.rate_policy_b, "--graph-b")
    if g_a.n != g_b.n:
        raise ConfigError(f"--graph-b: vertex counts differ ({g_a.n} vs {g_b.n})")
    config = config_echo(args, ["graph", "rate", "rate_policy", "graph-b", "rate-b",
                                "rate-policy-b", "function", "k", "kprime"])
    checks = []
    f = resolve_function(args.function, g_a.n) if args.function else None

    if is_edge_subgraph(g_b, g_a):
        gap = diagnostics.spectra_domination_gap(g_b, g_a)
        checks.append({
            "name": "spectra_dominated_by_supergraph",
            "instances": g_a.n + 1,
            "violations": int(gap > 1e-10),
            "max_residual": gap,
        })
        if f is not None and args.k is not None and args.kprime is not None:
            lhs, rhs = diagnostics.monotonicity_inequality_check(
                g_a, g_b, f, args.k, args.kprime
            )
            checks.append({
                "name": "monotonicity_inequality",
                "instances": 1,
                "violations": int(lhs > rhs + 1e-10),
                "max_residual": lhs - rhs,
                "lhs": lhs,
                "rhs": rhs,
            })
    if is_complete(g_a) and args.k is not None:
        kprime = args.kprime if args.kprime is not None else 2.0 * args.k
        alpha = uniform_rate(g_a)
        n = g_a.n
        if alpha * kprime * (n - kprime + 1) >= args.k * (1 - 1e-9):
            bases_a = spectral.all_level_bases(g_a)
            bases_b = spectral.all_level_bases(g_b)
            worst = 0.0
            for level in range(n + 1):
                worst = max(worst, diagnostics.containment_residual(
                    g_a, g_b, level, args.k, kprime,
                    basis_complete=bases_a[level], basis_other=bases_b[level],
                ))
            checks.append({
                "name": "containment_residual",
                "instances": n + 1,
                "violations": int(worst > 1e-8),
                "max_residual": worst,
            })
        else:
            checks.append({
                "name": "containment_residual",
                "instances": 0,
                "violations": 0,
                "max_residual": 0.0,
                "skipped": "threshold hypothesis does not hold for these k, k'",
            })
    body = {
        "edge_subgraph": is_edge_subgraph(g_b, g_a),
        "checks": checks,
        "violations": int(sum(c["violations"] for c in checks)),
    }
    emit(dumps_json(report(config, body)) + "\n", args.out)
    return 0 if body["violations"] == 0 else 1


# ---------------------------------------------------------------------------
# argument plumbing
# ---------------------------------------------------------------------------

def _add_graph_flags(p, suffix=""):
    dash = "-b" if suffix else ""
    p.add_argument(f"--graph{dash}", help="family:params (complete:N, cycle:N, "
                   "half_complete_cycle:N) or @file.json")
    p.add_argument(f"--rate{dash}", type=float, default=None,
                   help="uniform edge rate")
    p.add_argument(f"--rate-policy{dash}", default="uniform",
                   choices=["uniform", "one-over-max-degree"],
                   help="how edge rates are chosen for graph families")


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="xproc",
        description="Spectral analysis and simulation of exclusion dynamics on graphs.",
    )
    parser.add_argument("--version", action="version", version=__version__)
    sub = parser.add_subparsers(dest="subcommand", required=True)

    p = sub.add_parser("spectrum", help="eigenvalues and multiplicities per level")
    _add_graph_flags(p)
    p.add_argument("--level", default="all", help="level index or 'all'")
    p.add_argument("--dump-matrix", default=None, metavar="PATH",
                   help="also write the level generator matrix as CSV")
    p.add_argument("--format", default="csv", choices=["json", "csv"])
    p.add_argument("--out", default=None)
    p.set_defaults(func=cmd_spectrum)

    p = sub.add_parser("profile", help="spectral profile of a function")
    _add_graph_flags(p)
    p.add_argument("--function", help="dictator:v | parity_on_set:v1,v2 | majority | @table.json")
    p.add_argument("--n-grid", default=None, metavar="A:B",
                   help="sweep a bare graph family over vertex counts A..B")
    p.add_argument("--k", default=None,
                   help="comma-separated eigenvalue thresholds for the sweep")
    p.add_argument("--format", default="json", choices=["json", "csv"])
    p.add_argument("--out", default=None)
    p.set_defaults(func=cmd_profile)

    p = sub.add_parser("exact", help="exact covariance / flip probability")
    _add_graph_flags(p)
    p.add_argument("--function")
    p.add_argument("--t", type=float, default=None)
    p.add_argument("--eps", type=float, default=None)
    p.add_argument("--out", default=None)
    p.set_defaults(func=cmd_exact)

    p = sub.add_parser("simulate", help="Monte Carlo estimates with std errors")
    _add_graph_flags(p)
    p.add_argument("--function")
    p.add_argument("--t", type=float, default=None)
    p.add_argument("--eps", type=float, default=None)
    p.add_argument("--level", default="all",
                   help="start level ('all' = uniform over every configuration)")
    p.add_argument("--samples", type=int, default=10000)
    p.add_argument("--seed", type=int, default=7)
    p.add_argument("--out", default=None)
    p.set_defaults(func=cmd_simulate)

    p = sub.add_parser("verify", help="run the full invariant suite")
    p.add_argument("--suite", default="all")
    p.add_argument("--nmax", type=int, default=8)
    p.add_argument("--seed", type=int, default=7)
    p.add_argument("--mc-samples", type=int, default=4000)
    p.add_argument("--out", default=None)
    p.set_defaults(func=cmd_verify)

    p = sub.add_parser("compare", help="two-graph containment/monotonicity report")
    _add_graph_flags(p)
    _add_graph_flags(p, suffix="b")
    p.add_argument("--function", default=None)
    p.add_argument("--k", type=float, default=None)
    p.add_argument("--kprime", type=float, default=None)
    p.add_argument("--out", default=None)
    p.set_defaults(func=cmd_compare)

    return parser


def apply_config_file(argv: list[str]) -> list[str]:
    """Expand --config FILE into flags; explicit flags take precedence."""
    if "--config" not in argv:
        return argv
    idx = argv.index("--config")
    try:
        path = argv[idx + 1]
    except IndexError:
        raise ConfigError("--config requires a path")
    with open(path) as fh:
        raw = json.load(fh)
    if not isinstance(raw, dict):
        raise ConfigError("--config: file must hold a JSON object of flag values")
    rest = argv[:idx] + argv[idx + 2:]
    head = []
    if rest and not rest[0].startswith("-"):
        head, rest = [rest[0]], rest[1:]
    elif "subcommand" in raw:
        head = [str(raw["subcommand"])]
    extra = []
    for key, value in raw.items():
        if key == "subcommand":
            continue
        flag = "--" + key.replace("_", "-")
        if flag in rest:
            continue
        extra.extend([flag, str(value)])
    return head + rest + extra


def main(argv: list[str] | None = None) -> int:
    argv = list(sys.argv[1:] if argv is None else argv)
    try:
        argv = apply_config_file(argv)
        args = build_parser().parse_args(argv)
        return args.func(args)
    except ConfigError as exc:
        print(f"config error: {exc}", file=sys.stderr)
        return 2
    except (OSError, ValueError, StateCapExceeded) as exc:
        print(f"config error: {exc}", file=sys.stderr)
        return 2


if __name__ == "__main__":
    sys.exit(main())
