"""Command-line entry point: ``echochamber <subcommand> [--in FILE]... [--out DIR] [--seed N]``.

Every subcommand writes plot-ready CSV/JSON files plus ``manifest.json`` into
``--out``. Exit status: 0 on success, 1 on usage errors, 2 on data errors
(nothing is written in that case).
"""
from __future__ import annotations

import argparse
import csv
import hashlib
import io
import json
import logging
import os
import sys
from pathlib import Path

import numpy as np

from . import __version__
from .community import METHODS, SpinglassParams, detect, modularity, rand_index
from .community import read_partition, write_partition
from .exposure import METRICS, WINDOWS, build_profiles, exposure_curve
from .graph import build_bipartite, project_pages, project_users, read_graph, write_graph
from .ingest import ACTIONS, counts_per, filter_dataset, parse_interactions, summarize
from .polarization import localization_distribution, polarization_rank, polarized_fraction
from .simulation import SimConfig, load_config, project_and_count, run, sweep
from .stats import FAMILIES, empirical_ccdf, fit_family, loglik_table

log = logging.getLogger("echochamber")

SUBCOMMANDS = ("summarize", "project", "communities", "compare", "fit", "ccdf",
               "exposure", "localization", "rank", "simulate", "sweep")


class UsageError(Exception):
    pass


class DataError(Exception):
    pass


class _Parser(argparse.ArgumentParser):
    def error(self, message):
        self.print_help(sys.stderr)
        raise UsageError(f"{self.prog}: error: {message}")


def _dumps(obj) -> str:
    return json.dumps(obj, indent=2, sort_keys=True) + "\n"


def _csv(rows, header) -> str:
    buf = io.StringIO()
    w = csv.writer(buf, lineterminator="\n")
    w.writerow(header)
    w.writerows(rows)
    return buf.getvalue()


def _num(x):
    """Shortest round-trip repr, so floats print identically on every run."""
    return repr(float(x))


def _sha256(path: str) -> str:
    return hashlib.sha256(Path(path).read_bytes()).hexdigest()


def _need(args, n: int | None = None, at_least: int = 1) -> list[str]:
    paths = args.inputs or []
    if n is not None and len(paths) != n:
        raise UsageError(f"{args.command} takes exactly {n} --in file(s), got {len(paths)}")
    if len(paths) < at_least:
        raise UsageError(f"{args.command} needs at least {at_least} --in file(s)")
    for p in paths:
        if not os.path.isfile(p):
            raise DataError(f"input file not found: {p}")
    return paths


def _open_input(path: str):
    if not os.path.isfile(path):
        raise DataError(f"input file not found: {path}")
    return open(path, newline="", encoding="utf-8")


def _dataset(args):
    (path,) = _need(args, 1)
    pages = getattr(args, "pages", None)
    if pages is not None and not os.path.isfile(pages):
        raise DataError(f"pages table not found: {pages}")
    d = parse_interactions(path, pages, strict=not args.lenient)
    if d.skipped:
        print(f"skipped {d.skipped} malformed rows", file=sys.stderr)
    country = getattr(args, "country", None)
    if country:
        d = filter_dataset(d, country=country)
    return d


def _sample(args) -> np.ndarray:
    if args.values:
        (path,) = _need(args, 1)
        with _open_input(path) as fh:
            rows = list(csv.reader(fh))
        if not rows or rows[0] != ["value"]:
            raise DataError("values file must have a single 'value' column")
        return np.array([float(r[0]) for r in rows[1:] if r])
    d = _dataset(args)
    return np.array(counts_per(d, args.unit, args.action), dtype=float)


# subcommand handlers: each returns {filename: content}

def cmd_summarize(args):
    d = _dataset(args)
    out = summarize(d).as_dict()
    if d.country:
        out["country"] = d.country
    return {"summary.json": _dumps(out)}


def cmd_project(args):
    d = _dataset(args)
    b = build_bipartite(d, args.action)
    g = project_pages(b) if args.side == "pages" else project_users(b, args.max_users)
    if args.min_weight > 1:
        g = g.min_weight(args.min_weight)
    edges, nodes = io.StringIO(), io.StringIO()
    write_graph(g, edges, nodes)
    return {"edges.csv": edges.getvalue(), "nodes.csv": nodes.getvalue()}


def _read_graph_files(args):
    (edges_path,) = _need(args, 1)
    with _open_input(edges_path) as fe:
        if args.nodes:
            with _open_input(args.nodes) as fn:
                return read_graph(fe, fn)
        return read_graph(fe)


def cmd_communities(args):
    g = _read_graph_files(args)
    params = SpinglassParams(args.spins, args.start_temp, args.end_temp, args.cooling)
    part = detect(g, args.method, seed=args.seed, params=params)
    buf = io.StringIO()
    write_partition(part, buf)
    info = {
        "method": args.method,
        "seed": args.seed,
        "n_nodes": g.n_nodes,
        "n_communities": part.n_communities,
        "modularity": modularity(g, part),
    }
    return {"partition.csv": buf.getvalue(), "communities.json": _dumps(info)}


def cmd_compare(args):
    paths = _need(args, at_least=2)
    labels = args.labels.split(",") if args.labels else [Path(p).stem for p in paths]
    if len(labels) != len(paths):
        raise UsageError("--labels must name every input")
    parts = []
    for p in paths:
        with _open_input(p) as fh:
            parts.append(read_partition(fh))
    rows = []
    for i in range(len(parts)):
        for j in range(i + 1, len(parts)):
            rows.append({"method_a": labels[i], "method_b": labels[j],
                         "rand_index": rand_index(parts[i], parts[j])})
    return {"compare.json": _dumps(rows[0] if len(rows) == 1 else rows)}


def cmd_fit(args):
    x = _sample(args)
    if args.family == "all":
        table = loglik_table(x)
        out = {
            fam: {
                "log_likelihood": row.log_likelihood,
                "domain": row.domain,
                "n": row.n,
                "x_min": row.x_min,
                "tail_log_likelihood": row.tail_log_likelihood,
                "n_tail": row.n_tail,
                "params": row.params,
            }
            for fam, row in table.items()
        }
    else:
        out = fit_family(x, args.family).as_dict()
    return {"fit.json": _dumps(out)}


def cmd_ccdf(args):
    x = _sample(args)
    u, p = empirical_ccdf(x[x > 0] if args.drop_zeros else x)
    return {"ccdf.csv": _csv(((_num(a), _num(b)) for a, b in zip(u, p)), ("x", "ccdf"))}


def cmd_exposure(args):
    d = _dataset(args)
    profiles = build_profiles(d)
    if not profiles:
        raise DataError("no likes in the dataset")
    total = len(d.page_ids())
    rows = []
    for by in ([args.by] if args.by else METRICS):
        for window in ([args.window] if args.window else WINDOWS):
            for x, y in exposure_curve(profiles, by, window, total):
                rows.append((_num(x), _num(y), window, by))
    return {"exposure.csv": _csv(rows, ("x", "y", "window", "by"))}


def cmd_localization(args):
    d = _dataset(args)
    if not args.partition:
        raise UsageError("localization needs --partition")
    with _open_input(args.partition) as fh:
        part = read_partition(fh)
    sample = localization_distribution(d, part, args.min_likes)
    label = args.label or d.country or Path(args.inputs[0]).stem
    summary = {
        "label": label,
        "median": sample.median,
        "n_users": len(sample),
        "n_communities": sample.n_communities,
        "min_likes": sample.min_likes,
        "polarized_fraction": polarized_fraction(sample, args.threshold),
        "threshold": args.threshold,
        "skipped_users": sample.skipped_users,
    }
    u, p = sample.ccdf()
    edges, dens = sample.pdf()
    return {
        "localization.csv": _csv(((usr, _num(v)) for usr, v in zip(sample.users, sample.values)),
                                 ("user_id", "L")),
        "localization.json": _dumps(summary),
        "localization_ccdf.csv": _csv(((_num(a), _num(b)) for a, b in zip(u, p)), ("L", "ccdf")),
        "localization_pdf.csv": _csv(
            ((_num(lo), _num(hi), _num(v)) for lo, hi, v in zip(edges[:-1], edges[1:], dens)),
            ("bin_lo", "bin_hi", "density")),
    }


def cmd_rank(args):
    medians = {}
    for p in _need(args, at_least=1):
        with _open_input(p) as fh:
            try:
                s = json.load(fh)
                medians[str(s["label"])] = float(s["median"])
            except (ValueError, KeyError, TypeError) as exc:
                raise DataError(f"{p}: not a localization summary ({exc})") from None
    r = polarization_rank(medians)
    out = {
        "order": list(r.order),
        "medians": r.medians,
        "ties": [list(t) for t in r.ties],
        "most_polarized": r.order[0],
        "least_polarized": r.order[-1],
    }
    return {"ranking.json": _dumps(out)}


_SIM_FLAGS = ("n_pages", "n_users", "tolerance", "trust_mean", "trust_sd", "activity_exponent",
              "activity_max", "max_rounds", "convergence_eps", "method")


def _sim_config(args) -> SimConfig:
    text = ""
    if args.config:
        with _open_input(args.config) as fh:
            text = fh.read()
    overrides = {k: getattr(args, k) for k in _SIM_FLAGS}
    overrides["seed"] = args.seed
    if args.one_shot:
        overrides["one_shot"] = True
    cfg = load_config(text, **overrides)
    args.seed = cfg.seed  # echo the resolved seed in the manifest
    return cfg


def cmd_simulate(args):
    cfg = _sim_config(args)
    r = run(cfg)
    info = {
        "config": cfg.as_dict(),
        "rounds": r.rounds,
        "converged": r.converged,
        "n_likes": r.n_likes,
        "n_communities": project_and_count(r),
    }
    pop = r.population
    opinions = _csv(
        ((u, _num(pop.opinion[u]), _num(r.opinions[u]), _num(pop.trust[u]), int(pop.activity[u]))
         for u in range(cfg.n_users)),
        ("user", "initial_opinion", "final_opinion", "trust", "activity"))
    pages = _csv(((p, _num(c)) for p, c in enumerate(pop.editorial)), ("page", "editorial_line"))
    likes = _csv(r.edges(), ("user", "page"))
    return {"simulation.json": _dumps(info), "opinions.csv": opinions,
            "pages.csv": pages, "likes.csv": likes}


def cmd_sweep(args):
    base = _sim_config(args)
    try:
        grid = [float(v) for v in args.values.split(",") if v.strip()]
    except ValueError:
        raise UsageError(f"--values must be comma-separated numbers, got {args.values!r}") from None
    points = sweep(base, args.param, grid, args.iterations, args.jobs)
    rows = [(_num(p.value), _num(p.mean), _num(p.sd), p.iterations) for p in points]
    meta = {"base_config": base.as_dict(), "param": args.param, "values": grid,
            "iterations": args.iterations, "seed": base.seed,
            "counts": {_num(p.value): list(p.counts) for p in points}}
    return {"sweep.csv": _csv(rows, (args.param, "mean_communities", "sd", "iterations")),
            "sweep.json": _dumps(meta)}


def build_parser() -> argparse.ArgumentParser:
    parser = _Parser(prog="echochamber", description=__doc__.splitlines()[0])
    parser.add_argument("--version", action="version", version=__version__)
    sub = parser.add_subparsers(dest="command", parser_class=_Parser, metavar="SUBCOMMAND")

    parser.subparsers = {}

    def add(name, help_, data=False):
        p = parser.subparsers[name] = sub.add_parser(name, help=help_)
        p.add_argument("--in", dest="inputs", action="append", metavar="FILE")
        p.add_argument("--out", default=".", metavar="DIR")
        p.add_argument("--seed", type=int, default=None if name in ("simulate", "sweep") else 0)
        if data:
            p.add_argument("--pages", metavar="FILE", help="pages table page_id,page_name,country")
            p.add_argument("--country", help="keep pages of this country only")
            p.add_argument("--lenient", action="store_true", help="skip malformed rows")
        return p

    add("summarize", "dataset breakdown counts", data=True)

    p = add("project", "page or user co-occurrence projection", data=True)
    p.add_argument("--action", choices=("like", "comment"), default="like")
    p.add_argument("--side", choices=("pages", "users"), default="pages")
    p.add_argument("--min-weight", type=int, default=1)
    p.add_argument("--max-users", type=int, default=20_000)

    p = add("communities", "community detection on an edge list")
    p.add_argument("--nodes", metavar="FILE")
    p.add_argument("--method", choices=METHODS, default="fastgreedy")
    p.add_argument("--spins", type=int, default=25)
    p.add_argument("--start-temp", type=float, default=1.0)
    p.add_argument("--end-temp", type=float, default=0.01)
    p.add_argument("--cooling", type=float, default=0.99)

    p = add("compare", "Rand index between partitions")
    p.add_argument("--labels", help="comma-separated names for the inputs")

    for name, help_ in (("fit", "maximum-likelihood fits"), ("ccdf", "empirical CCDF")):
        p = add(name, help_, data=True)
        p.add_argument("--values", action="store_true", help="--in is a one-column 'value' CSV")
        p.add_argument("--unit", choices=("post", "user"), default="post")
        p.add_argument("--action", choices=ACTIONS, default="like")
        if name == "fit":
            p.add_argument("--family", choices=FAMILIES + ("all",), default="powerlaw")
        else:
            p.add_argument("--drop-zeros", action="store_true")

    p = add("exposure", "selective exposure curves", data=True)
    p.add_argument("--by", choices=METRICS)
    p.add_argument("--window", choices=tuple(WINDOWS))

    p = add("localization", "per-user localization L", data=True)
    p.add_argument("--partition", metavar="FILE", help="node_id,community file for the pages")
    p.add_argument("--min-likes", type=int, default=10)
    p.add_argument("--threshold", type=float, default=1.05)
    p.add_argument("--label")

    add("rank", "rank localization summaries by median L")

    for name, help_ in (("simulate", "one simulation run"), ("sweep", "parameter sweep")):
        p = add(name, help_)
        p.add_argument("--config", metavar="FILE", help="key=value config file")
        p.add_argument("--n-pages", dest="n_pages", type=int)
        p.add_argument("--n-users", dest="n_users", type=int)
        p.add_argument("--tolerance", type=float)
        p.add_argument("--trust-mean", dest="trust_mean", type=float)
        p.add_argument("--trust-sd", dest="trust_sd", type=float)
        p.add_argument("--activity-exponent", dest="activity_exponent", type=float)
        p.add_argument("--activity-max", dest="activity_max", type=int)
        p.add_argument("--max-rounds", dest="max_rounds", type=int)
        p.add_argument("--convergence-eps", dest="convergence_eps", type=float)
        p.add_argument("--method", choices=("multilevel", "fastgreedy"))
        p.add_argument("--one-shot", action="store_true")
        if name == "sweep":
            p.add_argument("--param", default="trust_mean")
            p.add_argument("--values", default="0.01,0.05,0.1,0.2,0.4,0.6,0.9")
            p.add_argument("--iterations", type=int, default=100)
            p.add_argument("--jobs", type=int, default=1)
    return parser


HANDLERS = {name: globals()[f"cmd_{name}"] for name in SUBCOMMANDS}


def _manifest(args, argv, outputs) -> str:
    params = {k: v for k, v in sorted(vars(args).items()) if k not in ("inputs", "out", "command")}
    inputs = list(args.inputs or [])
    for extra in ("pages", "nodes", "partition", "config"):
        if params.get(extra):
            inputs.append(params[extra])
    return _dumps({
        "subcommand": args.command,
        "argv": list(argv),
        "inputs": [{"path": p, "sha256": _sha256(p)} for p in inputs],
        "parameters": params,
        "seed": args.seed,
        "version": __version__,
        "outputs": sorted(outputs),
    })


def main(argv=None) -> int:
    argv = list(sys.argv[1:] if argv is None else argv)
    parser = build_parser()
    args = None
    try:
        args = parser.parse_args(argv)
        if args.command is None:
            parser.print_help(sys.stderr)
            return 1
        outputs = HANDLERS[args.command](args)
    except UsageError as exc:
        if args is not None:  # raised by a handler, not by argparse
            parser.subparsers[args.command].print_usage(sys.stderr)
        print(exc, file=sys.stderr)
        return 1
    except SystemExit as exc:  # --help / --version
        return int(exc.code or 0)
    except (DataError, ValueError, KeyError, OSError) as exc:
        print(f"echochamber {argv[0] if argv else ''}: {exc}", file=sys.stderr)
        return 2
    out = Path(args.out)
    out.mkdir(parents=True, exist_ok=True)
    for name, content in outputs.items():
        (out / name).write_text(content, encoding="utf-8")
    (out / "manifest.json").write_text(_manifest(args, argv, outputs), encoding="utf-8")
    return 0


if __name__ == "__main__":
    sys.exit(main())
