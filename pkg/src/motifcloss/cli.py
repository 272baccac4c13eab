"""Command-line entry point: census, closs, motifs, condense and verify."""

from __future__ import annotations

import argparse
import csv
import io
import json
import logging
import os
import sys

import numpy as np

from motifcloss import __version__
from motifcloss.census import census
from motifcloss.closs import DEFAULT_A_MAX, DEFAULT_SAMPLES, closs_csv, closs_table
from motifcloss.condensation import (BIN_NAMES, SignificanceConfig, closs_histogram, condense_motifs,
                                     condensed_matrix, condensed_matrix_siso, full_interconnection,
                                     trace_to_json, verify_condensation)
from motifcloss.config import RunConfig
from motifcloss.dynamics import TestNode, check_bound
from motifcloss.graph import DEFAULT_SWAP_FACTOR, EdgeListError, load_edge_list
from motifcloss.reports import (csv_header, json_report, jsonable, load_graph, load_module_system,
                                read_input)
from motifcloss.significance import DEFAULT_ENSEMBLE, motifs_csv, zscore_vs_closs, zscores_multi

log = logging.getLogger("motifcloss")

DEFAULT_FORMAT = {"census": "csv", "closs": "csv", "motifs": "csv", "condense": "json",
                  "verify": "json"}


class UsageError(Exception):
    pass


def _fmt(x) -> str:
    if x is None:
        return "undefined"
    return repr(float(x))


def _table(rows, header) -> str:
    out = io.StringIO()
    w = csv.writer(out, lineterminator="\n")
    w.writerow(header)
    w.writerows(rows)
    return out.getvalue()


def _require_input(cfg: RunConfig):
    if not cfg.input:
        raise UsageError(f"{cfg.command} needs --input (a file path or @planted)")


def cmd_census(cfg: RunConfig) -> str:
    _require_input(cfg)
    g = load_graph(cfg.input)
    rows = []
    for n in cfg.n:
        res = census(g, n)
        for cls in sorted(res.counts):
            rows.append([cls.class_id, cls.n, cls.m, cls.label, res.counts[cls]])
    header = ["class_id", "n", "m", "label", "count"]
    conf = cfg.as_dict()
    if cfg.format == "json":
        return json_report(conf, {
            "graph": {"nodes": g.n, "edges": g.m, **g.meta},
            "census": [dict(zip(header, r)) for r in rows]})
    return csv_header(conf) + _table(rows, header)


def _closs(cfg: RunConfig, sizes):
    return closs_table(sizes, cfg.measure, cfg.samples, cfg.a_max, cfg.seed, cfg.resolved_threads())


def cmd_closs(cfg: RunConfig) -> str:
    table = _closs(cfg, cfg.n)
    conf = cfg.as_dict()
    text = closs_csv(table)
    if cfg.format == "json":
        lines = list(csv.DictReader(io.StringIO(text)))
        return json_report(conf, {"classes": lines})
    return csv_header(conf) + text


def cmd_motifs(cfg: RunConfig) -> str:
    _require_input(cfg)
    g = load_graph(cfg.input)
    sizes = tuple(n for n in cfg.n)
    stats = zscores_multi(g, sizes, cfg.ensemble, cfg.seed, cfg.swap_factor, cfg.resolved_threads())
    flat = [s for n in sizes for s in stats[n]]
    relative = _closs(cfg, sizes).relative if flat else {}
    summary = []
    for n in sizes:
        join = zscore_vs_closs(stats[n], relative, n)
        verdicts = [s.verdict for s in stats[n]]
        summary.append({"n": n, "classes": len(stats[n]), "rows": len(join.rows),
                        "pearson": join.pearson, "spearman": join.spearman,
                        "motifs": verdicts.count("motif"),
                        "anti_motifs": verdicts.count("anti-motif")})
    conf = cfg.as_dict()
    text = motifs_csv(flat, relative)
    if cfg.format == "json":
        return json_report(conf, {"graph": {"nodes": g.n, "edges": g.m},
                                  "classes": list(csv.DictReader(io.StringIO(text))),
                                  "summary": summary})
    keys = ["n", "classes", "rows", "pearson", "spearman", "motifs", "anti_motifs"]
    block = ["# summary", "# " + ",".join(keys)]
    for s in summary:
        block.append("# " + ",".join(_fmt(s[k]) if k in ("pearson", "spearman") else str(s[k])
                                     for k in keys))
    return csv_header(conf) + text + "\n".join(block) + "\n"


def cmd_condense(cfg: RunConfig) -> str:
    _require_input(cfg)
    g = load_graph(cfg.input)
    sig = SignificanceConfig(cfg.ensemble, cfg.swap_factor, cfg.seed, cfg.resolved_threads(), cfg.n)
    trace = condense_motifs(g, sig)
    relative = _closs(cfg, cfg.n).relative if trace.rounds else {}
    conf = cfg.as_dict()
    if cfg.format == "json":
        return json_report(conf, json.loads(trace_to_json(trace, relative)))
    hist = closs_histogram(trace, relative)
    rows = [[rd.index, rd.graph.n, rd.graph.m, len(rd.condensed)] + [h[b] for b in BIN_NAMES + ("undefined",)]
            for rd, h in zip(trace.rounds, hist)]
    return csv_header(conf) + _table(rows, ["round", "nodes", "edges", "condensed", *BIN_NAMES,
                                            "undefined"])


def _verify_modules(cfg: RunConfig, text: str) -> dict:
    modules, blocks = load_module_system(text)
    system = condensed_matrix(modules, blocks)
    out = {"kind": "module-system", "modules": [m.name for m in modules],
           "alpha": system.alpha, "A_cond": system.A_cond, "margin": system.margin,
           "verdict": "contracting" if system.verdict else "no guarantee"}
    if all(m.siso for m in modules):
        siso = condensed_matrix_siso(modules, blocks)
        out["siso_max_abs_diff"] = float(np.max(np.abs(siso.A_cond - system.A_cond), initial=0.0))
    if system.verdict:
        check = verify_condensation(system, blocks, trials=cfg.trials, seed=cfg.seed,
                                    gain_fraction=cfg.gain)
        out["simulation"] = {"rates": check.rates, "min_rate": check.min_rate,
                             "required": 0.9 * check.margin, "passed": check.passed(),
                             "horizon": check.horizon, "dt": check.dt}
    A = full_interconnection(modules, blocks)
    nodes = [TestNode.with_rate(r, cfg.gain) for m in modules for r in m.node_rates]
    out["node_bound"] = check_bound(nodes, A, cfg.trials, cfg.seed, cfg.measure).as_dict()
    return out


def _verify_graph(cfg: RunConfig, text: str) -> dict:
    g = load_edge_list(text)
    if g.n == 0:
        raise UsageError("the input graph has no nodes")
    nodes = [TestNode.with_rate(cfg.decay, cfg.gain) for _ in range(g.n)]
    report = check_bound(nodes, g.interconnection_matrix(), cfg.trials, cfg.seed, cfg.measure)
    return {"kind": "edge-list", "nodes": g.n, "edges": g.m, "node_rate": cfg.decay,
            "bound": report.as_dict()}


def cmd_verify(cfg: RunConfig) -> str:
    _require_input(cfg)
    text = read_input(cfg.input)
    body = _verify_modules(cfg, text) if text.lstrip().startswith("{") else _verify_graph(cfg, text)
    conf = cfg.as_dict()
    if cfg.format == "json":
        return json_report(conf, {"verify": body})
    flat = []

    def walk(prefix, x):
        if isinstance(x, dict):
            for k in sorted(x):
                walk(f"{prefix}.{k}" if prefix else k, x[k])
        else:
            flat.append([prefix, x if isinstance(x, str) else json.dumps(jsonable(x))])

    walk("", body)
    return csv_header(conf) + _table(flat, ["key", "value"])


COMMANDS = {"census": cmd_census, "closs": cmd_closs, "motifs": cmd_motifs,
            "condense": cmd_condense, "verify": cmd_verify}


def _positive_int(s):
    v = int(s)
    if v < 1:
        raise argparse.ArgumentTypeError(f"expected a positive integer, got {s}")
    return v


def _positive_float(s):
    v = float(s)
    if not v > 0:
        raise argparse.ArgumentTypeError(f"expected a positive number, got {s}")
    return v


def _sizes(s):
    return {"3": (3,), "4": (4,), "both": (3, 4)}[s]


def build_parser() -> argparse.ArgumentParser:
    common = argparse.ArgumentParser(add_help=False)
    common.add_argument("--input", help="edge list or module-system JSON; @planted and @fig3 are bundled")
    common.add_argument("--n", choices=["3", "4", "both"], default=None,
                        help="subgraph size (default: both; 3 for condense)")
    common.add_argument("--measure", choices=["spectral", "one", "two", "infinity"], default="spectral")
    common.add_argument("--samples", type=_positive_int, default=DEFAULT_SAMPLES)
    common.add_argument("--ensemble", type=_positive_int, default=DEFAULT_ENSEMBLE)
    common.add_argument("--amax", type=_positive_float, default=DEFAULT_A_MAX)
    common.add_argument("--seed", type=int, default=0)
    common.add_argument("--swap-factor", type=_positive_int, default=DEFAULT_SWAP_FACTOR)
    common.add_argument("--out", help="output directory (default: stdout)")
    common.add_argument("--threads", type=int, default=None,
                        help="worker threads, 0 = one per CPU (env MOTIF_CLOSS_THREADS)")
    common.add_argument("--format", choices=["csv", "json"], default=None)
    common.add_argument("--trials", type=_positive_int, default=20, help="verify: trajectory pairs")
    common.add_argument("--decay", type=_positive_float, default=1.5,
                        help="verify: node contraction rate for edge-list inputs")
    common.add_argument("--gain", type=float, default=0.25,
                        help="verify: nonlinear gain as a fraction of the node rate")
    common.add_argument("-v", "--verbose", action="store_true")

    p = argparse.ArgumentParser(prog="motifcloss", description=__doc__)
    p.add_argument("--version", action="version", version=f"motifcloss {__version__}")
    sub = p.add_subparsers(dest="command", required=True)
    helps = {"census": "count connected induced subgraph classes",
             "closs": "mean contraction loss of every subgraph class",
             "motifs": "motif significance joined with relative contraction loss",
             "condense": "recursively condense motif occurrences into supernodes",
             "verify": "simulate a network and check the contraction bound"}
    for name in COMMANDS:
        sub.add_parser(name, parents=[common], help=helps[name])
    return p


def config_from_args(args) -> RunConfig:
    if args.threads is not None and args.threads < 0:
        raise UsageError("--threads must be >= 0")
    if not 0 <= args.gain < 1:
        raise UsageError("--gain must be in [0, 1)")
    n = args.n or ("3" if args.command == "condense" else "both")
    return RunConfig(command=args.command, input=args.input, n=_sizes(n), measure=args.measure,
                     samples=args.samples, ensemble=args.ensemble, a_max=args.amax, seed=args.seed,
                     swap_factor=args.swap_factor, out=args.out, threads=args.threads,
                     format=args.format or DEFAULT_FORMAT[args.command], trials=args.trials,
                     decay=args.decay, gain=args.gain)


def run(cfg: RunConfig) -> str:
    return COMMANDS[cfg.command](cfg)


def main(argv=None) -> int:
    parser = build_parser()
    try:
        args = parser.parse_args(argv)
    except SystemExit as e:
        return int(e.code or 0)
    logging.basicConfig(level=logging.INFO if args.verbose else logging.WARNING,
                        format="%(levelname)s: %(message)s")
    try:
        cfg = config_from_args(args)
        text = run(cfg)
        if cfg.out:
            os.makedirs(cfg.out, exist_ok=True)
            path = os.path.join(cfg.out, f"{cfg.command}.{cfg.format}")
            with open(path, "w", encoding="utf-8", newline="") as fh:
                fh.write(text)
        else:
            sys.stdout.write(text)
    except (UsageError, EdgeListError, FileNotFoundError, IsADirectoryError, PermissionError,
            ValueError) as e:
        print(f"motifcloss: error: {e}", file=sys.stderr)
        return 2
    except Exception as e:  # noqa: BLE001
        log.exception("internal error")
        print(f"motifcloss: internal error: {e}", file=sys.stderr)
        return 1
    return 0


if __name__ == "__main__":
    sys.exit(main())
