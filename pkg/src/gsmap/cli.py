"""Command-line interface: ``gsmap embed | curve | metrics | plot``.

Exit codes: 0 success, 2 input error, 3 configuration error, 4 numeric failure.
"""
from __future__ import annotations

import argparse
import logging
import os
import sys
import time

import numpy as np

from . import dataio, lowdim, metrics, svg
from .errors import ConfigError, GsmapError, InputError
from .knn import build_knn_graph
from .pipeline import embed

log = logging.getLogger("gsmap")

DEFAULT_CURVE_B = "0.5,1,2,5,10"


class _Parser(argparse.ArgumentParser):
    def error(self, message):
        self.print_usage(sys.stderr)
        self.exit(ConfigError.exit_code, f"{self.prog}: error: {message}\n")


def _float_list(text):
    try:
        return [float(x) for x in text.split(",") if x.strip()]
    except ValueError:
        raise argparse.ArgumentTypeError(f"not a comma-separated list of numbers: {text!r}") from None


def _add_source_args(p, required):
    src = p.add_mutually_exclusive_group(required=required)
    src.add_argument("--input", metavar="PATH", help="CSV input file")
    src.add_argument("--idx", metavar="IMAGES[,LABELS]", help="IDX image file and optional label file")
    src.add_argument("--generate", metavar="sim[:n_clusters,ppc,dim,seed]",
                     help="simulated Gaussian clusters")
    p.add_argument("--header", action="store_true", help="CSV input has a header line")
    p.add_argument("--label-column", type=int, help="CSV column holding integer labels")
    p.add_argument("--condition-column", type=int,
                   help="CSV column holding operating-condition ids; features are centered per condition")


def load_source(args, seed=0) -> dataio.DatasetBundle:
    if args.input:
        if not os.path.exists(args.input):
            raise InputError(f"input file not found: {args.input}")
        bundle = dataio.load_csv(args.input, has_header=args.header, label_column=args.label_column)
        if args.condition_column is not None:
            values = bundle.data.values
            width = values.shape[1] + (1 if args.label_column is not None else 0)
            col = args.condition_column % width
            if args.label_column is not None and col > args.label_column % width:
                col -= 1
            elif args.label_column is not None and col == args.label_column % width:
                raise ConfigError("condition column and label column are the same")
            cond = values[:, col].astype(np.int64)
            data = dataio.DataMatrix(np.delete(values, col, axis=1), bundle.data.labels)
            bundle = dataio.DatasetBundle(dataio.center_by_condition(data, cond), bundle.name,
                                          condition_ids=cond)
        return bundle
    if args.idx:
        parts = args.idx.split(",")
        if len(parts) > 2:
            raise ConfigError("--idx takes IMAGES or IMAGES,LABELS")
        for part in parts:
            if not os.path.exists(part):
                raise InputError(f"input file not found: {part}")
        return dataio.load_idx(parts[0], parts[1] if len(parts) == 2 else None)
    if args.generate:
        kind, _, extra = args.generate.partition(":")
        if kind != "sim":
            raise ConfigError(f"unknown generator {kind!r}; only 'sim' is available")
        params = [10, 100, 20, seed]
        if extra:
            try:
                given = [int(x) for x in extra.split(",")]
            except ValueError:
                raise ConfigError(f"bad generator parameters {extra!r}") from None
            if len(given) > 4:
                raise ConfigError("generator takes at most 4 parameters")
            params[:len(given)] = given
        n_clusters, ppc, dim, gen_seed = params
        return dataio.generate_gaussian_clusters(n_clusters, ppc, dim, 5.0, 2.3, gen_seed)
    raise ConfigError("no input given")


def _threads(value):
    if value is not None:
        return value
    env = os.environ.get("GSM_THREADS")
    if env:
        try:
            return int(env)
        except ValueError:
            raise ConfigError(f"GSM_THREADS must be an integer, got {env!r}") from None
    return 1


def cmd_embed(args) -> int:
    threads = _threads(args.threads)
    checks = [
        (args.b > 0, f"--b must be > 0, got {args.b}"),
        (args.a > 0, f"--a must be > 0, got {args.a}"),
        (args.k >= 2, f"--k must be >= 2, got {args.k}"),
        (args.dim >= 1, f"--dim must be >= 1, got {args.dim}"),
        (args.epochs >= 1, f"--epochs must be >= 1, got {args.epochs}"),
        (args.neg >= 1, f"--neg must be >= 1, got {args.neg}"),
        (args.lr > 0, f"--lr must be > 0, got {args.lr}"),
        (threads >= 1, f"--threads must be >= 1, got {threads}"),
    ]
    for ok, message in checks:
        if not ok:
            raise ConfigError(message)

    t0 = time.perf_counter()
    bundle = load_source(args, args.seed)
    load_time = time.perf_counter() - t0
    n = bundle.data.n_rows
    if args.k > n - 1:
        raise ConfigError(f"--k={args.k} needs at least {args.k + 1} points, got {n}")
    if args.init == "spectral" and n < args.dim + 1:
        raise ConfigError(f"spectral init needs more than dim={args.dim} points")

    def progress(epoch, n_sampled, loss):
        if epoch % max(1, args.epochs // 10) == 0 or epoch == args.epochs:
            print(f"epoch {epoch}/{args.epochs}: {n_sampled} edges", file=sys.stderr)

    result = embed(bundle.data, b=args.b, k=args.k, a=args.a, dim=args.dim, n_epochs=args.epochs,
                   neg_samples=args.neg, lr=args.lr, init=args.init, seed=args.seed, threads=threads,
                   callback=progress if args.progress else None)
    dataio.write_embedding_csv(result.embedding, args.out, bundle.data.labels, header=True)
    if args.graph_out:
        result.graph.to_csv(args.graph_out)
    print(f"load: {load_time:.3f} s", file=sys.stderr)
    for stage, seconds in result.timings.items():
        print(f"{stage}: {seconds:.3f} s", file=sys.stderr)
    print(f"wrote {n} points to {args.out}", file=sys.stderr)
    return 0


def cmd_curve(args) -> int:
    if not args.b:
        raise ConfigError("--b needs at least one value")
    for b in args.b:
        if not b > 0:
            raise ConfigError(f"every b must be > 0, got {b}")
    if not args.a > 0:
        raise ConfigError(f"--a must be > 0, got {args.a}")
    dist, table = lowdim.curve_table(args.b, a=args.a)
    names = [f"Q_b{b:g}" for b in args.b]
    lines = [",".join(["dist"] + names)]
    for d, row in zip(dist.tolist(), table.tolist()):
        lines.append(",".join([repr(d)] + [repr(v) for v in row]))
    try:
        with open(args.out, "w", encoding="utf-8", newline="\n") as fh:
            fh.write("\n".join(lines) + "\n")
        svg_path = args.svg or os.path.splitext(args.out)[0] + ".svg"
        with open(svg_path, "w", encoding="utf-8") as fh:
            fh.write(svg.curves_svg(dist, table, [f"b={b:g}" for b in args.b]))
    except OSError as exc:
        raise InputError(f"cannot write output: {exc}") from exc
    return 0


def read_embedding(path, label_column=None):
    """Coordinates and labels from an embedding CSV (label column found by header name)."""
    if not os.path.exists(path):
        raise InputError(f"embedding file not found: {path}")
    header = dataio.read_csv_header(path)
    if label_column is None and header is not None and "label" in header:
        label_column = header.index("label")
    bundle = dataio.load_csv(path, has_header=header is not None, label_column=label_column)
    return bundle.data.values, bundle.data.labels


def _read_labels(path):
    if not os.path.exists(path):
        raise InputError(f"label file not found: {path}")
    header = dataio.read_csv_header(path)
    values = dataio.load_csv(path, has_header=header is not None).data.values
    if values.shape[1] != 1:
        raise InputError(f"label file must have one column, got {values.shape[1]}")
    return values[:, 0].astype(np.int64)


def cmd_metrics(args) -> int:
    coords, labels = read_embedding(args.embedding, args.label_column)
    if args.labels:
        labels = _read_labels(args.labels)
    if labels is None:
        raise InputError("no labels: give --labels or an embedding with a label column")
    if len(labels) != coords.shape[0]:
        raise InputError(f"{len(labels)} labels for {coords.shape[0]} points")
    n_clusters = args.clusters or len(np.unique(labels))
    assign = metrics.kmeans(coords, n_clusters, seed=args.seed, restarts=args.restarts)
    report = {
        "n_points": coords.shape[0],
        "n_clusters": n_clusters,
        "cluster_error": metrics.cluster_error(assign, labels),
        "inertia": assign.inertia,
    }
    if args.input or args.idx or args.generate:
        bundle = load_source(args, args.seed)
        if bundle.data.n_rows != coords.shape[0]:
            raise InputError(f"data has {bundle.data.n_rows} rows, embedding {coords.shape[0]}")
        high = build_knn_graph(bundle.data, args.k)
        report["knn_preservation"] = metrics.knn_preservation(high, coords, args.k)
    sys.stdout.write(metrics.format_report(report))
    return 0


def cmd_plot(args) -> int:
    coords, labels = read_embedding(args.embedding, args.label_column)
    text = svg.scatter_svg(coords, labels, point_size=args.point_size, color_by_label=not args.no_color)
    try:
        with open(args.out, "w", encoding="utf-8") as fh:
            fh.write(text)
    except OSError as exc:
        raise InputError(f"cannot write {args.out}: {exc}") from exc
    return 0


def build_parser() -> argparse.ArgumentParser:
    parser = _Parser(prog="gsmap", description=__doc__.splitlines()[0])
    parser.add_argument("-v", "--verbose", action="store_true")
    sub = parser.add_subparsers(dest="command", required=True, parser_class=_Parser)

    p = sub.add_parser("embed", help="embed a dataset and write the coordinates as CSV")
    _add_source_args(p, required=True)
    p.add_argument("--k", type=int, default=10)
    p.add_argument("--a", type=float, default=1.0)
    p.add_argument("--b", type=float, required=True, help="tail parameter (no default)")
    p.add_argument("--dim", type=int, default=2)
    p.add_argument("--epochs", type=int, default=500)
    p.add_argument("--neg", type=int, default=5, help="negative samples per edge")
    p.add_argument("--lr", type=float, default=1.0)
    p.add_argument("--init", choices=["spectral", "random"], default="spectral")
    p.add_argument("--seed", type=int, default=0)
    p.add_argument("--threads", type=int, help="worker threads (default: $GSM_THREADS or 1)")
    p.add_argument("--out", default="embedding.csv")
    p.add_argument("--graph-out", help="also write the fuzzy graph as i,j,weight CSV")
    p.add_argument("--progress", action="store_true", help="report SGD progress on stderr")
    p.set_defaults(func=cmd_embed)

    p = sub.add_parser("curve", help="tabulate and plot the kernel for several b values")
    p.add_argument("--b", type=_float_list, default=_float_list(DEFAULT_CURVE_B),
                   help=f"comma-separated b values (default {DEFAULT_CURVE_B})")
    p.add_argument("--a", type=float, default=1.0)
    p.add_argument("--out", default="curve.csv")
    p.add_argument("--svg", help="SVG path (default: --out with .svg suffix)")
    p.set_defaults(func=cmd_curve)

    p = sub.add_parser("metrics", help="k-means error and kNN preservation of an embedding")
    p.add_argument("embedding")
    p.add_argument("--labels", help="file with one integer label per line")
    p.add_argument("--clusters", type=int, help="number of k-means clusters (default: distinct labels)")
    p.add_argument("--restarts", type=int, default=10)
    p.add_argument("--seed", type=int, default=0)
    p.add_argument("--k", type=int, default=10, help="neighbors for kNN preservation")
    _add_source_args(p, required=False)
    p.set_defaults(func=cmd_metrics)

    p = sub.add_parser("plot", help="render a 2-D embedding as an SVG scatter plot")
    p.add_argument("embedding")
    p.add_argument("--out", default="embedding.svg")
    p.add_argument("--point-size", type=float, default=2.0)
    p.add_argument("--no-color", action="store_true", help="do not color points by label")
    p.add_argument("--label-column", type=int)
    p.set_defaults(func=cmd_plot)
    return parser


def main(argv=None) -> int:
    parser = build_parser()
    args = parser.parse_args(argv)
    logging.basicConfig(level=logging.INFO if args.verbose else logging.WARNING,
                        format="%(levelname)s %(name)s: %(message)s")
    try:
        return args.func(args)
    except GsmapError as exc:
        print(f"gsmap: error: {exc}", file=sys.stderr)
        return exc.exit_code
    except OSError as exc:
        print(f"gsmap: error: {exc}", file=sys.stderr)
        return InputError.exit_code


if __name__ == "__main__":
    sys.exit(main())
