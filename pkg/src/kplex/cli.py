"""Command-line front end: load a graph, enumerate, print counts or plexes.

Exit codes: 0 success, 1 I/O or parse failure, 2 usage error.
"""

from __future__ import annotations

import argparse
import json
import sys

from .enumerator import CountSink, StreamSink, enumerate_kplexes
from .graph import GraphParseError, load_dimacs, load_edge_list
from .parallel import enumerate_parallel

__all__ = ["main", "build_parser"]


def build_parser() -> argparse.ArgumentParser:
    p = argparse.ArgumentParser(
        prog="kplex",
        description="Enumerate all maximal k-plexes of size >= q in an undirected graph.")
    p.add_argument("--input", required=True, help="path to the graph file")
    p.add_argument("--format", choices=["auto", "edgelist", "dimacs"], default="auto",
                   help="input format; auto picks dimacs for .clq/.dimacs extensions")
    p.add_argument("-k", type=int, required=True, help="plex slack (k >= 1)")
    p.add_argument("-q", type=int, required=True, help="minimum plex size (q >= 2k-1)")
    p.add_argument("--threads", type=int, default=1, help="worker count (default 1)")
    p.add_argument("--mode", choices=["count", "list"], default="count",
                   help="print the count, or one plex per line as ascending original IDs")
    p.add_argument("--output", default=None, help="write results here instead of stdout")
    p.add_argument("--stats", action="store_true",
                   help="print a one-line JSON stats record to stderr")
    p.add_argument("--no-core", action="store_true", help="disable (q-k)-core reduction")
    p.add_argument("--no-lemma3", action="store_true",
                   help="disable common-neighbor seed pruning")
    p.add_argument("--no-bounds", action="store_true", help="disable upper-bound pruning")
    p.add_argument("--engine", choices=["auto", "python", "numba"], default="auto",
                   help="search engine (default auto)")
    return p


def _detect_format(path: str, fmt: str) -> str:
    if fmt != "auto":
        return fmt
    lower = path.lower()
    if lower.endswith(".clq") or lower.endswith(".dimacs"):
        return "dimacs"
    return "edgelist"


def main(argv: list[str] | None = None) -> int:
    parser = build_parser()
    args = parser.parse_args(argv)

    if args.k < 1:
        parser.error(f"-k must be >= 1, got {args.k}")
    if args.q < 2 * args.k - 1:
        parser.error(f"-q must be >= 2k-1 = {2 * args.k - 1}, got {args.q}")
    if args.threads < 1:
        parser.error(f"--threads must be >= 1, got {args.threads}")

    try:
        with open(args.input, "r", encoding="utf-8") as fh:
            if _detect_format(args.input, args.format) == "dimacs":
                g = load_dimacs(fh)
            else:
                g = load_edge_list(fh)
    except OSError as e:
        print(f"kplex: cannot read {args.input}: {e.strerror}", file=sys.stderr)
        return 1
    except GraphParseError as e:
        print(f"kplex: {args.input}: {e}", file=sys.stderr)
        return 1

    out = sys.stdout
    close_out = False
    try:
        if args.output is not None:
            try:
                out = open(args.output, "w", encoding="utf-8")
            except OSError as e:
                print(f"kplex: cannot write {args.output}: {e.strerror}", file=sys.stderr)
                return 1
            close_out = True

        if args.mode == "list":
            sink = StreamSink(out, g.original_ids)
        else:
            sink = CountSink()

        common = dict(
            use_core_reduction=not args.no_core,
            use_lemma3=not args.no_lemma3,
            use_bounds=not args.no_bounds,
            engine=args.engine,
        )
        if args.threads == 1:
            stats = enumerate_kplexes(g, args.k, args.q, sink, **common)
        else:
            stats = enumerate_parallel(g, args.k, args.q, args.threads, sink, **common)

        if args.mode == "count":
            out.write(f"{sink.count}\n")
        if args.stats:
            print(json.dumps(stats.as_dict()), file=sys.stderr)
    finally:
        if close_out:
            out.close()
    return 0


if __name__ == "__main__":
    sys.exit(main())
