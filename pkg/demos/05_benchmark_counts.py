"""Reproducing published benchmark counts.

Three DIMACS clique benchmarks have fully documented constructions, so an
isomorphic copy can be generated locally and the known k-plex counts
reproduced exactly.  Pass --heavy to include the multi-minute rows.
"""

import argparse
import sys
import time
from pathlib import Path

from kplex import CountSink, enumerate_kplexes, load_dimacs

sys.path.insert(0, str(Path(__file__).resolve().parent.parent / "tests"))
from dimacs_instances import generated_instance_path  # noqa: E402

from kplex import _kernel  # noqa: E402

ROWS = [
    # (instance, k, q, published count, heavy?)
    ("c-fat200-5", 2, 10, 5721, False),
    ("c-fat200-5", 2, 20, 5721, False),
    ("c-fat200-5", 3, 10, 1086435, False),
    ("MANN_a9", 2, 10, 2160546, False),
    ("MANN_a9", 2, 20, 1738656, False),
    ("MANN_a9", 3, 10, 16619686, True),
    ("johnson8-4-4", 2, 10, 16047210, True),
    ("johnson8-4-4", 2, 20, 0, False),
]

parser = argparse.ArgumentParser()
parser.add_argument("--heavy", action="store_true", help="run the slow rows too")
args = parser.parse_args()

_kernel.warmup()
graphs = {}
for name, k, q, want, heavy in ROWS:
    if heavy and not args.heavy:
        continue
    if name not in graphs:
        with open(generated_instance_path(name)) as fh:
            graphs[name] = load_dimacs(fh)
    g = graphs[name]
    sink = CountSink()
    t0 = time.perf_counter()
    enumerate_kplexes(g, k, q, sink)
    dt = time.perf_counter() - t0
    flag = "ok" if sink.count == want else "MISMATCH"
    print(f"{name:13s} k={k} q={q:3d}: {sink.count:>10d} "
          f"(published {want:>10d}) {flag} [{dt:.2f}s]")
