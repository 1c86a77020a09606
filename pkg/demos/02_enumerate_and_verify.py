"""Enumerating maximal k-plexes and checking the answer two ways.

A k-plex with k=1 is a clique; raising k tolerates k-1 missing neighbors
per member.  On a graph small enough for exhaustive search we can compare
the enumerator against the oracle, and run the verifier on its output.
"""

import random

from kplex import (
    CollectSink,
    brute_force_maximal_kplexes,
    enumerate_kplexes,
    load_edge_list,
    verify_solution,
)

rng = random.Random(2)
n = 14
lines = [f"{v} {v}" for v in range(n)]
lines += [f"{u} {v}" for u in range(n) for v in range(u + 1, n) if rng.random() < 0.45]
g = load_edge_list(lines)
print(f"random graph: n={g.n}, m={g.m}")

for k in (1, 2, 3):
    q = max(2 * k - 1, 3)
    sink = CollectSink()
    stats = enumerate_kplexes(g, k, q, sink)
    truth = brute_force_maximal_kplexes(g, k, q)
    agree = sink.family() == set(truth)
    print(f"k={k} q={q}: {sink.count} maximal k-plexes "
          f"({stats.nodes} branch nodes), oracle agrees: {agree}")

# show a few of the k=2 results and verify them structurally
k, q = 2, 3
sink = CollectSink()
enumerate_kplexes(g, k, q, sink)
report = verify_solution(g, k, q, sink.plexes)
print(f"verifier report: {report.summary()}")
for plex in sorted(sink.plexes)[:5]:
    print("  plex:", plex)
