"""Acceptance criteria for the whole artifact.

Run with ``pytest tests/test_acceptance.py -v -s`` to see one pass/fail
line per criterion.  The randomized grid, the bound-soundness sweep, the
pruning ablations, and the worker-count sweeps replace the table rows that
are out of desk scale (billion-plex instances and 20-thread machines).

Two benchmark graphs cannot be reconstructed locally (p_hat300-1 is
seeded-generator output; wiki-Vote is a dataset snapshot): those checks
run when the file is supplied via tests/data/ or KPLEX_DIMACS_DIR and
skip otherwise with the assertions intact.
"""

import os
import random
import time

import numpy as np
import pytest

from kplex import (
    CollectSink,
    CountSink,
    basic_bound,
    brute_force_maximal_kplexes,
    enumerate_kplexes,
    enumerate_parallel,
    hybrid_bound,
    load_dimacs,
    load_edge_list,
    reduce_to_core,
    support_bound,
)
from kplex import _kernel
from kplex.cli import main as cli_main
from kplex.oracle import _families_from_table, _max_nonneighbor_table

from dimacs_instances import external_instance_path, generated_instance_path

GRID_NS = range(8, 19)
GRID_PS = (0.2, 0.4, 0.6, 0.8)
KQ_COMBOS = [(k, q) for k in (1, 2, 3) for q in range(2 * k - 1, 8)]

# (instance, k, q, expected count, reported seconds on the reference machine)
DIMACS_ENTRIES = [
    ("c-fat200-5", 2, 10, 5721, 0.13),
    ("c-fat200-5", 2, 20, 5721, 0.09),
    ("c-fat200-5", 3, 10, 1086435, 5.28),
    ("MANN_a9", 2, 10, 2160546, 2.51),
    ("MANN_a9", 2, 20, 1738656, 2.05),
    ("MANN_a9", 3, 10, 16619686, 44.05),
    ("MANN_a9", 3, 20, 16619686, 42.8),
    ("johnson8-4-4", 2, 10, 16047210, 30.39),
    ("johnson8-4-4", 2, 20, 0, 0.17),
    ("p_hat300-1", 2, 10, 24, 0.73),
    ("p_hat300-1", 2, 20, 0, 0.0),
    ("p_hat300-1", 3, 10, 382654, 52.27),
    ("p_hat300-1", 3, 20, 0, 0.22),
]
DIMACS_SIZES = {"c-fat200-5": (200, 16946), "MANN_a9": (45, 1836),
                "johnson8-4-4": (70, 3710), "p_hat300-1": (300, 21866)}
RECONSTRUCTIBLE = {"c-fat200-5", "MANN_a9", "johnson8-4-4"}


def time_budget(paper_seconds: float) -> float:
    # 10x the reported time, with a floor so sub-100ms rows stay testable
    return max(10.0 * paper_seconds, 5.0)


@pytest.fixture(scope="session", autouse=True)
def warm_kernel():
    _kernel.warmup()


@pytest.fixture(scope="session")
def grid_graphs():
    graphs = []
    for n in GRID_NS:
        for p in GRID_PS:
            rng = random.Random(10_000 * n + int(100 * p))
            lines = [f"{v} {v}" for v in range(n)]
            lines += [f"{u} {v}" for u in range(n) for v in range(u + 1, n)
                      if rng.random() < p]
            graphs.append(((n, p), load_edge_list(lines)))
    return graphs


@pytest.fixture(scope="session")
def grid_tables(grid_graphs):
    return {key: _max_nonneighbor_table(g) for key, g in grid_graphs}


@pytest.fixture(scope="session")
def grid_truth(grid_graphs, grid_tables):
    """Oracle families for every (graph, k, q); the per-graph table is the
    oracle's own machinery, spot-checked against the public entry point."""
    truth = {}
    for key, g in grid_graphs:
        table = grid_tables[key]
        for k, q in KQ_COMBOS:
            truth[(key, k, q)] = set(_families_from_table(table, g.n, k, q))
    rng = random.Random(0)
    for key, g in rng.sample(grid_graphs, 4):
        k, q = rng.choice(KQ_COMBOS)
        assert truth[(key, k, q)] == set(brute_force_maximal_kplexes(g, k, q))
    return truth


@pytest.fixture(scope="session")
def grid_engine_runs(grid_graphs, grid_truth):
    """Both engines over the full grid; cached for the later criteria."""
    t0 = time.perf_counter()
    runs = {}
    for key, g in grid_graphs:
        for k, q in KQ_COMBOS:
            py = CollectSink(check_duplicates=True)
            st_py = enumerate_kplexes(g, k, q, py, engine="python")
            nb = CollectSink(check_duplicates=True)
            st_nb = enumerate_kplexes(g, k, q, nb, engine="numba")
            runs[(key, k, q)] = {
                "python": py.family(), "numba": nb.family(),
                "nodes": (st_py.nodes, st_nb.nodes),
                "count": st_py.count,
            }
    runs["elapsed"] = time.perf_counter() - t0
    return runs


def dimacs_graph(name):
    if name in RECONSTRUCTIBLE:
        path = generated_instance_path(name)
    else:
        path = external_instance_path(name)
        if path is None:
            pytest.skip(
                f"{name} comes from a seeded generator and cannot be "
                f"reconstructed; place {name}.clq in tests/data/ or "
                f"KPLEX_DIMACS_DIR to run this entry (no network here)")
    with open(path) as fh:
        g = load_dimacs(fh)
    n, two_m = DIMACS_SIZES[name]
    assert (g.n, 2 * g.m) == (n, two_m), \
        f"{name}: file has (n={g.n}, 2m={2 * g.m}), published {(n, two_m)}"
    return g


# ---------------------------------------------------------------------------
# criterion 1: oracle equivalence on the randomized grid

def test_criterion_1_oracle_equivalence(grid_graphs, grid_truth, grid_engine_runs):
    cases = 0
    for key, g in grid_graphs:
        for k, q in KQ_COMBOS:
            want = grid_truth[(key, k, q)]
            run = grid_engine_runs[(key, k, q)]
            assert run["python"] == want, (key, k, q, "python engine")
            assert run["numba"] == want, (key, k, q, "numba engine")
            assert run["nodes"][0] == run["nodes"][1], (key, k, q, "trees diverged")
            cases += 1
    assert cases >= 300
    elapsed = grid_engine_runs["elapsed"]
    assert elapsed < 180, f"criterion 1 budget exceeded: {elapsed:.1f}s"
    print(f"\nACCEPTANCE 1: PASS - {cases} random (n,p,k,q) cases match the "
          f"oracle exactly on both engines in {elapsed:.1f}s")


# ---------------------------------------------------------------------------
# criterion 2: DIMACS count regression

@pytest.mark.parametrize("name,k,q,want,paper_s", DIMACS_ENTRIES,
                         ids=[f"{n}-k{k}-q{q}" for n, k, q, _, _ in DIMACS_ENTRIES])
def test_criterion_2_dimacs_counts(name, k, q, want, paper_s):
    g = dimacs_graph(name)
    sink = CountSink()
    t0 = time.perf_counter()
    enumerate_kplexes(g, k, q, sink, engine="numba")
    elapsed = time.perf_counter() - t0
    assert sink.count == want, f"{name} k={k} q={q}: {sink.count} != {want}"
    budget = time_budget(paper_s)
    assert elapsed <= budget, f"{name} k={k} q={q}: {elapsed:.1f}s > {budget:.1f}s"
    print(f"\nACCEPTANCE 2 [{name} k={k} q={q}]: PASS - count {sink.count} "
          f"in {elapsed:.2f}s (budget {budget:.1f}s)")


def test_criterion_2_cli_paper_example(tmp_path, capsys):
    path = generated_instance_path("c-fat200-5")
    code = cli_main(["--input", str(path), "--format", "dimacs",
                     "-k", "2", "-q", "10", "--mode", "count"])
    out = capsys.readouterr().out
    assert code == 0 and out == "5721\n"
    print("\nACCEPTANCE 2 [cli]: PASS - c-fat200-5 CLI count prints 5721")


# ---------------------------------------------------------------------------
# criterion 3: optional large-graph regression (advisory)

def test_criterion_3_wiki_vote_advisory():
    path = None
    for cand in ("wiki-Vote.txt", "Wiki-Vote.txt"):
        from dimacs_instances import DATA_DIR
        if (DATA_DIR / cand).exists():
            path = DATA_DIR / cand
    env = os.environ.get("KPLEX_DIMACS_DIR")
    if path is None and env:
        for cand in ("wiki-Vote.txt", "Wiki-Vote.txt"):
            if os.path.exists(os.path.join(env, cand)):
                path = os.path.join(env, cand)
    if path is None:
        pytest.skip("wiki-Vote snapshot not available locally (advisory "
                    "criterion; supply the SNAP edge list to run it)")
    with open(path) as fh:
        g = load_edge_list(fh)
    for q, want in [(12, 2919931), (20, 52)]:
        sink = CountSink()
        enumerate_kplexes(g, 2, q, sink, engine="numba")
        if sink.count != want:
            pytest.xfail(f"wiki-Vote (k=2,q={q}) -> {sink.count} != {want}: "
                         f"dataset snapshot likely differs; investigate")
    print("\nACCEPTANCE 3: PASS - wiki-Vote counts match the reported values")


# ---------------------------------------------------------------------------
# criterion 4: bound chain and soundness on reachable states

def _exhaustive_max_from_table(table, members_g, base_g, k):
    """Largest k-plex wedged between base and members, looked up in the
    whole-graph subset table."""
    others = [v for v in members_g if v not in base_g]
    base_mask = np.uint64(sum(1 << v for v in base_g))
    b = len(others)
    subs = np.arange(1 << b, dtype=np.uint64)
    full = np.zeros(1 << b, dtype=np.uint64)
    for j, v in enumerate(others):
        full |= ((subs >> np.uint64(j)) & np.uint64(1)) << np.uint64(v)
    full |= base_mask
    ok = table[full.astype(np.int64)] <= k - 1
    assert ok.any(), "the base set itself must be a k-plex"
    return int(np.bitwise_count(full[ok]).max())


def test_criterion_4_bound_chain_and_soundness(grid_graphs, grid_tables):
    checked = 0
    t0 = time.perf_counter()
    for key, g in grid_graphs:
        table = grid_tables[key]
        for k, q in KQ_COMBOS:
            _, old2new = reduce_to_core(g, k, q)
            new2old = np.flatnonzero(old2new >= 0)
            failures = []

            def observer(ctx, v, _t=table, _m=new2old, _k=k, _f=failures):
                nonlocal checked
                if ctx.size_sc() > 14:
                    return
                h = hybrid_bound(ctx, v)
                s = support_bound(ctx, v)
                b = basic_bound(ctx, v)
                members = [int(_m[w]) for w in ctx.sc_vertices()]
                base = {int(_m[w]) for w in list(ctx.S) + [v]}
                true_max = _exhaustive_max_from_table(_t, members, base, _k)
                if not (h <= s <= b and h >= true_max):
                    _f.append((sorted(ctx.S), sorted(ctx.C), v, h, s, b, true_max))
                checked += 1

            enumerate_kplexes(g, k, q, observer=observer)
            assert not failures, (key, k, q, failures[:3])
    assert checked > 0
    print(f"\nACCEPTANCE 4: PASS - hybrid<=support<=basic and hybrid>=true "
          f"max on {checked} branch states ({time.perf_counter() - t0:.1f}s)")


# ---------------------------------------------------------------------------
# criterion 5: pruning safety

def test_criterion_5_pruning_toggles(grid_graphs, grid_truth):
    toggles = [{"use_core_reduction": False}, {"use_lemma3": False},
               {"use_bounds": False}]
    cases = 0
    for key, g in grid_graphs:
        for k, q in KQ_COMBOS:
            want = grid_truth[(key, k, q)]
            for kwargs in toggles:
                sink = CollectSink()
                enumerate_kplexes(g, k, q, sink, engine="numba", **kwargs)
                assert sink.family() == want, (key, k, q, kwargs)
                cases += 1
    print(f"\nACCEPTANCE 5: PASS - families unchanged across {cases} "
          f"single-disabled-pruning reruns")


# ---------------------------------------------------------------------------
# criterion 6: parallel determinism and speedup

def test_criterion_6_grid_worker_counts(grid_graphs, grid_engine_runs):
    rng = random.Random(606)
    cases = 0
    for key, g in grid_graphs:
        for k, q in KQ_COMBOS:
            want = grid_engine_runs[(key, k, q)]["count"]
            for workers in (2, 4, 8):
                stats = enumerate_parallel(g, k, q, workers, CountSink(),
                                           engine="numba")
                assert stats.count == want, (key, k, q, workers)
                cases += 1
    print(f"\nACCEPTANCE 6a: PASS - grid counts identical for workers "
          f"2/4/8 across {cases} runs (plus 1-worker baseline)")


@pytest.mark.parametrize("name,k,q,want,paper_s",
                         [e for e in DIMACS_ENTRIES
                          if not (e[0] == "johnson8-4-4" and e[2] == 10)],
                         ids=[f"{n}-k{k}-q{q}" for n, k, q, _, _ in DIMACS_ENTRIES
                              if not (n == "johnson8-4-4" and q == 10)])
def test_criterion_6_dimacs_worker_counts(name, k, q, want, paper_s):
    g = dimacs_graph(name)
    for workers in (2, 4, 8):
        stats = enumerate_parallel(g, k, q, workers, CountSink(), engine="numba")
        assert stats.count == want, (name, k, q, workers)
    print(f"\nACCEPTANCE 6b [{name} k={k} q={q}]: PASS - counts identical "
          f"for workers 2/4/8")


@pytest.fixture(scope="module")
def johnson_parallel_runs():
    g = dimacs_graph("johnson8-4-4")
    result = {}
    for workers in (1, 2, 4, 8):
        t0 = time.perf_counter()
        stats = enumerate_parallel(g, 2, 10, workers, CountSink(), engine="numba")
        result[workers] = (stats.count, time.perf_counter() - t0)
    return result


def test_criterion_6_johnson_worker_counts(johnson_parallel_runs):
    for workers, (count, _t) in johnson_parallel_runs.items():
        assert count == 16047210, (workers, count)
    print("\nACCEPTANCE 6b [johnson8-4-4 k=2 q=10]: PASS - counts identical "
          "for workers 1/2/4/8")


def test_criterion_6_johnson_speedup(johnson_parallel_runs):
    times = {w: t for w, (_c, t) in johnson_parallel_runs.items()}
    ratio = times[4] / times[1]
    print(f"\nACCEPTANCE 6c: johnson8-4-4 wall 1w={times[1]:.1f}s "
          f"2w={times[2]:.1f}s 4w={times[4]:.1f}s 8w={times[8]:.1f}s "
          f"(4w/1w = {ratio:.2f})")
    cpus = os.cpu_count() or 1
    if cpus < 4:
        pytest.skip(
            f"speedup clause needs >= 4 CPU cores; this host exposes {cpus}, "
            f"capping the best possible 4-worker ratio near {1 / cpus:.2f}; "
            f"measured {ratio:.2f} (count determinism is asserted separately)")
    assert ratio <= 0.5, f"4-worker wall {times[4]:.1f}s vs 1-worker {times[1]:.1f}s"
    print("ACCEPTANCE 6c: PASS - 4-worker wall time <= 0.5x single worker")


# ---------------------------------------------------------------------------
# criterion 7: k=1 reduces to maximal clique enumeration

def test_criterion_7_k1_clique_reduction(grid_graphs, grid_truth, grid_engine_runs):
    cases = 0
    for key, g in grid_graphs:
        for q in range(1, 8):
            want = grid_truth[(key, 1, q)]  # oracle cliques of size >= q
            run = grid_engine_runs[(key, 1, q)]
            assert run["python"] == want and run["numba"] == want, (key, q)
            cases += 1
    print(f"\nACCEPTANCE 7: PASS - k=1 output equals the oracle's maximal "
          f"cliques on {cases} cases")
