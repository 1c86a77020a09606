"""The compiled engine against the reference engine: same trees, same results."""

import random

import numpy as np
import pytest

from kplex import (
    CollectSink,
    CountSink,
    brute_force_maximal_kplexes,
    enumerate_kplexes,
    load_edge_list,
)
from kplex import _kernel
from kplex.enumerator import seed_sets
from kplex.preprocess import core_decomposition


@pytest.fixture(scope="module", autouse=True)
def warm():
    _kernel.warmup()


def graph_of(n, edges):
    return load_edge_list([f"{v} {v}" for v in range(n)] +
                          [f"{u} {v}" for u, v in edges])


def random_graph(rng, n, p):
    return graph_of(n, [(u, v) for u in range(n) for v in range(u + 1, n)
                        if rng.random() < p])


def test_engines_agree_on_random_grid():
    rng = random.Random(404)
    for _ in range(12):
        n = rng.randint(6, 16)
        p = rng.choice([0.2, 0.4, 0.6, 0.8])
        g = random_graph(rng, n, p)
        for k in (1, 2, 3):
            q = rng.randint(2 * k - 1, 7)
            ref = CollectSink(check_duplicates=True)
            st_ref = enumerate_kplexes(g, k, q, ref, engine="python")
            fast = CollectSink(check_duplicates=True)
            st_fast = enumerate_kplexes(g, k, q, fast, engine="numba")
            assert fast.family() == ref.family(), (n, p, k, q)
            assert st_fast.nodes == st_ref.nodes, "branch trees diverged"
            assert st_fast.count == st_ref.count


def test_engines_agree_with_toggles():
    rng = random.Random(405)
    g = random_graph(rng, 14, 0.5)
    for kwargs in ({"use_bounds": False}, {"use_lemma3": False},
                   {"use_core_reduction": False}, {"tight": True}):
        ref = CollectSink()
        st_ref = enumerate_kplexes(g, 2, 4, ref, engine="python", **kwargs)
        fast = CollectSink()
        st_fast = enumerate_kplexes(g, 2, 4, fast, engine="numba", **kwargs)
        assert fast.family() == ref.family(), kwargs
        assert st_fast.nodes == st_ref.nodes, kwargs


def test_count_mode_matches_collect_mode():
    rng = random.Random(406)
    g = random_graph(rng, 15, 0.6)
    collected = CollectSink()
    enumerate_kplexes(g, 2, 3, collected, engine="numba")
    counted = CountSink()
    enumerate_kplexes(g, 2, 3, counted, engine="numba")
    assert counted.count == collected.count == len(collected.plexes)


def test_buffer_full_resume_path():
    # an output buffer smaller than one batch of results forces the kernel
    # to pause and resume repeatedly; nothing may be lost or duplicated
    rng = random.Random(407)
    g = random_graph(rng, 14, 0.7)
    k, q = 2, 3
    info = core_decomposition(g)
    want = set(brute_force_maximal_kplexes(g, k, q))

    got = []
    for i in range(g.n):
        seed, cand, excl = seed_sets(g, info, k, q, i)
        task = _kernel.build_seed_task(g, k, q, seed, cand, excl,
                                       info.degeneracy, mode=1, out_cap=24)
        while True:
            rc = task.run_chunk(_kernel._NO_FLAGS, 0)
            task.drain(lambda members: got.append(tuple(int(v) for v in members)))
            if rc == _kernel.DONE:
                break
            assert rc == _kernel.BUF_FULL
    assert {tuple(sorted(p)) for p in got} == want
    assert len(got) == len(want)


def test_donated_subtree_completes_the_count():
    # run a task, peel off the bottom frame mid-flight, finish both halves
    rng = random.Random(408)
    g = random_graph(rng, 16, 0.6)
    k, q = 2, 3
    info = core_decomposition(g)
    baseline = enumerate_kplexes(g, k, q, CountSink(), engine="numba")

    total = 0
    flags = np.ones(1, dtype=np.int32)  # demand a pause at every opportunity
    for i in range(max(0, g.n - q + 1)):
        seed, cand, excl = seed_sets(g, info, k, q, i)
        tasks = [_kernel.build_seed_task(g, k, q, seed, cand, excl,
                                         info.degeneracy, mode=0)]
        donations = 0
        while tasks:
            task = tasks.pop()
            while True:
                rc = task.run_chunk(flags if donations < 3 else _kernel._NO_FLAGS, 0)
                emitted, _nodes = task.take_counters()
                total += emitted
                if rc == _kernel.DONE:
                    break
                assert rc == _kernel.PAUSED
                assert task.pending_frames() >= 2
                tasks.append(task.donate_bottom())
                donations += 1
    assert total == baseline.count
