"""Array/bitset engine for large runs; same branch rules as the python
reference (identical trees, counts, and emissions), compiled with numba.

Each seed is restricted to its 2-hop subgraph with a monotone local-ID
mapping, so degree/ID tie-breaks agree with the reference engine.  A
search frame is (vtx permutation, per-vertex non-neighbor and degree
counters, segment sizes); frames live on an explicit stack that supports
pausing, which the parallel module uses to drain result buffers and to
donate the stack's oldest pending subtree to an idle worker.
"""

from __future__ import annotations

import numpy as np
from numba import njit

from .graph import Graph

__all__ = ["KernelTask", "build_seed_task", "run_seeds_numba", "warmup"]

# kernel return codes
DONE = 0
PAUSED = 1
BUF_FULL = 2
STACK_OVERFLOW = 3  # cannot happen if the capacity bound holds; see KernelTask
BROKEN_INVARIANT = 4  # a state invariant failed inside the kernel

_M1 = np.uint64(0x5555555555555555)
_M2 = np.uint64(0x3333333333333333)
_M4 = np.uint64(0x0F0F0F0F0F0F0F0F)
_H01 = np.uint64(0x0101010101010101)
_U1 = np.uint64(1)


@njit(inline="always")
def _popcnt(x):
    x = x - ((x >> _U1) & _M1)
    x = (x & _M2) + ((x >> np.uint64(2)) & _M2)
    x = (x + (x >> np.uint64(4))) & _M4
    return (x * _H01) >> np.uint64(56)


@njit(inline="always")
def _testbit(bits, row, v):
    return (bits[row, v >> 6] >> np.uint64(v & 63)) & _U1


@njit(inline="always")
def _setbit(words, plane, v):
    words[plane, v >> 6] |= _U1 << np.uint64(v & 63)


@njit(cache=True)
def _emit_sorted(out_buf, pos, vtx, lo, hi):
    """Append [count, sorted members] to the buffer; insertion sort."""
    n = hi - lo
    out_buf[pos] = n
    base = pos + 1
    for i in range(n):
        out_buf[base + i] = vtx[lo + i]
    for i in range(1, n):
        key = out_buf[base + i]
        j = i - 1
        while j >= 0 and out_buf[base + j] > key:
            out_buf[base + j + 1] = out_buf[base + j]
            j -= 1
        out_buf[base + j + 1] = key
    return pos + 1 + n


@njit(cache=True, nogil=True)
def _kernel_loop(indptr, indices, bits, n, W, k, q,
                 use_bounds, tight, mode,
                 stk_vtx, stk_nnb, stk_deg, stk_meta, bt,
                 out_buf, out_meta,
                 stop_flags, wid,
                 status, sup, boff, bucket, sbits):
    """Run the branch loop until the stack drains (DONE), a steal request
    arrives with work to spare (PAUSED), or the output buffer fills
    (BUF_FULL).  All state lives in the caller's arrays, so a paused run
    resumes exactly where it stopped.

    out_meta: [0] buffer length, [1] emission count, [2] nodes expanded.
    """
    while True:
        if bt[1] == bt[0]:
            return DONE
        if stop_flags[wid] != 0 and bt[1] - bt[0] >= 2:
            return PAUSED
        if bt[1] + 2 > stk_meta.shape[0]:
            return STACK_OVERFLOW
        f = bt[1] - 1
        sZ = stk_meta[f, 0]
        cL = stk_meta[f, 1]
        xL = stk_meta[f, 2]
        size = sZ + cL
        used = size + xL
        if mode == 1 and out_meta[0] + size + 1 > out_buf.shape[0]:
            return BUF_FULL
        vtx = stk_vtx[f]
        nnb = stk_nnb[f]
        deg = stk_deg[f]
        bt[1] = f
        out_meta[2] += 1

        # ---- base case: no candidates left
        if cL == 0:
            if sZ >= q and xL == 0:
                out_meta[1] += 1
                if mode == 1:
                    out_meta[0] = _emit_sorted(out_buf, out_meta[0], vtx, 0, sZ)
            continue

        # ---- per-node membership marks and S+C bitset
        for i in range(n):
            status[i] = 0
        for i in range(sZ):
            status[vtx[i]] = 1
        for i in range(sZ, size):
            status[vtx[i]] = 2
        for i in range(size, used):
            status[vtx[i]] = 3
        for w in range(W):
            sbits[0, w] = np.uint64(0)
        for i in range(size):
            _setbit(sbits, 0, vtx[i])

        # ---- pivot: min degree in G(S+C), then max non-neighbors, then min ID
        bestv = -1
        vidx = -1
        bd = n + 1
        bn = -1
        for i in range(size):
            w0 = vtx[i]
            d = deg[w0]
            nn0 = nnb[w0]
            if d < bd or (d == bd and (nn0 > bn or (nn0 == bn and w0 < bestv))):
                bestv = w0
                vidx = i
                bd = d
                bn = nn0

        # ---- early termination: S+C is a k-plex
        if bd >= size - k:
            if size >= q:
                floor = size - k
                for w in range(W):
                    sbits[1, w] = np.uint64(0)
                for i in range(size):
                    w0 = vtx[i]
                    if deg[w0] == floor:
                        _setbit(sbits, 1, w0)
                maximal = True
                need = size + 1 - k
                for i in range(size, used):
                    u = vtx[i]
                    du = 0
                    tight_covered = True
                    for w in range(W):
                        du += _popcnt(bits[u, w] & sbits[0, w])
                        if sbits[1, w] & ~bits[u, w] != np.uint64(0):
                            tight_covered = False
                    if du >= need and tight_covered:
                        maximal = False
                        break
                if maximal:
                    out_meta[1] += 1
                    if mode == 1:
                        out_meta[0] = _emit_sorted(out_buf, out_meta[0], vtx, 0, size)
            continue

        # ---- re-pick from C when the pivot sits in S
        v = bestv
        if status[v] == 1:
            rb = -1
            ridx = -1
            bd2 = n + 1
            bn2 = -1
            for i in range(sZ, size):
                u = vtx[i]
                if _testbit(bits, v, u):
                    continue
                d = deg[u]
                nn0 = nnb[u]
                if d < bd2 or (d == bd2 and (nn0 > bn2 or (nn0 == bn2 and u < rb))):
                    rb = u
                    ridx = i
                    bd2 = d
                    bn2 = nn0
            if rb < 0:
                # a pivot in S below the degree floor must miss someone in C
                return BROKEN_INVARIANT
            v = rb
            vidx = ridx

        # ---- hybrid upper bound for the pivot
        take = True
        if use_bounds != 0:
            ub = sZ + k - nnb[v]
            s = 0
            for i in range(sZ):
                w0 = vtx[i]
                sl = k - 1 - nnb[w0]
                if tight != 0 and _testbit(bits, v, w0) == 0:
                    sl -= 1
                sup[w0] = sl
                s += sl
            for i in range(2 * k + 2):
                boff[i] = 0
            p0 = indptr[v]
            p1 = indptr[v + 1]
            for p in range(p0, p1):
                u = indices[p]
                if status[u] == 2:
                    boff[nnb[u] + 1] += 1
            for i in range(k):
                boff[i + 1] += boff[i]
            for i in range(k):
                boff[k + 1 + i] = boff[i]
            for p in range(p0, p1):
                u = indices[p]
                if status[u] == 2:
                    c = nnb[u]
                    bucket[boff[k + 1 + c]] = u
                    boff[k + 1 + c] += 1
            done = False
            for cost in range(k):
                if done:
                    break
                for idx in range(boff[cost], boff[cost + 1]):
                    if s < cost:
                        done = True  # budget only shrinks; later buckets cost more
                        break
                    u = bucket[idx]
                    if cost == 0:
                        ub += 1
                        continue
                    wmin = -1
                    smin = n + k + 1
                    for j in range(sZ):
                        w0 = vtx[j]
                        if _testbit(bits, u, w0) == 0:
                            if sup[w0] < smin or (sup[w0] == smin and w0 < wmin):
                                wmin = w0
                                smin = sup[w0]
                    if wmin >= 0 and smin > 0:
                        ub += 1
                        s -= cost
                        sup[wmin] -= 1
            take = ub >= q

        # ---- exclude child first (explored after the include child)
        g1 = bt[1]
        ev = stk_vtx[g1]
        en = stk_nnb[g1]
        ed = stk_deg[g1]
        for i in range(used):
            w0 = vtx[i]
            ev[i] = w0
            en[w0] = nnb[w0]
            ed[w0] = deg[w0]
        last = size - 1
        ev[vidx] = ev[last]
        ev[last] = v
        for p in range(indptr[v], indptr[v + 1]):
            u = indices[p]
            st = status[u]
            if st == 1 or (st == 2 and u != v):
                ed[u] -= 1
        stk_meta[g1, 0] = sZ
        stk_meta[g1, 1] = cL - 1
        stk_meta[g1, 2] = xL + 1
        bt[1] = g1 + 1

        # ---- include child on top of the stack (popped next)
        if take:
            g2 = bt[1]
            iv = stk_vtx[g2]
            inn = stk_nnb[g2]
            idg = stk_deg[g2]
            for w in range(W):
                sbits[2, w] = np.uint64(0)
            for j in range(sZ):
                w0 = vtx[j]
                if _testbit(bits, v, w0) == 0 and nnb[w0] == k - 2:
                    _setbit(sbits, 2, w0)
            nnv = nnb[v]
            cap = k - 1
            for j in range(sZ):
                w0 = vtx[j]
                iv[j] = w0
                if _testbit(bits, v, w0) == 0:
                    inn[w0] = nnb[w0] + 1
                else:
                    inn[w0] = nnb[w0]
            iv[sZ] = v
            inn[v] = nnv
            pos = sZ + 1
            for j in range(sZ, size):
                w0 = vtx[j]
                if w0 == v:
                    continue
                a = 1 - int(_testbit(bits, v, w0))
                if nnb[w0] + a > cap or nnv + a > cap:
                    continue
                okz = True
                for w in range(W):
                    if sbits[2, w] & ~bits[w0, w] != np.uint64(0):
                        okz = False
                        break
                if not okz:
                    continue
                iv[pos] = w0
                inn[w0] = nnb[w0] + a
                pos += 1
            ccl = pos - (sZ + 1)
            for j in range(size, used):
                w0 = vtx[j]
                a = 1 - int(_testbit(bits, v, w0))
                if nnb[w0] + a > cap or nnv + a > cap:
                    continue
                okz = True
                for w in range(W):
                    if sbits[2, w] & ~bits[w0, w] != np.uint64(0):
                        okz = False
                        break
                if not okz:
                    continue
                iv[pos] = w0
                inn[w0] = nnb[w0] + a
                pos += 1
            cxl = pos - (sZ + 1 + ccl)
            for w in range(W):
                sbits[3, w] = np.uint64(0)
            for j in range(sZ + 1 + ccl):
                _setbit(sbits, 3, iv[j])
            for j in range(sZ + 1 + ccl):
                w0 = iv[j]
                d = 0
                for w in range(W):
                    d += _popcnt(bits[w0, w] & sbits[3, w])
                idg[w0] = d
            stk_meta[g2, 0] = sZ + 1
            stk_meta[g2, 1] = ccl
            stk_meta[g2, 2] = cxl
            bt[1] = g2 + 1


# ---------------------------------------------------------------------------
# python-side task plumbing

class _LocalGraph:
    """A seed's 2-hop subgraph: CSR plus an adjacency bitmatrix, with a
    monotone local<->reduced-graph ID mapping.  Shared read-only between
    every task split off the seed."""

    __slots__ = ("indptr", "indices", "bits", "loc2glob", "n", "W")

    def __init__(self, indptr, indices, bits, loc2glob):
        self.indptr = indptr
        self.indices = indices
        self.bits = bits
        self.loc2glob = loc2glob
        self.n = len(loc2glob)
        self.W = bits.shape[1] if self.n else 1


def _build_local_graph(gR: Graph, members: np.ndarray) -> _LocalGraph:
    members = np.asarray(members, dtype=np.int64)
    n_loc = len(members)
    W = max(1, (n_loc + 63) >> 6)
    mark = np.zeros(gR.n, dtype=bool)
    mark[members] = True
    indptr = np.zeros(n_loc + 1, dtype=np.int64)
    rows = []
    for li, v in enumerate(members):
        nbrs = gR.neighbors(int(v))
        kept = nbrs[mark[nbrs]]
        mapped = np.searchsorted(members, kept).astype(np.int32)
        rows.append(mapped)
        indptr[li + 1] = indptr[li] + len(mapped)
    indices = np.concatenate(rows) if rows else np.zeros(0, dtype=np.int32)
    bits = np.zeros((max(n_loc, 1), W), dtype=np.uint64)
    for li in range(n_loc):
        row = rows[li]
        if len(row):
            np.bitwise_or.at(bits[li], row >> 6,
                             np.uint64(1) << (row & 63).astype(np.uint64))
    return _LocalGraph(indptr, indices.astype(np.int32), bits, members)


class KernelTask:
    """One unit of enumeration work: a frame stack over a seed's local graph.

    ``run_chunk`` drives the kernel until it finishes, pauses for a steal
    request, or fills the output buffer; the owner drains/donates between
    calls, so the arrays are never touched concurrently.
    """

    __slots__ = ("local", "k", "q", "use_bounds", "tight", "mode",
                 "stk_vtx", "stk_nnb", "stk_deg", "stk_meta", "bt",
                 "out_buf", "out_meta", "_scratch")

    def __init__(self, local: _LocalGraph, k: int, q: int, *, use_bounds: bool,
                 tight: bool, mode: int, cap: int, out_cap: int):
        n = max(local.n, 1)
        self.local = local
        self.k = k
        self.q = q
        self.use_bounds = 1 if use_bounds else 0
        self.tight = 1 if tight else 0
        self.mode = mode
        self.stk_vtx = np.zeros((cap, n), dtype=np.int32)
        self.stk_nnb = np.zeros((cap, n), dtype=np.int32)
        self.stk_deg = np.zeros((cap, n), dtype=np.int32)
        self.stk_meta = np.zeros((cap, 3), dtype=np.int64)
        self.bt = np.zeros(2, dtype=np.int64)
        self.out_buf = np.zeros(out_cap, dtype=np.int32)
        self.out_meta = np.zeros(3, dtype=np.int64)
        self._scratch = (
            np.zeros(n, dtype=np.int32),            # status
            np.zeros(n, dtype=np.int32),            # sup
            np.zeros(2 * k + 4, dtype=np.int32),    # bucket offsets
            np.zeros(n, dtype=np.int32),            # bucket storage
            np.zeros((4, local.W), dtype=np.uint64),
        )

    def pending_frames(self) -> int:
        return int(self.bt[1] - self.bt[0])

    def bottom_candidate_size(self) -> int:
        if self.pending_frames() == 0:
            return 0
        return int(self.stk_meta[self.bt[0], 1])

    def run_chunk(self, stop_flags: np.ndarray, wid: int) -> int:
        loc = self.local
        status, sup, boff, bucket, sbits = self._scratch
        while True:
            rc = _kernel_loop(
                loc.indptr, loc.indices, loc.bits, loc.n, loc.W,
                self.k, self.q, self.use_bounds, self.tight, self.mode,
                self.stk_vtx, self.stk_nnb, self.stk_deg, self.stk_meta, self.bt,
                self.out_buf, self.out_meta,
                stop_flags, wid,
                status, sup, boff, bucket, sbits)
            if rc == BROKEN_INVARIANT:
                raise RuntimeError("search-state invariant violated in the kernel")
            if rc != STACK_OVERFLOW:
                return rc
            self._compact()

    def _compact(self) -> None:
        """Slide live frames to the base; donations strand low slots."""
        b, t = int(self.bt[0]), int(self.bt[1])
        if b == 0:
            raise RuntimeError("frame stack exceeded its proven capacity bound")
        n = t - b
        self.stk_vtx[:n] = self.stk_vtx[b:t]
        self.stk_nnb[:n] = self.stk_nnb[b:t]
        self.stk_deg[:n] = self.stk_deg[b:t]
        self.stk_meta[:n] = self.stk_meta[b:t]
        self.bt[0] = 0
        self.bt[1] = n

    def take_counters(self) -> tuple[int, int]:
        """Read and reset (emissions, nodes)."""
        count, nodes = int(self.out_meta[1]), int(self.out_meta[2])
        self.out_meta[1] = 0
        self.out_meta[2] = 0
        return count, nodes

    def drain(self, consume) -> None:
        """Decode buffered plexes (local IDs) and hand them to ``consume``."""
        buf, ln = self.out_buf, int(self.out_meta[0])
        loc2glob = self.local.loc2glob
        pos = 0
        while pos < ln:
            sz = int(buf[pos])
            members = loc2glob[buf[pos + 1:pos + 1 + sz]]
            consume(members)
            pos += 1 + sz
        self.out_meta[0] = 0

    def donate_bottom(self) -> "KernelTask":
        """Split off the stack's oldest pending subtree as a new task.

        Only call while this task's kernel is paused (single owner)."""
        assert self.pending_frames() >= 1
        b = int(self.bt[0])
        child = KernelTask(self.local, self.k, self.q,
                           use_bounds=bool(self.use_bounds), tight=bool(self.tight),
                           mode=self.mode, cap=self.stk_vtx.shape[0],
                           out_cap=len(self.out_buf))
        child.stk_vtx[0] = self.stk_vtx[b]
        child.stk_nnb[0] = self.stk_nnb[b]
        child.stk_deg[0] = self.stk_deg[b]
        child.stk_meta[0] = self.stk_meta[b]
        child.bt[0] = 0
        child.bt[1] = 1
        self.bt[0] = b + 1
        return child


def build_seed_task(gR: Graph, k: int, q: int, seed: int,
                    cand: np.ndarray, excl: np.ndarray, degeneracy: int, *,
                    use_bounds: bool = True, tight: bool = False,
                    mode: int = 0, out_cap: int = 1 << 16) -> KernelTask:
    """Root task for one seed; cand/excl are already pruned reduced-graph IDs."""
    members = np.unique(np.concatenate([
        np.asarray([seed], dtype=np.int64),
        np.asarray(cand, dtype=np.int64),
        np.asarray(excl, dtype=np.int64)]))
    local = _build_local_graph(gR, members)
    n_loc = local.n
    cap = min(n_loc, degeneracy + k) + 8
    task = KernelTask(local, k, q, use_bounds=use_bounds, tight=tight,
                      mode=mode, cap=cap, out_cap=out_cap)
    seed_loc = int(np.searchsorted(members, seed))
    cand_loc = np.searchsorted(members, np.asarray(cand, dtype=np.int64)).astype(np.int32)
    excl_loc = np.searchsorted(members, np.asarray(excl, dtype=np.int64)).astype(np.int32)
    cand_loc.sort()
    excl_loc.sort()

    vtx = task.stk_vtx[0]
    nnb = task.stk_nnb[0]
    deg = task.stk_deg[0]
    vtx[0] = seed_loc
    nnb[seed_loc] = 0
    pos = 1
    bits = local.bits
    for u in cand_loc:
        u = int(u)
        nnb[u] = 1 - int((bits[u, seed_loc >> 6] >> np.uint64(seed_loc & 63)) & np.uint64(1))
        vtx[pos] = u
        pos += 1
    for u in excl_loc:
        u = int(u)
        nnb[u] = 1 - int((bits[u, seed_loc >> 6] >> np.uint64(seed_loc & 63)) & np.uint64(1))
        vtx[pos] = u
        pos += 1
    # degrees inside S+C
    scmask = np.zeros(local.W, dtype=np.uint64)
    for i in range(1 + len(cand_loc)):
        u = int(vtx[i])
        scmask[u >> 6] |= np.uint64(1) << np.uint64(u & 63)
    for i in range(1 + len(cand_loc)):
        u = int(vtx[i])
        deg[u] = int(np.bitwise_count(bits[u] & scmask).sum())
    task.stk_meta[0, 0] = 1
    task.stk_meta[0, 1] = len(cand_loc)
    task.stk_meta[0, 2] = len(excl_loc)
    task.bt[0] = 0
    task.bt[1] = 1
    return task


_NO_FLAGS = np.zeros(1, dtype=np.int32)


def run_seeds_numba(gR: Graph, info, k: int, q: int, seed_positions, sink, stats,
                    *, new_to_old: np.ndarray, use_lemma3: bool = True,
                    use_bounds: bool = True, tight: bool = False) -> None:
    """Sequential seed loop on the numba engine (used by enumerate_kplexes)."""
    from .enumerator import CountSink, seed_sets

    count_only = type(sink) is CountSink
    mode = 0 if count_only else 1

    def consume(members_gr):
        verts = tuple(int(new_to_old[v]) for v in members_gr)
        sink.emit(verts)

    for i in seed_positions:
        seed, cand, excl = seed_sets(gR, info, k, q, i, use_lemma3=use_lemma3)
        task = build_seed_task(gR, k, q, seed, cand, excl, info.degeneracy,
                               use_bounds=use_bounds, tight=tight, mode=mode)
        while True:
            rc = task.run_chunk(_NO_FLAGS, 0)
            emitted, nodes = task.take_counters()
            stats.nodes += nodes
            stats.count += emitted
            if mode == 1:
                task.drain(consume)
            elif emitted:
                sink.add_count(emitted)
            if rc == DONE:
                break


def warmup() -> None:
    """Trigger JIT compilation on a tiny instance (timing tests call this)."""
    from .preprocess import core_decomposition
    from .enumerator import CountSink, Stats
    from .graph import load_edge_list
    g = load_edge_list(["0 1", "1 2", "2 0", "0 3", "1 3"])
    info = core_decomposition(g)
    sink = CountSink()
    stats = Stats()
    run_seeds_numba(g, info, 2, 3, range(g.n), sink, stats,
                    new_to_old=np.arange(g.n), use_lemma3=True)
