"""Exhaustive ground truth for maximal k-plex enumeration on small graphs.

This module is an independent implementation path: it depends only on the
graph container and the k-plex definition, never on the search modules, so
it can referee them.  Every subset is examined by a plain binary counter;
there is deliberately no pruning.
"""

from __future__ import annotations

from dataclasses import dataclass, field

import numpy as np

from .graph import Graph

__all__ = [
    "SolutionSet",
    "VerificationReport",
    "brute_force_maximal_kplexes",
    "verify_solution",
    "ORACLE_VERTEX_LIMIT",
]

ORACLE_VERTEX_LIMIT = 24  # 2^n * n work; refuse anything bigger

_CHUNK = 1 << 20


@dataclass(frozen=True)
class SolutionSet:
    """Canonical family of vertex sets: members ascending, family lexicographic."""

    sets: tuple[tuple[int, ...], ...]

    @staticmethod
    def from_iterable(families) -> "SolutionSet":
        canon = sorted({tuple(sorted(int(v) for v in s)) for s in families})
        return SolutionSet(tuple(canon))

    def __len__(self) -> int:
        return len(self.sets)

    def __iter__(self):
        return iter(self.sets)

    def __contains__(self, s) -> bool:
        return tuple(sorted(int(v) for v in s)) in set(self.sets)


def _adjacency_bitmasks(g: Graph) -> np.ndarray:
    masks = np.zeros(g.n, dtype=np.uint64)
    for v in range(g.n):
        m = 0
        for u in g.neighbors(v):
            m |= 1 << int(u)
        masks[v] = m
    return masks


def _max_nonneighbor_table(g: Graph) -> np.ndarray:
    """For every subset Z (bitmask index) the maximum, over members v, of
    the count of non-neighbors of v inside Z excluding v itself.

    A subset Z is a k-plex exactly when table[Z] <= k - 1.
    """
    n = g.n
    masks = _adjacency_bitmasks(g)
    total = 1 << n
    table = np.zeros(total, dtype=np.int8)
    for start in range(0, total, _CHUNK):
        stop = min(start + _CHUNK, total)
        subsets = np.arange(start, stop, dtype=np.uint64)
        sizes = np.bitwise_count(subsets).astype(np.int8)
        best = np.full(stop - start, -1, dtype=np.int8)
        for v in range(n):
            member = (subsets >> np.uint64(v)) & np.uint64(1)
            deg = np.bitwise_count(subsets & masks[v]).astype(np.int8)
            nn = sizes - 1 - deg
            np.maximum(best, np.where(member.astype(bool), nn, -1), out=best)
        np.maximum(best, 0, out=best)  # empty/singleton subsets
        table[start:stop] = best
    return table


def _families_from_table(table: np.ndarray, n: int, k: int, q: int) -> SolutionSet:
    total = 1 << n
    out: list[tuple[int, ...]] = []
    for start in range(0, total, _CHUNK):
        stop = min(start + _CHUNK, total)
        subsets = np.arange(start, stop, dtype=np.uint64)
        sizes = np.bitwise_count(subsets)
        good = (table[start:stop] <= k - 1) & (sizes >= q)
        if not good.any():
            continue
        cand = subsets[good]
        maximal = np.ones(len(cand), dtype=bool)
        for v in range(n):
            bit = np.uint64(1 << v)
            absent = (cand & bit) == 0
            if not absent.any():
                continue
            grown = (cand | bit).astype(np.int64)
            extendable = absent & (table[grown] <= k - 1)
            maximal &= ~extendable
        for z in cand[maximal]:
            z = int(z)
            out.append(tuple(v for v in range(n) if z >> v & 1))
    return SolutionSet(tuple(sorted(out)))


def brute_force_maximal_kplexes(g: Graph, k: int, q: int) -> SolutionSet:
    """All maximal k-plexes of size >= q, by checking every vertex subset.

    Maximality is tested by single-vertex extension only, which suffices
    because k-plexes are hereditary: a strictly larger k-plex superset
    always yields a one-vertex-larger k-plex superset.

    Raises:
        ValueError: if g has more than ORACLE_VERTEX_LIMIT vertices.
    """
    n = g.n
    if n > ORACLE_VERTEX_LIMIT:
        raise ValueError(f"oracle refuses n={n} > {ORACLE_VERTEX_LIMIT}")
    if n == 0:
        return SolutionSet(())
    return _families_from_table(_max_nonneighbor_table(g), n, k, q)


@dataclass
class VerificationReport:
    """Per-set and family-level violations; empty means the family is clean."""

    kplex_violations: list[tuple[tuple[int, ...], int]] = field(default_factory=list)
    size_violations: list[tuple[int, ...]] = field(default_factory=list)
    maximality_violations: list[tuple[tuple[int, ...], int]] = field(default_factory=list)
    duplicates: list[tuple[int, ...]] = field(default_factory=list)

    @property
    def ok(self) -> bool:
        return not (self.kplex_violations or self.size_violations
                    or self.maximality_violations or self.duplicates)

    def summary(self) -> str:
        if self.ok:
            return "ok"
        parts = []
        for s, v in self.kplex_violations:
            parts.append(f"not a k-plex: {s} (vertex {v} under-connected)")
        for s in self.size_violations:
            parts.append(f"too small: {s}")
        for s, v in self.maximality_violations:
            parts.append(f"not maximal: {s} (extends by {v})")
        for s in self.duplicates:
            parts.append(f"duplicate: {s}")
        return "; ".join(parts)


def verify_solution(g: Graph, k: int, q: int, family) -> VerificationReport:
    """Check each reported set for k-plexness, size, and single-vertex
    maximality; also flag family-level duplicates.  Completeness against
    the ground truth is not checked here.
    """
    adj = g.adjacency_sets()
    report = VerificationReport()
    seen = set()
    for raw in family:
        s = tuple(sorted(int(v) for v in raw))
        if s in seen:
            report.duplicates.append(s)
            continue
        seen.add(s)
        members = set(s)
        bad_vertex = -1
        for v in s:
            deg = len(adj[v] & members)
            if deg < len(s) - k:
                bad_vertex = v
                break
        if bad_vertex >= 0:
            report.kplex_violations.append((s, bad_vertex))
            continue
        if len(s) < q:
            report.size_violations.append(s)
        for u in range(g.n):
            if u in members:
                continue
            grown = members | {u}
            if all(len(adj[v] & grown) >= len(grown) - k for v in grown):
                report.maximality_violations.append((s, u))
                break
    return report
