"""Immutable undirected graph in compressed sorted-adjacency form.

Vertices carry dense internal IDs 0..n-1; the labels found in the input
file are kept in ``original_ids`` so results can be reported in the
caller's vocabulary.  Self-loops and duplicate edges are dropped on load:
real datasets contain both, and every algorithm here assumes a simple
graph.
"""

from __future__ import annotations

from typing import Iterable, Iterator, TextIO

import numpy as np

__all__ = [
    "Graph",
    "GraphParseError",
    "load_edge_list",
    "load_dimacs",
    "write_edge_list",
    "induced_subgraph",
]


class GraphParseError(ValueError):
    """Raised for malformed input; carries the 1-based offending line number."""

    def __init__(self, message: str, line_no: int):
        super().__init__(f"line {line_no}: {message}")
        self.line_no = line_no


class Graph:
    """Undirected simple graph stored as CSR with sorted neighbor lists.

    Attributes:
        indptr: int64 array of length n+1; row pointers into ``indices``.
        indices: int32 array of length 2m; ascending within each row.
        original_ids: int64 array mapping internal ID -> input label.
    """

    __slots__ = ("indptr", "indices", "original_ids")

    def __init__(self, indptr: np.ndarray, indices: np.ndarray, original_ids: np.ndarray):
        for arr in (indptr, indices, original_ids):
            arr.flags.writeable = False  # shared read-only across workers
        self.indptr = indptr
        self.indices = indices
        self.original_ids = original_ids

    @property
    def vertex_count(self) -> int:
        return len(self.indptr) - 1

    @property
    def edge_count(self) -> int:
        return len(self.indices) // 2

    # short aliases used throughout the search code
    @property
    def n(self) -> int:
        return len(self.indptr) - 1

    @property
    def m(self) -> int:
        return len(self.indices) // 2

    def neighbors(self, v: int) -> np.ndarray:
        """Ascending neighbor IDs of ``v`` (a read-only view)."""
        return self.indices[self.indptr[v]:self.indptr[v + 1]]

    def degree(self, v: int) -> int:
        return int(self.indptr[v + 1] - self.indptr[v])

    def degrees(self) -> np.ndarray:
        return np.diff(self.indptr).astype(np.int64)

    def adjacency_sets(self) -> list[set[int]]:
        """Neighbor sets per vertex, for membership-heavy callers."""
        return [set(self.neighbors(v).tolist()) for v in range(self.n)]

    def adjacency_masks(self) -> list[int]:
        """Neighbor bitmasks (python ints) per vertex."""
        masks = [0] * self.n
        for v in range(self.n):
            mask = 0
            for u in self.neighbors(v):
                mask |= 1 << int(u)
            masks[v] = mask
        return masks

    def has_edge(self, u: int, v: int) -> bool:
        row = self.neighbors(u)
        i = np.searchsorted(row, v)
        return i < len(row) and row[i] == v

    def validate(self) -> None:
        """Assert the structural invariants; used by tests and loaders."""
        n = self.n
        assert self.indptr[0] == 0 and self.indptr[-1] == len(self.indices)
        assert np.all(np.diff(self.indptr) >= 0)
        assert len(self.original_ids) == n
        if len(self.indices):
            assert self.indices.min() >= 0 and self.indices.max() < n
        seen = set()
        for v in range(n):
            row = self.neighbors(v)
            assert np.all(np.diff(row) > 0), f"row {v} not strictly ascending"
            assert v not in row, f"self-loop at {v}"
            for u in row:
                seen.add((v, int(u)))
        for v, u in seen:
            assert (u, v) in seen, f"asymmetric edge {v}->{u}"
        assert len(seen) == 2 * self.m

    def __eq__(self, other: object) -> bool:
        """Label-preserving structural equality (internal numbering may differ)."""
        if not isinstance(other, Graph):
            return NotImplemented
        if self.n != other.n or self.m != other.m:
            return False
        if sorted(self.original_ids.tolist()) != sorted(other.original_ids.tolist()):
            return False
        return self._labeled_edges() == other._labeled_edges()

    def __hash__(self):  # mutable arrays; identity hash is fine
        return id(self)

    def _labeled_edges(self) -> set[tuple[int, int]]:
        lab = self.original_ids
        out = set()
        for v in range(self.n):
            for u in self.neighbors(v):
                if v < u:
                    a, b = int(lab[v]), int(lab[u])
                    out.add((a, b) if a <= b else (b, a))
        return out

    def __repr__(self) -> str:
        return f"Graph(n={self.n}, m={self.m})"


def _csr_from_pairs(n: int, pairs: set[tuple[int, int]], original_ids: np.ndarray) -> Graph:
    """Build a Graph from deduplicated internal-ID edge pairs (u < v)."""
    if pairs:
        arr = np.fromiter((x for uv in pairs for x in uv), dtype=np.int32,
                          count=2 * len(pairs)).reshape(-1, 2)
        src = np.concatenate([arr[:, 0], arr[:, 1]])
        dst = np.concatenate([arr[:, 1], arr[:, 0]])
        order = np.lexsort((dst, src))
        src, dst = src[order], dst[order]
        indptr = np.zeros(n + 1, dtype=np.int64)
        np.add.at(indptr, src + 1, 1)
        np.cumsum(indptr, out=indptr)
        indices = dst.astype(np.int32)
    else:
        indptr = np.zeros(n + 1, dtype=np.int64)
        indices = np.zeros(0, dtype=np.int32)
    return Graph(indptr, indices, original_ids)


def _iter_lines(source: Iterable[str] | TextIO) -> Iterator[str]:
    yield from source


def load_edge_list(source: Iterable[str] | TextIO) -> Graph:
    """Parse whitespace-separated integer pairs, one edge per line.

    Lines starting with ``#`` or ``%`` are comments.  Labels are remapped to
    dense internal IDs in first-seen order; self-loops and duplicate edges
    (in either orientation) are silently dropped.  Empty input is a valid
    empty graph.

    Raises:
        GraphParseError: on a malformed token, with the line number.
    """
    label_to_id: dict[int, int] = {}
    pairs: set[tuple[int, int]] = set()

    def intern(label: int) -> int:
        vid = label_to_id.get(label)
        if vid is None:
            vid = len(label_to_id)
            label_to_id[label] = vid
        return vid

    for line_no, line in enumerate(_iter_lines(source), start=1):
        stripped = line.strip()
        if not stripped or stripped.startswith("#") or stripped.startswith("%"):
            continue
        fields = stripped.split()
        if len(fields) != 2:
            raise GraphParseError(f"expected two integer labels, got {len(fields)} fields", line_no)
        try:
            a, b = int(fields[0]), int(fields[1])
        except ValueError:
            raise GraphParseError(f"non-integer token in {fields!r}", line_no) from None
        u, v = intern(a), intern(b)
        if u == v:
            continue
        pairs.add((u, v) if u < v else (v, u))

    original = np.fromiter(label_to_id.keys(), dtype=np.int64, count=len(label_to_id))
    return _csr_from_pairs(len(label_to_id), pairs, original)


def load_dimacs(source: Iterable[str] | TextIO) -> Graph:
    """Parse the DIMACS ascii clique format (``c`` comments, ``p edge n m``,
    ``e u v`` with 1-based labels).

    The declared vertex count is honored even when some vertices appear in
    no edge.  Dedup and self-loop rules match :func:`load_edge_list`.

    Raises:
        GraphParseError: missing/duplicate ``p`` line, ``e`` before ``p``,
            out-of-range label, or a non-integer token.
    """
    n = -1
    line_no = 0
    pairs: set[tuple[int, int]] = set()
    for line_no, line in enumerate(_iter_lines(source), start=1):
        stripped = line.strip()
        if not stripped or stripped.startswith("c"):
            continue
        fields = stripped.split()
        kind = fields[0]
        if kind == "p":
            if n >= 0:
                raise GraphParseError("duplicate 'p' line", line_no)
            if len(fields) != 4:
                raise GraphParseError("'p' line must read 'p edge <n> <m>'", line_no)
            try:
                n = int(fields[2])
                int(fields[3])
            except ValueError:
                raise GraphParseError(f"non-integer token in {fields!r}", line_no) from None
            if n < 0:
                raise GraphParseError(f"negative vertex count {n}", line_no)
        elif kind == "e":
            if n < 0:
                raise GraphParseError("'e' line before 'p' line", line_no)
            if len(fields) != 3:
                raise GraphParseError("'e' line must read 'e <u> <v>'", line_no)
            try:
                a, b = int(fields[1]), int(fields[2])
            except ValueError:
                raise GraphParseError(f"non-integer token in {fields!r}", line_no) from None
            if not (1 <= a <= n) or not (1 <= b <= n):
                raise GraphParseError(f"label out of range 1..{n} in {fields!r}", line_no)
            if a == b:
                continue
            u, v = a - 1, b - 1
            pairs.add((u, v) if u < v else (v, u))
        else:
            raise GraphParseError(f"unknown record type {kind!r}", line_no)
    if n < 0:
        raise GraphParseError("missing 'p' line", line_no)
    original = np.arange(1, n + 1, dtype=np.int64)
    return _csr_from_pairs(n, pairs, original)


def write_edge_list(g: Graph, out: TextIO) -> None:
    """Write ``g`` as edge-list text using original labels.

    Isolated vertices are emitted as self-loop lines so a reload preserves
    them (the loader registers the label, then drops the loop).
    """
    lab = g.original_ids
    for v in range(g.n):
        row = g.neighbors(v)
        if len(row) == 0:
            out.write(f"{lab[v]} {lab[v]}\n")
            continue
        for u in row:
            if v < u:
                out.write(f"{lab[v]} {lab[u]}\n")


def induced_subgraph(g: Graph, keep: Iterable[int]) -> tuple[Graph, np.ndarray]:
    """Restrict ``g`` to the vertex set ``keep``; re-densify IDs.

    New IDs are assigned in ascending order of old IDs, so the mapping is
    monotone.  Returns ``(subgraph, old_to_new)`` where ``old_to_new`` has
    -1 for dropped vertices.  The subgraph's ``original_ids`` compose the
    maps, so labels survive the restriction.

    Raises:
        ValueError: if ``keep`` contains an out-of-range vertex.
    """
    keep_arr = np.unique(np.fromiter((int(v) for v in keep), dtype=np.int64))
    if len(keep_arr) and (keep_arr[0] < 0 or keep_arr[-1] >= g.n):
        raise ValueError(f"vertex out of range in keep: {keep_arr[0]}..{keep_arr[-1]} vs n={g.n}")
    old_to_new = np.full(g.n, -1, dtype=np.int64)
    old_to_new[keep_arr] = np.arange(len(keep_arr))

    n2 = len(keep_arr)
    counts = np.zeros(n2 + 1, dtype=np.int64)
    rows = []
    for new_id, old_id in enumerate(keep_arr):
        nbrs = g.neighbors(old_id)
        mapped = old_to_new[nbrs]
        mapped = mapped[mapped >= 0]
        counts[new_id + 1] = len(mapped)
        rows.append(mapped.astype(np.int32))
    indptr = np.cumsum(counts)
    indices = np.concatenate(rows) if rows else np.zeros(0, dtype=np.int32)
    sub = Graph(indptr, indices.astype(np.int32), g.original_ids[keep_arr].copy())
    return sub, old_to_new
