"""Deterministic reconstructions of three DIMACS clique benchmark graphs.

The instances are defined by published constructions, so an isomorphic
copy can be rebuilt without the archive files (k-plex counts are
isomorphism-invariant):

* johnson8-4-4: vertices are the 4-subsets of an 8-set, adjacent when the
  subsets share at most 2 elements (Hamming distance >= 4 between the
  weight-4 incidence vectors).  n=70, m=1855.
* MANN_a9: the clique form of the Steiner-triple covering problem on 9
  points.  One vertex per (triple, point-in-triple) pair plus one slack
  vertex per point; all pairs are adjacent except two picks inside the
  same triple, and a point's slack against that point's own triples.
  STS(9) is unique up to isomorphism, so any copy serves.  n=45, m=918.
* c-fat200-5: the fault-diagnosis ring.  Vertices fall into
  floor(n / (c ln n)) classes by v mod q; two vertices are adjacent when
  their classes coincide or are cyclically adjacent.  n=200, m=8473.
  (The same rule reproduces the published edge counts of every c-fat
  instance, e.g. c-fat500-10 with m=46627.)

p_hat300-1 came from a seeded random generator and cannot be
reconstructed; tests that need it look for a real file via the
KPLEX_DIMACS_DIR environment variable or tests/data/ and skip otherwise.
"""

from __future__ import annotations

import math
import os
from itertools import combinations
from pathlib import Path

__all__ = [
    "johnson_8_4_4_edges",
    "mann_a9_edges",
    "c_fat_edges",
    "write_dimacs",
    "generated_instance_path",
    "external_instance_path",
]

DATA_DIR = Path(__file__).parent / "data"


def johnson_8_4_4_edges() -> tuple[int, list[tuple[int, int]]]:
    subs = [frozenset(c) for c in combinations(range(8), 4)]
    n = len(subs)
    edges = [(i, j) for i in range(n) for j in range(i + 1, n)
             if len(subs[i] & subs[j]) <= 2]
    return n, edges


def _sts9_lines() -> list[list[int]]:
    """The 12 lines of AG(2,3) over points 0..8 laid out as a 3x3 grid."""
    idx = lambda r, c: 3 * r + c
    lines = []
    for r in range(3):
        lines.append([idx(r, c) for c in range(3)])
    for c in range(3):
        lines.append([idx(r, c) for r in range(3)])
    for slope in (1, 2):
        for b in range(3):
            lines.append([idx(r, (slope * r + b) % 3) for r in range(3)])
    return lines


def mann_a9_edges() -> tuple[int, list[tuple[int, int]]]:
    lines = _sts9_lines()
    verts: list[tuple[int, int]] = []
    for t_i, t in enumerate(lines):
        for p in t:
            verts.append((t_i, p))
    slack_base = len(verts)
    n = slack_base + 9
    non_edges: set[tuple[int, int]] = set()
    by_triple: dict[int, list[int]] = {}
    for v_i, (t_i, _p) in enumerate(verts):
        by_triple.setdefault(t_i, []).append(v_i)
    for members in by_triple.values():
        for a, b in combinations(members, 2):
            non_edges.add((a, b))
    for v_i, (_t_i, p) in enumerate(verts):
        s = slack_base + p
        non_edges.add((v_i, s))
    edges = [(i, j) for i in range(n) for j in range(i + 1, n)
             if (i, j) not in non_edges]
    return n, edges


def c_fat_edges(n: int, c: int) -> tuple[int, list[tuple[int, int]]]:
    q = int(n / (c * math.log(n)))
    cls = [v % q for v in range(n)]
    edges = []
    for i in range(n):
        for j in range(i + 1, n):
            d = (cls[i] - cls[j]) % q
            if d == 0 or d == 1 or d == q - 1:
                edges.append((i, j))
    return n, edges


def write_dimacs(path: Path, n: int, edges: list[tuple[int, int]]) -> None:
    with open(path, "w", encoding="utf-8") as fh:
        fh.write(f"c generated locally; isomorphic to the published instance\n")
        fh.write(f"p edge {n} {len(edges)}\n")
        for u, v in edges:
            fh.write(f"e {u + 1} {v + 1}\n")


_GENERATORS = {
    "johnson8-4-4": johnson_8_4_4_edges,
    "MANN_a9": mann_a9_edges,
    "c-fat200-5": lambda: c_fat_edges(200, 5),
}

# (n, 2m) as published; generation aborts on any mismatch
_EXPECTED = {
    "johnson8-4-4": (70, 3710),
    "MANN_a9": (45, 1836),
    "c-fat200-5": (200, 16946),
}


def generated_instance_path(name: str) -> Path:
    """Write (once) and return the DIMACS file for a reconstructible instance."""
    DATA_DIR.mkdir(exist_ok=True)
    path = DATA_DIR / f"{name}.clq"
    if not path.exists():
        n, edges = _GENERATORS[name]()
        exp_n, exp_2m = _EXPECTED[name]
        if (n, 2 * len(edges)) != (exp_n, exp_2m):
            raise AssertionError(
                f"{name}: construction gives (n={n}, 2m={2 * len(edges)}), "
                f"published header says {(_EXPECTED[name])}")
        write_dimacs(path, n, edges)
    return path


def external_instance_path(name: str) -> Path | None:
    """Locate a non-reconstructible instance file, if the user provided one."""
    candidates = [DATA_DIR / f"{name}.clq"]
    env = os.environ.get("KPLEX_DIMACS_DIR")
    if env:
        candidates.insert(0, Path(env) / f"{name}.clq")
    for path in candidates:
        if path.exists():
            return path
    return None
