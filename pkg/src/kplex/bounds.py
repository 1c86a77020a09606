"""Upper bounds on the largest k-plex containing S + {v} inside G(S + C).

Three bounds of increasing strength, all sound:

* ``basic_bound``   - slack of v plus its whole candidate neighborhood.
* ``support_bound`` - charges each candidate neighbor its non-neighbor cost
  against the total slack budget of S, cheapest first.
* ``hybrid_bound``  - additionally tracks per-member slack, so a single
  over-subscribed member of S blocks further admissions.

The chain hybrid <= support <= basic always holds, and each is >= the true
maximum, which the test suite checks against exhaustive search.
"""

from __future__ import annotations

__all__ = ["BoundScratch", "basic_bound", "support_bound", "hybrid_bound"]


class BoundScratch:
    """Reusable buckets and per-member slack for the hybrid bound.

    One instance per worker; never shared.  ``buckets[i]`` collects the
    candidate neighbors of the pivot whose non-neighbor count in S is i.
    """

    def __init__(self, k: int):
        self.k = k
        self.buckets: list[list[int]] = [[] for _ in range(k)]
        self.sup: dict[int, int] = {}

    def reset(self, k: int) -> None:
        if k != self.k:
            self.k = k
            self.buckets = [[] for _ in range(k)]
        else:
            for b in self.buckets:
                b.clear()
        self.sup.clear()


def _deg_in_c(ctx, v: int) -> int:
    # d_v(S+C) minus d_v(S); the latter is |S| less v's non-neighbor count
    return int(ctx.deg_sc[v]) - (len(ctx.S) - int(ctx.nonnbr[v]))


def basic_bound(ctx, v: int) -> int:
    """|S| + k - nonneighbors(v, S) + degree(v, C)."""
    assert v in ctx.C, f"pivot {v} not in candidate set"
    return len(ctx.S) + ctx.k - int(ctx.nonnbr[v]) + _deg_in_c(ctx, v)


def _budget(ctx, v: int, tight: bool) -> int:
    k = ctx.k
    s = 0
    vmask = ctx.adj_mask[v]
    for w in ctx.S:
        slack = k - 1 - int(ctx.nonnbr[w])
        if tight and not (vmask >> w) & 1:
            slack -= 1
        s += slack
    return s


def support_bound(ctx, v: int, tight: bool = False) -> int:
    """Admit the cheapest candidate neighbors of v while the summed
    non-neighbor cost stays within the slack budget of S."""
    assert v in ctx.C, f"pivot {v} not in candidate set"
    costs = sorted(int(ctx.nonnbr[u]) for u in ctx.neighbors_in_c(v))
    budget = _budget(ctx, v, tight)
    admitted = 0
    for c in costs:
        if budget - c < 0:
            break
        budget -= c
        admitted += 1
    return len(ctx.S) + ctx.k - int(ctx.nonnbr[v]) + admitted


def hybrid_bound(ctx, v: int, scratch: BoundScratch | None = None,
                 tight: bool = False, _touches: list | None = None) -> int:
    """Bucket the candidate neighbors of v by non-neighbor cost, then admit
    them cheapest-first; a cost-i admission spends i budget and one unit of
    slack at its tightest non-neighbor in S, and is refused when that
    member has no slack left.

    Cost-0 vertices (fully adjacent to S) have no non-neighbor to charge
    and are admitted unconditionally.  Ties for the tightest member go to
    the lowest vertex ID.  ``_touches`` collects per-vertex visit counts
    for the complexity test.
    """
    assert v in ctx.C, f"pivot {v} not in candidate set"
    k = ctx.k
    if scratch is None:
        scratch = BoundScratch(k)
    scratch.reset(k)
    buckets, sup = scratch.buckets, scratch.sup

    touch = _touches.append if _touches is not None else None

    vmask = ctx.adj_mask[v]
    s = 0
    for w in ctx.S:
        slack = k - 1 - int(ctx.nonnbr[w])
        if tight and not (vmask >> w) & 1:
            slack -= 1
        sup[w] = slack
        s += slack
        if touch:
            touch(w)

    for u in ctx.neighbors_in_c(v):
        cost = int(ctx.nonnbr[u])
        assert cost <= k - 1, "candidate exceeds k-plex slack; C invariant broken"
        buckets[cost].append(u)
        if touch:
            touch(u)

    ub = len(ctx.S) + k - int(ctx.nonnbr[v])
    s_mask = ctx.s_mask
    done = False
    for cost in range(k):
        if done:
            break
        for u in buckets[cost]:
            if s < cost:
                done = True  # budget only shrinks; later buckets cost more
                break
            if touch:
                touch(u)
            if cost == 0:
                ub += 1
                continue
            rest = s_mask & ~ctx.adj_mask[u]
            wmin, smin = -1, None
            while rest:
                low = rest & -rest
                w = low.bit_length() - 1
                rest ^= low
                if touch:
                    touch(w)
                if smin is None or sup[w] < smin:
                    wmin, smin = w, sup[w]
            if smin is not None and smin > 0:
                ub += 1
                s -= cost
                sup[wmin] -= 1
    return ub
