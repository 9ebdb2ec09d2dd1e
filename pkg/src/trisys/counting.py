"""Exact counting engines.

Two independent routes to the same numbers:

* `brute_force_count` - the transparent oracle.  It sweeps every edge subset
  of the complete 3-graph on [n] (n <= 6, at most 2^20 subsets) and tests the
  predicate on each subset via exhaustively enumerated forbidden-pattern
  masks / crossing masks.  Counts are labeled by construction.
* `generate_isofree` - an orderly generator (canonical augmentation): one
  representative per isomorphism class, extended edge by edge; a child is
  kept only when the added edge lies in the automorphism orbit of the
  child's canonical deletion edge.  Labeled totals come from orbit weights
  n!/|Aut|.

The two must agree exactly; that equivalence is the package's main
correctness gate and is asserted in the test suite.
"""

from __future__ import annotations

import functools
import itertools
import math
from concurrent.futures import ProcessPoolExecutor
from dataclasses import dataclass
from typing import Iterator

import numpy as np

from . import patterns
from .core import (
    TripleSystem,
    UnsupportedSizeError,
    _canonical_scan,
    _rank_luts,
    all_triples,
    automorphisms,
    rank_of,
    slot_count,
    triple_rank,
)
from .partition import crossing_slot_mask, is_tripartite

#: The subset sweep is capped here (2^C(6,3) = 2^20 subsets).
BRUTE_FORCE_BOUND = 6

PREDICATES = ("all", "f5free", "k4mfree", "cancellative", "tripartite")


class SearchBudgetExceeded(ValueError):
    """Extremal search ran out of nodes; carries the best bound found so far."""

    def __init__(self, message: str, lower_bound: int):
        super().__init__(message)
        self.lower_bound = lower_bound


# -- forbidden-pattern masks over the complete 3-graph ----------------------


@functools.lru_cache(maxsize=None)
def f5_slot_patterns(n: int) -> tuple[int, ...]:
    """Slot masks (3 bits each) of every copy of the 5-vertex pattern in the
    complete 3-graph on n vertices."""
    pats = set()
    for u, v in itertools.combinations(range(n), 2):
        rest = [w for w in range(n) if w not in (u, v)]
        for x, y in itertools.combinations(rest, 2):
            for z in rest:
                if z in (x, y):
                    continue
                pats.add(
                    1 << rank_of((u, v, x))
                    | 1 << rank_of((u, v, y))
                    | 1 << rank_of((x, y, z))
                )
    return tuple(sorted(pats))


@functools.lru_cache(maxsize=None)
def k4minus_slot_patterns(n: int) -> tuple[int, ...]:
    """Slot masks of every 3-of-4-triples configuration on a 4-vertex set."""
    pats = set()
    for quad in itertools.combinations(range(n), 4):
        slots = [rank_of(t) for t in itertools.combinations(quad, 3)]
        for three in itertools.combinations(slots, 3):
            pats.add(1 << three[0] | 1 << three[1] | 1 << three[2])
    return tuple(sorted(pats))


@functools.lru_cache(maxsize=None)
def cancellation_slot_patterns(n: int) -> tuple[int, ...]:
    """Slot masks of every triple of distinct edges {A,B,C} with
    A ∪ B = A ∪ C for some role assignment (definitional scan)."""
    trips = all_triples(n)
    vmask = [1 << a | 1 << b | 1 << c for a, b, c in trips]
    pats = []
    for i, j, k in itertools.combinations(range(len(trips)), 3):
        for a, b, c in ((i, j, k), (j, i, k), (k, i, j)):
            if vmask[a] | vmask[b] == vmask[a] | vmask[c]:
                pats.append(1 << i | 1 << j | 1 << k)
                break
    return tuple(pats)


@functools.lru_cache(maxsize=None)
def tripartite_crossing_masks(n: int) -> tuple[int, ...]:
    """Distinct crossing-edge slot masks over all 3-labelings of [n],
    largest first (a system is tripartite iff it fits inside one of them)."""
    masks = {crossing_slot_mask(n, labels) for labels in itertools.product((0, 1, 2), repeat=n)}
    return tuple(sorted(masks, key=lambda m: (-m.bit_count(), m)))


def oracle_mask_flags(n: int, predicate: str, lo: int = 0, hi: int | None = None) -> np.ndarray:
    """Boolean vector over subset masks lo..hi-1: does the subset satisfy the
    predicate?  This is the oracle's per-subset test, vectorized."""
    nslots = slot_count(n)
    if hi is None:
        hi = 1 << nslots
    masks = np.arange(lo, hi, dtype=np.uint32)
    if predicate == "all":
        return np.ones(masks.size, dtype=bool)
    if predicate == "tripartite":
        ok = np.zeros(masks.size, dtype=bool)
        full = (1 << nslots) - 1
        for c in tripartite_crossing_masks(n):
            ok |= (masks & np.uint32(full ^ c)) == 0
        return ok
    if predicate == "f5free":
        pats = f5_slot_patterns(n)
    elif predicate == "k4mfree":
        pats = k4minus_slot_patterns(n)
    elif predicate == "cancellative":
        pats = cancellation_slot_patterns(n)
    else:
        raise ValueError(f"unknown predicate {predicate!r}")
    ok = np.ones(masks.size, dtype=bool)
    for p in pats:
        p32 = np.uint32(p)
        ok &= (masks & p32) != p32
    return ok


@dataclass(frozen=True)
class CountTable:
    """Exact labeled totals for (n, predicate), with a per-edge-count
    histogram of labeled systems; unlabeled class count optional."""

    n: int
    predicate: str
    labeled_total: int
    histogram: dict[int, int]
    unlabeled_total: int | None = None

    def rows(self) -> list[tuple[str, str]]:
        out = [("labeled_total", str(self.labeled_total))]
        if self.unlabeled_total is not None:
            out.append(("unlabeled_total", str(self.unlabeled_total)))
        for k in sorted(self.histogram):
            out.append((f"edges_{k}", str(self.histogram[k])))
        return out


def _oracle_shard(args: tuple) -> tuple[int, list[int]]:
    n, predicate, lo, hi = args
    ok = oracle_mask_flags(n, predicate, lo, hi)
    masks = np.arange(lo, hi, dtype=np.uint32)[ok]
    pops = np.bitwise_count(masks)
    hist = np.bincount(pops, minlength=slot_count(n) + 1)
    return int(ok.sum()), [int(v) for v in hist]


def brute_force_count(
    n: int,
    predicate: str,
    workers: int = 1,
    include_unlabeled: bool = False,
) -> CountTable:
    """Labeled counts by direct sweep over all 2^C(n,3) edge subsets.

    With workers > 1 the subset range is sharded; shard results are summed,
    so the table is identical for any worker count.
    """
    if predicate not in PREDICATES:
        raise ValueError(f"unknown predicate {predicate!r}")
    if n > BRUTE_FORCE_BOUND:
        raise UnsupportedSizeError(
            f"brute_force_count supports n <= {BRUTE_FORCE_BOUND}, got {n}"
        )
    total = 1 << slot_count(n)
    shards = max(1, min(workers, total))
    bounds = [total * i // shards for i in range(shards + 1)]
    jobs = [(n, predicate, bounds[i], bounds[i + 1]) for i in range(shards)]
    if shards == 1:
        results = [_oracle_shard(jobs[0])]
    else:
        with ProcessPoolExecutor(max_workers=shards) as pool:
            results = list(pool.map(_oracle_shard, jobs))
    labeled = sum(r[0] for r in results)
    hist_vec = [0] * (slot_count(n) + 1)
    for _, hv in results:
        for i, v in enumerate(hv):
            hist_vec[i] += v
    histogram = {k: v for k, v in enumerate(hist_vec) if v}

    unlabeled = None
    if include_unlabeled:
        keys = set()
        ok = oracle_mask_flags(n, predicate)
        for m in np.flatnonzero(ok):
            slots, _, _ = _canonical_scan(TripleSystem.from_mask(n, int(m)))
            keys.add(slots)
        unlabeled = len(keys)
    return CountTable(n, predicate, labeled, histogram, unlabeled)


# -- isomorph-free exhaustive generation -------------------------------------


@dataclass(frozen=True)
class EnumRecord:
    """One isomorphism class: canonical key, orbit data and predicate flags."""

    key: tuple
    edge_count: int
    aut_order: int
    f5free: bool
    k4mfree: bool
    cancellative: bool
    tripartite: bool
    system: TripleSystem

    @property
    def labeled_weight(self) -> int:
        return math.factorial(self.system.n) // self.aut_order

    @property
    def flags(self) -> dict[str, bool]:
        return {
            "f5free": self.f5free,
            "k4mfree": self.k4mfree,
            "cancellative": self.cancellative,
            "tripartite": self.tripartite,
        }


def _incremental_ok(g: TripleSystem, triple, predicate: str) -> bool:
    """Does g (= predicate-satisfying parent plus `triple`) still satisfy?"""
    if predicate == "all":
        return True
    if predicate == "f5free":
        return patterns.f5_through_edge(g, triple) is None
    if predicate == "k4mfree":
        return patterns.k4minus_through_edge(g, triple) is None
    if predicate == "cancellative":
        return patterns.cancellation_through_edge(g, triple) is None
    if predicate == "tripartite":
        return is_tripartite(g)
    raise ValueError(f"unknown predicate {predicate!r}")


@functools.lru_cache(maxsize=None)
def _slot_vertex_arrays(n: int):
    trips = np.array(all_triples(n), dtype=np.int32)
    return trips[:, 0], trips[:, 1], trips[:, 2]


def _perm_slot_images(n: int, perms: np.ndarray, slots: np.ndarray) -> np.ndarray:
    """Ranks of each slot's image under each permutation: (P, S) array."""
    c3, c2 = _rank_luts(n)
    ta, tb, tc = _slot_vertex_arrays(n)
    p = perms.astype(np.int32)
    pa, pb, pc = p[:, ta[slots]], p[:, tb[slots]], p[:, tc[slots]]
    low = np.minimum(np.minimum(pa, pb), pc)
    high = np.maximum(np.maximum(pa, pb), pc)
    mid = pa + pb + pc - low - high
    return c3[high] + c2[mid] + low


def _candidate_reps(h: TripleSystem, auts: np.ndarray) -> list[int]:
    """One representative (the orbit minimum) per Aut(h)-orbit of non-edges."""
    nslots = slot_count(h.n)
    non_edges = [r for r in range(nslots) if not h.has_slot(r)]
    if len(auts) == 1 or not non_edges:
        return non_edges
    imgs = _perm_slot_images(h.n, auts, np.array(non_edges, dtype=np.int64))
    orbmin = imgs.min(axis=0)
    return [r for r, m in zip(non_edges, orbmin) if m == r]


def _deletion_slot(g: TripleSystem, canon_slots, canon_perm: np.ndarray) -> int:
    """Slot of the edge mapping to the largest canonical slot under the
    canonical permutation."""
    smax = canon_slots[-1]
    perm = [int(v) for v in canon_perm]
    for a, b, c in g.edges:
        ia, ib, ic = sorted((perm[a], perm[b], perm[c]))
        if triple_rank(ia, ib, ic) == smax:
            return rank_of((a, b, c))
    raise AssertionError("canonical deletion edge not found")


def _make_record(h: TripleSystem, canon_slots, aut_order: int) -> EnumRecord:
    mask = 0
    for r in canon_slots:
        mask |= 1 << r
    rep = TripleSystem.from_mask(h.n, mask)
    return EnumRecord(
        key=(h.n, tuple(canon_slots)),
        edge_count=h.edge_count,
        aut_order=aut_order,
        f5free=patterns.contains_f5(h) is None,
        k4mfree=patterns.contains_k4minus(h) is None,
        cancellative=patterns.is_cancellative(h),
        tripartite=is_tripartite(h),
        system=rep,
    )


def generate_isofree(n: int, predicate: str) -> Iterator[EnumRecord]:
    """Yield exactly one representative per isomorphism class of
    predicate-satisfying systems on n vertices (canonical augmentation).

    The predicate must be hereditary (closed under edge deletion); the known
    hereditary predicates are exactly `PREDICATES`.
    """
    if predicate not in PREDICATES:
        raise ValueError(
            f"predicate {predicate!r} is not a registered hereditary predicate"
        )
    trips = all_triples(n)
    root = TripleSystem.from_mask(n, 0)
    root_auts = automorphisms(root)

    def grow(h: TripleSystem, canon_slots, auts: np.ndarray) -> Iterator[EnumRecord]:
        yield _make_record(h, canon_slots, len(auts))
        for r in _candidate_reps(h, auts):
            g = h.with_slot(r)
            if not _incremental_ok(g, trips[r], predicate):
                continue
            slots_g, perm_g, auts_g = _canonical_scan(g)
            d = _deletion_slot(g, slots_g, perm_g)
            orbit = _perm_slot_images(n, auts_g, np.array([d], dtype=np.int64))
            if r in set(int(v) for v in orbit[:, 0]):
                yield from grow(g, slots_g, auts_g)

    yield from grow(root, (), root_auts)


def labeled_total(records, n: int) -> int:
    """Sum of n!/|Aut| over pairwise non-isomorphic records."""
    fact = math.factorial(n)
    return sum(fact // rec.aut_order for rec in records)


def table_from_records(n: int, predicate: str, records) -> CountTable:
    """Aggregate generator output into the same table shape the oracle emits."""
    fact = math.factorial(n)
    hist: dict[int, int] = {}
    total = 0
    classes = 0
    for rec in records:
        w = fact // rec.aut_order
        total += w
        classes += 1
        hist[rec.edge_count] = hist.get(rec.edge_count, 0) + w
    return CountTable(n, predicate, total, hist, classes)


# -- extremal numbers --------------------------------------------------------

EXTREMAL_BOUND = 7
_EXTREMAL_PREDICATES = ("f5free", "cancellative", "k4mfree")


def extremal_number(
    n: int,
    predicate: str,
    node_budget: int = 20_000_000,
    return_witness: bool = False,
):
    """Maximum edge count of a predicate-satisfying system on n vertices.

    Branch and bound over triples in colex order with incremental forbidden-
    configuration checks; prunes when even taking every remaining slot cannot
    beat the incumbent.  Raises SearchBudgetExceeded (carrying the best lower
    bound found) if the node budget runs out.
    """
    if predicate not in _EXTREMAL_PREDICATES:
        raise ValueError(
            f"extremal search supports {_EXTREMAL_PREDICATES}, got {predicate!r}"
        )
    if n > EXTREMAL_BOUND:
        raise UnsupportedSizeError(f"extremal search supports n <= {EXTREMAL_BOUND}")
    trips = all_triples(n)
    nslots = slot_count(n)

    # greedy colex fill for the initial incumbent
    greedy = TripleSystem.from_mask(n, 0)
    for r in range(nslots):
        cand = greedy.with_slot(r)
        if _incremental_ok(cand, trips[r], predicate):
            greedy = cand
    best = greedy.edge_count
    best_mask = greedy.mask
    nodes = 0

    def descend(i: int, g: TripleSystem, count: int):
        nonlocal best, best_mask, nodes
        nodes += 1
        if nodes > node_budget:
            raise SearchBudgetExceeded(
                f"budget {node_budget} exhausted; best found {best}", best
            )
        if count + (nslots - i) <= best:
            return
        if i == nslots:
            best = count
            best_mask = g.mask
            return
        g2 = g.with_slot(i)
        if _incremental_ok(g2, trips[i], predicate):
            descend(i + 1, g2, count + 1)
        descend(i + 1, g, count)

    descend(0, TripleSystem.from_mask(n, 0), 0)
    if return_witness:
        return best, TripleSystem.from_mask(n, best_mask)
    return best
