"""3-partitions of triple systems: crossing classification, exact optimal
partitions, tripartiteness, link structures, and partition recovery.

An edge is crossing for a partition when it has exactly one vertex in each
part; the optimal partition minimizes the number of non-crossing ("bad")
edges.  Parts may be empty: the minimum is taken over all 3-labelings.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

from .core import TripleSystem, UnsupportedSizeError, all_triples

#: Exhaustive labeling scan is used up to this many vertices.
EXACT_BOUND = 15
#: Branch-and-bound handles sizes above EXACT_BOUND up to this cap.
BNB_BOUND = 24

_CHUNK = 1 << 18


@dataclass(frozen=True)
class Partition3:
    """Total labeling of vertices 0..n-1 into parts {0,1,2} (parts may be empty)."""

    labels: tuple[int, ...]

    def __post_init__(self):
        if not self.labels:
            raise ValueError("partition needs at least one vertex")
        if any(l not in (0, 1, 2) for l in self.labels):
            raise ValueError("labels must be 0, 1 or 2")

    @property
    def n(self) -> int:
        return len(self.labels)

    def parts(self) -> tuple[tuple[int, ...], tuple[int, ...], tuple[int, ...]]:
        out: tuple[list[int], list[int], list[int]] = ([], [], [])
        for v, l in enumerate(self.labels):
            out[l].append(v)
        return tuple(tuple(p) for p in out)

    @classmethod
    def from_parts(cls, n: int, p0, p1, p2) -> "Partition3":
        labels = [-1] * n
        for part, vs in enumerate((p0, p1, p2)):
            for v in vs:
                if labels[v] != -1:
                    raise ValueError(f"vertex {v} assigned twice")
                labels[v] = part
        if -1 in labels:
            raise ValueError("every vertex needs a part")
        return cls(tuple(labels))

    def as_sets(self) -> frozenset[frozenset[int]]:
        """Unordered view (for comparisons up to part renaming)."""
        return frozenset(frozenset(p) for p in self.parts() if p)


@dataclass(frozen=True)
class PartitionResult:
    partition: Partition3
    bad_count: int
    optimal: bool


@dataclass(frozen=True)
class LinkSet:
    """Third-part link of a vertex pair; empty with same_part=True when the
    two query vertices share a part."""

    vertices: frozenset[int]
    same_part: bool


@dataclass(frozen=True)
class LinkProfile:
    """Edge counts through one vertex, keyed by the (sorted) part pair of the
    other two vertices."""

    vertex: int
    counts: dict

    @property
    def degree(self) -> int:
        return sum(self.counts.values())


def is_crossing(edge, labels) -> bool:
    a, b, c = edge
    return {labels[a], labels[b], labels[c]} == {0, 1, 2}


def non_crossing_count(h: TripleSystem, p: Partition3) -> int:
    """Number of edges without exactly one vertex in each part."""
    if p.n != h.n:
        raise ValueError("partition and system sizes differ")
    labels = p.labels
    return sum(1 for e in h.edges if not is_crossing(e, labels))


def crossing_slot_mask(n: int, labels) -> int:
    """Bitmask over colex triple slots of the edges crossing for `labels`."""
    mask = 0
    for r, (a, b, c) in enumerate(all_triples(n)):
        if {labels[a], labels[b], labels[c]} == {0, 1, 2}:
            mask |= 1 << r
    return mask


def _base3_digits(idx: np.ndarray, width: int) -> np.ndarray:
    """Big-endian base-3 digits of each index: row order = lex order of labels."""
    out = np.empty((idx.size, width), dtype=np.int8)
    rem = idx.copy()
    for pos in range(width - 1, -1, -1):
        out[:, pos] = rem % 3
        rem //= 3
    return out


def _optimal_exhaustive(h: TripleSystem) -> tuple[tuple[int, ...], int]:
    """Scan all labelings with vertex 0 in part 0 and the first vertex outside
    part 0 (if any) in part 1; returns the lexicographically first minimizer."""
    n = h.n
    edges = np.array(h.edges, dtype=np.int64) if h.edge_count else None
    total = 3 ** (n - 1)
    best_bad = h.edge_count + 1
    best_labels: tuple[int, ...] | None = None
    for lo in range(0, total, _CHUNK):
        idx = np.arange(lo, min(lo + _CHUNK, total), dtype=np.int64)
        digits = _base3_digits(idx, n - 1)
        labels = np.concatenate(
            [np.zeros((idx.size, 1), dtype=np.int8), digits], axis=1
        )
        # canonical representatives only: first non-0 label must be 1
        nz = labels != 0
        has_nz = nz.any(axis=1)
        first = np.argmax(nz, axis=1)
        keep = ~has_nz | (labels[np.arange(idx.size), first] == 1)

        if edges is None:
            bad = np.zeros(idx.size, dtype=np.int32)
        else:
            la = labels[:, edges[:, 0]]
            lb = labels[:, edges[:, 1]]
            lc = labels[:, edges[:, 2]]
            crossing = (la != lb) & (lb != lc) & (la != lc)
            bad = (~crossing).sum(axis=1, dtype=np.int32)
        bad[~keep] = best_bad + 1
        pos = int(np.argmin(bad))
        if bad[pos] < best_bad:
            best_bad = int(bad[pos])
            best_labels = tuple(int(v) for v in labels[pos])
            if best_bad == 0:
                break
    assert best_labels is not None
    return best_labels, best_bad


def _optimal_bnb(h: TripleSystem) -> tuple[tuple[int, ...], int]:
    """Depth-first search over canonical labelings with an admissible bound:
    bad edges among fully-assigned triples only."""
    n = h.n
    edges_by_max: list[list[tuple[int, int]]] = [[] for _ in range(n)]
    for a, b, c in h.edges:
        edges_by_max[c].append((a, b))
    labels = [0] * n
    best_bad = h.edge_count + 1
    best_labels: tuple[int, ...] | None = None

    def descend(v: int, bad: int, max_used: int):
        nonlocal best_bad, best_labels
        if bad >= best_bad:
            return
        if v == n:
            best_bad = bad
            best_labels = tuple(labels)
            return
        for lab in range(min(max_used + 2, 3)):
            labels[v] = lab
            extra = 0
            for a, b in edges_by_max[v]:
                if {labels[a], labels[b], lab} != {0, 1, 2}:
                    extra += 1
            descend(v + 1, bad + extra, max(max_used, lab))
        labels[v] = 0

    descend(0, 0, -1)
    assert best_labels is not None
    return best_labels, best_bad


def optimal_partition(h: TripleSystem) -> PartitionResult:
    """Globally minimal non-crossing count, with the lexicographically
    smallest label vector among minimizers."""
    if h.n <= EXACT_BOUND:
        labels, bad = _optimal_exhaustive(h)
    elif h.n <= BNB_BOUND:
        labels, bad = _optimal_bnb(h)
    else:
        raise UnsupportedSizeError(
            f"optimal_partition supports n <= {BNB_BOUND}, got {h.n}"
        )
    return PartitionResult(Partition3(labels), bad, optimal=True)


def is_tripartite(h: TripleSystem) -> bool:
    """Early-exit search for a partition with every edge crossing."""
    n = h.n
    edges_by_max: list[list[tuple[int, int]]] = [[] for _ in range(n)]
    for a, b, c in h.edges:
        edges_by_max[c].append((a, b))
    labels = [0] * n

    def descend(v: int, max_used: int) -> bool:
        if v == n:
            return True
        for lab in range(min(max_used + 2, 3)):
            labels[v] = lab
            if all(
                {labels[a], labels[b], lab} == {0, 1, 2} for a, b in edges_by_max[v]
            ):
                if descend(v + 1, max(max_used, lab)):
                    return True
        return False

    return descend(0, -1)


def link(h: TripleSystem, p: Partition3, u: int, v: int) -> LinkSet:
    """Vertices w in the remaining part with {u,v,w} an edge."""
    if u == v:
        raise ValueError("link needs two distinct vertices")
    lu, lv = p.labels[u], p.labels[v]
    if lu == lv:
        return LinkSet(frozenset(), same_part=True)
    third = 3 - lu - lv
    members = [
        w
        for w in range(h.n)
        if p.labels[w] == third and w not in (u, v) and h.has_edge((u, v, w))
    ]
    return LinkSet(frozenset(members), same_part=False)


def link_profile(h: TripleSystem, p: Partition3, x: int) -> LinkProfile:
    """Count edges through x by the part pair of their other two vertices."""
    counts = {(i, j): 0 for i in range(3) for j in range(i, 3)}
    for a, b, c in h.edges:
        if x not in (a, b, c):
            continue
        others = [w for w in (a, b, c) if w != x]
        i, j = sorted((p.labels[others[0]], p.labels[others[1]]))
        counts[i, j] += 1
    return LinkProfile(vertex=x, counts=counts)


def recover_partition(h: TripleSystem) -> Partition3 | None:
    """Rebuild a tripartition from link structure alone.

    Seed with the first edge: its two smallest vertices get parts 0 and 1 and
    their pair link goes to part 2; propagate one round through the links of
    the seed vertices; place every remaining vertex in the part maximizing
    its crossing-edge evidence.  Returns None on conflict, ambiguity, or if
    any edge ends up non-crossing.
    """
    if h.edge_count == 0:
        raise ValueError("recover_partition needs a nonempty system")
    n = h.n
    links = h.pair_link_masks()

    def link_verts(a: int, b: int) -> tuple[int, ...]:
        m = links.get((min(a, b), max(a, b)), 0)
        return tuple(w for w in range(n) if m >> w & 1)

    labels: dict[int, int] = {}

    def assign(v: int, part: int) -> bool:
        if labels.get(v, part) != part:
            return False
        labels[v] = part
        return True

    u, v, _ = h.edges[0]
    assign(u, 0)
    if not assign(v, 1):
        return None
    seed_link = link_verts(u, v)
    for w in seed_link:
        if not assign(w, 2):
            return None
    for w in seed_link:
        for y in link_verts(u, w):
            if not assign(y, 1):
                return None
        for y in link_verts(v, w):
            if not assign(y, 0):
                return None

    placed = dict(labels)
    for z in range(n):
        if z in placed:
            continue
        evidence = [0, 0, 0]
        for a, b, c in h.edges:
            if z not in (a, b, c):
                continue
            others = [w for w in (a, b, c) if w != z]
            pa, pb = placed.get(others[0]), placed.get(others[1])
            if pa is None or pb is None or pa == pb:
                continue
            evidence[3 - pa - pb] += 1
        top = max(evidence)
        if top == 0 or evidence.count(top) > 1:
            return None
        labels[z] = evidence.index(top)

    if len(labels) != n:
        return None
    result = Partition3(tuple(labels[v] for v in range(n)))
    if non_crossing_count(h, result) != 0:
        return None
    return result
