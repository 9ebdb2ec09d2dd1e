"""Core representation of triple systems (3-uniform hypergraphs).

A system on n vertices is stored as a bitmask over the C(n,3) possible
triples, indexed by colex rank, so containment tests and subset scans are
single integer operations.  Vertices are 0-indexed everywhere in the API;
the text file format (see `parse`/`serialize`) is 1-indexed.
"""

from __future__ import annotations

import functools
import itertools
import math
from dataclasses import dataclass

import numpy as np

#: Hard cap on vertex count; dense bitmask storage is not meant to scale past this.
MAX_VERTICES = 64

#: Largest n for which canonicalization (minimum over all n! relabelings) is supported.
CANONICAL_BOUND = 10

#: Permutation rows processed per chunk during canonical scans.
_SCAN_CHUNK = 250_000


class ParseError(ValueError):
    """Malformed system file; carries the 1-based offending line number."""

    def __init__(self, lineno: int, message: str):
        super().__init__(f"line {lineno}: {message}")
        self.lineno = lineno


class UnsupportedSizeError(ValueError):
    """Requested operation exceeds its configured size bound."""


@functools.lru_cache(maxsize=None)
def all_triples(n: int) -> tuple[tuple[int, int, int], ...]:
    """All 3-subsets of range(n), listed in colex order.

    The colex rank of a triple a<b<c is C(c,3)+C(b,2)+a, so the list index
    equals the rank.
    """
    return tuple((a, b, c) for c in range(2, n) for b in range(1, c) for a in range(b))


def slot_count(n: int) -> int:
    return math.comb(n, 3)


def triple_rank(a: int, b: int, c: int) -> int:
    """Colex rank of the triple a<b<c."""
    return math.comb(c, 3) + math.comb(b, 2) + a


def rank_of(triple: tuple[int, int, int]) -> int:
    a, b, c = sorted(triple)
    return triple_rank(a, b, c)


class TripleSystem:
    """Immutable 3-graph on vertices 0..n-1.

    Equality and hashing go through (n, mask); all derived views are computed
    on demand.
    """

    __slots__ = ("n", "mask")

    def __init__(self, n: int, edges: "tuple | list | set" = ()):
        if not 1 <= n <= MAX_VERTICES:
            raise ValueError(f"vertex count must be in 1..{MAX_VERTICES}, got {n}")
        object.__setattr__(self, "n", n)
        mask = 0
        for e in edges:
            t = tuple(e)
            if len(t) != 3 or len(set(t)) != 3:
                raise ValueError(f"edge {t} is not a 3-set of distinct vertices")
            if not all(0 <= v < n for v in t):
                raise ValueError(f"edge {t} has a vertex outside 0..{n - 1}")
            r = rank_of(t)
            if mask >> r & 1:
                raise ValueError(f"duplicate edge {tuple(sorted(t))}")
            mask |= 1 << r
        object.__setattr__(self, "mask", mask)

    def __setattr__(self, *_):
        raise AttributeError("TripleSystem is immutable")

    @classmethod
    def from_mask(cls, n: int, mask: int) -> "TripleSystem":
        """Trusted fast constructor from a slot bitmask."""
        if not 1 <= n <= MAX_VERTICES:
            raise ValueError(f"vertex count must be in 1..{MAX_VERTICES}, got {n}")
        if mask < 0 or mask >> slot_count(n):
            raise ValueError("mask has bits outside the triple range")
        obj = cls.__new__(cls)
        object.__setattr__(obj, "n", n)
        object.__setattr__(obj, "mask", mask)
        return obj

    # -- basic views ------------------------------------------------------

    @property
    def edges(self) -> tuple[tuple[int, int, int], ...]:
        """Edges as sorted triples, in colex order."""
        trips = all_triples(self.n)
        m = self.mask
        out = []
        while m:
            low = m & -m
            out.append(trips[low.bit_length() - 1])
            m ^= low
        return tuple(out)

    @property
    def edge_count(self) -> int:
        return self.mask.bit_count()

    def has_edge(self, triple) -> bool:
        return bool(self.mask >> rank_of(triple) & 1)

    def has_slot(self, rank: int) -> bool:
        return bool(self.mask >> rank & 1)

    def with_slot(self, rank: int) -> "TripleSystem":
        return TripleSystem.from_mask(self.n, self.mask | 1 << rank)

    def without_slot(self, rank: int) -> "TripleSystem":
        return TripleSystem.from_mask(self.n, self.mask & ~(1 << rank))

    def degrees(self) -> tuple[int, ...]:
        deg = [0] * self.n
        for a, b, c in self.edges:
            deg[a] += 1
            deg[b] += 1
            deg[c] += 1
        return tuple(deg)

    def link_pair(self, u: int, v: int) -> frozenset[int]:
        """Vertices w with {u,v,w} an edge (no partition involved)."""
        if u == v:
            raise ValueError("link_pair needs two distinct vertices")
        out = []
        for w in range(self.n):
            if w != u and w != v and self.has_edge((u, v, w)):
                out.append(w)
        return frozenset(out)

    def pair_link_masks(self) -> dict[tuple[int, int], int]:
        """For every pair u<v appearing in an edge, a vertex bitmask of its link."""
        links: dict[tuple[int, int], int] = {}
        for a, b, c in self.edges:
            links[a, b] = links.get((a, b), 0) | 1 << c
            links[a, c] = links.get((a, c), 0) | 1 << b
            links[b, c] = links.get((b, c), 0) | 1 << a
        return links

    # -- dunder plumbing ---------------------------------------------------

    def __eq__(self, other):
        return (
            isinstance(other, TripleSystem)
            and self.n == other.n
            and self.mask == other.mask
        )

    def __hash__(self):
        return hash((self.n, self.mask))

    def __repr__(self):
        return f"TripleSystem(n={self.n}, edges={list(self.edges)})"


# -- file format -----------------------------------------------------------


def parse(text: str) -> TripleSystem:
    """Parse the text system format: header "n m", then m lines "a b c".

    Vertices are 1-indexed in the file and must satisfy a < b < c.  Errors
    report the offending 1-based line number.
    """
    lines = text.splitlines()
    if not lines:
        raise ParseError(1, "missing header")
    header = lines[0].split()
    if len(header) != 2:
        raise ParseError(1, f"header must be 'n m', got {lines[0]!r}")
    try:
        n, m = int(header[0]), int(header[1])
    except ValueError:
        raise ParseError(1, f"header must be two integers, got {lines[0]!r}") from None
    if not 1 <= n <= MAX_VERTICES:
        raise ParseError(1, f"vertex count {n} outside 1..{MAX_VERTICES}")
    if m < 0:
        raise ParseError(1, f"negative edge count {m}")

    mask = 0
    seen = 0
    for lineno, raw in enumerate(lines[1:], start=2):
        if not raw.strip():
            continue
        if seen == m:
            raise ParseError(lineno, f"more than {m} edge lines")
        parts = raw.split()
        if len(parts) != 3:
            raise ParseError(lineno, f"non-3-uniform line: {raw.strip()!r}")
        try:
            a, b, c = (int(p) for p in parts)
        except ValueError:
            raise ParseError(lineno, f"non-integer vertex in {raw.strip()!r}") from None
        if len({a, b, c}) != 3:
            raise ParseError(lineno, f"non-3-uniform line: {raw.strip()!r}")
        if not (1 <= a and c <= n):
            raise ParseError(lineno, f"vertex out of range 1..{n} in {raw.strip()!r}")
        if not a < b < c:
            raise ParseError(lineno, f"vertices must be increasing in {raw.strip()!r}")
        r = triple_rank(a - 1, b - 1, c - 1)
        if mask >> r & 1:
            raise ParseError(lineno, f"duplicate edge {a} {b} {c}")
        mask |= 1 << r
        seen += 1
    if seen != m:
        raise ParseError(len(lines) + 1, f"expected {m} edges, found {seen}")
    return TripleSystem.from_mask(n, mask)


def serialize(h: TripleSystem) -> str:
    """Inverse of `parse`; edges emitted 1-indexed in colex order."""
    out = [f"{h.n} {h.edge_count}"]
    for a, b, c in h.edges:
        out.append(f"{a + 1} {b + 1} {c + 1}")
    return "\n".join(out) + "\n"


# -- relabeling and canonical forms -----------------------------------------


def relabel(h: TripleSystem, perm) -> TripleSystem:
    """Apply a vertex permutation (perm[old] = new)."""
    if sorted(perm) != list(range(h.n)):
        raise ValueError("perm must be a permutation of range(n)")
    mask = 0
    for a, b, c in h.edges:
        mask |= 1 << rank_of((perm[a], perm[b], perm[c]))
    return TripleSystem.from_mask(h.n, mask)


@dataclass(frozen=True)
class CanonicalForm:
    """Relabeling-invariant key plus automorphism group order.

    key = (n, slots) where slots is the colex-rank tuple of the
    lexicographically minimal edge list over all vertex relabelings.
    """

    key: tuple
    aut_order: int


@functools.lru_cache(maxsize=4)
def _perm_table(n: int) -> np.ndarray:
    """(n!, n) array of all vertex permutations, rows in lexicographic order."""
    return np.array(list(itertools.permutations(range(n))), dtype=np.uint8)


@functools.lru_cache(maxsize=None)
def _rank_luts(n: int) -> tuple[np.ndarray, np.ndarray]:
    c3 = np.array([math.comb(v, 3) for v in range(n)], dtype=np.int32)
    c2 = np.array([math.comb(v, 2) for v in range(n)], dtype=np.int32)
    return c3, c2


def _canonical_scan(h: TripleSystem):
    """Full scan over all n! relabelings of h.

    Returns (canon_slots, canon_perm, auts): the minimal sorted slot tuple,
    one permutation achieving it, and the (A, n) array of automorphisms.
    """
    n = h.n
    if n > CANONICAL_BOUND:
        raise UnsupportedSizeError(
            f"canonicalization supports n <= {CANONICAL_BOUND}, got {n}"
        )
    perms = _perm_table(n)
    if h.mask == 0:
        return (), perms[0], perms
    edges = np.array(h.edges, dtype=np.int64)
    ea, eb, ec = edges[:, 0], edges[:, 1], edges[:, 2]
    orig = np.sort(
        np.array([triple_rank(a, b, c) for a, b, c in h.edges], dtype=np.int32)
    )
    c3, c2 = _rank_luts(n)

    best_row = None
    best_idx = -1
    aut_chunks = []
    for lo in range(0, len(perms), _SCAN_CHUNK):
        chunk = perms[lo : lo + _SCAN_CHUNK].astype(np.int32)
        pa, pb, pc = chunk[:, ea], chunk[:, eb], chunk[:, ec]
        low = np.minimum(np.minimum(pa, pb), pc)
        high = np.maximum(np.maximum(pa, pb), pc)
        mid = pa + pb + pc - low - high
        ranks = c3[high] + c2[mid] + low
        ranks.sort(axis=1)
        auts = np.flatnonzero(np.all(ranks == orig, axis=1))
        if auts.size:
            aut_chunks.append(auts + lo)
        idx = np.lexsort(ranks.T[::-1])[0]
        cand = tuple(int(v) for v in ranks[idx])
        if best_row is None or cand < best_row:
            best_row = cand
            best_idx = lo + int(idx)
    aut_rows = np.concatenate(aut_chunks)
    return best_row, perms[best_idx], perms[aut_rows]


def canonical_form(h: TripleSystem, bound: int = CANONICAL_BOUND) -> CanonicalForm:
    """Canonical key and automorphism-group order (minimum over relabelings)."""
    if h.n > bound:
        raise UnsupportedSizeError(f"canonicalization bound is {bound}, got n={h.n}")
    slots, _, auts = _canonical_scan(h)
    return CanonicalForm(key=(h.n, slots), aut_order=len(auts))


def automorphisms(h: TripleSystem) -> np.ndarray:
    """All vertex permutations fixing the edge set, as an (A, n) array."""
    _, _, auts = _canonical_scan(h)
    return auts


def canonical_representative(h: TripleSystem) -> TripleSystem:
    """The canonically relabeled copy of h (same for all isomorphic systems)."""
    slots, _, _ = _canonical_scan(h)
    mask = 0
    for r in slots:
        mask |= 1 << r
    return TripleSystem.from_mask(h.n, mask)


def labeled_count(h: TripleSystem) -> int:
    """Number of labeled copies of h on its own vertex set: n! / |Aut(h)|."""
    form = canonical_form(h)
    return math.factorial(h.n) // form.aut_order


def is_isomorphic(a: TripleSystem, b: TripleSystem) -> bool:
    """True iff some vertex bijection maps edges(a) onto edges(b)."""
    if a.n != b.n or a.edge_count != b.edge_count:
        return False
    if sorted(a.degrees()) != sorted(b.degrees()):
        return False
    return canonical_form(a).key == canonical_form(b).key
