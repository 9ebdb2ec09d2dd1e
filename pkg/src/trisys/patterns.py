"""Forbidden-configuration detectors and the cancellative property.

Two 3-edge configurations are special throughout the package:

* the 5-vertex pattern {uvx, uvy, xyz} (two edges sharing a pair, plus an
  edge on the two apexes and a fifth vertex), and
* three of the four triples on a common 4-vertex set.

A system is cancellative when no three distinct edges A, B, C satisfy
A ∪ B = A ∪ C with B != C; `is_cancellative` checks that definition
directly, independently of the two detectors, so the classical
equivalence between the notions can be tested rather than assumed.
"""

from __future__ import annotations

import itertools
from dataclasses import dataclass, field

from .core import TripleSystem

F5 = "F5"
K4_MINUS = "K4minus"
CANCELLATION = "CancellationViolation"
FORCED_PAIR = "ForcedPair"


@dataclass(frozen=True)
class PatternHit:
    """A witnessed occurrence of a forbidden configuration.

    `edges` are edges of the tested system realizing the pattern; `detail`
    carries pattern-specific vertices (e.g. the shared pair and apexes).
    """

    kind: str
    edges: tuple[tuple[int, int, int], ...]
    detail: dict = field(default_factory=dict, compare=False)


def is_f5_shape(e1, e2, e3) -> dict | None:
    """Check whether three triples form the 5-vertex two-pair-one-apex shape.

    Returns the role assignment {u, v, x, y, z} or None.  Pure shape test on
    the given triples; used both by the detectors and to re-validate
    witnesses independently.
    """
    for a, b, c in itertools.permutations((frozenset(e1), frozenset(e2), frozenset(e3))):
        shared = a & b
        if len(shared) != 2:
            continue
        xs = a - shared
        ys = b - shared
        if not xs or not ys:
            continue
        (x,) = xs
        (y,) = ys
        rest = c - {x, y}
        if {x, y} <= c and len(rest) == 1:
            (z,) = rest
            if z not in shared and len(a | b | c) == 5:
                u, v = sorted(shared)
                return {"u": u, "v": v, "x": x, "y": y, "z": z}
    return None


def is_k4minus_shape(e1, e2, e3) -> frozenset | None:
    """Return the 4-vertex support if the three distinct triples live on 4 vertices."""
    s1, s2, s3 = frozenset(e1), frozenset(e2), frozenset(e3)
    if len({s1, s2, s3}) != 3:
        return None
    support = s1 | s2 | s3
    return support if len(support) == 4 else None


def contains_f5(h: TripleSystem) -> PatternHit | None:
    """Exhaustive search for the 5-vertex pattern, organized per shared pair."""
    links = h.pair_link_masks()
    for (u, v), link in links.items():
        if link.bit_count() < 2:
            continue
        blocked = 1 << u | 1 << v
        for a, b, c in h.edges:
            ebits = 1 << a | 1 << b | 1 << c
            if ebits & blocked:
                continue
            common = ebits & link
            if common.bit_count() >= 2:
                inside = [w for w in (a, b, c) if common >> w & 1]
                x, y = inside[0], inside[1]
                z = next(w for w in (a, b, c) if w not in (x, y))
                return PatternHit(
                    kind=F5,
                    edges=(
                        tuple(sorted((u, v, x))),
                        tuple(sorted((u, v, y))),
                        (a, b, c),
                    ),
                    detail={"u": u, "v": v, "x": x, "y": y, "z": z},
                )
    return None


def contains_k4minus(h: TripleSystem) -> PatternHit | None:
    """Witness iff some 4 vertices carry at least 3 of their 4 triples."""
    for quad in itertools.combinations(range(h.n), 4):
        present = [t for t in itertools.combinations(quad, 3) if h.has_edge(t)]
        if len(present) >= 3:
            return PatternHit(
                kind=K4_MINUS, edges=tuple(present[:3]), detail={"support": quad}
            )
    return None


def find_cancellation_violation(h: TripleSystem) -> PatternHit | None:
    """Direct definitional scan: distinct edges A, B, C with A∪B = A∪C, B != C."""
    edges = h.edges
    masks = [1 << a | 1 << b | 1 << c for a, b, c in edges]
    m = len(edges)
    for i in range(m):
        for j in range(m):
            if j == i:
                continue
            union_ij = masks[i] | masks[j]
            for k in range(j + 1, m):
                if k == i:
                    continue
                if union_ij == masks[i] | masks[k]:
                    return PatternHit(
                        kind=CANCELLATION,
                        edges=(edges[i], edges[j], edges[k]),
                        detail={"A": edges[i], "B": edges[j], "C": edges[k]},
                    )
    return None


def is_cancellative(h: TripleSystem) -> bool:
    """A ∪ B = A ∪ C forces B = C over all ordered choices of distinct edges."""
    return find_cancellation_violation(h) is None


def forced_pair_violation(h: TripleSystem, e) -> PatternHit | None:
    """Given an edge e = {x,y,z} of h, find a pair (u,v) disjoint from e with
    both {x,u,v} and {y,u,v} edges, for some two vertices x, y of e.

    Equivalently: a copy of the 5-vertex pattern through e in the apex role.
    """
    e = tuple(sorted(e))
    if not h.has_edge(e):
        raise ValueError(f"edge {e} is not in the system")
    ebits = 1 << e[0] | 1 << e[1] | 1 << e[2]
    links = h.pair_link_masks()
    for (u, v), link in links.items():
        if (1 << u | 1 << v) & ebits:
            continue
        inside = link & ebits
        if inside.bit_count() >= 2:
            x, y = [w for w in e if inside >> w & 1][:2]
            return PatternHit(
                kind=FORCED_PAIR,
                edges=(tuple(sorted((x, u, v))), tuple(sorted((y, u, v))), e),
                detail={"u": u, "v": v, "x": x, "y": y},
            )
    return None


def f5_through_edge(h: TripleSystem, e) -> PatternHit | None:
    """Any copy of the 5-vertex pattern that uses edge e, in any of its roles.

    This is the incremental check used when an edge is added to a system
    already known to be pattern-free: e as the apex edge is exactly
    `forced_pair_violation`; e in a shared-pair role needs a partner edge
    through one of e's pairs plus an apex edge.
    """
    e = tuple(sorted(e))
    if not h.has_edge(e):
        raise ValueError(f"edge {e} is not in the system")
    hit = forced_pair_violation(h, e)
    if hit is not None:
        return PatternHit(kind=F5, edges=hit.edges, detail=hit.detail)
    links = h.pair_link_masks()
    for u, v in itertools.combinations(e, 2):
        x = next(w for w in e if w not in (u, v))
        link = links.get((u, v), 0)
        for y in range(h.n):
            if y == x or not link >> y & 1:
                continue
            # need an apex edge {x, y, z} with z outside {u, v, x, y}
            for z in range(h.n):
                if z in (u, v, x, y):
                    continue
                if h.has_edge((x, y, z)):
                    return PatternHit(
                        kind=F5,
                        edges=(e, tuple(sorted((u, v, y))), tuple(sorted((x, y, z)))),
                        detail={"u": u, "v": v, "x": x, "y": y, "z": z},
                    )
    return None


def k4minus_through_edge(h: TripleSystem, e) -> PatternHit | None:
    """A 4-set containing e that carries >= 3 triples (incremental check)."""
    e = tuple(sorted(e))
    if not h.has_edge(e):
        raise ValueError(f"edge {e} is not in the system")
    for w in range(h.n):
        if w in e:
            continue
        quad = tuple(sorted(e + (w,)))
        present = [t for t in itertools.combinations(quad, 3) if h.has_edge(t)]
        if len(present) >= 3:
            return PatternHit(
                kind=K4_MINUS, edges=tuple(present[:3]), detail={"support": quad}
            )
    return None


def cancellation_through_edge(h: TripleSystem, e) -> PatternHit | None:
    """Cancellation violation involving edge e (valid incremental check when
    the system minus e is known cancellative)."""
    e = tuple(sorted(e))
    if not h.has_edge(e):
        raise ValueError(f"edge {e} is not in the system")
    emask = 1 << e[0] | 1 << e[1] | 1 << e[2]
    others = [t for t in h.edges if t != e]
    masks = [1 << a | 1 << b | 1 << c for a, b, c in others]
    m = len(others)
    # e in the A role
    for j in range(m):
        for k in range(j + 1, m):
            if emask | masks[j] == emask | masks[k]:
                return PatternHit(
                    kind=CANCELLATION,
                    edges=(e, others[j], others[k]),
                    detail={"A": e, "B": others[j], "C": others[k]},
                )
    # e in the B (or C) role
    for i in range(m):
        for k in range(m):
            if k == i:
                continue
            if masks[i] | emask == masks[i] | masks[k]:
                return PatternHit(
                    kind=CANCELLATION,
                    edges=(others[i], e, others[k]),
                    detail={"A": others[i], "B": e, "C": others[k]},
                )
    return None
