"""Randomized verification laboratory.

Samplers and experiments are pure functions of (parameters, seed).  The
pseudo-random source is numpy's PCG64 seeded through SeedSequence; a run
with k independent units (trials, sub-samples) uses the child streams
SeedSequence(seed, spawn_key=(0,)) .. spawn_key=(k-1,)), so results are
bit-for-bit reproducible and independent of scheduling or worker count.

Universal statements quantified over exponentially many subsets (the lower-
density conditions) are handled honestly: "verified" only ever means an
exhaustive scan finished without a counterexample, "sampled-pass" means a
refutation search failed, and every refutation carries a witness that
re-validates against the defining inequality.
"""

from __future__ import annotations

import functools
import math
from dataclasses import dataclass, field
from fractions import Fraction

import numpy as np

from . import cache as cache_mod
from .core import TripleSystem, all_triples
from .formulas import balanced_split, chernoff_bound
from .partition import Partition3, link_profile, optimal_partition, recover_partition
from .report import RunReport


def child_rng(seed: int, index: int) -> np.random.Generator:
    """Substream `index` of the experiment stream `seed` (PCG64)."""
    return np.random.Generator(
        np.random.PCG64(np.random.SeedSequence(seed, spawn_key=(index,)))
    )


def root_rng(seed: int) -> np.random.Generator:
    return np.random.Generator(np.random.PCG64(np.random.SeedSequence(seed)))


# -- simple graphs and cylinders ---------------------------------------------


@dataclass(frozen=True)
class SimpleGraph:
    """Undirected graph; `parts`, when given, is a tuple of vertex tuples and
    declares the multipartite structure the edges respect."""

    n: int
    edges: frozenset
    parts: tuple | None = None

    def __post_init__(self):
        for u, v in self.edges:
            if u == v:
                raise ValueError("loops are not allowed")
            if not (0 <= u < self.n and 0 <= v < self.n):
                raise ValueError(f"edge ({u},{v}) out of range")
            if u > v:
                raise ValueError("edges must be stored as (u,v) with u < v")

    @property
    def edge_count(self) -> int:
        return len(self.edges)

    def adjacency_masks(self) -> list[int]:
        adj = [0] * self.n
        for u, v in self.edges:
            adj[u] |= 1 << v
            adj[v] |= 1 << u
        return adj


def greedy_matching(g: SimpleGraph) -> frozenset:
    """Maximal matching, greedy over edges in sorted order.

    A maximal matching always has size >= |edges| / (2 * |vertices|): each
    matched edge can block at most 2n others.
    """
    used = 0
    chosen = []
    for u, v in sorted(g.edges):
        if used >> u & 1 or used >> v & 1:
            continue
        chosen.append((u, v))
        used |= 1 << u | 1 << v
    matching = frozenset(chosen)
    assert 2 * g.n * len(matching) >= g.edge_count
    return matching


def sample_cylinder(l: int, m: int, seed: int) -> SimpleGraph:
    """3-partite graph with parts of size m; within each of the three pair
    classes every edge appears independently with probability 1/l."""
    if l < 1 or m < 1:
        raise ValueError("need l >= 1 and m >= 1")
    return _sample_cylinder_with(root_rng(seed), l, m)


def cylinder_triangle_count(g: SimpleGraph) -> int:
    """Triangles of a 3-partite cylinder via bit-parallel link intersection."""
    if g.parts is None or len(g.parts) != 3:
        raise ValueError("need a 3-partite cylinder")
    p0, p1, p2 = g.parts
    p0set, p1set = set(p0), set(p1)
    idx2 = {v: i for i, v in enumerate(p2)}
    to2 = [0] * g.n
    for u, v in g.edges:
        if u in idx2:
            to2[v] |= 1 << idx2[u]
        elif v in idx2:
            to2[u] |= 1 << idx2[v]
    total = 0
    for u, v in g.edges:
        if u in p0set and v in p1set:
            total += (to2[u] & to2[v]).bit_count()
    return total


# -- planted tripartite samples ----------------------------------------------


@dataclass(frozen=True)
class PlantedSample:
    """A tripartite system generated by keeping each crossing triple of the
    planted partition independently with probability p."""

    system: TripleSystem
    planted: Partition3
    p: float
    seed: object


@functools.lru_cache(maxsize=None)
def _planted_partition(n: int) -> Partition3:
    a, b, c = balanced_split(n)
    return Partition3(tuple([0] * a + [1] * b + [2] * c))


@functools.lru_cache(maxsize=None)
def _crossing_ranks(n: int) -> tuple[int, ...]:
    labels = _planted_partition(n).labels
    return tuple(
        r
        for r, (a, b, c) in enumerate(all_triples(n))
        if {labels[a], labels[b], labels[c]} == {0, 1, 2}
    )


def _sample_planted_with(rng: np.random.Generator, n: int, p: float, seed) -> PlantedSample:
    ranks = _crossing_ranks(n)
    draws = rng.random(len(ranks)) < p
    mask = 0
    for r, keep in zip(ranks, draws):
        if keep:
            mask |= 1 << r
    return PlantedSample(
        system=TripleSystem.from_mask(n, mask),
        planted=_planted_partition(n),
        p=p,
        seed=seed,
    )


def sample_planted(n: int, p: float, seed: int) -> PlantedSample:
    """Balanced planted partition (sizes floor((n+2)/3), floor((n+1)/3),
    floor(n/3)); each crossing triple kept independently with probability p."""
    if n < 3:
        raise ValueError("need n >= 3")
    if not 0 <= p <= 1:
        raise ValueError("p must be in [0,1]")
    return _sample_planted_with(root_rng(seed), n, p, seed)


# -- lower-density audit -------------------------------------------------------


@dataclass(frozen=True)
class ConditionResult:
    condition: str
    status: str  # "verified" | "refuted" | "sampled-pass"
    trials: int = 0
    failures: int = 0
    witness: dict | None = field(default=None, compare=False)
    note: str = ""


@dataclass(frozen=True)
class DensityAudit:
    mu: float
    mode: str
    conditions: dict

    @property
    def refuted(self) -> bool:
        return any(c.status == "refuted" for c in self.conditions.values())


#: Exact subset enumeration for condition (i) is allowed up to this part size.
EXACT_PART_BOUND = 15


class _AuditContext:
    def __init__(self, h: TripleSystem, part: Partition3, mu: float):
        self.h = h
        self.n = h.n
        self.mu = mu
        self.parts = [list(p) for p in part.parts()]
        self.links = h.pair_link_masks()
        self.min_part_size = math.ceil(mu * h.n)

    def link_mask(self, a: int, b: int) -> int:
        return self.links.get((min(a, b), max(a, b)), 0)

    def crossing_count(self, a1: list, a2: list, a3: list) -> int:
        m3 = 0
        for w in a3:
            m3 |= 1 << w
        total = 0
        for a in a1:
            for b in a2:
                total += (self.link_mask(a, b) & m3).bit_count()
        return total


def _qualifying_masks(size: int, lo: int):
    """All subset masks of range(size) with at least lo elements."""
    for m in range(1 << size):
        if m.bit_count() >= lo:
            yield m


def _mask_to_members(universe: list, m: int) -> list:
    return [universe[i] for i in range(len(universe)) if m >> i & 1]


def _cond_i_exact(ctx: _AuditContext) -> ConditionResult:
    lo = max(ctx.min_part_size, 0)
    u1, u2, u3 = ctx.parts
    for m1 in _qualifying_masks(len(u1), lo):
        a1 = _mask_to_members(u1, m1)
        for m2 in _qualifying_masks(len(u2), lo):
            a2 = _mask_to_members(u2, m2)
            for m3 in _qualifying_masks(len(u3), lo):
                a3 = _mask_to_members(u3, m3)
                count = ctx.crossing_count(a1, a2, a3)
                if 8 * count <= len(a1) * len(a2) * len(a3):
                    return ConditionResult(
                        "i",
                        "refuted",
                        witness={"A1": a1, "A2": a2, "A3": a3, "count": count},
                    )
    return ConditionResult("i", "verified")


def _random_subset(rng, universe: list, lo: int) -> list:
    size = int(rng.integers(lo, len(universe) + 1))
    picks = rng.choice(len(universe), size=size, replace=False)
    return sorted(universe[i] for i in picks)


def _cond_i_sampled(ctx: _AuditContext, rng, trials: int) -> ConditionResult:
    lo = ctx.min_part_size
    u1, u2, u3 = ctx.parts
    if min(len(u1), len(u2), len(u3)) < lo:
        return ConditionResult("i", "sampled-pass", trials=0, note="no qualifying sets")
    failures = 0
    witness = None
    for _ in range(trials):
        a1 = _random_subset(rng, u1, lo)
        a2 = _random_subset(rng, u2, lo)
        a3 = _random_subset(rng, u3, lo)
        count = ctx.crossing_count(a1, a2, a3)
        if 8 * count <= len(a1) * len(a2) * len(a3):
            failures += 1
            if witness is None:
                witness = {"A1": a1, "A2": a2, "A3": a3, "count": count}
    status = "refuted" if failures else "sampled-pass"
    return ConditionResult("i", status, trials=trials, failures=failures, witness=witness)


def _cond_ii_sampled(ctx: _AuditContext, rng, trials: int) -> ConditionResult:
    lo_a = ctx.min_part_size
    lo_g = math.ceil(ctx.mu * ctx.mu * ctx.n * ctx.n)
    failures = 0
    witness = None
    done = 0
    for t in range(trials):
        i = t % 3
        j, l = [k for k in range(3) if k != i]
        ui, uj, ul = ctx.parts[i], ctx.parts[j], ctx.parts[l]
        grid = len(uj) * len(ul)
        if len(ui) < lo_a or grid < lo_g:
            continue
        done += 1
        ai = _random_subset(rng, ui, lo_a)
        gsize = int(rng.integers(lo_g, grid + 1))
        picks = rng.choice(grid, size=gsize, replace=False)
        pairs = [(uj[k // len(ul)], ul[k % len(ul)]) for k in sorted(picks)]
        amask = 0
        for a in ai:
            amask |= 1 << a
        count = sum((ctx.link_mask(b, c) & amask).bit_count() for b, c in pairs)
        if 8 * count <= len(ai) * len(pairs):
            failures += 1
            if witness is None:
                witness = {"i": i, "A_i": ai, "G": pairs, "count": count}
    status = "refuted" if failures else "sampled-pass"
    note = "" if done else "no qualifying pair sets"
    return ConditionResult("ii", status, trials=done, failures=failures, witness=witness, note=note)


def _random_matching(rng, universe: list, size: int) -> list:
    order = [universe[i] for i in rng.permutation(len(universe))]
    return [tuple(sorted((order[2 * k], order[2 * k + 1]))) for k in range(size)]


def _cond_iii_sampled(ctx: _AuditContext, rng, trials: int) -> ConditionResult:
    lo_a = ctx.min_part_size
    lo_g = math.ceil(ctx.mu * ctx.n)
    failures = 0
    witness = None
    done = 0
    pairs_idx = ((0, 1), (0, 2), (1, 2))
    for t in range(trials):
        i, j = pairs_idx[t % 3]
        l = 3 - i - j
        ui, uj, ul = ctx.parts[i], ctx.parts[j], ctx.parts[l]
        maximal = len(ul) // 2
        if len(ui) < lo_a or len(uj) < lo_a or maximal < lo_g:
            continue
        done += 1
        ai = _random_subset(rng, ui, lo_a)
        aj = _random_subset(rng, uj, lo_a)
        # alternate matchings of the minimum qualifying size and maximal ones
        gsize = lo_g if t % 2 == 0 else maximal
        matching = _random_matching(rng, ul, gsize)
        ajmask = 0
        for b in aj:
            ajmask |= 1 << b
        count = 0
        for u, v in matching:
            for a in ai:
                count += (
                    ctx.link_mask(a, u) & ctx.link_mask(a, v) & ajmask
                ).bit_count()
        if 128 * count < len(ai) * len(aj) * len(matching):
            failures += 1
            if witness is None:
                witness = {"i": i, "j": j, "A_i": ai, "A_j": aj, "G": matching, "count": count}
    status = "refuted" if failures else "sampled-pass"
    note = "" if done else "no qualifying matchings"
    return ConditionResult("iii", status, trials=done, failures=failures, witness=witness, note=note)


def _cond_iv(ctx: _AuditContext) -> ConditionResult:
    mu = Fraction(ctx.mu)
    for i, part in enumerate(ctx.parts):
        # | |U_i| - n/3 | < mu*n, cleared of denominators
        if abs(Fraction(3 * len(part) - ctx.n, 3)) >= mu * ctx.n:
            return ConditionResult(
                "iv", "refuted", witness={"part": i, "size": len(part)}
            )
    return ConditionResult("iv", "verified")


def density_audit(
    sample: PlantedSample,
    mu: float,
    mode: str = "sampled",
    trials: int = 200,
    seed: int = 0,
) -> DensityAudit:
    """Audit the four lower-density conditions of a partitioned system.

    Condition (iv) is always decided exactly.  Condition (i) is decided
    exactly in exact mode (every qualifying triple of subsets; the cost is
    the product of the per-part subset counts, so this is practical only for
    small parts) and refutation-sampled otherwise.  Conditions (ii) and
    (iii) range over pair sets and matchings and are always
    refutation-sampled; a "sampled-pass" is evidence, not proof.
    """
    if mode not in ("exact", "sampled"):
        raise ValueError("mode must be 'exact' or 'sampled'")
    ctx = _AuditContext(sample.system, sample.planted, mu)
    if mode == "exact" and max(len(p) for p in ctx.parts) > EXACT_PART_BOUND:
        raise ValueError(f"exact mode requires part sizes <= {EXACT_PART_BOUND}")
    rng = root_rng(seed)
    cond_i = _cond_i_exact(ctx) if mode == "exact" else _cond_i_sampled(ctx, rng, trials)
    cond_ii = _cond_ii_sampled(ctx, rng, trials)
    cond_iii = _cond_iii_sampled(ctx, rng, trials)
    cond_iv = _cond_iv(ctx)
    return DensityAudit(
        mu=mu,
        mode=mode,
        conditions={"i": cond_i, "ii": cond_ii, "iii": cond_iii, "iv": cond_iv},
    )


# -- bad-vertex audit ----------------------------------------------------------


@dataclass(frozen=True)
class LinkBoundViolation:
    vertex: int
    part_pair: tuple
    count: int
    bound: float


def bad_vertex_audit(h: TripleSystem, p: Partition3, mu: float) -> list[LinkBoundViolation]:
    """Flag vertices whose non-crossing link classes reach 2*mu*n^2.

    For a vertex in part i the five audited classes are every part pair of
    the other two edge vertices except the crossing one (the pair of the two
    other parts).  The underlying bound holds asymptotically for lower-dense
    systems; small systems routinely violate it, which is the point of
    exposing the audit as a diagnostic.
    """
    bound = 2 * mu * h.n * h.n
    out = []
    for x in range(h.n):
        own = p.labels[x]
        others = tuple(sorted(k for k in range(3) if k != own))
        prof = link_profile(h, p, x)
        for pair, count in sorted(prof.counts.items()):
            if pair == others:
                continue
            if count >= bound:
                out.append(LinkBoundViolation(x, pair, count, bound))
    return out


# -- experiments ---------------------------------------------------------------


def _triangle_trial(args: tuple) -> int:
    l, m, seed, t = args
    return cylinder_triangle_count(_sample_cylinder_with(child_rng(seed, t), l, m))


def triangle_experiment(
    l: int, m: int, theta: float, trials: int, seed: int, workers: int = 1
) -> RunReport:
    """Count triangles in sampled cylinders and report how many trials land
    within (1 +- theta) * m^3 / l^3.

    Trial t always uses substream t, so the counts are identical for any
    worker count."""
    if trials < 1:
        raise ValueError("need trials >= 1")
    expected = m**3 / l**3
    lo, hi = (1 - theta) * expected, (1 + theta) * expected
    jobs = [(l, m, seed, t) for t in range(trials)]
    if workers > 1:
        from concurrent.futures import ProcessPoolExecutor

        with ProcessPoolExecutor(max_workers=workers) as pool:
            counts = list(pool.map(_triangle_trial, jobs))
    else:
        counts = [_triangle_trial(j) for j in jobs]
    in_band = sum(1 for c in counts if lo <= c <= hi)
    report = RunReport(
        command="experiment triangle",
        parameters={"l": l, "m": m, "theta": theta, "trials": trials, "seed": seed},
    )
    report.add_table(
        "summary",
        [
            ("expected", f"{expected:.1f}"),
            ("band", f"[{lo:.1f}, {hi:.1f}]"),
            ("in_band", in_band),
            ("trials", trials),
            ("min_count", min(counts)),
            ("max_count", max(counts)),
        ],
    )
    report.add_verdict(
        "in-band fraction", None, f"{in_band}/{trials} within (1±{theta})·m³/l³"
    )
    if l == 1:
        exact = all(c == m**3 for c in counts)
        report.add_verdict("l=1 control: count == m^3 in every trial", exact)
    return report


def _sample_cylinder_with(rng: np.random.Generator, l: int, m: int) -> SimpleGraph:
    parts = (
        tuple(range(m)),
        tuple(range(m, 2 * m)),
        tuple(range(2 * m, 3 * m)),
    )
    p = 1.0 / l
    edges = []
    for pi, pj in ((0, 1), (0, 2), (1, 2)):
        draws = rng.random((m, m)) < p
        base_i, base_j = parts[pi][0], parts[pj][0]
        for a, b in zip(*np.nonzero(draws)):
            edges.append((base_i + int(a), base_j + int(b)))
    return SimpleGraph(3 * m, frozenset(edges), parts)


#: trials per substream in the binomial tail experiment (fixed so results do
#: not depend on worker count)
_CHERNOFF_BLOCK = 10_000


def _chernoff_block(args: tuple) -> int:
    m, p, threshold, seed, block, k = args
    draws = child_rng(seed, block).binomial(m, p, size=k)
    return int((draws < threshold).sum())


def chernoff_empirical(
    m: int, p: float, a: float, trials: int, seed: int, workers: int = 1
) -> RunReport:
    """Empirical frequency of {X < pm - a} for X ~ Binomial(m, p), compared to
    the analytic bound exp(-a^2/(2pm)) plus a 3*sqrt(bound/trials) slack.

    Draws happen in fixed blocks of 10^4 trials, one substream per block, so
    the frequency is identical for any worker count."""
    if trials < 1000:
        raise ValueError("need at least 1000 trials")
    bound = chernoff_bound(m, p, a)
    threshold = p * m - a
    jobs = [
        (m, p, threshold, seed, block, min(_CHERNOFF_BLOCK, trials - lo))
        for block, lo in enumerate(range(0, trials, _CHERNOFF_BLOCK))
    ]
    if workers > 1:
        from concurrent.futures import ProcessPoolExecutor

        with ProcessPoolExecutor(max_workers=workers) as pool:
            hits = sum(pool.map(_chernoff_block, jobs))
    else:
        hits = sum(_chernoff_block(j) for j in jobs)
    freq = hits / trials
    slack = 3 * math.sqrt(bound / trials)
    ok = freq <= bound + slack
    report = RunReport(
        command="experiment chernoff",
        parameters={"m": m, "p": p, "a": a, "trials": trials, "seed": seed},
    )
    report.add_table(
        "summary",
        [
            ("tail_frequency", f"{freq:.6f}"),
            ("analytic_bound", f"{bound:.12f}"),
            ("slack", f"{slack:.6f}"),
            ("hits", hits),
        ],
    )
    report.add_verdict("empirical tail <= bound + slack", ok, f"{freq:.6f} vs {bound + slack:.6f}")
    return report


def unique_partition_experiment(
    n: int,
    trials: int,
    seed: int,
    p: float = 0.5,
    cond2_samples: int = 50,
) -> RunReport:
    """Planted-partition recovery experiment.

    Per trial: sample a planted system, check the pairwise link-size
    condition |L(u,v)| > n/10 exactly over all crossing pairs, refutation-
    sample the two-set crossing-degree condition, then run the partition
    recovery procedure and compare to the plant up to part renaming.
    """
    if trials < 1:
        raise ValueError("need trials >= 1")
    recovered = 0
    cond_i_all = 0
    cond_ii_failures = 0
    min_link_overall = None
    for t in range(trials):
        rng = child_rng(seed, t)
        sample = _sample_planted_with(rng, n, p, (seed, t))
        h, plant = sample.system, sample.planted
        labels = plant.labels
        links = h.pair_link_masks()

        min_link = None
        ok_i = True
        for u in range(n):
            for v in range(u + 1, n):
                if labels[u] == labels[v]:
                    continue
                count = links.get((u, v), 0).bit_count()
                if min_link is None or count < min_link:
                    min_link = count
                if 10 * count <= n:
                    ok_i = False
        if ok_i:
            cond_i_all += 1
        if min_link_overall is None or min_link < min_link_overall:
            min_link_overall = min_link

        parts = [list(q) for q in plant.parts()]
        lo_a = n // 10 + 1
        for s_idx in range(cond2_samples):
            lidx = s_idx % 3
            i, j = [k for k in range(3) if k != lidx]
            if min(len(parts[i]), len(parts[j])) < lo_a:
                continue
            ai = _random_subset(rng, parts[i], lo_a)
            aj = _random_subset(rng, parts[j], lo_a)
            v = parts[lidx][int(rng.integers(len(parts[lidx])))]
            ajmask = 0
            for b in aj:
                ajmask |= 1 << b
            count = 0
            for a_ in ai:
                key = (min(a_, v), max(a_, v))
                count += (links.get(key, 0) & ajmask).bit_count()
            if 10 * count < len(ai) * len(aj):
                cond_ii_failures += 1

        if h.edge_count:
            rec = recover_partition(h)
            if rec is not None and rec.as_sets() == plant.as_sets():
                recovered += 1

    report = RunReport(
        command="experiment unique-partition",
        parameters={
            "n": n,
            "p": p,
            "trials": trials,
            "seed": seed,
            "cond2_samples": cond2_samples,
        },
    )
    report.add_table(
        "summary",
        [
            ("recovered_trials", recovered),
            ("condition_i_trials", cond_i_all),
            ("condition_ii_failures", cond_ii_failures),
            ("min_link_size", min_link_overall),
            ("trials", trials),
        ],
    )
    report.add_verdict(
        "planted partition recovered (up to renaming)",
        None,
        f"{recovered}/{trials} trials",
    )
    report.add_verdict(
        "link condition |L(u,v)| > n/10 for all crossing pairs",
        None,
        f"{cond_i_all}/{trials} trials",
    )
    return report


def stability_probe(n: int, fraction: float, cache_dir) -> RunReport:
    """Observational scan of near-extremal pattern-free classes.

    Over cached classes with at least fraction * n^3/27 edges, reports the
    distribution of the optimal-partition defect D divided by n^3.  Requires
    a populated enumeration cache for (n, f5free).
    """
    records, manifest = cache_mod.read_cache(cache_dir, n, "f5free")
    threshold = fraction * n**3 / 27
    rows = []
    worst = None
    for rec in records:
        if rec.edge_count < threshold:
            continue
        d = optimal_partition(rec.system).bad_count
        rows.append((f"class edges={rec.edge_count} aut={rec.aut_order}", f"D={d}  D/n^3={d / n**3:.5f}"))
        if worst is None or d > worst:
            worst = d
    report = RunReport(
        command="experiment stability",
        parameters={"n": n, "fraction": fraction},
    )
    report.add_table("qualifying classes", rows or [("none", "-")])
    report.add_verdict(
        "max non-crossing defect among near-extremal classes",
        None,
        f"max D = {worst} over {len(rows)} classes (threshold {threshold:.2f} edges)",
    )
    if n <= 4:
        report.add_verdict(
            "note", None, "the 5-vertex pattern cannot occur at n <= 4; freeness is vacuous"
        )
    return report
