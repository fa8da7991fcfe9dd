"""Simple Greedy and Advanced Greedy story heuristics.

Phase 1 picks the initial frame ``I1`` and planned final frame ``Itau``;
phase 2 inserts future vertices one at a time, always a minimum current
degree one among the admissible vertices (those outside ``Itau``, or inside
it but with no future neighbor left).

All random choices come from :class:`random.Random` (MT19937) seeded with
the run's seed, so a run is reproducible across platforms.
"""

from __future__ import annotations

import random
import time
from dataclasses import dataclass, field, replace
from typing import Iterable

from .geometry import CrossingGraph
from .story import PlanarStory, StoryTrace, lift_story, simulate, split_isolated
from .treewidth import (DEFAULT_WIDTH_CAP, DPTimeout, WidthCapExceeded,
                        degree2_maximum_pair, maximum_pair)

__all__ = [
    "GreedyConfig",
    "HeuristicRun",
    "HEURISTIC_NAMES",
    "simple_greedy",
    "default_initial_frame",
    "phase1_variant_b",
    "phase1_variant_c",
    "phase1_variant_a",
    "advanced_greedy",
    "run_heuristic",
]

PHASE1 = ("1a", "1b", "1c", "given-pair", "given-initial")
PHASE2 = ("2a", "2b")
HEURISTIC_NAMES = ("simple",) + tuple(f"ag-{a}{b}" for a in ("1a", "1b", "1c") for b in PHASE2)


class _Buckets:
    """Vertices keyed by an integer degree; O(1) add/remove/update and a
    uniform pick from the minimum bucket."""

    def __init__(self):
        self.buckets: dict[int, list[int]] = {}
        self.where: dict[int, tuple[int, int]] = {}
        self.lo = 0

    def __len__(self):
        return len(self.where)

    def __contains__(self, v):
        return v in self.where

    def add(self, v, d):
        b = self.buckets.setdefault(d, [])
        self.where[v] = (d, len(b))
        b.append(v)
        if d < self.lo or len(self.where) == 1:
            self.lo = d

    def remove(self, v):
        d, i = self.where.pop(v)
        b = self.buckets[d]
        last = b.pop()
        if last != v:
            b[i] = last
            self.where[last] = (d, i)

    def update(self, v, d):
        if self.where[v][0] != d:
            self.remove(v)
            self.add(v, d)

    def min_bucket(self) -> list[int]:
        while not self.buckets.get(self.lo):
            self.lo += 1
        return self.buckets[self.lo]

    def min_key(self) -> int:
        self.min_bucket()
        return self.lo


def _greedy_independent(x: CrossingGraph, allowed: Iterable[int], rng: random.Random,
                        limit: int | None = None) -> set[int]:
    """Repeatedly add a minimum-degree vertex of the remaining candidate
    graph while fewer than ``limit + 1`` vertices are taken."""
    nbr = x.nbr_sets
    cand = set(allowed)
    q = _Buckets()
    for v in sorted(cand):
        q.add(v, len(nbr[v] & cand))
    out: set[int] = set()
    while q and (limit is None or len(out) <= limit):
        bucket = q.min_bucket()
        v = bucket[rng.randrange(len(bucket))]
        out.add(v)
        gone = [v] + [u for u in nbr[v] if u in cand]
        for w in gone:
            cand.discard(w)
            q.remove(w)
        for w in gone:
            for u in nbr[w]:
                if u in cand:
                    q.update(u, q.where[u][0] - 1)
    return out


def phase1_variant_b(x: CrossingGraph, seed: int = 0, *,
                     rng: random.Random | None = None) -> tuple[frozenset[int], frozenset[int]]:
    """``I1`` grows while ``|I1| <= n//2 - 1``; ``Itau`` is then a greedy
    maximal independent set of ``X - I1``."""
    rng = rng or random.Random(seed)
    i1 = _greedy_independent(x, range(x.n), rng, limit=x.n // 2 - 1)
    it = _greedy_independent(x, (v for v in range(x.n) if v not in i1), rng)
    return frozenset(i1), frozenset(it)


def phase1_variant_c(x: CrossingGraph, seed: int = 0, *,
                     rng: random.Random | None = None) -> tuple[frozenset[int], frozenset[int]]:
    """Grow ``I1`` and ``Itau`` in turns, each by a minimum-degree vertex of
    ``X - I1 - Itau - N(own set)``; a side with no candidate passes.  The
    smaller set is returned first."""
    rng = rng or random.Random(seed)
    nbr = x.nbr_sets
    sets: list[set[int]] = [set(), set()]
    cands = [set(range(x.n)), set(range(x.n))]
    queues = [_Buckets(), _Buckets()]
    for side in (0, 1):
        for v in range(x.n):
            queues[side].add(v, len(nbr[v]))

    def drop(side, w):
        c, q = cands[side], queues[side]
        c.discard(w)
        q.remove(w)
        for u in nbr[w]:
            if u in c:
                q.update(u, q.where[u][0] - 1)

    turn = 0
    while queues[0] or queues[1]:
        if queues[turn]:
            bucket = queues[turn].min_bucket()
            v = bucket[rng.randrange(len(bucket))]
            sets[turn].add(v)
            for side in (0, 1):
                if v in cands[side]:
                    drop(side, v)
            for u in nbr[v]:
                if u in cands[turn]:
                    drop(turn, u)
        turn ^= 1
    i1, it = sets
    if len(i1) > len(it):
        i1, it = it, i1
    return frozenset(i1), frozenset(it)


def phase1_variant_a(x: CrossingGraph, *, width_cap: int = DEFAULT_WIDTH_CAP, seed: int = 0,
                     deadline: float | None = None) -> tuple[frozenset[int], frozenset[int]]:
    """Pareto-optimal maximum pair with ``|I1| <= |Itau|``.

    Paths-and-cycles graphs use the linear construction; everything else the
    tree-decomposition DP (may raise ``WidthCapExceeded``/``DPTimeout``)."""
    if x.max_degree() <= 2:
        i1, it, _ = degree2_maximum_pair(x)
        return i1, it
    return maximum_pair(x, width_cap=width_cap, seed=seed, deadline=deadline)


def default_initial_frame(x: CrossingGraph, seed: int = 0) -> frozenset[int]:
    """Variant-1b ``I1`` extended greedily to a maximal independent set."""
    rng = random.Random(seed)
    i1 = _greedy_independent(x, range(x.n), rng, limit=x.n // 2 - 1)
    blocked = set(i1)
    for v in i1:
        blocked |= x.nbr_sets[v]
    i1 |= _greedy_independent(x, (v for v in range(x.n) if v not in blocked), rng)
    return frozenset(i1)


def advanced_greedy(x: CrossingGraph, i1: Iterable[int], itau: Iterable[int],
                    phase2: str = "2a", seed: int = 0, *,
                    rng: random.Random | None = None) -> PlanarStory:
    """Phase 2: start at ``i1`` and insert admissible vertices of minimum
    current degree until every vertex has been shown.

    ``2a`` picks uniformly among the minimum-degree admissible vertices;
    ``2b`` first keeps those whose current neighbors are crossed by the most
    other future vertices.
    """
    if phase2 not in PHASE2:
        raise ValueError(f"unknown phase-2 variant {phase2!r}")
    rng = rng or random.Random(seed)
    nbr = x.nbr_sets
    current = set(i1)
    final = frozenset(itau)
    if current & final:
        raise ValueError("initial and final frames must be disjoint")
    if not x.is_independent(current) or not x.is_independent(final):
        raise ValueError("initial and final frames must be independent sets")
    future = set(range(x.n)) - current
    cur_deg = {v: len(nbr[v] & current) for v in future}
    fut_deg = {v: len(nbr[v] & future) for v in future}
    q = _Buckets()
    for v in sorted(future):
        if v not in final or fut_deg[v] == 0:
            q.add(v, cur_deg[v])
    order: list[int] = []
    while future:
        assert q, "advanced greedy deadlocked with future vertices left"
        ties = q.min_bucket()
        if phase2 == "2b" and q.lo > 0 and len(ties) > 1:
            ties = _refine_ties(ties, current, future, nbr)
        v = ties[rng.randrange(len(ties))]
        order.append(v)
        q.remove(v)
        future.discard(v)
        for u in nbr[v]:
            if u in future:
                fut_deg[u] -= 1
                cur_deg[u] += 1
                if u in q:
                    q.update(u, cur_deg[u])
                elif fut_deg[u] == 0:
                    q.add(u, cur_deg[u])
        hit = nbr[v] & current
        current -= hit
        current.add(v)
        for w in hit:
            for u in nbr[w]:
                if u in future:
                    cur_deg[u] -= 1
                    if u in q:
                        q.update(u, cur_deg[u])
    return PlanarStory(frozenset(i1), tuple(order))


def _refine_ties(ties, current, future, nbr):
    best, keep = -1, []
    for e in ties:
        reach = set()
        for c in nbr[e] & current:
            reach |= nbr[c]
        score = len(reach & future) - (e in reach)
        if score > best:
            best, keep = score, [e]
        elif score == best:
            keep.append(e)
    return keep


def simple_greedy(x: CrossingGraph, initial: Iterable[int] | None = None,
                  seed: int = 0) -> PlanarStory:
    """Insert a minimum current degree future vertex at every step."""
    rng = random.Random(seed)
    if initial is None:
        initial = default_initial_frame(x, seed)
    return advanced_greedy(x, initial, (), "2a", rng=rng)


# -- dispatch ---------------------------------------------------------------

@dataclass(frozen=True)
class GreedyConfig:
    phase1: str = "1c"
    phase2: str = "2a"
    seed: int = 0
    pair_override: tuple[frozenset[int], frozenset[int]] | None = None
    initial_override: frozenset[int] | None = None
    width_cap: int = DEFAULT_WIDTH_CAP
    time_budget: float | None = None
    simple: bool = False

    def __post_init__(self):
        if self.phase1 not in PHASE1:
            raise ValueError(f"unknown phase-1 variant {self.phase1!r}")
        if self.phase2 not in PHASE2:
            raise ValueError(f"unknown phase-2 variant {self.phase2!r}")
        if (self.pair_override is not None) != (self.phase1 == "given-pair"):
            raise ValueError("pair_override goes with phase1='given-pair' only")
        if (self.initial_override is not None) and self.phase1 != "given-initial":
            raise ValueError("initial_override goes with phase1='given-initial' only")

    @classmethod
    def from_name(cls, name: str, seed: int = 0, **kw) -> "GreedyConfig":
        name = name.lower()
        if name == "simple":
            return cls(phase1="1b", phase2="2a", seed=seed, simple=True, **kw)
        if name not in HEURISTIC_NAMES:
            raise ValueError(f"unknown heuristic {name!r}; expected one of {HEURISTIC_NAMES}")
        return cls(phase1=name[3:5], phase2=name[5:7], seed=seed, **kw)

    @property
    def name(self) -> str:
        return "simple" if self.simple else f"ag-{self.phase1}{self.phase2}"


@dataclass
class HeuristicRun:
    name: str
    seed: int
    status: str  # "ok" or "unavailable"
    story: PlanarStory | None = None
    trace: StoryTrace | None = None
    seconds: float = 0.0
    pair: tuple[frozenset[int], frozenset[int]] | None = None
    detail: str = ""
    extra: dict = field(default_factory=dict)

    @property
    def mu(self) -> int | None:
        return self.trace.mu if self.trace is not None else None


def run_heuristic(x: CrossingGraph, cfg: GreedyConfig) -> HeuristicRun:
    """Phase 1 + phase 2 + simulation, timed.  A failed variant-1a pair
    computation yields ``status='unavailable'`` instead of raising.

    Isolated vertices are set aside, placed in the initial frame, and kept
    to the end.
    """
    t0 = time.perf_counter()
    core, old, iso = split_isolated(x)
    if iso and core.n:
        inv = {v: i for i, v in enumerate(old)}

        def to_core(vs):
            return frozenset(inv[v] for v in vs if v in inv)

        sub_cfg = cfg
        if cfg.pair_override is not None:
            sub_cfg = replace(cfg, pair_override=(to_core(cfg.pair_override[0]),
                                                  to_core(cfg.pair_override[1])))
        if cfg.initial_override is not None:
            sub_cfg = replace(sub_cfg, initial_override=to_core(cfg.initial_override))
        run = run_heuristic(core, sub_cfg)
        if run.status != "ok":
            return run
        story = lift_story(run.story, old, iso)
        pair = None
        if run.pair is not None:
            pair = (frozenset(old[v] for v in run.pair[0]) | frozenset(iso),
                    frozenset(old[v] for v in run.pair[1]))
        return HeuristicRun(run.name, run.seed, "ok", story, simulate(x, story),
                            time.perf_counter() - t0, pair, run.detail, {"isolated": len(iso)})
    if iso:
        story = PlanarStory(frozenset(iso), ())
        return HeuristicRun(cfg.name, cfg.seed, "ok", story, simulate(x, story),
                            time.perf_counter() - t0, None, "", {"isolated": len(iso)})
    rng = random.Random(cfg.seed)
    if cfg.simple:
        init = cfg.initial_override if cfg.initial_override is not None else \
            default_initial_frame(x, cfg.seed)
        story = advanced_greedy(x, init, (), "2a", rng=rng)
        pair = None
    else:
        try:
            if cfg.phase1 == "given-pair":
                pair = cfg.pair_override
            elif cfg.phase1 == "given-initial":
                pair = (frozenset(cfg.initial_override or ()), frozenset())
            elif cfg.phase1 == "1a":
                deadline = None if cfg.time_budget is None else time.monotonic() + cfg.time_budget
                pair = phase1_variant_a(x, width_cap=cfg.width_cap, seed=cfg.seed,
                                        deadline=deadline)
            elif cfg.phase1 == "1b":
                pair = phase1_variant_b(x, rng=rng)
            else:
                pair = phase1_variant_c(x, rng=rng)
        except (WidthCapExceeded, DPTimeout) as exc:
            return HeuristicRun(cfg.name, cfg.seed, "unavailable",
                                seconds=time.perf_counter() - t0, detail=str(exc))
        story = advanced_greedy(x, pair[0], pair[1], cfg.phase2, rng=rng)
    trace = simulate(x, story)
    if pair is not None:
        assert pair[1] <= trace.final_frame(), "planned final frame not reached"
    return HeuristicRun(cfg.name, cfg.seed, "ok", story, trace,
                        time.perf_counter() - t0, pair)
