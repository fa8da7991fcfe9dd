"""Exact solver for small crossing graphs.

States are ``(past, current)`` bitset pairs.  For a target ``m`` a DFS
starts from every independent set of size exactly ``m`` (a larger initial
frame is reached from one of its ``m``-subsets by inserting the rest, which
have no current neighbors) and only takes insertions keeping the frame at
size ``>= m``.  Failed states are memoized.
"""

from __future__ import annotations

import time
from collections import OrderedDict
from dataclasses import dataclass, field
from typing import Iterable

from .geometry import CrossingGraph
from .story import PlanarStory, lift_story, simulate, split_isolated

__all__ = [
    "Limits",
    "ExactResult",
    "DecisionResult",
    "SearchTimeout",
    "maximum_independent_set",
    "exact_decision",
    "exact_solve",
]

# rough per-entry cost of a memo key in a Python dict
_MEMO_ENTRY_BYTES = 120


@dataclass(frozen=True)
class Limits:
    max_vertices: int = 22
    time_budget: float | None = None
    memo_bytes: int = 512 * 2 ** 20


class SearchTimeout(Exception):
    pass


def _bits(mask: int):
    while mask:
        low = mask & -mask
        yield low.bit_length() - 1
        mask ^= low


def maximum_independent_set(x: CrossingGraph, within: Iterable[int] | None = None) -> frozenset[int]:
    """Exact maximum independent set by bitset branch and bound."""
    masks = x.masks
    cand0 = (1 << x.n) - 1
    if within is not None:
        cand0 = 0
        for v in within:
            cand0 |= 1 << v
    best = [0, 0]  # size, mask

    def rec(cand, chosen, size):
        # vertices of degree <= 1 inside cand can always be taken
        changed = True
        while changed and cand:
            changed = False
            for v in _bits(cand):
                nb = masks[v] & cand
                if nb & (nb - 1) == 0:
                    chosen |= 1 << v
                    size += 1
                    cand &= ~(nb | (1 << v))
                    changed = True
                    break
        if not cand:
            if size > best[0]:
                best[0], best[1] = size, chosen
            return
        if size + cand.bit_count() <= best[0]:
            return
        v = max(_bits(cand), key=lambda w: (masks[w] & cand).bit_count())
        rec(cand & ~(masks[v] | (1 << v)), chosen | (1 << v), size + 1)
        rec(cand & ~(1 << v), chosen, size)

    rec(cand0, 0, 0)
    return frozenset(_bits(best[1]))


@dataclass
class DecisionResult:
    feasible: bool | None  # None when the search ran out of time
    witness: PlanarStory | None = None
    nodes_explored: int = 0


@dataclass
class ExactResult:
    status: str  # optimal | timeout | too_large
    mu_star: int | None = None
    witness: PlanarStory | None = None
    nodes_explored: int = 0
    best_known: int | None = None
    upper_bound: int | None = None
    seconds: float = 0.0
    notes: dict = field(default_factory=dict)

    @property
    def gap(self) -> float | None:
        if self.status == "optimal":
            return 0.0
        if self.best_known is None or not self.upper_bound:
            return None
        return (self.upper_bound - self.best_known) / self.upper_bound


class _Search:
    def __init__(self, x: CrossingGraph, limits: Limits, deadline: float | None):
        self.n = x.n
        self.masks = x.masks
        self.full = (1 << x.n) - 1
        self.deadline = deadline
        self.nodes = 0
        self.memo: OrderedDict[int, None] = OrderedDict()
        self.memo_cap = max(1024, limits.memo_bytes // _MEMO_ENTRY_BYTES)

    def _tick(self):
        self.nodes += 1
        if self.deadline is not None and self.nodes & 1023 == 0 and time.monotonic() > self.deadline:
            raise SearchTimeout

    def start_sets(self, m: int):
        """Independent sets of size exactly ``m`` as bitsets."""
        masks = self.masks

        def rec(cand, chosen, need):
            if need == 0:
                yield chosen
                return
            while cand and cand.bit_count() >= need:
                low = cand & -cand
                v = low.bit_length() - 1
                cand ^= low
                yield from rec(cand & ~masks[v], chosen | low, need - 1)

        yield from rec(self.full, 0, m)

    def run(self, m: int, start: int) -> list[int] | None:
        return self._dfs(0, start, start.bit_count(), m)

    def _dfs(self, past: int, cur: int, size: int, m: int) -> list[int] | None:
        self._tick()
        shown = past | cur
        if shown == self.full:
            return []
        key = (past << self.n) | cur
        memo = self.memo
        if key in memo:
            memo.move_to_end(key)
            return None
        masks = self.masks
        fut = self.full & ~shown
        reach = 0
        for v in _bits(fut):
            reach |= masks[v]
        # current vertices crossed by a future one will be dropped for good
        if (cur & ~reach).bit_count() + fut.bit_count() < m:
            self._remember(key)
            return None
        moves = []
        for v in _bits(fut):
            hit = cur & masks[v]
            k = hit.bit_count()
            if size - k + 1 >= m:
                moves.append((k, v, hit))
        moves.sort()
        for k, v, hit in moves:
            rest = self._dfs(past | hit, (cur & ~hit) | (1 << v), size - k + 1, m)
            if rest is not None:
                return [v] + rest
        self._remember(key)
        return None

    def _remember(self, key):
        self.memo[key] = None
        if len(self.memo) > self.memo_cap:
            self.memo.popitem(last=False)


def _to_mask(vs: Iterable[int]) -> int:
    out = 0
    for v in vs:
        out |= 1 << v
    return out


def _decide(search: _Search, x: CrossingGraph, m: int,
            initial: frozenset[int] | None) -> PlanarStory | None:
    search.memo.clear()  # failed states are only valid for one target
    if initial is not None:
        starts = [_to_mask(initial)] if len(initial) >= m else []
    else:
        starts = search.start_sets(max(m, 1))
    for start in starts:
        path = search.run(m, start)
        if path is not None:
            story = PlanarStory(frozenset(_bits(start)), tuple(path))
            assert simulate(x, story).mu >= m
            return story
    return None


def exact_decision(x: CrossingGraph, m: int, limits: Limits = Limits(), *,
                   initial: Iterable[int] | None = None) -> DecisionResult:
    """Is there a story with minimum frame size ``>= m`` (optionally with a
    forced initial frame)?"""
    if x.n > limits.max_vertices:
        raise ValueError(f"{x.n} vertices exceeds the exact solver cap {limits.max_vertices}")
    init = frozenset(initial) if initial is not None else None
    if init is not None and not x.is_independent(init):
        raise ValueError("forced initial frame is not independent")
    if x.n == 0:
        return DecisionResult(m <= 0, PlanarStory(frozenset(), ()) if m <= 0 else None)
    core, old, iso = split_isolated(x)
    if iso and init is None:
        if core.n == 0:
            ok = m <= len(iso)
            return DecisionResult(ok, PlanarStory(frozenset(iso), ()) if ok else None)
        res = exact_decision(core, m - len(iso), limits)
        if res.witness is not None:
            res.witness = lift_story(res.witness, old, iso)
        return res
    if not iso and m > x.n // 2:
        return DecisionResult(False)
    deadline = None if limits.time_budget is None else time.monotonic() + limits.time_budget
    search = _Search(x, limits, deadline)
    try:
        story = _decide(search, x, m, init)
    except SearchTimeout:
        return DecisionResult(None, None, search.nodes)
    return DecisionResult(story is not None, story, search.nodes)


def exact_solve(x: CrossingGraph, limits: Limits = Limits(), *, seed: int = 0,
                upper_bound: int | None = None) -> ExactResult:
    """Optimal minimum frame size, searching targets from the maximum-pair
    bound down to the best heuristic value."""
    from .greedy import GreedyConfig, run_heuristic
    from .treewidth import WidthCapExceeded, maximum_pair_size

    t0 = time.monotonic()
    if x.n > limits.max_vertices:
        return ExactResult("too_large", notes={"n": x.n, "cap": limits.max_vertices})
    if x.n == 0:
        return ExactResult("optimal", 0, PlanarStory(frozenset(), ()), 0, 0, 0)
    core, old, iso = split_isolated(x)
    if iso:
        k = len(iso)
        if core.n == 0:
            return ExactResult("optimal", k, PlanarStory(frozenset(iso), ()), 0, k, k,
                               time.monotonic() - t0)
        res = exact_solve(core, limits, seed=seed,
                          upper_bound=None if upper_bound is None else upper_bound - k)
        res.notes["isolated"] = k
        if res.witness is not None:
            res.witness = lift_story(res.witness, old, iso)
        for attr in ("mu_star", "best_known", "upper_bound"):
            if getattr(res, attr) is not None:
                setattr(res, attr, getattr(res, attr) + k)
        res.seconds = time.monotonic() - t0
        return res
    deadline = None if limits.time_budget is None else t0 + limits.time_budget
    best_story, best = None, 0
    for name in ("ag-1c2a", "ag-1b2a", "ag-1a2a", "simple"):
        run = run_heuristic(x, GreedyConfig.from_name(name, seed))
        if run.status == "ok" and run.mu > best:
            best, best_story = run.mu, run.story
    ub = x.n // 2
    if upper_bound is None:
        try:
            upper_bound = maximum_pair_size(x)
        except WidthCapExceeded:
            upper_bound = None
    if upper_bound is not None:
        ub = min(ub, upper_bound)
    search = _Search(x, limits, deadline)
    m = ub
    try:
        while m > best:
            story = _decide(search, x, m, None)
            if story is not None:
                return ExactResult("optimal", m, story, search.nodes, m, m,
                                   time.monotonic() - t0)
            m -= 1
    except SearchTimeout:
        return ExactResult("timeout", None, best_story, search.nodes, best, m,
                           time.monotonic() - t0)
    return ExactResult("optimal", best, best_story, search.nodes, best, best,
                       time.monotonic() - t0)
