"""Planar stories over a crossing graph.

A story is stored as its initial frame plus the insertion order; frames are
always derived.  Inserting ``v`` drops every current neighbor of ``v``, and
a dropped vertex never comes back.
"""

from __future__ import annotations

import json
from dataclasses import dataclass, field
from functools import cached_property
from typing import Iterable

from .geometry import CrossingGraph

__all__ = [
    "StoryError",
    "PlanarStory",
    "StoryTrace",
    "ValidationReport",
    "Bounds",
    "simulate",
    "validate",
    "upper_bounds",
    "report_with_free_edges",
    "story_to_json",
    "story_from_json",
    "trace_to_json",
    "split_isolated",
    "lift_story",
]

NEVER = None


class StoryError(ValueError):
    pass


@dataclass(frozen=True)
class PlanarStory:
    initial_frame: frozenset[int]
    insertion_order: tuple[int, ...]

    @classmethod
    def of(cls, initial: Iterable[int], order: Iterable[int]) -> "PlanarStory":
        return cls(frozenset(initial), tuple(order))

    @property
    def tau(self) -> int:
        return len(self.insertion_order) + 1


@dataclass(frozen=True)
class StoryTrace:
    """Frame evolution of a story.

    Vertex ``v`` is present in frames ``inserted_at[v] <= i < removed_at[v]``
    (``removed_at[v] is None`` means it survives to the last frame).
    """

    frame_sizes: tuple[int, ...]
    inserted_at: dict[int, int]
    removed_at: dict[int, int | None]

    @property
    def mu(self) -> int:
        return min(self.frame_sizes)

    @property
    def tau(self) -> int:
        return len(self.frame_sizes)

    @cached_property
    def frames(self) -> tuple[frozenset[int], ...]:
        buckets: list[list[int]] = [[] for _ in range(self.tau + 1)]
        for v, i in self.inserted_at.items():
            buckets[i].append(v)
        gone: list[list[int]] = [[] for _ in range(self.tau + 1)]
        for v, j in self.removed_at.items():
            if j is not None:
                gone[j].append(v)
        out, cur = [], set()
        for i in range(self.tau):
            cur.difference_update(gone[i])
            cur.update(buckets[i])
            out.append(frozenset(cur))
        return tuple(out)

    def final_frame(self) -> frozenset[int]:
        return frozenset(v for v, j in self.removed_at.items() if j is None)


def _check_story(x: CrossingGraph, s: PlanarStory) -> list[tuple[str, str]]:
    problems = []
    init = s.initial_frame
    bad = sorted(v for v in init if not 0 <= v < x.n)
    if bad:
        problems.append(("unknown-vertex", f"initial frame has unknown ids {bad}"))
    init_ok = [v for v in init if 0 <= v < x.n]
    clash = sorted((v, u) for v in init_ok for u in x.adjacency[v] if u in init and v < u)
    if clash:
        problems.append(("frame-not-independent", f"initial frame contains crossing pairs {clash}"))
    if x.n and not init:
        problems.append(("empty-initial-frame", "initial frame is empty"))
    seen = set(init)
    dup, unknown = [], []
    for v in s.insertion_order:
        if not 0 <= v < x.n:
            unknown.append(v)
        elif v in seen:
            dup.append(v)
        seen.add(v)
    if unknown:
        problems.append(("unknown-vertex", f"insertion order has unknown ids {unknown}"))
    if dup:
        problems.append(("non-permutation",
                         f"insertion order repeats or re-inserts ids {sorted(set(dup))}"))
    missing = sorted(set(range(x.n)) - seen)
    if missing:
        problems.append(("coverage-gap", f"vertices never shown: {missing}"))
    return problems


def _run(x: CrossingGraph, s: PlanarStory) -> StoryTrace:
    nbrs = x.nbr_sets
    current = set(s.initial_frame)
    inserted_at = {v: 0 for v in current}
    removed_at: dict[int, int | None] = {v: NEVER for v in current}
    sizes = [len(current)]
    for i, v in enumerate(s.insertion_order, start=1):
        hit = nbrs[v] & current
        for u in hit:
            removed_at[u] = i
        current -= hit
        current.add(v)
        inserted_at[v] = i
        removed_at[v] = NEVER
        sizes.append(len(current))
    return StoryTrace(tuple(sizes), inserted_at, removed_at)


def simulate(x: CrossingGraph, s: PlanarStory) -> StoryTrace:
    """Derive all frames of ``s``.

    Raises :class:`StoryError` if the initial frame is not independent or the
    insertion order is not a permutation of the remaining vertices.
    """
    problems = _check_story(x, s)
    fatal = [msg for kind, msg in problems if kind != "empty-initial-frame"]
    if fatal:
        raise StoryError("; ".join(fatal))
    return _run(x, s)


@dataclass
class ValidationReport:
    valid: bool
    violations: list[tuple[str, str]] = field(default_factory=list)
    trace: StoryTrace | None = None

    def __bool__(self):
        return self.valid

    def lines(self) -> list[str]:
        if self.valid:
            return ["valid"]
        return [f"{kind}: {msg}" for kind, msg in self.violations]


def validate(x: CrossingGraph, s: PlanarStory) -> ValidationReport:
    """Check ``s`` against the planar-story conditions; never raises."""
    problems = _check_story(x, s)
    if problems:
        return ValidationReport(False, problems)
    trace = _run(x, s)
    for i, frame in enumerate(trace.frames):
        if not x.is_independent(frame):
            problems.append(("frame-not-independent", f"frame {i} is not independent"))
    return ValidationReport(not problems, problems, trace)


# -- isolated vertices -------------------------------------------------------

def split_isolated(x: CrossingGraph) -> tuple[CrossingGraph, list[int], list[int]]:
    """``(core, core_to_old, isolated)``.

    An isolated vertex crosses nothing, so an optimal story shows it from
    the first frame on; solvers work on the core and add it back with
    :func:`lift_story`.
    """
    iso = x.isolated()
    if not iso:
        return x, list(range(x.n)), []
    keep = [v for v in range(x.n) if x.adjacency[v]]
    core, old = x.induced(keep)
    return core, old, iso


def lift_story(s: PlanarStory, old: list[int], iso: Iterable[int]) -> PlanarStory:
    return PlanarStory(frozenset(old[v] for v in s.initial_frame) | frozenset(iso),
                       tuple(old[v] for v in s.insertion_order))


# -- bounds -----------------------------------------------------------------

@dataclass
class Bounds:
    """Upper bounds on the best minimum frame size; ``None`` = unavailable."""

    half_edges: int
    pair_bound: int | None = None
    initial_frame_bound: int | None = None
    notes: dict = field(default_factory=dict)

    def best(self) -> int:
        vals = [b for b in (self.half_edges, self.pair_bound, self.initial_frame_bound)
                if b is not None]
        return min(vals)


def upper_bounds(x: CrossingGraph, initial: Iterable[int] | None = None, *,
                 width_cap: int = 12, mis_limit: int = 64) -> Bounds:
    """Half-the-edges bound, maximum-pair bound and, for a given initial
    frame ``F``, ``min(|F|, alpha(X - F))``.

    The first and last frames are disjoint apart from isolated vertices,
    which sit in the last frame of every story; all three bounds are taken
    on the core and the ``k`` isolated vertices added back.
    """
    from .exact import maximum_independent_set
    from .treewidth import WidthCapExceeded, maximum_pair_size, min_fill_in_decomposition

    core, old, iso = split_isolated(x)
    k = len(iso)
    b = Bounds(half_edges=core.n // 2 + k)
    try:
        b.pair_bound = maximum_pair_size(core, width_cap=width_cap) + k
    except WidthCapExceeded as exc:
        b.notes["pair_bound"] = f"unavailable: decomposition width {exc.width} > cap {width_cap}"
    if initial is not None:
        init = frozenset(initial)
        if not x.is_independent(init):
            raise StoryError("initial frame is not independent")
        rest = [v for v in old if v not in init]
        sub, _ = x.induced(rest)
        alpha = None
        if sub.n <= mis_limit:
            alpha = len(maximum_independent_set(sub))
        else:
            from .treewidth import pareto_pairs
            try:
                td = min_fill_in_decomposition(sub, width_cap)
                alpha = max(a for a, _ in pareto_pairs(sub, td))
            except WidthCapExceeded as exc:
                b.notes["initial_frame_bound"] = (
                    f"unavailable: decomposition width {exc.width} > cap {width_cap}")
        if alpha is not None:
            b.initial_frame_bound = min(len(init), alpha + k)
    return b


# -- reporting --------------------------------------------------------------

def report_with_free_edges(trace: StoryTrace, free_edge_count: int) -> dict:
    """Display sizes including crossing-free edges, which sit in every frame.

    ``mu`` used to compare algorithms stays the core value."""
    if free_edge_count < 0:
        raise ValueError("free_edge_count must be non-negative")
    sizes = [m + free_edge_count for m in trace.frame_sizes]
    return {"frame_sizes": sizes, "display_mu": min(sizes), "mu": trace.mu,
            "free_edge_count": free_edge_count}


def story_to_json(s: PlanarStory, **extra) -> dict:
    return {"initial": sorted(s.initial_frame), "order": list(s.insertion_order), **extra}


def story_from_json(obj: dict | str | bytes) -> PlanarStory:
    if isinstance(obj, (str, bytes)):
        obj = json.loads(obj)
    try:
        init, order = obj["initial"], obj["order"]
    except (KeyError, TypeError):
        raise StoryError('story JSON needs "initial" and "order"') from None
    if not all(isinstance(v, int) for v in list(init) + list(order)):
        raise StoryError("story ids must be integers")
    if len(set(init)) != len(init):
        raise StoryError("initial frame lists an id twice")
    return PlanarStory.of(init, order)


def trace_to_json(s: PlanarStory, t: StoryTrace, free_edge_count: int = 0, **extra) -> dict:
    return {**story_to_json(s), "frame_sizes": list(t.frame_sizes), "mu": t.mu,
            "free_edge_count": free_edge_count, **extra}
