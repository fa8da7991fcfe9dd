"""Geometric graphs, exact segment crossing, and the crossing graph.

Coordinates are held as :class:`fractions.Fraction` so every orientation
test is exact.  Decimal strings in input files are parsed without passing
through binary floating point.
"""

from __future__ import annotations

import json
import math
from dataclasses import dataclass, field
from fractions import Fraction
from functools import cached_property
from typing import Iterable, Sequence

__all__ = [
    "InstanceError",
    "Point2D",
    "GeometricGraph",
    "CrossingGraph",
    "segments_cross",
    "build_crossing_graph",
    "parse_geometric_graph",
    "parse_crossing_graph",
    "dump_geometric_graph",
    "dump_crossing_graph",
]


class InstanceError(ValueError):
    """Malformed or invalid instance data."""


def _coord(value, where: str) -> Fraction:
    if isinstance(value, bool):
        raise InstanceError(f"{where}: coordinate must be a number, got {value!r}")
    if isinstance(value, float):
        if not math.isfinite(value):
            raise InstanceError(f"{where}: non-finite coordinate {value!r}")
        return Fraction(repr(value))
    if isinstance(value, (int, Fraction)):
        return Fraction(value)
    if isinstance(value, str):
        text = value.strip()
        if text.lower() in {"nan", "inf", "+inf", "-inf", "infinity", "-infinity", "+infinity"}:
            raise InstanceError(f"{where}: non-finite coordinate {value!r}")
        try:
            return Fraction(text)
        except (ValueError, ZeroDivisionError):
            raise InstanceError(f"{where}: cannot parse coordinate {value!r}") from None
    raise InstanceError(f"{where}: coordinate must be a number or decimal string, got {value!r}")


@dataclass(frozen=True)
class Point2D:
    x: Fraction
    y: Fraction

    @classmethod
    def of(cls, x, y) -> "Point2D":
        return cls(_coord(x, "x"), _coord(y, "y"))


def _cross(ox, oy, ax, ay, bx, by):
    return (ax - ox) * (by - oy) - (ay - oy) * (bx - ox)


def segments_cross(a1: Point2D, a2: Point2D, b1: Point2D, b2: Point2D) -> bool:
    """True iff segments ``a1a2`` and ``b1b2`` share a point interior to at
    least one of them.

    Proper crossings, T-contacts and collinear overlaps count; touching at a
    common endpoint does not.
    """
    if a1 == a2 or b1 == b2:
        raise InstanceError("degenerate (zero-length) segment")
    dax, day = a2.x - a1.x, a2.y - a1.y
    dbx, dby = b2.x - b1.x, b2.y - b1.y
    denom = dax * dby - day * dbx
    if denom != 0:
        # parameters of the unique common point of the two supporting lines
        wx, wy = b1.x - a1.x, b1.y - a1.y
        t = Fraction(wx * dby - wy * dbx, 1) / denom
        s = Fraction(wx * day - wy * dax, 1) / denom
        if not (0 <= t <= 1 and 0 <= s <= 1):
            return False
        return 0 < t < 1 or 0 < s < 1
    if _cross(a1.x, a1.y, a2.x, a2.y, b1.x, b1.y) != 0:
        return False  # parallel, distinct lines
    # collinear: compare projections on the dominant axis
    if dax != 0:
        lo_a, hi_a = sorted((a1.x, a2.x))
        lo_b, hi_b = sorted((b1.x, b2.x))
    else:
        lo_a, hi_a = sorted((a1.y, a2.y))
        lo_b, hi_b = sorted((b1.y, b2.y))
    return min(hi_a, hi_b) > max(lo_a, lo_b)


@dataclass(frozen=True)
class GeometricGraph:
    """Straight-line drawing: points plus index pairs."""

    vertices: tuple[Point2D, ...]
    edges: tuple[tuple[int, int], ...]

    def __post_init__(self):
        n = len(self.vertices)
        seen_pts: dict[Point2D, int] = {}
        for i, p in enumerate(self.vertices):
            if p in seen_pts:
                raise InstanceError(f"vertices {seen_pts[p]} and {i} have identical coordinates")
            seen_pts[p] = i
        seen: set[tuple[int, int]] = set()
        for k, (u, v) in enumerate(self.edges):
            if not (0 <= u < n and 0 <= v < n):
                raise InstanceError(f"edge {k}: index out of range ({u}, {v}) for {n} vertices")
            if u == v:
                raise InstanceError(f"edge {k}: self-loop at vertex {u}")
            key = (min(u, v), max(u, v))
            if key in seen:
                raise InstanceError(f"edge {k}: duplicate edge {key}")
            seen.add(key)

    def segment(self, k: int) -> tuple[Point2D, Point2D]:
        u, v = self.edges[k]
        return self.vertices[u], self.vertices[v]


@dataclass(frozen=True, eq=False)
class CrossingGraph:
    """Simple undirected graph on ``0..n-1``.

    ``edge_labels[i]`` is the index of the drawing edge behind vertex ``i``
    when the graph was built from a drawing; ``free_edge_count`` counts the
    crossing-free drawing edges that were dropped.
    """

    n: int
    adjacency: tuple[tuple[int, ...], ...]
    edge_labels: tuple[int, ...] | None = None
    free_edge_count: int = 0
    meta: dict = field(default_factory=dict, compare=False)

    def __post_init__(self):
        if len(self.adjacency) != self.n:
            raise InstanceError("adjacency length does not match n")
        for v, nbrs in enumerate(self.adjacency):
            for u in nbrs:
                if u == v:
                    raise InstanceError(f"self-loop at vertex {v}")
                if not 0 <= u < self.n:
                    raise InstanceError(f"neighbor {u} of {v} out of range")
        for v, nbrs in enumerate(self.adjacency):
            for u in nbrs:
                if v not in self.nbr_sets[u]:
                    raise InstanceError(f"adjacency not symmetric for {u}-{v}")
        if self.edge_labels is not None and len(self.edge_labels) != self.n:
            raise InstanceError("edge_labels length does not match n")

    @classmethod
    def from_edges(cls, n: int, edges: Iterable[tuple[int, int]], **kw) -> "CrossingGraph":
        adj: list[set[int]] = [set() for _ in range(n)]
        for u, v in edges:
            if u == v:
                raise InstanceError(f"self-loop at vertex {u}")
            if not (0 <= u < n and 0 <= v < n):
                raise InstanceError(f"edge ({u}, {v}) out of range for {n} vertices")
            adj[u].add(v)
            adj[v].add(u)
        return cls(n, tuple(tuple(sorted(a)) for a in adj), **kw)

    def __eq__(self, other):
        if not isinstance(other, CrossingGraph):
            return NotImplemented
        return (self.n, self.adjacency, self.edge_labels, self.free_edge_count) == (
            other.n, other.adjacency, other.edge_labels, other.free_edge_count)

    def __hash__(self):
        return hash((self.n, self.adjacency))

    @cached_property
    def nbr_sets(self) -> tuple[frozenset[int], ...]:
        return tuple(frozenset(a) for a in self.adjacency)

    @cached_property
    def masks(self) -> tuple[int, ...]:
        """Neighborhoods as integer bitsets."""
        out = []
        for nbrs in self.adjacency:
            m = 0
            for u in nbrs:
                m |= 1 << u
            out.append(m)
        return tuple(out)

    def edges(self) -> list[tuple[int, int]]:
        return [(v, u) for v in range(self.n) for u in self.adjacency[v] if v < u]

    @property
    def m(self) -> int:
        return sum(len(a) for a in self.adjacency) // 2

    def degree(self, v: int) -> int:
        return len(self.adjacency[v])

    def max_degree(self) -> int:
        return max((len(a) for a in self.adjacency), default=0)

    def is_independent(self, vertices: Iterable[int]) -> bool:
        vs = set(vertices)
        return all(not (self.nbr_sets[v] & vs) for v in vs)

    def isolated(self) -> list[int]:
        return [v for v in range(self.n) if not self.adjacency[v]]

    def induced(self, keep: Sequence[int]) -> tuple["CrossingGraph", list[int]]:
        """Subgraph on ``keep`` relabelled ``0..len(keep)-1``; also returns
        the new-to-old id map."""
        index = {v: i for i, v in enumerate(keep)}
        edges = [(index[v], index[u]) for v in keep for u in self.adjacency[v]
                 if u in index and v < u]
        return CrossingGraph.from_edges(len(keep), edges), list(keep)

    def strip_isolated(self) -> "CrossingGraph":
        """Drop isolated vertices (crossing-free edges), recording them in
        ``free_edge_count`` and keeping labels back to the original ids."""
        keep = [v for v in range(self.n) if self.adjacency[v]]
        if len(keep) == self.n:
            return self
        sub, old = self.induced(keep)
        labels = tuple(self.edge_labels[v] for v in old) if self.edge_labels else tuple(old)
        return CrossingGraph(sub.n, sub.adjacency, labels,
                             self.free_edge_count + self.n - len(keep), dict(self.meta))

    def components(self) -> list[list[int]]:
        seen = [False] * self.n
        comps = []
        for s in range(self.n):
            if seen[s]:
                continue
            seen[s] = True
            stack, comp = [s], []
            while stack:
                v = stack.pop()
                comp.append(v)
                for u in self.adjacency[v]:
                    if not seen[u]:
                        seen[u] = True
                        stack.append(u)
            comps.append(sorted(comp))
        return comps


def build_crossing_graph(g: GeometricGraph) -> CrossingGraph:
    """Pairwise O(m^2) crossing test; crossing-free edges are dropped."""
    m = len(g.edges)
    segs = [g.segment(k) for k in range(m)]
    adj: list[list[int]] = [[] for _ in range(m)]
    for i in range(m):
        a1, a2 = segs[i]
        # bounding boxes reject most pairs before the exact test
        ax0, ax1 = sorted((a1.x, a2.x))
        ay0, ay1 = sorted((a1.y, a2.y))
        for j in range(i + 1, m):
            b1, b2 = segs[j]
            if max(b1.x, b2.x) < ax0 or min(b1.x, b2.x) > ax1:
                continue
            if max(b1.y, b2.y) < ay0 or min(b1.y, b2.y) > ay1:
                continue
            if segments_cross(a1, a2, b1, b2):
                adj[i].append(j)
                adj[j].append(i)
    keep = [k for k in range(m) if adj[k]]
    index = {k: i for i, k in enumerate(keep)}
    adjacency = tuple(tuple(sorted(index[j] for j in adj[k])) for k in keep)
    return CrossingGraph(len(keep), adjacency, tuple(keep), m - len(keep))


# -- file formats -----------------------------------------------------------

def parse_geometric_graph(data: bytes | str) -> GeometricGraph:
    """Parse ``{"vertices": [[x, y], ...], "edges": [[u, v], ...]}``."""
    if isinstance(data, bytes):
        data = data.decode("utf-8")
    try:
        # parse_float keeps decimal literals exact
        obj = json.loads(data, parse_float=Fraction)
    except json.JSONDecodeError as exc:
        raise InstanceError(f"line {exc.lineno} col {exc.colno}: {exc.msg}") from None
    if not isinstance(obj, dict) or "vertices" not in obj or "edges" not in obj:
        raise InstanceError('expected an object with "vertices" and "edges"')
    verts = obj["vertices"]
    if not isinstance(verts, list):
        raise InstanceError('"vertices" must be a list')
    points = []
    for i, p in enumerate(verts):
        if not isinstance(p, list) or len(p) != 2:
            raise InstanceError(f"vertices[{i}]: expected [x, y]")
        points.append(Point2D(_coord(p[0], f"vertices[{i}][0]"), _coord(p[1], f"vertices[{i}][1]")))
    edges = []
    raw_edges = obj["edges"]
    if not isinstance(raw_edges, list):
        raise InstanceError('"edges" must be a list')
    for k, e in enumerate(raw_edges):
        if (not isinstance(e, list) or len(e) != 2
                or not all(isinstance(t, int) and not isinstance(t, bool) for t in e)):
            raise InstanceError(f"edges[{k}]: expected [u, v] with integer indices")
        edges.append((e[0], e[1]))
    return GeometricGraph(tuple(points), tuple(edges))


def _fmt(q: Fraction) -> str:
    if q.denominator == 1:
        return str(q.numerator)
    # exact decimal when the denominator allows it, else a fraction string
    d, exps = q.denominator, []
    for p in (2, 5):
        k = 0
        while d % p == 0:
            d //= p
            k += 1
        exps.append(k)
    if d == 1:
        digits = max(exps)
        scaled = q * 10 ** digits
        s = str(abs(scaled.numerator)).rjust(digits + 1, "0")
        out = f"{s[:-digits]}.{s[-digits:]}".rstrip("0").rstrip(".")
        return ("-" if q < 0 else "") + out
    return f"{q.numerator}/{q.denominator}"


def dump_geometric_graph(g: GeometricGraph, extra: dict | None = None) -> str:
    obj = {"vertices": [[_fmt(p.x), _fmt(p.y)] for p in g.vertices],
           "edges": [list(e) for e in g.edges]}
    if extra:
        obj.update(extra)
    return json.dumps(obj, indent=1)


def parse_crossing_graph(data: bytes | str) -> CrossingGraph:
    """Parse an edge list: one ``u v`` pair per line, ``#`` comments."""
    if isinstance(data, bytes):
        data = data.decode("utf-8")
    edges = []
    seen = set()
    n = 0
    for lineno, raw in enumerate(data.splitlines(), start=1):
        line = raw.split("#", 1)[0].strip()
        if not line:
            continue
        parts = line.split()
        if len(parts) != 2:
            raise InstanceError(f"line {lineno}: expected 'u v', got {raw!r}")
        try:
            u, v = int(parts[0]), int(parts[1])
        except ValueError:
            raise InstanceError(f"line {lineno}: non-integer vertex id in {raw!r}") from None
        if u < 0 or v < 0:
            raise InstanceError(f"line {lineno}: negative vertex id")
        if u == v:
            raise InstanceError(f"line {lineno}: self-loop at vertex {u}")
        key = (min(u, v), max(u, v))
        if key in seen:
            raise InstanceError(f"line {lineno}: duplicate edge {key}")
        seen.add(key)
        edges.append(key)
        n = max(n, u + 1, v + 1)
    return CrossingGraph.from_edges(n, edges)


def dump_crossing_graph(x: CrossingGraph, header: Sequence[str] = ()) -> str:
    lines = [f"# {h}" for h in header]
    lines += [f"{u} {v}" for u, v in x.edges()]
    return "\n".join(lines) + "\n"
