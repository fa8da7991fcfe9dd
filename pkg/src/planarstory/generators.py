"""Seeded instance families.

Geometric instances are random G(n, m) graphs laid out with a built-in
Fruchterman-Reingold pass.  Crossing-graph families (caterpillars, trees,
series-parallel, planar) are produced directly as abstract graphs, since
every planar graph is the crossing graph of some drawing.  The remaining
generators build the constructions with known answers.
"""

from __future__ import annotations

import heapq
import itertools
import math
import random
from dataclasses import dataclass, field
from fractions import Fraction

import numpy as np

from .geometry import CrossingGraph, GeometricGraph, InstanceError, Point2D

__all__ = [
    "InstanceSpec",
    "FAMILIES",
    "generate",
    "gen_random_geometric",
    "fruchterman_reingold",
    "gen_caterpillar",
    "gen_random_tree",
    "gen_series_parallel",
    "gen_planar",
    "gen_fig3_family",
    "gen_star_plus",
    "gen_nae3sat",
    "nae_satisfiable",
    "is_tree",
    "is_caterpillar",
    "is_series_parallel",
    "is_planar",
]

FAMILIES = ("random-geometric", "caterpillar", "random-tree", "series-parallel", "planar",
            "fig3-family", "star-plus-graph", "nae3sat")


def _connected(n: int, adj: list[set[int]]) -> bool:
    if n == 0:
        return True
    seen, stack = {0}, [0]
    while stack:
        v = stack.pop()
        for u in adj[v]:
            if u not in seen:
                seen.add(u)
                stack.append(u)
    return len(seen) == n


def _with_meta(x: CrossingGraph, **meta) -> CrossingGraph:
    x.meta.update(meta)
    return x


# -- geometric --------------------------------------------------------------

def fruchterman_reingold(n: int, edges, seed: int, iterations: int | None = None) -> np.ndarray:
    """Spring layout in the unit square (50*sqrt(n) iterations, linear
    cooling from 0.1)."""
    if iterations is None:
        iterations = int(50 * math.sqrt(n))
    rng = np.random.Generator(np.random.PCG64(seed))
    pos = rng.random((n, 2))
    if n <= 1:
        return pos
    a = np.zeros((n, n))
    for u, v in edges:
        a[u, v] = a[v, u] = 1.0
    k = math.sqrt(1.0 / n)
    t = 0.1
    dt = t / (iterations + 1)
    for _ in range(iterations):
        delta = pos[:, None, :] - pos[None, :, :]
        dist = np.maximum(np.sqrt((delta ** 2).sum(axis=-1)), 0.01)
        force = k * k / dist ** 2 - a * dist / k
        disp = np.einsum("ijk,ij->ik", delta, force)
        length = np.maximum(np.sqrt((disp ** 2).sum(axis=-1)), 0.01)
        pos += disp * (t / length)[:, None]
        t -= dt
    lo, hi = pos.min(axis=0), pos.max(axis=0)
    span = np.where(hi - lo > 0, hi - lo, 1.0)
    return (pos - lo) / span


def gen_random_geometric(n: int, d: float, seed: int = 0) -> GeometricGraph:
    """Uniform simple graph with ``round(d*n)`` edges, drawn by
    Fruchterman-Reingold; coordinates rounded to 6 decimals."""
    m = round(d * n)
    if n < 2 or m > n * (n - 1) // 2 or m < 0:
        raise InstanceError(f"infeasible random graph: n={n}, d={d} gives {m} edges")
    rng = random.Random(seed)
    pairs = list(itertools.combinations(range(n), 2))
    edges = sorted(pairs[i] for i in rng.sample(range(len(pairs)), m))
    pos = fruchterman_reingold(n, edges, seed)
    pts, taken = [], set()
    for i, (px, py) in enumerate(pos):
        p = (Fraction(f"{px:.6f}"), Fraction(f"{py:.6f}"))
        while p in taken:  # rounding collision: shift by one unit in the last place
            p = (p[0] + Fraction(1, 10 ** 6), p[1])
        taken.add(p)
        pts.append(Point2D(*p))
    return GeometricGraph(tuple(pts), tuple(edges))


# -- trees ------------------------------------------------------------------

def gen_caterpillar(n: int, seed: int = 0, spine: int | None = None) -> CrossingGraph:
    """Caterpillar whose longest path has ``spine`` vertices (uniform over
    ``3..n`` unless given); the other vertices hang off interior spine
    vertices uniformly at random."""
    if n < 3:
        raise InstanceError("caterpillar needs n >= 3")
    rng = random.Random(seed)
    if spine is None:
        spine = rng.randint(3, n)
    if not 3 <= spine <= n:
        raise InstanceError(f"spine length {spine} infeasible for n={n}")
    edges = [(i, i + 1) for i in range(spine - 1)]
    for leaf in range(spine, n):
        edges.append((rng.randint(1, spine - 2), leaf))
    return _with_meta(CrossingGraph.from_edges(n, edges), family="caterpillar",
                      params={"n": n, "spine": spine}, seed=seed)


def prufer_to_edges(seq: list[int], n: int) -> list[tuple[int, int]]:
    degree = [1] * n
    for v in seq:
        degree[v] += 1
    leaves = [v for v in range(n) if degree[v] == 1]
    heapq.heapify(leaves)
    edges = []
    for v in seq:
        leaf = heapq.heappop(leaves)
        edges.append((min(leaf, v), max(leaf, v)))
        degree[v] -= 1
        if degree[v] == 1:
            heapq.heappush(leaves, v)
    a, b = heapq.heappop(leaves), heapq.heappop(leaves)
    edges.append((a, b))
    return edges


def gen_random_tree(n: int, seed: int = 0) -> CrossingGraph:
    """Uniform labeled tree from a random Prüfer sequence."""
    if n < 2:
        raise InstanceError("random tree needs n >= 2")
    rng = random.Random(seed)
    seq = [rng.randrange(n) for _ in range(n - 2)]
    return _with_meta(CrossingGraph.from_edges(n, prufer_to_edges(seq, n)),
                      family="random-tree", params={"n": n}, seed=seed)


# -- series-parallel and planar --------------------------------------------

def _thin(n, edges, target, rng):
    """Delete random non-bridge edges until ``target`` remain."""
    adj = [set() for _ in range(n)]
    for u, v in edges:
        adj[u].add(v)
        adj[v].add(u)
    pool = sorted(edges)
    rng.shuffle(pool)
    cur = set(edges)
    for u, v in pool:
        if len(cur) <= target:
            break
        adj[u].discard(v)
        adj[v].discard(u)
        if _connected(n, adj):
            cur.discard((u, v))
        else:
            adj[u].add(v)
            adj[v].add(u)
    if len(cur) != target:
        raise InstanceError("could not thin to the requested density while staying connected")
    return sorted(cur)


def gen_series_parallel(n: int, d: float, seed: int = 0) -> CrossingGraph:
    """Random two-terminal series-parallel graph (each new vertex joins both
    ends of a random existing edge), thinned to ``round(d*n)`` edges."""
    m = round(d * n)
    if n < 2 or not n - 1 <= m <= max(1, 2 * n - 3):
        raise InstanceError(f"series-parallel: {m} edges infeasible for n={n}")
    rng = random.Random(seed)
    edges = [(0, 1)]
    for w in range(2, n):
        u, v = edges[rng.randrange(len(edges))]
        edges += [(min(u, w), w), (min(v, w), w)]
    edges = _thin(n, [tuple(sorted(e)) for e in edges], m, rng)
    x = CrossingGraph.from_edges(n, edges)
    assert is_series_parallel(x)
    return _with_meta(x, family="series-parallel", params={"n": n, "d": d}, seed=seed)


def gen_planar(n: int, d: float, seed: int = 0) -> CrossingGraph:
    """Random triangulation (vertex insertion into random faces, then random
    flips) thinned to ``round(d*n)`` edges, connected."""
    m = round(d * n)
    if n < 3 or not n - 1 <= m <= 3 * n - 6:
        raise InstanceError(f"planar: {m} edges infeasible for n={n} (need n-1 <= m <= 3n-6)")
    rng = random.Random(seed)
    faces: list[frozenset[int]] = [frozenset((0, 1, 2)), frozenset((0, 1, 2))]
    for w in range(3, n):
        i = rng.randrange(len(faces))
        a, b, c = sorted(faces[i])
        faces[i] = frozenset((a, b, w))
        faces += [frozenset((b, c, w)), frozenset((a, c, w))]
    edge_faces: dict[tuple[int, int], list[int]] = {}
    for i, f in enumerate(faces):
        for e in itertools.combinations(sorted(f), 2):
            edge_faces.setdefault(e, []).append(i)
    deg = [0] * n
    for u, v in edge_faces:
        deg[u] += 1
        deg[v] += 1
    for _ in range(2 * n if n > 4 else 0):
        keys = sorted(edge_faces)
        a, b = keys[rng.randrange(len(keys))]
        f1, f2 = edge_faces[(a, b)]
        (c,) = faces[f1] - {a, b}
        (dd,) = faces[f2] - {a, b}
        cd = (min(c, dd), max(c, dd))
        if c == dd or cd in edge_faces or deg[a] <= 3 or deg[b] <= 3:
            continue
        for e in itertools.combinations(sorted(faces[f1]), 2):
            edge_faces[e].remove(f1)
        for e in itertools.combinations(sorted(faces[f2]), 2):
            edge_faces[e].remove(f2)
        del edge_faces[(a, b)]
        faces[f1] = frozenset((a, c, dd))
        faces[f2] = frozenset((b, c, dd))
        for i in (f1, f2):
            for e in itertools.combinations(sorted(faces[i]), 2):
                edge_faces.setdefault(e, []).append(i)
        deg[a] -= 1
        deg[b] -= 1
        deg[c] += 1
        deg[dd] += 1
    edges = _thin(n, sorted(edge_faces), m, rng)
    x = CrossingGraph.from_edges(n, edges)
    assert is_planar(x)
    return _with_meta(x, family="planar", params={"n": n, "d": d}, seed=seed)


# -- constructions with known answers ----------------------------------------

def gen_fig3_family(ell: int) -> CrossingGraph:
    """Caterpillar whose optimal stories must start from a non-maximal frame.

    Ids: ``r=0, u=1, v=2``, then ``w_1..w_l``, ``u_1..u_l``, ``v_1..v_l``.
    """
    if ell < 4 or ell % 2:
        raise InstanceError("fig3 family needs an even ell >= 4")
    r, u, v = 0, 1, 2
    w = list(range(3, 3 + ell))
    us = list(range(3 + ell, 3 + 2 * ell))
    vs = list(range(3 + 2 * ell, 3 + 3 * ell))
    edges = [(r, u), (r, v)] + [(r, t) for t in w] + [(u, t) for t in us] + [(v, t) for t in vs]
    half = ell // 2
    witness = {"initial": us + [v] + w[:half], "order": vs + [r] + w[half:] + [u]}
    labels = {"r": r, "u": u, "v": v, "w": w, "u_leaves": us, "v_leaves": vs}
    return _with_meta(CrossingGraph.from_edges(3 * ell + 3, edges), family="fig3-family",
                      params={"ell": ell}, seed=None,
                      ground_truth={"mu": 3 * ell // 2 + 1, "maximal_start_bound": ell + 2,
                                    "witness": witness, "labels": labels})


def gen_star_plus(h: CrossingGraph, k: int) -> CrossingGraph:
    """``h`` plus a disjoint star with ``k + 1`` leaves: the optimum is at
    least ``k + 1`` iff ``h`` has an independent set of size ``k``."""
    if k < 1:
        raise InstanceError("star-plus needs k >= 1")
    center = h.n
    edges = h.edges() + [(center, center + 1 + i) for i in range(k + 1)]
    return _with_meta(CrossingGraph.from_edges(h.n + k + 2, edges), family="star-plus-graph",
                      params={"k": k, "h_vertices": h.n}, seed=None,
                      ground_truth={"target": k + 1, "star_center": center})


def nae_satisfiable(clauses) -> bool:
    """Truth-table check: some assignment gives every clause a true and a
    false literal."""
    variables = sorted({abs(l) for c in clauses for l in c})
    for bits in itertools.product((False, True), repeat=len(variables)):
        val = dict(zip(variables, bits))
        if all(len({val[abs(l)] == (l > 0) for l in c}) == 2 for c in clauses):
            return True
    return False


def gen_nae3sat(clauses) -> CrossingGraph:
    """Clause triangles plus alternating variable cycles; two disjoint
    independent sets of size ``4p`` exist iff the formula is NAE-satisfiable.

    Literals are nonzero ints (``-3`` is the negation of variable 3); each
    clause has three literals on distinct variables.
    """
    clauses = [tuple(c) for c in clauses]
    for j, c in enumerate(clauses):
        if len(c) != 3 or 0 in c or len({abs(l) for l in c}) != 3:
            raise InstanceError(f"clause {j}: need three literals on distinct variables")
    edges = []
    labels: list[int] = []
    clause_vertex: dict[tuple[int, int], int] = {}
    for j, c in enumerate(clauses):
        base = len(labels)
        labels += list(c)
        edges += [(base, base + 1), (base + 1, base + 2), (base, base + 2)]
        for t, lit in enumerate(c):
            clause_vertex[(j, abs(lit))] = base + t
    for var in sorted({abs(l) for c in clauses for l in c}):
        occ = [j for j, c in enumerate(clauses) if any(abs(l) == var for l in c)]
        base = len(labels)
        d = len(occ)
        for i in range(d):
            labels += [var, -var]
        cyc = list(range(base, base + 2 * d))
        # for d = 1 the "cycle" is a single edge; duplicates are merged below
        edges += [(cyc[i], cyc[(i + 1) % (2 * d)]) for i in range(2 * d)]
        for i, j in enumerate(occ):
            wv = clause_vertex[(j, var)]
            target = cyc[2 * i] if labels[wv] > 0 else cyc[2 * i + 1]
            edges.append((wv, target))
    uniq = sorted({(min(a, b), max(a, b)) for a, b in edges})
    p = len(clauses)
    return _with_meta(CrossingGraph.from_edges(len(labels), uniq), family="nae3sat",
                      params={"clauses": [list(c) for c in clauses]}, seed=None,
                      labels=labels,
                      ground_truth={"pair_target": 4 * p,
                                    "nae_satisfiable": nae_satisfiable(clauses)})


# -- recognizers ------------------------------------------------------------

def is_tree(x: CrossingGraph) -> bool:
    return x.n >= 1 and x.m == x.n - 1 and len(x.components()) == 1


def is_caterpillar(x: CrossingGraph) -> bool:
    """A tree whose non-leaf vertices induce a path."""
    if not is_tree(x):
        return False
    inner = [v for v in range(x.n) if x.degree(v) > 1]
    if len(inner) <= 1:
        return True
    sub, _ = x.induced(inner)
    return is_tree(sub) and sub.max_degree() <= 2


def is_series_parallel(x: CrossingGraph) -> bool:
    """No K4 minor: degree-<=1 deletions and degree-2 suppressions (merging
    parallel edges) reduce the graph to nothing."""
    adj = {v: set(x.adjacency[v]) for v in range(x.n)}
    stack = [v for v in adj if len(adj[v]) <= 2]
    while stack:
        v = stack.pop()
        if v not in adj or len(adj[v]) > 2:
            continue
        nb = list(adj.pop(v))
        for u in nb:
            adj[u].discard(v)
        if len(nb) == 2:
            a, b = nb
            adj[a].add(b)
            adj[b].add(a)
        stack.extend(u for u in nb if len(adj[u]) <= 2)
    return not adj


def is_planar(x: CrossingGraph) -> bool:
    import networkx as nx

    g = nx.Graph()
    g.add_nodes_from(range(x.n))
    g.add_edges_from(x.edges())
    return nx.check_planarity(g)[0]


# -- dispatch ---------------------------------------------------------------

@dataclass(frozen=True)
class InstanceSpec:
    family: str
    params: dict = field(default_factory=dict)
    seed: int = 0

    def __post_init__(self):
        if self.family not in FAMILIES:
            raise InstanceError(f"unknown family {self.family!r}; expected one of {FAMILIES}")

    @property
    def instance_id(self) -> str:
        bits = [self.family] + [f"{k}={self.params[k]}" for k in sorted(self.params)
                                if k not in ("clauses", "h")]
        return "-".join(bits + [f"s{self.seed}"])


def generate(spec: InstanceSpec) -> tuple[GeometricGraph | CrossingGraph, dict]:
    """Build the instance plus a sidecar dict (spec, seed, ground truth)."""
    p, s = spec.params, spec.seed
    side = {"family": spec.family, "params": dict(p), "seed": s}
    if spec.family == "random-geometric":
        inst = gen_random_geometric(int(p["n"]), float(p["d"]), s)
        return inst, side
    if spec.family == "caterpillar":
        x = gen_caterpillar(int(p["n"]), s, p.get("spine"))
        assert is_caterpillar(x)
    elif spec.family == "random-tree":
        x = gen_random_tree(int(p["n"]), s)
        assert is_tree(x)
    elif spec.family == "series-parallel":
        x = gen_series_parallel(int(p["n"]), float(p["d"]), s)
    elif spec.family == "planar":
        x = gen_planar(int(p["n"]), float(p["d"]), s)
    elif spec.family == "fig3-family":
        x = gen_fig3_family(int(p["ell"]))
        assert is_caterpillar(x)
    elif spec.family == "star-plus-graph":
        from .geometry import parse_crossing_graph
        h = p["h"] if isinstance(p["h"], CrossingGraph) else parse_crossing_graph(p["h"])
        x = gen_star_plus(h, int(p["k"]))
        side["params"] = {"k": p["k"], "h": [list(e) for e in h.edges()], "h_vertices": h.n}
    else:
        x = gen_nae3sat(p["clauses"])
    if "ground_truth" in x.meta:
        side["ground_truth"] = x.meta["ground_truth"]
    return x, side
