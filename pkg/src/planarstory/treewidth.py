"""Tree decompositions and maximum pairs of disjoint independent sets.

The pair DP colors each bag red (first set), blue (second set) or white
(neither) and keeps, per coloring, the Pareto frontier of achievable
``(|red|, |blue|)`` sizes in the subtree.  Bag colorings are indexed as
``sum(gamma_i * 3**i)`` with white=0, red=1, blue=2 over a fixed bag order in
which the vertices shared with the parent come last.
"""

from __future__ import annotations

import random
import time
from dataclasses import dataclass, field
from itertools import combinations

from .geometry import CrossingGraph

__all__ = [
    "WidthCapExceeded",
    "DPTimeout",
    "TreeDecomposition",
    "min_fill_in_decomposition",
    "verify_decomposition",
    "pareto_front",
    "pareto_pairs",
    "maximum_pair",
    "maximum_pair_size",
    "degree2_maximum_pair",
    "encode_coloring",
    "decode_coloring",
    "read_pace_td",
    "write_pace_td",
]

WHITE, RED, BLUE = 0, 1, 2
DEFAULT_WIDTH_CAP = 12


class WidthCapExceeded(RuntimeError):
    def __init__(self, width: int, cap: int):
        super().__init__(f"tree decomposition width {width} exceeds cap {cap}")
        self.width = width
        self.cap = cap


class DPTimeout(RuntimeError):
    pass


@dataclass(frozen=True)
class TreeDecomposition:
    bags: tuple[frozenset[int], ...]
    parent: tuple[int | None, ...]
    root: int

    @property
    def width(self) -> int:
        return max((len(b) for b in self.bags), default=0) - 1

    @property
    def tree_edges(self) -> list[tuple[int, int]]:
        return [(p, c) for c, p in enumerate(self.parent) if p is not None]

    def children(self) -> list[list[int]]:
        ch: list[list[int]] = [[] for _ in self.bags]
        for c, p in enumerate(self.parent):
            if p is not None:
                ch[p].append(c)
        return ch

    def postorder(self) -> list[int]:
        ch = self.children()
        out, stack = [], [(self.root, False)]
        while stack:
            v, done = stack.pop()
            if done:
                out.append(v)
                continue
            stack.append((v, True))
            for c in reversed(ch[v]):
                stack.append((c, False))
        return out


def encode_coloring(colors) -> int:
    return sum(c * 3 ** i for i, c in enumerate(colors))


def decode_coloring(index: int, k: int) -> tuple[int, ...]:
    out = []
    for _ in range(k):
        index, c = divmod(index, 3)
        out.append(c)
    if index:
        raise ValueError("coloring index too large for bag size")
    return tuple(out)


# -- decomposition ----------------------------------------------------------

def min_fill_in_decomposition(x: CrossingGraph, width_cap: int = DEFAULT_WIDTH_CAP,
                              seed: int = 0) -> TreeDecomposition:
    """Eliminate the vertex needing fewest fill edges (ties: fewer neighbors,
    then a seeded random rank); bags are closed elimination neighborhoods.

    Raises :class:`WidthCapExceeded` as soon as a bag is wider than the cap;
    its ``width`` is the width of that bag.
    """
    n = x.n
    if n == 0:
        return TreeDecomposition((frozenset(),), (None,), 0)
    adj = [set(a) for a in x.adjacency]
    rank = list(range(n))
    random.Random(seed).shuffle(rank)

    def fill(v):
        nb = adj[v]
        missing = 0
        for a, b in combinations(nb, 2):
            if b not in adj[a]:
                missing += 1
        return missing

    fills = [fill(v) for v in range(n)]
    alive = set(range(n))
    position = [0] * n
    bags = []
    elim_nbrs = []
    for step in range(n):
        v = min(alive, key=lambda w: (fills[w], len(adj[w]), rank[w]))
        nb = adj[v]
        if len(nb) > width_cap:
            raise WidthCapExceeded(len(nb), width_cap)
        bags.append(frozenset(nb | {v}))
        elim_nbrs.append(set(nb))
        position[v] = step
        for a, b in combinations(nb, 2):
            if b not in adj[a]:
                adj[a].add(b)
                adj[b].add(a)
        for a in nb:
            adj[a].discard(v)
        alive.discard(v)
        affected = set(nb)
        for a in nb:
            affected |= adj[a]
        for w in affected:
            if w in alive:
                fills[w] = fill(w)
    elim_order = sorted(range(n), key=lambda v: position[v])
    parent: list[int | None] = [None] * n
    roots = []
    for step, v in enumerate(elim_order):
        nb = elim_nbrs[step]
        if nb:
            parent[step] = min(position[u] for u in nb)
        else:
            roots.append(step)
    root = roots[-1]
    for r in roots[:-1]:
        parent[r] = root  # disjoint components: joining their roots is safe
    return TreeDecomposition(tuple(bags), tuple(parent), root)


def verify_decomposition(x: CrossingGraph, td: TreeDecomposition) -> bool:
    """Coverage, edge containment and connected occurrence subtrees."""
    nb = len(td.bags)
    if len(td.parent) != nb or not 0 <= td.root < nb or td.parent[td.root] is not None:
        return False
    # the parent links must form a single tree rooted at td.root
    ch = td.children()
    seen, stack = {td.root}, [td.root]
    while stack:
        v = stack.pop()
        for c in ch[v]:
            if c in seen:
                return False
            seen.add(c)
            stack.append(c)
    if len(seen) != nb:
        return False
    covered = set().union(*td.bags) if td.bags else set()
    if covered != set(range(x.n)):
        return False
    occurs: dict[int, list[int]] = {v: [] for v in range(x.n)}
    for i, b in enumerate(td.bags):
        for v in b:
            occurs[v].append(i)
    for u, v in x.edges():
        if not any(v in td.bags[i] for i in occurs[u]):
            return False
    for v, nodes in occurs.items():
        # a node set of a rooted tree is connected iff exactly one of its
        # members has its parent outside the set
        s = set(nodes)
        tops = sum(1 for i in nodes if td.parent[i] is None or td.parent[i] not in s)
        if tops != 1:
            return False
    return True


# -- Pareto DP --------------------------------------------------------------

def pareto_front(entries):
    """Non-dominated ``(alpha, beta, *payload)`` entries, alpha descending.

    Among equal ``(alpha, beta)`` the earliest entry wins."""
    ordered = sorted(enumerate(entries), key=lambda t: (-t[1][0], -t[1][1], t[0]))
    out, best_beta = [], -1
    for _, e in ordered:
        if e[1] > best_beta:
            out.append(e)
            best_beta = e[1]
    return out


def _bag_colorings(bag_order, nbr_sets):
    """Yield ``(index, colors)`` for colorings whose red and blue classes are
    each independent."""
    k = len(bag_order)
    colors = [0] * k

    def rec(i, idx, reds, blues):
        if i == k:
            yield idx, tuple(colors)
            return
        v = bag_order[i]
        colors[i] = WHITE
        yield from rec(i + 1, idx, reds, blues)
        if not (nbr_sets[v] & reds):
            colors[i] = RED
            yield from rec(i + 1, idx + 3 ** i, reds | {v}, blues)
        if not (nbr_sets[v] & blues):
            colors[i] = BLUE
            yield from rec(i + 1, idx + 2 * 3 ** i, reds, blues | {v})
        colors[i] = WHITE

    yield from rec(0, 0, frozenset(), frozenset())


@dataclass
class _NodeTable:
    order: list[int]
    n_private: int  # vertices not shared with the parent come first
    table: dict[int, list[tuple]] = field(default_factory=dict)


def _dp_with_trace(x: CrossingGraph, td: TreeDecomposition, deadline: float | None):
    """Run the DP keeping every node table for witness reconstruction."""
    nbr = x.nbr_sets
    ch = td.children()
    tables: dict[int, _NodeTable] = {}
    for node in td.postorder():
        if deadline is not None and time.monotonic() > deadline:
            raise DPTimeout("pair DP exceeded its time budget")
        bag = td.bags[node]
        p = td.parent[node]
        shared = sorted(bag & td.bags[p]) if p is not None else []
        private = sorted(bag - set(shared))
        order = private + shared
        pos = {v: i for i, v in enumerate(order)}
        reduced = []
        for c in ch[node]:
            ct = tables[c]
            low = 3 ** ct.n_private
            groups: dict[int, list] = {}
            for cidx, entries in ct.table.items():
                g = groups.setdefault(cidx // low, [])
                for j, e in enumerate(entries):
                    g.append((e[0], e[1], cidx, j))
            front = {s: pareto_front(g) for s, g in groups.items()}
            reduced.append(([pos[v] for v in ct.order[ct.n_private:]], front))
        nt = _NodeTable(order, len(private))
        for idx, colors in _bag_colorings(order, nbr):
            cur = [(colors.count(RED), colors.count(BLUE), ())]
            for spos, front in reduced:
                sidx, a_i, b_i = 0, 0, 0
                for t, q in enumerate(spos):
                    col = colors[q]
                    sidx += col * 3 ** t
                    a_i += col == RED
                    b_i += col == BLUE
                opts = front.get(sidx)
                if not opts:
                    cur = []
                    break
                cur = pareto_front([(a + a2 - a_i, b + b2 - b_i, prov + ((cidx, j),))
                                    for a, b, prov in cur for a2, b2, cidx, j in opts])
            if cur:
                nt.table[idx] = cur
        tables[node] = nt
    return tables


def _root_front(td, tables):
    rt = tables[td.root]
    entries = [(e[0], e[1], idx, j) for idx, lst in rt.table.items() for j, e in enumerate(lst)]
    return pareto_front(entries)


def pareto_pairs(x: CrossingGraph, td: TreeDecomposition | None = None, *,
                 width_cap: int = DEFAULT_WIDTH_CAP,
                 deadline: float | None = None) -> list[tuple[int, int]]:
    """Pareto frontier of ``(|I1|, |I2|)`` over disjoint independent pairs,
    alpha strictly decreasing and beta strictly increasing."""
    if td is None:
        td = min_fill_in_decomposition(x, width_cap)
    tables = _dp_with_trace(x, td, deadline)
    return [(a, b) for a, b, _, _ in _root_front(td, tables)]


def maximum_pair(x: CrossingGraph, td: TreeDecomposition | None = None, *,
                 width_cap: int = DEFAULT_WIDTH_CAP, seed: int = 0,
                 deadline: float | None = None) -> tuple[frozenset[int], frozenset[int]]:
    """A Pareto-optimal maximum pair ``(I1, I2)`` with ``|I1| <= |I2|``.

    Picks the frontier entry maximizing ``min`` then ``max``; among equal
    entries the first in back-trace order.
    """
    if td is None:
        td = min_fill_in_decomposition(x, width_cap, seed)
    tables = _dp_with_trace(x, td, deadline)
    front = _root_front(td, tables)
    best = max(front, key=lambda e: (min(e[0], e[1]), max(e[0], e[1])))
    ch = td.children()
    red, blue = set(), set()
    stack = [(td.root, best[2], best[3])]
    while stack:
        node, idx, j = stack.pop()
        nt = tables[node]
        colors = decode_coloring(idx, len(nt.order))
        for v, col in zip(nt.order, colors):
            if col == RED:
                red.add(v)
            elif col == BLUE:
                blue.add(v)
        prov = nt.table[idx][j][2]
        for c, (cidx, cj) in zip(ch[node], prov):
            stack.append((c, cidx, cj))
    i1, i2 = frozenset(red), frozenset(blue)
    assert (len(i1), len(i2)) == (best[0], best[1]), "back-trace disagrees with DP sizes"
    if len(i1) > len(i2):
        i1, i2 = i2, i1
    return i1, i2


def maximum_pair_size(x: CrossingGraph, *, width_cap: int = DEFAULT_WIDTH_CAP) -> int:
    """``max min(|I1|, |I2|)``; dispatches to the linear construction on
    graphs of maximum degree two."""
    if x.max_degree() <= 2:
        i1, i2, _ = degree2_maximum_pair(x)
        return min(len(i1), len(i2))
    front = pareto_pairs(x, width_cap=width_cap)
    return max(min(a, b) for a, b in front)


# -- maximum degree two -----------------------------------------------------

def _walk(x: CrossingGraph, comp: list[int]) -> tuple[list[int], bool]:
    """Order a path or cycle component along its edges; flag cycles."""
    ends = [v for v in comp if x.degree(v) <= 1]
    cycle = not ends
    start = min(ends) if ends else comp[0]
    seq, seen = [start], {start}
    while len(seq) < len(comp):
        nxt = [u for u in x.adjacency[seq[-1]] if u not in seen]
        seq.append(min(nxt))
        seen.add(seq[-1])
    return seq, cycle


def degree2_maximum_pair(x: CrossingGraph) -> tuple[frozenset[int], frozenset[int], int]:
    """Linear-time maximum pair on paths and cycles, plus the predicted
    optimum ``min(|I1|, |I2|)``, minus one when there is an even cycle and no
    odd path."""
    if x.max_degree() > 2:
        raise ValueError("degree2_maximum_pair needs maximum degree <= 2")
    paths, cycles = [], []
    for comp in x.components():
        seq, cyc = _walk(x, comp)
        (cycles if cyc else paths).append(seq)
    odd_paths = [p for p in paths if len(p) % 2 == 1]
    # O2 gets the larger half so that 0 <= |O2| - |O1| <= 1
    o2 = {id(p) for p in odd_paths[len(odd_paths) // 2:]}
    i1: set[int] = set()
    it: set[int] = set()
    for p in paths:
        evens, odds = p[0::2], p[1::2]
        if id(p) in o2:
            i1.update(odds)
            it.update(evens)
        else:
            i1.update(evens)
            it.update(odds)
    even_cycle = False
    for c in cycles:
        k = len(c)
        if k % 2 == 0:
            even_cycle = True
            i1.update(c[0::2])
            it.update(c[1::2])
        else:
            i1.update(c[0:k - 1:2])
            it.update(c[1:k - 1:2])  # the last vertex of an odd cycle stays out
    mu = min(len(i1), len(it))
    if even_cycle and not odd_paths:
        mu -= 1
    return frozenset(i1), frozenset(it), mu


# -- PACE .td format ----------------------------------------------------------

def write_pace_td(td: TreeDecomposition, n_vertices: int) -> str:
    lines = [f"s td {len(td.bags)} {td.width + 1} {n_vertices}"]
    for i, b in enumerate(td.bags, start=1):
        lines.append(" ".join(["b", str(i)] + [str(v + 1) for v in sorted(b)]))
    for p, c in td.tree_edges:
        lines.append(f"{p + 1} {c + 1}")
    return "\n".join(lines) + "\n"


def read_pace_td(text: str, root: int = 0) -> TreeDecomposition:
    bags: list[frozenset[int]] = []
    edges = []
    declared = None
    for lineno, raw in enumerate(text.splitlines(), start=1):
        line = raw.strip()
        if not line or line.startswith("c"):
            continue
        parts = line.split()
        if parts[0] == "s":
            if len(parts) != 5 or parts[1] != "td":
                raise ValueError(f"line {lineno}: bad s-line")
            declared = int(parts[2])
            bags = [frozenset()] * declared
        elif parts[0] == "b":
            if declared is None:
                raise ValueError(f"line {lineno}: b-line before s-line")
            i = int(parts[1]) - 1
            bags[i] = frozenset(int(t) - 1 for t in parts[2:])
        else:
            edges.append((int(parts[0]) - 1, int(parts[1]) - 1))
    if declared is None:
        raise ValueError("missing s-line")
    adj: list[list[int]] = [[] for _ in bags]
    for a, b in edges:
        adj[a].append(b)
        adj[b].append(a)
    parent: list[int | None] = [None] * len(bags)
    seen, stack = {root}, [root]
    while stack:
        v = stack.pop()
        for u in adj[v]:
            if u not in seen:
                seen.add(u)
                parent[u] = v
                stack.append(u)
    return TreeDecomposition(tuple(bags), tuple(parent), root)
