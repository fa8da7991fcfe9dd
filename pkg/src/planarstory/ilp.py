"""Integer program for the max-min frame story, with an LP-file exporter and
a decoder for external solutions.

Variables: ``x_e_t`` (``e`` shown in frame ``t``), ``z_e_t`` (``e`` first
appears in frame ``t``), ``y_min`` (the smallest frame).  Constraint groups
are keyed 2..8 as in :data:`GROUPS`.
"""

from __future__ import annotations

import json
from dataclasses import dataclass, field

from .geometry import CrossingGraph
from .story import PlanarStory, StoryError, simulate

__all__ = ["GROUPS", "IlpModel", "IlpRejected", "build_ilp", "export_ilp", "shrunk_tau",
           "parse_solution", "decode_ilp_solution"]

GROUPS = {
    2: "no two crossing edges in the same frame",
    3: "every edge is shown at least once",
    4: "every frame has at least y_min edges",
    5: "every edge starts exactly once",
    6: "an edge turns on only when it starts",
    7: "edges of the first frame start there",
    8: "at most one edge starts per later frame",
}

_TOL = 1e-6


@dataclass
class Constraint:
    name: str
    group: int
    terms: dict[str, int]
    sense: str  # "<=", ">=", "="
    rhs: int


@dataclass
class IlpModel:
    n: int
    tau: int
    constraints: list[Constraint]
    meta: dict = field(default_factory=dict)

    @property
    def binaries(self) -> list[str]:
        return ([f"x_{e}_{t}" for e in range(self.n) for t in range(1, self.tau + 1)]
                + [f"z_{e}_{t}" for e in range(self.n) for t in range(1, self.tau + 1)])

    def count(self, group: int) -> int:
        return sum(1 for c in self.constraints if c.group == group)

    def to_lp(self) -> str:
        out = [f"\\ max-min frame story model: n={self.n} tau={self.tau}",
               f"\\ tau_source={self.meta.get('tau_source', 'given')}",
               "Maximize", " obj: y_min", "Subject To"]
        for c in self.constraints:
            parts = []
            for var, coef in c.terms.items():
                sign = "-" if coef < 0 else "+"
                mag = "" if abs(coef) == 1 else f"{abs(coef)} "
                parts.append(f"{sign} {mag}{var}")
            if parts[0].startswith("+ "):
                parts[0] = parts[0][2:]
            # wrap long rows; LP readers accept continuation lines
            rows = [" ".join(parts[i:i + 8]) for i in range(0, len(parts), 8)]
            out.append(f" {c.name}: " + "\n   ".join(rows) + f" {c.sense} {c.rhs}")
        out += ["Bounds", " y_min >= 0", "Binaries"]
        names = self.binaries
        for i in range(0, len(names), 10):
            out.append(" " + " ".join(names[i:i + 10]))
        out.append("End")
        return "\n".join(out) + "\n"

    def to_json(self) -> str:
        doc = {
            "sense": "maximize",
            "objective": {"y_min": 1},
            "n": self.n,
            "tau": self.tau,
            "binaries": self.binaries,
            "continuous": ["y_min"],
            "constraints": [{"name": c.name, "group": c.group, "terms": c.terms,
                             "sense": c.sense, "rhs": c.rhs} for c in self.constraints],
            "meta": self.meta,
        }
        return json.dumps(doc, indent=1, sort_keys=True) + "\n"


def shrunk_tau(x: CrossingGraph, seed: int = 0) -> int:
    """``n - LB + 1`` with ``LB`` the AG-1c value: an optimal story starts
    with at least ``mu* >= LB`` edges, so it needs at most that many frames."""
    from .greedy import GreedyConfig, run_heuristic

    if x.n == 0:
        return 1
    run = run_heuristic(x, GreedyConfig.from_name("ag-1c2a", seed))
    lb = run.mu if run.status == "ok" else 1
    return max(1, x.n - max(lb, 1) + 1)


def build_ilp(x: CrossingGraph, tau: int | None = None, tau_source: str | None = None) -> IlpModel:
    n = x.n
    meta = {"tau_source": tau_source or ("given" if tau is not None else "default n_X")}
    if tau is None:
        tau = max(1, n)
    if tau < 1:
        raise ValueError("tau must be >= 1")
    T = range(1, tau + 1)
    cons: list[Constraint] = []
    for e, f in x.edges():
        for t in T:
            cons.append(Constraint(f"c2_{e}_{f}_{t}", 2, {f"x_{e}_{t}": 1, f"x_{f}_{t}": 1}, "<=", 1))
    for e in range(n):
        cons.append(Constraint(f"c3_{e}", 3, {f"x_{e}_{t}": 1 for t in T}, ">=", 1))
    for t in T:
        terms = {f"x_{e}_{t}": 1 for e in range(n)}
        terms["y_min"] = -1
        cons.append(Constraint(f"c4_{t}", 4, terms, ">=", 0))
    for e in range(n):
        cons.append(Constraint(f"c5_{e}", 5, {f"z_{e}_{t}": 1 for t in T}, "=", 1))
    for e in range(n):
        for t in range(2, tau + 1):
            cons.append(Constraint(f"c6_{e}_{t}", 6, {f"z_{e}_{t}": 1, f"x_{e}_{t - 1}": 1,
                                                      f"x_{e}_{t}": -1}, ">=", 0))
    for e in range(n):
        cons.append(Constraint(f"c7_{e}", 7, {f"z_{e}_1": 1, f"x_{e}_1": -1}, ">=", 0))
    for t in range(2, tau + 1):
        cons.append(Constraint(f"c8_{t}", 8, {f"z_{e}_{t}": 1 for e in range(n)}, "<=", 1))
    meta.update(n_x=n, m_x=x.m, tau=tau)
    return IlpModel(n, tau, cons, meta)


def export_ilp(x: CrossingGraph, tau: int | None = None, format: str = "lp",
               tau_source: str | None = None) -> str:
    """Model text in ``lp`` (solver-agnostic LP file) or ``json`` form."""
    model = build_ilp(x, tau, tau_source)
    if format == "lp":
        return model.to_lp()
    if format == "json":
        return model.to_json()
    raise ValueError(f"unknown ILP format {format!r}; expected 'lp' or 'json'")


# -- decoding ---------------------------------------------------------------

class IlpRejected(ValueError):
    """A solution that breaks the model; ``group`` names the constraint."""

    def __init__(self, group: int | str, detail: str):
        self.group = group
        super().__init__(f"constraint ({group}) violated: {detail}")


def parse_solution(text: str) -> dict[str, float]:
    """``name value`` lines; blank lines, ``#`` comments and lines that do
    not end in a number (solver headers) are skipped."""
    vals: dict[str, float] = {}
    for line in text.splitlines():
        line = line.split("#", 1)[0].strip()
        parts = line.split()
        if len(parts) < 2:
            continue
        try:
            vals[parts[0]] = float(parts[-1])
        except ValueError:
            continue
    return vals


def _binary(vals, name):
    if name not in vals:
        raise IlpRejected("missing", f"no value for {name}")
    v = vals[name]
    if abs(v) <= _TOL:
        return 0
    if abs(v - 1) <= _TOL:
        return 1
    raise IlpRejected("binary", f"{name} = {v} is not 0/1")


def decode_ilp_solution(x: CrossingGraph, solution: str | dict[str, float],
                        tau: int | None = None) -> tuple[PlanarStory, int]:
    """Rebuild the story from a solver's variable values.

    The initial frame is ``{e : x_e_1 = 1}``; later edges enter in the order
    of their ``z`` activations (no-op frames are skipped).  Every constraint
    group is checked first and the first violated one is reported.
    """
    vals = parse_solution(solution) if isinstance(solution, str) else dict(solution)
    n = x.n
    if tau is None:
        ts = [int(k.rsplit("_", 1)[1]) for k in vals if k.startswith("x_")]
        tau = max(ts, default=1)
    T = range(1, tau + 1)
    X = {(e, t): _binary(vals, f"x_{e}_{t}") for e in range(n) for t in T}
    Z = {(e, t): _binary(vals, f"z_{e}_{t}") for e in range(n) for t in T}
    for e, f in x.edges():
        for t in T:
            if X[e, t] + X[f, t] > 1:
                raise IlpRejected(2, f"crossing edges {e} and {f} both in frame {t}")
    for e in range(n):
        if not any(X[e, t] for t in T):
            raise IlpRejected(3, f"edge {e} is never shown")
    sizes = [sum(X[e, t] for e in range(n)) for t in T]
    y = vals.get("y_min", min(sizes))
    if y > min(sizes) + _TOL:
        raise IlpRejected(4, f"y_min = {y} exceeds a frame of size {min(sizes)}")
    for e in range(n):
        if sum(Z[e, t] for t in T) != 1:
            raise IlpRejected(5, f"edge {e} starts {sum(Z[e, t] for t in T)} times")
    for e in range(n):
        for t in range(2, tau + 1):
            if Z[e, t] + X[e, t - 1] < X[e, t]:
                raise IlpRejected(6, f"edge {e} reappears in frame {t} without starting")
    for e in range(n):
        if Z[e, 1] < X[e, 1]:
            raise IlpRejected(7, f"edge {e} in frame 1 without z_{e}_1")
    for t in range(2, tau + 1):
        if sum(Z[e, t] for e in range(n)) > 1:
            raise IlpRejected(8, f"{sum(Z[e, t] for e in range(n))} edges start in frame {t}")
    initial = [e for e in range(n) if X[e, 1]]
    order = [e for t in range(2, tau + 1) for e in range(n) if Z[e, t]]
    if not initial and order:
        # an empty first frame only lowers the objective; start from the first insertion
        initial, order = [order[0]], order[1:]
    story = PlanarStory.of(initial, order)
    try:
        trace = simulate(x, story)
    except StoryError as exc:  # cannot happen once groups 2-8 hold
        raise IlpRejected("story", str(exc)) from None
    return story, trace.mu
