"""Experiment harness: run heuristics and the exact solver over generated
instances, then aggregate approximation ratios, optimality and runtimes per
family.

Rows are written in long form (one per instance and algorithm) with the
column order fixed by :data:`ROW_COLUMNS`; aggregates use
:data:`AGG_COLUMNS`.  Floats are written with ``repr`` so the aggregates can
be recomputed bit-exactly from the row file.
"""

from __future__ import annotations

import csv
import io
import json
import math
import time
from concurrent.futures import ProcessPoolExecutor, as_completed
from dataclasses import dataclass, field
from pathlib import Path

from .exact import Limits, exact_solve
from .generators import InstanceSpec, generate
from .geometry import CrossingGraph, build_crossing_graph
from .greedy import HEURISTIC_NAMES, GreedyConfig, run_heuristic

__all__ = ["RunConfig", "BenchRecord", "ROW_COLUMNS", "AGG_COLUMNS", "run_instance",
           "run_bench", "record_rows", "aggregate", "read_rows", "write_csv",
           "load_spec_set", "approximation_ratio"]

ROW_COLUMNS = (
    "instance_id", "family", "params", "seed", "n_x", "crossings", "free_edges",
    "algorithm", "status", "mu", "display_mu", "seconds",
    "exact_status", "exact_mu", "best_known", "upper_bound", "approx_ratio", "gap",
    "exact_seconds",
)

AGG_COLUMNS = (
    "family", "algorithm", "instances", "with_exact", "pct_opt",
    "ratio_mean", "ratio_min", "ratio_max", "ratio_sd", "mean_seconds",
    "timeouts", "mean_gap", "mean_exact_seconds",
)


@dataclass(frozen=True)
class RunConfig:
    algorithms: tuple[str, ...] = HEURISTIC_NAMES
    budget_exact: float = 60.0
    budget_heur: float = 10.0
    width_cap: int = 12
    exact_max_vertices: int = 22
    workers: int = 1
    out_dir: str | None = None

    def __post_init__(self):
        if not self.algorithms:
            raise ValueError("at least one algorithm is required")
        if self.budget_exact <= 0 or self.budget_heur <= 0:
            raise ValueError("budgets must be positive")
        for a in self.algorithms:
            GreedyConfig.from_name(a)


@dataclass
class BenchRecord:
    instance_id: str
    family: str
    params: dict
    seed: int
    n_x: int
    crossings: int
    free_edges: int
    runs: dict[str, dict] = field(default_factory=dict)  # algorithm -> {mu, seconds, status}
    exact: dict = field(default_factory=dict)  # status, mu, best_known, upper_bound, seconds

    @property
    def gap(self) -> float | None:
        if self.exact.get("status") == "optimal":
            return 0.0
        ub, best = self.exact.get("upper_bound"), self.exact.get("best_known")
        if ub and best is not None:
            return (ub - best) / ub
        return None


def approximation_ratio(mu: int | None, exact_mu: int | None) -> float | None:
    """Heuristic over exact, on crossing edges only; an empty crossing graph
    counts as solved optimally."""
    if mu is None or exact_mu is None:
        return None
    if exact_mu == 0:
        return 1.0
    return mu / exact_mu


def _crossing_graph(inst) -> tuple[CrossingGraph, int]:
    if isinstance(inst, CrossingGraph):
        return inst, inst.free_edge_count
    x = build_crossing_graph(inst)
    return x, x.free_edge_count


def run_instance(spec: InstanceSpec, cfg: RunConfig) -> BenchRecord:
    inst, side = generate(spec)
    x, free = _crossing_graph(inst)
    rec = BenchRecord(spec.instance_id, spec.family, side["params"], spec.seed, x.n, x.m, free)
    for name in cfg.algorithms:
        run = run_heuristic(x, GreedyConfig.from_name(name, spec.seed, width_cap=cfg.width_cap,
                                                      time_budget=cfg.budget_heur))
        status = run.status
        if status == "ok" and run.seconds > cfg.budget_heur:
            status = "over_budget"
        rec.runs[name] = {"mu": run.mu, "seconds": run.seconds, "status": status}
    res = exact_solve(x, Limits(max_vertices=cfg.exact_max_vertices,
                                time_budget=cfg.budget_exact), seed=spec.seed)
    best = max((r["mu"] for r in rec.runs.values() if r["mu"] is not None), default=None)
    best_known = res.best_known
    if res.status == "too_large":
        best_known = best
    rec.exact = {"status": res.status, "mu": res.mu_star, "best_known": best_known,
                 "upper_bound": res.upper_bound, "seconds": res.seconds}
    if res.status == "too_large":
        from .story import upper_bounds
        rec.exact["upper_bound"] = upper_bounds(x, width_cap=cfg.width_cap).best()
    return rec


def _num(v) -> str:
    if v is None:
        return ""
    if isinstance(v, float):
        return repr(v)
    return str(v)


def record_rows(rec: BenchRecord) -> list[dict[str, str]]:
    rows = []
    exact_mu = rec.exact.get("mu") if rec.exact.get("status") == "optimal" else None
    gap = rec.gap
    for name, run in rec.runs.items():
        mu = run["mu"]
        rows.append({
            "instance_id": rec.instance_id,
            "family": rec.family,
            "params": json.dumps(rec.params, sort_keys=True),
            "seed": str(rec.seed),
            "n_x": str(rec.n_x),
            "crossings": str(rec.crossings),
            "free_edges": str(rec.free_edges),
            "algorithm": name,
            "status": run["status"],
            "mu": _num(mu),
            "display_mu": _num(None if mu is None else mu + rec.free_edges),
            "seconds": _num(run["seconds"]),
            "exact_status": rec.exact.get("status", ""),
            "exact_mu": _num(exact_mu),
            "best_known": _num(rec.exact.get("best_known")),
            "upper_bound": _num(rec.exact.get("upper_bound")),
            "approx_ratio": _num(approximation_ratio(mu, exact_mu)),
            "gap": _num(None if exact_mu is not None else gap),
            "exact_seconds": _num(rec.exact.get("seconds")),
        })
    return rows


def _mean(xs):
    return math.fsum(xs) / len(xs) if xs else None


def _pstdev(xs):
    if not xs:
        return None
    mu = _mean(xs)
    return math.sqrt(math.fsum((v - mu) ** 2 for v in xs) / len(xs))


def aggregate(rows: list[dict[str, str]]) -> list[dict[str, str]]:
    """Per (family, algorithm) statistics computed from row strings only."""
    groups: dict[tuple[str, str], list[dict[str, str]]] = {}
    for r in rows:
        groups.setdefault((r["family"], r["algorithm"]), []).append(r)
    out = []
    for (fam, alg), rs in sorted(groups.items()):
        ratios = [float(r["approx_ratio"]) for r in rs if r["approx_ratio"] != ""]
        with_exact = [r for r in rs if r["exact_mu"] != ""]
        opt = [r for r in with_exact if r["mu"] != "" and int(r["mu"]) == int(r["exact_mu"])]
        secs = [float(r["seconds"]) for r in rs if r["seconds"] != ""]
        gaps = [float(r["gap"]) for r in rs if r["gap"] != ""]
        esecs = [float(r["exact_seconds"]) for r in rs if r["exact_seconds"] != ""]
        out.append({
            "family": fam,
            "algorithm": alg,
            "instances": str(len(rs)),
            "with_exact": str(len(with_exact)),
            "pct_opt": _num(100.0 * len(opt) / len(with_exact) if with_exact else None),
            "ratio_mean": _num(_mean(ratios)),
            "ratio_min": _num(min(ratios) if ratios else None),
            "ratio_max": _num(max(ratios) if ratios else None),
            "ratio_sd": _num(_pstdev(ratios)),
            "mean_seconds": _num(_mean(secs)),
            "timeouts": str(sum(1 for r in rs if r["exact_status"] == "timeout")),
            "mean_gap": _num(_mean(gaps)),
            "mean_exact_seconds": _num(_mean(esecs)),
        })
    return out


def write_csv(rows: list[dict[str, str]], columns, fh) -> None:
    w = csv.DictWriter(fh, fieldnames=list(columns), lineterminator="\n")
    w.writeheader()
    w.writerows(rows)


def read_rows(text: str) -> list[dict[str, str]]:
    rows = list(csv.DictReader(io.StringIO(text)))
    if rows and tuple(rows[0].keys()) != ROW_COLUMNS:
        raise ValueError("not a bench row table (column header mismatch)")
    return rows


def load_spec_set(obj) -> list[InstanceSpec]:
    """Spec-set JSON: a list of ``{"family", "params", "seeds": [...]}`` or
    ``{"family", "params", "count": k, "seed0": s}`` entries."""
    if isinstance(obj, (str, bytes)):
        obj = json.loads(obj)
    specs = []
    for i, ent in enumerate(obj):
        if "family" not in ent:
            raise ValueError(f"spec entry {i}: missing 'family'")
        seeds = ent.get("seeds")
        if seeds is None:
            s0 = int(ent.get("seed0", 0))
            seeds = range(s0, s0 + int(ent.get("count", 1)))
        for s in seeds:
            specs.append(InstanceSpec(ent["family"], dict(ent.get("params", {})), int(s)))
    return specs


def _write_outputs(records: list[BenchRecord], out_dir: Path, cfg: RunConfig) -> dict:
    records = sorted(records, key=lambda r: r.instance_id)
    rows = [row for rec in records for row in record_rows(rec)]
    aggs = aggregate(rows)
    out_dir.mkdir(parents=True, exist_ok=True)
    with open(out_dir / "bench_rows.csv", "w", newline="") as fh:
        write_csv(rows, ROW_COLUMNS, fh)
    with open(out_dir / "bench_aggregates.csv", "w", newline="") as fh:
        write_csv(aggs, AGG_COLUMNS, fh)
    doc = {"config": {"algorithms": list(cfg.algorithms), "budget_exact": cfg.budget_exact,
                      "budget_heur": cfg.budget_heur, "width_cap": cfg.width_cap},
           "rows": rows, "aggregates": aggs}
    (out_dir / "bench.json").write_text(json.dumps(doc, indent=1) + "\n")
    return doc


def run_bench(specs: list[InstanceSpec], cfg: RunConfig, *, progress=None) -> dict:
    """Run everything; partial results are written if interrupted."""
    out_dir = Path(cfg.out_dir or "bench_out")
    out_dir.mkdir(parents=True, exist_ok=True)
    records: list[BenchRecord] = []
    partial = out_dir / "bench_rows.partial.csv"
    fh = open(partial, "w", newline="")
    writer = csv.DictWriter(fh, fieldnames=list(ROW_COLUMNS), lineterminator="\n")
    writer.writeheader()

    def done(rec):
        records.append(rec)
        writer.writerows(record_rows(rec))
        fh.flush()
        if progress:
            progress(rec)

    t0 = time.monotonic()
    try:
        if cfg.workers > 1:
            with ProcessPoolExecutor(cfg.workers) as pool:
                futs = [pool.submit(run_instance, s, cfg) for s in specs]
                for f in as_completed(futs):
                    done(f.result())
        else:
            for s in specs:
                done(run_instance(s, cfg))
    finally:
        fh.close()
        doc = _write_outputs(records, out_dir, cfg)
    if len(records) == len(specs):
        partial.unlink()
    doc["seconds"] = time.monotonic() - t0
    return doc
