"""``planarstory`` command line.

Exit codes: 0 success, 1 story invalid (``validate``), 2 usage error,
3 input parse error, 4 algorithm failure, 5 time budget exceeded.
"""

from __future__ import annotations

import argparse
import json
import sys
from pathlib import Path

from .geometry import (CrossingGraph, GeometricGraph, InstanceError, build_crossing_graph,
                       dump_crossing_graph, dump_geometric_graph, parse_crossing_graph,
                       parse_geometric_graph)
from .story import (StoryError, report_with_free_edges, simulate, story_from_json,
                    story_to_json, trace_to_json, upper_bounds, validate)

EXIT_OK, EXIT_INVALID, EXIT_USAGE, EXIT_PARSE, EXIT_ALGO, EXIT_BUDGET = 0, 1, 2, 3, 4, 5


class CliError(Exception):
    def __init__(self, code: int, msg: str):
        self.code = code
        super().__init__(msg)


def _read(path: str) -> str:
    try:
        return sys.stdin.read() if path == "-" else Path(path).read_text()
    except OSError as exc:
        raise CliError(EXIT_PARSE, f"cannot read {path}: {exc.strerror}") from None


def load_instance(path: str) -> tuple[CrossingGraph, GeometricGraph | None]:
    """A geometric JSON drawing (crossing graph is derived) or an edge list."""
    text = _read(path)
    try:
        if text.lstrip().startswith("{"):
            g = parse_geometric_graph(text)
            return build_crossing_graph(g), g
        return parse_crossing_graph(text), None
    except InstanceError as exc:
        raise CliError(EXIT_PARSE, f"{path}: {exc}") from None


def _write(path: str | None, text: str) -> None:
    if path in (None, "-"):
        sys.stdout.write(text)
    else:
        Path(path).parent.mkdir(parents=True, exist_ok=True)
        Path(path).write_text(text)


def _out_dir(args, default: str) -> Path:
    d = Path(args.out or default)
    d.mkdir(parents=True, exist_ok=True)
    return d


# -- subcommands ------------------------------------------------------------

def cmd_generate(args) -> int:
    from .generators import InstanceSpec, generate

    params: dict = {}
    for key in ("n", "d", "ell", "k", "spine"):
        val = getattr(args, key)
        if val is not None:
            params[key] = val
    if args.clauses:
        try:
            params["clauses"] = json.loads(args.clauses)
        except json.JSONDecodeError as exc:
            raise CliError(EXIT_PARSE, f"--clauses: {exc}") from None
    if args.h:
        params["h"] = _read(args.h)
    try:
        spec = InstanceSpec(args.family, params, args.seed)
        inst, side = generate(spec)
    except KeyError as exc:
        raise CliError(EXIT_USAGE, f"family {args.family} needs parameter {exc}") from None
    except InstanceError as exc:
        raise CliError(EXIT_USAGE, str(exc)) from None
    side["instance_id"] = spec.instance_id
    if isinstance(inst, GeometricGraph):
        text = dump_geometric_graph(inst)
    else:
        text = dump_crossing_graph(inst, [f"{spec.instance_id}"])
    _write(args.out, text)
    if args.out and args.out != "-":
        _write(args.out + ".meta.json", json.dumps(side, indent=1, sort_keys=True) + "\n")
    return EXIT_OK


def cmd_crossings(args) -> int:
    x, g = load_instance(args.instance)
    header = [f"crossing graph: {x.n} crossing edges, {x.m} crossings, "
              f"{x.free_edge_count} crossing-free edges"]
    if x.edge_labels is not None:
        header.append("labels " + " ".join(f"{i}:{g.edges[e][0]}-{g.edges[e][1]}"
                                           for i, e in enumerate(x.edge_labels)))
    _write(args.out, dump_crossing_graph(x, header))
    return EXIT_OK


def _summary(name, x, story, trace, extra=()) -> str:
    rep = report_with_free_edges(trace, x.free_edge_count)
    b = upper_bounds(x, width_cap=12)
    lines = [f"algorithm: {name}", f"crossing edges: {x.n}", f"crossings: {x.m}",
             f"crossing-free edges: {x.free_edge_count}",
             f"mu (core): {trace.mu}", f"mu (with free edges): {rep['display_mu']}",
             f"frames: {trace.tau}",
             "frame sizes: " + " ".join(map(str, trace.frame_sizes)),
             f"bound n/2: {b.half_edges}",
             f"bound max pair: {b.pair_bound if b.pair_bound is not None else 'n/a'}"]
    lines += list(extra)
    return "\n".join(lines) + "\n"


def _emit_story(args, name, x, story, extra_json=None, extra_lines=()) -> None:
    from .plotting import frame_size_svg

    trace = simulate(x, story)
    out = _out_dir(args, "solve_out")
    meta = {"algorithm": name, "seed": args.seed, **(extra_json or {})}
    (out / "story.json").write_text(json.dumps(story_to_json(story, **meta), indent=1) + "\n")
    tj = trace_to_json(story, trace, x.free_edge_count, **meta)
    tj["display_frame_sizes"] = report_with_free_edges(trace, x.free_edge_count)["frame_sizes"]
    (out / "trace.json").write_text(json.dumps(tj, indent=1) + "\n")
    summary = _summary(name, x, story, trace, extra_lines)
    (out / "summary.txt").write_text(summary)
    (out / "frames.svg").write_text(frame_size_svg(trace.frame_sizes, f"{name}: mu = {trace.mu}"))
    sys.stdout.write(summary)


def _run_exact(args, x):
    from .exact import Limits, exact_solve

    res = exact_solve(x, Limits(max_vertices=args.max_vertices, time_budget=args.budget_exact),
                      seed=args.seed)
    if res.status == "too_large":
        raise CliError(EXIT_ALGO, f"{x.n} crossing edges exceeds the exact cap "
                                  f"{args.max_vertices} (raise --max-vertices)")
    extra = {"status": res.status, "nodes_explored": res.nodes_explored,
             "best_known": res.best_known, "upper_bound": res.upper_bound, "gap": res.gap}
    lines = [f"exact status: {res.status}", f"nodes explored: {res.nodes_explored}"]
    if res.status == "timeout":
        lines.append(f"best known {res.best_known}, upper bound {res.upper_bound}, gap {res.gap:.4f}")
    if res.witness is None:
        raise CliError(EXIT_BUDGET, "exact search timed out before any story was found")
    _emit_story(args, "exact", x, res.witness, extra, lines)
    return EXIT_BUDGET if res.status == "timeout" else EXIT_OK


def cmd_solve(args) -> int:
    from .greedy import GreedyConfig, run_heuristic

    x, _ = load_instance(args.instance)
    if args.algo == "exact":
        return _run_exact(args, x)
    cfg = GreedyConfig.from_name(args.algo, args.seed, width_cap=args.width_cap,
                                 time_budget=args.budget_heur)
    run = run_heuristic(x, cfg)
    if run.status != "ok":
        raise CliError(EXIT_ALGO, f"{args.algo}: {run.detail}")
    extra = {"seconds": run.seconds}
    if run.pair is not None:
        extra["pair"] = [sorted(run.pair[0]), sorted(run.pair[1])]
    _emit_story(args, run.name, x, run.story, extra, [f"seconds: {run.seconds:.4f}"])
    return EXIT_BUDGET if run.seconds > args.budget_heur else EXIT_OK


def cmd_exact(args) -> int:
    x, _ = load_instance(args.instance)
    return _run_exact(args, x)


def cmd_ilp_export(args) -> int:
    from .ilp import export_ilp, shrunk_tau

    x, _ = load_instance(args.instance)
    tau, source = args.tau, None
    if args.shrink_tau:
        tau, source = shrunk_tau(x, args.seed), "n_X - LB(ag-1c2a) + 1"
    fmt = args.format or "lp"
    if fmt not in ("lp", "json"):
        raise CliError(EXIT_USAGE, "ilp-export supports --format lp or json")
    if tau is not None and tau < 1:
        raise CliError(EXIT_USAGE, "--tau must be >= 1")
    _write(args.out, export_ilp(x, tau, fmt, source))
    return EXIT_OK


def cmd_ilp_decode(args) -> int:
    from .ilp import IlpRejected, decode_ilp_solution

    x, _ = load_instance(args.instance)
    try:
        story, mu = decode_ilp_solution(x, _read(args.solution), args.tau)
    except IlpRejected as exc:
        sys.stderr.write(f"rejected: {exc}\n")
        return EXIT_INVALID
    _write(args.out, json.dumps(story_to_json(story, mu=mu), indent=1) + "\n")
    return EXIT_OK


def cmd_validate(args) -> int:
    x, _ = load_instance(args.instance)
    try:
        story = story_from_json(_read(args.story))
    except (StoryError, json.JSONDecodeError) as exc:
        raise CliError(EXIT_PARSE, f"{args.story}: {exc}") from None
    rep = validate(x, story)
    for line in rep.lines():
        print(line)
    if rep.valid:
        print(f"mu {rep.trace.mu}, frames {rep.trace.tau}")
    return EXIT_OK if rep.valid else EXIT_INVALID


def cmd_bench(args) -> int:
    from .bench import RunConfig, load_spec_set, run_bench
    from .greedy import HEURISTIC_NAMES
    from .plotting import gap_scatter_svg

    try:
        specs = load_spec_set(_read(args.specs))
    except (ValueError, InstanceError) as exc:
        raise CliError(EXIT_PARSE, f"{args.specs}: {exc}") from None
    algos = tuple(a.strip() for a in args.algo.split(",")) if args.algo else HEURISTIC_NAMES
    try:
        cfg = RunConfig(algorithms=algos, budget_exact=args.budget_exact,
                        budget_heur=args.budget_heur, width_cap=args.width_cap,
                        exact_max_vertices=args.max_vertices, workers=args.workers,
                        out_dir=args.out or "bench_out")
    except ValueError as exc:
        raise CliError(EXIT_USAGE, str(exc)) from None

    def progress(rec):
        print(f"{rec.instance_id}: n_x={rec.n_x} exact={rec.exact.get('status')}", flush=True)

    doc = run_bench(specs, cfg, progress=progress)
    Path(cfg.out_dir, "gap.svg").write_text(gap_scatter_svg(doc["rows"]))
    for a in doc["aggregates"]:
        print(f"{a['family']:>18} {a['algorithm']:>8} opt%={a['pct_opt'] or '-':>6} "
              f"ratio={a['ratio_mean'] or '-'}")
    return EXIT_OK


def cmd_plot(args) -> int:
    from .bench import read_rows
    from .plotting import frame_size_svg, gap_scatter_svg

    text = _read(args.input)
    if text.lstrip().startswith("{"):
        try:
            doc = json.loads(text)
            sizes = doc.get("frame_sizes")
            if sizes is None:
                sizes = list(simulate(load_instance(args.instance)[0], story_from_json(doc))
                             .frame_sizes) if args.instance else None
        except (json.JSONDecodeError, StoryError) as exc:
            raise CliError(EXIT_PARSE, f"{args.input}: {exc}") from None
        if sizes is None:
            raise CliError(EXIT_USAGE, "story without frame sizes: pass --instance")
        svg = frame_size_svg(sizes, doc.get("algorithm", ""))
    else:
        try:
            rows = read_rows(text) if text.strip() else []
        except ValueError as exc:
            raise CliError(EXIT_PARSE, f"{args.input}: {exc}") from None
        svg = gap_scatter_svg(rows)
    _write(args.out, svg)
    return EXIT_OK


# -- parser -----------------------------------------------------------------

def build_parser() -> argparse.ArgumentParser:
    from .generators import FAMILIES
    from .greedy import HEURISTIC_NAMES

    p = argparse.ArgumentParser(prog="planarstory",
                                description="Planar graph stories on crossing graphs.")
    sub = p.add_subparsers(dest="command", required=True)

    def common(sp, budgets=False):
        sp.add_argument("--seed", type=int, default=0)
        sp.add_argument("--out", help="output file or directory ('-' for stdout)")
        if budgets:
            sp.add_argument("--budget-exact", type=float, default=60.0, metavar="SEC")
            sp.add_argument("--budget-heur", type=float, default=10.0, metavar="SEC")
            sp.add_argument("--width-cap", type=int, default=12)
            sp.add_argument("--max-vertices", type=int, default=22,
                            help="exact solver size cap")

    g = sub.add_parser("generate", help="generate a seeded instance")
    common(g)
    g.add_argument("--family", required=True, choices=FAMILIES)
    g.add_argument("--n", type=int)
    g.add_argument("--d", type=float)
    g.add_argument("--ell", type=int)
    g.add_argument("--k", type=int)
    g.add_argument("--spine", type=int)
    g.add_argument("--clauses", help='JSON list of literal triples, e.g. "[[1,2,-3]]"')
    g.add_argument("--h", help="edge-list file of the companion graph (star-plus-graph)")
    g.set_defaults(func=cmd_generate)

    c = sub.add_parser("crossings", help="crossing graph of a geometric drawing")
    common(c)
    c.add_argument("instance")
    c.set_defaults(func=cmd_crossings)

    s = sub.add_parser("solve", help="run a heuristic (or 'exact')")
    common(s, budgets=True)
    s.add_argument("instance")
    s.add_argument("--algo", default="ag-1c2a", choices=HEURISTIC_NAMES + ("exact",))
    s.set_defaults(func=cmd_solve)

    e = sub.add_parser("exact", help="optimal story by exhaustive search")
    common(e, budgets=True)
    e.add_argument("instance")
    e.set_defaults(func=cmd_exact)

    ie = sub.add_parser("ilp-export", help="write the integer program")
    common(ie)
    ie.add_argument("instance")
    ie.add_argument("--tau", type=int, help="frame horizon (default: number of crossing edges)")
    ie.add_argument("--shrink-tau", action="store_true",
                    help="use n - LB + 1 frames with LB from AG-1c")
    ie.add_argument("--format", choices=("lp", "json"), default="lp")
    ie.set_defaults(func=cmd_ilp_export)

    idc = sub.add_parser("ilp-decode", help="turn a solver solution into a story")
    common(idc)
    idc.add_argument("instance")
    idc.add_argument("solution", help='"name value" lines')
    idc.add_argument("--tau", type=int)
    idc.set_defaults(func=cmd_ilp_decode)

    v = sub.add_parser("validate", help="check a story JSON against an instance")
    common(v)
    v.add_argument("instance")
    v.add_argument("story")
    v.set_defaults(func=cmd_validate)

    b = sub.add_parser("bench", help="run a spec set and aggregate")
    common(b, budgets=True)
    b.add_argument("specs", help="spec-set JSON")
    b.add_argument("--algo", help="comma-separated algorithms (default: all heuristics)")
    b.add_argument("--workers", type=int, default=1)
    b.set_defaults(func=cmd_bench)

    pl = sub.add_parser("plot", help="SVG of a trace JSON or bench row CSV")
    common(pl)
    pl.add_argument("input")
    pl.add_argument("--instance", help="instance, when plotting a bare story")
    pl.add_argument("--format", choices=("svg",), default="svg")
    pl.set_defaults(func=cmd_plot)
    return p


def main(argv=None) -> int:
    parser = build_parser()
    args = parser.parse_args(argv)
    try:
        return args.func(args)
    except CliError as exc:
        sys.stderr.write(f"planarstory: {exc}\n")
        return exc.code
    except KeyboardInterrupt:
        sys.stderr.write("planarstory: interrupted\n")
        return 130


if __name__ == "__main__":
    sys.exit(main())
