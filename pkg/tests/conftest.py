"""Shared fixtures: a suite-wide bound-chain registry and the acceptance
report printed at the end of the run."""

from __future__ import annotations

import pytest

from planarstory.exact import exact_solve
from planarstory.greedy import HEURISTIC_NAMES, GreedyConfig, run_heuristic
from planarstory.story import upper_bounds

# every instance solved exactly anywhere in the suite, with its bound chain
SOLVED: list[dict] = []
ACCEPTANCE_LINES: list[str] = []


def chain_record(x, exact_mu: int | None = None, label: str = "", seed: int = 0) -> dict:
    """Solve ``x`` with every heuristic (and exactly, unless given), check
    heuristic <= exact <= pair bound <= n/2, and remember the result."""
    if exact_mu is None:
        res = exact_solve(x, seed=seed)
        assert res.status == "optimal"
        exact_mu = res.mu_star
    heur = {}
    for name in HEURISTIC_NAMES:
        run = run_heuristic(x, GreedyConfig.from_name(name, seed))
        if run.status == "ok":
            heur[name] = run.mu
    b = upper_bounds(x)
    half = b.half_edges
    pair = b.pair_bound if b.pair_bound is not None else half
    violations = []
    for name, mu in heur.items():
        if mu > exact_mu:
            violations.append(f"{name} mu {mu} > exact {exact_mu}")
    if exact_mu > pair:
        violations.append(f"exact {exact_mu} > pair bound {pair}")
    if pair > half:
        violations.append(f"pair bound {pair} > n/2 bound {half}")
    rec = {"label": label, "n": x.n, "heuristics": heur, "exact": exact_mu, "pair": pair,
           "half": half, "violations": violations}
    SOLVED.append(rec)
    return rec


def report_line(number: int, ok: bool, detail: str) -> str:
    line = f"criterion {number:>2}: {'PASS' if ok else 'FAIL'}  {detail}"
    ACCEPTANCE_LINES.append(line)
    return line


@pytest.fixture
def report(capsys):
    def emit(number, ok, detail):
        line = report_line(number, ok, detail)
        with capsys.disabled():
            print("\n" + line)
        return ok
    return emit


def pytest_terminal_summary(terminalreporter):
    if ACCEPTANCE_LINES:
        terminalreporter.section("acceptance criteria")
        for line in ACCEPTANCE_LINES:
            terminalreporter.write_line(line)
    if SOLVED:
        bad = [r for r in SOLVED if r["violations"]]
        terminalreporter.write_line(
            f"bound chain over the whole suite: {len(SOLVED)} exactly solved instances, "
            f"{len(bad)} with violations")
        for r in bad[:10]:
            terminalreporter.write_line(f"  {r['label']}: {'; '.join(r['violations'])}")


def pytest_sessionfinish(session, exitstatus):
    if any(r["violations"] for r in SOLVED) and exitstatus == 0:
        session.exitstatus = 1
