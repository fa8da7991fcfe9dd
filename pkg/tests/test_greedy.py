import random

import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from planarstory.exact import exact_solve
from planarstory.geometry import CrossingGraph
from planarstory.greedy import (
    HEURISTIC_NAMES,
    GreedyConfig,
    _refine_ties,
    advanced_greedy,
    default_initial_frame,
    phase1_variant_b,
    phase1_variant_c,
    run_heuristic,
    simple_greedy,
)
from planarstory.story import simulate, validate
from planarstory.treewidth import maximum_pair

from oracles import brute_mu, independent, random_gnp, random_mixed

P3 = CrossingGraph.from_edges(3, [(0, 1), (1, 2)])
K2 = CrossingGraph.from_edges(2, [(0, 1)])
C4 = CrossingGraph.from_edges(4, [(0, 1), (1, 2), (2, 3), (3, 0)])
C5 = CrossingGraph.from_edges(5, [(i, (i + 1) % 5) for i in range(5)])
STAR5 = CrossingGraph.from_edges(6, [(0, i) for i in range(1, 6)])

SEEDS = range(40)


def mu_of(x, story):
    return simulate(x, story).mu


def test_simple_greedy_examples():
    assert {mu_of(P3, simple_greedy(P3, {0, 2}, s)) for s in SEEDS} == {1}
    for s in SEEDS:
        story = simple_greedy(STAR5, {1, 2, 3, 4, 5}, s)
        assert story.insertion_order == (0,)
        assert simulate(STAR5, story).frame_sizes == (5, 1)
    assert {mu_of(C5, simple_greedy(C5, {0, 2}, s)) for s in SEEDS} == {2}


def test_simple_greedy_picks_minimum_current_degree():
    rng = random.Random(4)
    for _ in range(100):
        x = random_gnp(rng, rng.randint(1, 10))
        seed = rng.randrange(1000)
        story = simple_greedy(x, seed=seed)
        assert validate(x, story)
        cur = set(story.initial_frame)
        future = set(range(x.n)) - cur
        for v in story.insertion_order:
            deg = {u: len(x.nbr_sets[u] & cur) for u in future}
            assert deg[v] == min(deg.values())
            cur = (cur - x.nbr_sets[v]) | {v}
            future.discard(v)


def test_default_initial_frame_is_maximal():
    rng = random.Random(5)
    for _ in range(100):
        x = random_gnp(rng, rng.randint(1, 10))
        f = default_initial_frame(x, rng.randrange(99))
        assert independent(x, f)
        assert all(v in f or x.nbr_sets[v] & f for v in range(x.n))


def test_variant_b_examples():
    assert {phase1_variant_b(K2, s) for s in SEEDS} == {
        (frozenset({0}), frozenset({1})), (frozenset({1}), frozenset({0}))}
    for s in SEEDS:
        i1, it = phase1_variant_b(P3, s)
        # an endpoint first; the loop stops at |I1| = 1
        assert len(i1) == 1 and i1 <= {0, 2}
        # X - I1 is a single edge, so either of its ends may be picked
        assert len(it) == 1 and not it & i1
    for s in SEEDS:
        i1, it = phase1_variant_b(C4, s)
        # the bound check runs before each pick, so |I1| reaches n/2
        assert {i1, it} == {frozenset({0, 2}), frozenset({1, 3})}


def test_variant_c_examples():
    assert {frozenset(phase1_variant_c(K2, s)) for s in SEEDS} == {
        frozenset({frozenset({0}), frozenset({1})})}
    for s in SEEDS:
        assert set(phase1_variant_c(C4, s)) == {frozenset({0, 2}), frozenset({1, 3})}
    for s in SEEDS:
        i1, it = phase1_variant_c(STAR5, s)
        # leaves have the smaller degree, so both sides take leaves and the
        # center is never picked
        assert 0 not in i1 | it
        assert (len(i1), len(it)) == (2, 3)


def test_phase1_properties_on_random_graphs():
    rng = random.Random(6)
    for _ in range(150):
        x = random_gnp(rng, rng.randint(1, 12)).strip_isolated()
        seed = rng.randrange(1000)
        for variant in (phase1_variant_b, phase1_variant_c):
            i1, it = variant(x, seed)
            assert not i1 & it
            assert independent(x, i1) and independent(x, it)
            assert variant(x, seed) == (i1, it)
        i1, it = phase1_variant_b(x, seed)
        assert len(i1) <= max(1, x.n // 2)
        # Itau is maximal inside X - I1
        rest = set(range(x.n)) - i1
        assert all(v in it or x.nbr_sets[v] & it for v in rest)
        i1, it = phase1_variant_c(x, seed)
        assert len(i1) <= len(it)


def test_advanced_greedy_examples():
    for s in SEEDS:
        story = advanced_greedy(C4, {0, 2}, {1, 3}, "2a", s)
        assert simulate(C4, story).frame_sizes == (2, 1, 2)
        assert mu_of(C5, advanced_greedy(C5, {0, 2}, {1, 4}, "2a", s)) == 2
        assert mu_of(C5, advanced_greedy(C5, {0, 2}, {1, 4}, "2b", s)) == 2
        assert advanced_greedy(P3, {0, 2}, {1}, "2b", s).insertion_order == (1,)
    assert brute_mu(C5) == 2


def test_advanced_greedy_rejects_bad_pairs():
    with pytest.raises(ValueError):
        advanced_greedy(P3, {0, 2}, {2}, "2a")
    with pytest.raises(ValueError):
        advanced_greedy(P3, {0, 1}, {2}, "2a")
    with pytest.raises(ValueError):
        advanced_greedy(P3, {0, 2}, {1}, "2c")


def _check_admissible_run(x, i1, it, phase2, seed):
    story = advanced_greedy(x, i1, it, phase2, seed)
    trace = simulate(x, story)
    assert validate(x, story)
    assert it <= trace.final_frame()
    # replay: every pick is admissible with minimum current degree among admissible ones
    cur = set(i1)
    future = set(range(x.n)) - cur
    for v in story.insertion_order:
        adm = [u for u in future if u not in it or not x.nbr_sets[u] & future]
        deg = {u: len(x.nbr_sets[u] & cur) for u in adm}
        assert v in deg and deg[v] == min(deg.values())
        cur = (cur - x.nbr_sets[v]) | {v}
        future.discard(v)
    return trace


def test_advanced_greedy_admissibility_on_random_pairs():
    rng = random.Random(7)
    for _ in range(200):
        x = random_gnp(rng, rng.randint(2, 11)).strip_isolated()
        if not x.n:
            continue
        seed = rng.randrange(1000)
        i1, it = (phase1_variant_b if rng.random() < 0.5 else phase1_variant_c)(x, seed)
        _check_admissible_run(x, i1, it, rng.choice(["2a", "2b"]), seed)


def test_refine_ties_is_a_nonempty_subset():
    rng = random.Random(8)
    for _ in range(300):
        x = random_gnp(rng, rng.randint(2, 10))
        nbr = x.nbr_sets
        cur = set()
        for v in rng.sample(range(x.n), x.n):
            if not nbr[v] & cur and rng.random() < 0.5:
                cur.add(v)
        future = set(range(x.n)) - cur
        if not future:
            continue
        ties = rng.sample(sorted(future), rng.randint(1, len(future)))
        kept = _refine_ties(ties, cur, future, nbr)
        assert kept and set(kept) <= set(ties)
        # everything kept shares the best score: future vertices (other than
        # itself) crossing some current neighbor of the candidate
        def score(e):
            reach = set().union(*(nbr[c] for c in nbr[e] & cur)) if nbr[e] & cur else set()
            return len((reach & future) - {e})
        top = max(score(e) for e in ties)
        assert {e for e in ties if score(e) == top} == set(kept)


def _random_forest(rng, n, max_deg=3):
    edges, deg = [], [0] * n
    for v in range(1, n):
        if rng.random() < 0.15:
            continue  # start a new tree
        cands = [u for u in range(v) if deg[u] < max_deg]
        if cands:
            u = rng.choice(cands)
            edges.append((u, v))
            deg[u] += 1
            deg[v] += 1
    return CrossingGraph.from_edges(n, edges).strip_isolated()


def test_forest_with_small_degrees_reaches_pair_value():
    # cycle-free, every vertex of degree <= 3: with a maximum pair the story
    # keeps min(|I1|, |Itau|) edges in every frame
    rng = random.Random(9)
    checked = 0
    for _ in range(150):
        x = _random_forest(rng, rng.randint(2, 16))
        if not x.n:
            continue
        i1, it = maximum_pair(x)
        seed = rng.randrange(1000)
        for phase2 in ("2a", "2b"):
            trace = _check_admissible_run(x, i1, it, phase2, seed)
            assert trace.mu == min(len(i1), len(it))
        if x.n <= 9:
            assert brute_mu(x) == min(len(i1), len(it))
        checked += 1
    assert checked > 100


def test_run_heuristic_examples():
    for s in range(10):
        assert run_heuristic(P3, GreedyConfig.from_name("ag-1c2a", s)).mu == 1
    assert run_heuristic(K2, GreedyConfig.from_name("ag-1b2b", 0)).mu == 1
    assert run_heuristic(C4, GreedyConfig.from_name("ag-1a2a", 0)).mu == 1


def test_run_heuristic_width_cap_is_structured_failure():
    k7 = CrossingGraph.from_edges(7, [(u, v) for u in range(7) for v in range(u + 1, 7)])
    run = run_heuristic(k7, GreedyConfig.from_name("ag-1a2b", 0, width_cap=3))
    assert run.status == "unavailable" and run.story is None and "width" in run.detail


def test_run_heuristic_given_pair_and_initial():
    cfg = GreedyConfig(phase1="given-pair", pair_override=(frozenset({0, 2}), frozenset({1, 3})))
    assert run_heuristic(C4, cfg).trace.frame_sizes == (2, 1, 2)
    cfg = GreedyConfig(phase1="given-initial", initial_override=frozenset({1, 3}))
    run = run_heuristic(C4, cfg)
    assert run.story.initial_frame == {1, 3}
    with pytest.raises(ValueError):
        GreedyConfig(phase1="1b", pair_override=(frozenset(), frozenset()))
    with pytest.raises(ValueError):
        GreedyConfig.from_name("ag-1d2a")


def test_isolated_vertices_stay_in_every_frame():
    x = CrossingGraph.from_edges(6, [(1, 3), (3, 5)])
    for name in HEURISTIC_NAMES + ("simple",):
        run = run_heuristic(x, GreedyConfig.from_name(name, 0))
        assert validate(x, run.story)
        assert all({0, 2, 4} <= f for f in run.trace.frames)
        assert run.mu == 4 == brute_mu(x)
    lone = CrossingGraph.from_edges(2, [])
    run = run_heuristic(lone, GreedyConfig.from_name("ag-1b2a", 0))
    assert run.trace.frame_sizes == (2,)


def test_tie_order_counterexample_on_paths_and_cycles():
    # P3 + P3 + C4: inserting the middle of the first odd path before the
    # even cycle stacks its permanent loss onto the cycle's temporary one
    x = CrossingGraph.from_edges(
        10, [(0, 1), (1, 2), (3, 4), (4, 5), (6, 7), (7, 8), (8, 9), (9, 6)])
    assert exact_solve(x).mu_star == 5
    run = run_heuristic(x, GreedyConfig.from_name("ag-1a2a", 0))
    assert run.pair == (frozenset({0, 2, 4, 6, 8}), frozenset({1, 3, 5, 7, 9}))
    assert run.story.insertion_order == (5, 3, 1, 7, 9)
    assert run.trace.frame_sizes == (5, 5, 6, 5, 4, 5)
    # another tie order inserts the cycle before the second path and is optimal
    assert run_heuristic(x, GreedyConfig.from_name("ag-1a2a", 1)).mu == 5


@settings(max_examples=60, deadline=None)
@given(st.integers(0, 10 ** 6), st.sampled_from(HEURISTIC_NAMES + ("simple",)))
def test_determinism_and_validity(seed, name):
    rng = random.Random(seed)
    _, x = random_mixed(rng, 14)
    a = run_heuristic(x, GreedyConfig.from_name(name, seed))
    b = run_heuristic(x, GreedyConfig.from_name(name, seed))
    if a.status != "ok":
        assert b.status == a.status
        return
    assert a.story == b.story and a.trace == b.trace
    assert validate(x, a.story)
    if a.pair is not None and name != "simple":
        assert a.pair[1] <= a.trace.final_frame()
