import itertools
import math

import numpy as np
import pytest

from cliquemc.conditions import (
    GrowthFunction,
    check_clique_truncation,
    size_f,
)
from cliquemc.errors import EnumerationCapError, GraphFormatError
from cliquemc.hardcore import (
    BipartiteGraph,
    build_polymer_model,
    check_bipartite_expander,
    combined_estimate,
    connected_count_bound,
    enumerate_connected_sets,
    exact_hardcore,
    lambda_threshold,
    load_graph,
    polymer_weight,
    side_square_adjacency,
    square_graph,
    table1_evaluators,
)
from cliquemc.model import partition_function_exact, validate_clique_cover
from conftest import random_bipartite


# --- oracles -----------------------------------------------------------------


def independent_sets(G):
    adj = G.global_adjacency()
    for mask in range(1 << G.n):
        I = {v for v in range(G.n) if mask >> v & 1}
        if all(not (adj[a] & I) for a in I):
            yield I


def log_hardcore_brute(G, lam):
    terms = [len(I) * math.log(lam) for I in independent_sets(G)]
    hi = max(terms)
    return hi + math.log(sum(math.exp(t - hi) for t in terms))


def small_components_only(G, I, side):
    """True iff every G^2-component of I's projection on `side` is small."""
    n_side = G.side_size(side)
    if side == "L":
        S = {v for v in I if v < G.n_left}
    else:
        S = {v - G.n_left for v in I if v >= G.n_left}
    adj = side_square_adjacency(G, side)
    seen = set()
    for v in S:
        if v in seen:
            continue
        comp, stack = {v}, [v]
        while stack:
            u = stack.pop()
            for w in adj[u]:
                if w in S and w not in comp:
                    comp.add(w)
                    stack.append(w)
        seen |= comp
        if len(comp) > n_side // 2:
            return False
    return True


def log_restricted_sum(G, lam, side):
    terms = [
        len(I) * math.log(lam)
        for I in independent_sets(G)
        if small_components_only(G, I, side)
    ]
    hi = max(terms)
    return hi + math.log(sum(math.exp(t - hi) for t in terms))


def brute_connected_sets(adj, v, k):
    n = len(adj)
    out = set()
    for r in range(1, k + 1):
        for comb in itertools.combinations(range(n), r):
            if v not in comb:
                continue
            S = set(comb)
            comp, stack = {v}, [v]
            while stack:
                u = stack.pop()
                for w in adj[u]:
                    if w in S and w not in comp:
                        comp.add(w)
                        stack.append(w)
            if comp == S:
                out.add(frozenset(S))
    return out


# --- graph parsing and basics ------------------------------------------------


def test_load_graph():
    G = load_graph("# comment\n2 2\n0 0  # edge\n1 1\n")
    assert G.n_left == 2 and G.n_right == 2
    assert G.edges == {(0, 0), (1, 1)}
    assert G.max_degree == 1


def test_load_graph_errors():
    with pytest.raises(GraphFormatError, match="line 2"):
        load_graph("2 2\n0\n")
    with pytest.raises(GraphFormatError, match="line 3"):
        load_graph("2 2\n0 0\na b\n")
    with pytest.raises(GraphFormatError):
        load_graph("")
    with pytest.raises(GraphFormatError):
        load_graph("1 1\n0 5\n")  # out of range
    with pytest.raises(GraphFormatError):
        load_graph("1 1\n0 0\n0 0\n")  # duplicate


def test_square_graph_path():
    # path l0 - r0 - l1: in G^2 all three are mutually adjacent
    G = BipartiteGraph(2, 1, [(0, 0), (1, 0)])
    sq = square_graph(G)
    assert sq[0] == {1, 2}
    assert sq[1] == {0, 2}
    assert sq[2] == {0, 1}


def test_expander_check():
    k33 = BipartiteGraph(3, 3, [(u, v) for u in range(3) for v in range(3)])
    ok, witness = check_bipartite_expander(k33, 1.0)
    assert ok and witness is None
    # matching: |N(S)| = |S|, no expansion
    match = BipartiteGraph(2, 2, [(0, 0), (1, 1)])
    ok, witness = check_bipartite_expander(match, 0.5)
    assert not ok
    side, S = witness
    assert len(match.neighborhood(S, side)) < 1.5 * len(S)
    with pytest.raises(EnumerationCapError):
        check_bipartite_expander(BipartiteGraph(25, 1, []), 0.5)


# --- connected-set enumeration -----------------------------------------------


def test_enumerate_connected_sets_path():
    adj = [{1}, {0, 2}, {1, 3}, {2}]
    got = set(enumerate_connected_sets(adj, 1, 3))
    assert got == brute_connected_sets(adj, 1, 3)


def test_enumerate_connected_sets_random_graphs():
    rng = np.random.default_rng(23)
    for _ in range(40):
        n = int(rng.integers(2, 10))
        adj = [set() for _ in range(n)]
        for a in range(n):
            for b in range(a + 1, n):
                if rng.random() < 0.4:
                    adj[a].add(b)
                    adj[b].add(a)
        v = int(rng.integers(n))
        k = int(rng.integers(1, 6))
        got = enumerate_connected_sets(adj, v, k)
        assert len(got) == len(set(got)), "duplicates emitted"
        assert set(got) == brute_connected_sets(adj, v, k)


def test_connected_count_bound():
    rng = np.random.default_rng(31)
    for _ in range(40):
        G = random_bipartite(rng, n_max=10)
        sq = square_graph(G)
        delta = max((len(a) for a in sq), default=0)
        if delta == 0:
            continue
        for v in range(G.n):
            sets = enumerate_connected_sets(sq, v, 6)
            for k in range(1, 7):
                count = sum(1 for S in sets if len(S) == k)
                assert count <= connected_count_bound(delta, k) + 1e-9


# --- polymer models ----------------------------------------------------------


def test_polymer_weight_by_hand():
    G = BipartiteGraph(2, 2, [(u, v) for u in range(2) for v in range(2)])  # K22
    lam = 5.0
    assert polymer_weight(G, {0}, "L", lam) == pytest.approx(
        math.log(5) - 2 * math.log(6), abs=1e-12
    )


def test_build_polymer_model_k22():
    G = BipartiteGraph(2, 2, [(u, v) for u in range(2) for v in range(2)])
    model, cover, sets = build_polymer_model(G, "L", 5.0)
    # small = floor(2/2) = 1: only singletons
    assert sorted(map(sorted, sets)) == [[0], [1]]
    # both share all right neighbors, so they are incompatible
    assert model.incompat_pairs() == [(0, 1)]
    assert validate_clique_cover(model, cover).valid
    assert cover.m == 2


def test_build_polymer_model_valid_cover_random():
    rng = np.random.default_rng(7)
    for _ in range(25):
        G = random_bipartite(rng, n_max=10)
        for side in ("L", "R"):
            model, cover, sets = build_polymer_model(G, side, 2.0)
            assert validate_clique_cover(model, cover).valid
            assert cover.m == G.side_size(side)
            assert len(sets) == len(set(sets))
            limit = G.side_size(side) // 2
            assert all(len(S) <= limit for S in sets)


def test_build_polymer_model_size_cap():
    G = BipartiteGraph(6, 6, [(u, v) for u in range(6) for v in range(6)])
    model, _, sets = build_polymer_model(G, "L", 2.0, k=2)
    assert max(len(S) for S in sets) == 2
    with pytest.raises(EnumerationCapError):
        build_polymer_model(BipartiteGraph(25, 2, []), "L", 2.0, cap=20)


def test_appendix_truncation_condition_on_generated_instances():
    # lambda >= (e Delta^2 / 0.8)^(1/alpha) makes every clique satisfy
    # sum g(|S|) w_S <= 1 with g(x) = e^(0.2 x)
    rng = np.random.default_rng(13)
    g = GrowthFunction("exp", 0.2)
    tested = 0
    while tested < 15:
        G = random_bipartite(rng, n_max=10, edge_p=0.8)
        if G.max_degree == 0 or not check_bipartite_expander(G, 1.0)[0]:
            continue
        lam = lambda_threshold(G.max_degree, 1.0).term1
        for side in ("L", "R"):
            model, cover, _ = build_polymer_model(G, side, lam)
            assert check_clique_truncation(model, cover, g, 1.0).holds
        tested += 1


# --- exact values and the combination identity --------------------------------


def test_exact_hardcore_vs_brute():
    rng = np.random.default_rng(41)
    for _ in range(15):
        G = random_bipartite(rng, n_max=10)
        for lam in (0.5, 3.0):
            assert exact_hardcore(G, lam) == pytest.approx(
                log_hardcore_brute(G, lam), rel=1e-10, abs=1e-10
            )
    with pytest.raises(EnumerationCapError):
        exact_hardcore(BipartiteGraph(20, 20, []), 1.0)


def test_combination_identity():
    rng = np.random.default_rng(47)
    for _ in range(10):
        G = random_bipartite(rng, n_max=10)
        for lam in (0.5, 5.0):
            for side, other in (("L", G.n_right), ("R", G.n_left)):
                model, _, _ = build_polymer_model(G, side, lam)
                lhs = other * math.log1p(lam) + partition_function_exact(model, cap=None)
                rhs = log_restricted_sum(G, lam, side)
                assert lhs == pytest.approx(rhs, abs=1e-9)


# --- thresholds and Table 1 ---------------------------------------------------


def test_lambda_threshold_frozen():
    thr = lambda_threshold(3, 1.0)
    assert thr.term1 == pytest.approx(math.e * 9 / 0.8, rel=1e-12)
    assert thr.term1 == pytest.approx(30.58067057, abs=1e-6)
    assert thr.term2 == pytest.approx(math.exp(11.0), rel=1e-12)
    assert thr.threshold == thr.term2
    half = lambda_threshold(3, 0.5)
    assert half.term1 == pytest.approx((math.e * 9 / 0.8) ** 2, rel=1e-12)


def test_table1_rows():
    potts = table1_evaluators("potts_expander", {"delta": 3, "q": 2, "alpha": 1.0})
    assert potts.value == pytest.approx(1.5 + math.log(6), abs=1e-12)
    match = table1_evaluators("matching", {"delta": 2})
    assert match.value == pytest.approx(1 / math.sqrt(2.8399), abs=1e-9)
    unb = table1_evaluators(
        "hardcore_unbalanced",
        {"delta_l": 2, "delta_r": 2, "lambda_r": 0.01, "lambda_l": 1, "small_delta_r": 2},
    )
    assert unb.value == pytest.approx(2 - 3.3353 * 4 * 0.01, abs=1e-9)
    assert unb.satisfied
    hc = table1_evaluators("hardcore_expander", {"delta": 3, "alpha": 1.0, "lam": 1e6})
    assert hc.satisfied
    with pytest.raises(ValueError):
        table1_evaluators("nope", {})


# --- full pipeline -------------------------------------------------------------


def test_combined_estimate_matches_exact():
    G = BipartiteGraph(2, 2, [(u, v) for u in range(2) for v in range(2)])
    lam = 60000.0  # above e^11, so no warning path
    eps = 1.0
    result = combined_estimate(G, lam, 1.0, eps, root_seed=5, amplify=False)
    exact = exact_hardcore(G, lam)
    # eps guarantee plus the 1 +- e^{-n} slack of the combination step
    assert abs(math.expm1(result.log_estimate - exact)) < eps + math.exp(-G.n) + 0.05
    assert not result.warnings


def test_combined_estimate_deterministic():
    G = BipartiteGraph(2, 2, [(u, v) for u in range(2) for v in range(2)])
    a = combined_estimate(G, 60000.0, 1.0, 1.0, root_seed=9, amplify=False)
    b = combined_estimate(G, 60000.0, 1.0, 1.0, root_seed=9, amplify=False)
    assert a.log_estimate == b.log_estimate


def test_combined_estimate_warns_below_threshold():
    G = BipartiteGraph(2, 2, [(u, v) for u in range(2) for v in range(2)])
    with pytest.warns(UserWarning, match="below threshold"):
        result = combined_estimate(G, 5.0, 1.0, 1.0, root_seed=1, amplify=False)
    assert result.warnings
