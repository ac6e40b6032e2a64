"""Shared seeded generators for random polymer models and covers."""

import math

import numpy as np

from cliquemc.model import CliqueCover, Polymer, PolymerModel


def random_model(
    rng: np.random.Generator,
    n_min: int = 3,
    n_max: int = 10,
    incompat_p: float = 0.45,
    w_lo: float = 0.05,
    w_hi: float = 0.8,
    sizes: bool = False,
) -> PolymerModel:
    n = int(rng.integers(n_min, n_max + 1))
    w = rng.uniform(w_lo, w_hi, n)
    pairs = [
        (a, b) for a in range(n) for b in range(a + 1, n) if rng.random() < incompat_p
    ]
    polymers = [
        Polymer(
            i,
            float(math.log(w[i])),
            size=float(rng.integers(1, 6)) if sizes else 1.0,
        )
        for i in range(n)
    ]
    return PolymerModel(polymers, pairs)


def random_cover(rng: np.random.Generator, model: PolymerModel) -> CliqueCover:
    """Random valid cover: greedy random cliques plus occasional overlaps."""
    order = list(rng.permutation(model.n))
    cliques: list[list[int]] = []
    for pid in order:
        candidates = [
            c for c in cliques if all(model.incompatible(pid, q) for q in c)
        ]
        if candidates and rng.random() < 0.6:
            candidates[int(rng.integers(len(candidates)))].append(int(pid))
        else:
            cliques.append([int(pid)])
    # overlaps: duplicate some polymers into other compatible cliques
    for pid in range(model.n):
        if rng.random() < 0.2:
            candidates = [
                c
                for c in cliques
                if pid not in c and all(model.incompatible(pid, q) for q in c)
            ]
            if candidates:
                candidates[int(rng.integers(len(candidates)))].append(pid)
    return CliqueCover(cliques)


def random_bipartite(
    rng: np.random.Generator, n_max: int = 14, edge_p: float = 0.5
):
    """Random bipartite graph with n_left + n_right <= n_max, both sides >= 1."""
    from cliquemc.hardcore import BipartiteGraph

    n_left = int(rng.integers(1, n_max))
    n_right = int(rng.integers(1, n_max - n_left + 1))
    edges = [
        (u, v)
        for u in range(n_left)
        for v in range(n_right)
        if rng.random() < edge_p
    ]
    return BipartiteGraph(n_left, n_right, edges)
