"""Polymer clique dynamics: single steps, full runs, exact transition matrices.

Each step picks a clique uniformly at random, resamples it from its restricted
Gibbs distribution, and applies the removal/addition rule. The inner loop is
delegated to a kernel: a compiled extension when available, otherwise a
pure-Python twin with identical semantics (select with CLIQUEMC_FORCE_PY=1).
"""

from __future__ import annotations

import os
from collections import Counter
from dataclasses import dataclass
from typing import Optional

import numpy as np

from .errors import InvalidFamilyError
from .model import (
    CliqueCover,
    PolymerModel,
    clique_distribution,
    enumerate_families,
    gibbs_probability,
    is_valid_family,
)

from . import _kernel_py


def _load_kernel():
    if os.environ.get("CLIQUEMC_FORCE_PY"):
        return _kernel_py
    try:
        from . import _kernel

        return _kernel
    except ImportError:
        return _kernel_py


_kernel = _load_kernel()
KERNEL_BACKEND = _kernel.BACKEND

# Uniform draws are generated in blocks of at most this many doubles.
_CHUNK_DOUBLES = 4_000_000


def get_kernel(backend: Optional[str] = None):
    """Return a kernel module by name ("cython" or "python"); default = active."""
    if backend is None:
        return _kernel
    if backend == "python":
        return _kernel_py
    if backend == "cython":
        from . import _kernel as compiled

        return compiled
    raise ValueError(f"unknown kernel backend {backend!r}")


class ChainKernelData:
    """Flat arrays precomputed once per (model, cover) and shared by all runs."""

    def __init__(self, model: PolymerModel, cover: CliqueCover):
        self.model = model
        self.cover = cover
        m, n = cover.m, model.n
        self.m, self.n = m, n

        clique_off = [0]
        clique_poly = []
        clique_cdf = []
        p_empty = np.empty(m, dtype=np.float64)
        for i in range(m):
            dist = clique_distribution(model, cover, i)
            members = sorted(dist.p_polymer)
            p_empty[i] = dist.p_empty
            acc = dist.p_empty
            for pid in members:
                acc += dist.p_polymer[pid]
                clique_poly.append(pid)
                clique_cdf.append(acc)
            if members:
                clique_cdf[-1] = 1.0  # close the CDF against rounding
            clique_off.append(len(clique_poly))
        self.clique_off = np.array(clique_off, dtype=np.int32)
        self.clique_poly = np.array(clique_poly, dtype=np.int32)
        self.clique_cdf = np.array(clique_cdf, dtype=np.float64)
        self.p_empty = p_empty

        by_poly = [[] for _ in range(n)]
        for i, clique in enumerate(cover.cliques):
            for pid in clique:
                by_poly[pid].append(i)
        self.poly_clique_off = np.array(
            np.concatenate(([0], np.cumsum([len(c) for c in by_poly]))), dtype=np.int32
        )
        self.poly_clique = np.array(
            [i for cl in by_poly for i in sorted(cl)], dtype=np.int32
        )

        self.nbr_off = np.array(
            np.concatenate(([0], np.cumsum([len(model.neighbors(p)) for p in range(n)]))),
            dtype=np.int32,
        )
        self.nbr = np.array(
            [q for p in range(n) for q in model.neighbors(p)], dtype=np.int32
        )

    def static_args(self):
        return (
            self.m,
            self.clique_off,
            self.clique_poly,
            self.clique_cdf,
            self.p_empty,
            self.poly_clique_off,
            self.poly_clique,
            self.nbr_off,
            self.nbr,
        )


@dataclass
class ChainState:
    """Chain state: a valid family plus its per-clique occupancy cache."""

    occ: np.ndarray  # int32[m], occupant polymer id per clique or -1
    in_state: np.ndarray  # uint8[n]

    @property
    def family(self) -> frozenset[int]:
        return frozenset(int(i) for i in np.nonzero(self.in_state)[0])

    def copy(self) -> "ChainState":
        return ChainState(self.occ.copy(), self.in_state.copy())


def make_state(data: ChainKernelData, family=()) -> ChainState:
    """Build a ChainState (default empty) for the given model/cover data."""
    fam = frozenset(family)
    if not is_valid_family(data.model, fam):
        raise InvalidFamilyError(f"{sorted(fam)} is not a valid family")
    occ = np.full(data.m, -1, dtype=np.int32)
    in_state = np.zeros(data.n, dtype=np.uint8)
    for pid in fam:
        in_state[pid] = 1
        for i, clique in enumerate(data.cover.cliques):
            if pid in clique:
                occ[i] = pid
    return ChainState(occ, in_state)


def chain_step(data: ChainKernelData, state: ChainState, rng: np.random.Generator) -> ChainState:
    """One transition; consumes exactly two uniforms from rng."""
    new = state.copy()
    if data.m == 0:
        rng.random(2)
        return new
    _kernel.run_steps(*data.static_args(), new.occ, new.in_state, rng.random(2))
    return new


def run_chain(
    data: ChainKernelData,
    steps: int,
    initial: Optional[ChainState] = None,
    rng: Optional[np.random.Generator] = None,
    trace: bool = False,
):
    """Apply chain_step `steps` times; with trace, also count visited families.

    Returns the final state, or (final state, Counter of post-step families)
    when trace is set.
    """
    if rng is None:
        rng = np.random.default_rng(0)
    state = make_state(data) if initial is None else initial.copy()
    if data.m == 0 or steps == 0:
        return (state, Counter()) if trace else state
    if trace:
        counts = Counter()
        for _ in range(steps):
            _kernel.run_steps(*data.static_args(), state.occ, state.in_state, rng.random(2))
            counts[state.family] += 1
        return state, counts
    done = 0
    per_chunk = max(1, _CHUNK_DOUBLES // 2)
    while done < steps:
        k = min(per_chunk, steps - done)
        _kernel.run_steps(*data.static_args(), state.occ, state.in_state, rng.random(2 * k))
        done += k
    return state


def sample_batch(
    data: ChainKernelData,
    n_samples: int,
    steps: int,
    rng: np.random.Generator,
    initial: Optional[ChainState] = None,
) -> np.ndarray:
    """Final memberships of n_samples independent chains (uint8 matrix).

    All chains start from `initial` (default empty) and run `steps` steps with
    independent uniforms drawn sequentially from rng.
    """
    init = make_state(data) if initial is None else initial
    out = np.empty((n_samples, data.n), dtype=np.uint8)
    if data.m == 0 or steps == 0:
        out[:] = init.in_state
        return out
    per_chunk = max(1, _CHUNK_DOUBLES // (2 * steps))
    done = 0
    while done < n_samples:
        k = min(per_chunk, n_samples - done)
        u = rng.random(2 * steps * k)
        _kernel.run_batch(
            *data.static_args(), init.occ, init.in_state, steps, u, out[done:done + k]
        )
        done += k
    return out


def transition_matrix(model: PolymerModel, cover: CliqueCover, cap=None):
    """Exact dense transition matrix over all families.

    Returns (states, P) where states is the ordered list of families and P is
    row-stochastic with P[a, b] the probability of moving from states[a] to
    states[b] in one step.
    """
    states = enumerate_families(model, cap=cap)
    index = {fam: i for i, fam in enumerate(states)}
    m = cover.m
    P = np.zeros((len(states), len(states)))
    if m == 0:
        np.fill_diagonal(P, 1.0)
        return states, P
    dists = [clique_distribution(model, cover, i) for i in range(m)]
    for a, fam in enumerate(states):
        for dist in dists:
            clique = cover.cliques[dist.clique_index]
            # empty outcome: drop the occupant of this clique, if any
            target = fam - clique
            P[a, index[target]] += dist.p_empty / m
            for pid, p in dist.p_polymer.items():
                if pid in fam:
                    target = fam
                elif all(q not in fam for q in model.neighbors(pid)):
                    target = fam | {pid}
                else:
                    target = fam
                P[a, index[target]] += p / m
    return states, P


def stationary_distribution(P: np.ndarray, tol: float = 1e-14, max_doublings: int = 80) -> np.ndarray:
    """Stationary vector of a row-stochastic matrix via repeated squaring."""
    Q = P.copy()
    for _ in range(max_doublings):
        Q2 = Q @ Q
        # renormalize: squaring doubly-exponentially amplifies row-sum drift
        Q2 /= Q2.sum(axis=1, keepdims=True)
        if np.max(np.abs(Q2 - Q)) < tol:
            Q = Q2
            break
        Q = Q2
    pi = Q.mean(axis=0)
    return pi / pi.sum()


def empirical_tv(
    model: PolymerModel,
    cover: CliqueCover,
    steps: int,
    trials: int,
    rng: np.random.Generator,
    initial_family=(),
    cap=None,
) -> float:
    """TV distance between the empirical end-state law and exact Gibbs."""
    if trials < 1:
        raise ValueError("trials must be >= 1")
    data = ChainKernelData(model, cover)
    init = make_state(data, initial_family)
    finals = sample_batch(data, trials, steps, rng, initial=init)
    counts = Counter()
    for row in finals:
        counts[frozenset(int(i) for i in np.nonzero(row)[0])] += 1
    fams = enumerate_families(model, cap=cap)
    tv = 0.0
    for fam in fams:
        exact = gibbs_probability(model, fam, cap=cap)
        tv += abs(counts.get(fam, 0) / trials - exact)
    return 0.5 * tv


def dump_trajectory_csv(path, data: ChainKernelData, steps: int, rng, initial=None) -> None:
    """Debug helper: write step, family (sorted ids joined by ';') rows."""
    state = make_state(data) if initial is None else initial.copy()
    with open(path, "w") as fh:
        fh.write("step,family\n")
        fh.write(f"0,{';'.join(map(str, sorted(state.family)))}\n")
        for t in range(1, steps + 1):
            state = chain_step(data, state, rng)
            fh.write(f"{t},{';'.join(map(str, sorted(state.family)))}\n")
