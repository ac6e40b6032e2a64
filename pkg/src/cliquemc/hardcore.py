"""Hard-core model on bipartite expanders, translated into polymer models.

Polymers on side i of a bipartite graph G are the small (at most half the
side) vertex sets that are connected in G^2; a polymer's weight is
lambda^|S| / (1+lambda)^|N_G(S)|, two polymers are incompatible when their
vertex sets touch in G^2, and the natural clique cover has one clique per
vertex of the side. The two side partition functions combine to approximate
the hard-core partition function of G.
"""

from __future__ import annotations

import math
import warnings
from dataclasses import dataclass, field
from typing import Iterable, Optional, Sequence

import numpy as np

from .conditions import GrowthFunction, size_f
from .errors import EnumerationCapError, GraphFormatError
from .estimator import EstimateResult, approximate_partition_function, median_amplify
from .model import CliqueCover, Polymer, PolymerModel
from .truncation import truncation_threshold

# Truncation plan used for the hard-core polymer models.
HARDCORE_GROWTH = GrowthFunction("exp", a=0.2)
HARDCORE_B = 1.0


class BipartiteGraph:
    """Bipartite graph with parts L (ids 0..n_left-1) and R (0..n_right-1)."""

    def __init__(self, n_left: int, n_right: int, edges: Iterable[tuple[int, int]]):
        if n_left < 0 or n_right < 0:
            raise GraphFormatError("side sizes must be non-negative")
        self.n_left = n_left
        self.n_right = n_right
        edge_set = set()
        self.left_adj = [set() for _ in range(n_left)]
        self.right_adj = [set() for _ in range(n_right)]
        for u, v in edges:
            if not (0 <= u < n_left) or not (0 <= v < n_right):
                raise GraphFormatError(f"edge ({u}, {v}) crosses outside the bipartition")
            if (u, v) in edge_set:
                raise GraphFormatError(f"duplicate edge ({u}, {v})")
            edge_set.add((u, v))
            self.left_adj[u].add(v)
            self.right_adj[v].add(u)
        self.edges = edge_set
        degs = [len(a) for a in self.left_adj] + [len(a) for a in self.right_adj]
        self.max_degree = max(degs, default=0)

    @property
    def n(self) -> int:
        return self.n_left + self.n_right

    def side_vertices(self, side: str) -> range:
        return range(self.n_left) if side == "L" else range(self.n_right)

    def side_size(self, side: str) -> int:
        return self.n_left if side == "L" else self.n_right

    def neighborhood(self, S: Iterable[int], side: str) -> set[int]:
        """N_G(S) on the opposite side, for S on the given side."""
        adj = self.left_adj if side == "L" else self.right_adj
        out = set()
        for u in S:
            out |= adj[u]
        return out

    def global_id(self, side: str, v: int) -> int:
        return v if side == "L" else self.n_left + v

    def global_adjacency(self) -> list[set[int]]:
        """Adjacency over global ids 0..n-1 (left first, then right)."""
        adj = [set() for _ in range(self.n)]
        for u, v in self.edges:
            g = self.n_left + v
            adj[u].add(g)
            adj[g].add(u)
        return adj


def load_graph(text: str) -> BipartiteGraph:
    """Parse the graph format: "n_left n_right" then one "u v" edge per line;
    '#' starts a comment."""
    lines = text.splitlines()
    header = None
    edges = []
    for lineno, raw in enumerate(lines, start=1):
        line = raw.split("#", 1)[0].strip()
        if not line:
            continue
        parts = line.split()
        if len(parts) != 2:
            raise GraphFormatError(f"line {lineno}: expected two integers, got {raw!r}")
        try:
            a, b = int(parts[0]), int(parts[1])
        except ValueError:
            raise GraphFormatError(f"line {lineno}: expected two integers, got {raw!r}")
        if header is None:
            header = (a, b)
        else:
            edges.append((a, b))
    if header is None:
        raise GraphFormatError("empty graph file")
    try:
        return BipartiteGraph(header[0], header[1], edges)
    except GraphFormatError as exc:
        raise GraphFormatError(str(exc)) from None


def load_graph_file(path) -> BipartiteGraph:
    with open(path) as fh:
        return load_graph(fh.read())


def check_bipartite_expander(
    G: BipartiteGraph, alpha: float, cap: int = 20
) -> tuple[bool, Optional[tuple[str, frozenset[int]]]]:
    """Brute-force expansion check: every small one-sided S needs
    |N(S)| >= (1+alpha)|S|. Returns (ok, witness) with a violating set on
    failure."""
    if not (0 < alpha <= 1):
        raise ValueError(f"alpha must be in (0, 1], got {alpha}")
    if max(G.n_left, G.n_right) > cap:
        raise EnumerationCapError(f"sides larger than {cap} need the spectral route")
    for side in ("L", "R"):
        size = G.side_size(side)
        limit = size // 2
        vertices = list(G.side_vertices(side))
        for mask in range(1, 1 << size):
            S = [vertices[i] for i in range(size) if mask >> i & 1]
            if len(S) > limit:
                continue
            if len(G.neighborhood(S, side)) < (1 + alpha) * len(S):
                return False, (side, frozenset(S))
    return True, None


def square_graph(G: BipartiteGraph) -> list[set[int]]:
    """G^2 over global ids: an edge whenever two vertices are at distance
    at most 2 in G."""
    base = G.global_adjacency()
    sq = [set(nbrs) for nbrs in base]
    for v in range(G.n):
        for u in base[v]:
            sq[v] |= base[u]
        sq[v].discard(v)
    return sq


def side_square_adjacency(G: BipartiteGraph, side: str) -> list[set[int]]:
    """G^2 restricted to one side (two vertices sharing a G-neighbor)."""
    own = G.left_adj if side == "L" else G.right_adj
    other = G.right_adj if side == "L" else G.left_adj
    adj = [set() for _ in range(G.side_size(side))]
    for v in G.side_vertices(side):
        for r in own[v]:
            adj[v] |= other[r]
        adj[v].discard(v)
    return adj


def enumerate_connected_sets(adj: Sequence[Iterable[int]], v: int, k: int) -> list[frozenset[int]]:
    """All connected vertex sets containing v with size <= k, each once.

    Uses canonical growth: within one expansion round, candidates handled
    earlier are banned for later branches, so every set has a unique
    generation path.
    """
    if k < 1:
        raise ValueError("k must be >= 1")
    out = []

    def rec(S: frozenset[int], banned: frozenset[int]):
        out.append(S)
        if len(S) == k:
            return
        frontier = sorted(set().union(*(adj[u] for u in S)) - S - banned)
        for idx, u in enumerate(frontier):
            rec(S | {u}, banned | frozenset(frontier[:idx]))

    rec(frozenset([v]), frozenset())
    return out


def connected_count_bound(delta: int, k: int) -> float:
    """Upper bound e^k delta^(k-1) / (k^(3/2) sqrt(2 pi)) on the number of
    connected k-vertex induced subgraphs through a fixed vertex."""
    return math.e**k * delta ** (k - 1) / (k**1.5 * math.sqrt(2 * math.pi))


def polymer_weight(G: BipartiteGraph, S: Iterable[int], side: str, lam: float) -> float:
    """ln of lambda^|S| / (1+lambda)^|N_G(S)| for a one-sided vertex set."""
    S = set(S)
    if not S:
        raise ValueError("polymer vertex set must be non-empty")
    return len(S) * math.log(lam) - len(G.neighborhood(S, side)) * math.log1p(lam)


def build_polymer_model(
    G: BipartiteGraph,
    side: str,
    lam: float,
    k: Optional[float] = None,
    cap: int = 20,
) -> tuple[PolymerModel, CliqueCover, list[frozenset[int]]]:
    """Polymer model and per-vertex clique cover for one side of G.

    Polymers are the small (<= floor(|side|/2)) G^2-connected vertex sets of
    the side, optionally capped at size k. Returns (model, cover, vertex sets
    indexed by polymer id).
    """
    if side not in ("L", "R"):
        raise ValueError("side must be 'L' or 'R'")
    if not (lam > 0):
        raise ValueError("lambda must be positive")
    size = G.side_size(side)
    if k is None and size > cap:
        raise EnumerationCapError(
            f"side of {size} vertices needs an explicit size cap k"
        )
    max_size = size // 2
    if k is not None:
        max_size = min(max_size, math.floor(k))
    adj = side_square_adjacency(G, side)

    sets: set[frozenset[int]] = set()
    if max_size >= 1:
        for v in range(size):
            # restrict growth to vertices >= v so each set appears once
            adj_ge = [set(x for x in nbrs if x >= v) for nbrs in adj]
            sets.update(enumerate_connected_sets(adj_ge, v, max_size))
    ordered = sorted(sets, key=lambda S: (len(S), sorted(S)))
    polymers = [
        Polymer(pid, polymer_weight(G, S, side, lam), size=float(len(S)))
        for pid, S in enumerate(ordered)
    ]

    touch = []  # vertex set plus its G^2 neighborhood, per polymer
    for S in ordered:
        t = set(S)
        for u in S:
            t |= adj[u]
        touch.append(t)
    pairs = []
    for a in range(len(ordered)):
        for b in range(a + 1, len(ordered)):
            if touch[a] & ordered[b]:
                pairs.append((a, b))
    model = PolymerModel(polymers, pairs)
    cover = CliqueCover(
        [[pid for pid, S in enumerate(ordered) if v in S] for v in range(size)]
    )
    return model, cover, ordered


def exact_hardcore(G: BipartiteGraph, lam: float, cap: int = 30) -> float:
    """ln of the hard-core partition function sum over independent sets,
    by branch-and-reduce on the vertex with highest remaining degree."""
    if G.n > cap:
        raise EnumerationCapError(f"{G.n} vertices exceed the exact cap {cap}")
    adj = G.global_adjacency()
    log_lam = math.log(lam)
    log1p_lam = math.log1p(lam)

    def rec(alive: frozenset[int]) -> float:
        best, deg = None, -1
        for v in alive:
            d = len(adj[v] & alive)
            if d > deg:
                best, deg = v, d
        if deg <= 0:
            return len(alive) * log1p_lam
        without = rec(alive - {best})
        with_v = log_lam + rec(alive - {best} - adj[best])
        return float(np.logaddexp(without, with_v))

    return rec(frozenset(range(G.n)))


# --- thresholds and Table-1 evaluators --------------------------------------


@dataclass(frozen=True)
class LambdaThreshold:
    term1: float  # (e Delta^2 / 0.8)^(1/alpha)
    term2: float  # e^(11/alpha)

    @property
    def threshold(self) -> float:
        return max(self.term1, self.term2)


def lambda_threshold(delta: int, alpha: float) -> LambdaThreshold:
    """Fugacity threshold above which the bipartite-expander pipeline is
    guaranteed: max of the condition bound and the combination bound."""
    if delta < 1:
        raise ValueError(f"max degree must be >= 1, got {delta}")
    if not (0 < alpha <= 1):
        raise ValueError(f"alpha must be in (0, 1], got {alpha}")
    return LambdaThreshold(
        term1=(math.e * delta**2 / 0.8) ** (1.0 / alpha),
        term2=math.exp(11.0 / alpha),
    )


@dataclass
class ThresholdReport:
    row: str
    inputs: dict
    value: float  # threshold, or RHS - LHS residual for inequality rows
    satisfied: Optional[bool] = None

    def to_dict(self) -> dict:
        return {
            "row": self.row,
            "inputs": self.inputs,
            "value": self.value,
            "satisfied": self.satisfied,
        }


UNBALANCED_CONSTANT = 3.3353
MATCHING_CONSTANT = 2.8399

TABLE1_ROWS = ("hardcore_expander", "potts_expander", "hardcore_unbalanced", "matching")


def table1_evaluators(row: str, params: dict) -> ThresholdReport:
    """Closed-form evaluators for the four improved parameter ranges.

    hardcore_expander(delta, alpha[, lam]): lambda threshold.
    potts_expander(delta, q, alpha[, beta]): beta >= (3/2 + ln(delta q))/alpha.
    hardcore_unbalanced(delta_l, delta_r, lambda_l, lambda_r, small_delta_r):
      3.3353 delta_l delta_r lambda_r <= (1+lambda_l)^(small_delta_r/delta_l).
    matching(delta[, z]): z <= 1/sqrt(2.8399 (delta - 1)).
    """
    if row == "hardcore_expander":
        thr = lambda_threshold(int(params["delta"]), params["alpha"]).threshold
        lam = params.get("lam")
        return ThresholdReport(row, dict(params), thr, None if lam is None else lam >= thr)
    if row == "potts_expander":
        beta_star = (1.5 + math.log(params["delta"] * params["q"])) / params["alpha"]
        beta = params.get("beta")
        return ThresholdReport(
            row, dict(params), beta_star, None if beta is None else beta >= beta_star
        )
    if row == "hardcore_unbalanced":
        lhs = UNBALANCED_CONSTANT * params["delta_l"] * params["delta_r"] * params["lambda_r"]
        rhs = (1.0 + params["lambda_l"]) ** (params["small_delta_r"] / params["delta_l"])
        return ThresholdReport(row, dict(params), rhs - lhs, rhs - lhs >= 0)
    if row == "matching":
        z_star = 1.0 / math.sqrt(MATCHING_CONSTANT * (params["delta"] - 1))
        z = params.get("z")
        return ThresholdReport(row, dict(params), z_star, None if z is None else z <= z_star)
    raise ValueError(f"unknown Table-1 row {row!r}; choose from {TABLE1_ROWS}")


# --- full pipeline -----------------------------------------------------------


@dataclass
class CombinedEstimate:
    log_estimate: float  # ln of (1+lam)^|R| Z_L + (1+lam)^|L| Z_R estimate
    lam: float
    epsilon: float
    side_results: dict[str, EstimateResult]
    truncation_k: dict[str, float]
    warnings: list[str] = field(default_factory=list)

    def to_dict(self) -> dict:
        return {
            "log_estimate": self.log_estimate,
            "lambda": self.lam,
            "epsilon": self.epsilon,
            "truncation_k": self.truncation_k,
            "warnings": self.warnings,
            "sides": {s: r.to_dict() for s, r in self.side_results.items()},
        }


def combined_estimate(
    G: BipartiteGraph,
    lam: float,
    alpha: float,
    epsilon: float,
    root_seed: int = 0,
    amplify: bool = True,
    cap: int = 20,
) -> CombinedEstimate:
    """Estimate the hard-core partition function via the two side models.

    Each side model is truncated with the exp(0.2 x), B = 1 plan at
    k = g^{-1}(2 B m / (eps/4)) and its partition function estimated at eps/8
    (half of the per-side eps/4 budget goes to truncation); with amplification
    the per-side failure probability drops to 1 - sqrt(3)/2. The two
    estimates combine as (1+lam)^|R| Z_L + (1+lam)^|L| Z_R in log-space.
    """
    warns = []
    thr = lambda_threshold(max(G.max_degree, 1), alpha)
    if lam < thr.threshold:
        warns.append(
            f"lambda={lam:g} below threshold {thr.threshold:g}; the combination "
            "guarantee is void"
        )
    eps_side = epsilon / 4.0
    side_results = {}
    trunc_k = {}
    log_terms = []
    for side, other_size in (("L", G.n_right), ("R", G.n_left)):
        m = G.side_size(side)
        k = truncation_threshold(
            HARDCORE_GROWTH, HARDCORE_B, max(m, 1), eps_side, doubled=True
        )
        trunc_k[side] = k
        model, cover, _ = build_polymer_model(G, side, lam, k=k, cap=cap)
        f = size_f(model)

        def one(seed, model=model, cover=cover, f=f):
            return approximate_partition_function(
                model, cover, f, eps_side / 2.0, root_seed=seed
            )

        if amplify:
            delta = 1.0 - math.sqrt(3) / 2.0
            result = median_amplify(one, delta, root_seed=root_seed + (0 if side == "L" else 1))
        else:
            result = one(root_seed + (0 if side == "L" else 1))
        side_results[side] = result
        log_terms.append(other_size * math.log1p(lam) + result.log_z_hat)

    log_estimate = float(np.logaddexp(log_terms[0], log_terms[1]))
    for w in warns:
        warnings.warn(w, stacklevel=2)
    return CombinedEstimate(
        log_estimate=log_estimate,
        lam=lam,
        epsilon=epsilon,
        side_results=side_results,
        truncation_k=trunc_k,
        warnings=warns,
    )
