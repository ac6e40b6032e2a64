"""Clique-based self-reducibility estimator for the partition function.

Z telescopes through prefix unions U_i of the clique cover: with
r_i = Z(U_{i-1})/Z(U_i) one has Z = 1 / prod r_i, and r_i equals the
probability that a Gibbs sample over U_i already lies in F(U_{i-1}). Each
r_i is estimated by s approximate chain samples; the schedule
(s, epsilon_s) below makes the product a randomized eps-approximation with
success probability >= 3/4, amplifiable by taking medians.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field
from typing import Callable, Mapping, Optional

import numpy as np

from .conditions import check_clique_dynamics, mixing_time_bound
from .dynamics import ChainKernelData, make_state, run_chain, sample_batch
from .errors import ConditionInputError, DegenerateRatioError, PreconditionError
from .model import CliqueCover, Polymer, PolymerModel, validate_clique_cover


def sample_schedule(z_max: float, m: int, epsilon: float) -> tuple[int, float]:
    """(s, epsilon_s) = (1 + ceil(125 Z_max m / eps^2), eps / (5 Z_max m))."""
    if not (0 < epsilon <= 1):
        raise ConditionInputError(f"epsilon must be in (0, 1], got {epsilon}")
    if m == 0:
        return 1, epsilon
    s = 1 + math.ceil(125.0 * z_max * m / epsilon**2)
    return s, epsilon / (5.0 * z_max * m)


@dataclass(frozen=True)
class RatioEstimate:
    i: int  # clique index, 1-based as in the telescoping product
    r_hat: float
    hits: int

    def to_dict(self) -> dict:
        return {"i": self.i, "r_hat": self.r_hat, "hits": self.hits}


@dataclass
class EstimateResult:
    log_z_hat: float
    epsilon: float
    s: int
    epsilon_s: float
    ratios: list[RatioEstimate]
    root_seed: int
    z_max: float = 1.0
    m: int = 0
    extras: dict = field(default_factory=dict)

    @property
    def z_hat(self) -> float:
        return math.exp(self.log_z_hat)

    def to_dict(self) -> dict:
        return {
            "log_z_hat": self.log_z_hat,
            "z_hat": self.z_hat,
            "epsilon": self.epsilon,
            "s": self.s,
            "epsilon_s": self.epsilon_s,
            "z_max": self.z_max,
            "m": self.m,
            "root_seed": self.root_seed,
            "ratios": [r.to_dict() for r in self.ratios],
            **self.extras,
        }


def _require_clique_dynamics(model: PolymerModel, f: Mapping[int, float]) -> None:
    report = check_clique_dynamics(model, f)
    if not report.holds:
        raise PreconditionError(
            "clique dynamics condition fails; worst polymer "
            f"{report.worst_polymer} with slack {report.min_slack:.6g}"
        )


def sample_gibbs(
    model: PolymerModel,
    cover: CliqueCover,
    f: Mapping[int, float],
    epsilon: float,
    rng: np.random.Generator,
) -> frozenset[int]:
    """One approximate Gibbs sample: the chain run from the empty family for
    mixing_time_bound(epsilon) steps. Refuses if the condition fails."""
    _require_clique_dynamics(model, f)
    steps = mixing_time_bound(model, cover, f, epsilon, check=False)
    data = ChainKernelData(model, cover)
    return run_chain(data, steps, rng=rng).family


def _prefix_submodel(model: PolymerModel, cliques, f):
    """Sub-model induced by the union of the given cliques, plus the matching
    cover and f, with dense re-ids."""
    ids = sorted(set().union(*cliques)) if cliques else []
    remap = {old: new for new, old in enumerate(ids)}
    sub = PolymerModel(
        [
            Polymer(remap[old], float(model.log_weights[old]), float(model.sizes[old]))
            for old in ids
        ],
        [
            (remap[a], remap[b])
            for a, b in model.incompat_pairs()
            if a in remap and b in remap
        ],
    )
    sub_cover = CliqueCover([[remap[p] for p in clique] for clique in cliques])
    sub_f = {remap[old]: f[old] for old in ids}
    return sub, sub_cover, sub_f


def approximate_partition_function(
    model: PolymerModel,
    cover: CliqueCover,
    f: Mapping[int, float],
    epsilon: float,
    root_seed: int = 0,
) -> EstimateResult:
    """Randomized eps-approximation of Z via clique self-reducibility.

    For i = 1..m the chain restricted to cliques 1..i is run for s fresh
    samples of its mixing bound at error epsilon_s; r_hat_i is the fraction of
    end states containing no polymer of clique i outside U_{i-1}. Returns
    1 / prod r_hat_i in log-space. Contract: within (1 +- eps) Z with
    probability >= 3/4.
    """
    if not (0 < epsilon <= 1):
        raise ConditionInputError(f"epsilon must be in (0, 1], got {epsilon}")
    report = validate_clique_cover(model, cover)
    if not report.valid:
        raise PreconditionError(f"invalid clique cover: {report}")
    _require_clique_dynamics(model, f)

    m = cover.m
    w = np.exp(model.log_weights)
    clique_z = [1.0 + float(sum(w[q] for q in c)) for c in cover.cliques]
    z_max = max(clique_z, default=1.0)
    s, eps_s = sample_schedule(z_max, m, epsilon)

    seeds = np.random.SeedSequence(root_seed).spawn(max(m, 1))
    ratios = []
    log_z_hat = 0.0
    seen = set()
    for i in range(1, m + 1):
        prefix = cover.cliques[:i]
        sub, sub_cover, sub_f = _prefix_submodel(model, prefix, f)
        steps = mixing_time_bound(sub, sub_cover, sub_f, eps_s, check=False)
        # The chain over the full polymer set with only the first i cliques
        # active never leaves F(U_i) when started from the empty family.
        data = ChainKernelData(model, CliqueCover(prefix))
        rng = np.random.default_rng(seeds[i - 1])
        finals = sample_batch(data, s, steps, rng)
        forbidden = np.array(sorted(cover.cliques[i - 1] - seen), dtype=np.intp)
        if forbidden.size:
            hits = int(np.sum(~finals[:, forbidden].any(axis=1)))
        else:
            hits = s  # clique i adds nothing new; r_i = 1 exactly
        r_hat = hits / s
        ratios.append(RatioEstimate(i=i, r_hat=r_hat, hits=hits))
        if hits == 0:
            raise DegenerateRatioError(i)
        log_z_hat -= math.log(r_hat)
        seen |= cover.cliques[i - 1]

    return EstimateResult(
        log_z_hat=log_z_hat,
        epsilon=epsilon,
        s=s,
        epsilon_s=eps_s,
        ratios=ratios,
        root_seed=root_seed,
        z_max=z_max,
        m=m,
    )


MEDIAN_RUNS_CONSTANT = 48  # ceil(C ln(1/delta)) runs drive failure below delta


def median_runs(delta: float) -> int:
    if not (0 < delta < 1):
        raise ConditionInputError(f"delta must be in (0, 1), got {delta}")
    return max(1, math.ceil(MEDIAN_RUNS_CONSTANT * math.log(1.0 / delta)))


def median_amplify(
    estimate: Callable[[int], EstimateResult],
    delta: float,
    root_seed: int = 0,
    n_runs: Optional[int] = None,
) -> EstimateResult:
    """Median of independent estimates, by log_z_hat; failure prob <= delta.

    `estimate` is called once per run with a derived integer seed.
    """
    runs = median_runs(delta) if n_runs is None else n_runs
    seeds = np.random.SeedSequence(root_seed).generate_state(runs)
    results = [estimate(int(seed)) for seed in seeds]
    results.sort(key=lambda r: r.log_z_hat)
    return results[len(results) // 2]
