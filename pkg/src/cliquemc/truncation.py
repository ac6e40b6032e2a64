"""Size-based truncation of polymer models and its quality guarantees.

Truncating to size k keeps polymers with size <= k. When every clique's tail
weight above k is at most eps/m, the truncated partition function and Gibbs
distribution stay within e^{-eps} and TV eps of the originals; the clique
truncation condition turns a (g, B) bound into an explicit threshold k.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from typing import Optional

import numpy as np

from .conditions import GrowthFunction
from .errors import ConditionInputError
from .model import (
    CliqueCover,
    Polymer,
    PolymerModel,
    enumerate_families,
    partition_function_exact,
)


@dataclass
class TruncationResult:
    model: PolymerModel
    old_to_new: dict[int, int]
    cover: Optional[CliqueCover]


def truncate(
    model: PolymerModel, k: float, cover: Optional[CliqueCover] = None
) -> TruncationResult:
    """Induced sub-model on polymers of size <= k, with dense re-ids.

    A supplied cover is intersected with the survivors (cliques may become
    empty but the clique count is preserved).
    """
    keep = [pid for pid in range(model.n) if model.sizes[pid] <= k]
    old_to_new = {old: new for new, old in enumerate(keep)}
    polymers = [
        Polymer(id=old_to_new[old], log_weight=float(model.log_weights[old]),
                size=float(model.sizes[old]))
        for old in keep
    ]
    pairs = [
        (old_to_new[a], old_to_new[b])
        for a, b in model.incompat_pairs()
        if a in old_to_new and b in old_to_new
    ]
    new_model = PolymerModel(polymers, pairs)
    new_cover = None
    if cover is not None:
        new_cover = CliqueCover(
            [[old_to_new[p] for p in clique if p in old_to_new] for clique in cover.cliques]
        )
    return TruncationResult(model=new_model, old_to_new=old_to_new, cover=new_cover)


def truncation_threshold(
    g: GrowthFunction, B: float, m: int, epsilon: float, doubled: bool = False
) -> float:
    """Exact threshold k = g^{-1}(B m / eps), or g^{-1}(2 B m / eps) when the
    truncated model feeds the sampler (the doubled variant admits eps = 1)."""
    if doubled:
        if not (0 < epsilon <= 1):
            raise ConditionInputError(f"epsilon must be in (0, 1], got {epsilon}")
        return g.inverse(2.0 * B * m / epsilon)
    if not (0 < epsilon < 1):
        raise ConditionInputError(f"epsilon must be in (0, 1), got {epsilon}")
    return g.inverse(B * m / epsilon)


@dataclass
class TruncationQualityReport:
    k: float
    epsilon: float
    tail_sums: list[float]  # per clique, sum of weights of polymers above k
    premise_holds: bool
    z_ratio: Optional[float] = None  # Z_{<=k} / Z, exact mode only
    tv: Optional[float] = None
    conclusions_hold: Optional[bool] = None


def verify_truncation_quality(
    model: PolymerModel,
    cover: CliqueCover,
    k: float,
    epsilon: float,
    cap: Optional[int] = 20,
    exact: Optional[bool] = None,
) -> TruncationQualityReport:
    """Check the per-clique tail premise; in exact mode also verify the
    e^{-eps} <= Z_{<=k}/Z <= 1 and TV <= eps conclusions by brute force.

    exact=None enables the brute-force check whenever the model fits the cap.
    """
    if not (0 < epsilon < 1):
        raise ConditionInputError(f"epsilon must be in (0, 1), got {epsilon}")
    w = np.exp(model.log_weights)
    m = cover.m
    tails = [
        float(sum(w[pid] for pid in clique if model.sizes[pid] > k))
        for clique in cover.cliques
    ]
    premise = all(t <= epsilon / m + 1e-15 for t in tails) if m else True
    report = TruncationQualityReport(
        k=k, epsilon=epsilon, tail_sums=tails, premise_holds=premise
    )
    if exact is None:
        exact = cap is None or model.n <= cap
    if not exact:
        return report

    small = {pid for pid in range(model.n) if model.sizes[pid] <= k}
    log_z = partition_function_exact(model, cap=cap)
    log_z_small = partition_function_exact(model, restriction=small, cap=cap)
    report.z_ratio = math.exp(log_z_small - log_z)
    tv = 0.0
    for fam in enumerate_families(model, cap=cap):
        p_full = math.exp(sum(model.log_weights[q] for q in fam) - log_z)
        if fam <= small:
            p_trunc = math.exp(sum(model.log_weights[q] for q in fam) - log_z_small)
        else:
            p_trunc = 0.0
        tv += abs(p_full - p_trunc)
    report.tv = 0.5 * tv
    if premise:
        report.conclusions_hold = (
            math.exp(-epsilon) - 1e-12 <= report.z_ratio <= 1.0 + 1e-12
            and report.tv <= epsilon + 1e-12
        )
    return report
