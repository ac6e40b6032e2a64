"""Weight conditions and the explicit mixing-time bound.

Three per-polymer conditions are checked against a positive function f over
polymer ids:

* clique dynamics:  sum over strict incompatible neighbors of
  f(g') * w'/(1+w')  <=  f(g)
* strong (stricter): sum over the closed incompatible neighborhood of
  f(g') * w'         <=  f(g)
* Fernandez-Procacci: sum over all families inside the closed neighborhood of
  prod f(g') * w'    <=  f(g)

Each checker reports the slack f(g) - LHS per polymer; the condition holds iff
the minimal slack is >= 0 (equality within 1e-12 counts as holding).
"""

from __future__ import annotations

import math
import warnings
from dataclasses import dataclass, field
from typing import Mapping, Optional

import numpy as np

from .errors import ConditionInputError
from .model import (
    CliqueCover,
    PolymerModel,
    enumerate_families,
    validate_clique_cover,
)

SLACK_TOL = 1e-12


@dataclass
class ConditionReport:
    condition_name: str
    per_polymer_slack: dict[int, float]
    extras: dict = field(default_factory=dict)

    @property
    def min_slack(self) -> float:
        return min(self.per_polymer_slack.values(), default=math.inf)

    @property
    def worst_polymer(self) -> Optional[int]:
        if not self.per_polymer_slack:
            return None
        return min(self.per_polymer_slack, key=self.per_polymer_slack.get)

    @property
    def holds(self) -> bool:
        return self.min_slack >= -SLACK_TOL

    def to_dict(self) -> dict:
        return {
            "condition_name": self.condition_name,
            "holds": self.holds,
            "worst_polymer": self.worst_polymer,
            "min_slack": None if not self.per_polymer_slack else self.min_slack,
            **self.extras,
        }


def _f_values(model: PolymerModel, f: Mapping[int, float]) -> np.ndarray:
    vals = np.empty(model.n)
    for pid in range(model.n):
        if pid not in f:
            raise ConditionInputError(f"f is missing polymer {pid}")
        v = float(f[pid])
        if not (v > 0) or not math.isfinite(v):
            raise ConditionInputError(f"f({pid}) = {v} is not a positive finite real")
        vals[pid] = v
    return vals


def uniform_f(model: PolymerModel, value: float = 1.0) -> dict[int, float]:
    return {pid: value for pid in range(model.n)}


def size_f(model: PolymerModel) -> dict[int, float]:
    """f(gamma) = size of gamma; the choice used for the hard-core models."""
    return {pid: float(model.sizes[pid]) for pid in range(model.n)}


def check_clique_dynamics(model: PolymerModel, f: Mapping[int, float]) -> ConditionReport:
    """Per-polymer slack of the clique dynamics condition (self-term excluded)."""
    fv = _f_values(model, f)
    w = np.exp(model.log_weights)
    ratio = fv * w / (1.0 + w)
    slack = {}
    for pid in range(model.n):
        lhs = sum(ratio[q] for q in model.neighbors(pid))
        slack[pid] = float(fv[pid] - lhs)
    return ConditionReport("clique_dynamics", slack)


def check_strong_condition(
    model: PolymerModel,
    f: Mapping[int, float],
    cover: Optional[CliqueCover] = None,
) -> ConditionReport:
    """The stronger per-polymer sum, including the polymer's own term.

    When a cover is supplied, the report extras carry each clique's restricted
    partition function and the implied Z_i <= 2 corollary.
    """
    fv = _f_values(model, f)
    w = np.exp(model.log_weights)
    term = fv * w
    slack = {}
    for pid in range(model.n):
        lhs = term[pid] + sum(term[q] for q in model.neighbors(pid))
        slack[pid] = float(fv[pid] - lhs)
    report = ConditionReport("strong", slack)
    if cover is not None:
        clique_z = [1.0 + float(sum(w[q] for q in clique)) for clique in cover.cliques]
        report.extras["clique_z"] = clique_z
        report.extras["all_clique_z_le_2"] = all(z <= 2.0 + SLACK_TOL for z in clique_z)
    return report


def check_fernandez_procacci(
    model: PolymerModel, f: Mapping[int, float], cap: Optional[int] = 20
) -> ConditionReport:
    """Family-sum condition over each closed incompatible neighborhood.

    The empty family contributes 1, so the LHS is always >= 1.
    """
    fv = _f_values(model, f)
    w = np.exp(model.log_weights)
    term = fv * w
    slack = {}
    for pid in range(model.n):
        closed = set(model.neighbors(pid)) | {pid}
        lhs = 0.0
        for fam in enumerate_families(model, restriction=closed, cap=cap):
            lhs += math.prod(term[q] for q in fam)
        slack[pid] = float(fv[pid] - lhs)
    return ConditionReport("fernandez_procacci", slack)


# --- truncation growth functions -------------------------------------------


@dataclass(frozen=True)
class GrowthFunction:
    """Monotone invertible g from a fixed catalog, so g^{-1} is exact.

    kinds: "exp" g(x) = e^(a x); "power" g(x) = x^a (x > 0); "linear"
    g(x) = a x + b. All require a > 0.
    """

    kind: str
    a: float
    b: float = 0.0

    def __post_init__(self):
        if self.kind not in ("exp", "power", "linear"):
            raise ConditionInputError(f"unknown growth function kind {self.kind!r}")
        if not (self.a > 0):
            raise ConditionInputError("growth function must be increasing: a > 0")

    def __call__(self, x: float) -> float:
        if self.kind == "exp":
            return math.exp(self.a * x)
        if self.kind == "power":
            if x <= 0:
                raise ConditionInputError("power growth needs x > 0")
            return x ** self.a
        return self.a * x + self.b

    def inverse(self, y: float) -> float:
        if self.kind == "exp":
            return math.log(y) / self.a
        if self.kind == "power":
            return y ** (1.0 / self.a)
        return (y - self.b) / self.a

    def to_dict(self) -> dict:
        return {"kind": self.kind, "a": self.a, "b": self.b}


@dataclass
class CliqueTruncationReport:
    """Per-clique weighted sums sum_g g(size) * w against the bound B."""

    B: float
    clique_sums: list[float]

    @property
    def per_clique_holds(self) -> list[bool]:
        return [s <= self.B + SLACK_TOL for s in self.clique_sums]

    @property
    def holds(self) -> bool:
        return all(self.per_clique_holds)


def check_clique_truncation(
    model: PolymerModel, cover: CliqueCover, g: GrowthFunction, B: float
) -> CliqueTruncationReport:
    if not (B > 0):
        raise ConditionInputError("B must be positive")
    w = np.exp(model.log_weights)
    sums = [
        float(sum(g(model.sizes[pid]) * w[pid] for pid in clique))
        for clique in cover.cliques
    ]
    return CliqueTruncationReport(B=B, clique_sums=sums)


# --- mixing time ------------------------------------------------------------


@dataclass(frozen=True)
class MixingBoundInputs:
    """Explicit constants entering the coupling-theorem bound."""

    m: int
    z: dict[int, float]  # z_gamma = sum over cliques containing gamma of 1/Z_i
    eta: float  # 1/(2m)
    kappa: float  # min z / m
    d: float  # min over gamma of f/(z (1+w))
    D: float  # 2m * max over gamma of f/(z (1+w))


def mixing_bound_inputs(
    model: PolymerModel, cover: CliqueCover, f: Mapping[int, float]
) -> MixingBoundInputs:
    report = validate_clique_cover(model, cover)
    if report.uncovered:
        raise ConditionInputError(f"cover misses polymers {list(report.uncovered)}")
    fv = _f_values(model, f)
    w = np.exp(model.log_weights)
    clique_z = [1.0 + float(sum(w[q] for q in clique)) for clique in cover.cliques]
    z = {pid: 0.0 for pid in range(model.n)}
    for i, clique in enumerate(cover.cliques):
        for pid in clique:
            z[pid] += 1.0 / clique_z[i]
    m = cover.m
    delta = {pid: fv[pid] / (z[pid] * (1.0 + w[pid])) for pid in range(model.n)}
    return MixingBoundInputs(
        m=m,
        z=z,
        eta=1.0 / (2 * m),
        kappa=min(z.values()) / m,
        d=min(delta.values()),
        D=2 * m * max(delta.values()),
    )


def mixing_time_bound(
    model: PolymerModel,
    cover: CliqueCover,
    f: Mapping[int, float],
    epsilon: float,
    check: bool = True,
) -> int:
    """Explicit step-count bound: ceil of
    (ln(D/d) + 2 ln 2)^2 / (ln(1+eta)^2 * kappa) * ln(1/epsilon).

    Deterministic in its inputs; 0 for epsilon = 1.
    """
    if not (0 < epsilon <= 1):
        raise ConditionInputError(f"epsilon must be in (0, 1], got {epsilon}")
    if model.n == 0:
        return 0
    if check and not check_clique_dynamics(model, f).holds:
        warnings.warn(
            "clique dynamics condition fails for the given f; the bound is not guaranteed",
            stacklevel=2,
        )
    inp = mixing_bound_inputs(model, cover, f)
    bound = (
        (math.log(inp.D / inp.d) + 2 * math.log(2)) ** 2
        / (math.log(1 + inp.eta) ** 2 * inp.kappa)
        * math.log(1 / epsilon)
    )
    return math.ceil(bound)
