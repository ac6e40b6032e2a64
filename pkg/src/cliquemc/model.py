"""Abstract polymer models: weighted polymers with an incompatibility relation.

A model holds a finite set of polymers, each with a positive weight (stored as
its natural log) and a positive size, plus a symmetric incompatibility
relation over polymer ids. Compatible subsets are "families"; the weighted sum
over all families is the partition function, and the Gibbs distribution puts
mass on each family proportional to its weight product.

All weight arithmetic is done in log-space with log-sum-exp aggregation so
that models built from hard-core weights at large fugacity do not overflow.
"""

from __future__ import annotations

import json
import math
from dataclasses import dataclass
from typing import Iterable, Optional, Sequence

import numpy as np

from .errors import (
    EnumerationCapError,
    InvalidFamilyError,
    UnknownPolymerError,
)

DEFAULT_ENUMERATION_CAP = 20


@dataclass(frozen=True)
class Polymer:
    """One polymer: dense id, ln(weight), and a positive size."""

    id: int
    log_weight: float
    size: float = 1.0

    def __post_init__(self):
        if self.id < 0:
            raise ValueError(f"polymer id must be >= 0, got {self.id}")
        if not math.isfinite(self.log_weight):
            raise ValueError(f"log_weight must be finite, got {self.log_weight}")
        if not (self.size > 0):
            raise ValueError(f"size must be > 0, got {self.size}")


class PolymerModel:
    """Immutable polymer model: polymers plus the incompatibility relation.

    Ids must be dense integers 0..n-1. The relation is stored as a sorted
    adjacency structure; reflexive self-incompatibility is implicit and never
    stored.
    """

    def __init__(self, polymers: Sequence[Polymer], incompat: Iterable[tuple[int, int]]):
        polymers = sorted(polymers, key=lambda p: p.id)
        ids = [p.id for p in polymers]
        if ids != list(range(len(polymers))):
            raise ValueError("polymer ids must be unique and contiguous from 0")
        self._polymers = tuple(polymers)
        n = len(polymers)
        adj = [set() for _ in range(n)]
        for a, b in incompat:
            if not (0 <= a < n) or not (0 <= b < n):
                raise UnknownPolymerError(f"incompatibility pair ({a}, {b}) out of range")
            if a == b:
                continue  # reflexivity is implicit
            adj[a].add(b)
            adj[b].add(a)
        self._adj = tuple(tuple(sorted(s)) for s in adj)
        self.log_weights = np.array([p.log_weight for p in polymers], dtype=np.float64)
        self.sizes = np.array([p.size for p in polymers], dtype=np.float64)

    @property
    def n(self) -> int:
        return len(self._polymers)

    @property
    def polymers(self) -> tuple[Polymer, ...]:
        return self._polymers

    def weight(self, pid: int) -> float:
        self._check_id(pid)
        return math.exp(self.log_weights[pid])

    def neighbors(self, pid: int) -> tuple[int, ...]:
        """Ids incompatible with pid, excluding pid itself."""
        self._check_id(pid)
        return self._adj[pid]

    def incompatible(self, a: int, b: int) -> bool:
        """True iff a and b are incompatible; reflexive, so always true for a == b."""
        self._check_id(a)
        self._check_id(b)
        return a == b or b in self._adj[a]

    def incompat_pairs(self) -> list[tuple[int, int]]:
        return [(a, b) for a in range(self.n) for b in self._adj[a] if a < b]

    def _check_id(self, pid: int) -> None:
        if not (0 <= pid < self.n):
            raise UnknownPolymerError(f"unknown polymer id {pid}")


class CliqueCover:
    """A sequence of polymer cliques whose union covers all polymers.

    Cliques may overlap and may be empty; validity (pairwise incompatibility
    within each clique, full coverage) is checked by validate_clique_cover.
    """

    def __init__(self, cliques: Sequence[Iterable[int]]):
        self.cliques = tuple(frozenset(c) for c in cliques)

    @property
    def m(self) -> int:
        return len(self.cliques)

    @classmethod
    def trivial(cls, model: PolymerModel) -> "CliqueCover":
        """One singleton clique per polymer (Glauber dynamics)."""
        return cls([[pid] for pid in range(model.n)])


@dataclass(frozen=True)
class CliqueDistribution:
    """Gibbs distribution restricted to one clique: empty family or a singleton."""

    clique_index: int
    p_empty: float
    p_polymer: dict[int, float]


@dataclass(frozen=True)
class CoverReport:
    uncovered: tuple[int, ...]
    compatible_pairs: tuple[tuple[int, int], ...]

    @property
    def valid(self) -> bool:
        return not self.uncovered and not self.compatible_pairs


def is_valid_family(model: PolymerModel, ids: Iterable[int]) -> bool:
    """True iff no distinct pair in ids is incompatible."""
    ids = sorted(set(ids))
    for pid in ids:
        model._check_id(pid)
    for i, a in enumerate(ids):
        nbrs = set(model.neighbors(a))
        if nbrs.intersection(ids[i + 1:]):
            return False
    return True


def _resolve_restriction(model, restriction, cap):
    if restriction is None:
        ids = list(range(model.n))
    else:
        ids = sorted(set(restriction))
        for pid in ids:
            model._check_id(pid)
    if cap is not None and len(ids) > cap:
        raise EnumerationCapError(
            f"{len(ids)} polymers exceed the enumeration cap {cap}"
        )
    return ids


def enumerate_families(
    model: PolymerModel,
    restriction: Optional[Iterable[int]] = None,
    cap: Optional[int] = DEFAULT_ENUMERATION_CAP,
) -> list[frozenset[int]]:
    """All valid families inside the restriction, each exactly once.

    Backtracks over sorted ids so only valid families are visited; the empty
    family is always first.
    """
    ids = _resolve_restriction(model, restriction, cap)
    id_set = set(ids)
    out = []
    current = []
    blocked = set()

    def rec(pos):
        out.append(frozenset(current))
        for j in range(pos, len(ids)):
            pid = ids[j]
            if pid in blocked:
                continue
            newly = [q for q in model.neighbors(pid) if q in id_set and q not in blocked]
            current.append(pid)
            blocked.update(newly)
            blocked.add(pid)
            rec(j + 1)
            current.pop()
            blocked.difference_update(newly)
            blocked.discard(pid)

    rec(0)
    return out


def partition_function_exact(
    model: PolymerModel,
    restriction: Optional[Iterable[int]] = None,
    cap: Optional[int] = DEFAULT_ENUMERATION_CAP,
) -> float:
    """ln of the partition function restricted to `restriction` (brute force).

    The empty family contributes 1, so the result is always >= 0.
    """
    fams = enumerate_families(model, restriction, cap)
    logs = np.array(
        [sum(model.log_weights[p] for p in fam) for fam in fams], dtype=np.float64
    )
    return _logsumexp(logs)


def gibbs_probability(
    model: PolymerModel,
    family: Iterable[int],
    restriction: Optional[Iterable[int]] = None,
    cap: Optional[int] = DEFAULT_ENUMERATION_CAP,
) -> float:
    """Probability of `family` under the (restricted) Gibbs distribution."""
    fam = frozenset(family)
    if not is_valid_family(model, fam):
        raise InvalidFamilyError(f"{sorted(fam)} is not a valid family")
    if restriction is not None and not fam <= set(restriction):
        raise InvalidFamilyError("family is not contained in the restriction")
    log_z = partition_function_exact(model, restriction, cap)
    log_w = sum(model.log_weights[p] for p in fam)
    return math.exp(log_w - log_z)


def clique_distribution(model: PolymerModel, cover: CliqueCover, i: int) -> CliqueDistribution:
    """Exact restricted Gibbs distribution of clique i.

    Z_i = 1 + sum of member weights; p(empty) = 1/Z_i, p(gamma) = w_gamma/Z_i.
    """
    if not (0 <= i < cover.m):
        raise IndexError(f"clique index {i} out of range for m={cover.m}")
    members = sorted(cover.cliques[i])
    for pid in members:
        model._check_id(pid)
    logs = np.concatenate(([0.0], model.log_weights[members]))
    log_z = _logsumexp(logs)
    probs = np.exp(logs - log_z)
    return CliqueDistribution(
        clique_index=i,
        p_empty=float(probs[0]),
        p_polymer={pid: float(p) for pid, p in zip(members, probs[1:])},
    )


def validate_clique_cover(model: PolymerModel, cover: CliqueCover) -> CoverReport:
    """Report polymers not covered and in-clique pairs that are compatible."""
    covered = set().union(*cover.cliques) if cover.cliques else set()
    uncovered = tuple(pid for pid in range(model.n) if pid not in covered)
    bad_pairs = []
    for clique in cover.cliques:
        members = sorted(clique)
        for i, a in enumerate(members):
            for b in members[i + 1:]:
                if not model.incompatible(a, b):
                    bad_pairs.append((a, b))
    return CoverReport(uncovered=uncovered, compatible_pairs=tuple(bad_pairs))


def _logsumexp(values: np.ndarray) -> float:
    if len(values) == 0:
        return -math.inf
    hi = float(np.max(values))
    return hi + math.log(float(np.sum(np.exp(values - hi))))


# --- JSON round trip ------------------------------------------------------


def model_to_dict(model: PolymerModel, cover: Optional[CliqueCover] = None) -> dict:
    doc = {
        "polymers": [
            {"id": p.id, "log_weight": p.log_weight, "size": p.size}
            for p in model.polymers
        ],
        "incompat": [list(pair) for pair in model.incompat_pairs()],
    }
    if cover is not None:
        doc["cliques"] = [sorted(c) for c in cover.cliques]
    return doc


def model_from_dict(doc: dict) -> tuple[PolymerModel, Optional[CliqueCover]]:
    polymers = [
        Polymer(id=int(p["id"]), log_weight=float(p["log_weight"]), size=float(p.get("size", 1.0)))
        for p in doc["polymers"]
    ]
    model = PolymerModel(polymers, [tuple(pair) for pair in doc.get("incompat", [])])
    cover = CliqueCover(doc["cliques"]) if "cliques" in doc else None
    return model, cover


def save_model(path, model: PolymerModel, cover: Optional[CliqueCover] = None) -> None:
    with open(path, "w") as fh:
        json.dump(model_to_dict(model, cover), fh, indent=2, sort_keys=True)
        fh.write("\n")


def load_model(path) -> tuple[PolymerModel, Optional[CliqueCover]]:
    with open(path) as fh:
        return model_from_dict(json.load(fh))
