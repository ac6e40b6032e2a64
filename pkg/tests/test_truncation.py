import math

import numpy as np
import pytest

from cliquemc.conditions import GrowthFunction
from cliquemc.errors import ConditionInputError
from cliquemc.model import CliqueCover, Polymer, PolymerModel, partition_function_exact
from cliquemc.truncation import (
    truncate,
    truncation_threshold,
    verify_truncation_quality,
)
from conftest import random_cover, random_model


def sized_model():
    return PolymerModel(
        [
            Polymer(0, math.log(0.4), size=1.0),
            Polymer(1, math.log(0.2), size=2.0),
            Polymer(2, math.log(0.01), size=5.0),
        ],
        [(0, 1), (1, 2)],
    )


def test_truncate_reids_and_cover():
    m = sized_model()
    cov = CliqueCover([[0, 1], [1, 2]])
    res = truncate(m, 2.0, cov)
    assert res.model.n == 2
    assert res.old_to_new == {0: 0, 1: 1}
    assert res.cover.m == 2  # clique count preserved, second clique shrinks
    assert res.cover.cliques[1] == frozenset({1})
    assert res.model.incompat_pairs() == [(0, 1)]


def test_truncate_keep_all_and_none():
    m = sized_model()
    assert truncate(m, 10.0).model.n == 3
    empty = truncate(m, 0.5).model
    assert empty.n == 0
    assert partition_function_exact(empty) == pytest.approx(0.0, abs=1e-15)


def test_truncation_threshold_frozen_values():
    g = GrowthFunction("exp", 0.2)
    # g^{-1}(B m / eps) with B=1, m=2, eps=0.01 -> 5 ln 200
    assert truncation_threshold(g, 1.0, 2, 0.01) == pytest.approx(
        5 * math.log(200), rel=1e-12
    )
    assert truncation_threshold(g, 1.0, 2, 0.01, doubled=True) == pytest.approx(
        5 * math.log(400), rel=1e-12
    )


def test_truncation_threshold_epsilon_domains():
    g = GrowthFunction("linear", 1.0)
    with pytest.raises(ConditionInputError):
        truncation_threshold(g, 1.0, 1, 1.0)  # eps = 1 needs the doubled variant
    assert truncation_threshold(g, 1.0, 1, 1.0, doubled=True) == pytest.approx(2.0)
    with pytest.raises(ConditionInputError):
        truncation_threshold(g, 1.0, 1, 0.0, doubled=True)


def test_verify_truncation_quality_exact():
    m = sized_model()
    cov = CliqueCover([[0, 1], [1, 2]])
    # k = 2: tail per clique = w2 = 0.01 on clique 2 only; eps = 0.1, m = 2
    rep = verify_truncation_quality(m, cov, k=2.0, epsilon=0.1)
    assert rep.premise_holds
    assert rep.tail_sums == [pytest.approx(0.0), pytest.approx(0.01)]
    assert rep.z_ratio is not None and rep.tv is not None
    assert rep.conclusions_hold
    assert math.exp(-0.1) <= rep.z_ratio <= 1.0
    assert rep.tv <= 0.1


def test_verify_truncation_quality_premise_fails():
    m = sized_model()
    cov = CliqueCover([[0, 1], [1, 2]])
    rep = verify_truncation_quality(m, cov, k=2.0, epsilon=0.001)
    assert not rep.premise_holds
    assert rep.conclusions_hold is None


def test_truncation_random_models_conclusions():
    rng = np.random.default_rng(17)
    checked = 0
    for _ in range(100):
        m = random_model(rng, n_min=2, n_max=8, w_hi=0.4, sizes=True)
        cov = random_cover(rng, m)
        k = float(rng.integers(1, 6))
        w = np.exp(m.log_weights)
        tails = [
            sum(w[p] for p in c if m.sizes[p] > k) for c in cov.cliques
        ]
        eps = max(max(tails) * cov.m * 1.5, 1e-6)
        if not (0 < eps < 1):
            continue
        rep = verify_truncation_quality(m, cov, k, eps)
        assert rep.premise_holds
        assert rep.conclusions_hold
        checked += 1
    assert checked > 40
