import math
from itertools import product

import numpy as np
import pytest

from vbsmpe import BAYESIAN, CapacityError, CptUniverse, Evidence, Model, enumerate_top_k, exact_joint_commonality, joint_table, prob_score
from vbsmpe import oracle as oracle_mod
from vbsmpe.dst import MassUniverse, vacuous
from vbsmpe.generate import random_bayesian, random_dst, random_evidence
from vbsmpe.model import DST, make_variables

from .conftest import REFERENCE_BEST, REFERENCE_OBJECTIVE


def test_fixture_top1(tables12, ev_hgja):
    res = enumerate_top_k(tables12, ev_hgja, 1)
    assert res.total_enumerated == 128
    (top,) = res.top
    assert top.config == tables12.config(REFERENCE_BEST)
    assert top.score == pytest.approx(REFERENCE_OBJECTIVE, abs=1e-8)


def test_fixture_with_literal_f_clamp(tables12, ev_hfgja):
    # with F clamped to f2 the published optimum is not reachable
    res = enumerate_top_k(tables12, ev_hfgja, 1)
    assert res.total_enumerated == 64
    assert res.top[0].config != tables12.config(REFERENCE_BEST)
    assert res.top[0].score < REFERENCE_OBJECTIVE


def _coin():
    return Model(make_variables({"X": ["h", "t"]}), BAYESIAN, (CptUniverse((0,), (0.5, 0.5)),))


def test_symmetric_tie_is_lexicographic():
    res = enumerate_top_k(_coin(), Evidence(), 2)
    assert [r.config for r in res.top] == [(0,), (1,)]
    assert [r.score for r in res.top] == [0.5, 0.5]


def test_k_capped_at_space():
    res = enumerate_top_k(_coin(), Evidence(), 10)
    assert len(res.top) == 2


def test_capacity_guard():
    variables = make_variables({f"X{i}": ["a", "b"] for i in range(30)})
    model = Model(variables, BAYESIAN, tuple(CptUniverse((i,), (0.5, 0.5)) for i in range(30)))
    with pytest.raises(CapacityError):
        enumerate_top_k(model, Evidence(), 1)


def test_sorted_and_complete():
    model = random_bayesian(6, max_frame=3, seed=5)
    space = math.prod(model.frame_sizes)
    res = enumerate_top_k(model, Evidence(), space)
    scores = [r.score for r in res.top]
    assert scores == sorted(scores, reverse=True)
    assert len({r.config for r in res.top}) == space
    assert math.fsum(scores) == pytest.approx(1.0, abs=1e-6)
    for r in res.top:
        assert r.score == prob_score(r.config, model)


def test_chunked_merge_matches_single_pass(monkeypatch):
    model = random_dst(7, max_frame=3, seed=2)
    ev = random_evidence(model, 2, seed=2)
    whole = enumerate_top_k(model, ev, 15)
    monkeypatch.setattr(oracle_mod, "CHUNK", 7)
    pieces = enumerate_top_k(model, ev, 15)
    assert whole == pieces


def test_ties_across_chunks_stay_lexicographic(monkeypatch):
    variables = make_variables({f"X{i}": ["a", "b", "c"] for i in range(3)})
    model = Model(variables, DST, tuple(vacuous((i,), (3,)) for i in range(3)))
    monkeypatch.setattr(oracle_mod, "CHUNK", 4)
    res = enumerate_top_k(model, Evidence(), 27)
    assert [r.config for r in res.top] == list(product(range(3), repeat=3))


def test_joint_table_coin():
    assert joint_table(_coin()).tolist() == [0.5, 0.5]


def test_joint_table_matches_prob_score():
    model = random_bayesian(3, max_frame=3, seed=17)
    joint = joint_table(model)
    for i, config in enumerate(product(*(range(s) for s in model.frame_sizes))):
        assert joint[i] == pytest.approx(prob_score(config, model), rel=1e-12)


def test_joint_table_deterministic_chain():
    variables = make_variables({"X": ["a", "b"], "Y": ["c", "d"], "Z": ["e", "f"]})
    cpts = (
        CptUniverse((0,), (0.0, 1.0)),
        CptUniverse((1, 0), (1.0, 0.0, 0.0, 1.0)),
        CptUniverse((2, 1), (0.0, 1.0, 1.0, 0.0)),
    )
    joint = joint_table(Model(variables, BAYESIAN, cpts))
    assert (joint == 1.0).sum() == 1 and joint.sum() == 1.0


def test_joint_table_guard():
    variables = make_variables({f"X{i}": ["a", "b"] for i in range(21)})
    model = Model(variables, BAYESIAN, tuple(CptUniverse((i,), (0.5, 0.5)) for i in range(21)))
    with pytest.raises(CapacityError):
        joint_table(model)


def test_exact_joint_commonality_vacuous():
    variables = make_variables({"X": ["a", "b"], "Y": ["c", "d"]})
    model = Model(variables, DST, (vacuous((0, 1), (2, 2)),))
    for config in product(range(2), range(2)):
        assert exact_joint_commonality(model, config) == 1.0


def test_exact_joint_commonality_two_binary_universes():
    m1 = MassUniverse((0,), (2,), ((frozenset({(0,)}), 0.6), (frozenset({(0,), (1,)}), 0.4)))
    m2 = MassUniverse((0,), (2,), ((frozenset({(1,)}), 0.5), (frozenset({(0,), (1,)}), 0.5)))
    model = Model(make_variables({"X": ["x1", "x2"]}), DST, (m1, m2))
    assert exact_joint_commonality(model, (0,)) == pytest.approx((0.30 + 0.20) / 0.70, abs=1e-15)


@pytest.mark.parametrize("seed", range(6))
def test_proportionality_on_random_models(seed):
    model = random_dst(5, max_frame=2, universe_size=2, focal_count=3, seed=seed)
    ratios = []
    for config in product(*(range(s) for s in model.frame_sizes)):
        from vbsmpe import dst_score

        s = dst_score(config, model)
        if s > 0:
            ratios.append(exact_joint_commonality(model, config) / s)
    assert ratios
    assert (max(ratios) - min(ratios)) / min(ratios) < 1e-9
