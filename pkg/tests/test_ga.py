from collections import Counter

import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from vbsmpe import (
    BAYESIAN,
    BlockedSet,
    CptUniverse,
    Evidence,
    GaParams,
    Model,
    NoSolutionError,
    crossover,
    dst_score,
    fitness,
    init_population,
    k_mpe,
    mutate,
    run_ga,
    satisfies,
)
from vbsmpe.ga import score_inversions
from vbsmpe.generate import random_bayesian, random_dst, random_evidence
from vbsmpe.model import make_variables
from vbsmpe.oracle import enumerate_top_k

from .conftest import REFERENCE_BEST, REFERENCE_OBJECTIVE


def rng(seed=0):
    return np.random.default_rng(seed)


# ---- fitness ---------------------------------------------------------------


def test_fitness_blocked_is_zero(tables12):
    c = tables12.config(REFERENCE_BEST)
    assert fitness(c, tables12, BlockedSet([c])) == 0.0


def test_fitness_unblocked_equals_score(tables12):
    c = tables12.config(REFERENCE_BEST)
    assert fitness(c, tables12, BlockedSet()) == dst_score(c, tables12)
    assert fitness(c, tables12) == pytest.approx(REFERENCE_OBJECTIVE, abs=1e-8)


# ---- operators ---------------------------------------------------------------


def test_init_fully_clamped(tables12):
    ev = Evidence({v.id: {0} for v in tables12.variables})
    pop = init_population(ev.allowed_values(tables12), 20, rng())
    assert (pop == 0).all()


def test_init_respects_subset(tables12, ev_hgja):
    pop = init_population(ev_hgja.allowed_values(tables12), 200, rng())
    assert set(pop[:, 0]) == {0, 2}
    assert all(satisfies(tuple(row), ev_hgja) for row in pop)


def test_init_deterministic(tables12):
    allowed = Evidence().allowed_values(tables12)
    a = init_population(allowed, 50, rng(7))
    b = init_population(allowed, 50, rng(7))
    assert a.tobytes() == b.tobytes()


def test_mutate_zero_rate_is_identity():
    allowed = [(0, 1, 2)] * 6
    ind = [0, 1, 2, 0, 1, 2]
    assert mutate(ind, allowed, 0.0, rng()).tolist() == ind


def test_mutate_forced_flip_binary():
    allowed = [(0, 1)] * 8
    ind = [0, 1, 1, 0, 0, 1, 0, 1]
    assert mutate(ind, allowed, 1.0, rng()).tolist() == [1 - x for x in ind]


def test_mutate_always_changes_to_a_different_allowed_value():
    allowed = [(0, 2, 3)] * 4
    r = rng(3)
    for _ in range(500):
        out = mutate([0, 2, 3, 0], allowed, 1.0, r)
        assert all(x in (0, 2, 3) for x in out)
        assert (out != [0, 2, 3, 0]).all()


def test_mutate_keeps_clamp(tables12):
    ev = tables12.evidence({"F": ["f2"]})
    allowed = ev.allowed_values(tables12)
    f = tables12.var("F").id
    r = rng(11)
    ind = init_population(allowed, 1, r)[0]
    for p_m in np.linspace(0, 1, 10):
        for _ in range(1000):
            ind = mutate(ind, allowed, p_m, r)
            assert ind[f] == 1


def test_crossover_identical_parents():
    a = [1, 0, 2, 1]
    c, d = crossover(a, a, rng())
    assert c.tolist() == a and d.tolist() == a


def test_crossover_two_loci():
    c, d = crossover([0, 1], [2, 3], rng(), cut=1)
    assert c.tolist() == [0, 3] and d.tolist() == [2, 1]
    # with n = 2 the only possible cut is 1
    c, d = crossover([0, 1], [2, 3], rng(5))
    assert c.tolist() == [0, 3] and d.tolist() == [2, 1]


def test_crossover_preserves_locus_multisets():
    r = rng(2)
    for _ in range(10_000):
        n = int(r.integers(2, 9))
        a, b = r.integers(0, 4, n), r.integers(0, 4, n)
        c, d = crossover(a, b, r)
        for i in range(n):
            assert Counter([a[i], b[i]]) == Counter([c[i], d[i]])


@settings(max_examples=25, deadline=None)
@given(st.integers(0, 2**32), st.integers(1, 4))
def test_clamp_preserved_through_operator_sequences(seed, n_constrained):
    model = random_dst(6, max_frame=3, seed=seed % 1000)
    ev = random_evidence(model, n_constrained, seed=seed)
    allowed = ev.allowed_values(model)
    r = rng(seed)
    pop = list(init_population(allowed, 10, r))
    for _ in range(400):
        i, j = r.integers(0, len(pop), 2)
        if r.random() < 0.5:
            pop[i], pop[j] = crossover(pop[i], pop[j], r)
        else:
            pop[i] = mutate(pop[i], allowed, float(r.random()), r)
    assert all(satisfies(tuple(int(x) for x in ind), ev) for ind in pop)


# ---- run_ga / k_mpe ----------------------------------------------------------


def test_run_ga_single_point_space(tables12):
    c = tables12.config(REFERENCE_BEST)
    ev = Evidence({v: {x} for v, x in enumerate(c)})
    best, trace = run_ga(tables12, ev, GaParams())
    assert best.config == c
    assert best.score == dst_score(c, tables12)
    assert best.generations_used == 1
    assert len(trace) == 2


def test_run_ga_deterministic(tables12, ev_hgja):
    a = run_ga(tables12, ev_hgja, GaParams(seed=5))
    b = run_ga(tables12, ev_hgja, GaParams(seed=5))
    assert a == b


def test_run_ga_fixture_agrees_with_oracle(tables12, ev_hgja):
    target = enumerate_top_k(tables12, ev_hgja, 1).top[0]
    hits = sum(run_ga(tables12, ev_hgja, GaParams(seed=s))[0].config == target.config for s in range(20))
    assert hits >= 18


@pytest.mark.parametrize("selection", ["tournament", "roulette"])
def test_elitism_trace_non_decreasing(tables12, ev_hgja, selection):
    _, trace = run_ga(tables12, ev_hgja, GaParams(seed=1, selection=selection, stagnation_window=0, max_generations=60))
    assert len(trace) == 61
    assert all(b >= a for a, b in zip(trace, trace[1:]))


def test_run_ga_returns_best_across_generations(tables12, ev_hgja):
    best, trace = run_ga(tables12, ev_hgja, GaParams(seed=3, elitism=0))
    assert best.score == max(trace)


def test_run_ga_no_solution_when_everything_blocked():
    variables = make_variables({"X": ["a", "b"]})
    model = Model(variables, BAYESIAN, (CptUniverse((0,), (0.5, 0.5)),))
    with pytest.raises(NoSolutionError):
        run_ga(model, Evidence(), GaParams(max_generations=5), BlockedSet([(0,), (1,)]))


def test_k1_matches_run_ga(tables12, ev_hgja):
    params = GaParams(seed=9)
    (only,) = k_mpe(tables12, ev_hgja, params, 1)
    assert only == run_ga(tables12, ev_hgja, params)[0]


def test_two_point_space():
    variables = make_variables({"X": ["a", "b"], "Y": ["c", "d"]})
    model = Model(variables, BAYESIAN, (CptUniverse((0,), (0.3, 0.7)), CptUniverse((1,), (1.0, 0.0))))
    ev = Evidence({1: {0}})
    out = k_mpe(model, ev, GaParams(seed=0), 2)
    assert [r.config for r in out] == [(1, 0), (0, 0)]
    assert [r.rank for r in out] == [1, 2]
    with pytest.raises(NoSolutionError):
        k_mpe(model, ev, GaParams(seed=0, max_generations=20), 3)


def test_k_mpe_never_repeats(tables12, ev_hgja):
    out = k_mpe(tables12, ev_hgja, GaParams(seed=4), 6)
    assert len({r.config for r in out}) == 6
    assert all(satisfies(r.config, ev_hgja) for r in out)


def test_k3_on_eight_binary_variables():
    model = random_bayesian(8, max_frame=2, max_parents=2, seed=21)
    ev = Evidence()
    expected = sorted(r.score for r in enumerate_top_k(model, ev, 3).top)
    hits = 0
    for seed in range(20):
        got = sorted(r.score for r in k_mpe(model, ev, GaParams(seed=seed), 3))
        hits += np.allclose(got, expected, rtol=1e-9, atol=0)
    assert hits >= 18


def test_score_inversions_flagged():
    from vbsmpe import RankedExplanation

    rows = [RankedExplanation(1, (0,), 0.2, np.log(0.2), 3), RankedExplanation(2, (1,), 0.5, np.log(0.5), 3)]
    notes = score_inversions(rows)
    assert len(notes) == 1 and "rank 2" in notes[0]
    assert score_inversions(rows[:1]) == []


def test_params_validation():
    with pytest.raises(ValueError):
        GaParams(population_size=1)
    with pytest.raises(ValueError):
        GaParams(elitism=50)
    with pytest.raises(ValueError):
        GaParams(selection="rank")
