import math

import numpy as np
import pytest

from combagg.aggregation import aggregate_ordinary, aggregate_weighted, row_geometric_mean
from combagg.errors import BadGroupSize, InputError
from combagg.experiments import (
    SessionSet,
    enumerate_groups,
    evaluate_group,
    generate_synthetic_sessions,
    run_group_experiment,
)
from combagg.pcm import ExpertJudgment
from combagg.robustness import ModelWeights, consistent_pcm_from_weights, mean_relative_error, relative_errors

TRUTH5 = ModelWeights((1, 2, 3, 5, 8))


@pytest.fixture(scope="module")
def corpus():
    return generate_synthetic_sessions(TRUTH5, 6, 25, seed=42)


def test_enumerate_groups_examples():
    groups = list(enumerate_groups(18, 3))
    assert len(groups) == 816 == math.comb(18, 3)
    assert groups[0] == (1, 2, 3) and groups[1] == (1, 2, 4) and groups[-1] == (16, 17, 18)
    assert groups == sorted(groups)
    assert list(enumerate_groups(4, 4)) == [(1, 2, 3, 4)]
    assert len(list(enumerate_groups(5, 2))) == 10


@pytest.mark.parametrize("S, k", [(3, 0), (3, 4)])
def test_bad_group_size(S, k):
    with pytest.raises(BadGroupSize):
        enumerate_groups(S, k)


def test_identical_consistent_sessions_zero_error():
    base = consistent_pcm_from_weights(TRUTH5)
    sset = SessionSet(tuple("ABCDE"), TRUTH5, tuple(ExpertJudgment(f"S{i}", 1.0, base) for i in range(3)))
    for m in ("ordinary", "weighted"):
        assert evaluate_group(sset, (1, 2, 3), m) == pytest.approx(0.0, abs=1e-13)


def test_cached_matches_direct_aggregation(corpus):
    truth = TRUTH5.normalized()
    for combo in [(1, 2, 3), (2, 4, 6), (1, 5)]:
        exam = corpus.examination(combo)
        for m, fn in (("ordinary", aggregate_ordinary), ("weighted", aggregate_weighted)):
            direct = mean_relative_error(relative_errors(fn(exam).weights, truth))
            assert evaluate_group(corpus, combo, m) == pytest.approx(direct, rel=1e-10)


def test_ordinary_is_rgm_composition(corpus):
    combo = (2, 3, 5)
    logs = np.mean([np.log(row_geometric_mean(corpus.sessions[i - 1].pcm).weights) for i in combo],
                   axis=0)
    expected = np.exp(logs) / np.exp(logs).sum()
    err = mean_relative_error(relative_errors(expected, TRUTH5.normalized()))
    assert evaluate_group(corpus, combo, "ordinary") == pytest.approx(err, rel=1e-10)


def test_member_order_irrelevant(corpus):
    for m in ("ordinary", "weighted"):
        assert evaluate_group(corpus, (3, 1, 5), m) == pytest.approx(
            evaluate_group(corpus, (1, 3, 5), m), rel=1e-13)


def test_competences_ignored_in_groups(corpus):
    from dataclasses import replace
    boosted = SessionSet(corpus.object_labels, corpus.truth,
                         tuple(replace(s, competence=3.0) for s in corpus.sessions))
    assert evaluate_group(boosted, (1, 2, 3), "weighted") == pytest.approx(
        evaluate_group(corpus, (1, 2, 3), "weighted"), rel=1e-13)


def test_bad_combination(corpus):
    with pytest.raises(BadGroupSize):
        evaluate_group(corpus, (1, 7), "ordinary")
    with pytest.raises(BadGroupSize):
        evaluate_group(corpus, (1, 1), "ordinary")
    with pytest.raises(InputError):
        evaluate_group(corpus, (1, 2), "median")


def test_run_group_experiment(corpus):
    summary = run_group_experiment(corpus, 3)
    assert summary.combination_count == 20
    for m, s in summary.methods.items():
        errs = summary.errors(m)
        assert len(errs) == 20
        assert s.min_error <= s.mean_error <= s.max_error
        assert s.mean_error == pytest.approx(errs.mean())
    first = summary.rows[0]
    assert first.combination_index == 1 and first.members == (1, 2, 3)
    assert first.member_ids == ("S01", "S02", "S03")


def test_synthetic_deterministic_and_distinct():
    a = generate_synthetic_sessions(TRUTH5, 4, 20, seed=1)
    b = generate_synthetic_sessions(TRUTH5, 4, 20, seed=1)
    c = generate_synthetic_sessions(TRUTH5, 4, 20, seed=2)
    assert [s.pcm.values for s in a.sessions] == [s.pcm.values for s in b.sessions]
    assert a.sessions[0].pcm.values != c.sessions[0].pcm.values
    assert a.sessions[0].pcm.values != a.sessions[1].pcm.values


def test_session_set_validation():
    base = consistent_pcm_from_weights(ModelWeights((1, 2, 3)))
    with pytest.raises(InputError):
        SessionSet(tuple("ABCDE"), TRUTH5, (ExpertJudgment("x", 1.0, base),))
    with pytest.raises(InputError):
        SessionSet(tuple("ABCDE"), TRUTH5, ())
