import csv
import json
from fractions import Fraction

import pytest

from combagg.errors import (
    DisconnectedGraph,
    FractionParseError,
    NonPositiveEntry,
    SchemaError,
)
from combagg.experiments import generate_synthetic_sessions
from combagg.fileio import (
    emit_csv,
    emit_json,
    examination_from_dict,
    examination_to_dict,
    parse_corpus,
    parse_examination,
    parse_number,
    parse_truth,
    write_corpus,
)
from combagg.robustness import ModelWeights

from conftest import GRADE_COUNTS, UNIFIED_VALUES


def exam_dict(comparisons, kind="multiplicative"):
    return {"kind": kind, "objects": ["a", "b", "c"],
            "experts": [{"id": "E_1", "competence": 1, "comparisons": comparisons}]}


def test_parse_number():
    assert parse_number("13/3", "x") == Fraction(13, 3)
    assert parse_number(2, "x") == Fraction(2)
    assert parse_number("2.5", "x") == Fraction(5, 2)
    assert parse_number(0.5, "x") == 0.5
    for bad in ("1/0", "abc"):
        with pytest.raises(FractionParseError):
            parse_number(bad, "x")
    for bad in (None, True, [1]):
        with pytest.raises(SchemaError):
            parse_number(bad, "x")


def test_example_fixture_exact(example):
    assert example.n == 4 and example.m == 3
    for j, values, grades in zip(example.judgments, UNIFIED_VALUES, GRADE_COUNTS):
        assert list(j.pcm.values.values()) == values
        assert [j.pcm.grade(u, v) for u, v in j.pcm.pairs] == grades
        assert j.competence == 1


def test_round_trip(example, tmp_path):
    out = tmp_path / "exam.json"
    emit_json(examination_to_dict(example), out)
    again = parse_examination(out)
    for a, b in zip(example.judgments, again.judgments):
        assert a.pcm.values == b.pcm.values and a.pcm.grade_counts == b.pcm.grade_counts


def test_errors_name_the_expert():
    with pytest.raises(NonPositiveEntry, match="E_1"):
        examination_from_dict(exam_dict([{"u": 1, "v": 2, "value": "-1"},
                                         {"u": 2, "v": 3, "value": 1}]))
    with pytest.raises(DisconnectedGraph, match="E_1"):
        examination_from_dict(exam_dict([{"u": 1, "v": 2, "value": 1}]))
    with pytest.raises(SchemaError, match="value"):
        examination_from_dict(exam_dict([{"u": 1, "v": 2}]))


def test_malformed_json_has_position(tmp_path):
    bad = tmp_path / "bad.json"
    bad.write_text('{"kind": "multiplicative",\n "objects": [}')
    with pytest.raises(SchemaError, match="line 2"):
        parse_examination(bad)


def test_truth(tmp_path):
    p = tmp_path / "t.json"
    p.write_text(json.dumps({"kind": "multiplicative", "weights": [1, "1/2", 2]}))
    assert parse_truth(p).weights == (1.0, 0.5, 2.0)
    assert parse_truth(p, "add").kind.value == "additive"


def test_corpus_round_trip(tmp_path):
    sset = generate_synthetic_sessions(ModelWeights((1, 2, 3)), 4, 10, seed=3)
    manifest = write_corpus(sset, tmp_path / "corpus")
    back = parse_corpus(manifest)
    assert back.size == 4 and back.truth == sset.truth
    assert [s.expert_id for s in back.sessions] == ["S01", "S02", "S03", "S04"]
    for a, b in zip(sset.sessions, back.sessions):
        for p in a.pcm.pairs:
            assert float(b.pcm.values[p]) == pytest.approx(float(a.pcm.values[p]), rel=1e-11)


def test_emit_csv(tmp_path):
    path = tmp_path / "x.csv"
    emit_csv([{"a": 1, "b": 0.1 + 0.2}], path, ["a", "b"])
    rows = list(csv.reader(path.open()))
    assert rows == [["a", "b"], ["1", "0.3"]]
    emit_csv([], path, ["a", "b"])
    assert path.read_text() == "a,b\n"
