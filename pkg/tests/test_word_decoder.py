import random
from fractions import Fraction

import pytest

from latticeseg.core import Edge, StructureError, TagSet
from latticeseg.lattice import WeightedEdge, WordLattice
from latticeseg.perceptron import PerceptronModel
from latticeseg.word_decoder import (
    BEST,
    DecodeError,
    WordModel,
    best_path,
    decode_lattice,
    extract_edge_features,
    margin_bucket,
    path_score,
    train_word_model,
)
from latticeseg.wordhood import WordhoodStore

from oracles import all_paths, random_lattice, random_word_model

TAGS = ["NN", "VV"]


def lattice_of(c, edges):
    return WordLattice(c, 15, tuple(WeightedEdge(e, m) for e, m in edges), Fraction(0))


def test_margin_buckets():
    assert margin_bucket(0) == BEST
    assert margin_bucket(Fraction(1, 3)) == 0
    assert margin_bucket(1) == 0
    assert margin_bucket(2) == 1
    assert margin_bucket(Fraction(5, 2)) == 2
    assert margin_bucket(5) == 3
    assert margin_bucket(8) == 3
    assert margin_bucket(9) == 4
    with pytest.raises(StructureError):
        margin_bucket(-1)


def test_template_counts():
    we = WeightedEdge(Edge(0, "拉脱维亚", "NR"), Fraction(0))
    closed = extract_edge_features(None, we)
    assert len(closed) == 9
    assert "4:BEST" in closed and "5:BEST|1" in closed
    assert "8:BOS|NR" in closed and "9:BOS|0|NR|1" in closed
    gold = WeightedEdge(Edge(0, "拉脱维亚", "NR"), None)
    assert [f for f in extract_edge_features(None, gold) if f[:2] in ("4:", "5:")] == []
    store = WordhoodStore(lexicon={"拉脱维亚": frozenset({"ns", "nz"})})
    open_ = extract_edge_features(Edge(0, "在", "P"), we, store, open_mode=True)
    assert [f for f in open_ if f.startswith("10:")] == ["10:NR|ns", "10:NR|nz"]
    assert "11:NR|0" in open_ and "12:NR|UNK" in open_
    assert "9:P|0|NR|1" in open_
    assert len(open_) == 13


def test_closed_mode_ignores_store():
    we = WeightedEdge(Edge(0, "ab", "NN"), Fraction(3))
    assert extract_edge_features(None, we) == extract_edge_features(
        None, we, WordhoodStore(lexicon={"ab": frozenset({"n"})}), open_mode=False)


def test_best_path_matches_exhaustive_search():
    rng = random.Random(0)
    for _ in range(200):
        lat = random_lattice(rng, TAGS)
        open_mode = rng.random() < 0.5
        store = WordhoodStore(lexicon={"a": frozenset({"n"}), "ab": frozenset({"v", "n"})},
                              entries=frozenset({"bc"})) if open_mode else None
        model = random_word_model(rng, lat, TAGS, store, open_mode)
        paths = all_paths(lat)
        scores = [path_score(model, p, store) for p in paths]
        path, score = best_path(model, lat, store)
        assert score == max(scores)
        assert path_score(model, path, store) == score
        if scores.count(score) == 1:
            assert path == paths[scores.index(score)]


def test_single_path_lattice():
    c = "abc"
    edges = [(Edge(0, "ab", "NN"), Fraction(0)), (Edge(2, "c", "VV"), None)]
    model = WordModel(TagSet(TAGS), PerceptronModel({"1:ab": -100}))
    assert decode_lattice(model, lattice_of(c, edges)) == (Edge(0, "ab", "NN"), Edge(2, "c", "VV"))


def test_uncovered_lattice_raises():
    lat = lattice_of("abc", [(Edge(0, "a", "NN"), Fraction(0)), (Edge(2, "c", "NN"), Fraction(0))])
    with pytest.raises(DecodeError) as err:
        best_path(WordModel(TagSet(TAGS)), lat)
    assert err.value.position == 1


def test_open_model_needs_store():
    lat = lattice_of("a", [(Edge(0, "a", "NN"), Fraction(0))])
    with pytest.raises(ValueError):
        best_path(WordModel(TagSet(TAGS), open_mode=True), lat)


def test_gold_only_lattices_give_zero_model():
    golds = [(Edge(0, "ab", "NN"), Edge(2, "c", "VV")), (Edge(0, "d", "NN"),)]
    lats = [lattice_of("abc", [(e, None) for e in golds[0]]),
            lattice_of("d", [(golds[1][0], None)])]
    model = train_word_model(lats, golds, epochs=3)
    assert all(v == 0 for v in model.perceptron.weights.values())
    assert model.scale == 6


def test_missing_gold_edge_is_an_error():
    gold = (Edge(0, "ab", "NN"),)
    lat = lattice_of("ab", [(Edge(0, "a", "NN"), Fraction(0)), (Edge(1, "b", "NN"), Fraction(0))])
    with pytest.raises(StructureError):
        train_word_model([lat], [gold], epochs=1)


def test_two_path_update_by_hand():
    # zero model: ties go to the longer word, so "ab" is predicted first
    gold = (Edge(0, "a", "NN"), Edge(1, "b", "NN"))
    lat = lattice_of("ab", [(Edge(0, "ab", "NN"), Fraction(0)),
                            (gold[0], Fraction(2)), (gold[1], Fraction(2))])
    model = train_word_model([lat], [gold], epochs=1)
    w = model.perceptron.weights
    # gold (+1): 1:a 1:b 2:a|NN 2:b|NN 3:0 x2, 4:1 x2, 5:1|0 x2, 6:NN x2, 7:NN|0 x2,
    #            8:BOS|NN 8:NN|NN, 9:BOS|0|NN|0 9:NN|0|NN|0
    # pred (-1): 1:ab 2:ab|NN 3:1 4:BEST 5:BEST|1 6:NN 7:NN|1 8:BOS|NN 9:BOS|0|NN|1
    expect = {"1:a": 1, "1:b": 1, "2:a|NN": 1, "2:b|NN": 1, "3:0": 2, "4:1": 2,
              "5:1|0": 2, "6:NN": 1, "7:NN|0": 2, "8:NN|NN": 1, "9:BOS|0|NN|0": 1,
              "9:NN|0|NN|0": 1, "1:ab": -1, "2:ab|NN": -1, "3:1": -1, "4:BEST": -1,
              "5:BEST|1": -1, "7:NN|1": -1, "9:BOS|0|NN|1": -1}
    assert {k: v for k, v in w.items() if v} == expect
    assert decode_lattice(model, lat) == gold


def test_training_is_deterministic(tmp_path):
    rng = random.Random(4)
    lats, golds = [], []
    for _ in range(20):
        lat = random_lattice(rng, TAGS)
        path = rng.choice(all_paths(lat))
        lats.append(lat)
        golds.append(tuple(we.edge for we in path))
    a = train_word_model(lats, golds, epochs=4, seed=7)
    b = train_word_model(lats, golds, epochs=4, seed=7)
    assert a.perceptron == b.perceptron
    a.save(tmp_path / "a.model")
    b.save(tmp_path / "b.model")
    assert (tmp_path / "a.model").read_bytes() == (tmp_path / "b.model").read_bytes()
    back = WordModel.load(tmp_path / "a.model")
    assert back.perceptron == a.perceptron and list(back.tags) == list(a.tags)
    assert not back.open_mode
    for lat in lats:
        assert decode_lattice(back, lat) == decode_lattice(a, lat)


def test_training_fits_separable_data():
    rng = random.Random(5)
    lats, golds = [], []
    for _ in range(10):
        lat = random_lattice(rng, TAGS)
        lats.append(lat)
    for lat in lats:
        golds.append(tuple(we.edge for we in all_paths(lat)[0]))
    model = train_word_model(lats, golds, epochs=30)
    hits = sum(decode_lattice(model, lat) == g for lat, g in zip(lats, golds))
    assert hits >= 7
