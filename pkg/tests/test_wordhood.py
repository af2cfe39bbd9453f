import itertools
import logging
import random

import pytest

from latticeseg.wordhood import (
    BOUNDARY,
    DEFAULT_PUNCTUATION,
    UNKNOWN,
    NgramStore,
    RestrictedPairSet,
    WordhoodStore,
    build_ngram_store,
    build_ngram_store_from_text,
    match,
    merge_stores,
    rav,
    rav_bucket,
    read_entries,
    read_lexicon,
    select_restricted_pairs,
    split_segments,
    write_entries,
    write_lexicon,
)

from oracles import naive_counts

S = BOUNDARY


def random_text(rng, n, alphabet="天地人和水火", punct="，。\n"):
    return "".join(rng.choice(punct) if rng.random() < 0.12 else rng.choice(alphabet)
                   for _ in range(n))


def test_small_example():
    st = build_ngram_store_from_text("ab。ab")
    assert st.count("ab") == 2
    assert st.context_count(S, "ab", S) == 2
    assert st.count("a") == 2 and st.context_count(S, "a", "b") == 2
    assert st.count("b。a") == 0


def test_segments_split_on_runs_of_boundaries():
    assert split_segments("甲。。乙\n\r丙，") == ["甲", "乙", "丙"]
    assert split_segments("") == []


@pytest.mark.parametrize("size", [1000, 10000])
def test_counts_match_naive_recount(size):
    rng = random.Random(size)
    text = random_text(rng, size)
    max_len = 4
    st = build_ngram_store_from_text(text, max_len)
    freq, ctx = naive_counts(text, max_len, DEFAULT_PUNCTUATION)
    assert st.freq == freq
    flat = {(l, w, r): n for w, cs in st.ctx.items() for (l, r), n in cs.items()}
    assert flat == ctx
    for w, f in st.freq.items():
        assert sum(st.ctx[w].values()) == f


def test_match_thresholds():
    st = NgramStore({"成功": 203254, "成": 225623},
                    {"成功": {("取", S): 782}, "成": {("取", "功"): 1}})
    assert match(st, "成功", ("取", S)) == 1
    assert match(st, "成", ("取", "功")) == 0
    assert match(st, "无", ("取", S)) == 0
    assert match(st, "成", ("取", "功"), eps=1e-6) == 1


def test_match_is_monotone_in_epsilon():
    rng = random.Random(3)
    st = build_ngram_store_from_text(random_text(rng, 3000), 3)
    pairs = sorted(st.pairs())
    words = sorted(st.freq)[:60]
    for w in words:
        for pair in pairs[:40]:
            prev = 1
            for eps in (0, 1e-4, 1e-3, 1e-2, 0.1, 0.5, 1.0, 1.1):
                cur = match(st, w, pair, eps)
                assert cur <= prev
                prev = cur


def naive_rav(st, pairs, w):
    return sum(match(st, w, p, pairs.epsilon) for p in pairs.pairs)


def test_rav_against_definition():
    rng = random.Random(4)
    st = build_ngram_store_from_text(random_text(rng, 10000), 4)
    pairs = select_restricted_pairs(st, sorted(st.freq)[:50], 30)
    for w in list(st.freq)[:300] + ["不在"]:
        v = rav(st, pairs, w)
        assert v == naive_rav(st, pairs, w)
        assert 0 <= v <= len(pairs)


def test_floor_pruning_keeps_rav_of_survivors():
    rng = random.Random(5)
    text = random_text(rng, 5000)
    full = build_ngram_store_from_text(text, 4)
    pruned = build_ngram_store_from_text(text, 4, floor=5)
    pairs = select_restricted_pairs(full, list(full.freq)[:40], 20)
    assert set(pruned.freq) < set(full.freq)
    for w in pruned.freq:
        assert rav(pruned, pairs, w) == rav(full, pairs, w)


def test_true_word_matches_more_pairs_than_fragment():
    # "维亚" only ever occurs inside "拉脱维亚"; "拉脱维亚" appears in many contexts
    lines = [f"{l}拉脱维亚{r}" for l, r in itertools.product("在和与", "的是人")]
    lines += ["拉脱维亚。"] * 3
    st = build_ngram_store_from_text("。".join(lines))
    pairs = RestrictedPairSet(tuple(itertools.product("在和与♯", "的是人♯")), 1e-4)
    assert rav(st, pairs, "拉脱维亚") >= 5
    assert rav(st, pairs, "维亚") <= 1


def brute_top_pairs(st, seeds, k, eps):
    scored = []
    for pair in st.pairs():
        s = sum(match(st, w, pair, eps) for w in set(seeds))
        scored.append((-s, pair))
    return [p for _, p in sorted(scored)[:k]]


def test_selection_equals_exhaustive_top_k():
    rng = random.Random(6)
    st = build_ngram_store_from_text(random_text(rng, 4000), 3)
    seeds = rng.sample(sorted(st.freq), 70)
    chosen = select_restricted_pairs(st, seeds, 25)
    assert list(chosen.pairs) == brute_top_pairs(st, seeds, 25, 1e-4)
    assert chosen == select_restricted_pairs(st, list(reversed(seeds)), 25)
    assert list(chosen.scores) == sorted(chosen.scores, reverse=True)


def test_single_seed_fills_request_and_orders_ties():
    st = build_ngram_store_from_text("甲乙丙。丁乙戊。乙")
    chosen = select_restricted_pairs(st, ["乙"], 3)
    # ♯ (U+266F) sorts before CJK characters
    assert chosen.pairs == ((S, S), ("丁", "戊"), ("甲", "丙"))
    assert not chosen.short


def test_short_pair_set_warns(caplog):
    st = build_ngram_store_from_text("甲乙")
    with caplog.at_level(logging.WARNING):
        chosen = select_restricted_pairs(st, ["甲"], 30)
    assert chosen.short and len(chosen) == len(st.pairs())
    assert "candidate pairs" in caplog.text
    with pytest.raises(ValueError):
        select_restricted_pairs(st, [], 3)


def test_rav_buckets_and_lookup():
    assert [rav_bucket(v) for v in (0, 1, 2, 3, 23, 30)] == [0, 1, 1, 2, 12, 15]
    st = NgramStore({"甲乙": 10, "丙": 4},
                    {"甲乙": {(S, S): 5, ("a", "b"): 5}, "丙": {(S, S): 4}})
    pairs = RestrictedPairSet(((S, S), ("a", "b"), ("c", "d")))
    store = WordhoodStore({"甲乙": frozenset({"n"})}, frozenset({"丙"}), st, pairs)
    assert store.lookup("甲乙") == (frozenset({"n"}), 0, 1)
    assert store.lookup("丙") == (frozenset(), 1, 1)
    assert store.lookup("丁") == (frozenset(), 0, UNKNOWN)
    assert WordhoodStore().lookup("甲乙") == (frozenset(), 0, UNKNOWN)
    assert store.known("丙") and not store.known("丁")


def test_file_round_trips(tmp_path):
    lex = {"水": frozenset({"n"}), "污染": frozenset({"n", "v"})}
    write_lexicon(tmp_path / "lex.tsv", lex)
    assert read_lexicon(tmp_path / "lex.tsv") == lex
    write_entries(tmp_path / "ent.txt", ["拉脱维亚", "北京"])
    assert read_entries(tmp_path / "ent.txt") == {"拉脱维亚", "北京"}
    (tmp_path / "raw.txt").write_text("甲乙丙。丁乙戊\n乙", encoding="utf-8")
    st = build_ngram_store(tmp_path / "raw.txt", 3)
    st.save(tmp_path / "ng")
    assert NgramStore.load(tmp_path / "ng") == st
    pairs = select_restricted_pairs(st, ["乙"], 10)
    pairs.save(tmp_path / "pairs.tsv")
    assert (tmp_path / "pairs.tsv").read_text(encoding="utf-8").startswith("ε=0.0001 count=10\n")
    assert RestrictedPairSet.load(tmp_path / "pairs.tsv") == pairs
    full = WordhoodStore.from_paths(tmp_path / "lex.tsv", tmp_path / "ent.txt",
                                    tmp_path / "ng", tmp_path / "pairs.tsv")
    assert full.lookup("乙") == (frozenset(), 0, rav_bucket(rav(st, pairs, "乙")))


def test_bad_lexicon_line(tmp_path):
    (tmp_path / "lex.tsv").write_text("水\n", encoding="utf-8")
    with pytest.raises(ValueError):
        read_lexicon(tmp_path / "lex.tsv")


def test_merged_shards_equal_single_pass():
    rng = random.Random(7)
    shards = [random_text(rng, 800) for _ in range(3)]
    whole = build_ngram_store_from_text("\n".join(shards), 4, floor=3)
    merged = merge_stores([build_ngram_store_from_text(s, 4) for s in shards], floor=3)
    assert merged == whole
