"""Desk-scale synthetic corpora with a known vocabulary.

Words are random strings over a shared CJK character pool, each with one POS
tag; sentences follow a random tag bigram chain.  A block of words is held
out of the training sentences so the test set contains genuine unseen
words, and lexicon, entry list and raw text are generated to cover them,
standing in for external wordhood resources.
"""

from __future__ import annotations

import random
from dataclasses import dataclass, field

from .core import make_analysis

TAGS = ("NN", "VV", "AD", "NR")
CATEGORY_OF = {"NN": "n", "VV": "v", "AD": "d", "NR": "nr"}
LENGTHS = (1, 2, 3, 4)
LENGTH_WEIGHTS = (0.2, 0.5, 0.2, 0.1)


@dataclass
class SyntheticData:
    train: list
    test: list
    vocab: dict            # word -> tag
    test_only: list
    lexicon: dict          # word -> frozenset of categories
    entries: frozenset
    raw_text: str
    tags: tuple = TAGS
    transitions: dict = field(default_factory=dict)


def _make_vocab(rng, size, n_chars):
    pool = [chr(0x4E00 + k) for k in rng.sample(range(0x5000), n_chars)]
    vocab = {}
    while len(vocab) < size:
        k = rng.choices(LENGTHS, LENGTH_WEIGHTS)[0]
        w = "".join(rng.choice(pool) for _ in range(k))
        if w not in vocab:
            vocab[w] = rng.choice(TAGS)
    return vocab


def _transition_table(rng):
    table = {}
    for prev in ("<s>",) + TAGS:
        weights = [rng.random() + 0.1 for _ in TAGS]
        total = sum(weights)
        table[prev] = [x / total for x in weights]
    return table


def _sentence(rng, by_tag, table, target_len, must=None):
    words = []
    prev = "<s>"
    length = 0
    while length < target_len:
        tag = rng.choices(TAGS, table[prev])[0]
        choices = by_tag.get(tag)
        if not choices:
            continue
        w = choices[min(int(rng.paretovariate(1.2)) - 1, len(choices) - 1)]
        words.append((w, tag))
        length += len(w)
        prev = tag
    if must is not None:
        pos = rng.randrange(len(words))
        words[pos] = must
    return make_analysis(words)


def make_synthetic(n_sentences=500, vocab_size=300, n_test_only=50, test_fraction=0.2,
                   sentence_len=25, n_chars=150, raw_sentences=3000, seed=0) -> SyntheticData:
    rng = random.Random(seed)
    vocab = _make_vocab(rng, vocab_size, n_chars)
    words = list(vocab)
    multi = [w for w in words if len(w) > 1]
    test_only = rng.sample(multi, n_test_only)
    held = set(test_only)
    table = _transition_table(rng)

    def grouped(pool):
        by_tag: dict[str, list] = {}
        for w in pool:
            by_tag.setdefault(vocab[w], []).append(w)
        for lst in by_tag.values():
            rng.shuffle(lst)
        return by_tag

    train_tags = grouped([w for w in words if w not in held])
    all_tags = grouped(words)
    n_test = round(n_sentences * test_fraction)
    n_train = n_sentences - n_test

    def pair(edges):
        return "".join(e.w for e in edges), edges

    train = [pair(_sentence(rng, train_tags, table, sentence_len)) for _ in range(n_train)]
    test = []
    for k in range(n_test):
        w = test_only[k % len(test_only)]
        test.append(pair(_sentence(rng, train_tags, table, sentence_len, (w, vocab[w]))))

    lexicon = {w: frozenset({CATEGORY_OF[t]}) for w, t in vocab.items()}
    entries = frozenset(w for w, t in vocab.items() if t == "NR")
    raw_lines = []
    for _ in range(raw_sentences):
        edges = _sentence(rng, all_tags, table, sentence_len // 2)
        raw_lines.append("".join(e.w for e in edges) + rng.choice("，。"))
    return SyntheticData(train, test, vocab, test_only, lexicon, entries,
                         "\n".join(raw_lines) + "\n", TAGS, table)
