"""Wordhood evidence for candidate words.

Three resources feed the open-test features of the word model:

* a lexicon mapping words to category symbols,
* a plain set of entries (an encyclopedia title list, say),
* substring statistics from a raw corpus, from which the restricted
  accessor variety (RAV) of a string is computed.

``freq(w)`` counts occurrences of ``w`` and ``freq(l, w, r)`` counts
occurrences with ``l`` immediately to the left and ``r`` immediately to the
right; ``♯`` stands for a segment boundary on either side.  A string
matches a restricted pair ``(l, r)`` when ``freq(l, w, r) / freq(w) >= eps``,
and its RAV is the number of pairs in the set it matches.
"""

from __future__ import annotations

import json
import logging
import math
import os
import re
from collections import Counter, defaultdict
from dataclasses import dataclass, field
from typing import Iterable

BOUNDARY = "♯"
DEFAULT_PUNCTUATION = "，。！？；：、.,!?;:"
DEFAULT_PAIR_COUNT = 30
DEFAULT_EPSILON = 0.0001
UNKNOWN = "UNK"

log = logging.getLogger(__name__)


# -- lexicon and entry set --------------------------------------------------

def read_lexicon(path) -> dict[str, frozenset]:
    """Read ``word TAB category`` lines; a word may repeat with more categories."""
    cats: dict[str, set] = defaultdict(set)
    with open(path, encoding="utf-8") as f:
        for lineno, line in enumerate(f, 1):
            line = line.rstrip("\r\n")
            if not line:
                continue
            parts = line.split("\t")
            if len(parts) != 2 or not parts[0] or not parts[1]:
                raise ValueError(f"{path}:{lineno}: expected 'word TAB category'")
            cats[parts[0]].add(parts[1])
    return {w: frozenset(c) for w, c in cats.items()}


def write_lexicon(path, lexicon: dict) -> None:
    with open(path, "w", encoding="utf-8", newline="\n") as f:
        for w in sorted(lexicon):
            for cat in sorted(lexicon[w]):
                f.write(f"{w}\t{cat}\n")


def read_entries(path) -> frozenset:
    with open(path, encoding="utf-8") as f:
        return frozenset(line.rstrip("\r\n") for line in f if line.strip())


def write_entries(path, entries: Iterable[str]) -> None:
    with open(path, "w", encoding="utf-8", newline="\n") as f:
        for e in sorted(entries):
            f.write(e + "\n")


# -- n-gram statistics ------------------------------------------------------

@dataclass
class NgramStore:
    """Substring and context counts, pruned to strings with ``freq >= floor``.

    ``ctx[w]`` maps ``(l, r)`` to ``freq(l, w, r)``.  Context counts of a
    surviving string are never pruned.
    """

    freq: dict[str, int] = field(default_factory=dict)
    ctx: dict[str, dict[tuple[str, str], int]] = field(default_factory=dict)
    max_word_len: int = 20
    floor: int = 1

    def count(self, w: str) -> int:
        return self.freq.get(w, 0)

    def context_count(self, l: str, w: str, r: str) -> int:
        return self.ctx.get(w, {}).get((l, r), 0)

    def __contains__(self, w):
        return w in self.freq

    def pairs(self) -> set:
        out = set()
        for contexts in self.ctx.values():
            out.update(contexts)
        return out

    def save(self, directory) -> None:
        os.makedirs(directory, exist_ok=True)
        with open(os.path.join(directory, "freq.tsv"), "w", encoding="utf-8", newline="\n") as f:
            for w in sorted(self.freq):
                f.write(f"{w}\t{self.freq[w]}\n")
        with open(os.path.join(directory, "ctx.tsv"), "w", encoding="utf-8", newline="\n") as f:
            for w in sorted(self.ctx):
                for (l, r), n in sorted(self.ctx[w].items()):
                    f.write(f"{l}\t{w}\t{r}\t{n}\n")
        with open(os.path.join(directory, "meta.json"), "w", encoding="utf-8") as f:
            json.dump({"max_word_len": self.max_word_len, "floor": self.floor}, f,
                      sort_keys=True)
            f.write("\n")

    @classmethod
    def load(cls, directory) -> "NgramStore":
        meta_path = os.path.join(directory, "meta.json")
        meta = {}
        if os.path.exists(meta_path):
            with open(meta_path, encoding="utf-8") as f:
                meta = json.load(f)
        freq = {}
        with open(os.path.join(directory, "freq.tsv"), encoding="utf-8") as f:
            for lineno, line in enumerate(f, 1):
                try:
                    w, n = line.rstrip("\n").split("\t")
                    freq[w] = int(n)
                except ValueError:
                    raise ValueError(f"freq.tsv:{lineno}: malformed line") from None
        ctx: dict[str, dict] = {}
        with open(os.path.join(directory, "ctx.tsv"), encoding="utf-8") as f:
            for lineno, line in enumerate(f, 1):
                try:
                    l, w, r, n = line.rstrip("\n").split("\t")
                    ctx.setdefault(w, {})[l, r] = int(n)
                except ValueError:
                    raise ValueError(f"ctx.tsv:{lineno}: malformed line") from None
        return cls(freq, ctx, meta.get("max_word_len", 20), meta.get("floor", 1))


def split_segments(text: str, punctuation: str = DEFAULT_PUNCTUATION) -> list[str]:
    """Split on punctuation and line breaks, dropping empty segments."""
    pattern = "[" + re.escape(punctuation) + r"\r\n]+"
    return [s for s in re.split(pattern, text) if s]


def count_segment(seg: str, max_word_len: int, freq: Counter, ctx) -> None:
    n = len(seg)
    for i in range(n):
        left = seg[i - 1] if i > 0 else BOUNDARY
        for k in range(1, min(max_word_len, n - i) + 1):
            w = seg[i:i + k]
            right = seg[i + k] if i + k < n else BOUNDARY
            freq[w] += 1
            ctx[w][left, right] += 1


def build_ngram_store(raw_corpus_path, max_word_len: int = 20, floor: int = 1,
                      punctuation: str = DEFAULT_PUNCTUATION) -> NgramStore:
    with open(raw_corpus_path, encoding="utf-8") as f:
        text = f.read()
    return build_ngram_store_from_text(text, max_word_len, floor, punctuation)


def build_ngram_store_from_text(text: str, max_word_len: int = 20, floor: int = 1,
                                punctuation: str = DEFAULT_PUNCTUATION) -> NgramStore:
    freq: Counter = Counter()
    ctx: dict = defaultdict(Counter)
    for seg in split_segments(text, punctuation):
        count_segment(seg, max_word_len, freq, ctx)
    kept = {w: n for w, n in freq.items() if n >= floor}
    return NgramStore(kept, {w: dict(ctx[w]) for w in kept}, max_word_len, floor)


def merge_stores(stores: Iterable[NgramStore], floor: int = 1) -> NgramStore:
    """Sum counts of unpruned shard stores, then apply ``floor``."""
    freq: Counter = Counter()
    ctx: dict = defaultdict(Counter)
    max_len = 0
    for st in stores:
        freq.update(st.freq)
        for w, cs in st.ctx.items():
            ctx[w].update(cs)
        max_len = max(max_len, st.max_word_len)
    kept = {w: n for w, n in freq.items() if n >= floor}
    return NgramStore(kept, {w: dict(ctx[w]) for w in kept}, max_len, floor)


# -- restricted pairs and RAV -----------------------------------------------

def match(store: NgramStore, w: str, pair, eps: float = DEFAULT_EPSILON) -> int:
    f = store.count(w)
    if f == 0:
        return 0
    l, r = pair
    return 1 if store.context_count(l, w, r) / f >= eps else 0


@dataclass(frozen=True)
class RestrictedPairSet:
    pairs: tuple
    epsilon: float = DEFAULT_EPSILON
    pair_count: int = DEFAULT_PAIR_COUNT
    scores: tuple = ()
    short: bool = False

    def __len__(self):
        return len(self.pairs)

    def save(self, path) -> None:
        with open(path, "w", encoding="utf-8", newline="\n") as f:
            f.write(f"ε={self.epsilon!r} count={self.pair_count}\n")
            scores = self.scores or (0,) * len(self.pairs)
            for (l, r), s in zip(self.pairs, scores):
                f.write(f"{l}\t{r}\t{s}\n")

    @classmethod
    def load(cls, path) -> "RestrictedPairSet":
        with open(path, encoding="utf-8") as f:
            lines = f.read().split("\n")
        m = re.fullmatch(r"ε=(\S+) count=(\d+)", lines[0].strip()) if lines else None
        if m is None:
            raise ValueError(f"{path}: bad header, expected 'ε=... count=...'")
        pairs, scores = [], []
        for lineno, line in enumerate(lines[1:], 2):
            if not line:
                continue
            parts = line.split("\t")
            if len(parts) != 3:
                raise ValueError(f"{path}:{lineno}: expected 'l TAB r TAB score'")
            pairs.append((parts[0], parts[1]))
            scores.append(int(parts[2]))
        count = int(m.group(2))
        return cls(tuple(pairs), float(m.group(1)), count, tuple(scores),
                   short=len(pairs) < count)


def rav(store: NgramStore, pairs: RestrictedPairSet, w: str) -> int:
    f = store.count(w)
    if f == 0:
        return 0
    contexts = store.ctx.get(w, {})
    eps = pairs.epsilon
    return sum(1 for pair in pairs.pairs if contexts.get(pair, 0) / f >= eps)


def select_restricted_pairs(store: NgramStore, seed_words, pair_count: int = DEFAULT_PAIR_COUNT,
                            eps: float = DEFAULT_EPSILON) -> RestrictedPairSet:
    """Keep the ``pair_count`` context pairs matching the most seed words.

    Every ``(l, r)`` observed in the store is a candidate; ties are broken
    lexicographically on ``(l, r)``.  When fewer candidates exist, all are
    returned and the set is flagged ``short``.
    """
    seeds = sorted(set(seed_words))
    if not seeds:
        raise ValueError("seed word list is empty")
    score: Counter = Counter({pair: 0 for pair in store.pairs()})
    for w in seeds:
        f = store.count(w)
        if not f:
            continue
        for pair, n in store.ctx.get(w, {}).items():
            if n / f >= eps:
                score[pair] += 1
    ranked = sorted(score.items(), key=lambda kv: (-kv[1], kv[0]))
    chosen = ranked[:pair_count]
    short = len(chosen) < pair_count
    if short:
        log.warning("only %d candidate pairs for %d requested", len(chosen), pair_count)
    return RestrictedPairSet(tuple(p for p, _ in chosen), eps, pair_count,
                             tuple(s for _, s in chosen), short)


def rav_bucket(value: int) -> int:
    return math.ceil(value / 2)


# -- aggregated lookup ------------------------------------------------------

class WordhoodStore:
    """All wordhood resources behind one cached lookup; any may be None."""

    def __init__(self, lexicon=None, entries=None, ngrams: NgramStore | None = None,
                 pairs: RestrictedPairSet | None = None):
        self.lexicon = lexicon
        self.entries = entries
        self.ngrams = ngrams
        self.pairs = pairs
        self._cache: dict[str, tuple] = {}

    def lookup(self, w: str) -> tuple:
        hit = self._cache.get(w)
        if hit is None:
            hit = self._cache[w] = wordhood_lookup(
                self.lexicon, self.entries, self.ngrams, self.pairs, w)
        return hit

    def known(self, w: str) -> bool:
        """Whether any resource vouches for ``w``."""
        if self.lexicon and w in self.lexicon:
            return True
        if self.entries and w in self.entries:
            return True
        return self.ngrams is not None and w in self.ngrams

    @classmethod
    def from_paths(cls, lexicon=None, entries=None, ngrams=None, pairs=None):
        return cls(
            read_lexicon(lexicon) if lexicon else None,
            read_entries(entries) if entries else None,
            NgramStore.load(ngrams) if ngrams else None,
            RestrictedPairSet.load(pairs) if pairs else None,
        )


def wordhood_lookup(lexicon, entries, store, pairs, w: str) -> tuple:
    """``(categories, entry flag, RAV bucket)`` for ``w``.

    The bucket is ``ceil(RAV / 2)``, or ``UNKNOWN`` when ``w`` has no
    (surviving) statistics or no pair set is loaded.
    """
    categories = lexicon.get(w, frozenset()) if lexicon else frozenset()
    flag = 1 if entries and w in entries else 0
    if store is None or pairs is None or w not in store:
        bucket = UNKNOWN
    else:
        bucket = rav_bucket(rav(store, pairs, w))
    return categories, flag, bucket
