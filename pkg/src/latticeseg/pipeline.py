"""Stacked training and end-to-end decoding.

The word model must be trained on lattices that look like test-time
lattices, so training lattices come from k-fold cross-validation: each
fold's lattices are generated by a character model trained on the other
folds.  Gold edges missing from a training lattice are inserted without a
margin.  The character model used at decode time is trained on the whole
corpus.
"""

from __future__ import annotations

import json
import os
import random
import time
from dataclasses import asdict, dataclass, field
from typing import NamedTuple

from .char_tagger import CharModel, tag_sentence, train_char_model
from .core import TagSet, collect_tagset
from .lattice import generate_lattice, insert_gold_edges
from .word_decoder import WordModel, decode_lattice, train_word_model
from .wordhood import (
    DEFAULT_EPSILON,
    DEFAULT_PAIR_COUNT,
    RestrictedPairSet,
    WordhoodStore,
    select_restricted_pairs,
)


class ConfigError(ValueError):
    pass


@dataclass
class PipelineConfig:
    delta: float = 15
    folds: int = 10
    max_word_len: int = 20
    char_epochs: int = 10
    word_epochs: int = 10
    open_mode: bool = False
    lexicon: str | None = None
    entries: str | None = None
    ngrams: str | None = None
    pairs: str | None = None
    pair_count: int = DEFAULT_PAIR_COUNT
    epsilon: float = DEFAULT_EPSILON
    seed: int | None = None

    def __post_init__(self):
        if self.folds < 2:
            raise ConfigError("folds must be >= 2")
        if self.delta < 0:
            raise ConfigError("delta must be >= 0")
        if self.max_word_len < 1:
            raise ConfigError("max_word_len must be >= 1")

    def load_store(self) -> WordhoodStore | None:
        if not self.open_mode:
            return None
        return WordhoodStore.from_paths(self.lexicon, self.entries, self.ngrams, self.pairs)


@dataclass
class TrainedSystem:
    char_model: CharModel
    word_model: WordModel
    config: PipelineConfig
    pairs: RestrictedPairSet | None = None
    # fold id of every training sentence, and the sentence indices each fold model saw
    fold_of: list = field(default_factory=list)
    fold_train: list = field(default_factory=list)


def fold_assignment(n: int, k: int, seed=None) -> list[int]:
    """Fold id per sentence: contiguous blocks, or a seeded permutation of them."""
    if n < k:
        raise ConfigError(f"{k} folds need at least {k} sentences, got {n}")
    sizes = [n // k + (1 if f < n % k else 0) for f in range(k)]
    folds = [f for f, size in enumerate(sizes) for _ in range(size)]
    if seed is not None:
        random.Random(seed).shuffle(folds)
    return folds


def _derived_seed(seed, *parts):
    if seed is None:
        return None
    return random.Random(f"{seed}:" + ":".join(map(str, parts))).getrandbits(32)


def cross_validated_lattices(corpus, config: PipelineConfig, tags: TagSet):
    """Training lattices for every sentence plus the fold bookkeeping."""
    fold_of = fold_assignment(len(corpus), config.folds, config.seed)
    lattices = [None] * len(corpus)
    fold_train = []
    for f in range(config.folds):
        train_idx = [i for i, g in enumerate(fold_of) if g != f]
        fold_train.append(train_idx)
        model = train_char_model([corpus[i] for i in train_idx], config.char_epochs,
                                 _derived_seed(config.seed, "char", f), tags=tags)
        for i, g in enumerate(fold_of):
            if g == f:
                sentence, gold = corpus[i]
                lat = generate_lattice(model, sentence, config.delta, config.max_word_len)
                lattices[i] = insert_gold_edges(lat, gold)
    return lattices, fold_of, fold_train


def stacked_train(corpus, config: PipelineConfig, store: WordhoodStore | None = None
                  ) -> TrainedSystem:
    if not corpus:
        raise ConfigError("empty training corpus")
    tags = collect_tagset(corpus)
    pairs = None
    if config.open_mode:
        if store is None:
            store = config.load_store()
        if store.ngrams is not None and store.pairs is None:
            vocab = {e.w for _, gold in corpus for e in gold}
            pairs = select_restricted_pairs(store.ngrams, vocab, config.pair_count,
                                            config.epsilon)
            store = WordhoodStore(store.lexicon, store.entries, store.ngrams, pairs)
        else:
            pairs = store.pairs
    lattices, fold_of, fold_train = cross_validated_lattices(corpus, config, tags)
    golds = [gold for _, gold in corpus]
    word_model = train_word_model(lattices, golds, config.word_epochs,
                                  store if config.open_mode else None, config.open_mode,
                                  _derived_seed(config.seed, "word"), tags=TagSet(tags))
    char_model = train_char_model(corpus, config.char_epochs,
                                  _derived_seed(config.seed, "char", "full"), tags=tags)
    return TrainedSystem(char_model, word_model, config, pairs, fold_of, fold_train)


def decode_sentence(char_model: CharModel, word_model: WordModel, config: PipelineConfig,
                    c: str, store: WordhoodStore | None = None) -> tuple:
    lattice = generate_lattice(char_model, c, config.delta, config.max_word_len)
    return decode_lattice(word_model, lattice, store)


def decode_baseline(char_model: CharModel, c: str) -> tuple:
    """Character-model-only analysis, for comparison."""
    return tag_sentence(char_model, c)


class BenchResult(NamedTuple):
    total_seconds: float
    lattice_seconds: float
    word_seconds: float
    sentences_per_second: float

    def format(self) -> str:
        return "\n".join([
            f"Total time\t{self.total_seconds:.3f} sec.",
            f"  Lattice generation\t{self.lattice_seconds:.3f} sec.",
            f"  Pruned word-based model\t{self.word_seconds:.3f} sec.",
            f"Speed\t{self.sentences_per_second:.2f} sent./sec.",
        ])


def benchmark_throughput(char_model, word_model, config: PipelineConfig, sentences,
                         store=None) -> BenchResult:
    """Single-threaded wall-clock timing of both decoding stages."""
    if not sentences:
        raise ValueError("need at least one sentence")
    lattice_time = word_time = 0.0
    clock = time.perf_counter
    t0 = clock()
    for c in sentences:
        a = clock()
        lat = generate_lattice(char_model, c, config.delta, config.max_word_len)
        b = clock()
        decode_lattice(word_model, lat, store)
        lattice_time += b - a
        word_time += clock() - b
    total = clock() - t0
    return BenchResult(total, lattice_time, word_time, len(sentences) / total)


# -- model directories ------------------------------------------------------

CHAR_FILE = "char.model"
WORD_FILE = "word.model"
CONFIG_FILE = "config.json"
PAIRS_FILE = "pairs.tsv"


def save_system(system: TrainedSystem, out_dir) -> None:
    os.makedirs(out_dir, exist_ok=True)
    system.char_model.save(os.path.join(out_dir, CHAR_FILE))
    system.word_model.save(os.path.join(out_dir, WORD_FILE))
    cfg = asdict(system.config)
    for key in ("lexicon", "entries", "ngrams"):
        if cfg[key]:
            cfg[key] = os.path.abspath(cfg[key])
    if system.pairs is not None:
        system.pairs.save(os.path.join(out_dir, PAIRS_FILE))
        cfg["pairs"] = PAIRS_FILE
    with open(os.path.join(out_dir, CONFIG_FILE), "w", encoding="utf-8") as f:
        json.dump(cfg, f, indent=2, sort_keys=True, ensure_ascii=False)
        f.write("\n")


def load_system(model_dir):
    """Return ``(char_model, word_model, config, store)`` from a model directory."""
    with open(os.path.join(model_dir, CONFIG_FILE), encoding="utf-8") as f:
        cfg = json.load(f)
    if cfg.get("pairs") and not os.path.isabs(cfg["pairs"]):
        cfg["pairs"] = os.path.join(model_dir, cfg["pairs"])
    config = PipelineConfig(**cfg)
    char_model = CharModel.load(os.path.join(model_dir, CHAR_FILE))
    word_model = WordModel.load(os.path.join(model_dir, WORD_FILE))
    store = config.load_store() if word_model.open_mode else None
    return char_model, word_model, config, store
