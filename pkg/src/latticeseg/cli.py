"""Command-line entry point: ``latticeseg <command> ...``.

Exit status is 0 on success, 1 on usage errors and 2 on data or format
errors.
"""

from __future__ import annotations

import argparse
import logging
import sys

from . import pipeline
from .char_tagger import CharModel
from .core import CorpusFormatError, StructureError, read_corpus, read_raw_sentences, write_corpus
from .lattice import generate_lattice, write_lattices
from .metrics import DataError, evaluate, per_sentence_f1
from .perceptron import ModelFormatError
from .word_decoder import DecodeError
from .wordhood import NgramStore, build_ngram_store, select_restricted_pairs

EXIT_USAGE = 1
EXIT_DATA = 2


class UsageError(Exception):
    pass


class _Parser(argparse.ArgumentParser):
    def error(self, message):
        self.print_usage(sys.stderr)
        self.exit(EXIT_USAGE, f"{self.prog}: error: {message}\n")


def _train(args):
    if args.open and not (args.lexicon or args.entries or args.ngrams):
        raise UsageError("--open needs at least one of --lexicon, --entries, --ngrams")
    config = pipeline.PipelineConfig(
        delta=args.delta, folds=args.folds, max_word_len=args.max_word_len,
        char_epochs=args.char_epochs, word_epochs=args.word_epochs,
        open_mode=args.open, lexicon=args.lexicon, entries=args.entries,
        ngrams=args.ngrams, pairs=args.pairs, seed=args.seed)
    corpus = read_corpus(args.corpus)
    system = pipeline.stacked_train(corpus, config)
    pipeline.save_system(system, args.out_dir)


def _decode(args):
    char_model, word_model, config, store = pipeline.load_system(args.model_dir)
    sentences = read_raw_sentences(args.input)
    out = [pipeline.decode_sentence(char_model, word_model, config, c, store)
           for c in sentences]
    write_corpus(args.output, out)


def _lattice(args):
    char_model = CharModel.load(f"{args.model_dir}/{pipeline.CHAR_FILE}")
    max_len = pipeline.PipelineConfig().max_word_len
    try:
        _, _, config, _ = pipeline.load_system(args.model_dir)
        max_len = config.max_word_len
    except FileNotFoundError:
        pass
    sentences = read_raw_sentences(args.input)
    lattices = [generate_lattice(char_model, c, args.delta, max_len) for c in sentences]
    write_lattices(args.dump, lattices)


def _eval(args):
    gold = [a for _, a in read_corpus(args.gold)]
    pred = [a for _, a in read_corpus(args.pred)]
    report = evaluate(pred, gold, bootstrap=args.bootstrap or 0, seed=args.seed)
    sys.stdout.write(report.format())
    if args.per_sentence:
        with open(args.per_sentence, "w", encoding="utf-8", newline="\n") as f:
            f.write("sentence\tseg_f1\tst_f1\n")
            for k, (seg, st) in enumerate(per_sentence_f1(pred, gold), 1):
                f.write(f"{k}\t{seg:.6f}\t{st:.6f}\n")


def _build_stats(args):
    store = build_ngram_store(args.raw, args.max_len, args.floor)
    store.save(args.out)


def _select_pairs(args):
    store = NgramStore.load(args.ngrams)
    with open(args.seed_words, encoding="utf-8") as f:
        seeds = [line.strip() for line in f if line.strip()]
    if not seeds:
        raise DataError("seed word file is empty")
    pairs = select_restricted_pairs(store, seeds, args.count, args.epsilon)
    pairs.save(args.out)


def _bench(args):
    char_model, word_model, config, store = pipeline.load_system(args.model_dir)
    sentences = read_raw_sentences(args.input)
    result = pipeline.benchmark_throughput(char_model, word_model, config, sentences, store)
    print(result.format())


def build_parser() -> argparse.ArgumentParser:
    p = _Parser(prog="latticeseg", description=__doc__.splitlines()[0])
    p.add_argument("-v", "--verbose", action="store_true")
    sub = p.add_subparsers(dest="command", required=True, parser_class=_Parser)

    t = sub.add_parser("train", help="stacked training of both models")
    t.add_argument("--corpus", required=True)
    t.add_argument("--out-dir", required=True)
    t.add_argument("--delta", type=float, default=15)
    t.add_argument("--folds", type=int, default=10)
    t.add_argument("--max-word-len", type=int, default=20)
    t.add_argument("--char-epochs", type=int, default=10)
    t.add_argument("--word-epochs", type=int, default=10)
    t.add_argument("--open", action="store_true", help="use wordhood features")
    t.add_argument("--lexicon")
    t.add_argument("--entries")
    t.add_argument("--ngrams")
    t.add_argument("--pairs")
    t.add_argument("--seed", type=int)
    t.set_defaults(func=_train)

    d = sub.add_parser("decode", help="segment and tag raw sentences")
    d.add_argument("--model-dir", required=True)
    d.add_argument("--input", required=True)
    d.add_argument("--output", required=True)
    d.set_defaults(func=_decode)

    la = sub.add_parser("lattice", help="dump word lattices")
    la.add_argument("--model-dir", required=True)
    la.add_argument("--input", required=True)
    la.add_argument("--delta", type=float, required=True)
    la.add_argument("--dump", required=True)
    la.set_defaults(func=_lattice)

    e = sub.add_parser("eval", help="score predictions against gold")
    e.add_argument("--gold", required=True)
    e.add_argument("--pred", required=True)
    e.add_argument("--bootstrap", type=int, metavar="N")
    e.add_argument("--seed", type=int, default=0)
    e.add_argument("--per-sentence", metavar="TSV")
    e.set_defaults(func=_eval)

    b = sub.add_parser("build-stats", help="count substrings of a raw corpus")
    b.add_argument("--raw", required=True)
    b.add_argument("--out", required=True)
    b.add_argument("--max-len", type=int, default=20)
    b.add_argument("--floor", type=int, default=1)
    b.set_defaults(func=_build_stats)

    s = sub.add_parser("select-pairs", help="choose restricted context pairs")
    s.add_argument("--ngrams", required=True)
    s.add_argument("--seed-words", required=True)
    s.add_argument("--count", type=int, default=30)
    s.add_argument("--epsilon", type=float, default=0.0001)
    s.add_argument("--out", required=True)
    s.set_defaults(func=_select_pairs)

    be = sub.add_parser("bench", help="time decoding")
    be.add_argument("--model-dir", required=True)
    be.add_argument("--input", required=True)
    be.set_defaults(func=_bench)
    return p


def main(argv=None) -> int:
    parser = build_parser()
    args = parser.parse_args(argv)
    logging.basicConfig(level=logging.INFO if args.verbose else logging.WARNING,
                        format="%(levelname)s %(name)s: %(message)s")
    try:
        args.func(args)
    except (UsageError, pipeline.ConfigError) as exc:
        print(f"latticeseg: {exc}", file=sys.stderr)
        return EXIT_USAGE
    except (CorpusFormatError, StructureError, DataError, ModelFormatError, DecodeError,
            OSError, ValueError) as exc:
        print(f"latticeseg: {exc}", file=sys.stderr)
        return EXIT_DATA
    return 0


if __name__ == "__main__":
    sys.exit(main())
