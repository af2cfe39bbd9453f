import random

import pytest

from latticeseg.char_tagger import train_char_model
from latticeseg.core import TagSet, collect_tagset
from latticeseg.pipeline import PipelineConfig, cross_validated_lattices
from latticeseg.synthetic import make_synthetic
from latticeseg.word_decoder import train_word_model
from latticeseg.wordhood import WordhoodStore, build_ngram_store_from_text, select_restricted_pairs


@pytest.fixture
def rng():
    return random.Random(1234)


@pytest.fixture(scope="session")
def synthetic():
    return make_synthetic(seed=0)


@pytest.fixture(scope="session")
def synthetic_store(synthetic):
    ngrams = build_ngram_store_from_text(synthetic.raw_text, max_word_len=20, floor=1)
    vocab = {e.w for _, gold in synthetic.train for e in gold}
    pairs = select_restricted_pairs(ngrams, vocab, 30, 0.0001)
    return WordhoodStore(synthetic.lexicon, synthetic.entries, ngrams, pairs)


@pytest.fixture(scope="session")
def synthetic_system(synthetic, synthetic_store):
    """Stacked closed and open systems on the synthetic corpus.

    Cross-validated lattices and the final character model are shared by
    both word models, which is exactly what two stacked runs with the same
    configuration would compute.
    """
    config = PipelineConfig(delta=15, folds=5, char_epochs=5, word_epochs=5)
    tags = collect_tagset(synthetic.train)
    lattices, _, _ = cross_validated_lattices(synthetic.train, config, tags)
    golds = [g for _, g in synthetic.train]
    char_model = train_char_model(synthetic.train, config.char_epochs, tags=tags)
    closed = train_word_model(lattices, golds, config.word_epochs, tags=TagSet(tags))
    opened = train_word_model(lattices, golds, config.word_epochs, store=synthetic_store,
                              open_mode=True, tags=TagSet(tags))
    return {"config": config, "char": char_model, "closed": closed, "open": opened,
            "store": synthetic_store}


# -- acceptance summary -------------------------------------------------------

_ACCEPTANCE = pytest.StashKey[list]()


@pytest.fixture
def acceptance(request):
    """Record one PASS/FAIL line for a criterion, then assert it."""
    lines = request.config.stash.setdefault(_ACCEPTANCE, [])

    def record(name, ok, detail=""):
        line = f"{'PASS' if ok else 'FAIL'}  {name}" + (f"  ({detail})" if detail else "")
        lines.append(line)
        print(line)
        assert ok, line
    return record


def pytest_terminal_summary(terminalreporter, exitstatus, config):
    lines = config.stash.get(_ACCEPTANCE, [])
    if lines:
        terminalreporter.section("acceptance criteria")
        for line in lines:
            terminalreporter.write_line(line)
