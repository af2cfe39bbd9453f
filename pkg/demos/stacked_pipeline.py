"""
Stacked training, closed and open
=================================

Lattices for training the word model come from cross-validated character
models, so they look like the lattices seen at test time.  The open
system adds lexicon, entry and accessor-variety features.
"""

from latticeseg.metrics import evaluate
from latticeseg.pipeline import PipelineConfig, decode_baseline, decode_sentence, stacked_train
from latticeseg.synthetic import make_synthetic
from latticeseg.wordhood import WordhoodStore, build_ngram_store_from_text

data = make_synthetic(seed=0)
ngrams = build_ngram_store_from_text(data.raw_text)
resources = WordhoodStore(data.lexicon, data.entries, ngrams)

config = PipelineConfig(delta=15, folds=5, char_epochs=5, word_epochs=5)
closed = stacked_train(data.train, config)
config_open = PipelineConfig(delta=15, folds=5, char_epochs=5, word_epochs=5, open_mode=True)
opened = stacked_train(data.train, config_open, resources)
# pairs were picked from the training vocabulary
store = WordhoodStore(data.lexicon, data.entries, ngrams, opened.pairs)

golds = [g for _, g in data.test]
runs = {
    "char only": [decode_baseline(closed.char_model, c) for c, _ in data.test],
    "closed": [decode_sentence(closed.char_model, closed.word_model, config, c)
               for c, _ in data.test],
    "open": [decode_sentence(opened.char_model, opened.word_model, config_open, c, store)
             for c, _ in data.test],
}
for name, pred in runs.items():
    r = evaluate(pred, golds, bootstrap=1000, store=store)
    print(f"{name:<10} seg {r.seg_f1:.4f} ±{r.seg_ci:.4f}   s&t {r.st_f1:.4f} ±{r.st_ci:.4f}")
