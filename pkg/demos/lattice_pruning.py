"""
Margin-bounded word lattices
============================

A candidate word survives in the lattice when the best labeling that
contains it scores within delta of the overall best labeling.  Raising
delta buys oracle recall at the price of a bigger lattice.
"""

import math

from latticeseg.char_tagger import train_char_model
from latticeseg.lattice import generate_lattice, lattice_scale, oracle_recall
from latticeseg.synthetic import make_synthetic

data = make_synthetic(n_sentences=300, vocab_size=200, n_test_only=20, seed=1)
model = train_char_model(data.train, epochs=5)

sentence, gold = data.test[0]
lat = generate_lattice(model, sentence, delta=4)
print(sentence, "->", len(lat), "edges at delta=4")
# margins are exact fractions of the averaged scores
for we in sorted(lat, key=lambda we: (we.margin, we.p))[:8]:
    print(f"  {we.p:2d} {we.w:<6} {we.t:<3} margin {we.margin}")

golds = [g for _, g in data.test]
print("\ndelta  recall  scale")
for delta in [0, 1, 2, 4, 8, 12, 16, 20, math.inf]:
    lats = [generate_lattice(model, c, delta).edge_set() for c, _ in data.test]
    print(f"{delta:>5}  {oracle_recall(lats, golds):.4f}  {lattice_scale(lats, golds):7.2f}")
