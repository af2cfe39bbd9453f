"""
Restricted accessor variety from raw text
=========================================

Count every substring of a raw corpus together with its left and right
neighbours, pick the context pairs that most often surround known words,
then score new strings by how many of those pairs they occur in.
"""

from latticeseg.synthetic import make_synthetic
from latticeseg.wordhood import build_ngram_store_from_text, rav, select_restricted_pairs

data = make_synthetic(seed=0)
store = build_ngram_store_from_text(data.raw_text, max_word_len=8)
print(len(store.freq), "distinct substrings in", len(data.raw_text), "characters")

# seed words: everything seen in the training sentences
seeds = {e.w for _, gold in data.train for e in gold}
pairs = select_restricted_pairs(store, seeds, pair_count=30)
print("top pairs:", pairs.pairs[:6])

# unseen words against strings that straddle a word boundary
for w in data.test_only[:5]:
    inner = w[1:] + data.test[0][0][:1]
    print(f"{w:<6} RAV {rav(store, pairs, w):2d}    {inner:<6} RAV {rav(store, pairs, inner):2d}")
