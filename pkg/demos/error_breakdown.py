"""
Scoring and error breakdown
===========================

F1 over (position, word, tag) edges, with and without the tag, and a
rough classification of wrongly segmented words.
"""

from latticeseg.core import make_analysis
from latticeseg.metrics import error_report, evaluate, f1
from latticeseg.wordhood import WordhoodStore

gold = [make_analysis([("水污染", "NN"), ("很", "AD"), ("严重", "VA")]),
        make_analysis([("拉脱维亚", "NR"), ("在", "P"), ("北欧", "NR")])]
pred = [make_analysis([("水", "NN"), ("污染", "NN"), ("很", "AD"), ("严重", "VA")]),
        make_analysis([("拉脱", "NR"), ("维亚", "NN"), ("在", "P"), ("北欧", "NN")])]

print("seg F1", f1(pred, gold, ignore_tags=True))
print("s&t F1", f1(pred, gold))

# 水 and 污染 are real words, so the split counts as a granularity difference;
# nothing vouches for 拉脱 or 维亚
store = WordhoodStore(lexicon={"水": frozenset({"n"}), "污染": frozenset({"n", "v"})})
print(dict(error_report(pred, gold, store)))
print(evaluate(pred, gold, store=store).format())
