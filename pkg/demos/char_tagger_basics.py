"""
Character tagging with an averaged perceptron
=============================================

Each character gets a label such as B-NN (first character of a noun) or
S-VV (a one-character verb).  Train the tagger on a small synthetic corpus
and decode a held-out sentence.
"""

from latticeseg.char_tagger import tag_sentence, train_char_model, viterbi, viterbi_decode
from latticeseg.core import analysis_to_char_labels, format_analysis
from latticeseg.synthetic import make_synthetic

data = make_synthetic(n_sentences=200, vocab_size=150, n_test_only=10, seed=0)
sentence, gold = data.test[0]
print(sentence)
print("gold :", format_analysis(gold))
print("labels:", " ".join(str(lab) for lab in analysis_to_char_labels(gold).labels))

# five passes over the training sentences
model = train_char_model(data.train, epochs=5)
print(len(model.labels), "labels,", len(model.perceptron.weights), "weights,",
      model.scale, "averaging steps")

# the decoder only ever proposes well-formed label sequences
path, score = viterbi(model, sentence)
print("best :", format_analysis(tag_sentence(model, sentence)))
print("raw  :", " ".join(str(lab) for lab in viterbi_decode(model, sentence).labels))
print("score:", score, "=", score / model.scale, "in averaged units")
