"""Character-based joint segmentation and tagging model.

Every character gets a ``<position-tag, POS>`` label.  Features are the
seven character-context templates (three unigrams, four bigrams) crossed
with the current label, plus one label-transition template::

    <c[i-1], a[i]>  <c[i], a[i]>  <c[i+1], a[i]>
    <c[i-2]c[i-1], a[i]>  <c[i-1]c[i], a[i]>  <c[i]c[i+1], a[i]>  <c[i+1]c[i+2], a[i]>
    <a[i-1], a[i]>

The skip template ``<c[i-1], c[i+1], a[i]>`` is deliberately absent.
Positions outside the sentence read as the sentinel ``♯``.
"""

from __future__ import annotations

import random
from dataclasses import dataclass, field

import numpy as np

from .core import (
    CharLabel,
    CharLabeledSentence,
    LabelAlphabet,
    StructureError,
    TagSet,
    analysis_to_char_labels,
    char_labels_to_analysis,
)
from .perceptron import ModelFormatError, PerceptronModel, read_model, write_model

SENTINEL = "♯"
BOS = "BOS"
NEG_INF = float("-inf")

CONTEXT_TEMPLATES = ("U-1", "U0", "U+1", "B-2", "B-1", "B0", "B+1")
FEATURES_PER_POSITION = len(CONTEXT_TEMPLATES) + 1


def char_observations(c: str) -> list[tuple[str, ...]]:
    """The seven label-free context keys for each position of ``c``."""
    pad = SENTINEL * 2 + c + SENTINEL * 2
    out = []
    for j in range(2, len(c) + 2):
        out.append((
            "U-1:" + pad[j - 1],
            "U0:" + pad[j],
            "U+1:" + pad[j + 1],
            "B-2:" + pad[j - 2:j],
            "B-1:" + pad[j - 1:j + 1],
            "B0:" + pad[j:j + 2],
            "B+1:" + pad[j + 1:j + 3],
        ))
    return out


def transition_key(prev) -> str:
    return "T:" + (BOS if prev is None else str(prev))


def extract_char_features(c: str, i: int, a_prev, a_i) -> list[tuple]:
    """Feature keys for label id ``a_i`` at position ``i``.

    ``a_prev`` is the previous label id, or ``None`` at the sentence start.
    Each key is an ``(observation, label id)`` pair.
    """
    pad = SENTINEL * 2 + c + SENTINEL * 2
    j = i + 2
    obs = (
        "U-1:" + pad[j - 1],
        "U0:" + pad[j],
        "U+1:" + pad[j + 1],
        "B-2:" + pad[j - 2:j],
        "B-1:" + pad[j - 1:j + 1],
        "B0:" + pad[j:j + 2],
        "B+1:" + pad[j + 1:j + 3],
    )
    feats = [(o, a_i) for o in obs]
    feats.append((transition_key(a_prev), a_i))
    return feats


def sequence_features(c: str, label_ids) -> list[tuple]:
    feats = []
    prev = None
    for i, a in enumerate(label_ids):
        feats.extend(extract_char_features(c, i, prev, a))
        prev = a
    return feats


def encode_key(key) -> str:
    obs, label = key
    return f"{obs}|{label}"


def decode_key(text: str):
    obs, label = text.rsplit("|", 1)
    return obs, int(label)


@dataclass
class CharModel:
    """A perceptron over character features together with its label set."""

    labels: LabelAlphabet
    perceptron: PerceptronModel = field(default_factory=PerceptronModel)
    frozen: bool = False

    def __post_init__(self):
        labs = self.labels.labels
        L = len(labs)
        allowed = np.zeros((L, L), dtype=bool)
        for i, a in enumerate(labs):
            for j, b in enumerate(labs):
                if a.pos in "BM":
                    allowed[i, j] = b.pos in "ME" and a.tag == b.tag
                else:
                    allowed[i, j] = b.pos in "BS"
        self.allowed = allowed
        self.start_ok = np.array([a.pos in "BS" for a in labs])
        self.end_ok = np.array([a.pos in "ES" for a in labs])
        self._index = None
        self._transitions = None

    @property
    def tags(self) -> TagSet:
        return self.labels.tags

    @property
    def scale(self) -> int:
        return self.perceptron.scale

    def _obs_index(self):
        # observation -> per-label weight list; only built for frozen models
        if self._index is None:
            L = len(self.labels)
            index: dict[str, list[int]] = {}
            for (obs, label), v in self.perceptron.weights.items():
                row = index.get(obs)
                if row is None:
                    row = index[obs] = [0] * L
                row[label] += v
            self._index = {k: np.array(v, dtype=np.float64) for k, v in index.items()}
        return self._index

    def emissions(self, c: str) -> np.ndarray:
        """Context-template scores, shape ``(len(c), n_labels)``."""
        L = len(self.labels)
        observations = char_observations(c)
        if self.frozen:
            index = self._obs_index()
            out = np.zeros((len(c), L))
            for i, obs in enumerate(observations):
                for o in obs:
                    row = index.get(o)
                    if row is not None:
                        out[i] += row
            return out
        w = self.perceptron.weights
        rows = []
        labels = range(L)
        for obs in observations:
            row = [0] * L
            for o in obs:
                for a in labels:
                    v = w.get((o, a))
                    if v:
                        row[a] += v
            rows.append(row)
        return np.array(rows, dtype=np.float64).reshape(len(c), L)

    def transitions(self):
        """``(start, trans)`` score arrays with -inf on forbidden moves."""
        if self._transitions is not None:
            return self._transitions
        w = self.perceptron.weights
        L = len(self.labels)
        start = np.array([w.get((transition_key(None), a), 0) for a in range(L)],
                         dtype=np.float64)
        start[~self.start_ok] = NEG_INF
        trans = np.array([[w.get((transition_key(p), a), 0) for a in range(L)]
                          for p in range(L)], dtype=np.float64).reshape(L, L)
        trans[~self.allowed] = NEG_INF
        if self.frozen:
            self._transitions = (start, trans)
        return start, trans

    def save(self, path) -> None:
        header = {"tags": list(self.tags),
                  "labels": [str(lab) for lab in self.labels.labels]}
        write_model(path, self.perceptron, "char", header, encode_key)

    @classmethod
    def load(cls, path) -> "CharModel":
        perceptron, kind, header = read_model(path, decode_key)
        if kind != "char":
            raise ModelFormatError(f"{path}: expected a char model, got {kind!r}")
        tags = TagSet(header.get("tags", []))
        labels = LabelAlphabet([CharLabel.parse(s) for s in header.get("labels", [])], tags)
        return cls(labels, perceptron, frozen=True)


def score_sequence(model: CharModel, c: str, label_ids) -> int:
    """Integer score of a labeling: the plain sum of its feature weights.

    The value is in units of ``1 / model.scale``.
    """
    if len(label_ids) != len(c):
        raise StructureError(f"{len(label_ids)} labels for {len(c)} characters")
    return model.perceptron.score(sequence_features(c, label_ids))


def _viterbi(emit, start, trans, end_ok):
    n, L = emit.shape
    back = np.zeros((n, L), dtype=np.intp)
    cols = np.arange(L)
    delta = start + emit[0]
    for i in range(1, n):
        cand = delta[:, None] + trans
        # argmax returns the first maximum: earlier label ids win ties
        best_prev = cand.argmax(axis=0)
        back[i] = best_prev
        delta = cand[best_prev, cols] + emit[i]
    final = np.where(end_ok, delta, NEG_INF)
    last = int(final.argmax())
    path = [last]
    for i in range(n - 1, 0, -1):
        path.append(int(back[i, path[-1]]))
    path.reverse()
    return path, int(final[last])


def viterbi(model: CharModel, c: str) -> tuple[list[int], int]:
    """Best label ids and their integer score."""
    start, trans = model.transitions()
    return _viterbi(model.emissions(c), start, trans, model.end_ok)


def viterbi_decode(model: CharModel, c: str) -> CharLabeledSentence:
    path, _ = viterbi(model, c)
    labs = model.labels
    return CharLabeledSentence(c, tuple(labs[a] for a in path))


def tag_sentence(model: CharModel, c: str) -> tuple:
    """Decode ``c`` straight to an edge sequence."""
    return char_labels_to_analysis(viterbi_decode(model, c))


def train_char_model(corpus, epochs: int = 10, shuffle_seed=None,
                     tags: TagSet | None = None,
                     labels: LabelAlphabet | None = None) -> CharModel:
    """Train an averaged perceptron on ``(sentence, analysis)`` pairs.

    Sentences are visited in corpus order unless ``shuffle_seed`` is given.
    """
    if not corpus:
        raise ValueError("empty training corpus")
    if labels is None:
        labels = LabelAlphabet.from_corpus(corpus, tags)
    model = CharModel(labels)
    perceptron = model.perceptron
    gold = []
    for sentence, edges in corpus:
        cls = analysis_to_char_labels(edges)
        gold.append((sentence, [labels.id(lab) for lab in cls.labels]))
    order = list(range(len(gold)))
    rng = random.Random(shuffle_seed) if shuffle_seed is not None else None
    for _ in range(epochs):
        if rng is not None:
            rng.shuffle(order)
        for k in order:
            c, y = gold[k]
            pred, _ = viterbi(model, c)
            if pred != y:
                perceptron.update(sequence_features(c, y), sequence_features(c, pred))
            perceptron.tick()
    return CharModel(labels, perceptron.averaged(), frozen=True)
