"""Word-level perceptron that picks the best path through a word lattice.

Feature templates for an edge ``(w, t)`` with margin ``m`` that follows an
edge with tag ``t'`` and word ``w'``::

     1 <w>            5 <h(m), |w|>1>       9 <t', |w'|>1, t, |w|>1>
     2 <w, t>         6 <t>                10 <t, category>  per lexicon category
     3 <|w|>1>        7 <t, |w|>1>         11 <t, entry flag>
     4 <h(m)>         8 <t', t>            12 <t, ceil(RAV/2)>

Templates 10-12 only fire in open mode.  ``h`` buckets the margin on a log
scale, with margin 0 mapped to its own ``BEST`` bucket.  Edges inserted from
the gold standard have no margin and emit neither template 4 nor 5.
"""

from __future__ import annotations

import math
import random
from dataclasses import dataclass, field
from fractions import Fraction

from .core import Edge, StructureError, TagSet
from .lattice import WeightedEdge, WordLattice
from .perceptron import ModelFormatError, PerceptronModel, read_model, write_model

BEST = "BEST"
BOS_TAG = "BOS"


class DecodeError(ValueError):
    def __init__(self, message, position=None):
        super().__init__(message)
        self.position = position


def margin_bucket(m):
    """``ceil(log2(ceil(m)))`` for ``m > 0``; ``BEST`` for ``m == 0``."""
    if m < 0:
        raise StructureError(f"negative margin {m}")
    if m == 0:
        return BEST
    n = math.ceil(Fraction(m))
    # ceil(log2 n) for integers n >= 1
    return (n - 1).bit_length()


def _flag(long: bool) -> str:
    return "1" if long else "0"


def local_features(cur: WeightedEdge, store=None, open_mode: bool = False) -> list[str]:
    """Templates that look only at the current edge (1-7 and 10-12)."""
    w, t = cur.edge.w, cur.edge.t
    lg = _flag(len(w) > 1)
    feats = [f"1:{w}", f"2:{w}|{t}", f"3:{lg}"]
    if cur.margin is not None:
        h = margin_bucket(cur.margin)
        feats.append(f"4:{h}")
        feats.append(f"5:{h}|{lg}")
    feats.append(f"6:{t}")
    feats.append(f"7:{t}|{lg}")
    if open_mode:
        if store is None:
            raise ValueError("open mode needs a wordhood store")
        categories, entry, bucket = store.lookup(w)
        for cat in sorted(categories):
            feats.append(f"10:{t}|{cat}")
        feats.append(f"11:{t}|{entry}")
        feats.append(f"12:{t}|{bucket}")
    return feats


def pair_features(prev_tag: str, prev_long: bool, t: str, long: bool) -> list[str]:
    """Templates 8 and 9, which link an edge to its predecessor."""
    return [f"8:{prev_tag}|{t}", f"9:{prev_tag}|{_flag(prev_long)}|{t}|{_flag(long)}"]


def extract_edge_features(prev: Edge | None, cur: WeightedEdge, store=None,
                          open_mode: bool = False) -> list[str]:
    """All feature keys of ``cur`` given its predecessor (``None`` at the start)."""
    if prev is None:
        prev_tag, prev_long = BOS_TAG, False
    else:
        prev_tag, prev_long = prev.t, len(prev.w) > 1
    return (local_features(cur, store if open_mode else None, open_mode)
            + pair_features(prev_tag, prev_long, cur.edge.t, len(cur.edge.w) > 1))


def path_features(path, store=None, open_mode: bool = False) -> list[str]:
    feats = []
    prev = None
    for we in path:
        feats.extend(extract_edge_features(prev, we, store, open_mode))
        prev = we.edge
    return feats


@dataclass
class WordModel:
    tags: TagSet
    perceptron: PerceptronModel = field(default_factory=PerceptronModel)
    open_mode: bool = False

    @property
    def kind(self) -> str:
        return "word-open" if self.open_mode else "word-closed"

    @property
    def scale(self) -> int:
        return self.perceptron.scale

    def save(self, path) -> None:
        write_model(path, self.perceptron, self.kind, {"tags": list(self.tags)})

    @classmethod
    def load(cls, path) -> "WordModel":
        perceptron, kind, header = read_model(path)
        if kind not in ("word-closed", "word-open"):
            raise ModelFormatError(f"{path}: expected a word model, got {kind!r}")
        return cls(TagSet(header.get("tags", [])), perceptron, kind == "word-open")


def path_score(model: WordModel, path, store=None) -> int:
    """Integer score of an edge sequence by direct feature summation."""
    return model.perceptron.score(path_features(path, store, model.open_mode))


def _tag_rank(tags: TagSet, tag: str):
    if tag == BOS_TAG:
        return -1
    return tags.id(tag) if tag in tags else len(tags)


def best_path(model: WordModel, lattice: WordLattice, store=None) -> tuple[list, int]:
    """Highest-scoring complete edge sequence and its integer score.

    The search state at a character boundary is the last edge's tag and
    whether that word was longer than one character, which is all the
    pairwise templates look at.  On equal scores the candidate whose
    previous tag has the smaller id wins, then the one with the longer
    current word.
    """
    open_mode = model.open_mode
    if open_mode and store is None:
        raise ValueError("open-mode word model needs a wordhood store")
    if not open_mode:
        store = None
    n = len(lattice.sentence)
    weights = model.perceptron.weights
    tags = model.tags
    by_start: list[list] = [[] for _ in range(n)]
    for we in lattice.edges:
        if 0 <= we.p and we.p + len(we.w) <= n and len(we.w) >= 1:
            by_start[we.p].append(we)
    for bucket in by_start:
        bucket.sort(key=lambda we: (len(we.w), _tag_rank(tags, we.t), we.t))

    pair_cache: dict = {}

    def pair_score(pt, pl, t, lg):
        key = (pt, pl, t, lg)
        v = pair_cache.get(key)
        if v is None:
            v = pair_cache[key] = sum(weights.get(f, 0) for f in pair_features(pt, pl, t, lg))
        return v

    # cells[j][(tag, long)] = ((score, -prev rank, len), backpointer)
    cells: list[dict] = [dict() for _ in range(n + 1)]
    cells[0][BOS_TAG, False] = ((0, 0, 0), None)
    for p in range(n):
        cell = cells[p]
        if not cell:
            continue
        for we in by_start[p]:
            w, t = we.edge.w, we.edge.t
            lg = len(w) > 1
            local = sum(weights.get(f, 0) for f in local_features(we, store, open_mode))
            target = cells[p + len(w)]
            state = (t, lg)
            for (pt, pl), (key, _) in cell.items():
                cand = (key[0] + local + pair_score(pt, pl, t, lg),
                        -_tag_rank(tags, pt), len(w))
                old = target.get(state)
                if old is None or cand > old[0]:
                    target[state] = (cand, (p, (pt, pl), we))

    final = cells[n]
    if not final:
        reach = max(j for j in range(n + 1) if cells[j])
        raise DecodeError(f"lattice has no complete path: no edge continues from "
                          f"position {reach}", reach)
    state = max(final, key=lambda s: (final[s][0][0], -_tag_rank(tags, s[0]), s[1]))
    score = final[state][0][0]
    path = []
    j = n
    while j > 0:
        _, back = cells[j][state]
        p, prev_state, we = back
        path.append(we)
        j, state = p, prev_state
    path.reverse()
    return path, score


def decode_lattice(model: WordModel, lattice: WordLattice, store=None) -> tuple:
    path, _ = best_path(model, lattice, store)
    return tuple(we.edge for we in path)


def train_word_model(lattices, gold_analyses, epochs: int = 10, store=None,
                     open_mode: bool = False, seed=None,
                     tags: TagSet | None = None) -> WordModel:
    """Structured perceptron over lattice paths, averaged per instance.

    Every gold edge must already be in its lattice.  Instances are shuffled
    each epoch when ``seed`` is given.
    """
    if len(lattices) != len(gold_analyses):
        raise ValueError("lattices and gold analyses differ in length")
    if tags is None:
        tags = TagSet(e.t for g in gold_analyses for e in g)
    model = WordModel(tags, PerceptronModel(), open_mode)
    if open_mode and store is None:
        raise ValueError("open mode needs a wordhood store")
    data = []
    for k, (lat, gold) in enumerate(zip(lattices, gold_analyses)):
        margins = lat.margins()
        path = []
        for e in gold:
            if e not in margins:
                raise StructureError(f"gold edge {e} missing from lattice {k}")
            path.append(WeightedEdge(e, margins[e]))
        data.append((lat, path))
    perceptron = model.perceptron
    order = list(range(len(data)))
    rng = random.Random(seed) if seed is not None else None
    feat_store = store if open_mode else None
    for _ in range(epochs):
        if rng is not None:
            rng.shuffle(order)
        for k in order:
            lat, gold_path = data[k]
            pred, _ = best_path(model, lat, feat_store)
            if [we.edge for we in pred] != [we.edge for we in gold_path]:
                perceptron.update(path_features(gold_path, feat_store, open_mode),
                                  path_features(pred, feat_store, open_mode))
            perceptron.tick()
    return WordModel(tags, perceptron.averaged(), open_mode)
