"""Margin-bounded word lattices from a character model.

An edge ``(p, w, t)`` enters the lattice for threshold ``delta`` when some
complete labeling containing it scores within ``delta`` of the best
labeling.  Its margin is exactly that gap for the best such labeling.
Both quantities come out of one max-sum forward/backward pass over the
label chain: the best labeling through an edge is the best prefix ending
right before it, the edge's forced internal labels, and the best suffix
after it.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from fractions import Fraction
from typing import NamedTuple, Sequence

import numpy as np

from .char_tagger import NEG_INF, CharModel, _viterbi
from .core import CharLabeledSentence, Edge, char_labels_to_analysis

DEFAULT_MAX_WORD_LEN = 20


class WeightedEdge(NamedTuple):
    """A lattice edge and its margin; ``margin`` is None for inserted gold edges."""

    edge: Edge
    margin: Fraction | None

    @property
    def p(self):
        return self.edge.p

    @property
    def w(self):
        return self.edge.w

    @property
    def t(self):
        return self.edge.t


@dataclass(frozen=True)
class WordLattice:
    sentence: str
    delta: float
    edges: tuple
    best_score: Fraction

    def __len__(self):
        return len(self.edges)

    def __iter__(self):
        return iter(self.edges)

    def edge_set(self) -> set:
        return {we.edge for we in self.edges}

    def margins(self) -> dict:
        return {we.edge: we.margin for we in self.edges}


def forward_backward_max(model: CharModel, c: str, emit=None):
    """Max-sum forward and backward tables over the label chain.

    ``alpha[i, a]`` is the best score of a well-formed labeling of
    ``c[:i+1]`` ending in label ``a`` (emission at ``i`` included).
    ``beta[i, a]`` is the best score of the continuation after position
    ``i`` given label ``a`` there: the transitions out of ``a`` and all
    later emissions, so ``alpha + beta`` counts every feature once.
    Scores are integers in units of ``1 / model.scale``.
    """
    if emit is None:
        emit = model.emissions(c)
    start, trans = model.transitions()
    n, L = emit.shape
    alpha = np.empty((n, L))
    beta = np.empty((n, L))
    alpha[0] = start + emit[0]
    for i in range(1, n):
        alpha[i] = (alpha[i - 1][:, None] + trans).max(axis=0) + emit[i]
    beta[n - 1] = np.where(model.end_ok, 0.0, NEG_INF)
    for i in range(n - 2, -1, -1):
        beta[i] = (trans + (emit[i + 1] + beta[i + 1])[None, :]).max(axis=1)
    best = (alpha[n - 1] + beta[n - 1]).max()
    return alpha, beta, int(best)


def _threshold(delta, scale):
    # largest integer margin (in 1/scale units) still inside the lattice
    if delta < 0:
        raise ValueError("delta must be non-negative")
    if math.isinf(delta):
        return None
    return math.floor(Fraction(delta) * scale)


def generate_lattice(model: CharModel, c: str, delta,
                     max_word_len: int = DEFAULT_MAX_WORD_LEN) -> WordLattice:
    """All edges of length ``<= max_word_len`` whose margin is ``<= delta``.

    Words on the best labeling are always kept, even when longer than
    ``max_word_len``, so the lattice always holds a complete analysis.
    """
    if max_word_len < 1:
        raise ValueError("max_word_len must be >= 1")
    emit = model.emissions(c)
    start, trans = model.transitions()
    alpha, beta, best = forward_backward_max(model, c, emit)
    limit = _threshold(delta, model.scale)
    n = len(c)
    labels = model.labels
    scale = model.scale

    # entry[p, a]: best prefix score up to and including the transition into a at p
    entry = np.empty_like(alpha)
    entry[0] = start
    if n > 1:
        entry[1:] = (alpha[:-1][:, :, None] + trans[None, :, :]).max(axis=1)
    E = emit.tolist()
    IN = entry.tolist()
    BT = beta.tolist()
    T = trans.tolist()

    edges = []
    for t_id, tag in enumerate(labels.tags):
        ids = labels.by_pos_tag
        s, b, m, e = ids["S", t_id], ids["B", t_id], ids["M", t_id], ids["E", t_id]
        t_bm, t_mm, t_be, t_me = T[b][m], T[m][m], T[b][e], T[m][e]
        for p in range(n):
            through = IN[p][s] + E[p][s] + BT[p][s]
            gap = best - through
            if limit is None or gap <= limit:
                edges.append((p, 1, t_id, int(gap)))
            run = IN[p][b] + E[p][b]
            last_is_b = True
            for end in range(p + 1, min(n, p + max_word_len)):
                through = run + (t_be if last_is_b else t_me) + E[end][e] + BT[end][e]
                gap = best - through
                if limit is None or gap <= limit:
                    edges.append((p, end - p + 1, t_id, int(gap)))
                run += (t_bm if last_is_b else t_mm) + E[end][m]
                last_is_b = False

    if n > max_word_len:
        path, _ = _viterbi(emit, start, trans, model.end_ok)
        have = {(p, k, t) for p, k, t, _ in edges}
        for ed in char_labels_to_analysis(
                CharLabeledSentence(c, tuple(labels[a] for a in path))):
            key = (ed.p, len(ed.w), labels.tags.id(ed.t))
            if key not in have:
                edges.append(key + (0,))

    edges.sort()
    out = tuple(WeightedEdge(Edge(p, c[p:p + k], labels.tags.tag(t)), Fraction(g, scale))
                for p, k, t, g in edges)
    return WordLattice(c, delta, out, Fraction(best, scale))


def insert_gold_edges(lattice: WordLattice, gold: Sequence[Edge]) -> WordLattice:
    """Add any gold edge missing from ``lattice`` as a weightless edge.

    Existing edges are kept untouched; applying this twice changes nothing.
    """
    present = lattice.edge_set()
    missing = [WeightedEdge(e, None) for e in gold if e not in present]
    if not missing:
        return lattice
    edges = tuple(sorted(lattice.edges + tuple(missing),
                         key=lambda we: (we.p, len(we.w), we.t)))
    return WordLattice(lattice.sentence, lattice.delta, edges, lattice.best_score)


def _check_parallel(lattices, golds):
    if len(lattices) != len(golds):
        raise ValueError(f"{len(lattices)} lattices but {len(golds)} gold analyses")


def oracle_recall(lattices, gold_analyses) -> float:
    """Fraction of gold edges that appear in their sentence's lattice."""
    _check_parallel(lattices, gold_analyses)
    hit = total = 0
    for lat, gold in zip(lattices, gold_analyses):
        present = lat.edge_set() if isinstance(lat, WordLattice) else set(lat)
        hit += sum(1 for e in gold if e in present)
        total += len(gold)
    return hit / total if total else 0.0


def lattice_scale(lattices, gold_analyses) -> float:
    """Total lattice size over total gold size."""
    _check_parallel(lattices, gold_analyses)
    size = sum(len(lat) for lat in lattices)
    total = sum(len(g) for g in gold_analyses)
    return size / total if total else 0.0


def format_margin(m) -> str:
    return "-" if m is None else str(m)


def write_lattices(path, lattices) -> None:
    """One ``p TAB word TAB tag TAB margin`` line per edge, blank line between sentences."""
    with open(path, "w", encoding="utf-8", newline="\n") as f:
        for k, lat in enumerate(lattices):
            if k:
                f.write("\n")
            for we in lat.edges:
                f.write(f"{we.p}\t{we.w}\t{we.t}\t{format_margin(we.margin)}\n")


def read_lattices(path, sentences=None, delta=float("nan")) -> list:
    """Read a lattice dump.

    Sentence text is taken from ``sentences`` when given; otherwise it is
    rebuilt from the edges, which only works when they cover every position.
    """
    blocks: list[list[WeightedEdge]] = [[]]
    with open(path, encoding="utf-8") as f:
        for lineno, line in enumerate(f, 1):
            line = line.rstrip("\n")
            if not line:
                blocks.append([])
                continue
            try:
                p, w, t, m = line.split("\t")
                margin = None if m == "-" else Fraction(m)
                blocks[-1].append(WeightedEdge(Edge(int(p), w, t), margin))
            except ValueError:
                raise ValueError(f"{path}:{lineno}: malformed lattice line") from None
    if blocks == [[]]:
        blocks = []
    out = []
    for k, edges in enumerate(blocks):
        if sentences is not None:
            c = sentences[k]
        else:
            chars = {}
            for we in edges:
                for j, ch in enumerate(we.w):
                    chars[we.p + j] = ch
            c = "".join(chars[i] for i in range(len(chars)))
        out.append(WordLattice(c, delta, tuple(edges), Fraction(0)))
    return out
