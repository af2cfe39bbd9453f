"""Segmentation and tagging F1, bootstrap intervals and an error breakdown."""

from __future__ import annotations

from collections import Counter
from dataclasses import dataclass, field

import numpy as np

from .core import analysis_sentence

GRANULARITY = "GRANULARITY"
KNOWN_WORD = "KNOWN-WORD"
SUSPECT = "SUSPECT-MEANINGLESS"
ERROR_CLASSES = (GRANULARITY, KNOWN_WORD, SUSPECT)
CAVEAT = ("SUSPECT-MEANINGLESS is a lexicon/statistics proxy, "
          "not a manual judgement of meaningless words")


class DataError(ValueError):
    pass


def _edge_keys(edges, ignore_tags):
    if ignore_tags:
        return {(e.p, e.w) for e in edges}
    return {(e.p, e.w, e.t) for e in edges}


def sentence_counts(pred, gold, ignore_tags: bool = False) -> np.ndarray:
    """Per-sentence ``(correct, predicted, gold)`` edge counts, shape ``(n, 3)``."""
    if len(pred) != len(gold):
        raise DataError(f"{len(pred)} predicted vs {len(gold)} gold sentences")
    rows = []
    for k, (p, g) in enumerate(zip(pred, gold)):
        if analysis_sentence(p) != analysis_sentence(g):
            raise DataError(f"sentence {k + 1}: predicted text differs from gold")
        rows.append((len(_edge_keys(p, ignore_tags) & _edge_keys(g, ignore_tags)),
                     len(p), len(g)))
    return np.array(rows, dtype=np.int64).reshape(len(rows), 3)


def _f1(correct, predicted, gold):
    denom = predicted + gold
    return 2 * correct / denom if denom else 1.0


def f1(pred, gold, ignore_tags: bool = False) -> float:
    """Micro-averaged F1 over edges; ``ignore_tags`` gives segmentation F1."""
    c, p, g = sentence_counts(pred, gold, ignore_tags).sum(axis=0)
    return _f1(int(c), int(p), int(g))


def bootstrap_ci(pred, gold, resamples: int = 1000, confidence: float = 0.95,
                 seed: int = 0, ignore_tags: bool = False) -> tuple[float, float]:
    """Corpus F1 and the half-width of its percentile bootstrap interval.

    Sentences are resampled with replacement.
    """
    if resamples < 100:
        raise ValueError("use at least 100 resamples")
    counts = sentence_counts(pred, gold, ignore_tags)
    n = len(counts)
    total = counts.sum(axis=0)
    point = _f1(*map(int, total))
    rng = np.random.default_rng(seed)
    idx = rng.integers(0, n, size=(resamples, n))
    sums = counts[idx].sum(axis=1)
    denom = sums[:, 1] + sums[:, 2]
    scores = np.where(denom > 0, 2 * sums[:, 0] / np.maximum(denom, 1), 1.0)
    tail = (1 - confidence) / 2 * 100
    lo, hi = np.percentile(scores, [tail, 100 - tail])
    return point, float(hi - lo) / 2


def error_report(pred, gold, store=None) -> Counter:
    """Classify every wrongly segmented predicted word.

    A word is a granularity error when it covers whole gold words, or when it
    is one piece of a clean split of a single gold word whose pieces are all
    known to ``store`` (a :class:`~latticeseg.wordhood.WordhoodStore`).
    Otherwise it is a known word when ``store`` knows it, and a suspect
    meaningless word when nothing vouches for it.
    """
    table = Counter({cls: 0 for cls in ERROR_CLASSES})
    if len(pred) != len(gold):
        raise DataError(f"{len(pred)} predicted vs {len(gold)} gold sentences")
    known = store.known if store is not None else (lambda w: False)
    for p_edges, g_edges in zip(pred, gold):
        gold_spans = {(e.p, e.end) for e in g_edges}
        bounds = {e.p for e in g_edges} | {e.end for e in g_edges}
        for e in p_edges:
            if (e.p, e.end) in gold_spans:
                continue
            if e.p in bounds and e.end in bounds:
                table[GRANULARITY] += 1
            elif _clean_split_piece(e, g_edges, p_edges, known):
                table[GRANULARITY] += 1
            elif known(e.w):
                table[KNOWN_WORD] += 1
            else:
                table[SUSPECT] += 1
    return table


def _clean_split_piece(e, gold_edges, pred_edges, known) -> bool:
    host = next((g for g in gold_edges if g.p <= e.p and e.end <= g.end), None)
    if host is None:
        return False
    pieces = [x for x in pred_edges if host.p <= x.p and x.end <= host.end]
    if sum(len(x.w) for x in pieces) != len(host.w):
        return False
    return all(known(x.w) for x in pieces)


@dataclass
class EvalReport:
    seg_f1: float
    st_f1: float
    correct_st: int
    correct_seg: int
    predicted: int
    gold: int
    seg_ci: float | None = None
    st_ci: float | None = None
    error_table: Counter = field(default_factory=Counter)

    def format(self) -> str:
        lines = [
            f"seg_f1: {self.seg_f1:.4f}",
            f"st_f1: {self.st_f1:.4f}",
            f"correct_seg: {self.correct_seg}",
            f"correct_st: {self.correct_st}",
            f"predicted: {self.predicted}",
            f"gold: {self.gold}",
        ]
        if self.seg_ci is not None:
            lines.append(f"seg_ci95: ±{self.seg_ci:.4f}")
            lines.append(f"st_ci95: ±{self.st_ci:.4f}")
        for cls in ERROR_CLASSES:
            lines.append(f"errors_{cls}: {self.error_table.get(cls, 0)}")
        lines.append(f"note: {CAVEAT}")
        return "\n".join(lines) + "\n"


def evaluate(pred, gold, bootstrap: int = 0, seed: int = 0, store=None) -> EvalReport:
    seg = sentence_counts(pred, gold, ignore_tags=True).sum(axis=0)
    st = sentence_counts(pred, gold).sum(axis=0)
    report = EvalReport(
        seg_f1=_f1(*map(int, seg)), st_f1=_f1(*map(int, st)),
        correct_st=int(st[0]), correct_seg=int(seg[0]),
        predicted=int(st[1]), gold=int(st[2]),
        error_table=error_report(pred, gold, store),
    )
    if bootstrap:
        _, report.seg_ci = bootstrap_ci(pred, gold, bootstrap, seed=seed, ignore_tags=True)
        _, report.st_ci = bootstrap_ci(pred, gold, bootstrap, seed=seed)
    return report


def per_sentence_f1(pred, gold) -> list[tuple[float, float]]:
    seg = sentence_counts(pred, gold, ignore_tags=True)
    st = sentence_counts(pred, gold)
    return [(_f1(*map(int, a)), _f1(*map(int, b))) for a, b in zip(seg, st)]
