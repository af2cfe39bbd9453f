"""Sparse averaged perceptron shared by the character and word models.

Weights are integers.  An averaged model keeps the integer sums of all
per-instance weight snapshots and remembers the number of snapshots as its
``scale``; the real-valued weight of a feature is ``weights[f] / scale``.
Decoders work on the integer sums directly, which keeps argmax and tie
breaking exact.
"""

from __future__ import annotations

from collections import Counter
from typing import Callable, Hashable, Iterable

FORMAT_VERSION = 1
MAGIC = "latticeseg-model"


class ModelFormatError(ValueError):
    pass


class PerceptronModel:
    """Feature weights plus the lazy-averaging bookkeeping.

    ``step`` counts training instances seen so far.  ``totals[f]`` holds the
    sum of the weight of ``f`` over all snapshots up to ``last_update[f]``;
    the remaining snapshots are folded in by :meth:`averaged`.
    """

    def __init__(self, weights=None, scale: int = 1):
        if scale < 1:
            raise ValueError("scale must be positive")
        self.weights: dict[Hashable, int] = dict(weights or {})
        self.scale = scale
        self.totals: dict[Hashable, int] = {}
        self.last_update: dict[Hashable, int] = {}
        self.step = 0

    def __len__(self):
        return len(self.weights)

    def score(self, features: Iterable[Hashable]) -> int:
        w = self.weights
        return sum(w.get(f, 0) for f in features)

    def add(self, feature, amount: int) -> None:
        w = self.weights.get(feature, 0)
        last = self.last_update.get(feature, 0)
        if w:
            self.totals[feature] = self.totals.get(feature, 0) + w * (self.step - last)
        self.last_update[feature] = self.step
        w += amount
        if w:
            self.weights[feature] = w
        else:
            del self.weights[feature]

    def update(self, gold: Iterable[Hashable], predicted: Iterable[Hashable]) -> int:
        """Add +1 per gold feature and -1 per predicted feature.

        Returns the number of features whose weight changed.
        """
        diff = Counter(gold)
        diff.subtract(predicted)
        changed = 0
        for f, d in diff.items():
            if d:
                self.add(f, d)
                changed += 1
        return changed

    def tick(self) -> None:
        """Close the current training instance (one averaging snapshot)."""
        self.step += 1

    def averaged(self) -> "PerceptronModel":
        if self.step == 0:
            return PerceptronModel(self.weights)
        avg = {}
        for f in set(self.totals) | set(self.weights):
            total = self.totals.get(f, 0)
            w = self.weights.get(f, 0)
            if w:
                total += w * (self.step - self.last_update.get(f, 0))
            if total:
                avg[f] = total
        return PerceptronModel(avg, scale=self.step)

    def __eq__(self, other):
        return (isinstance(other, PerceptronModel) and self.scale == other.scale
                and self.weights == other.weights)


def write_model(path, model: PerceptronModel, kind: str, header: dict,
                encode: Callable[[Hashable], str] = str) -> None:
    """Write ``model`` in the versioned text format.

    Layout: a magic/version line, ``kind``, then one TAB-separated line per
    header field (value lists joined by TAB), a ``weights`` line with the
    feature count, and one ``key TAB totals TAB steps`` line per feature,
    sorted by key.
    """
    lines = [f"{MAGIC}\t{FORMAT_VERSION}", f"kind\t{kind}", f"steps\t{model.scale}"]
    for name, value in header.items():
        if isinstance(value, (list, tuple)):
            value = "\t".join(str(v) for v in value)
        lines.append(f"{name}\t{value}")
    rows = sorted((encode(f), v) for f, v in model.weights.items())
    lines.append(f"weights\t{len(rows)}")
    for key, v in rows:
        if "\t" in key or "\n" in key:
            raise ModelFormatError(f"feature key {key!r} contains TAB or newline")
        lines.append(f"{key}\t{v}\t{model.scale}")
    with open(path, "w", encoding="utf-8", newline="\n") as f:
        f.write("\n".join(lines) + "\n")


def read_model(path, decode: Callable[[str], Hashable] = str):
    """Inverse of :func:`write_model`; returns ``(model, kind, header)``.

    Header values come back as lists of strings.
    """
    with open(path, encoding="utf-8") as f:
        lines = f.read().split("\n")
    if lines and lines[-1] == "":
        lines.pop()
    if not lines or lines[0].split("\t") != [MAGIC, str(FORMAT_VERSION)]:
        raise ModelFormatError(f"{path}: not a version-{FORMAT_VERSION} model file")
    header: dict[str, list[str]] = {}
    i = 1
    kind = None
    scale = 1
    while i < len(lines):
        name, *values = lines[i].split("\t")
        i += 1
        if name == "kind":
            kind = values[0]
        elif name == "steps":
            scale = int(values[0])
        elif name == "weights":
            count = int(values[0])
            break
        else:
            header[name] = values
    else:
        raise ModelFormatError(f"{path}: missing weights section")
    body = lines[i:]
    if len(body) != count:
        raise ModelFormatError(f"{path}: expected {count} weights, found {len(body)}")
    weights = {}
    for n, line in enumerate(body, i + 1):
        try:
            key, total, steps = line.rsplit("\t", 2)
            total, steps = int(total), int(steps)
        except ValueError:
            raise ModelFormatError(f"{path}:{n}: malformed weight line") from None
        if steps != scale:
            raise ModelFormatError(f"{path}:{n}: inconsistent step count")
        weights[decode(key)] = total
    return PerceptronModel(weights, scale=scale), kind, header
