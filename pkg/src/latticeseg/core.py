"""Domain types, label alphabets and corpus I/O.

An analysis of a sentence can be viewed two ways: as a sequence of
positioned word/tag edges, or as one ``(position-tag, POS)`` label per
character.  This module owns both views and the conversions between them.
"""

from __future__ import annotations

from dataclasses import dataclass
from typing import Iterable, NamedTuple, Sequence

POSITION_TAGS = ("B", "M", "E", "S")


class StructureError(ValueError):
    """An analysis or label sequence violates its structural invariants."""

    def __init__(self, message, index=None):
        if index is not None:
            message = f"{message} (at index {index})"
        super().__init__(message)
        self.index = index


class CorpusFormatError(ValueError):
    """A corpus file line could not be parsed."""

    def __init__(self, message, line=None):
        if line is not None:
            message = f"line {line}: {message}"
        super().__init__(message)
        self.line = line


class Edge(NamedTuple):
    """A positioned word hypothesis: ``p`` characters precede ``w``."""

    p: int
    w: str
    t: str

    @property
    def end(self):
        return self.p + len(self.w)


class CharLabel(NamedTuple):
    pos: str
    tag: str

    def __str__(self):
        return f"{self.pos}-{self.tag}"

    @classmethod
    def parse(cls, text):
        pos, _, tag = text.partition("-")
        if pos not in POSITION_TAGS or not tag:
            raise ValueError(f"bad character label {text!r}")
        return cls(pos, tag)


Analysis = tuple  # tuple[Edge, ...]


def check_sentence(chars: str) -> str:
    if not chars:
        raise StructureError("empty sentence")
    for i, ch in enumerate(chars):
        if ch.isspace():
            raise StructureError("whitespace inside sentence", i)
    return chars


def check_analysis(edges: Sequence[Edge], sentence: str | None = None) -> tuple:
    """Validate contiguity of ``edges`` and return them as a tuple."""
    if not edges:
        raise StructureError("empty analysis")
    pos = 0
    for i, e in enumerate(edges):
        if not e.w:
            raise StructureError("empty word", i)
        if e.p != pos:
            raise StructureError(f"edge starts at {e.p}, expected {pos}", i)
        pos += len(e.w)
    if sentence is not None and "".join(e.w for e in edges) != sentence:
        raise StructureError("analysis does not spell the sentence")
    return tuple(edges)


def analysis_sentence(edges: Iterable[Edge]) -> str:
    return "".join(e.w for e in edges)


def make_analysis(words_and_tags: Iterable[tuple[str, str]]) -> tuple:
    """Build an analysis from ``(word, tag)`` pairs, filling in positions."""
    edges = []
    p = 0
    for w, t in words_and_tags:
        edges.append(Edge(p, w, t))
        p += len(w)
    return tuple(edges)


class TagSet:
    """POS tags interned to dense ids in order of first occurrence."""

    def __init__(self, tags: Iterable[str] = ()):
        self._tags: list[str] = []
        self._ids: dict[str, int] = {}
        for t in tags:
            self.add(t)

    def add(self, tag: str) -> int:
        if not tag:
            raise ValueError("empty POS tag")
        i = self._ids.get(tag)
        if i is None:
            i = self._ids[tag] = len(self._tags)
            self._tags.append(tag)
        return i

    def id(self, tag: str) -> int:
        return self._ids[tag]

    def tag(self, i: int) -> str:
        return self._tags[i]

    def __contains__(self, tag):
        return tag in self._ids

    def __len__(self):
        return len(self._tags)

    def __iter__(self):
        return iter(self._tags)

    def __eq__(self, other):
        return isinstance(other, TagSet) and self._tags == other._tags

    def __repr__(self):
        return f"TagSet({self._tags!r})"


@dataclass(frozen=True)
class CharLabeledSentence:
    sentence: str
    labels: tuple

    def __post_init__(self):
        if len(self.labels) != len(self.sentence):
            raise StructureError(
                f"{len(self.labels)} labels for {len(self.sentence)} characters")


class LabelAlphabet:
    """The full S x T label set with stable dense ids.

    Ids follow first occurrence in the training labels; labels never seen
    are appended afterwards in (tag id, B/M/E/S) order.  Decoders scan labels
    in id order, so this ordering doubles as the tie-break order.
    """

    def __init__(self, labels: Sequence[CharLabel], tags: TagSet):
        self.labels = tuple(labels)
        self.tags = tags
        self.index = {lab: i for i, lab in enumerate(self.labels)}
        if len(self.index) != len(self.labels):
            raise ValueError("duplicate labels")
        expected = {CharLabel(s, t) for t in tags for s in POSITION_TAGS}
        if set(self.labels) != expected:
            raise ValueError("label alphabet must be exactly S x T")
        # label id of <s, t> keyed by (s, tag id)
        self.by_pos_tag = {(lab.pos, tags.id(lab.tag)): i
                           for i, lab in enumerate(self.labels)}

    @classmethod
    def from_label_sequences(cls, sequences: Iterable[Sequence[CharLabel]],
                             tags: TagSet | None = None):
        tags = TagSet(tags or ())
        seen: dict[CharLabel, None] = {}
        for seq in sequences:
            for lab in seq:
                tags.add(lab.tag)
                seen.setdefault(lab, None)
        order = list(seen)
        for t in tags:
            for s in POSITION_TAGS:
                lab = CharLabel(s, t)
                if lab not in seen:
                    order.append(lab)
        return cls(order, tags)

    @classmethod
    def from_corpus(cls, corpus, tags: TagSet | None = None):
        return cls.from_label_sequences(
            (analysis_to_char_labels(a).labels for _, a in corpus), tags)

    def __len__(self):
        return len(self.labels)

    def __getitem__(self, i):
        return self.labels[i]

    def id(self, label: CharLabel) -> int:
        return self.index[label]


def analysis_to_char_labels(edges: Sequence[Edge]) -> CharLabeledSentence:
    edges = check_analysis(edges)
    labels = []
    for e in edges:
        k = len(e.w)
        if k == 1:
            labels.append(CharLabel("S", e.t))
        else:
            labels.append(CharLabel("B", e.t))
            labels.extend([CharLabel("M", e.t)] * (k - 2))
            labels.append(CharLabel("E", e.t))
    return CharLabeledSentence(analysis_sentence(edges), tuple(labels))


def char_labels_to_analysis(cls: CharLabeledSentence) -> tuple:
    chars, labels = cls.sentence, cls.labels
    edges = []
    start = None
    for i, lab in enumerate(labels):
        if lab.pos not in POSITION_TAGS:
            raise StructureError(f"unknown position tag {lab.pos!r}", i)
        if lab.pos in "BS":
            if start is not None:
                raise StructureError(f"{lab.pos} inside an open word", i)
            if lab.pos == "S":
                edges.append(Edge(i, chars[i], lab.tag))
            else:
                start = i
        else:
            if start is None:
                raise StructureError(f"{lab.pos} without a preceding B", i)
            if lab.tag != labels[start].tag:
                raise StructureError("POS tag changes inside a word", i)
            if lab.pos == "E":
                edges.append(Edge(start, chars[start:i + 1], lab.tag))
                start = None
    if start is not None:
        raise StructureError("word left open at end of sentence", len(labels) - 1)
    return tuple(edges)


# -- corpus files -----------------------------------------------------------

def parse_corpus_line(line: str, lineno=None) -> tuple:
    if not line:
        raise CorpusFormatError("empty line", lineno)
    pairs = []
    for token in line.split(" "):
        if token.count("_") != 1:
            raise CorpusFormatError(
                f"token {token!r} needs exactly one '_' separator", lineno)
        w, t = token.split("_")
        if not w:
            raise CorpusFormatError(f"empty word in token {token!r}", lineno)
        if not t:
            raise CorpusFormatError(f"empty tag in token {token!r}", lineno)
        pairs.append((w, t))
    edges = make_analysis(pairs)
    try:
        check_sentence(analysis_sentence(edges))
    except StructureError as exc:
        raise CorpusFormatError(str(exc), lineno) from None
    return edges


def format_analysis(edges: Iterable[Edge]) -> str:
    return " ".join(f"{e.w}_{e.t}" for e in edges)


def read_corpus(path, tagset: TagSet | None = None) -> list:
    """Read a ``word_TAG`` corpus into ``(sentence, analysis)`` pairs.

    Tags are added to ``tagset`` (when given) in the order they are seen.
    """
    corpus = []
    with open(path, encoding="utf-8", newline="") as f:
        text = f.read()
    if not text:
        return corpus
    lines = text.split("\n")
    if lines[-1] == "":
        lines.pop()
    for lineno, line in enumerate(lines, 1):
        if line.endswith("\r"):
            line = line[:-1]
        edges = parse_corpus_line(line, lineno)
        if tagset is not None:
            for e in edges:
                tagset.add(e.t)
        corpus.append((analysis_sentence(edges), edges))
    return corpus


def write_corpus(path, analyses: Iterable) -> None:
    """Write analyses (or ``(sentence, analysis)`` pairs) in corpus format."""
    with open(path, "w", encoding="utf-8", newline="\n") as f:
        for item in analyses:
            if isinstance(item, tuple) and len(item) == 2 and isinstance(item[0], str):
                item = item[1]
            f.write(format_analysis(item) + "\n")


def read_raw_sentences(path) -> list[str]:
    """One raw sentence per line; surrounding whitespace is stripped."""
    out = []
    with open(path, encoding="utf-8") as f:
        for lineno, line in enumerate(f, 1):
            s = "".join(line.split())
            if not s:
                raise CorpusFormatError("empty line", lineno)
            out.append(s)
    return out


def collect_tagset(corpus) -> TagSet:
    tags = TagSet()
    for _, edges in corpus:
        for e in edges:
            tags.add(e.t)
    return tags
