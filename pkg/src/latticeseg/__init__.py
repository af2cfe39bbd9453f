"""Joint Chinese word segmentation and POS tagging over margin-bounded word lattices."""

from .core import (
    CharLabel,
    CharLabeledSentence,
    CorpusFormatError,
    Edge,
    LabelAlphabet,
    StructureError,
    TagSet,
    analysis_to_char_labels,
    char_labels_to_analysis,
    read_corpus,
    write_corpus,
)
from .char_tagger import CharModel, train_char_model, viterbi_decode
from .lattice import WeightedEdge, WordLattice, generate_lattice, lattice_scale, oracle_recall
from .word_decoder import WordModel, decode_lattice, train_word_model
from .pipeline import PipelineConfig, decode_sentence, stacked_train
from .metrics import bootstrap_ci, error_report, evaluate, f1

__version__ = "0.1.0"
