"""Scorer-agnostic semantic role labeling engine.

Predicate senses are chosen by multiple choice over frame-file descriptions,
candidate roles are filtered by a global top-scoring selection, arguments are
extracted per role as BIO tags and merged by a constrained decoder. Scoring
is pluggable: a built-in trainable linear scorer or any external process
speaking the wire protocol.
"""

__version__ = "0.1.0"

from .corpus import (
    Argument,
    Prediction,
    PredicateInstance,
    Sentence,
    read_corpus,
    resolve_lemma,
)
from .decoder import decode, extract_spans, merge_lattice
from .disambiguate import SenseDecision, disambiguate
from .errors import (
    ConfigError,
    ContractError,
    CorpusParseError,
    DataError,
    FrameIngestError,
    ProtocolError,
    RolecraftError,
    RoleUndefinedForSense,
    TransportError,
)
from .evaluation import EvalReport, evaluate, score_arguments, score_senses
from .frames import FrameInventory, RoleLabel, SenseEntry, ingest_frames
from .pipeline import PipelineConfig, PipelineResult, run_ablation, run_pipeline, train_all
from .queries import build_role_query, build_sense_options, mark_predicate
from .role_filter import LambdaReport, filter_roles, tune_lambda

__all__ = [
    "__version__",
    "Argument",
    "Prediction",
    "PredicateInstance",
    "Sentence",
    "read_corpus",
    "resolve_lemma",
    "decode",
    "extract_spans",
    "merge_lattice",
    "SenseDecision",
    "disambiguate",
    "RolecraftError",
    "DataError",
    "FrameIngestError",
    "CorpusParseError",
    "ConfigError",
    "ContractError",
    "RoleUndefinedForSense",
    "TransportError",
    "ProtocolError",
    "EvalReport",
    "evaluate",
    "score_arguments",
    "score_senses",
    "FrameInventory",
    "RoleLabel",
    "SenseEntry",
    "ingest_frames",
    "build_role_query",
    "build_sense_options",
    "mark_predicate",
    "LambdaReport",
    "filter_roles",
    "tune_lambda",
    "PipelineConfig",
    "PipelineResult",
    "run_pipeline",
    "run_ablation",
    "train_all",
]
