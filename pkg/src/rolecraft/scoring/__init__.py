"""Scoring contracts, the built-in reference scorer, and external clients."""
from .contracts import (
    O_INDEX,
    TAGS,
    BioScoreRequest,
    RoleScoreRequest,
    ScorerHandle,
    SenseScoreRequest,
    validate_probability,
    validate_tag_distribution,
)
from .client import DEFAULT_TIMEOUT, ExecScorer, TcpScorer, open_scorer
from .reference import (
    ReferenceModel,
    ReferenceScorer,
    TrainConfig,
    TrainResult,
    load_model,
    save_model,
    train_reference,
)
from .scripted import ScriptedScorer

__all__ = [
    "TAGS",
    "O_INDEX",
    "SenseScoreRequest",
    "RoleScoreRequest",
    "BioScoreRequest",
    "ScorerHandle",
    "validate_probability",
    "validate_tag_distribution",
    "open_scorer",
    "ExecScorer",
    "TcpScorer",
    "DEFAULT_TIMEOUT",
    "ReferenceModel",
    "ReferenceScorer",
    "TrainConfig",
    "TrainResult",
    "train_reference",
    "save_model",
    "load_model",
    "ScriptedScorer",
]
