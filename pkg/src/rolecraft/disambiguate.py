"""Predicate disambiguation: multiple choice over the lemma's sense options."""
from __future__ import annotations

from dataclasses import dataclass

from .corpus import PredicateInstance
from .frames import FrameInventory
from .queries import build_sense_options, mark_predicate
from .scoring.contracts import ScorerHandle, SenseScoreRequest


@dataclass(frozen=True)
class SenseDecision:
    """Chosen sense plus the per-option confidence map (inventory order)."""

    sense_id: str
    score: float
    option_scores: dict[str, float]


def disambiguate(h: ScorerHandle, inv: FrameInventory, inst: PredicateInstance) -> SenseDecision:
    """Score every sense option and take the argmax.

    Ties keep the earliest option in frame-file order. Single-sense lemmas
    short-circuit without touching the scorer and report confidence 1.0.
    """
    options = build_sense_options(inv, inst)
    if len(options) == 1:
        only = options[0].sense_id
        return SenseDecision(sense_id=only, score=1.0, option_scores={only: 1.0})
    tokens = tuple(mark_predicate(inst).tokens)
    reqs = [SenseScoreRequest(tokens=tokens, option_text=o.option_text) for o in options]
    scores = h.score_sense_batch(reqs)
    option_scores = {o.sense_id: s for o, s in zip(options, scores)}
    best_id, best = options[0].sense_id, scores[0]
    for o, s in zip(options[1:], scores[1:]):
        if s > best:
            best_id, best = o.sense_id, s
    return SenseDecision(sense_id=best_id, score=best, option_scores=option_scores)
