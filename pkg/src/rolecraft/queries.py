"""Textual instance construction: marked sequences, sense options, role queries.

Scorers see sentences with the predicate wrapped in ``<p>`` ``</p>`` marker
tokens, sense candidates as (sense_id, description) options, and one natural
language query per base role. The N/R/C prefix never reaches the query text;
reference and continuation variants share the base role's query.
"""
from __future__ import annotations

from dataclasses import dataclass

from .corpus import PREDICATE_MARKERS, PredicateInstance, mark_predicate_tokens
from .errors import DataError
from .frames import FrameInventory, RoleLabel, role_description, senses_of


@dataclass(frozen=True)
class MarkedSequence:
    """Sentence tokens with predicate markers inserted; pred_index points at the
    predicate inside the marked token list."""

    tokens: tuple[str, ...]
    pred_index: int

    def __post_init__(self) -> None:
        open_m, close_m = PREDICATE_MARKERS
        if self.tokens.count(open_m) != 1 or self.tokens.count(close_m) != 1:
            raise ValueError("marked sequence must contain exactly one marker pair")
        if (
            not 0 < self.pred_index < len(self.tokens) - 1
            or self.tokens[self.pred_index - 1] != open_m
            or self.tokens[self.pred_index + 1] != close_m
        ):
            raise ValueError("markers must directly surround the predicate token")

    @property
    def predicate_word(self) -> str:
        return self.tokens[self.pred_index]


@dataclass(frozen=True)
class SenseOption:
    sense_id: str
    option_text: str

    def __post_init__(self) -> None:
        if not self.option_text:
            raise ValueError(f"sense option {self.sense_id} has empty text")


@dataclass(frozen=True)
class RoleQuery:
    role: RoleLabel
    query_text: str

    def __post_init__(self) -> None:
        if self.role.prefix != "N":
            raise ValueError("role queries are built for base roles only")
        if not self.query_text:
            raise ValueError("empty query text")


def mark_predicate(inst: PredicateInstance) -> MarkedSequence:
    """Wrap the instance's predicate in marker tokens."""
    marked = mark_predicate_tokens(inst.sentence.tokens, inst.pred_index)
    return MarkedSequence(tokens=tuple(marked), pred_index=inst.pred_index + 1)


def unmark(seq: MarkedSequence) -> tuple[tuple[str, ...], int]:
    """Invert mark_predicate: original tokens plus the unmarked predicate index."""
    tokens = tuple(t for t in seq.tokens if t not in PREDICATE_MARKERS)
    return tokens, seq.pred_index - 1


def sense_question(inst: PredicateInstance) -> str:
    """Human-readable question attached to disambiguation output as metadata.

    Scoring consumes (option_text, marked sentence) pairs; this text is not
    part of the scoring input.
    """
    return f"What is the sense of predicate {inst.predicate_word}?"


def build_sense_options(inv: FrameInventory, inst: PredicateInstance) -> list[SenseOption]:
    """One option per sense of the instance's lemma, in frame-file order."""
    if inst.lemma is None:
        raise DataError("instance lemma is not resolved; run resolve_lemma first")
    senses = senses_of(inv, inst.lemma)
    if not senses:
        raise DataError(f"lemma {inst.lemma!r} has no senses in the inventory")
    return [SenseOption(sense_id=s.sense_id, option_text=s.description) for s in senses]


def build_role_query(
    inv: FrameInventory,
    inst: PredicateInstance,
    sense_id: str,
    role: RoleLabel,
    semantic: bool = True,
) -> RoleQuery:
    """Natural-language query for one base role under the chosen sense.

    With semantic=False the query collapses to the bare category label, the
    degraded form used by the no-semantics ablation.
    """
    base = RoleLabel(base=role.base)  # drop any R/C prefix
    if not semantic:
        return RoleQuery(role=base, query_text=base.base)
    pred_word = inst.predicate_word
    if base.is_core:
        desc = role_description(inv, sense_id, base)
        text = f"What are the {base.base} arguments of predicate {pred_word} with meaning {desc}?"
    else:
        desc = role_description(inv, sense_id, base)
        text = f"What are the {desc} modifiers of predicate {pred_word}?"
    return RoleQuery(role=base, query_text=text)
