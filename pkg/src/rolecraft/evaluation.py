"""Scoring: sense accuracy, argument micro-P/R/F1, combined dependency mode.

An argument matches only when start, end, and the full prefixed role string
all agree. Precision is 0 by convention when nothing was predicted. The
combined dependency mode adds each predicate's sense as one pseudo-argument
on both sides before pooling counts, the virtual-root convention of
dependency-style shared tasks. This is the engine's internal convention, not
a bit-for-bit reimplementation of the official scorers; comparisons against
published numbers should use those.
"""
from __future__ import annotations

from dataclasses import dataclass
from typing import Iterable, Sequence

from .corpus import Argument
from .errors import ContractError

_SpanKey = tuple[int, int, str]


@dataclass(frozen=True)
class PRF:
    precision: float
    recall: float
    f1: float
    matched: int
    predicted: int
    gold: int


@dataclass(frozen=True)
class EvalReport:
    sense_accuracy: float | None
    sense_correct: int
    sense_total: int
    arguments: PRF
    combined: PRF | None = None
    single_sense_fraction: float | None = None

    def to_json(self) -> dict:
        out = {
            "version": 1,
            "sense": {
                "accuracy": self.sense_accuracy,
                "correct": self.sense_correct,
                "total": self.sense_total,
            },
            "arguments": _prf_json(self.arguments),
        }
        if self.combined is not None:
            out["combined"] = _prf_json(self.combined)
        if self.single_sense_fraction is not None:
            out["single_sense_fraction"] = self.single_sense_fraction
        return out


def _prf_json(prf: PRF) -> dict:
    return {
        "precision": prf.precision,
        "recall": prf.recall,
        "f1": prf.f1,
        "matched": prf.matched,
        "predicted": prf.predicted,
        "gold": prf.gold,
    }


def _prf(matched: int, predicted: int, gold: int) -> PRF:
    p = matched / predicted if predicted else 0.0
    r = matched / gold if gold else 0.0
    f1 = 2 * p * r / (p + r) if p + r > 0 else 0.0
    return PRF(precision=p, recall=r, f1=f1, matched=matched, predicted=predicted, gold=gold)


def _keys(args: Iterable[Argument | _SpanKey]) -> set[_SpanKey]:
    out = set()
    for a in args:
        key = (a.start, a.end, a.role) if isinstance(a, Argument) else tuple(a)
        out.add(key)
    return out


def _check_disjoint_pred(keys: set[_SpanKey]) -> None:
    spans = sorted((s, e) for s, e, _ in keys)
    for (s1, e1), (s2, _) in zip(spans, spans[1:]):
        if s2 <= e1:
            raise ContractError(
                f"predicted spans overlap: ({s1}, {e1}) and one starting at {s2}"
            )


def score_senses(
    gold: Sequence[str | None], pred: Sequence[str | None]
) -> tuple[float | None, int, int]:
    """Exact full-sense-id accuracy over instances with a gold sense.

    Lemma errors are not forgiven: "bet.02" against gold "beat.02" is wrong.
    Returns (accuracy-or-None, correct, total).
    """
    if len(gold) != len(pred):
        raise ContractError(f"{len(gold)} gold senses but {len(pred)} predictions")
    total = correct = 0
    for g, p in zip(gold, pred):
        if g is None:
            continue
        total += 1
        correct += int(p == g)
    return (correct / total if total else None), correct, total


def score_arguments(
    gold: Sequence[Iterable[Argument | _SpanKey]],
    pred: Sequence[Iterable[Argument | _SpanKey]],
) -> PRF:
    """Micro P/R/F1 over exact (start, end, prefixed role) matches."""
    if len(gold) != len(pred):
        raise ContractError(f"{len(gold)} gold instances but {len(pred)} predictions")
    matched = predicted = gold_n = 0
    for g, p in zip(gold, pred):
        gk, pk = _keys(g), _keys(p)
        _check_disjoint_pred(pk)
        matched += len(gk & pk)
        predicted += len(pk)
        gold_n += len(gk)
    return _prf(matched, predicted, gold_n)


def score_combined_dep(
    gold: Sequence[tuple[str | None, Iterable[Argument | _SpanKey]]],
    pred: Sequence[tuple[str | None, Iterable[Argument | _SpanKey]]],
) -> PRF:
    """Dependency-mode scoring with the sense as a virtual-root argument.

    Each side of each instance contributes its sense (when present) as one
    extra countable item keyed apart from real spans.
    """
    if len(gold) != len(pred):
        raise ContractError(f"{len(gold)} gold instances but {len(pred)} predictions")
    matched = predicted = gold_n = 0
    for (g_sense, g_args), (p_sense, p_args) in zip(gold, pred):
        gk = {("arg",) + k for k in _keys(g_args)}
        pk = {("arg",) + k for k in _keys(p_args)}
        _check_disjoint_pred(_keys(p_args))
        if g_sense is not None:
            gk.add(("sense", g_sense))
        if p_sense is not None:
            pk.add(("sense", p_sense))
        matched += len(gk & pk)
        predicted += len(pk)
        gold_n += len(gk)
    return _prf(matched, predicted, gold_n)


def evaluate(
    gold_senses: Sequence[str | None],
    gold_args: Sequence[Iterable[Argument | _SpanKey]],
    pred_senses: Sequence[str | None],
    pred_args: Sequence[Iterable[Argument | _SpanKey]],
    mode: str = "span",
    single_sense_fraction: float | None = None,
) -> EvalReport:
    """Assemble the full report; mode "dep" adds the combined score."""
    accuracy, correct, total = score_senses(gold_senses, pred_senses)
    arguments = score_arguments(gold_args, pred_args)
    combined = None
    if mode == "dep":
        combined = score_combined_dep(
            list(zip(gold_senses, gold_args)), list(zip(pred_senses, pred_args))
        )
    elif mode != "span":
        raise ContractError(f"unknown evaluation mode {mode!r}")
    return EvalReport(
        sense_accuracy=accuracy,
        sense_correct=correct,
        sense_total=total,
        arguments=arguments,
        combined=combined,
        single_sense_fraction=single_sense_fraction,
    )
