"""Most-frequent baselines: the bar the trained engine has to clear.

Sense baseline: each lemma predicts its most frequent training sense.
Argument baseline: each lemma predicts its most frequent training argument
layout, stored as spans relative to the predicate position; spans that fall
off the sentence are dropped. Ties always resolve to the lexicographically
smallest candidate so the baselines are deterministic.
"""
from __future__ import annotations

from collections import Counter
from typing import Sequence

from .corpus import Argument, PredicateInstance
from .frames import FrameInventory, senses_of

_Layout = tuple[tuple[str, int, int], ...]


def _modal(counter: Counter):
    return sorted(counter.items(), key=lambda kv: (-kv[1], kv[0]))[0][0]


def most_frequent_sense_table(instances: Sequence[PredicateInstance]) -> dict[str, str]:
    by_lemma: dict[str, Counter] = {}
    for inst in instances:
        if inst.lemma is None or inst.gold_sense is None:
            continue
        by_lemma.setdefault(inst.lemma, Counter())[inst.gold_sense] += 1
    return {lemma: _modal(c) for lemma, c in by_lemma.items()}


def predict_senses(
    table: dict[str, str],
    instances: Sequence[PredicateInstance],
    inv: FrameInventory | None = None,
) -> list[str | None]:
    """Table lookup per lemma; unseen lemmas fall back to the inventory's
    first sense when an inventory is given."""
    out: list[str | None] = []
    for inst in instances:
        sense = table.get(inst.lemma or "")
        if sense is None and inv is not None and inst.lemma is not None:
            senses = senses_of(inv, inst.lemma)
            sense = senses[0].sense_id if senses else None
        out.append(sense)
    return out


def _layout_of(inst: PredicateInstance) -> _Layout:
    return tuple(
        sorted(
            (a.role, a.start - inst.pred_index, a.end - inst.pred_index)
            for a in inst.gold_args
        )
    )


def most_frequent_layout_table(
    instances: Sequence[PredicateInstance],
) -> dict[str, _Layout]:
    by_lemma: dict[str, Counter] = {}
    for inst in instances:
        if inst.lemma is None:
            continue
        by_lemma.setdefault(inst.lemma, Counter())[_layout_of(inst)] += 1
    return {lemma: _modal(c) for lemma, c in by_lemma.items()}


def predict_args(
    table: dict[str, _Layout], instances: Sequence[PredicateInstance]
) -> list[tuple[Argument, ...]]:
    out = []
    for inst in instances:
        layout = table.get(inst.lemma or "", ())
        n = len(inst.sentence.tokens)
        args = []
        for role, ds, de in layout:
            start, end = inst.pred_index + ds, inst.pred_index + de
            if 0 <= start <= end < n:
                args.append(Argument(start=start, end=end, role=role))
        out.append(tuple(args))
    return out
