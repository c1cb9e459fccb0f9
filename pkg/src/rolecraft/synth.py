"""Deterministic synthetic corpus: two lemmas, four senses, six roles.

The grammar is built so every signal the pipeline needs is learnable from
surface vocabulary: each sense draws its argument phrases from its own word
pools, modifiers are optional and drawn from shared pools, and noun phrases
vary in length so fixed-offset heuristics stay mediocre. A fixed seed fully
determines the output.
"""
from __future__ import annotations

import random
from typing import Sequence

from .corpus import Argument, Predicate, Sentence
from .frames import DEFAULT_MODIFIERS, FrameInventory, SenseEntry

SENSES = {
    "beat.01": ("strike rhythmically or repeatedly", {
        "A0": "agent doing the striking",
        "A1": "thing struck",
        "A2": "instrument of striking",
    }),
    "beat.02": ("defeat in a contest, win over", {
        "A0": "winner",
        "A1": "loser",
    }),
    "open.01": ("cause to become open", {
        "A0": "opener",
        "A1": "thing opened",
    }),
    "open.02": ("begin operating, start business", {
        "A1": "thing starting up",
    }),
}

ROLE_UNIVERSE = ("A0", "A1", "A2", "LOC", "MNR", "TMP")

_NP = {
    ("beat.01", "A0"): ["the drummer", "the old drummer", "the chef", "the young chef"],
    ("beat.01", "A1"): ["the drum", "the big drum", "the eggs", "the batter"],
    ("beat.01", "A2"): ["with a stick", "with a worn stick", "with a whisk"],
    ("beat.02", "A0"): ["the team", "the home team", "the champion", "the girl"],
    ("beat.02", "A1"): ["the rivals", "the visitors", "the holders"],
    ("open.01", "A0"): ["the clerk", "the janitor", "the guard"],
    ("open.01", "A1"): ["the door", "the heavy door", "the window", "the gate"],
    ("open.02", "A1"): ["the shop", "the museum", "the bakery", "the old mill"],
}

_MODS = {
    "TMP": ["yesterday", "on monday", "last night", "before dawn"],
    "LOC": ["in the hall", "at the station", "near the bridge"],
    "MNR": ["quickly", "with great care", "rather loudly"],
}

_FORMS = {"beat": ["beat", "beats"], "open": ["opened", "opens", "open"]}

# (sense, weight within lemma, argument order around the predicate);
# "PRED" is the predicate slot, a role in parentheses is optional with the
# given probability.
_TEMPLATES = {
    "beat.01": ["A0", "PRED", "A1", ("A2", 0.55), ("MNR", 0.3), ("LOC", 0.25), ("TMP", 0.4)],
    "beat.02": ["A0", "PRED", "A1", ("LOC", 0.3), ("TMP", 0.45)],
    "open.01": ["A0", "PRED", "A1", ("MNR", 0.35), ("TMP", 0.4)],
    "open.02": ["A1", "PRED", ("LOC", 0.35), ("TMP", 0.45)],
}

_SENSE_WEIGHTS = [("beat.01", 0.31), ("beat.02", 0.19), ("open.01", 0.30), ("open.02", 0.20)]

_FRONTED_TMP_P = 0.15


def build_inventory() -> FrameInventory:
    entries: dict[str, list[SenseEntry]] = {}
    for sense_id, (desc, roles) in SENSES.items():
        lemma = sense_id.rsplit(".", 1)[0]
        entries.setdefault(lemma, []).append(
            SenseEntry(sense_id=sense_id, description=desc, core_roles=dict(roles))
        )
    return FrameInventory(entries=entries, modifier_defs=dict(DEFAULT_MODIFIERS))


def _pick_sense(rng: random.Random) -> str:
    roll = rng.random()
    acc = 0.0
    for sense, w in _SENSE_WEIGHTS:
        acc += w
        if roll < acc:
            return sense
    return _SENSE_WEIGHTS[-1][0]


def generate_sentence(rng: random.Random, sent_id: str) -> Sentence:
    sense = _pick_sense(rng)
    lemma = sense.rsplit(".", 1)[0]
    tokens: list[str] = []
    args: list[Argument] = []
    pred_index = -1

    def add_phrase(phrase: str, role: str | None) -> None:
        words = phrase.split()
        start = len(tokens)
        tokens.extend(words)
        if role is not None:
            args.append(Argument(start=start, end=len(tokens) - 1, role=role))

    slots = list(_TEMPLATES[sense])
    tmp_slot = next((s for s in slots if isinstance(s, tuple) and s[0] == "TMP"), None)
    fronted_tmp = tmp_slot is not None and rng.random() < _FRONTED_TMP_P
    if fronted_tmp:
        add_phrase(rng.choice(_MODS["TMP"]), "TMP")
        slots.remove(tmp_slot)

    for slot in slots:
        if slot == "PRED":
            pred_index = len(tokens)
            tokens.append(rng.choice(_FORMS[lemma]))
            continue
        if isinstance(slot, tuple):
            role, prob = slot
            if rng.random() >= prob:
                continue
        else:
            role = slot
        pool = _NP.get((sense, role)) or _MODS[role]
        add_phrase(rng.choice(pool), role)

    tokens.append(".")
    predicate = Predicate(index=pred_index, lemma=lemma, sense=sense, args=tuple(args))
    return Sentence(sent_id=sent_id, tokens=tuple(tokens), predicates=(predicate,))


def generate_corpus(n: int, seed: int) -> list[Sentence]:
    rng = random.Random(seed)
    return [generate_sentence(rng, f"syn-{seed}-{i}") for i in range(n)]


def standard_splits(
    seed: int = 7, sizes: Sequence[int] = (500, 100, 100)
) -> tuple[list[Sentence], list[Sentence], list[Sentence]]:
    """Train/dev/test from disjoint generator streams."""
    train, dev, test = (generate_corpus(sz, seed + off) for off, sz in enumerate(sizes))
    return train, dev, test
