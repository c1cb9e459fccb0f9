"""Deterministic fixture corpus whose argument roles depend on long-range
context.

Every sentence routes two nouns; which noun is the sender (A0) and which
the thing sent (A1) is flipped by the opening time word, several tokens
away from both noun positions. A tagger limited to a one-word window
around each position cannot separate the two roles here, while an encoder
that reads the whole sentence can. Noun choices are balanced against the
flip so the words themselves carry no signal.
"""

from __future__ import annotations

import json
import random
from pathlib import Path

NOUNS = ["cargo", "mail", "grain", "timber", "fuel", "gear",
         "steel", "cloth", "fruit", "tools", "glass", "paper"]
TEAMS = ["team", "crew", "unit"]
ADVERBS = [None, "quickly", "carefully"]
FLIP = {"today": ("A0", "A1"), "tonight": ("A1", "A0")}
TAILS = [None, ("at", "dawn"), ("at", "dusk")]

FRAMES = [{
    "lemma": "route",
    "senses": [
        {"id": "route.01", "description": "send along a path",
         "roles": {"A0": "sender", "A1": "thing sent"}},
        {"id": "route.02", "description": "plot a course on a map",
         "roles": {"A0": "plotter", "A1": "course plotted"}},
    ],
}]


def build_sentences(n: int, seed: int) -> list[dict]:
    rng = random.Random(seed)
    out = []
    for i in range(n):
        ctx = "today" if i % 2 == 0 else "tonight"
        tokens = [ctx, "the", rng.choice(TEAMS)]
        adverb = rng.choice(ADVERBS)
        if adverb:
            tokens.append(adverb)
        p = len(tokens)
        n1, n2 = rng.sample(NOUNS, 2)
        tokens += ["routed", "the", n1, "toward", "the", n2]
        r1, r2 = FLIP[ctx]
        args = [
            {"start": p + 2, "end": p + 2, "role": r1},
            {"start": p + 5, "end": p + 5, "role": r2},
        ]
        tail = rng.choice(TAILS)
        if tail:
            args.append({"start": len(tokens), "end": len(tokens) + 1, "role": "TMP"})
            tokens += list(tail)
        out.append({
            "id": f"fx{i}",
            "tokens": tokens,
            "predicates": [
                {"index": p, "lemma": "route", "sense": "route.01", "args": args}
            ],
        })
    return out


def write_fixture(dirpath: str | Path, train: int = 400, test: int = 100,
                  seed: int = 11) -> dict[str, Path]:
    """Write train/test splits plus the frame inventory; returns the paths."""
    d = Path(dirpath)
    d.mkdir(parents=True, exist_ok=True)
    paths = {
        "train": d / "train.jsonl",
        "test": d / "test.jsonl",
        "frames": d / "frames.jsonl",
    }
    splits = {
        "train": build_sentences(train, seed),
        "test": build_sentences(test, seed + 1),
    }
    for name, sentences in splits.items():
        with open(paths[name], "w", encoding="utf-8") as fh:
            for record in sentences:
                fh.write(json.dumps(record) + "\n")
    with open(paths["frames"], "w", encoding="utf-8") as fh:
        for record in FRAMES:
            fh.write(json.dumps(record) + "\n")
    return paths
