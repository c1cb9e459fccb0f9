"""Readers for the query datasets exported by `rolecraft dump-queries`
and for the kept-role payloads written by `rolecraft filter-roles`.

Each exported record carries the marked tokens, the sense question with its
options, one question per candidate role, and gold BIO tag lanes for the
roles that actually have arguments.
"""

from __future__ import annotations

import json
import random
from dataclasses import dataclass
from pathlib import Path

from bridge.errors import BridgeError

TAGS = ("B-N", "B-R", "B-C", "I-N", "I-R", "I-C", "O")
TAG_INDEX = {t: i for i, t in enumerate(TAGS)}


@dataclass(frozen=True)
class QueryRecord:
    sent_id: str
    pred_index: int
    tokens: tuple[str, ...]
    sense_options: tuple[tuple[str, str], ...]  # (sense_id, option text)
    gold_sense: str | None
    role_queries: dict[str, str]
    bio_lanes: tuple[tuple[str, str, tuple[str, ...]], ...]  # (role, query, tags)


def read_query_records(path: str | Path) -> list[QueryRecord]:
    try:
        lines = Path(path).read_text(encoding="utf-8").splitlines()
    except OSError as exc:
        raise BridgeError(f"cannot read {path}: {exc}") from exc
    records = []
    for lineno, line in enumerate(lines, 1):
        if not line.strip():
            continue
        try:
            raw = json.loads(line)
            records.append(QueryRecord(
                sent_id=str(raw["sent_id"]),
                pred_index=int(raw["pred_index"]),
                tokens=tuple(raw["tokens"]),
                sense_options=tuple(
                    (o["sense_id"], o["text"]) for o in raw["sense_options"]
                ),
                gold_sense=raw.get("gold_sense"),
                role_queries=dict(raw["role_queries"]),
                bio_lanes=tuple(
                    (b["role"], b["query"], tuple(b["tags"])) for b in raw["bio"]
                ),
            ))
        except (json.JSONDecodeError, KeyError, TypeError, ValueError) as exc:
            raise BridgeError(f"{path}:{lineno}: bad query record: {exc}") from exc
    return records


def read_role_sets(path: str | Path) -> dict[tuple[str, int], set[str]]:
    """Kept (predicate, role) pairs from a filter-roles payload."""
    try:
        raw = json.loads(Path(path).read_text(encoding="utf-8"))
        out = {}
        for entry in raw["role_sets"]:
            key = (str(entry["sent_id"]), int(entry["pred_index"]))
            out[key] = set(entry["roles"])
        return out
    except (OSError, json.JSONDecodeError, KeyError, TypeError, ValueError) as exc:
        raise BridgeError(f"cannot read role sets {path}: {exc}") from exc


def sense_examples(records: list[QueryRecord]) -> list[tuple[tuple[str, ...], str, int]]:
    """(tokens, option text, label); records without gold senses are skipped."""
    out = []
    for rec in records:
        if rec.gold_sense is None:
            continue
        for sense_id, text in rec.sense_options:
            out.append((rec.tokens, text, int(sense_id == rec.gold_sense)))
    return out


def role_examples(records: list[QueryRecord]) -> list[tuple[tuple[str, ...], dict[str, int]]]:
    """(tokens, {role: present}) over each record's candidate roles."""
    out = []
    for rec in records:
        if rec.gold_sense is None:
            continue
        present = {role for role, _, _ in rec.bio_lanes}
        out.append((rec.tokens, {r: int(r in present) for r in rec.role_queries}))
    return out


def bio_examples(
    records: list[QueryRecord],
    role_sets: dict[tuple[str, int], set[str]] | None = None,
    negatives: int = 2,
    seed: int = 0,
) -> list[tuple[tuple[str, ...], str, tuple[str, ...]]]:
    """(tokens, query, gold tags) lanes for tagging-head training.

    Gold lanes are always included. All-O lanes teach the model to answer
    "no argument": with role_sets (a filter-roles payload) every kept role
    without a gold lane contributes one, mirroring training under the
    role stage's own predictions; otherwise `negatives` per record are
    sampled deterministically from the remaining candidate roles.
    """
    out = []
    rng = random.Random(seed)
    for rec in records:
        if rec.gold_sense is None:
            continue
        n_words = len(rec.tokens) - sum(t in ("<p>", "</p>") for t in rec.tokens)
        all_o = ("O",) * n_words
        gold_roles = set()
        for role, query, tags in rec.bio_lanes:
            gold_roles.add(role)
            out.append((rec.tokens, query, tags))
        if role_sets is not None:
            kept = role_sets.get((rec.sent_id, rec.pred_index), set())
            extras = sorted(kept - gold_roles)
        else:
            pool = sorted(set(rec.role_queries) - gold_roles)
            rng.shuffle(pool)
            extras = pool[:negatives]
        for role in extras:
            if role in rec.role_queries:
                out.append((rec.tokens, rec.role_queries[role], all_o))
    return out


def check_tags(tags: tuple[str, ...], where: str) -> None:
    bad = [t for t in tags if t not in TAG_INDEX]
    if bad:
        raise BridgeError(f"{where}: unknown tags {bad[:3]}")
