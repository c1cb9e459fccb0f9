"""Constrained decoding: merge per-role BIO lattices, argmax, extract spans.

Per-role tag distributions are merged into one global tag set
T_p = R_p x {B,I} x {N,R,C} u {O}: role-tag scores are copied verbatim from
the per-role distributions and the single merged O score is the product of
the per-role O probabilities. One tag per token then guarantees extracted
spans never overlap. Scores are compared in log space (the O column becomes
a sum of per-role logs), which avoids underflow for large R_p without ever
changing an argmax decision; ties fall to the lowest column, and the column
layout encodes the documented tie order: roles in lattice order, B before I,
N before R before C, O last.
"""
from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .corpus import Argument
from .errors import ContractError
from .frames import RoleLabel
from .scoring.contracts import O_INDEX, TAGS, validate_tag_distribution

_ROLE_TAGS = TAGS[:O_INDEX]  # B-N, B-R, B-C, I-N, I-R, I-C


@dataclass(frozen=True)
class GlobalTag:
    """Either the shared O tag (all fields None) or (role, B/I, N/R/C)."""

    role: str | None = None
    bi: str | None = None
    prefix: str | None = None

    @property
    def is_o(self) -> bool:
        return self.role is None

    def render(self) -> str:
        return "O" if self.is_o else f"{self.role}-{self.bi}-{self.prefix}"


O_TAG = GlobalTag()


@dataclass(frozen=True)
class MergedLattice:
    """Token-by-tag score grid over T_p; column count is 6*|R_p| + 1."""

    roles: tuple[str, ...]
    scores: np.ndarray      # (n, 6k+1), raw probabilities per Eq. 6/7
    log_scores: np.ndarray  # same shape; O column is the sum of per-role logs

    @property
    def n_tokens(self) -> int:
        return int(self.scores.shape[0])

    def tag_of_column(self, col: int) -> GlobalTag:
        if col == len(self.roles) * len(_ROLE_TAGS):
            return O_TAG
        role = self.roles[col // len(_ROLE_TAGS)]
        bi, prefix = _ROLE_TAGS[col % len(_ROLE_TAGS)].split("-")
        return GlobalTag(role=role, bi=bi, prefix=prefix)


def merge_lattice(dists: dict[str, np.ndarray]) -> MergedLattice:
    """Merge per-role tag distributions; role order follows the mapping order."""
    if not dists:
        raise ContractError("merge_lattice needs at least one role")
    roles = tuple(dists)
    lengths = {np.asarray(d).shape[0] for d in dists.values()}
    if len(lengths) != 1:
        raise ContractError(f"per-role distributions disagree on length: {sorted(lengths)}")
    n = lengths.pop()
    checked = {r: validate_tag_distribution(d, n) for r, d in dists.items()}

    k = len(roles)
    width = len(_ROLE_TAGS)
    scores = np.empty((n, width * k + 1))
    log_scores = np.empty_like(scores)
    with np.errstate(divide="ignore"):  # log(0) -> -inf is the intended value
        for r_idx, role in enumerate(roles):
            block = checked[role][:, :width]
            scores[:, r_idx * width:(r_idx + 1) * width] = block
            log_scores[:, r_idx * width:(r_idx + 1) * width] = np.log(block)
        o_cols = np.stack([checked[role][:, O_INDEX] for role in roles], axis=1)
        scores[:, -1] = o_cols.prod(axis=1)
        log_scores[:, -1] = np.log(o_cols).sum(axis=1)
    return MergedLattice(roles=roles, scores=scores, log_scores=log_scores)


def decode(lat: MergedLattice) -> list[GlobalTag]:
    """Per-token argmax over T_p in log space; first column wins exact ties."""
    cols = np.argmax(lat.log_scores, axis=1)
    return [lat.tag_of_column(int(c)) for c in cols]


def extract_spans(tags: list[GlobalTag]) -> list[Argument]:
    """Turn the global tag sequence into labeled spans.

    A run of B, I... tags agreeing on (role, prefix) is one span. An I tag
    that does not continue the immediately preceding tag opens a new span,
    the standard orphan-I repair.
    """
    spans: list[Argument] = []
    open_key: tuple[str, str] | None = None
    start = 0
    for j, tag in enumerate(tags):
        if tag.is_o:
            if open_key is not None:
                spans.append(_make_span(start, j - 1, open_key))
                open_key = None
            continue
        key = (tag.role, tag.prefix)
        if tag.bi == "I" and open_key == key:
            continue
        if open_key is not None:
            spans.append(_make_span(start, j - 1, open_key))
        open_key = key
        start = j
    if open_key is not None:
        spans.append(_make_span(start, len(tags) - 1, open_key))
    return spans


def _make_span(start: int, end: int, key: tuple[str, str]) -> Argument:
    role, prefix = key
    return Argument(start=start, end=end, role=RoleLabel(base=role, prefix=prefix).render())


def args_to_role_tags(args, n_tokens: int, role: str) -> np.ndarray:
    """Per-role tag indices (into TAGS) encoding the given spans; the inverse
    direction of extract_spans for one role's lane."""
    out = np.full(n_tokens, O_INDEX, dtype=np.int64)
    for a in args:
        label = a.label
        if label.base != role:
            continue
        out[a.start] = TAGS.index(f"B-{label.prefix}")
        out[a.start + 1:a.end + 1] = TAGS.index(f"I-{label.prefix}")
    return out


def args_to_global_tags(args, n_tokens: int) -> list[GlobalTag]:
    """Global tag sequence encoding a non-overlapping span set."""
    tags: list[GlobalTag] = [O_TAG] * n_tokens
    for a in args:
        label = a.label
        tags[a.start] = GlobalTag(role=label.base, bi="B", prefix=label.prefix)
        for t in range(a.start + 1, a.end + 1):
            tags[t] = GlobalTag(role=label.base, bi="I", prefix=label.prefix)
    return tags


def lattice_to_debug_json(lat: MergedLattice) -> dict:
    """Plain-data dump of a lattice for fixtures and debugging."""
    return {
        "roles": list(lat.roles),
        "columns": [lat.tag_of_column(c).render() for c in range(lat.scores.shape[1])],
        "scores": [[float(x) for x in row] for row in lat.scores],
    }
