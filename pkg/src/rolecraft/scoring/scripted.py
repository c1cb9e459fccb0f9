"""Table-driven scorer for fixtures, worked examples, and protocol tests.

A script declares the answers outright: sense scores keyed by option text,
one presence score per role, and BIO row blocks selected by query substring.
Anything not covered falls back to the untrained defaults (0.5 and uniform),
so a script only pins down what a fixture cares about.

Script JSON shape:
    {
      "sense": {"push, cause motion": 0.8},
      "sense_default": 0.1,
      "roles": {"A1": 0.9, "TMP": 0.7},
      "role_default": 0.5,
      "bio": [{"query_contains": "A1", "rows": [[...7 floats...], ...]}]
    }
"""
from __future__ import annotations

import json
from pathlib import Path
from typing import Sequence

import numpy as np

from ..errors import ConfigError
from .contracts import (
    TAGS,
    BioScoreRequest,
    RoleScoreRequest,
    ScorerHandle,
    SenseScoreRequest,
)


def uniform_rows(n: int) -> np.ndarray:
    return np.full((n, len(TAGS)), 1.0 / len(TAGS))


class ScriptedScorer(ScorerHandle):
    def __init__(
        self,
        sense: dict[str, float] | None = None,
        roles: dict[str, float] | None = None,
        bio: Sequence[tuple[str, np.ndarray]] = (),
        sense_default: float = 0.5,
        role_default: float = 0.5,
    ):
        self.sense = dict(sense or {})
        self.roles = dict(roles or {})
        self.bio = [(key, np.asarray(rows, dtype=np.float64)) for key, rows in bio]
        self.sense_default = sense_default
        self.role_default = role_default

    @classmethod
    def from_file(cls, path: str | Path) -> "ScriptedScorer":
        try:
            raw = json.loads(Path(path).read_text(encoding="utf-8"))
        except (OSError, json.JSONDecodeError) as exc:
            raise ConfigError(f"cannot read scorer script {path}: {exc}") from exc
        try:
            bio = [(e["query_contains"], e["rows"]) for e in raw.get("bio", ())]
            return cls(
                sense=raw.get("sense"),
                roles=raw.get("roles"),
                bio=bio,
                sense_default=raw.get("sense_default", 0.5),
                role_default=raw.get("role_default", 0.5),
            )
        except (KeyError, TypeError) as exc:
            raise ConfigError(f"bad scorer script {path}: {exc}") from exc

    def _sense(self, req: SenseScoreRequest) -> float:
        return self.sense.get(req.option_text, self.sense_default)

    def _roles(self, req: RoleScoreRequest) -> dict[str, float]:
        return {r: self.roles.get(r, self.role_default) for r in req.roles}

    def _bio(self, req: BioScoreRequest) -> np.ndarray:
        for key, rows in self.bio:
            if key in req.query_text:
                return rows
        return uniform_rows(req.n_words)
