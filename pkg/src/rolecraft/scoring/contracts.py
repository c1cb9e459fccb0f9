"""Scoring contracts shared by every scorer implementation.

Three request kinds cover the pipeline's needs: a confidence for one sense
option, a per-role presence probability map, and a per-token distribution over
the 7 BIO tags. All requests carry the marked token sequence (original tokens
plus one `<p>` `</p>` pair). Outputs are validated here, at the boundary, so
the guarantees hold no matter which scorer produced them.
"""
from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from ..corpus import PREDICATE_MARKERS
from ..errors import ContractError

# Per-role tag order. The first six entries double as the merged decoder's
# within-role column order, so argmax's first-hit behavior is the documented
# tie-break (B before I, N before R before C, O last).
TAGS = ("B-N", "B-R", "B-C", "I-N", "I-R", "I-C", "O")
O_INDEX = TAGS.index("O")
ROW_SUM_TOL = 1e-6
_EPS = 1e-9


def _check_marked(tokens: tuple[str, ...]) -> int:
    """Validate the single marker pair; return the unmarked token count."""
    open_m, close_m = PREDICATE_MARKERS
    if tokens.count(open_m) != 1 or tokens.count(close_m) != 1:
        raise ContractError("request tokens must contain exactly one marker pair")
    i = tokens.index(open_m)
    if tokens.index(close_m) != i + 2:
        raise ContractError("markers must surround exactly one predicate token")
    return len(tokens) - 2


@dataclass(frozen=True)
class SenseScoreRequest:
    tokens: tuple[str, ...]
    option_text: str

    def __post_init__(self) -> None:
        _check_marked(self.tokens)
        if not self.option_text:
            raise ContractError("empty sense option text")


@dataclass(frozen=True)
class RoleScoreRequest:
    tokens: tuple[str, ...]
    roles: tuple[str, ...]

    def __post_init__(self) -> None:
        _check_marked(self.tokens)
        if not self.roles or len(set(self.roles)) != len(self.roles):
            raise ContractError("role universe must be non-empty and duplicate-free")


@dataclass(frozen=True)
class BioScoreRequest:
    tokens: tuple[str, ...]
    query_text: str
    role: str  # base role name; bookkeeping only, scorers see the query

    def __post_init__(self) -> None:
        _check_marked(self.tokens)
        if not self.query_text:
            raise ContractError("empty query text")

    @property
    def n_words(self) -> int:
        return len(self.tokens) - 2


def validate_probability(value: float, what: str = "score") -> float:
    try:
        score = float(value)
    except (TypeError, ValueError):
        raise ContractError(f"{what} is not a number: {value!r}") from None
    if not np.isfinite(score) or score < -_EPS or score > 1.0 + _EPS:
        raise ContractError(f"{what} {score!r} outside [0, 1]")
    return min(max(score, 0.0), 1.0)


def validate_tag_distribution(rows, n_words: int) -> np.ndarray:
    """Check and return a (n_words, 7) tag distribution.

    Rows must sum to 1 within 1e-6 with entries in [0, 1]; tiny float noise
    from serialization is clipped.
    """
    arr = np.asarray(rows, dtype=np.float64)
    if arr.ndim != 2 or arr.shape[1] != len(TAGS):
        raise ContractError(f"tag distribution must be (n, {len(TAGS)}), got {arr.shape}")
    if arr.shape[0] != n_words:
        raise ContractError(
            f"tag distribution has {arr.shape[0]} rows for a {n_words}-token sentence"
        )
    if not np.all(np.isfinite(arr)):
        raise ContractError("tag distribution contains non-finite values")
    if arr.min() < -_EPS or arr.max() > 1.0 + _EPS:
        raise ContractError("tag distribution entries outside [0, 1]")
    sums = arr.sum(axis=1)
    bad = np.abs(sums - 1.0) > ROW_SUM_TOL
    if bad.any():
        j = int(np.argmax(bad))
        raise ContractError(f"tag distribution row {j} sums to {sums[j]!r}, not 1")
    return np.clip(arr, 0.0, 1.0)


class ScorerHandle:
    """Base scorer interface. Public methods validate both sides of the call;
    implementations override the underscore hooks."""

    def score_sense_option(self, req: SenseScoreRequest) -> float:
        return validate_probability(self._sense(req), "sense score")

    def score_role_presence(self, req: RoleScoreRequest) -> dict[str, float]:
        raw = self._roles(req)
        if set(raw) != set(req.roles):
            raise ContractError(
                f"role score map keys {sorted(raw)} do not match requested roles"
            )
        return {r: validate_probability(raw[r], f"role score for {r}") for r in req.roles}

    def score_bio(self, req: BioScoreRequest) -> np.ndarray:
        return validate_tag_distribution(self._bio(req), req.n_words)

    # Batch forms; external scorers override these to pipeline requests.
    def score_sense_batch(self, reqs: list[SenseScoreRequest]) -> list[float]:
        return [self.score_sense_option(r) for r in reqs]

    def score_role_batch(self, reqs: list[RoleScoreRequest]) -> list[dict[str, float]]:
        return [self.score_role_presence(r) for r in reqs]

    def score_bio_batch(self, reqs: list[BioScoreRequest]) -> list[np.ndarray]:
        return [self.score_bio(r) for r in reqs]

    def _sense(self, req: SenseScoreRequest) -> float:
        raise NotImplementedError

    def _roles(self, req: RoleScoreRequest) -> dict[str, float]:
        raise NotImplementedError

    def _bio(self, req: BioScoreRequest):
        raise NotImplementedError

    def close(self) -> None:
        pass

    def __enter__(self) -> "ScorerHandle":
        return self

    def __exit__(self, *exc) -> None:
        self.close()
