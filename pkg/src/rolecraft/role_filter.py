"""Candidate role prediction via global top-floor(lambda*N) selection.

Every (predicate, role) pair in the dataset is scored once; the kept set is
the globally highest-scoring prefix of size floor(lambda*N), not a per-sentence
cut. Ties at the cutoff fall to the earlier predicate, then the earlier role
in universe order. A fixed-threshold mode is available as an alternative
budget rule.
"""
from __future__ import annotations

import logging
import math
from dataclasses import dataclass
from typing import Sequence

from .corpus import PredicateInstance
from .errors import ConfigError
from .queries import mark_predicate
from .scoring.contracts import RoleScoreRequest, ScorerHandle

log = logging.getLogger(__name__)

# floor() guard: 4.2 * 10 is 41.999... in floats and must still floor to 42.
_FLOOR_EPS = 1e-9


@dataclass(frozen=True)
class LambdaReport:
    """Bookkeeping for one selection run; lambda and speedup are None in
    threshold mode."""

    lambda_: float | None
    threshold: float | None
    n_predicates: int
    universe_size: int
    kept_pairs: int
    recall: float
    speedup: float | None

    def to_json(self) -> dict:
        return {
            "lambda": self.lambda_,
            "threshold": self.threshold,
            "n_predicates": self.n_predicates,
            "universe_size": self.universe_size,
            "kept_pairs": self.kept_pairs,
            "recall": self.recall,
            "speedup": self.speedup,
        }


def budget_for(lam: float, n_predicates: int) -> int:
    return int(math.floor(lam * n_predicates + _FLOOR_EPS))


def speedup_for(universe_size: int, lam: float) -> float:
    """Scoring-work ratio |R| / lambda: queries per predicate without
    filtering over the average kept per predicate."""
    return universe_size / lam


def score_all_roles(
    h: ScorerHandle,
    instances: Sequence[PredicateInstance],
    role_universe: Sequence[str],
) -> list[dict[str, float]]:
    """One role-presence map per instance, in instance order."""
    universe = tuple(role_universe)
    reqs = [
        RoleScoreRequest(tokens=tuple(mark_predicate(inst).tokens), roles=universe)
        for inst in instances
    ]
    return h.score_role_batch(reqs)


def _ranked_pairs(
    scores: Sequence[dict[str, float]], universe: Sequence[str]
) -> list[tuple[float, int, int]]:
    """All (score, predicate index, role index) pairs, best first; ties by
    (predicate order, role order)."""
    entries = [
        (scores[i][role], i, r)
        for i in range(len(scores))
        for r, role in enumerate(universe)
    ]
    entries.sort(key=lambda e: (-e[0], e[1], e[2]))
    return entries


def _gold_pairs(instances: Sequence[PredicateInstance]) -> set[tuple[int, str]]:
    return {
        (i, a.label.base) for i, inst in enumerate(instances) for a in inst.gold_args
    }


def _assemble(
    kept: list[tuple[float, int, int]],
    instances: Sequence[PredicateInstance],
    universe: Sequence[str],
) -> list[tuple[str, ...]]:
    by_pred: list[set[int]] = [set() for _ in instances]
    for _, i, r in kept:
        by_pred[i].add(r)
    return [tuple(universe[r] for r in sorted(rs)) for rs in by_pred]


def _recall(
    kept_sets: list[tuple[str, ...]], instances: Sequence[PredicateInstance]
) -> float:
    gold = _gold_pairs(instances)
    if not gold:
        return 1.0
    covered = sum(1 for i, base in gold if base in kept_sets[i])
    return covered / len(gold)


def filter_roles(
    h: ScorerHandle,
    instances: Sequence[PredicateInstance],
    role_universe: Sequence[str],
    lam: float,
) -> tuple[list[tuple[str, ...]], LambdaReport]:
    """Keep the top floor(lambda*N) pairs dataset-wide.

    Returns per-instance role tuples (universe order, possibly empty) plus the
    selection report. Recall is measured against gold (predicate, role) pairs
    and is 1.0 vacuously when the corpus carries no gold arguments.
    """
    if lam <= 0:
        raise ConfigError(f"lambda must be positive, got {lam!r}")
    universe = tuple(role_universe)
    scores = score_all_roles(h, instances, universe)
    return select_from_scores(scores, instances, universe, lam)


def select_from_scores(
    scores: Sequence[dict[str, float]],
    instances: Sequence[PredicateInstance],
    universe: Sequence[str],
    lam: float,
) -> tuple[list[tuple[str, ...]], LambdaReport]:
    """The selection half of filter_roles, reusable once scores exist."""
    n = len(instances)
    budget = budget_for(lam, n)
    kept = _ranked_pairs(scores, universe)[:budget]
    kept_sets = _assemble(kept, instances, universe)
    report = LambdaReport(
        lambda_=lam,
        threshold=None,
        n_predicates=n,
        universe_size=len(universe),
        kept_pairs=len(kept),
        recall=_recall(kept_sets, instances),
        speedup=speedup_for(len(universe), lam),
    )
    return kept_sets, report


def filter_roles_threshold(
    h: ScorerHandle,
    instances: Sequence[PredicateInstance],
    role_universe: Sequence[str],
    threshold: float,
) -> tuple[list[tuple[str, ...]], LambdaReport]:
    """Fixed-threshold alternative: keep every pair scoring >= threshold."""
    universe = tuple(role_universe)
    scores = score_all_roles(h, instances, universe)
    return select_threshold_from_scores(scores, instances, universe, threshold)


def select_threshold_from_scores(
    scores: Sequence[dict[str, float]],
    instances: Sequence[PredicateInstance],
    universe: Sequence[str],
    threshold: float,
) -> tuple[list[tuple[str, ...]], LambdaReport]:
    if not 0.0 <= threshold <= 1.0:
        raise ConfigError(f"threshold must be in [0, 1], got {threshold!r}")
    kept = [e for e in _ranked_pairs(scores, universe) if e[0] >= threshold]
    kept_sets = _assemble(kept, instances, universe)
    report = LambdaReport(
        lambda_=None,
        threshold=threshold,
        n_predicates=len(instances),
        universe_size=len(universe),
        kept_pairs=len(kept),
        recall=_recall(kept_sets, instances),
        speedup=None,
    )
    return kept_sets, report


def lambda_grid(universe_size: int, step: float = 0.1) -> list[float]:
    """Grid from one step up to the universe size inclusive."""
    if step <= 0:
        raise ConfigError(f"grid step must be positive, got {step!r}")
    grid: list[float] = []
    k = 1
    while True:
        v = round(step * k, 10)
        if v >= universe_size - _FLOOR_EPS:
            break
        grid.append(v)
        k += 1
    grid.append(float(universe_size))
    return grid


def tune_lambda(
    h: ScorerHandle,
    instances: Sequence[PredicateInstance],
    role_universe: Sequence[str],
    target_recall: float,
    grid_step: float = 0.1,
) -> float:
    """Smallest grid lambda whose selection recall meets the target.

    Scoring happens once; the sweep reuses the ranked pair list. When no grid
    value reaches the target the full universe size is returned with a
    warning, keeping everything.
    """
    universe = tuple(role_universe)
    scores = score_all_roles(h, instances, universe)
    return tune_from_scores(scores, instances, universe, target_recall, grid_step)


def tune_from_scores(
    scores,
    instances: Sequence[PredicateInstance],
    role_universe: Sequence[str],
    target_recall: float,
    grid_step: float = 0.1,
) -> float:
    """Sweep the lambda grid over already-computed role scores."""
    if not 0 <= target_recall <= 1:
        raise ConfigError(f"target recall must be in [0, 1], got {target_recall!r}")
    universe = tuple(role_universe)
    ranked = _ranked_pairs(scores, universe)
    gold = _gold_pairs(instances)
    n = len(instances)

    # covered[b] = gold pairs hit within the first b ranked pairs
    covered = [0] * (len(ranked) + 1)
    seen = 0
    for b, (_, i, r) in enumerate(ranked, start=1):
        if (i, universe[r]) in gold:
            seen += 1
        covered[b] = seen

    total = len(gold)
    for lam in lambda_grid(len(universe), grid_step):
        budget = min(budget_for(lam, n), len(ranked))
        recall = covered[budget] / total if total else 1.0
        if recall >= target_recall:
            return lam
    log.warning(
        "no lambda on the grid reaches recall %.3f; keeping the full universe "
        "(lambda = %d)", target_recall, len(universe),
    )
    return float(len(universe))
