"""Independent oracles the test suite checks the library against.

Everything here is written from the documented behavior alone, in plain
Python, and deliberately avoids sharing code paths with the package: the
decoder oracle enumerates tags per token, the selection oracle fully sorts,
the edit-distance oracle is the memoized recursion, and the counting oracle
tallies sets by hand.
"""
from __future__ import annotations

import math
from fractions import Fraction
from functools import lru_cache

ROLE_TAGS = ("B-N", "B-R", "B-C", "I-N", "I-R", "I-C")


def brute_force_decode(dists: dict[str, list[list[float]]]) -> list[str]:
    """Per-token argmax over the merged tag set, straight from the rules.

    Candidates are enumerated in the documented priority order: roles in
    lattice order, each role's six tags in B-before-I, N/R/C order, the
    shared O tag last. Comparison happens on log scores, the O candidate
    being the sum of the per-role log O values; the first maximum wins.
    """
    roles = list(dists)
    n = len(next(iter(dists.values())))
    out = []
    for t in range(n):
        candidates: list[tuple[str, float]] = []
        for role in roles:
            row = dists[role][t]
            for j, tag in enumerate(ROLE_TAGS):
                candidates.append((f"{role}-{tag}", math.log(row[j]) if row[j] > 0 else -math.inf))
        o_key = sum(
            math.log(dists[role][t][6]) if dists[role][t][6] > 0 else -math.inf
            for role in roles
        )
        candidates.append(("O", o_key))
        best = max(c[1] for c in candidates)
        out.append(next(name for name, key in candidates if key == best))
    return out


def exact_decode_fraction(dists: dict[str, list[list[float]]]) -> list[str]:
    """Same argmax computed in exact rational arithmetic (no logs at all)."""
    roles = list(dists)
    n = len(next(iter(dists.values())))
    out = []
    for t in range(n):
        candidates: list[tuple[str, Fraction]] = []
        for role in roles:
            row = dists[role][t]
            for j, tag in enumerate(ROLE_TAGS):
                candidates.append((f"{role}-{tag}", Fraction(row[j])))
        o_val = Fraction(1)
        for role in roles:
            o_val *= Fraction(dists[role][t][6])
        candidates.append(("O", o_val))
        best = max(c[1] for c in candidates)
        out.append(next(name for name, key in candidates if key == best))
    return out


def spans_from_tags(tags: list[str]) -> list[tuple[int, int, str]]:
    """Reference span extraction with orphan-I repair, over rendered tags."""
    spans: list[tuple[int, int, str]] = []
    open_span = None  # (start, role, prefix)
    for t, tag in enumerate(tags):
        if tag == "O":
            if open_span:
                spans.append(_close(open_span, t - 1))
                open_span = None
            continue
        role, bi, prefix = tag.rsplit("-", 2)
        if bi == "I" and open_span and open_span[1:] == (role, prefix):
            continue
        if open_span:
            spans.append(_close(open_span, t - 1))
        open_span = (t, role, prefix)
    if open_span:
        spans.append(_close(open_span, len(tags) - 1))
    return spans


def _close(open_span, end):
    start, role, prefix = open_span
    label = role if prefix == "N" else f"{prefix}-{role}"
    return (start, end, label)


def overlaps(spans: list[tuple[int, int, str]]) -> bool:
    taken: set[int] = set()
    for start, end, _ in spans:
        for t in range(start, end + 1):
            if t in taken:
                return True
            taken.add(t)
    return False


def select_oracle(
    scores: list[dict[str, float]], universe: tuple[str, ...], lam: float
) -> list[tuple[str, ...]]:
    """Full-sort global top-floor(lam*N) selection."""
    n = len(scores)
    budget = math.floor(lam * n + 1e-9)
    triples = [
        (-scores[i][role], i, j)
        for i in range(n)
        for j, role in enumerate(universe)
    ]
    triples.sort()
    kept: set[tuple[int, int]] = {(i, j) for _, i, j in triples[:budget]}
    return [
        tuple(role for j, role in enumerate(universe) if (i, j) in kept)
        for i in range(n)
    ]


def recall_oracle(
    kept: list[tuple[str, ...]], gold: list[set[str]]
) -> float:
    total = sum(len(g) for g in gold)
    if total == 0:
        return 1.0
    hit = sum(len(set(k) & g) for k, g in zip(kept, gold))
    return hit / total


def grid_oracle(universe_size: int, step: float) -> list[float]:
    grid = []
    k = 1
    while round(step * k, 10) < universe_size - 1e-9:
        grid.append(round(step * k, 10))
        k += 1
    grid.append(float(universe_size))
    return grid


def tune_oracle(
    scores: list[dict[str, float]],
    universe: tuple[str, ...],
    gold: list[set[str]],
    target: float,
    step: float = 0.1,
) -> float:
    """Exhaustive sweep: run the full selection oracle at every grid value."""
    for lam in grid_oracle(len(universe), step):
        if recall_oracle(select_oracle(scores, universe, lam), gold) >= target:
            return lam
    return float(len(universe))


def edit_distance_oracle(a: str, b: str) -> int:
    @lru_cache(maxsize=None)
    def go(i: int, j: int) -> int:
        if i == len(a):
            return len(b) - j
        if j == len(b):
            return len(a) - i
        if a[i] == b[j]:
            return go(i + 1, j + 1)
        return 1 + min(go(i + 1, j), go(i, j + 1), go(i + 1, j + 1))

    return go(0, 0)


def prf_oracle(gold: list[set], pred: list[set]) -> tuple[float, float, float]:
    matched = sum(len(g & p) for g, p in zip(gold, pred))
    n_pred = sum(len(p) for p in pred)
    n_gold = sum(len(g) for g in gold)
    precision = matched / n_pred if n_pred else 0.0
    recall = matched / n_gold if n_gold else 0.0
    f1 = (
        2 * precision * recall / (precision + recall)
        if precision + recall
        else 0.0
    )
    return precision, recall, f1


def random_rows(rng, n_tokens: int, quantized: bool = True):
    """Random per-token distributions over the seven tags.

    Quantized mode draws small integers and normalizes, which makes exact
    float ties between columns common; continuous mode uses uniforms.
    """
    rows = []
    for _ in range(n_tokens):
        if quantized:
            raw = [rng.randint(1, 6) for _ in range(7)]
        else:
            raw = [rng.random() + 1e-3 for _ in range(7)]
        s = sum(raw)
        rows.append([v / s for v in raw])
    return rows


def random_lattice(rng, n_tokens: int, n_roles: int, quantized: bool = True):
    roles = [f"R{j}" for j in range(n_roles)]
    return {r: random_rows(rng, n_tokens, quantized) for r in roles}
