"""Built-in trainable scorer: a linear model over hashed sparse features.

One weight bundle carries up to three heads (sense, role presence, BIO), each
trained separately with plain SGD. Untrained heads behave exactly like
zero-initialized ones: sigmoid heads answer 0.5, the BIO head answers the
uniform distribution. Feature hashing uses crc32, so fixed inputs and seeds
give byte-identical parameters across runs and machines.
"""
from __future__ import annotations

import json
import logging
import zlib
from dataclasses import dataclass, field
from pathlib import Path
from typing import Sequence

import numpy as np

from ..corpus import PREDICATE_MARKERS, PredicateInstance
from ..errors import ConfigError, DataError
from ..frames import FrameInventory, RoleLabel
from ..queries import build_role_query, build_sense_options, mark_predicate
from .contracts import (
    TAGS,
    BioScoreRequest,
    RoleScoreRequest,
    ScorerHandle,
    SenseScoreRequest,
)

log = logging.getLogger(__name__)

DIM = 2 ** 18
MODEL_FORMAT = "rolecraft-reference"
MODEL_VERSION = 1

# Boilerplate shared by every query; filtered out when extracting the
# content words that distinguish one role's query from another's.
_TEMPLATE_WORDS = frozenset(
    "what are the arguments of predicate with meaning modifiers".split()
)


def _h(text: str) -> int:
    return zlib.crc32(text.encode("utf-8")) % DIM


def _sigmoid(z: float) -> float:
    return float(1.0 / (1.0 + np.exp(-np.clip(z, -35.0, 35.0))))


def _softmax(z: np.ndarray) -> np.ndarray:
    e = np.exp(z - z.max())
    return e / e.sum()


def _unmark(tokens: Sequence[str]) -> tuple[list[str], int]:
    """Original tokens plus the unmarked predicate index."""
    open_m, _ = PREDICATE_MARKERS
    pi = list(tokens).index(open_m)
    words = [t for t in tokens if t not in PREDICATE_MARKERS]
    return words, pi


def _query_content(query_text: str) -> list[str]:
    words = [w.strip("?,.").lower() for w in query_text.split()]
    return [w for w in words if w and w not in _TEMPLATE_WORDS]


def sense_features(tokens: Sequence[str], option_text: str) -> np.ndarray:
    """Hashed features for one (marked sentence, sense option) pair."""
    words, pi = _unmark(tokens)
    pred = words[pi]
    opt = [w.strip(",.").lower() for w in option_text.split()]
    feats = ["bias", f"p={pred}"]
    feats += [f"o={w}" for w in opt]
    feats += [f"po={pred}|{w}" for w in opt]
    lowered = [w.lower() for w in words]
    near = [lowered[j] for j in range(max(0, pi - 2), min(len(words), pi + 3)) if j != pi]
    for ow in opt:
        feats += [f"no={c}|{ow}" for c in near]
        feats += [f"to={c}|{ow}" for c in lowered]
    overlap = min(len(set(opt) & set(lowered)), 5)
    feats.append(f"ov={overlap}")
    return np.fromiter((_h(f) for f in feats), dtype=np.int64)


def role_features(tokens: Sequence[str]) -> np.ndarray:
    """Hashed features for one marked sentence; shared across every role head."""
    words, pi = _unmark(tokens)
    pred = words[pi].lower()
    lowered = [w.lower() for w in words]
    feats = ["bias", f"p={pred}"]
    feats += [f"t={w}" for w in lowered]
    feats += [f"pt={pred}|{w}" for w in lowered]
    for d in (-2, -1, 1, 2):
        j = pi + d
        if 0 <= j < len(words):
            feats.append(f"c{d}={lowered[j]}")
    return np.fromiter((_h(f) for f in feats), dtype=np.int64)


def bio_features(tokens: Sequence[str], query_text: str) -> list[np.ndarray]:
    """Per original token, hashed features for the BIO head.

    The query participates only through its text: a hashed query id crossed
    with local context, plus content-word crosses that generalize across
    queries sharing vocabulary.
    """
    words, pi = _unmark(tokens)
    lowered = [w.lower() for w in words]
    qk = zlib.crc32(query_text.encode("utf-8"))
    content = _query_content(query_text)
    qwords = set(content)
    out = []
    for j, w in enumerate(lowered):
        prev = lowered[j - 1] if j > 0 else "^"
        nxt = lowered[j + 1] if j + 1 < len(lowered) else "$"
        d = max(-6, min(6, j - pi))
        inq = int(w in qwords)
        feats = [
            "bias",
            f"w={w}",
            f"prev={prev}",
            f"next={nxt}",
            f"d={d}",
            f"inq={inq}",
            f"q{qk}|w={w}",
            f"q{qk}|prev={prev}",
            f"q{qk}|next={nxt}",
            f"q{qk}|d={d}",
            f"q{qk}|inq={inq}",
            f"q{qk}|wd={w}|{d}",
        ]
        for cw in content:
            feats.append(f"cw={cw}|w={w}")
            feats.append(f"cw={cw}|prev={prev}")
            feats.append(f"cw={cw}|d={d}")
        out.append(np.fromiter((_h(f) for f in feats), dtype=np.int64))
    return out


# ---------------------------------------------------------------------------
# Model container and serialization
# ---------------------------------------------------------------------------

@dataclass
class ReferenceModel:
    dim: int = DIM
    sense_w: np.ndarray | None = None       # (dim,)
    role_names: tuple[str, ...] = ()
    role_w: np.ndarray | None = None        # (dim, len(role_names))
    bio_w: np.ndarray | None = None         # (dim, 7)


def save_model(model: ReferenceModel, path: str | Path) -> None:
    meta = {
        "format": MODEL_FORMAT,
        "version": MODEL_VERSION,
        "dim": model.dim,
        "heads": {
            "sense": model.sense_w is not None,
            "role": model.role_w is not None,
            "bio": model.bio_w is not None,
        },
    }
    empty = np.zeros(0)
    # savez appends ".npz" to bare string paths; an open handle keeps the
    # user's path untouched.
    with open(path, "wb") as fh:
        np.savez_compressed(
            fh,
            meta=np.array(json.dumps(meta)),
            sense_w=model.sense_w if model.sense_w is not None else empty,
            role_names=np.array(model.role_names, dtype=np.str_),
            role_w=model.role_w if model.role_w is not None else empty,
            bio_w=model.bio_w if model.bio_w is not None else empty,
        )


def load_model(path: str | Path) -> ReferenceModel:
    try:
        with np.load(path, allow_pickle=False) as data:
            try:
                meta = json.loads(str(data["meta"]))
            except (KeyError, json.JSONDecodeError) as exc:
                raise DataError(f"{path}: not a reference model file: {exc}") from exc
            if meta.get("format") != MODEL_FORMAT:
                raise DataError(f"{path}: not a reference model file")
            if meta.get("version") != MODEL_VERSION:
                raise DataError(f"{path}: unsupported model version {meta.get('version')}")
            heads = meta.get("heads", {})
            return ReferenceModel(
                dim=int(meta["dim"]),
                sense_w=data["sense_w"] if heads.get("sense") else None,
                role_names=tuple(str(r) for r in data["role_names"]),
                role_w=data["role_w"] if heads.get("role") else None,
                bio_w=data["bio_w"] if heads.get("bio") else None,
            )
    except OSError as exc:
        raise DataError(f"cannot read model {path}: {exc}") from exc
    except (ValueError, KeyError, zlib.error) as exc:
        raise DataError(f"{path}: corrupt model file: {exc}") from exc


class ReferenceScorer(ScorerHandle):
    """In-process scorer over a ReferenceModel; missing heads act zero-initialized."""

    def __init__(self, model: ReferenceModel):
        self.model = model

    @classmethod
    def from_file(cls, path: str | Path) -> "ReferenceScorer":
        return cls(load_model(path))

    def _sense(self, req: SenseScoreRequest) -> float:
        w = self.model.sense_w
        if w is None:
            return 0.5
        idx = sense_features(req.tokens, req.option_text)
        return _sigmoid(float(w[idx].sum()))

    def _roles(self, req: RoleScoreRequest) -> dict[str, float]:
        w = self.model.role_w
        if w is None:
            return {r: 0.5 for r in req.roles}
        idx = role_features(req.tokens)
        logits = w[idx].sum(axis=0)
        by_name = dict(zip(self.model.role_names, logits))
        return {r: _sigmoid(by_name[r]) if r in by_name else 0.5 for r in req.roles}

    def _bio(self, req: BioScoreRequest) -> np.ndarray:
        n = req.n_words
        w = self.model.bio_w
        if w is None:
            return np.full((n, len(TAGS)), 1.0 / len(TAGS))
        rows = np.empty((n, len(TAGS)))
        for j, idx in enumerate(bio_features(req.tokens, req.query_text)):
            rows[j] = _softmax(w[idx].sum(axis=0))
        return rows


# ---------------------------------------------------------------------------
# Training
# ---------------------------------------------------------------------------

@dataclass
class TrainConfig:
    epochs: int = 15
    lr: float = 0.5
    seed: int = 13


@dataclass
class TrainResult:
    model: ReferenceModel
    losses: list[float] = field(default_factory=list)
    uncovered_pairs: int = 0
    skipped: int = 0


STAGES = ("sense", "role", "bio")


def train_reference(
    instances: Sequence[PredicateInstance],
    inv: FrameInventory,
    stage: str,
    hyper: TrainConfig | None = None,
    *,
    model: ReferenceModel | None = None,
    role_universe: Sequence[str] | None = None,
    role_sets: Sequence[Sequence[str]] | None = None,
) -> TrainResult:
    """Train one head with SGD; other heads of ``model`` are kept as-is.

    Stage "bio" requires role_sets (the filtered candidate roles per instance,
    aligned with ``instances``); gold roles outside their instance's set get no
    training signal and are counted as uncovered.
    """
    if stage not in STAGES:
        raise ConfigError(f"unknown training stage {stage!r} (choose from {STAGES})")
    if hyper is None:
        hyper = TrainConfig()
    model = model or ReferenceModel()
    if stage == "sense":
        return _train_sense(instances, inv, hyper, model)
    if stage == "role":
        return _train_role(instances, hyper, model, role_universe)
    return _train_bio(instances, inv, hyper, model, role_sets)


def _bce(p: float, y: float) -> float:
    p = min(max(p, 1e-12), 1.0 - 1e-12)
    return -(y * np.log(p) + (1.0 - y) * np.log(1.0 - p))


def _sgd_epochs(n_examples: int, hyper: TrainConfig, step):
    """Run the shared seeded-shuffle epoch loop; ``step(i) -> loss``."""
    rng = np.random.default_rng(hyper.seed)
    losses = []
    order = np.arange(n_examples)
    for _ in range(hyper.epochs):
        rng.shuffle(order)
        total = 0.0
        for i in order:
            total += step(int(i))
        losses.append(total / n_examples)
    return losses


def _train_sense(instances, inv, hyper, model) -> TrainResult:
    examples: list[tuple[np.ndarray, float]] = []
    skipped = 0
    for inst in instances:
        if inst.gold_sense is None or inst.lemma is None:
            skipped += 1
            continue
        try:
            options = build_sense_options(inv, inst)
        except DataError:
            skipped += 1
            continue
        tokens = tuple(mark_predicate(inst).tokens)
        for opt in options:
            label = 1.0 if opt.sense_id == inst.gold_sense else 0.0
            examples.append((sense_features(tokens, opt.option_text), label))
    if not examples:
        raise ConfigError("no usable sense training examples (gold senses required)")
    w = model.sense_w if model.sense_w is not None else np.zeros(model.dim)
    lr = hyper.lr

    def step(i: int) -> float:
        idx, y = examples[i]
        p = _sigmoid(float(w[idx].sum()))
        np.subtract.at(w, idx, lr * (p - y))
        return _bce(p, y)

    losses = _sgd_epochs(len(examples), hyper, step)
    model.sense_w = w
    return TrainResult(model=model, losses=losses, skipped=skipped)


def _train_role(instances, hyper, model, role_universe) -> TrainResult:
    if role_universe is None:
        role_universe = sorted(
            {a.label.base for inst in instances for a in inst.gold_args}
        )
    names = tuple(role_universe)
    if not names:
        raise ConfigError("empty role universe for role training")
    examples: list[tuple[np.ndarray, np.ndarray]] = []
    for inst in instances:
        tokens = tuple(mark_predicate(inst).tokens)
        present = {a.label.base for a in inst.gold_args}
        y = np.array([1.0 if r in present else 0.0 for r in names])
        examples.append((role_features(tokens), y))
    if not examples:
        raise ConfigError("no role training examples")
    k = len(names)
    if model.role_w is not None and model.role_names == names:
        w = model.role_w
    else:
        w = np.zeros((model.dim, k))
    lr = hyper.lr

    def step(i: int) -> float:
        idx, y = examples[i]
        z = np.clip(w[idx].sum(axis=0), -35.0, 35.0)
        p = 1.0 / (1.0 + np.exp(-z))
        np.subtract.at(w, idx, lr * (p - y))
        pc = np.clip(p, 1e-12, 1.0 - 1e-12)
        return float(-(y * np.log(pc) + (1.0 - y) * np.log(1.0 - pc)).mean())

    losses = _sgd_epochs(len(examples), hyper, step)
    model.role_names = names
    model.role_w = w
    return TrainResult(model=model, losses=losses)


def _train_bio(instances, inv, hyper, model, role_sets) -> TrainResult:
    if role_sets is None:
        raise ConfigError(
            "bio training needs per-instance candidate role sets (run role filtering first)"
        )
    if len(role_sets) != len(instances):
        raise ConfigError(
            f"{len(role_sets)} role sets for {len(instances)} instances"
        )
    examples: list[tuple[list[np.ndarray], np.ndarray]] = []
    uncovered = 0
    skipped = 0
    for inst, roles in zip(instances, role_sets):
        if inst.gold_sense is None:
            skipped += 1
            continue
        tokens = tuple(mark_predicate(inst).tokens)
        n = len(inst.sentence.tokens)
        by_base: dict[str, list] = {}
        for a in inst.gold_args:
            by_base.setdefault(a.label.base, []).append(a)
        uncovered += sum(1 for base in by_base if base not in set(roles))
        for base in roles:
            try:
                query = build_role_query(inv, inst, inst.gold_sense, RoleLabel(base=base))
            except (DataError, LookupError):
                skipped += 1
                continue
            targets = np.full(n, TAGS.index("O"), dtype=np.int64)
            for a in by_base.get(base, ()):
                targets[a.start] = TAGS.index(f"B-{a.label.prefix}")
                for t in range(a.start + 1, a.end + 1):
                    targets[t] = TAGS.index(f"I-{a.label.prefix}")
            examples.append((bio_features(tokens, query.query_text), targets))
    if not examples:
        raise ConfigError("no usable bio training examples (gold senses required)")
    if uncovered:
        log.warning("bio training: %d gold (predicate, role) pairs outside the "
                    "candidate sets contribute no signal", uncovered)
    w = model.bio_w if model.bio_w is not None else np.zeros((model.dim, len(TAGS)))
    lr = hyper.lr

    def step(i: int) -> float:
        feats, targets = examples[i]
        total = 0.0
        for idx, target in zip(feats, targets):
            p = _softmax(w[idx].sum(axis=0))
            g = p.copy()
            g[target] -= 1.0
            np.subtract.at(w, idx, lr * g)
            total += -np.log(max(p[target], 1e-12))
        return total / len(targets)

    losses = _sgd_epochs(len(examples), hyper, step)
    model.bio_w = w
    return TrainResult(model=model, losses=losses, uncovered_pairs=uncovered, skipped=skipped)
