"""End-to-end orchestration and the ablation procedures.

The run is deliberately staged: resolve lemmas, choose senses, score and
globally filter candidate roles (the one cross-instance barrier), build role
queries under the chosen senses, score BIO per (predicate, role), then merge
and decode. Data problems abort only the instance they touch and are logged;
transport problems abort the run. A fixed seed makes output files
byte-identical across runs.
"""
from __future__ import annotations

import dataclasses
import json
import logging
import random
from dataclasses import dataclass, field
from pathlib import Path
from typing import Sequence

from .corpus import (
    Prediction,
    PredicateInstance,
    read_corpus,
    resolve_lemma,
    write_predictions,
)
from .decoder import decode, extract_spans, merge_lattice
from .disambiguate import SenseDecision, disambiguate
from .errors import ConfigError, ContractError, DataError, RoleUndefinedForSense
from .evaluation import EvalReport, evaluate
from .frames import FrameInventory, RoleLabel, ingest_frames, senses_of
from .queries import build_role_query, mark_predicate
from .role_filter import (
    LambdaReport,
    filter_roles,
    score_all_roles,
    select_from_scores,
    select_threshold_from_scores,
)
from .scoring.client import DEFAULT_TIMEOUT, open_scorer
from .scoring.contracts import BioScoreRequest, ScorerHandle
from .scoring.reference import (
    ReferenceModel,
    ReferenceScorer,
    TrainConfig,
    train_reference,
)

log = logging.getLogger(__name__)

CONFIG_VERSION = 1
STAGE_NAMES = ("sense", "role", "bio")


@dataclass(frozen=True)
class PipelineConfig:
    frames: str
    corpus: str
    modifiers: str | None = None
    corpus_format: str = "normalized"
    scorer: str | None = None            # default spec for all three stages
    sense_scorer: str | None = None
    role_scorer: str | None = None
    bio_scorer: str | None = None
    lambda_: float | None = None
    threshold: float | None = None
    role_universe: tuple[str, ...] | None = None
    mode: str = "span"
    seed: int = 0
    semantic: bool = True
    corruption_rate: float = 0.0
    use_gold_senses: bool = False
    predictions_out: str | None = None
    report_out: str | None = None
    timeout: float = DEFAULT_TIMEOUT

    def __post_init__(self) -> None:
        if (self.lambda_ is None) == (self.threshold is None):
            raise ConfigError("set exactly one of lambda and threshold")
        if self.lambda_ is not None and self.lambda_ <= 0:
            raise ConfigError(f"lambda must be positive, got {self.lambda_!r}")
        if not 0.0 <= self.corruption_rate <= 1.0:
            raise ConfigError(f"corruption rate must be in [0, 1], got {self.corruption_rate!r}")
        if self.mode not in ("span", "dep"):
            raise ConfigError(f"unknown evaluation mode {self.mode!r}")

    def spec_for(self, stage: str) -> str:
        spec = {
            "sense": self.sense_scorer,
            "role": self.role_scorer,
            "bio": self.bio_scorer,
        }[stage] or self.scorer
        if spec is None:
            raise ConfigError(f"no scorer configured for the {stage} stage")
        return spec


_CONFIG_KEYS = {
    "frames", "corpus", "modifiers", "corpus_format", "scorer", "sense_scorer",
    "role_scorer", "bio_scorer", "lambda", "threshold", "role_universe", "mode",
    "seed", "semantic", "corruption_rate", "use_gold_senses", "predictions_out",
    "report_out", "timeout",
}


def load_config(path: str | Path, overrides: dict | None = None) -> PipelineConfig:
    """Read the declarative JSON config; ``overrides`` (CLI flags) win."""
    try:
        raw = json.loads(Path(path).read_text(encoding="utf-8"))
    except (OSError, json.JSONDecodeError) as exc:
        raise ConfigError(f"cannot read config {path}: {exc}") from exc
    if not isinstance(raw, dict):
        raise ConfigError(f"config {path} must be a JSON object")
    version = raw.pop("version", None)
    if version != CONFIG_VERSION:
        raise ConfigError(f"config {path}: unsupported version {version!r}")
    unknown = set(raw) - _CONFIG_KEYS
    if unknown:
        raise ConfigError(f"config {path}: unknown keys {sorted(unknown)}")
    merged = dict(raw)
    overrides = overrides or {}
    # a selection override on the command line replaces the config's choice
    if overrides.get("lambda") is not None:
        merged.pop("threshold", None)
    if overrides.get("threshold") is not None:
        merged.pop("lambda", None)
    for key, value in overrides.items():
        if value is not None:
            merged[key] = value
    return config_from_dict(merged)


def config_from_dict(data: dict) -> PipelineConfig:
    data = dict(data)
    if "lambda" in data:
        data["lambda_"] = data.pop("lambda")
    if data.get("role_universe") is not None:
        data["role_universe"] = tuple(data["role_universe"])
    try:
        return PipelineConfig(**data)
    except TypeError as exc:
        raise ConfigError(f"bad pipeline config: {exc}") from exc


@dataclass
class PipelineResult:
    predictions: list[Prediction]
    instances: list[PredicateInstance]
    decisions: list[SenseDecision | None]
    senses: list[str | None]
    role_sets: list[tuple[str, ...]]
    lambda_report: LambdaReport | None
    report: EvalReport | None
    skipped: int = 0
    roles_dropped: int = 0
    corrupted: int = 0
    corruption_single_sense: int = 0

    def pred_args(self) -> list[tuple]:
        return [p.args for p in self.predictions]


class _Handles:
    """Per-stage scorer handles; identical specs share one handle."""

    def __init__(self, cfg: PipelineConfig, provided: dict[str, ScorerHandle] | None):
        self._own: dict[str, ScorerHandle] = {}
        self.by_stage: dict[str, ScorerHandle] = {}
        for stage in STAGE_NAMES:
            if provided and stage in provided:
                self.by_stage[stage] = provided[stage]
                continue
            spec = cfg.spec_for(stage)
            if spec not in self._own:
                self._own[spec] = open_scorer(spec, timeout=cfg.timeout)
            self.by_stage[stage] = self._own[spec]

    def close(self) -> None:
        for handle in self._own.values():
            handle.close()

    def __enter__(self) -> "_Handles":
        return self

    def __exit__(self, *exc) -> None:
        self.close()


def _resolve_all(
    inv: FrameInventory, instances: Sequence[PredicateInstance]
) -> list[PredicateInstance]:
    lemmas = inv.lemmas()
    return [
        dataclasses.replace(
            inst, lemma=resolve_lemma(lemmas, inst.predicate_word, inst.lemma)
        )
        for inst in instances
    ]


def _choose_senses(
    cfg: PipelineConfig,
    handle: ScorerHandle,
    inv: FrameInventory,
    instances: Sequence[PredicateInstance],
) -> tuple[list[SenseDecision | None], list[str | None], int]:
    decisions: list[SenseDecision | None] = []
    senses: list[str | None] = []
    skipped = 0
    for inst in instances:
        if cfg.use_gold_senses:
            decisions.append(None)
            if inst.gold_sense is None:
                log.warning("instance %s: no gold sense to use; skipping",
                            inst.sentence.sent_id)
                senses.append(None)
                skipped += 1
            else:
                senses.append(inst.gold_sense)
            continue
        try:
            decision = disambiguate(handle, inv, inst)
        except DataError as exc:
            log.warning("instance %s: disambiguation failed: %s", inst.sentence.sent_id, exc)
            decisions.append(None)
            senses.append(None)
            skipped += 1
            continue
        decisions.append(decision)
        senses.append(decision.sense_id)
    return decisions, senses, skipped


def _corrupt_senses(
    cfg: PipelineConfig,
    inv: FrameInventory,
    instances: Sequence[PredicateInstance],
    senses: list[str | None],
) -> tuple[list[str | None], int, int]:
    """Replace each sense, with the configured probability, by a uniformly
    random other sense of the same lemma.

    The coin stream depends only on (seed, instance order) and each
    replacement choice only on (seed, instance index), so the corrupted set
    at a lower rate is a subset of the set at a higher rate for one seed.
    """
    if cfg.corruption_rate == 0.0:
        return senses, 0, 0
    coin = random.Random(cfg.seed)
    out = list(senses)
    corrupted = singles = 0
    for i, (inst, sense) in enumerate(zip(instances, senses)):
        u = coin.random()
        if sense is None or u >= cfg.corruption_rate:
            continue
        others = [
            s.sense_id for s in senses_of(inv, inst.lemma or "") if s.sense_id != sense
        ]
        if not others:
            singles += 1
            continue
        out[i] = random.Random(f"{cfg.seed}:{i}").choice(others)
        corrupted += 1
    return out, corrupted, singles


def _role_universe(
    cfg: PipelineConfig, instances: Sequence[PredicateInstance]
) -> tuple[str, ...]:
    if cfg.role_universe is not None:
        if not cfg.role_universe:
            raise ConfigError("role universe is empty")
        return tuple(cfg.role_universe)
    derived = sorted({a.label.base for inst in instances for a in inst.gold_args})
    if not derived:
        raise ConfigError(
            "cannot derive a role universe from a corpus without gold arguments; "
            "configure role_universe explicitly"
        )
    return tuple(derived)


def run_pipeline(
    cfg: PipelineConfig,
    scorers: dict[str, ScorerHandle] | None = None,
    inv: FrameInventory | None = None,
    instances: Sequence[PredicateInstance] | None = None,
) -> PipelineResult:
    """Run every stage over the configured corpus.

    ``scorers`` may inject in-process handles per stage ("sense", "role",
    "bio"), bypassing the spec strings; injected handles are not closed here.
    """
    if inv is None:
        inv = ingest_frames(cfg.frames, cfg.modifiers)
    if instances is None:
        instances = read_corpus(cfg.corpus, cfg.corpus_format)

    if not instances:
        empty_report = _maybe_evaluate(cfg, inv, [], [], [])
        result = PipelineResult(
            predictions=[], instances=[], decisions=[], senses=[], role_sets=[],
            lambda_report=None, report=empty_report,
        )
        _write_outputs(cfg, result)
        return result

    instances = _resolve_all(inv, instances)

    with _Handles(cfg, scorers) as handles:
        decisions, senses, skipped = _choose_senses(
            cfg, handles.by_stage["sense"], inv, instances
        )
        senses, corrupted, singles = _corrupt_senses(cfg, inv, instances, senses)

        universe = _role_universe(cfg, instances)
        role_scores = score_all_roles(handles.by_stage["role"], instances, universe)
        if cfg.lambda_ is not None:
            role_sets, lam_report = select_from_scores(
                role_scores, instances, universe, cfg.lambda_
            )
        else:
            role_sets, lam_report = select_threshold_from_scores(
                role_scores, instances, universe, cfg.threshold
            )

        reqs: list[BioScoreRequest] = []
        owners: list[tuple[int, str]] = []
        roles_dropped = 0
        for i, inst in enumerate(instances):
            sense = senses[i]
            if sense is None:
                continue
            tokens = tuple(mark_predicate(inst).tokens)
            for role in role_sets[i]:
                try:
                    query = build_role_query(
                        inv, inst, sense, RoleLabel(base=role), semantic=cfg.semantic
                    )
                except RoleUndefinedForSense:
                    log.info(
                        "instance %s: role %s undefined under sense %s; dropped",
                        inst.sentence.sent_id, role, sense,
                    )
                    roles_dropped += 1
                    continue
                reqs.append(
                    BioScoreRequest(tokens=tokens, query_text=query.query_text, role=role)
                )
                owners.append((i, role))

        tag_rows = handles.by_stage["bio"].score_bio_batch(reqs)

    per_instance: list[dict[str, object]] = [dict() for _ in instances]
    for (i, role), rows in zip(owners, tag_rows):
        per_instance[i][role] = rows

    predictions: list[Prediction] = []
    for i, inst in enumerate(instances):
        sense = senses[i]
        dists = per_instance[i]
        if not dists:
            predictions.append(Prediction(sense=sense, args=()))
            continue
        try:
            spans = extract_spans(decode(merge_lattice(dists)))
        except (DataError, ContractError) as exc:
            log.warning("instance %s: decoding failed: %s", inst.sentence.sent_id, exc)
            predictions.append(Prediction(sense=sense, args=()))
            skipped += 1
            continue
        predictions.append(Prediction(sense=sense, args=tuple(sorted(spans))))

    report = _maybe_evaluate(cfg, inv, instances, senses, [p.args for p in predictions])
    result = PipelineResult(
        predictions=predictions,
        instances=list(instances),
        decisions=decisions,
        senses=senses,
        role_sets=role_sets,
        lambda_report=lam_report,
        report=report,
        skipped=skipped,
        roles_dropped=roles_dropped,
        corrupted=corrupted,
        corruption_single_sense=singles,
    )
    _write_outputs(cfg, result)
    return result


def _maybe_evaluate(
    cfg: PipelineConfig,
    inv: FrameInventory,
    instances: Sequence[PredicateInstance],
    pred_senses: Sequence[str | None],
    pred_args: Sequence,
) -> EvalReport | None:
    has_gold = any(inst.gold_sense is not None or inst.gold_args for inst in instances)
    if instances and not has_gold:
        return None
    gold_senses = [inst.gold_sense for inst in instances]
    gold_args = [inst.gold_args for inst in instances]
    with_gold_sense = [i for i in instances if i.gold_sense is not None]
    fraction = None
    if with_gold_sense:
        singles = sum(
            1 for i in with_gold_sense if len(senses_of(inv, i.lemma or "")) == 1
        )
        fraction = singles / len(with_gold_sense)
    return evaluate(
        gold_senses, gold_args, list(pred_senses), list(pred_args),
        mode=cfg.mode, single_sense_fraction=fraction,
    )


def _write_outputs(cfg: PipelineConfig, result: PipelineResult) -> None:
    if cfg.predictions_out:
        write_predictions(result.instances, result.predictions, cfg.predictions_out)
    if cfg.report_out:
        payload: dict[str, object] = {
            "version": CONFIG_VERSION,
            "skipped": result.skipped,
            "roles_dropped": result.roles_dropped,
        }
        if result.lambda_report is not None:
            payload["selection"] = result.lambda_report.to_json()
        if result.report is not None:
            payload["evaluation"] = result.report.to_json()
        Path(cfg.report_out).write_text(
            json.dumps(payload, indent=2, sort_keys=True) + "\n", encoding="utf-8"
        )


# ---------------------------------------------------------------------------
# Reference-scorer training recipe
# ---------------------------------------------------------------------------

@dataclass
class TrainAllResult:
    model: ReferenceModel
    sense_losses: list[float] = field(default_factory=list)
    role_losses: list[float] = field(default_factory=list)
    bio_losses: list[float] = field(default_factory=list)
    uncovered_pairs: int = 0
    lambda_report: LambdaReport | None = None


def train_all(
    instances: Sequence[PredicateInstance],
    inv: FrameInventory,
    role_universe: Sequence[str],
    lam: float,
    hyper: TrainConfig | None = None,
    model: ReferenceModel | None = None,
) -> TrainAllResult:
    """Standard three-head training: sense, role, then BIO under the role
    sets the freshly trained role head actually predicts at ``lam``."""
    instances = _resolve_all(inv, list(instances))
    model = model or ReferenceModel()
    sense_res = train_reference(instances, inv, "sense", hyper, model=model)
    role_res = train_reference(
        instances, inv, "role", hyper, model=model, role_universe=role_universe
    )
    role_sets, lam_report = filter_roles(
        ReferenceScorer(model), instances, role_universe, lam
    )
    bio_res = train_reference(
        instances, inv, "bio", hyper, model=model, role_sets=role_sets
    )
    return TrainAllResult(
        model=model,
        sense_losses=sense_res.losses,
        role_losses=role_res.losses,
        bio_losses=bio_res.losses,
        uncovered_pairs=bio_res.uncovered_pairs,
        lambda_report=lam_report,
    )


# ---------------------------------------------------------------------------
# Ablations
# ---------------------------------------------------------------------------

ABLATIONS = ("sense-corruption", "no-semantics", "data-fraction")
CORRUPTION_RATES = (0.0, 0.25, 0.5, 1.0)
DATA_FRACTIONS = (0.25, 0.5, 0.75, 1.0)


def run_ablation(
    cfg: PipelineConfig,
    which: str,
    scorers: dict[str, ScorerHandle] | None = None,
    rates: Sequence[float] = CORRUPTION_RATES,
    fractions: Sequence[float] = DATA_FRACTIONS,
    train_corpus: str | None = None,
    train_format: str = "normalized",
    hyper: TrainConfig | None = None,
) -> dict:
    """Run one ablation procedure and return a JSON-able report."""
    if which == "sense-corruption":
        return _ablate_corruption(cfg, scorers, rates)
    if which == "no-semantics":
        return _ablate_semantics(cfg, scorers)
    if which == "data-fraction":
        return _ablate_data_fraction(cfg, fractions, train_corpus, train_format, hyper)
    raise ConfigError(f"unknown ablation {which!r} (choose from {ABLATIONS})")


def _require_gold(result: PipelineResult, which: str) -> EvalReport:
    if result.report is None:
        raise DataError(f"ablation {which} needs gold annotations in the corpus")
    return result.report


def _ablate_corruption(cfg, scorers, rates) -> dict:
    records = []
    for rate in rates:
        run_cfg = dataclasses.replace(cfg, corruption_rate=float(rate))
        result = run_pipeline(run_cfg, scorers=scorers)
        report = _require_gold(result, "sense-corruption")
        records.append({
            "rate": float(rate),
            "argument_f1": report.arguments.f1,
            "sense_accuracy_against_gold": report.sense_accuracy,
            "corrupted": result.corrupted,
            "single_sense_skipped": result.corruption_single_sense,
        })
    return {"ablation": "sense-corruption", "use_gold_senses": cfg.use_gold_senses,
            "series": records}


def _ablate_semantics(cfg, scorers) -> dict:
    base = run_pipeline(cfg, scorers=scorers)
    degraded = run_pipeline(dataclasses.replace(cfg, semantic=False), scorers=scorers)
    base_report = _require_gold(base, "no-semantics")
    degraded_report = _require_gold(degraded, "no-semantics")
    return {
        "ablation": "no-semantics",
        "baseline_f1": base_report.arguments.f1,
        "no_semantics_f1": degraded_report.arguments.f1,
        "role_sets_identical": base.role_sets == degraded.role_sets,
    }


def _ablate_data_fraction(cfg, fractions, train_corpus, train_format, hyper) -> dict:
    if train_corpus is None:
        raise ConfigError("data-fraction ablation needs a training corpus")
    if cfg.lambda_ is None:
        raise ConfigError("data-fraction ablation needs lambda-mode selection")
    inv = ingest_frames(cfg.frames, cfg.modifiers)
    train_instances = read_corpus(train_corpus, train_format)
    if not train_instances:
        raise DataError(f"training corpus {train_corpus} is empty")
    universe = cfg.role_universe or tuple(
        sorted({a.label.base for inst in train_instances for a in inst.gold_args})
    )
    records = []
    for frac in fractions:
        k = max(1, int(len(train_instances) * float(frac)))
        trained = train_all(train_instances[:k], inv, universe, cfg.lambda_, hyper)
        scorer = ReferenceScorer(trained.model)
        run_cfg = dataclasses.replace(cfg, role_universe=tuple(universe))
        result = run_pipeline(
            run_cfg, scorers={"sense": scorer, "role": scorer, "bio": scorer}, inv=inv
        )
        report = _require_gold(result, "data-fraction")
        records.append({
            "fraction": float(frac),
            "train_instances": k,
            "argument_f1": report.arguments.f1,
            "sense_accuracy": report.sense_accuracy,
        })
    return {"ablation": "data-fraction", "series": records}
