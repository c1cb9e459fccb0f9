"""Command line front end.

Exit codes: 0 on success, 1 on a bad invocation, 2 on a data problem
(unreadable or malformed frames, corpora, configs, models), 3 on a scorer
transport failure.
"""
from __future__ import annotations

import argparse
import dataclasses
import json
import logging
import sys
from pathlib import Path

import numpy as np

from .baselines import (
    most_frequent_layout_table,
    most_frequent_sense_table,
    predict_args,
    predict_senses,
)
from .corpus import (
    CORPUS_FORMATS,
    read_corpus,
    read_sentences,
    resolve_lemma,
    write_sentences,
)
from .decoder import decode, extract_spans, lattice_to_debug_json, merge_lattice
from .disambiguate import disambiguate
from .errors import ConfigError, DataError, TransportError
from .evaluation import evaluate, score_senses
from .frames import FrameInventory, RoleLabel, ingest_frames, senses_of, write_frames
from .pipeline import (
    ABLATIONS,
    CORRUPTION_RATES,
    DATA_FRACTIONS,
    load_config,
    run_ablation,
    run_pipeline,
    train_all,
)
from .queries import build_role_query, build_sense_options, mark_predicate, sense_question
from .role_filter import (
    filter_roles,
    score_all_roles,
    select_from_scores,
    select_threshold_from_scores,
    tune_from_scores,
)
from .scoring.client import DEFAULT_TIMEOUT, open_scorer
from .scoring.reference import (
    ReferenceModel,
    ReferenceScorer,
    TrainConfig,
    load_model,
    save_model,
    train_reference,
)
from .synth import build_inventory, standard_splits

EXIT_OK = 0
EXIT_USAGE = 1
EXIT_DATA = 2
EXIT_TRANSPORT = 3

_TRAIN_DEFAULTS = TrainConfig()


class _Parser(argparse.ArgumentParser):
    """argparse that reports usage problems with exit code 1."""

    def error(self, message: str):
        self.print_usage(sys.stderr)
        print(f"{self.prog}: error: {message}", file=sys.stderr)
        raise SystemExit(EXIT_USAGE)


def _universe(text: str) -> tuple[str, ...]:
    bases = tuple(b.strip() for b in text.split(",") if b.strip())
    if not bases:
        raise argparse.ArgumentTypeError("role universe must not be empty")
    return bases


def _floats(text: str) -> tuple[float, ...]:
    try:
        return tuple(float(v) for v in text.split(",") if v.strip())
    except ValueError as exc:
        raise argparse.ArgumentTypeError(str(exc))


def _resolve(inv: FrameInventory, instances):
    lemmas = inv.lemmas()
    return [
        dataclasses.replace(i, lemma=resolve_lemma(lemmas, i.predicate_word, i.lemma))
        for i in instances
    ]


def _load(a) -> tuple[FrameInventory, list]:
    inv = ingest_frames(a.frames, getattr(a, "modifiers", None))
    instances = read_corpus(a.corpus, a.corpus_format)
    return inv, _resolve(inv, instances)


def _emit(obj) -> None:
    print(json.dumps(obj, indent=2, sort_keys=True))


# ---------------------------------------------------------------------------
# Commands
# ---------------------------------------------------------------------------

def cmd_ingest_frames(a) -> int:
    inv = ingest_frames(a.source, a.modifiers)
    write_frames(inv, a.out)
    n_senses = sum(len(v) for v in inv.entries.values())
    print(f"wrote {len(inv.entries)} lemmas, {n_senses} senses to {a.out}")
    return EXIT_OK


def cmd_convert(a) -> int:
    sentences = read_sentences(a.source, a.src_format)
    write_sentences(sentences, a.out, a.dst_format)
    preds = sum(len(s.predicates) for s in sentences)
    print(f"converted {len(sentences)} sentences ({preds} predicates) "
          f"{a.src_format} -> {a.dst_format}")
    return EXIT_OK


def _hyper(a) -> TrainConfig:
    return TrainConfig(epochs=a.epochs, lr=a.lr, seed=a.seed)


def cmd_train(a) -> int:
    inv, instances = _load(a)
    if not instances:
        raise DataError(f"training corpus {a.corpus} is empty")
    hyper = _hyper(a)
    model = load_model(a.model) if a.model else ReferenceModel()

    if a.stage == "all":
        if a.lam is None:
            raise ConfigError("--stage all needs --lambda for the candidate role sets")
        universe = a.role_universe or tuple(
            sorted({arg.label.base for i in instances for arg in i.gold_args})
        )
        if not universe:
            raise ConfigError("no gold roles in the corpus; pass --role-universe")
        res = train_all(instances, inv, universe, a.lam, hyper, model=model)
        for stage, losses in (("sense", res.sense_losses), ("role", res.role_losses),
                              ("bio", res.bio_losses)):
            if losses:
                print(f"{stage}: final loss {losses[-1]:.4f} over {len(losses)} epochs")
        if res.uncovered_pairs:
            print(f"bio: {res.uncovered_pairs} gold (predicate, role) pairs "
                  "fell outside the filtered sets")
    elif a.stage == "bio":
        if a.lam is None:
            raise ConfigError("--stage bio needs --lambda to derive candidate role sets")
        if model.role_w is None:
            raise ConfigError("--stage bio needs --model with a trained role head")
        universe = a.role_universe or tuple(model.role_names)
        role_sets, _ = filter_roles(ReferenceScorer(model), instances, universe, a.lam)
        res = train_reference(instances, inv, "bio", hyper, model=model,
                              role_sets=role_sets)
        print(f"bio: final loss {res.losses[-1]:.4f} over {len(res.losses)} epochs")
        if res.uncovered_pairs:
            print(f"bio: {res.uncovered_pairs} gold (predicate, role) pairs "
                  "fell outside the filtered sets")
    elif a.stage == "role":
        res = train_reference(instances, inv, "role", hyper, model=model,
                              role_universe=a.role_universe)
        print(f"role: final loss {res.losses[-1]:.4f} over {len(res.losses)} epochs")
    else:
        res = train_reference(instances, inv, "sense", hyper, model=model)
        print(f"sense: final loss {res.losses[-1]:.4f} over {len(res.losses)} epochs")

    save_model(model, a.out)
    print(f"saved model to {a.out}")
    return EXIT_OK


def _derived_universe(a, instances) -> tuple[str, ...]:
    if a.role_universe:
        return a.role_universe
    derived = tuple(sorted({arg.label.base for i in instances for arg in i.gold_args}))
    if not derived:
        raise ConfigError("no gold roles to derive a universe from; pass --role-universe")
    return derived


def cmd_tune_lambda(a) -> int:
    instances = read_corpus(a.corpus, a.corpus_format)
    if not instances:
        raise DataError(f"corpus {a.corpus} is empty")
    universe = _derived_universe(a, instances)
    with open_scorer(a.scorer, timeout=a.timeout) as handle:
        scores = score_all_roles(handle, instances, universe)
    lam = tune_from_scores(scores, instances, universe, a.target, a.step)
    _, report = select_from_scores(scores, instances, universe, lam)
    _emit({"lambda": lam, "target_recall": a.target, "selection": report.to_json()})
    return EXIT_OK


def cmd_filter_roles(a) -> int:
    instances = read_corpus(a.corpus, a.corpus_format)
    if not instances:
        raise DataError(f"corpus {a.corpus} is empty")
    universe = _derived_universe(a, instances)
    with open_scorer(a.scorer, timeout=a.timeout) as handle:
        scores = score_all_roles(handle, instances, universe)
    if a.lam is not None:
        role_sets, report = select_from_scores(scores, instances, universe, a.lam)
    else:
        role_sets, report = select_threshold_from_scores(
            scores, instances, universe, a.threshold)
    payload = {
        "selection": report.to_json(),
        "role_sets": [
            {"sent_id": inst.sentence.sent_id, "pred_index": inst.pred_index,
             "roles": list(kept)}
            for inst, kept in zip(instances, role_sets)
        ],
    }
    if a.out:
        Path(a.out).write_text(json.dumps(payload, indent=2, sort_keys=True) + "\n",
                               encoding="utf-8")
        print(f"wrote role sets for {len(instances)} predicates to {a.out}")
    else:
        _emit(payload)
    return EXIT_OK


def cmd_disambiguate(a) -> int:
    inv, instances = _load(a)
    records = []
    with open_scorer(a.scorer, timeout=a.timeout) as handle:
        for inst in instances:
            decision = disambiguate(handle, inv, inst)
            records.append({
                "sent_id": inst.sentence.sent_id,
                "pred_index": inst.pred_index,
                "predicate": inst.predicate_word,
                "lemma": inst.lemma,
                "sense": decision.sense_id,
                "score": decision.score,
            })
    lines = [json.dumps(r, sort_keys=True) for r in records]
    if a.out:
        Path(a.out).write_text("".join(line + "\n" for line in lines), encoding="utf-8")
    else:
        for line in lines:
            print(line)
    gold = [i.gold_sense for i in instances]
    if any(g is not None for g in gold):
        acc, correct, total = score_senses(gold, [r["sense"] for r in records])
        print(f"sense accuracy {acc:.4f} ({correct}/{total})", file=sys.stderr)
    return EXIT_OK


def _config_overrides(a) -> dict:
    return {
        "frames": a.frames,
        "corpus": a.corpus,
        "corpus_format": a.corpus_format,
        "scorer": a.scorer,
        "lambda": a.lam,
        "threshold": a.threshold,
        "mode": a.mode,
        "seed": a.seed,
        "corruption_rate": a.corruption_rate,
        "use_gold_senses": True if a.use_gold_senses else None,
        "semantic": False if a.no_semantics else None,
        "predictions_out": a.predictions_out,
        "report_out": a.report_out,
    }


def cmd_predict(a) -> int:
    cfg = load_config(a.config, _config_overrides(a))
    result = run_pipeline(cfg)
    print(f"predicted {len(result.predictions)} predicates "
          f"({result.skipped} skipped, {result.roles_dropped} roles dropped)")
    if result.lambda_report is not None:
        rep = result.lambda_report
        line = f"selection: kept {rep.kept_pairs} pairs"
        if rep.recall is not None:
            line += f", recall {rep.recall:.4f}"
        if rep.speedup is not None:
            line += f", speedup {rep.speedup:.2f}x"
        print(line)
    if cfg.predictions_out:
        print(f"wrote predictions to {cfg.predictions_out}")
    if result.report is not None:
        arg = result.report.arguments
        print(f"arguments: P {arg.precision:.4f} R {arg.recall:.4f} F1 {arg.f1:.4f}")
        if result.report.sense_accuracy is not None:
            print(f"senses: accuracy {result.report.sense_accuracy:.4f} "
                  f"({result.report.sense_correct}/{result.report.sense_total})")
    return EXIT_OK


def cmd_evaluate(a) -> int:
    gold = read_corpus(a.gold, a.gold_format)
    pred = read_corpus(a.predictions, a.pred_format)
    if len(gold) != len(pred):
        raise DataError(
            f"gold has {len(gold)} predicates but predictions have {len(pred)}")
    for g, p in zip(gold, pred):
        if (g.sentence.sent_id != p.sentence.sent_id
                or g.pred_index != p.pred_index):
            raise DataError(
                f"prediction misaligned at sentence {g.sentence.sent_id!r} "
                f"predicate {g.pred_index}")
    fraction = None
    if a.frames:
        inv = ingest_frames(a.frames)
        resolved = _resolve(inv, gold)
        with_sense = [i for i in resolved if i.gold_sense is not None]
        if with_sense:
            singles = sum(1 for i in with_sense
                          if len(senses_of(inv, i.lemma or "")) == 1)
            fraction = singles / len(with_sense)
    report = evaluate(
        [g.gold_sense for g in gold],
        [g.gold_args for g in gold],
        [p.gold_sense for p in pred],
        [p.gold_args for p in pred],
        mode=a.mode,
        single_sense_fraction=fraction,
    )
    _emit(report.to_json())
    return EXIT_OK


def cmd_ablate(a) -> int:
    cfg = load_config(a.config)
    report = run_ablation(
        cfg, a.which,
        rates=a.rates,
        fractions=a.fractions,
        train_corpus=a.train_corpus,
        train_format=a.train_format,
        hyper=TrainConfig(epochs=a.epochs, lr=a.lr, seed=a.seed),
    )
    if a.out:
        Path(a.out).write_text(json.dumps(report, indent=2, sort_keys=True) + "\n",
                               encoding="utf-8")
        print(f"wrote ablation report to {a.out}")
    else:
        _emit(report)
    return EXIT_OK


def _lane_tags(gold_args, n_tokens: int, base: str) -> list[str]:
    tags = ["O"] * n_tokens
    for arg in gold_args:
        if arg.label.base != base:
            continue
        tags[arg.start] = f"B-{arg.label.prefix}"
        for t in range(arg.start + 1, arg.end + 1):
            tags[t] = f"I-{arg.label.prefix}"
    return tags


def cmd_dump_queries(a) -> int:
    inv, instances = _load(a)
    semantic = not a.no_semantics
    lines = []
    for inst in instances:
        options = build_sense_options(inv, inst)
        chosen = inst.gold_sense if inst.gold_sense is not None else options[0].sense_id
        entry = next((s for s in senses_of(inv, inst.lemma or "")
                      if s.sense_id == chosen), None)
        role_queries = {}
        if entry is not None:
            bases = list(entry.core_roles) + sorted(inv.modifier_defs)
            for base in bases:
                role_queries[base] = build_role_query(
                    inv, inst, chosen, RoleLabel(base=base), semantic=semantic
                ).query_text
        bio = []
        if inst.gold_sense is not None and entry is not None:
            n = len(inst.sentence.tokens)
            for base in sorted({arg.label.base for arg in inst.gold_args}):
                if base in role_queries:
                    bio.append({
                        "role": base,
                        "query": role_queries[base],
                        "tags": _lane_tags(inst.gold_args, n, base),
                    })
        lines.append(json.dumps({
            "sent_id": inst.sentence.sent_id,
            "pred_index": inst.pred_index,
            "tokens": list(mark_predicate(inst).tokens),
            "sense_question": sense_question(inst),
            "sense_options": [
                {"sense_id": o.sense_id, "text": o.option_text} for o in options
            ],
            "gold_sense": inst.gold_sense,
            "role_queries": role_queries,
            "bio": bio,
        }, sort_keys=True))
    text = "".join(line + "\n" for line in lines)
    if a.out:
        Path(a.out).write_text(text, encoding="utf-8")
        print(f"wrote {len(lines)} query records to {a.out}")
    else:
        sys.stdout.write(text)
    return EXIT_OK


def cmd_baseline(a) -> int:
    inv, train = _load(a)
    test = _resolve(inv, read_corpus(a.test_corpus, a.corpus_format))
    sense_table = most_frequent_sense_table(train)
    layout_table = most_frequent_layout_table(train)
    senses = predict_senses(sense_table, test, inv)
    args = predict_args(layout_table, test)
    report = evaluate(
        [i.gold_sense for i in test],
        [i.gold_args for i in test],
        senses,
        args,
        mode=a.mode,
    )
    _emit(report.to_json())
    return EXIT_OK


def cmd_synth(a) -> int:
    out = Path(a.out)
    out.mkdir(parents=True, exist_ok=True)
    inv = build_inventory()
    write_frames(inv, out / "frames.jsonl")
    splits = standard_splits(a.seed, (a.train, a.dev, a.test))
    for name, sentences in zip(("train", "dev", "test"), splits):
        write_sentences(sentences, out / f"{name}.jsonl", "normalized")
        print(f"wrote {len(sentences)} sentences to {out / (name + '.jsonl')}")
    print(f"wrote frame inventory to {out / 'frames.jsonl'}")
    return EXIT_OK


def cmd_decode(a) -> int:
    text = sys.stdin.read() if a.source == "-" else Path(a.source).read_text(
        encoding="utf-8")
    for lineno, line in enumerate(text.splitlines(), start=1):
        if not line.strip():
            continue
        try:
            record = json.loads(line)
        except json.JSONDecodeError as exc:
            raise DataError(f"lattice input line {lineno}: {exc}") from exc
        dists = record.get("roles", record) if isinstance(record, dict) else None
        if not isinstance(dists, dict) or not dists:
            raise DataError(f"lattice input line {lineno}: expected a role->rows object")
        lat = merge_lattice({r: np.asarray(rows, dtype=float)
                             for r, rows in dists.items()})
        tags = decode(lat)
        spans = extract_spans(tags)
        out = {
            "tags": [t.render() for t in tags],
            "spans": [[s.start, s.end, s.role] for s in spans],
            "merged_o": [float(lat.scores[t, -1]) for t in range(lat.n_tokens)],
        }
        if a.debug:
            out["lattice"] = lattice_to_debug_json(lat)
        print(json.dumps(out, sort_keys=True))
    return EXIT_OK


# ---------------------------------------------------------------------------
# Parser assembly
# ---------------------------------------------------------------------------

def _add_corpus_format(p, flag="--format"):
    p.add_argument(flag, dest="corpus_format", choices=CORPUS_FORMATS,
                   default="normalized", help="corpus file format")


def _add_frames(p):
    p.add_argument("--frames", required=True, help="frame inventory (XML dir/file or JSONL)")
    p.add_argument("--modifiers", help="JSON file overriding modifier descriptions")


def _add_scorer(p):
    p.add_argument("--scorer", required=True,
                   help="scorer spec: reference:<model>, exec:<command>, "
                        "tcp:<host:port>, scripted:<file>")
    p.add_argument("--timeout", type=float, default=DEFAULT_TIMEOUT,
                   help="seconds to wait on an external scorer")


def build_parser() -> _Parser:
    parser = _Parser(prog="rolecraft",
                     description="Question-driven semantic role labeling engine")
    parser.add_argument("--verbose", action="store_true", help="log at INFO level")
    sub = parser.add_subparsers(dest="command", metavar="command")
    sub.required = True

    p = sub.add_parser("ingest-frames", help="normalize a frame inventory to JSONL")
    p.add_argument("source", help="frame XML directory, single XML file, or JSONL")
    p.add_argument("-o", "--out", required=True)
    p.add_argument("--modifiers", help="JSON file overriding modifier descriptions")
    p.set_defaults(func=cmd_ingest_frames)

    p = sub.add_parser("convert", help="convert a corpus between formats")
    p.add_argument("source")
    p.add_argument("-o", "--out", required=True)
    p.add_argument("--from", dest="src_format", choices=CORPUS_FORMATS, required=True)
    p.add_argument("--to", dest="dst_format", choices=CORPUS_FORMATS, required=True)
    p.set_defaults(func=cmd_convert)

    p = sub.add_parser("train", help="train the built-in reference scorer")
    _add_frames(p)
    p.add_argument("--corpus", required=True)
    _add_corpus_format(p)
    p.add_argument("--stage", choices=("sense", "role", "bio", "all"), default="all")
    p.add_argument("-o", "--out", required=True, help="model file to write")
    p.add_argument("--model", help="existing model to continue from")
    p.add_argument("--epochs", type=int, default=_TRAIN_DEFAULTS.epochs)
    p.add_argument("--lr", type=float, default=_TRAIN_DEFAULTS.lr)
    p.add_argument("--seed", type=int, default=_TRAIN_DEFAULTS.seed)
    p.add_argument("--lambda", dest="lam", type=float,
                   help="role budget per predicate used to pick BIO training sets")
    p.add_argument("--role-universe", type=_universe,
                   help="comma separated role bases (default: derived from gold)")
    p.set_defaults(func=cmd_train)

    p = sub.add_parser("tune-lambda", help="smallest lambda reaching a recall target")
    p.add_argument("--corpus", required=True)
    _add_corpus_format(p)
    _add_scorer(p)
    p.add_argument("--target", type=float, required=True, help="recall target in [0, 1]")
    p.add_argument("--step", type=float, default=0.1, help="lambda grid step")
    p.add_argument("--role-universe", type=_universe)
    p.set_defaults(func=cmd_tune_lambda)

    p = sub.add_parser("filter-roles", help="globally select candidate roles")
    p.add_argument("--corpus", required=True)
    _add_corpus_format(p)
    _add_scorer(p)
    group = p.add_mutually_exclusive_group(required=True)
    group.add_argument("--lambda", dest="lam", type=float,
                       help="average roles kept per predicate")
    group.add_argument("--threshold", type=float, help="keep scores >= threshold")
    p.add_argument("--role-universe", type=_universe)
    p.add_argument("-o", "--out", help="write the JSON report here instead of stdout")
    p.set_defaults(func=cmd_filter_roles)

    p = sub.add_parser("disambiguate", help="predict predicate senses only")
    _add_frames(p)
    p.add_argument("--corpus", required=True)
    _add_corpus_format(p)
    _add_scorer(p)
    p.add_argument("-o", "--out", help="write JSONL decisions here instead of stdout")
    p.set_defaults(func=cmd_disambiguate)

    p = sub.add_parser("predict", help="run the full pipeline from a config file")
    p.add_argument("--config", required=True, help="pipeline JSON config")
    p.add_argument("--frames")
    p.add_argument("--corpus")
    p.add_argument("--format", dest="corpus_format", choices=CORPUS_FORMATS,
                   default=None)
    p.add_argument("--scorer")
    p.add_argument("--lambda", dest="lam", type=float)
    p.add_argument("--threshold", type=float)
    p.add_argument("--mode", choices=("span", "dep"), default=None)
    p.add_argument("--seed", type=int)
    p.add_argument("--corruption-rate", type=float, dest="corruption_rate")
    p.add_argument("--use-gold-senses", action="store_true")
    p.add_argument("--no-semantics", action="store_true",
                   help="replace role questions with bare labels")
    p.add_argument("--predictions-out")
    p.add_argument("--report-out")
    p.set_defaults(func=cmd_predict)

    p = sub.add_parser("evaluate", help="score a prediction file against gold")
    p.add_argument("--gold", required=True)
    p.add_argument("--gold-format", choices=CORPUS_FORMATS, default="normalized")
    p.add_argument("--predictions", required=True)
    p.add_argument("--pred-format", choices=CORPUS_FORMATS, default="normalized")
    p.add_argument("--mode", choices=("span", "dep"), default="span")
    p.add_argument("--frames", help="inventory for the single-sense fraction")
    p.set_defaults(func=cmd_evaluate)

    p = sub.add_parser("ablate", help="run an ablation procedure")
    p.add_argument("--config", required=True)
    p.add_argument("--which", choices=ABLATIONS, required=True)
    p.add_argument("--rates", type=_floats, default=CORRUPTION_RATES,
                   help="comma separated corruption rates")
    p.add_argument("--fractions", type=_floats, default=DATA_FRACTIONS,
                   help="comma separated training fractions")
    p.add_argument("--train-corpus", help="training corpus for data-fraction")
    p.add_argument("--train-format", choices=CORPUS_FORMATS, default="normalized")
    p.add_argument("--epochs", type=int, default=_TRAIN_DEFAULTS.epochs)
    p.add_argument("--lr", type=float, default=_TRAIN_DEFAULTS.lr)
    p.add_argument("--seed", type=int, default=_TRAIN_DEFAULTS.seed)
    p.add_argument("-o", "--out", help="write the JSON report here instead of stdout")
    p.set_defaults(func=cmd_ablate)

    p = sub.add_parser("dump-queries",
                       help="export marked tokens, questions, and gold tags as JSONL")
    _add_frames(p)
    p.add_argument("--corpus", required=True)
    _add_corpus_format(p)
    p.add_argument("--no-semantics", action="store_true")
    p.add_argument("-o", "--out")
    p.set_defaults(func=cmd_dump_queries)

    p = sub.add_parser("baseline",
                       help="most-frequent-sense and most-frequent-layout baselines")
    _add_frames(p)
    p.add_argument("--corpus", required=True, help="training corpus for the tables")
    p.add_argument("--test-corpus", required=True)
    _add_corpus_format(p)
    p.add_argument("--mode", choices=("span", "dep"), default="span")
    p.set_defaults(func=cmd_baseline)

    p = sub.add_parser("synth", help="generate the synthetic corpus and inventory")
    p.add_argument("-o", "--out", required=True, help="output directory")
    p.add_argument("--train", type=int, default=500)
    p.add_argument("--dev", type=int, default=100)
    p.add_argument("--test", type=int, default=100)
    p.add_argument("--seed", type=int, default=7)
    p.set_defaults(func=cmd_synth)

    p = sub.add_parser("decode",
                       help="merge and decode role tag lattices from JSONL")
    p.add_argument("source", help="JSONL of {role: [[7 floats]...]} objects, - for stdin")
    p.add_argument("--debug", action="store_true",
                   help="include the merged lattice columns in the output")
    p.set_defaults(func=cmd_decode)

    return parser


def main(argv=None) -> int:
    parser = build_parser()
    args = parser.parse_args(argv)
    logging.basicConfig(
        level=logging.INFO if args.verbose else logging.WARNING,
        format="%(levelname)s %(name)s: %(message)s",
    )
    try:
        return args.func(args)
    except DataError as exc:
        print(f"rolecraft: data error: {exc}", file=sys.stderr)
        return EXIT_DATA
    except TransportError as exc:
        print(f"rolecraft: transport error: {exc}", file=sys.stderr)
        return EXIT_TRANSPORT


if __name__ == "__main__":
    sys.exit(main())
