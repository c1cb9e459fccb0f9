"""Corpus data model and readers/writers.

A sentence carries its tokens and zero or more annotated predicates; each
predicate carries inclusive token spans labeled with a role string of the
grammar ``([RC]-)?<BASE>``. The unit of pipeline work is a PredicateInstance,
one per (sentence, predicate) pair. Three serializations are supported: the
normalized JSON Lines form, span-style CoNLL columns, and dependency-style
CoNLL columns (width-1 argument spans).
"""
from __future__ import annotations

import json
import re
from dataclasses import dataclass
from pathlib import Path
from typing import Iterable, Sequence

from .errors import CorpusParseError, DataError
from .frames import RoleLabel

# Inserted around the predicate token when a sentence is rendered for scoring.
PREDICATE_MARKERS = ("<p>", "</p>")

_SENSE_RE = re.compile(r"^(?P<lemma>.+)\.(?P<index>\d{2})$")


@dataclass(frozen=True, order=True)
class Argument:
    """One argument: inclusive token span plus its rendered role string."""

    start: int
    end: int
    role: str

    def __post_init__(self) -> None:
        if self.start < 0 or self.end < self.start:
            raise ValueError(f"bad span ({self.start}, {self.end})")
        RoleLabel.parse(self.role)  # validates the grammar

    @property
    def label(self) -> RoleLabel:
        return RoleLabel.parse(self.role)


def _check_disjoint(args: Sequence[Argument]) -> None:
    spans = sorted((a.start, a.end) for a in args)
    for (s1, e1), (s2, _) in zip(spans, spans[1:]):
        if s2 <= e1:
            raise ValueError(f"overlapping argument spans ({s1}, {e1}) and starting at {s2}")


@dataclass(frozen=True)
class Predicate:
    index: int
    lemma: str | None = None
    sense: str | None = None
    args: tuple[Argument, ...] = ()


@dataclass(frozen=True)
class Sentence:
    sent_id: str
    tokens: tuple[str, ...]
    predicates: tuple[Predicate, ...] = ()

    def __post_init__(self) -> None:
        if not self.tokens:
            raise ValueError(f"sentence {self.sent_id!r} has no tokens")
        bad = set(self.tokens) & set(PREDICATE_MARKERS)
        if bad:
            raise ValueError(
                f"sentence {self.sent_id!r} contains reserved marker tokens {sorted(bad)}"
            )
        for pred in self.predicates:
            if not 0 <= pred.index < len(self.tokens):
                raise ValueError(
                    f"sentence {self.sent_id!r}: predicate index {pred.index} out of range"
                )
            for arg in pred.args:
                if arg.end >= len(self.tokens):
                    raise ValueError(
                        f"sentence {self.sent_id!r}: argument span ({arg.start}, {arg.end}) "
                        f"exceeds length {len(self.tokens)}"
                    )
            _check_disjoint(pred.args)


@dataclass(frozen=True)
class PredicateInstance:
    """One predicate occurrence: the unit of pipeline work."""

    sentence: Sentence
    pred_index: int
    lemma: str | None = None
    gold_sense: str | None = None
    gold_args: tuple[Argument, ...] = ()

    def __post_init__(self) -> None:
        if not 0 <= self.pred_index < len(self.sentence.tokens):
            raise ValueError(f"predicate index {self.pred_index} out of range")
        _check_disjoint(self.gold_args)

    @property
    def predicate_word(self) -> str:
        return self.sentence.tokens[self.pred_index]


@dataclass(frozen=True)
class Prediction:
    """Pipeline output for one instance: chosen sense and extracted spans."""

    sense: str | None = None
    args: tuple[Argument, ...] = ()


def mark_predicate_tokens(tokens: Sequence[str], index: int) -> list[str]:
    """Copy of the tokens with the predicate wrapped in marker tokens."""
    if not 0 <= index < len(tokens):
        raise ValueError(f"predicate index {index} out of range")
    open_m, close_m = PREDICATE_MARKERS
    out = list(tokens)
    out.insert(index + 1, close_m)
    out.insert(index, open_m)
    return out


# ---------------------------------------------------------------------------
# Lemma resolution
# ---------------------------------------------------------------------------

def levenshtein(a: str, b: str) -> int:
    """Classic edit distance (insert, delete, substitute all cost 1)."""
    if a == b:
        return 0
    prev = list(range(len(b) + 1))
    for i, ca in enumerate(a, 1):
        cur = [i]
        for j, cb in enumerate(b, 1):
            cur.append(min(prev[j] + 1, cur[j - 1] + 1, prev[j - 1] + (ca != cb)))
        prev = cur
    return prev[-1]


def resolve_lemma(
    known_lemmas: Iterable[str], predicate_word: str, provided_lemma: str | None = None
) -> str:
    """Map a predicate occurrence onto an inventory lemma.

    A provided lemma that is in the inventory wins; next the lowercased surface
    word; otherwise the inventory lemma at minimum edit distance from the
    lowercased surface word, ties broken by lexicographically smallest lemma.
    """
    keys = set(known_lemmas)
    if not keys:
        raise DataError("cannot resolve a lemma against an empty inventory")
    if provided_lemma is not None and provided_lemma in keys:
        return provided_lemma
    surface = predicate_word.lower()
    if surface in keys:
        return surface
    return min(keys, key=lambda lemma: (levenshtein(surface, lemma), lemma))


# ---------------------------------------------------------------------------
# Normalized JSON Lines
# ---------------------------------------------------------------------------

def read_normalized(path: str | Path) -> list[Sentence]:
    sentences: list[Sentence] = []
    try:
        lines = Path(path).read_text(encoding="utf-8").splitlines()
    except OSError as exc:
        raise CorpusParseError(f"cannot read {path}: {exc}") from exc
    for lineno, line in enumerate(lines, 1):
        if not line.strip():
            continue
        try:
            record = json.loads(line)
        except json.JSONDecodeError as exc:
            raise CorpusParseError(f"{path}:{lineno}: bad JSON: {exc}") from exc
        try:
            sentences.append(_sentence_from_record(record))
        except (KeyError, TypeError, ValueError) as exc:
            raise CorpusParseError(f"{path}:{lineno}: {exc}") from exc
    return sentences


def _sentence_from_record(record: dict) -> Sentence:
    tokens = record["tokens"]
    if not isinstance(tokens, list) or not all(isinstance(t, str) for t in tokens):
        raise ValueError("tokens must be a list of strings")
    predicates = []
    for p in record.get("predicates", ()):
        args = tuple(
            Argument(start=a["start"], end=a["end"], role=a["role"]) for a in p.get("args", ())
        )
        predicates.append(
            Predicate(index=p["index"], lemma=p.get("lemma"), sense=p.get("sense"), args=args)
        )
    return Sentence(
        sent_id=str(record["id"]), tokens=tuple(tokens), predicates=tuple(predicates)
    )


def write_normalized(sentences: Iterable[Sentence], path: str | Path) -> None:
    with open(path, "w", encoding="utf-8") as fh:
        for sent in sentences:
            fh.write(json.dumps(sentence_to_record(sent)) + "\n")


def sentence_to_record(sent: Sentence) -> dict:
    return {
        "id": sent.sent_id,
        "tokens": list(sent.tokens),
        "predicates": [
            {
                "index": p.index,
                "lemma": p.lemma,
                "sense": p.sense,
                "args": [{"start": a.start, "end": a.end, "role": a.role} for a in p.args],
            }
            for p in sent.predicates
        ],
    }


# ---------------------------------------------------------------------------
# Span-style CoNLL columns
# ---------------------------------------------------------------------------
#
# Column 0 is the token, column 1 the target field ("-" for non-predicates,
# otherwise a lemma or lemma.NN), and columns 2+ hold one bracket field per
# predicate in row order. "(A0*" opens a span, "*" continues it, "*)" closes.
# V/C-V fields mark the predicate word itself and are not arguments; an AM-
# marker after the optional R-/C- prefix is dropped from modifier labels.

def _parse_bracket_label(raw: str) -> str | None:
    """Role string for an opening bracket label; None when it marks the verb."""
    prefix = ""
    rest = raw
    if rest[:2] in ("R-", "C-"):
        prefix, rest = rest[:2], rest[2:]
    if rest == "V":
        return None
    if rest.startswith("AM-"):
        rest = rest[3:]
    return prefix + rest


def read_conll_span(path: str | Path) -> list[Sentence]:
    sentences: list[Sentence] = []
    for sidx, rows in enumerate(_blocks(path)):
        loc = f"{path}: sentence {sidx}"
        tokens = tuple(r[0] for r in rows)
        targets = [r[1] if len(r) > 1 else "-" for r in rows]
        pred_rows = [i for i, t in enumerate(targets) if t != "-"]
        width = 2 + len(pred_rows)
        for i, r in enumerate(rows):
            if len(r) != width:
                raise CorpusParseError(
                    f"{loc}, row {i}: expected {width} columns for {len(pred_rows)} "
                    f"predicates, got {len(r)}"
                )
        predicates = []
        for k, pi in enumerate(pred_rows):
            lemma, sense = _split_target(targets[pi])
            args = _column_to_args(loc, [r[2 + k] for r in rows])
            predicates.append(Predicate(index=pi, lemma=lemma, sense=sense, args=tuple(args)))
        try:
            sentences.append(
                Sentence(sent_id=f"s{sidx}", tokens=tokens, predicates=tuple(predicates))
            )
        except ValueError as exc:
            raise CorpusParseError(f"{loc}: {exc}") from exc
    return sentences


def _split_target(target: str) -> tuple[str, str | None]:
    m = _SENSE_RE.match(target)
    if m:
        return m.group("lemma"), target
    return target, None


def _column_to_args(loc: str, fields: list[str]) -> list[Argument]:
    args: list[Argument] = []
    open_role: str | None = None
    open_start = 0
    for i, cell in enumerate(fields):
        body = cell
        if body.startswith("("):
            if open_role is not None:
                raise CorpusParseError(f"{loc}, row {i}: nested span open")
            body = body[1:]
            if "*" not in body:
                raise CorpusParseError(f"{loc}, row {i}: malformed bracket field {cell!r}")
            label_end = body.index("*")
            open_role = _parse_bracket_label(body[:label_end]) or "__V__"
            open_start = i
            body = body[label_end:]
        if body not in ("*", "*)"):
            raise CorpusParseError(f"{loc}, row {i}: malformed bracket field {cell!r}")
        if body == "*)":
            if open_role is None:
                raise CorpusParseError(f"{loc}, row {i}: span close without open")
            if open_role != "__V__":
                try:
                    args.append(Argument(start=open_start, end=i, role=open_role))
                except ValueError as exc:
                    raise CorpusParseError(f"{loc}, row {i}: {exc}") from exc
            open_role = None
    if open_role is not None:
        raise CorpusParseError(f"{loc}: span still open at sentence end")
    return args


def write_conll_span(sentences: Iterable[Sentence], path: str | Path) -> None:
    with open(path, "w", encoding="utf-8") as fh:
        for sent in sentences:
            fields = [["*"] * len(sent.tokens) for _ in sent.predicates]
            targets = ["-"] * len(sent.tokens)
            for k, pred in enumerate(sent.predicates):
                targets[pred.index] = pred.sense or pred.lemma or "-"
                fields[k][pred.index] = "(V*)"
                for arg in pred.args:
                    label = _bracket_label(arg.role)
                    if arg.start == arg.end:
                        fields[k][arg.start] = f"({label}*)"
                    else:
                        fields[k][arg.start] = f"({label}*"
                        fields[k][arg.end] = "*)"
            for i, token in enumerate(sent.tokens):
                row = [token, targets[i]] + [fields[k][i] for k in range(len(sent.predicates))]
                fh.write("\t".join(row) + "\n")
            fh.write("\n")


def _bracket_label(role: str) -> str:
    label = RoleLabel.parse(role)
    base = label.base if label.is_core else f"AM-{label.base}"
    return base if label.prefix == "N" else f"{label.prefix}-{base}"


# ---------------------------------------------------------------------------
# Dependency-style CoNLL columns (width-1 argument spans)
# ---------------------------------------------------------------------------
#
# Fourteen fixed columns then one argument column per predicate:
# ID FORM LEMMA PLEMMA POS PPOS FEAT PFEAT HEAD PHEAD DEPREL PDEPREL
# FILLPRED PRED APRED1 ... A "Y" in FILLPRED marks a predicate row whose
# sense id sits in PRED; the k-th such row owns argument column 14+k.

_DEP_FIXED = 14


def read_conll_dep(path: str | Path) -> list[Sentence]:
    sentences: list[Sentence] = []
    for sidx, rows in enumerate(_blocks(path)):
        loc = f"{path}: sentence {sidx}"
        for i, r in enumerate(rows):
            if len(r) < 2:
                raise CorpusParseError(f"{loc}, row {i}: fewer than 2 columns")
        tokens = tuple(r[1] for r in rows)
        pred_rows = [i for i, r in enumerate(rows) if len(r) > 12 and r[12] == "Y"]
        width = _DEP_FIXED + len(pred_rows)
        for i, r in enumerate(rows):
            if len(r) < width:
                raise CorpusParseError(
                    f"{loc}, row {i}: expected at least {width} columns for "
                    f"{len(pred_rows)} predicates, got {len(r)}"
                )
        predicates = []
        for k, pi in enumerate(pred_rows):
            row = rows[pi]
            sense = row[13] if row[13] != "_" else None
            if sense is not None and not _SENSE_RE.match(sense):
                raise CorpusParseError(f"{loc}, row {pi}: bad sense id {sense!r} in PRED column")
            if sense is not None:
                lemma: str | None = _SENSE_RE.match(sense).group("lemma")
            else:
                lemma = row[2] if row[2] != "_" else (row[3] if row[3] != "_" else None)
            args = []
            for i, r in enumerate(rows):
                cell = r[_DEP_FIXED + k]
                if cell == "_":
                    continue
                role = _parse_bracket_label(cell)
                if role is None:
                    continue
                try:
                    args.append(Argument(start=i, end=i, role=role))
                except ValueError as exc:
                    raise CorpusParseError(f"{loc}, row {i}: {exc}") from exc
            predicates.append(Predicate(index=pi, lemma=lemma, sense=sense, args=tuple(args)))
        try:
            sentences.append(
                Sentence(sent_id=f"s{sidx}", tokens=tokens, predicates=tuple(predicates))
            )
        except ValueError as exc:
            raise CorpusParseError(f"{loc}: {exc}") from exc
    return sentences


def write_conll_dep(sentences: Iterable[Sentence], path: str | Path) -> None:
    with open(path, "w", encoding="utf-8") as fh:
        for sent in sentences:
            n_preds = len(sent.predicates)
            for i, token in enumerate(sent.tokens):
                row = [str(i + 1), token] + ["_"] * (12 + n_preds)
                for k, pred in enumerate(sent.predicates):
                    if pred.index == i:
                        row[2] = pred.lemma or "_"
                        row[12] = "Y"
                        row[13] = pred.sense or "_"
                    for arg in pred.args:
                        if arg.start == i:
                            if arg.start != arg.end:
                                raise DataError(
                                    f"sentence {sent.sent_id!r}: span ({arg.start}, {arg.end}) "
                                    "is wider than one token; dependency columns hold width-1 "
                                    "spans only"
                                )
                            row[_DEP_FIXED + k] = arg.role
                fh.write("\t".join(row) + "\n")
            fh.write("\n")


# ---------------------------------------------------------------------------
# Format dispatch and the instance layer
# ---------------------------------------------------------------------------

def _blocks(path: str | Path) -> Iterable[list[list[str]]]:
    """Blank-line separated blocks of whitespace-split rows."""
    try:
        text = Path(path).read_text(encoding="utf-8")
    except OSError as exc:
        raise CorpusParseError(f"cannot read {path}: {exc}") from exc
    rows: list[list[str]] = []
    for line in text.splitlines():
        if line.strip():
            rows.append(line.split())
        elif rows:
            yield rows
            rows = []
    if rows:
        yield rows


CORPUS_FORMATS = ("normalized", "conll-span", "conll-dep")

_READERS = {
    "normalized": read_normalized,
    "conll-span": read_conll_span,
    "conll-dep": read_conll_dep,
}
_WRITERS = {
    "normalized": write_normalized,
    "conll-span": write_conll_span,
    "conll-dep": write_conll_dep,
}


def read_sentences(path: str | Path, fmt: str = "normalized") -> list[Sentence]:
    try:
        reader = _READERS[fmt]
    except KeyError:
        raise DataError(
            f"unknown corpus format {fmt!r} (choose from {', '.join(CORPUS_FORMATS)})"
        ) from None
    return reader(path)


def write_sentences(sentences: Iterable[Sentence], path: str | Path, fmt: str = "normalized") -> None:
    try:
        writer = _WRITERS[fmt]
    except KeyError:
        raise DataError(
            f"unknown corpus format {fmt!r} (choose from {', '.join(CORPUS_FORMATS)})"
        ) from None
    writer(sentences, path)


def instances_of(sentences: Iterable[Sentence]) -> list[PredicateInstance]:
    """Flatten sentences into one instance per (sentence, predicate) pair."""
    out: list[PredicateInstance] = []
    for sent in sentences:
        for pred in sent.predicates:
            out.append(
                PredicateInstance(
                    sentence=sent,
                    pred_index=pred.index,
                    lemma=pred.lemma,
                    gold_sense=pred.sense,
                    gold_args=pred.args,
                )
            )
    return out


def read_corpus(path: str | Path, fmt: str = "normalized") -> list[PredicateInstance]:
    """Read a corpus file and flatten it to predicate instances."""
    return instances_of(read_sentences(path, fmt))


def write_predictions(
    instances: Sequence[PredicateInstance],
    predictions: Sequence[Prediction],
    path: str | Path,
) -> None:
    """Write one normalized record per sentence carrying the predicted analyses.

    Instances must arrive grouped by sentence (the order read_corpus produces);
    reading the file back yields instances whose gold fields hold the
    predictions.
    """
    if len(instances) != len(predictions):
        raise DataError(
            f"{len(instances)} instances but {len(predictions)} predictions"
        )
    with open(path, "w", encoding="utf-8") as fh:
        i = 0
        while i < len(instances):
            sent = instances[i].sentence
            preds = []
            while i < len(instances) and instances[i].sentence is sent:
                inst, pred = instances[i], predictions[i]
                preds.append(
                    Predicate(
                        index=inst.pred_index,
                        lemma=inst.lemma,
                        sense=pred.sense,
                        args=tuple(sorted(pred.args)),
                    )
                )
                i += 1
            record = sentence_to_record(
                Sentence(sent_id=sent.sent_id, tokens=sent.tokens, predicates=tuple(preds))
            )
            fh.write(json.dumps(record) + "\n")
