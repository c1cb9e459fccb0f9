"""PropBank-style frame inventories.

Senses and their core-role definitions come from frame files (XML framesets or
the normalized JSON Lines form); modifier roles carry sense-independent
meanings from a default table that a JSON file can override. When one sense id
is defined more than once across the source, the definitions are concatenated
with "; " in source order so the merged text covers every case.
"""
from __future__ import annotations

import json
import re
import xml.etree.ElementTree as ET
from dataclasses import dataclass, field
from pathlib import Path
from typing import Iterable

from .errors import FrameIngestError, RoleUndefinedForSense

CORE_ROLES = ("A0", "A1", "A2", "A3", "A4", "A5", "AA")
PREFIXES = ("N", "R", "C")
MERGE_SEPARATOR = "; "

# Sense-independent modifier meanings; override any entry via a JSON file.
DEFAULT_MODIFIERS = {
    "TMP": "time",
    "LOC": "location",
    "MNR": "manner",
    "CAU": "cause",
    "DIR": "direction",
    "EXT": "extent",
    "PRP": "purpose",
    "ADV": "general-purpose adverbial",
    "DIS": "discourse",
    "MOD": "modal",
    "NEG": "negation",
    "PNC": "purpose not cause",
    "PRD": "secondary predication",
    "REC": "reciprocal",
}

_SENSE_ID_RE = re.compile(r"^(?P<lemma>.+)\.(?P<index>\d{2})$")
_BASE_RE = re.compile(r"^[A-Z][A-Z0-9]*$")
_ROLE_RE = re.compile(r"^(?:(?P<prefix>[RC])-)?(?P<base>[A-Z][A-Z0-9]*)$")


@dataclass(frozen=True, order=True)
class RoleLabel:
    """A semantic role: base label plus its norm/reference/continuation variant.

    The N prefix renders as the bare base ("A1"); R and C render prefixed
    ("R-A1", "C-A1").
    """

    base: str
    prefix: str = "N"

    def __post_init__(self) -> None:
        if self.prefix not in PREFIXES:
            raise ValueError(f"bad role prefix {self.prefix!r}")
        if not _BASE_RE.match(self.base):
            raise ValueError(f"bad role base {self.base!r}")

    @property
    def is_core(self) -> bool:
        return self.base in CORE_ROLES

    def render(self) -> str:
        return self.base if self.prefix == "N" else f"{self.prefix}-{self.base}"

    @classmethod
    def parse(cls, text: str) -> "RoleLabel":
        m = _ROLE_RE.match(text)
        if not m:
            raise ValueError(f"bad role label {text!r} (expected ([RC]-)?BASE)")
        return cls(base=m.group("base"), prefix=m.group("prefix") or "N")


@dataclass(frozen=True)
class SenseEntry:
    """One predicate sense: its id, merged description, and core-role meanings."""

    sense_id: str
    description: str
    core_roles: dict[str, str] = field(default_factory=dict)

    @property
    def lemma(self) -> str:
        return self.sense_id.rsplit(".", 1)[0]


@dataclass(frozen=True)
class FrameInventory:
    """Write-once sense inventory: lemma -> ordered senses, plus modifier meanings."""

    entries: dict[str, list[SenseEntry]]
    modifier_defs: dict[str, str] = field(default_factory=lambda: dict(DEFAULT_MODIFIERS))

    def __contains__(self, lemma: str) -> bool:
        return lemma in self.entries

    def lemmas(self) -> list[str]:
        return list(self.entries)


def senses_of(inv: FrameInventory, lemma: str) -> list[SenseEntry]:
    """All senses of a lemma in frame-file order; empty list when unknown."""
    return list(inv.entries.get(lemma, ()))


def role_description(inv: FrameInventory, sense_id: str, role: RoleLabel) -> str:
    """Description text for a role under a sense.

    The N/R/C prefix is ignored: variants share one description. Core roles
    resolve through the sense entry, non-core roles through the modifier table.
    """
    if role.is_core:
        lemma = sense_id.rsplit(".", 1)[0]
        for entry in inv.entries.get(lemma, ()):
            if entry.sense_id == sense_id:
                try:
                    return entry.core_roles[role.base]
                except KeyError:
                    raise RoleUndefinedForSense(
                        f"role {role.base} is not defined for sense {sense_id}"
                    ) from None
        raise RoleUndefinedForSense(f"unknown sense {sense_id}")
    try:
        return inv.modifier_defs[role.base]
    except KeyError:
        raise RoleUndefinedForSense(
            f"modifier role {role.base} has no entry in the modifier table"
        ) from None


def load_modifiers(path: str | Path | None) -> dict[str, str]:
    """Default modifier table, with entries from a JSON object file layered on top."""
    table = dict(DEFAULT_MODIFIERS)
    if path is not None:
        try:
            loaded = json.loads(Path(path).read_text(encoding="utf-8"))
        except (OSError, json.JSONDecodeError) as exc:
            raise FrameIngestError(f"cannot read modifier table {path}: {exc}") from exc
        if not isinstance(loaded, dict) or not all(
            isinstance(k, str) and isinstance(v, str) for k, v in loaded.items()
        ):
            raise FrameIngestError(f"modifier table {path} must be a JSON object of strings")
        table.update(loaded)
    return table


# ---------------------------------------------------------------------------
# Ingestion
# ---------------------------------------------------------------------------

# A raw definition block before merging: (sense_id, description, roles).
_RawSense = tuple[str, str, dict[str, str]]


def ingest_frames(source: str | Path, modifiers: str | Path | None = None) -> FrameInventory:
    """Ingest frame files into an immutable inventory.

    ``source`` is a directory of PropBank frameset XMLs, a single ``.xml``
    file, or a normalized ``.jsonl`` file. Repeated definitions of one sense id
    merge in source order (see module docstring).
    """
    source = Path(source)
    raws: list[_RawSense] = []
    if source.is_dir():
        files = sorted(source.glob("*.xml"))
        if not files:
            raise FrameIngestError(f"no .xml frame files under {source}")
        for f in files:
            raws.extend(_parse_frameset_xml(f))
    elif source.suffix == ".xml":
        raws.extend(_parse_frameset_xml(source))
    else:
        raws.extend(_parse_normalized(source))
    return FrameInventory(entries=_merge(raws), modifier_defs=load_modifiers(modifiers))


def _parse_frameset_xml(path: Path) -> list[_RawSense]:
    try:
        root = ET.parse(path).getroot()
    except (ET.ParseError, OSError) as exc:
        raise FrameIngestError(f"{path}: {exc}") from exc
    raws: list[_RawSense] = []
    for roleset in root.iter("roleset"):
        sense_id = roleset.get("id", "")
        if not _SENSE_ID_RE.match(sense_id):
            raise FrameIngestError(f"{path}: roleset id {sense_id!r} is not of the form lemma.NN")
        description = (roleset.get("name") or "").strip()
        if not description:
            raise FrameIngestError(f"{path}: roleset {sense_id} has no sense description")
        roles: dict[str, str] = {}
        for role in roleset.iter("role"):
            n = (role.get("n") or "").strip().upper()
            if n in ("M", ""):  # modifier placeholders live in the guidelines table
                continue
            base = "AA" if n == "A" else f"A{n}"
            if base not in CORE_ROLES:
                raise FrameIngestError(f"{path}: roleset {sense_id} has unknown role n={n!r}")
            if base in roles:
                raise FrameIngestError(f"{path}: roleset {sense_id} defines role {base} twice")
            descr = (role.get("descr") or "").strip()
            if not descr:
                raise FrameIngestError(f"{path}: roleset {sense_id} role {base} has no description")
            roles[base] = descr
        raws.append((sense_id, description, roles))
    if not raws:
        raise FrameIngestError(f"{path}: no roleset records found")
    return raws


def _parse_normalized(path: Path) -> list[_RawSense]:
    raws: list[_RawSense] = []
    try:
        lines = Path(path).read_text(encoding="utf-8").splitlines()
    except OSError as exc:
        raise FrameIngestError(f"cannot read {path}: {exc}") from exc
    for lineno, line in enumerate(lines, 1):
        if not line.strip():
            continue
        try:
            record = json.loads(line)
            lemma = record["lemma"]
            senses = record["senses"]
        except (json.JSONDecodeError, KeyError, TypeError) as exc:
            raise FrameIngestError(f"{path}:{lineno}: bad frame record: {exc}") from exc
        for sense in senses:
            try:
                sense_id = sense["id"]
                description = sense["description"]
                roles = dict(sense.get("roles", {}))
            except (KeyError, TypeError) as exc:
                raise FrameIngestError(f"{path}:{lineno}: bad sense record: {exc}") from exc
            m = _SENSE_ID_RE.match(sense_id)
            if not m or m.group("lemma") != lemma:
                raise FrameIngestError(
                    f"{path}:{lineno}: sense id {sense_id!r} does not belong to lemma {lemma!r}"
                )
            if not description:
                raise FrameIngestError(f"{path}:{lineno}: sense {sense_id} has empty description")
            for base, text in roles.items():
                if base not in CORE_ROLES or not text:
                    raise FrameIngestError(
                        f"{path}:{lineno}: sense {sense_id} has bad core role {base!r}"
                    )
            raws.append((sense_id, description, roles))
    return raws


def _merge(raws: Iterable[_RawSense]) -> dict[str, list[SenseEntry]]:
    # Group by sense id, preserving first-appearance order of lemmas and senses.
    order: list[str] = []
    grouped: dict[str, list[_RawSense]] = {}
    for raw in raws:
        sid = raw[0]
        if sid not in grouped:
            grouped[sid] = []
            order.append(sid)
        grouped[sid].append(raw)

    entries: dict[str, list[SenseEntry]] = {}
    for sid in order:
        blocks = grouped[sid]
        description = MERGE_SEPARATOR.join(desc for _, desc, _ in blocks)
        roles: dict[str, list[str]] = {}
        for _, _, block_roles in blocks:
            for base, text in block_roles.items():
                roles.setdefault(base, []).append(text)
        merged_roles = {base: MERGE_SEPARATOR.join(texts) for base, texts in roles.items()}
        lemma = sid.rsplit(".", 1)[0]
        entries.setdefault(lemma, []).append(
            SenseEntry(sense_id=sid, description=description, core_roles=merged_roles)
        )
    return entries


def write_frames(inv: FrameInventory, path: str | Path) -> None:
    """Write the inventory in the normalized JSON Lines form (one lemma per line)."""
    with open(path, "w", encoding="utf-8") as fh:
        for lemma, senses in inv.entries.items():
            record = {
                "lemma": lemma,
                "senses": [
                    {"id": s.sense_id, "description": s.description, "roles": dict(s.core_roles)}
                    for s in senses
                ],
            }
            fh.write(json.dumps(record) + "\n")
