"""Newline-delimited JSON feeds: CVE records, exploit references, labels, asset context.

Every loader either returns fully validated records or raises with the
file and line of the first offending record; there are no partially
valid datasets. Files are UTF-8, one JSON object per line.

Field names are fixed: CVE records use ``id``, ``description``,
``vector``, ``score``, ``references`` (each ``{url, source, exploit}``);
labels use ``cve``, ``utility``, ``opportune``, ``labeler``, ``ts``;
asset context uses ``cve``, ``exposure``, ``criticality``; the exploit
reference feed uses ``cve``, ``url``, ``source``, ``exploit``. A
reference's ``exploit`` flag defaults to false when absent, whatever the
source: nothing counts as an exploit unless the feed says so.
"""

from __future__ import annotations

import json
import logging
import os
import re
from dataclasses import dataclass, field, replace
from datetime import datetime, timezone
from enum import Enum
from pathlib import Path
from typing import Iterable, Iterator

from vulnrank.cvss import CvssError, CvssVector, parse_vector

logger = logging.getLogger(__name__)

CVE_ID_RE = re.compile(r"^CVE-\d{4}-\d{4,}$")


class FeedError(ValueError):
    """Base class for feed validation failures."""


class ParseError(FeedError):
    """A line is not valid JSON."""


class SchemaError(FeedError):
    """A record is missing a field or carries an unusable value."""


class DuplicateId(FeedError):
    """The same CVE id appears twice where uniqueness is required."""


class InvalidCategory(FeedError):
    """A label field is outside its legal value set."""


class ReferenceSource(Enum):
    EXPLOITDB = "ExploitDB"
    METASPLOIT = "Metasploit"
    GITHUB = "GitHub"
    OTHER = "Other"


class Exposure(Enum):
    PUBLIC = "Public"
    PRIVATE = "Private"


class Criticality(Enum):
    LOW = "Low"
    MEDIUM = "Medium"
    HIGH = "High"


class Labeler(Enum):
    SME = "SME"
    MODEL = "Model"


@dataclass(frozen=True)
class ReferenceEntry:
    url: str
    source: ReferenceSource
    is_exploit: bool


@dataclass(frozen=True)
class CveRecord:
    cve_id: str
    description: str
    vector: CvssVector | None = None
    published_score: float | None = None
    references: tuple[ReferenceEntry, ...] = ()

    @property
    def scoring_eligible(self) -> bool:
        """True when the record carries a vector or a published score."""
        return self.vector is not None or self.published_score is not None


@dataclass(frozen=True)
class LabeledExample:
    """One triage judgment: utility and opportune categories for a CVE.

    ``description`` is not persisted in label files; it is joined back in
    from the CVE feed when the example is used for training.
    """

    cve_id: str
    utility: int
    opportune: int
    labeler: Labeler
    labeled_at: datetime
    description: str = field(default="", compare=False)

    def __post_init__(self):
        if self.utility not in (0, 1, 2):
            raise InvalidCategory(f"utility must be 0, 1, or 2, got {self.utility!r}")
        if self.opportune not in (0, 1):
            raise InvalidCategory(f"opportune must be 0 or 1, got {self.opportune!r}")


@dataclass(frozen=True)
class AssetContext:
    cve_id: str
    exposure: Exposure
    criticality: Criticality


def _iter_jsonl(path) -> Iterator[tuple[int, dict]]:
    with open(path, "r", encoding="utf-8") as fh:
        for lineno, line in enumerate(fh, start=1):
            if not line.strip():
                continue
            try:
                obj = json.loads(line)
            except json.JSONDecodeError as exc:
                raise ParseError(f"{path}:{lineno}: invalid JSON ({exc.msg})") from None
            if not isinstance(obj, dict):
                raise ParseError(f"{path}:{lineno}: expected an object per line")
            yield lineno, obj


def _require(obj: dict, key: str, where: str):
    if key not in obj or obj[key] is None:
        raise SchemaError(f"{where}: missing field '{key}'")
    return obj[key]


def _cve_id(raw, where: str) -> str:
    if not isinstance(raw, str) or not CVE_ID_RE.match(raw):
        raise SchemaError(f"{where}: '{raw}' is not a CVE id")
    return raw


def _source_of(raw, where: str, unknown: list) -> ReferenceSource:
    try:
        return ReferenceSource(raw)
    except ValueError:
        unknown.append(raw)
        return ReferenceSource.OTHER


def _reference(obj: dict, where: str, unknown: list) -> ReferenceEntry:
    url = _require(obj, "url", where)
    if not isinstance(url, str) or not url:
        raise SchemaError(f"{where}: reference url must be a non-empty string")
    source = _source_of(obj.get("source", "Other"), where, unknown)
    return ReferenceEntry(url=url, source=source, is_exploit=bool(obj.get("exploit", False)))


def load_cve_records(path) -> list[CveRecord]:
    """Load a CVE feed, in file order, rejecting duplicates."""
    records: list[CveRecord] = []
    seen: set[str] = set()
    unknown_sources: list = []
    for lineno, obj in _iter_jsonl(path):
        where = f"{path}:{lineno}"
        cve_id = _cve_id(_require(obj, "id", where), where)
        if cve_id in seen:
            raise DuplicateId(f"{where}: duplicate CVE id {cve_id}")
        seen.add(cve_id)

        description = _require(obj, "description", where)
        if not isinstance(description, str):
            raise SchemaError(f"{where}: description must be a string")

        vector = None
        if obj.get("vector") is not None:
            try:
                vector = parse_vector(obj["vector"])
            except CvssError as exc:
                raise SchemaError(f"{where}: bad vector: {exc}") from None

        score = None
        if obj.get("score") is not None:
            score = obj["score"]
            if not isinstance(score, (int, float)) or not 0 <= score <= 10:
                raise SchemaError(f"{where}: score {score!r} outside [0, 10]")
            score = float(score)

        refs = tuple(
            _reference(r, where, unknown_sources) for r in obj.get("references", [])
        )
        records.append(
            CveRecord(
                cve_id=cve_id,
                description=description,
                vector=vector,
                published_score=score,
                references=refs,
            )
        )
    if unknown_sources:
        logger.warning(
            "%s: %d reference(s) with unknown source downgraded to Other",
            path,
            len(unknown_sources),
        )
    return records


def load_exploit_refs(path) -> dict[str, list[ReferenceEntry]]:
    """Load an exploit reference feed, grouped by CVE and URL-deduplicated.

    Unknown source names are downgraded to Other; one warning with the
    total count is logged per file.
    """
    grouped: dict[str, list[ReferenceEntry]] = {}
    seen_urls: dict[str, set[str]] = {}
    unknown_sources: list = []
    for lineno, obj in _iter_jsonl(path):
        where = f"{path}:{lineno}"
        cve_id = _cve_id(_require(obj, "cve", where), where)
        entry = _reference(obj, where, unknown_sources)
        urls = seen_urls.setdefault(cve_id, set())
        if entry.url in urls:
            continue
        urls.add(entry.url)
        grouped.setdefault(cve_id, []).append(entry)
    if unknown_sources:
        logger.warning(
            "%s: %d reference(s) with unknown source downgraded to Other",
            path,
            len(unknown_sources),
        )
    return grouped


def _parse_ts(raw, where: str) -> datetime:
    if not isinstance(raw, str):
        raise SchemaError(f"{where}: ts must be an ISO-8601 string")
    text = raw[:-1] + "+00:00" if raw.endswith("Z") else raw
    try:
        ts = datetime.fromisoformat(text)
    except ValueError:
        raise SchemaError(f"{where}: ts {raw!r} is not ISO-8601") from None
    if ts.tzinfo is None:
        ts = ts.replace(tzinfo=timezone.utc)
    return ts


def format_ts(ts: datetime) -> str:
    """UTC timestamp in the compact 'Z' form used in label files."""
    return ts.astimezone(timezone.utc).strftime("%Y-%m-%dT%H:%M:%SZ")


def load_labels(path) -> list[LabeledExample]:
    """Load label records as written, including superseded entries."""
    examples: list[LabeledExample] = []
    for lineno, obj in _iter_jsonl(path):
        where = f"{path}:{lineno}"
        cve_id = _cve_id(_require(obj, "cve", where), where)
        utility = _require(obj, "utility", where)
        opportune = _require(obj, "opportune", where)
        if not isinstance(utility, int) or isinstance(utility, bool):
            raise InvalidCategory(f"{where}: utility must be an integer")
        if not isinstance(opportune, int) or isinstance(opportune, bool):
            raise InvalidCategory(f"{where}: opportune must be an integer")
        try:
            labeler = Labeler(_require(obj, "labeler", where))
        except ValueError:
            raise InvalidCategory(f"{where}: labeler must be SME or Model") from None
        ts = _parse_ts(_require(obj, "ts", where), where)
        try:
            examples.append(
                LabeledExample(
                    cve_id=cve_id,
                    utility=utility,
                    opportune=opportune,
                    labeler=labeler,
                    labeled_at=ts,
                )
            )
        except InvalidCategory as exc:
            raise InvalidCategory(f"{where}: {exc}") from None
    return examples


def merge_labels(examples: Iterable[LabeledExample]) -> dict[str, LabeledExample]:
    """Resolve to one effective label per CVE.

    SME judgments always beat model predictions; within the same
    provenance the newest timestamp wins, and on an exact tie the
    later entry in iteration order wins.
    """
    merged: dict[str, LabeledExample] = {}
    for ex in examples:
        current = merged.get(ex.cve_id)
        if current is None:
            merged[ex.cve_id] = ex
            continue
        incoming = (ex.labeler is Labeler.SME, ex.labeled_at)
        existing = (current.labeler is Labeler.SME, current.labeled_at)
        if incoming >= existing:
            merged[ex.cve_id] = ex
    return merged


def save_labels(path, examples: Iterable[LabeledExample]) -> None:
    """Merge the given examples into the label file at ``path``.

    Existing entries are loaded first, so saving is append-safe; the
    result holds one line per CVE, sorted by id.
    """
    path = Path(path)
    existing = load_labels(path) if path.exists() else []
    merged = merge_labels(existing + list(examples))
    lines = []
    for cve_id in sorted(merged):
        ex = merged[cve_id]
        lines.append(
            json.dumps(
                {
                    "cve": ex.cve_id,
                    "utility": ex.utility,
                    "opportune": ex.opportune,
                    "labeler": ex.labeler.value,
                    "ts": format_ts(ex.labeled_at),
                },
                separators=(",", ":"),
            )
        )
    tmp = path.with_suffix(path.suffix + ".tmp")
    with open(tmp, "w", encoding="utf-8") as fh:
        fh.write("\n".join(lines) + ("\n" if lines else ""))
    os.replace(tmp, path)


def load_asset_context(path) -> dict[str, AssetContext]:
    """Load per-CVE exposure and criticality; one entry per CVE."""
    contexts: dict[str, AssetContext] = {}
    for lineno, obj in _iter_jsonl(path):
        where = f"{path}:{lineno}"
        cve_id = _cve_id(_require(obj, "cve", where), where)
        if cve_id in contexts:
            raise DuplicateId(f"{where}: duplicate context entry for {cve_id}")
        try:
            exposure = Exposure(_require(obj, "exposure", where))
            criticality = Criticality(_require(obj, "criticality", where))
        except ValueError:
            raise InvalidCategory(
                f"{where}: exposure must be Public/Private and criticality Low/Medium/High"
            ) from None
        contexts[cve_id] = AssetContext(cve_id=cve_id, exposure=exposure, criticality=criticality)
    return contexts


def attach_descriptions(
    examples: Iterable[LabeledExample], records: Iterable[CveRecord]
) -> list[LabeledExample]:
    """Fill each example's description from the CVE feed.

    Raises SchemaError naming the CVEs that have labels but no feed
    record, since such examples cannot be featurized.
    """
    by_id = {rec.cve_id: rec.description for rec in records}
    out = []
    missing = []
    for ex in examples:
        if ex.cve_id not in by_id:
            missing.append(ex.cve_id)
        else:
            out.append(replace(ex, description=by_id[ex.cve_id]))
    if missing:
        raise SchemaError(f"labeled CVEs absent from the CVE feed: {', '.join(sorted(missing))}")
    return out
