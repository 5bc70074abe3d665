"""Feed parsing, auto-tagging, and catalog ingestion.

Feeds are UTF-8 JSON (one array, or one object per line). Records are
normalized into catalog items, tagged against a controlled vocabulary,
and deduplicated on (normalized title, start_date); stp_id is a stable
hash of that key, so ingestion is reproducible across machines. One bad
record never aborts a feed: it becomes a rejection with its index and
reason.
"""

from __future__ import annotations

import hashlib
import json
import re
from dataclasses import dataclass
from datetime import date, datetime
from typing import TYPE_CHECKING, Any, Iterable, Mapping, Sequence

from .domain import StpItem, ValidationError, normalize_token, utc_now

if TYPE_CHECKING:
    from .persistence import Repository

JSON_ARRAY = "json-array"
JSON_LINES = "json-lines"

_REQUIRED_FIELDS = ("title", "provider", "start_date")
_OPTIONAL_STRING_FIELDS = ("url", "description")


class FeedParseError(ValueError):
    """The feed as a whole is unreadable (bad encoding or syntax)."""


@dataclass(frozen=True)
class FeedRecord:
    title: str
    provider: str
    start_date: date
    end_date: date | None = None
    url: str | None = None
    description: str | None = None
    explicit_tags: tuple[str, ...] = ()


@dataclass(frozen=True)
class Rejection:
    index: int
    reason: str


@dataclass(frozen=True)
class IngestReport:
    added: int
    duplicates_skipped: int
    rejected: tuple[Rejection, ...] = ()

    @property
    def total(self) -> int:
        return self.added + self.duplicates_skipped + len(self.rejected)

    def to_dict(self) -> dict[str, Any]:
        return {
            "added": self.added,
            "duplicates_skipped": self.duplicates_skipped,
            "rejected": [{"index": r.index, "reason": r.reason} for r in self.rejected],
        }


class TagVocabulary:
    """Mapping of normalized tag token to trigger phrases.

    A record earns a tag when any trigger phrase appears, case-
    insensitively and on word boundaries, in its title or description.
    """

    def __init__(self, triggers: Mapping[str, Sequence[str]] | None = None):
        triggers = triggers or {}
        self._patterns: dict[str, list[re.Pattern[str]]] = {}
        for raw_tag, phrases in triggers.items():
            tag = normalize_token(raw_tag)
            if tag in self._patterns:
                raise ValidationError(f"duplicate tag token after normalization: {tag!r}")
            compiled = []
            for phrase in phrases:
                phrase = phrase.strip()
                if not phrase:
                    raise ValidationError(f"tag {tag!r} has an empty trigger phrase")
                compiled.append(
                    re.compile(rf"\b{re.escape(phrase)}\b", re.IGNORECASE)
                )
            self._patterns[tag] = compiled

    @classmethod
    def from_json_file(cls, path: str) -> "TagVocabulary":
        with open(path, "r", encoding="utf-8") as handle:
            try:
                data = json.load(handle)
            except json.JSONDecodeError as exc:
                raise ValidationError(f"vocabulary file {path} is not valid JSON: {exc}") from exc
        if not isinstance(data, dict):
            raise ValidationError("vocabulary file must be a JSON object of tag -> phrases")
        return cls(data)

    def tags(self) -> list[str]:
        return sorted(self._patterns)

    def matching_tags(self, text: str) -> set[str]:
        return {
            tag
            for tag, patterns in self._patterns.items()
            if any(p.search(text) for p in patterns)
        }


def detect_format(data: bytes) -> str:
    """json-array when the first non-whitespace byte is '[', else json-lines."""
    stripped = data.lstrip()
    return JSON_ARRAY if stripped.startswith(b"[") else JSON_LINES


def derive_stp_id(normalized_title: str, start_date: date) -> str:
    """Stable hex id from the dedup key; identical on every machine."""
    digest = hashlib.sha256(
        f"{normalized_title}|{start_date.isoformat()}".encode("utf-8")
    )
    return digest.hexdigest()[:16]


def _parse_date(value: Any, field_name: str) -> date:
    if not isinstance(value, str):
        raise ValueError(f"invalid date in {field_name}: {value!r}")
    try:
        return date.fromisoformat(value)
    except ValueError:
        raise ValueError(f"invalid date in {field_name}: {value!r}") from None


def _parse_record(obj: Any) -> FeedRecord:
    if not isinstance(obj, dict):
        raise ValueError("record is not a JSON object")
    for name in _REQUIRED_FIELDS:
        value = obj.get(name)
        if value is None or (isinstance(value, str) and not value.strip()):
            raise ValueError(f"missing required field: {name}")
    if not isinstance(obj["title"], str) or not isinstance(obj["provider"], str):
        raise ValueError("title and provider must be strings")

    start = _parse_date(obj["start_date"], "start_date")
    end = None
    if obj.get("end_date") is not None:
        end = _parse_date(obj["end_date"], "end_date")
        if end < start:
            raise ValueError(f"end_date {end} is before start_date {start}")

    extras: dict[str, str | None] = {}
    for name in _OPTIONAL_STRING_FIELDS:
        value = obj.get(name)
        if value is not None and not isinstance(value, str):
            raise ValueError(f"{name} must be a string")
        extras[name] = value

    raw_tags = obj.get("explicit_tags") or []
    if not isinstance(raw_tags, list) or not all(isinstance(t, str) for t in raw_tags):
        raise ValueError("explicit_tags must be a list of strings")

    return FeedRecord(
        title=obj["title"].strip(),
        provider=obj["provider"].strip(),
        start_date=start,
        end_date=end,
        url=extras["url"],
        description=extras["description"],
        explicit_tags=tuple(raw_tags),
    )


def parse_feed(data: bytes, fmt: str = JSON_ARRAY) -> tuple[list[FeedRecord], list[Rejection]]:
    """Parse a feed into records plus per-record rejections.

    Raises FeedParseError when the file itself cannot be read (undecodable
    bytes, or a json-array feed whose top level is malformed).
    """
    try:
        text = data.decode("utf-8")
    except UnicodeDecodeError as exc:
        raise FeedParseError(f"feed is not valid UTF-8: {exc}") from exc

    raw_records: list[Any]
    if fmt == JSON_ARRAY:
        try:
            parsed = json.loads(text)
        except json.JSONDecodeError as exc:
            raise FeedParseError(f"feed is not valid JSON: {exc}") from exc
        if not isinstance(parsed, list):
            raise FeedParseError("json-array feed must be a top-level array")
        raw_records = parsed
    elif fmt == JSON_LINES:
        raw_records = []
        for line in text.splitlines():
            if line.strip():
                raw_records.append(line)
    else:
        raise FeedParseError(f"unknown feed format: {fmt!r}")

    records: list[FeedRecord] = []
    rejections: list[Rejection] = []
    for index, raw in enumerate(raw_records):
        if fmt == JSON_LINES:  # decode each line independently
            try:
                raw = json.loads(raw)
            except json.JSONDecodeError as exc:
                rejections.append(Rejection(index, f"invalid JSON: {exc.msg}"))
                continue
        try:
            records.append(_parse_record(raw))
        except ValueError as exc:
            rejections.append(Rejection(index, str(exc)))
    return records, rejections


def auto_tag(record: FeedRecord, vocab: TagVocabulary) -> frozenset[str]:
    """Union of the record's explicit tags (normalized) and every vocabulary
    tag triggered by its title or description."""
    tags = set()
    for raw in record.explicit_tags:
        tags.add(normalize_token(raw))
    for text in (record.title, record.description or ""):
        tags |= vocab.matching_tags(text)
    return frozenset(tags)


def ingest(
    records: Iterable[FeedRecord],
    vocab: TagVocabulary,
    repo: "Repository",
    *,
    source: str = "feed",
    now: datetime | None = None,
    parse_rejections: Sequence[Rejection] = (),
) -> IngestReport:
    """Normalize records into catalog items and append the new ones.

    Records whose dedup key already exists (in the catalog or earlier in
    this feed) count as duplicates and are left untouched. The write is
    all-or-nothing: a persistence failure leaves the catalog unchanged.
    """
    ingested_at = now or utc_now()
    seen_keys = {item.dedup_key() for item in repo.snapshot.items}

    new_items: list[StpItem] = []
    added = 0
    duplicates = 0
    for record in records:
        key = (normalize_token(record.title), record.start_date)
        if key in seen_keys:
            duplicates += 1
            continue
        seen_keys.add(key)
        new_items.append(
            StpItem(
                stp_id=derive_stp_id(*key),
                title=record.title,
                provider=record.provider,
                start_date=record.start_date,
                end_date=record.end_date,
                url=record.url,
                description=record.description,
                tags=auto_tag(record, vocab),
                source=source,
                ingested_at=ingested_at,
            )
        )
        added += 1

    if new_items:
        repo.add_items(new_items)
    return IngestReport(
        added=added,
        duplicates_skipped=duplicates,
        rejected=tuple(parse_rejections),
    )


def ingest_feed(
    data: bytes,
    vocab: TagVocabulary,
    repo: "Repository",
    *,
    source: str = "feed",
    fmt: str | None = None,
    now: datetime | None = None,
) -> IngestReport:
    """Parse and ingest a raw feed; the report partitions every record."""
    records, rejections = parse_feed(data, fmt or detect_format(data))
    return ingest(
        records,
        vocab,
        repo,
        source=source,
        now=now,
        parse_rejections=rejections,
    )
