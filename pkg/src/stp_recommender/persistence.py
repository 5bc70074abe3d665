"""Versioned JSON snapshot persistence with atomic writes.

The whole store (profiles, catalog, likes, attendance) lives in one
canonical JSON file: stable key order, records sorted by id, dates ISO
8601. Writes go to a temp file in the same directory and are renamed over
the target, so a crash leaves either the old snapshot or the new one,
never a torn file. Snapshot values are immutable; the Repository is the
single writer and validates every mutation before committing it.
"""

from __future__ import annotations

import json
import os
import tempfile
import threading
from dataclasses import dataclass, replace
from datetime import date, datetime, timezone
from pathlib import Path
from typing import Any, Iterable, Sequence

from .domain import (
    AttendanceRecord,
    FacultyProfile,
    LikeEvent,
    StpItem,
    ValidationError,
    normalize_token,
    normalize_token_set,
    utc_now,
)

SCHEMA_VERSION = 1


class PersistenceError(Exception):
    """Base for state-file problems."""


class StateNotFoundError(PersistenceError):
    """No snapshot exists yet; callers may start fresh."""


class StateParseError(PersistenceError):
    """The snapshot file is not well-formed."""


class UnsupportedSchemaError(PersistenceError):
    """The snapshot declares a schema_version this code does not read."""


class StateValidationError(PersistenceError):
    """The snapshot parsed but violates domain invariants."""

    def __init__(self, violations: Sequence[str]):
        self.violations = list(violations)
        super().__init__("; ".join(self.violations))


class NotFoundError(LookupError):
    """A referenced record does not exist."""


class DuplicateError(ValueError):
    """The mutation would duplicate a unique record."""


@dataclass(frozen=True)
class StateSnapshot:
    """Immutable view of the whole store, safe to share across threads."""

    faculty: tuple[FacultyProfile, ...] = ()
    items: tuple[StpItem, ...] = ()
    likes: tuple[LikeEvent, ...] = ()
    attendance: tuple[AttendanceRecord, ...] = ()
    schema_version: int = SCHEMA_VERSION

    def faculty_by_id(self) -> dict[str, FacultyProfile]:
        return {f.faculty_id: f for f in self.faculty}

    def items_by_id(self) -> dict[str, StpItem]:
        return {i.stp_id: i for i in self.items}

    def like_pairs(self) -> set[tuple[str, str]]:
        return {like.pair() for like in self.likes}

    def counts(self) -> dict[str, int]:
        return {
            "faculty": len(self.faculty),
            "items": len(self.items),
            "likes": len(self.likes),
            "attendance": len(self.attendance),
        }


def sort_snapshot(state: StateSnapshot) -> StateSnapshot:
    """Canonical record order: two equal stores compare and serialize equal."""
    return replace(
        state,
        faculty=tuple(sorted(state.faculty, key=lambda f: f.faculty_id)),
        items=tuple(sorted(state.items, key=lambda i: i.stp_id)),
        likes=tuple(sorted(state.likes, key=lambda l: (l.faculty_id, l.stp_id))),
        attendance=tuple(
            sorted(
                state.attendance,
                key=lambda a: (a.faculty_id, a.stp_id, a.date_attended, a.remarks or ""),
            )
        ),
    )


def validate_snapshot(state: StateSnapshot) -> list[str]:
    """Every invariant violation in the snapshot, empty when valid."""
    violations: list[str] = []

    seen_faculty: set[str] = set()
    for profile in state.faculty:
        violations.extend(
            f"faculty {profile.faculty_id!r}: {v}" for v in profile.violations()
        )
        if profile.faculty_id in seen_faculty:
            violations.append(f"duplicate faculty_id {profile.faculty_id!r}")
        seen_faculty.add(profile.faculty_id)

    seen_items: set[str] = set()
    seen_keys: set[tuple[str, date]] = set()
    for item in state.items:
        violations.extend(f"item {item.stp_id!r}: {v}" for v in item.violations())
        if item.stp_id in seen_items:
            violations.append(f"duplicate stp_id {item.stp_id!r}")
        seen_items.add(item.stp_id)
        if item.title.strip():
            key = item.dedup_key()
            if key in seen_keys:
                violations.append(
                    f"duplicate dedup key (title {key[0]!r}, start {key[1]})"
                )
            seen_keys.add(key)

    seen_pairs: set[tuple[str, str]] = set()
    for like in state.likes:
        pair = like.pair()
        if pair in seen_pairs:
            violations.append(f"duplicate like for pair {pair}")
        seen_pairs.add(pair)
        if like.faculty_id not in seen_faculty:
            violations.append(f"like {pair} references unknown faculty_id")
        if like.stp_id not in seen_items:
            violations.append(f"like {pair} references unknown stp_id")

    for record in state.attendance:
        pair = (record.faculty_id, record.stp_id)
        if record.faculty_id not in seen_faculty:
            violations.append(f"attendance {pair} references unknown faculty_id")
        if record.stp_id not in seen_items:
            violations.append(f"attendance {pair} references unknown stp_id")

    return violations


# --- serialization -----------------------------------------------------------

def _dt_to_str(value: datetime) -> str:
    if value.tzinfo is None:
        value = value.replace(tzinfo=timezone.utc)
    return value.astimezone(timezone.utc).strftime("%Y-%m-%dT%H:%M:%S.%fZ")


def _dt_from_str(value: str) -> datetime:
    text = value.replace("Z", "+00:00") if value.endswith("Z") else value
    parsed = datetime.fromisoformat(text)
    if parsed.tzinfo is None:
        parsed = parsed.replace(tzinfo=timezone.utc)
    return parsed.astimezone(timezone.utc)


def _date_from_str(value: str) -> date:
    return date.fromisoformat(value)


def _faculty_to_dict(profile: FacultyProfile) -> dict[str, Any]:
    return {
        "faculty_id": profile.faculty_id,
        "name": profile.name,
        "college": profile.college,
        "programs": sorted(profile.programs),
        "interests": sorted(profile.interests),
        "expertise": sorted(profile.expertise),
        "created_at": _dt_to_str(profile.created_at),
        "updated_at": _dt_to_str(profile.updated_at),
    }


def _faculty_from_dict(obj: dict[str, Any]) -> FacultyProfile:
    return FacultyProfile(
        faculty_id=obj["faculty_id"],
        name=obj["name"],
        college=obj["college"],
        programs=frozenset(obj["programs"]),
        interests=frozenset(obj["interests"]),
        expertise=frozenset(obj["expertise"]),
        created_at=_dt_from_str(obj["created_at"]),
        updated_at=_dt_from_str(obj["updated_at"]),
    )


def _item_to_dict(item: StpItem) -> dict[str, Any]:
    return {
        "stp_id": item.stp_id,
        "title": item.title,
        "provider": item.provider,
        "start_date": item.start_date.isoformat(),
        "end_date": item.end_date.isoformat() if item.end_date else None,
        "url": item.url,
        "description": item.description,
        "tags": sorted(item.tags),
        "source": item.source,
        "ingested_at": _dt_to_str(item.ingested_at),
    }


def _item_from_dict(obj: dict[str, Any]) -> StpItem:
    return StpItem(
        stp_id=obj["stp_id"],
        title=obj["title"],
        provider=obj["provider"],
        start_date=_date_from_str(obj["start_date"]),
        end_date=_date_from_str(obj["end_date"]) if obj.get("end_date") else None,
        url=obj.get("url"),
        description=obj.get("description"),
        tags=frozenset(obj["tags"]),
        source=obj["source"],
        ingested_at=_dt_from_str(obj["ingested_at"]),
    )


def _like_to_dict(like: LikeEvent) -> dict[str, Any]:
    return {
        "faculty_id": like.faculty_id,
        "stp_id": like.stp_id,
        "liked_at": _dt_to_str(like.liked_at),
    }


def _like_from_dict(obj: dict[str, Any]) -> LikeEvent:
    return LikeEvent(
        faculty_id=obj["faculty_id"],
        stp_id=obj["stp_id"],
        liked_at=_dt_from_str(obj["liked_at"]),
    )


def _attendance_to_dict(record: AttendanceRecord) -> dict[str, Any]:
    return {
        "faculty_id": record.faculty_id,
        "stp_id": record.stp_id,
        "date_attended": record.date_attended.isoformat(),
        "remarks": record.remarks,
    }


def _attendance_from_dict(obj: dict[str, Any]) -> AttendanceRecord:
    return AttendanceRecord(
        faculty_id=obj["faculty_id"],
        stp_id=obj["stp_id"],
        date_attended=_date_from_str(obj["date_attended"]),
        remarks=obj.get("remarks"),
    )


def snapshot_to_document(state: StateSnapshot) -> dict[str, Any]:
    state = sort_snapshot(state)
    return {
        "schema_version": state.schema_version,
        "faculty": [_faculty_to_dict(f) for f in state.faculty],
        "items": [_item_to_dict(i) for i in state.items],
        "likes": [_like_to_dict(l) for l in state.likes],
        "attendance": [_attendance_to_dict(a) for a in state.attendance],
    }


def serialize_snapshot(state: StateSnapshot) -> bytes:
    """Canonical bytes: equal states always serialize byte-identically."""
    document = snapshot_to_document(state)
    return (
        json.dumps(document, ensure_ascii=False, sort_keys=True, indent=2) + "\n"
    ).encode("utf-8")


def save_state(state: StateSnapshot, path: str | Path) -> None:
    """Atomically write the snapshot: temp file, fsync, rename over target."""
    target = Path(path)
    target.parent.mkdir(parents=True, exist_ok=True)
    payload = serialize_snapshot(state)
    fd, tmp_name = tempfile.mkstemp(
        prefix=target.name + ".", suffix=".tmp", dir=target.parent
    )
    try:
        with os.fdopen(fd, "wb") as handle:
            handle.write(payload)
            handle.flush()
            os.fsync(handle.fileno())
        os.replace(tmp_name, target)
    except OSError:
        try:
            os.unlink(tmp_name)
        except OSError:
            pass
        raise


def load_state(path: str | Path) -> StateSnapshot:
    """Load and fully validate a snapshot.

    Raises StateNotFoundError for a missing file (the fresh-start signal),
    StateParseError for malformed files, UnsupportedSchemaError for
    unknown versions, and StateValidationError carrying every invariant
    violation found.
    """
    target = Path(path)
    try:
        raw = target.read_bytes()
    except FileNotFoundError:
        raise StateNotFoundError(f"no state file at {target}") from None

    try:
        document = json.loads(raw.decode("utf-8"))
    except (UnicodeDecodeError, json.JSONDecodeError) as exc:
        raise StateParseError(f"state file {target} is not valid JSON: {exc}") from exc
    if not isinstance(document, dict):
        raise StateParseError(f"state file {target} must hold a JSON object")

    version = document.get("schema_version")
    if version != SCHEMA_VERSION:
        raise UnsupportedSchemaError(
            f"unsupported schema_version {version!r} (expected {SCHEMA_VERSION})"
        )

    try:
        state = StateSnapshot(
            faculty=tuple(_faculty_from_dict(o) for o in document.get("faculty", [])),
            items=tuple(_item_from_dict(o) for o in document.get("items", [])),
            likes=tuple(_like_from_dict(o) for o in document.get("likes", [])),
            attendance=tuple(
                _attendance_from_dict(o) for o in document.get("attendance", [])
            ),
        )
    except (KeyError, TypeError, ValueError) as exc:
        raise StateParseError(f"state file {target} has a malformed record: {exc}") from exc

    violations = validate_snapshot(state)
    if violations:
        raise StateValidationError(violations)
    return sort_snapshot(state)


def load_or_fresh(path: str | Path) -> StateSnapshot:
    try:
        return load_state(path)
    except StateNotFoundError:
        return StateSnapshot()


class Repository:
    """Single-writer store over an in-memory snapshot plus optional file.

    Readers take the current immutable snapshot; every mutation validates
    the candidate state, persists it atomically (when a path is set), and
    only then swaps it in. Mutations serialize on an internal lock.
    """

    def __init__(
        self,
        path: str | Path | None = None,
        state: StateSnapshot | None = None,
        clock=utc_now,
    ):
        self._path = Path(path) if path is not None else None
        self._clock = clock
        self._lock = threading.RLock()
        if state is None:
            state = load_or_fresh(self._path) if self._path else StateSnapshot()
        self._state = sort_snapshot(state)

    @property
    def snapshot(self) -> StateSnapshot:
        return self._state

    @property
    def path(self) -> Path | None:
        return self._path

    def _commit(self, candidate: StateSnapshot) -> None:
        candidate = sort_snapshot(candidate)
        violations = validate_snapshot(candidate)
        if violations:
            raise ValidationError(violations)
        if self._path is not None:
            save_state(candidate, self._path)
        self._state = candidate

    def save(self) -> None:
        """Persist the current snapshot (used to materialize a fresh store)."""
        with self._lock:
            self._commit(self._state)

    # --- faculty -------------------------------------------------------------

    def get_faculty(self, faculty_id: str) -> FacultyProfile:
        profile = self._state.faculty_by_id().get(faculty_id)
        if profile is None:
            raise NotFoundError(f"unknown faculty_id {faculty_id!r}")
        return profile

    def list_faculty(self) -> tuple[FacultyProfile, ...]:
        return self._state.faculty

    def upsert_faculty(
        self,
        faculty_id: str,
        name: str,
        college: str,
        programs: Iterable[str] = (),
        interests: Iterable[str] = (),
        expertise: Iterable[str] = (),
    ) -> FacultyProfile:
        """Create or replace a profile, re-normalizing every token."""
        with self._lock:
            try:
                college_token = normalize_token(college)
            except ValidationError:
                raise ValidationError("college must be non-empty") from None
            existing = self._state.faculty_by_id().get(faculty_id)
            now = self._clock()
            profile = FacultyProfile(
                faculty_id=faculty_id,
                name=name,
                college=college_token,
                programs=normalize_token_set(programs),
                interests=normalize_token_set(interests),
                expertise=normalize_token_set(expertise),
                created_at=existing.created_at if existing else now,
                updated_at=now,
            )
            others = tuple(
                f for f in self._state.faculty if f.faculty_id != faculty_id
            )
            self._commit(replace(self._state, faculty=others + (profile,)))
            return profile

    # --- catalog ---------------------------------------------------------------

    def get_item(self, stp_id: str) -> StpItem:
        item = self._state.items_by_id().get(stp_id)
        if item is None:
            raise NotFoundError(f"unknown stp_id {stp_id!r}")
        return item

    def list_items(self) -> tuple[StpItem, ...]:
        return self._state.items

    def upsert_item(self, item: StpItem) -> StpItem:
        with self._lock:
            others = tuple(i for i in self._state.items if i.stp_id != item.stp_id)
            self._commit(replace(self._state, items=others + (item,)))
            return item

    def add_items(self, items: Sequence[StpItem]) -> None:
        """Append new items in one all-or-nothing commit."""
        with self._lock:
            self._commit(replace(self._state, items=self._state.items + tuple(items)))

    # --- likes -------------------------------------------------------------------

    def add_like(
        self, faculty_id: str, stp_id: str, liked_at: datetime | None = None
    ) -> LikeEvent:
        with self._lock:
            self.get_faculty(faculty_id)
            self.get_item(stp_id)
            if (faculty_id, stp_id) in self._state.like_pairs():
                raise DuplicateError(
                    f"faculty {faculty_id!r} already likes {stp_id!r}"
                )
            like = LikeEvent(faculty_id, stp_id, liked_at or self._clock())
            self._commit(replace(self._state, likes=self._state.likes + (like,)))
            return like

    def remove_like(self, faculty_id: str, stp_id: str) -> None:
        with self._lock:
            remaining = tuple(
                l for l in self._state.likes if l.pair() != (faculty_id, stp_id)
            )
            if len(remaining) == len(self._state.likes):
                raise NotFoundError(
                    f"faculty {faculty_id!r} has no like for {stp_id!r}"
                )
            self._commit(replace(self._state, likes=remaining))

    # --- attendance -----------------------------------------------------------------

    def add_attendance(
        self,
        faculty_id: str,
        stp_id: str,
        date_attended: date,
        remarks: str | None = None,
    ) -> AttendanceRecord:
        with self._lock:
            self.get_faculty(faculty_id)
            self.get_item(stp_id)
            record = AttendanceRecord(faculty_id, stp_id, date_attended, remarks)
            self._commit(
                replace(self._state, attendance=self._state.attendance + (record,))
            )
            return record
