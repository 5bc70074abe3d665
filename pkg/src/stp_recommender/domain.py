"""Core domain types for the STP recommender.

Everything here is an immutable value: profiles, catalog items, like
events, attendance records, and scored recommendations. Every token that
feeds similarity or content matching passes through :func:`normalize_token`
so that spellings like "BS Accountancy" and "bs-accountancy" unify.
"""

from __future__ import annotations

import re
from dataclasses import dataclass
from datetime import date, datetime, timezone
from typing import Iterable

_WHITESPACE_RUN = re.compile(r"\s+")


class ValidationError(ValueError):
    """A domain value violates an invariant.

    Carries every violation found, not just the first, so callers can
    report them all at once.
    """

    def __init__(self, violations: list[str] | str):
        if isinstance(violations, str):
            violations = [violations]
        self.violations: list[str] = list(violations)
        super().__init__("; ".join(self.violations))


class TokenError(ValidationError):
    """A string normalized to an empty token."""


def utc_now() -> datetime:
    return datetime.now(timezone.utc)


def normalize_token(raw: str) -> str:
    """Lowercase ``raw``, trim it, and collapse whitespace runs to hyphens.

    Raises TokenError when nothing is left after normalization.
    """
    token = _WHITESPACE_RUN.sub("-", raw.strip().lower())
    if not token:
        raise TokenError(f"token normalizes to empty: {raw!r}")
    return token


def normalize_token_set(raw: Iterable[str]) -> frozenset[str]:
    """Normalize every entry; duplicates collapse by set semantics."""
    return frozenset(normalize_token(t) for t in raw)


def _is_normalized(token: str) -> bool:
    return bool(token) and _WHITESPACE_RUN.sub("-", token.strip().lower()) == token


def _token_violations(field: str, tokens: frozenset[str]) -> list[str]:
    return [
        f"{field}: token {t!r} is not normalized"
        for t in sorted(tokens)
        if not _is_normalized(t)
    ]


@dataclass(frozen=True)
class FacultyProfile:
    """A faculty member's identity plus the normalized term sets that
    drive similarity and content matching."""

    faculty_id: str
    name: str
    college: str
    programs: frozenset[str]
    interests: frozenset[str]
    expertise: frozenset[str]
    created_at: datetime
    updated_at: datetime

    def violations(self) -> list[str]:
        out: list[str] = []
        if not self.faculty_id:
            out.append("faculty_id must be non-empty")
        if not self.name.strip():
            out.append("name must be non-empty")
        if not _is_normalized(self.college):
            out.append(f"college must be a non-empty normalized token, got {self.college!r}")
        for field in ("programs", "interests", "expertise"):
            out.extend(_token_violations(field, getattr(self, field)))
        return out


@dataclass(frozen=True)
class StpItem:
    """One seminar/training-program catalog entry.

    Identity for deduplication is (normalized title, start_date); the
    ingestion module derives stp_id from that key.
    """

    stp_id: str
    title: str
    provider: str
    start_date: date
    end_date: date | None
    url: str | None
    description: str | None
    tags: frozenset[str]
    source: str
    ingested_at: datetime

    def dedup_key(self) -> tuple[str, date]:
        return (normalize_token(self.title), self.start_date)

    def violations(self) -> list[str]:
        out: list[str] = []
        if not self.stp_id:
            out.append("stp_id must be non-empty")
        if not self.title.strip():
            out.append("title must be non-empty")
        if not self.provider.strip():
            out.append("provider must be non-empty")
        if self.end_date is not None and self.end_date < self.start_date:
            out.append(
                f"end_date {self.end_date} is before start_date {self.start_date}"
            )
        out.extend(_token_violations("tags", self.tags))
        return out


@dataclass(frozen=True)
class LikeEvent:
    """A (faculty, item, time) endorsement; the collaborative signal."""

    faculty_id: str
    stp_id: str
    liked_at: datetime

    def pair(self) -> tuple[str, str]:
        return (self.faculty_id, self.stp_id)


@dataclass(frozen=True)
class AttendanceRecord:
    """One attended STP, possibly recorded retroactively."""

    faculty_id: str
    stp_id: str
    date_attended: date
    remarks: str | None = None


@dataclass(frozen=True)
class Recommendation:
    """A scored, explained feed entry.

    score blends the content and collaborative components; matched_terms
    and contributing_neighbors exist so every recommendation can say why
    it was made.
    """

    stp_id: str
    score: float
    content_component: float
    collab_component: float
    matched_terms: tuple[str, ...]
    contributing_neighbors: tuple[tuple[str, float], ...]


def make_faculty_profile(
    faculty_id: str,
    name: str,
    college: str,
    programs: Iterable[str] = (),
    interests: Iterable[str] = (),
    expertise: Iterable[str] = (),
    *,
    created_at: datetime | None = None,
    updated_at: datetime | None = None,
) -> FacultyProfile:
    """Build a profile from raw strings, normalizing every token.

    Raises ValidationError listing each offending field.
    """
    violations: list[str] = []

    def _normalize_set(field: str, values: Iterable[str]) -> frozenset[str]:
        try:
            return normalize_token_set(values)
        except TokenError:
            violations.append(f"{field} contains a token that normalizes to empty")
            return frozenset()

    try:
        college_token = normalize_token(college)
    except TokenError:
        college_token = ""

    profile = FacultyProfile(
        faculty_id=faculty_id,
        name=name,
        college=college_token,
        programs=_normalize_set("programs", programs),
        interests=_normalize_set("interests", interests),
        expertise=_normalize_set("expertise", expertise),
        created_at=created_at or utc_now(),
        updated_at=updated_at or created_at or utc_now(),
    )
    violations.extend(profile.violations())
    if violations:
        raise ValidationError(violations)
    return profile
