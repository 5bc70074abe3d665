"""Hybrid scoring and ranking of catalog items for one faculty member.

Blends a content component (how much of an item's tag set matches the
profile's terms) with a neighborhood collaborative component (similarity-
weighted vote of the k nearest faculty who liked the item). Works for
first-time users out of the box: their profile content plus their
neighbors' historical likes already produce a ranked feed.
"""

from __future__ import annotations

from dataclasses import dataclass
from datetime import date
from typing import Iterable, Sequence

from .domain import (
    AttendanceRecord,
    FacultyProfile,
    LikeEvent,
    Recommendation,
    StpItem,
    ValidationError,
)
from .similarity import SimilarityParams, nearest_neighbors


@dataclass(frozen=True)
class RecommendParams:
    alpha: float = 0.5  # weight of the content component
    limit: int = 10
    include_past_items: bool = False
    similarity: SimilarityParams = SimilarityParams()

    def __post_init__(self) -> None:
        violations = []
        if not 0.0 <= self.alpha <= 1.0:
            violations.append(f"alpha must be in [0, 1], got {self.alpha}")
        if self.limit < 1:
            violations.append(f"limit must be >= 1, got {self.limit}")
        if violations:
            raise ValidationError(violations)


def profile_terms(u: FacultyProfile) -> frozenset[str]:
    """All tokens a profile can match against: programs, interests,
    expertise, and the college token itself."""
    return u.programs | u.interests | u.expertise | {u.college}


def content_score(u: FacultyProfile, item: StpItem) -> float:
    """Fraction of the item's tags present in the profile's terms;
    0.0 for untagged items."""
    if not item.tags:
        return 0.0
    return len(item.tags & profile_terms(u)) / len(item.tags)


def collab_score(
    item: StpItem,
    neighbors: Sequence[tuple[str, float]],
    likes: Iterable[LikeEvent],
) -> float:
    """Similarity-weighted fraction of neighbors that liked the item;
    0.0 when there are no neighbors."""
    liked_pairs = {like.pair() for like in likes}
    return _collab_from_pairs(item.stp_id, neighbors, liked_pairs)


def _collab_from_pairs(
    stp_id: str,
    neighbors: Sequence[tuple[str, float]],
    liked_pairs: set[tuple[str, str]],
) -> float:
    if not neighbors:
        return 0.0
    numerator = 0.0
    denominator = 0.0
    for faculty_id, sim in neighbors:
        denominator += sim
        if (faculty_id, stp_id) in liked_pairs:
            numerator += sim
    if denominator == 0.0:
        return 0.0
    return numerator / denominator


def recommend(
    u: FacultyProfile,
    catalog: Iterable[StpItem],
    population: Iterable[FacultyProfile],
    likes: Iterable[LikeEvent],
    attendance: Iterable[AttendanceRecord],
    params: RecommendParams,
    today: date,
) -> list[Recommendation]:
    """Score and rank the catalog for ``u``.

    Candidates are catalog items the user has neither liked nor attended,
    excluding items that started before ``today`` unless
    params.include_past_items. Each candidate scores
    alpha * content + (1 - alpha) * collab; zero-scored candidates are
    dropped. Sorted by score descending, then start_date ascending, then
    stp_id ascending, truncated to params.limit. Deterministic for a
    fixed state, params, and today.
    """
    likes = list(likes)
    neighbors = nearest_neighbors(u, population, params.similarity)
    liked_pairs = {like.pair() for like in likes}

    excluded = {stp_id for fid, stp_id in liked_pairs if fid == u.faculty_id}
    excluded.update(
        rec.stp_id for rec in attendance if rec.faculty_id == u.faculty_id
    )

    terms = profile_terms(u)
    scored: list[tuple[Recommendation, date]] = []
    for item in catalog:
        if item.stp_id in excluded:
            continue
        if not params.include_past_items and item.start_date < today:
            continue
        content = content_score(u, item)
        collab = _collab_from_pairs(item.stp_id, neighbors, liked_pairs)
        score = params.alpha * content + (1.0 - params.alpha) * collab
        if score == 0.0:
            continue
        scored.append(
            (
                Recommendation(
                    stp_id=item.stp_id,
                    score=score,
                    content_component=content,
                    collab_component=collab,
                    matched_terms=tuple(sorted(item.tags & terms)),
                    contributing_neighbors=tuple(
                        (fid, sim)
                        for fid, sim in neighbors
                        if (fid, item.stp_id) in liked_pairs
                    ),
                ),
                item.start_date,
            )
        )

    scored.sort(key=lambda entry: (-entry[0].score, entry[1], entry[0].stp_id))
    return [rec for rec, _ in scored[: params.limit]]
