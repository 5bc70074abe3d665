"""Pairwise faculty similarity and k-nearest-neighbour search.

College contributes an exact-match signal; programs, interests, and
expertise contribute Jaccard overlap on normalized token sets. A component
that is empty on both sides drops out and the remaining weights are
renormalized, so profiles are not penalized for fields nobody filled in.
"""

from __future__ import annotations

from dataclasses import dataclass
from typing import Iterable

from .domain import FacultyProfile, ValidationError

_WEIGHT_TOLERANCE = 1e-9


@dataclass(frozen=True)
class SimilarityParams:
    weight_college: float = 0.2
    weight_programs: float = 0.3
    weight_interests: float = 0.3
    weight_expertise: float = 0.2
    k_neighbors: int = 5

    def __post_init__(self) -> None:
        violations = []
        weights = (
            self.weight_college,
            self.weight_programs,
            self.weight_interests,
            self.weight_expertise,
        )
        if any(w < 0 for w in weights):
            violations.append("similarity weights must be >= 0")
        if abs(sum(weights) - 1.0) > _WEIGHT_TOLERANCE:
            violations.append(f"similarity weights must sum to 1, got {sum(weights)}")
        if self.k_neighbors < 1:
            violations.append("k_neighbors must be >= 1")
        if violations:
            raise ValidationError(violations)


def jaccard(a: frozenset[str], b: frozenset[str]) -> float:
    """Jaccard index |a ∩ b| / |a ∪ b|; at least one set must be non-empty."""
    return len(a & b) / len(a | b)


def profile_similarity(
    a: FacultyProfile,
    b: FacultyProfile,
    params: SimilarityParams = SimilarityParams(),
) -> float:
    """Weighted per-component similarity of two profiles, in [0, 1].

    College scores 1 when equal, else 0. Each token-set component scores
    its Jaccard index, is skipped when empty on both sides (weights
    renormalize), and scores 0 when empty on exactly one side. Symmetric
    by construction.
    """
    weighted_sum = 0.0
    weight_total = 0.0

    weighted_sum += params.weight_college * (1.0 if a.college == b.college else 0.0)
    weight_total += params.weight_college

    for weight, left, right in (
        (params.weight_programs, a.programs, b.programs),
        (params.weight_interests, a.interests, b.interests),
        (params.weight_expertise, a.expertise, b.expertise),
    ):
        if not left and not right:
            continue  # excluded: remaining weights renormalize
        if not left or not right:
            weight_total += weight
            continue
        weighted_sum += weight * jaccard(left, right)
        weight_total += weight

    return weighted_sum / weight_total


def nearest_neighbors(
    u: FacultyProfile,
    population: Iterable[FacultyProfile],
    params: SimilarityParams = SimilarityParams(),
) -> list[tuple[str, float]]:
    """At most k_neighbors (faculty_id, similarity) pairs, similarity > 0,
    sorted by similarity descending with ties broken by id ascending."""
    scored = []
    for other in population:
        if other.faculty_id == u.faculty_id:
            continue
        sim = profile_similarity(u, other, params)
        if sim > 0.0:
            scored.append((other.faculty_id, sim))
    scored.sort(key=lambda pair: (-pair[1], pair[0]))
    return scored[: params.k_neighbors]
