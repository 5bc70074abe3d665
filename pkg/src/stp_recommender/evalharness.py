"""Offline evaluation: synthetic populations, leave-one-out hit rate, and
an independent brute-force recommendation oracle.

Synthetic data comes from a counter-based generator so the same spec
always yields the same snapshot on any machine: every draw is
splitmix64(seed, stream, entity-index, draw-index) mapped to [0, 1).
Faculty and items are assigned round-robin to clusters with disjoint
vocabularies; likes fall with probability like_prob inside a cluster and
like_prob / 10 across clusters.

oracle_recommend() re-derives scores from the raw definitions with none
of the production scoring code, so equivalence tests mean something.
"""

from __future__ import annotations

from dataclasses import dataclass, replace
from datetime import date, datetime, timedelta, timezone
from typing import Any

from .domain import (
    FacultyProfile,
    LikeEvent,
    Recommendation,
    StpItem,
    ValidationError,
    normalize_token,
)
from .ingestion import derive_stp_id
from .persistence import StateSnapshot, sort_snapshot, validate_snapshot
from .recommender import RecommendParams, recommend
from .similarity import SimilarityParams

_MASK64 = (1 << 64) - 1

# Draw streams keep interests, tags, and likes statistically independent.
_STREAM_INTERESTS = 1
_STREAM_TAGS = 2
_STREAM_LIKES = 3

_EPOCH = datetime(2030, 1, 1, tzinfo=timezone.utc)
_FIRST_START = date(2030, 1, 1)


def _splitmix64(x: int) -> int:
    z = (x + 0x9E3779B97F4A7C15) & _MASK64
    z = ((z ^ (z >> 30)) * 0xBF58476D1CE4E5B9) & _MASK64
    z = ((z ^ (z >> 27)) * 0x94D049BB133111EB) & _MASK64
    return (z ^ (z >> 31)) & _MASK64


def rng_unit(seed: int, stream: int, entity: int, draw: int) -> float:
    """Deterministic uniform draw in [0, 1) for (seed, stream, entity, draw)."""
    h = _splitmix64(seed & _MASK64)
    for part in (stream, entity, draw):
        h = _splitmix64(h ^ (part & _MASK64))
    return (h >> 11) / float(1 << 53)


@dataclass(frozen=True)
class SyntheticSpec:
    seed: int
    n_faculty: int
    n_items: int
    n_clusters: int
    like_prob: float
    vocab_per_cluster: int = 6
    interests_per_faculty: int = 3
    tags_per_item: int = 2

    def __post_init__(self) -> None:
        violations = []
        if self.n_clusters < 1:
            violations.append("n_clusters must be >= 1")
        if self.n_faculty < self.n_clusters:
            violations.append("n_faculty must be >= n_clusters")
        if min(self.n_faculty, self.n_items, self.vocab_per_cluster) < 1:
            violations.append("counts must be positive")
        if self.interests_per_faculty < 1 or self.tags_per_item < 1:
            violations.append("counts must be positive")
        if not 0.0 <= self.like_prob <= 1.0:
            violations.append("like_prob must be in [0, 1]")
        if violations:
            raise ValidationError(violations)


@dataclass(frozen=True)
class EvalResult:
    k: int
    hit_rate: float
    random_baseline: float
    lift: float
    n_trials: int

    def to_dict(self) -> dict[str, Any]:
        return {
            "k": self.k,
            "hit_rate": self.hit_rate,
            "random_baseline": self.random_baseline,
            "lift": self.lift,
            "n_trials": self.n_trials,
        }


def _draw_distinct(
    seed: int, stream: int, entity: int, pool: list[str], count: int
) -> frozenset[str]:
    # Rank the pool by per-element draws and keep the lowest `count`.
    ranked = sorted(
        range(len(pool)), key=lambda idx: rng_unit(seed, stream, entity, idx)
    )
    return frozenset(pool[idx] for idx in ranked[: min(count, len(pool))])


def generate_population(spec: SyntheticSpec) -> StateSnapshot:
    """Deterministic clustered snapshot for a spec; same spec, same bytes."""
    cluster_vocab = [
        [f"c{cluster}-topic-{t}" for t in range(spec.vocab_per_cluster)]
        for cluster in range(spec.n_clusters)
    ]

    faculty = []
    faculty_cluster = []
    for i in range(spec.n_faculty):
        cluster = i % spec.n_clusters
        faculty_cluster.append(cluster)
        faculty.append(
            FacultyProfile(
                faculty_id=f"f{i:04d}",
                name=f"Faculty {i:04d}",
                college=f"college-{cluster}",
                programs=frozenset(),
                interests=_draw_distinct(
                    spec.seed,
                    _STREAM_INTERESTS,
                    i,
                    cluster_vocab[cluster],
                    spec.interests_per_faculty,
                ),
                expertise=frozenset(),
                created_at=_EPOCH,
                updated_at=_EPOCH,
            )
        )

    items = []
    item_cluster = []
    for j in range(spec.n_items):
        cluster = j % spec.n_clusters
        item_cluster.append(cluster)
        title = f"Synthetic Program {j:04d}"
        start = _FIRST_START + timedelta(days=j % 365)
        items.append(
            StpItem(
                stp_id=derive_stp_id(normalize_token(title), start),
                title=title,
                provider="synthetic",
                start_date=start,
                end_date=None,
                url=None,
                description=None,
                tags=_draw_distinct(
                    spec.seed,
                    _STREAM_TAGS,
                    j,
                    cluster_vocab[cluster],
                    spec.tags_per_item,
                ),
                source="synthetic",
                ingested_at=_EPOCH,
            )
        )

    likes = []
    for i in range(spec.n_faculty):
        for j in range(spec.n_items):
            same_cluster = faculty_cluster[i] == item_cluster[j]
            prob = spec.like_prob if same_cluster else spec.like_prob / 10.0
            pair_index = i * spec.n_items + j
            if rng_unit(spec.seed, _STREAM_LIKES, pair_index, 0) < prob:
                likes.append(
                    LikeEvent(
                        faculty_id=faculty[i].faculty_id,
                        stp_id=items[j].stp_id,
                        liked_at=_EPOCH + timedelta(minutes=pair_index),
                    )
                )

    state = sort_snapshot(
        StateSnapshot(
            faculty=tuple(faculty),
            items=tuple(items),
            likes=tuple(likes),
        )
    )
    violations = validate_snapshot(state)
    if violations:  # only reachable if the generator itself is broken
        raise ValidationError(violations)
    return state


def leave_one_out(state: StateSnapshot, params: RecommendParams, k: int) -> EvalResult:
    """Hide one like per eligible faculty and test whether the hidden item
    comes back in their top k.

    Eligible faculty have at least two likes; the hidden like is the one
    with the lexicographically smallest stp_id so reruns are stable. The
    random baseline is k over the mean candidate-set size.
    """
    if k < 1:
        raise ValidationError("k must be >= 1")
    likes_by_faculty: dict[str, list[LikeEvent]] = {}
    for like in state.likes:
        likes_by_faculty.setdefault(like.faculty_id, []).append(like)

    eligible = {
        fid: likes for fid, likes in likes_by_faculty.items() if len(likes) >= 2
    }
    if not eligible:
        raise ValidationError("insufficient likes")

    profiles = state.faculty_by_id()
    catalog_ids = {item.stp_id for item in state.items}
    attended: dict[str, set[str]] = {}
    for record in state.attendance:
        attended.setdefault(record.faculty_id, set()).add(record.stp_id)

    trial_params = replace(params, limit=k, include_past_items=True)
    hits = 0
    candidate_total = 0
    trials = 0
    for faculty_id in sorted(eligible):
        hidden = min(like.stp_id for like in eligible[faculty_id])
        remaining_likes = tuple(
            like
            for like in state.likes
            if not (like.faculty_id == faculty_id and like.stp_id == hidden)
        )
        excluded = {
            like.stp_id for like in remaining_likes if like.faculty_id == faculty_id
        }
        excluded |= attended.get(faculty_id, set())
        candidate_total += len(catalog_ids - excluded)

        feed = recommend(
            profiles[faculty_id],
            state.items,
            state.faculty,
            remaining_likes,
            state.attendance,
            trial_params,
            today=_FIRST_START,
        )
        if any(rec.stp_id == hidden for rec in feed):
            hits += 1
        trials += 1

    hit_rate = hits / trials
    mean_candidates = candidate_total / trials
    random_baseline = min(1.0, k / mean_candidates) if mean_candidates > 0 else 0.0
    lift = hit_rate / random_baseline if random_baseline > 0 else 0.0
    return EvalResult(
        k=k,
        hit_rate=hit_rate,
        random_baseline=random_baseline,
        lift=lift,
        n_trials=trials,
    )


# --- independent oracle --------------------------------------------------------
#
# Everything below re-derives scoring from first principles on purpose.
# It shares only the data types with the production path; if the two ever
# disagree, one of them is wrong.


def _oracle_overlap(left: frozenset[str], right: frozenset[str]) -> float:
    shared = 0
    for token in left:
        if token in right:
            shared += 1
    union_size = len(left) + len(right) - shared
    return shared / union_size


def _oracle_similarity(
    a: FacultyProfile, b: FacultyProfile, params: SimilarityParams
) -> float:
    total = 0.0
    weight_used = 0.0

    total += params.weight_college if a.college == b.college else 0.0
    weight_used += params.weight_college

    for weight, left, right in (
        (params.weight_programs, a.programs, b.programs),
        (params.weight_interests, a.interests, b.interests),
        (params.weight_expertise, a.expertise, b.expertise),
    ):
        if len(left) == 0 and len(right) == 0:
            continue
        weight_used += weight
        if len(left) == 0 or len(right) == 0:
            continue
        total += weight * _oracle_overlap(left, right)

    return total / weight_used


def oracle_recommend(
    u: FacultyProfile,
    state: StateSnapshot,
    params: RecommendParams,
    today: date = _FIRST_START,
) -> list[Recommendation]:
    """Exhaustive reference scorer for small states; same contract as
    recommend(), none of its internals."""
    ranked_neighbors = []
    for other in state.faculty:
        if other.faculty_id == u.faculty_id:
            continue
        sim = _oracle_similarity(u, other, params.similarity)
        if sim > 0.0:
            ranked_neighbors.append((other.faculty_id, sim))
    ranked_neighbors.sort(key=lambda pair: (-pair[1], pair[0]))
    ranked_neighbors = ranked_neighbors[: params.similarity.k_neighbors]

    likes_of: dict[str, set[str]] = {}
    for like in state.likes:
        likes_of.setdefault(like.faculty_id, set()).add(like.stp_id)

    own = set(likes_of.get(u.faculty_id, set()))
    for record in state.attendance:
        if record.faculty_id == u.faculty_id:
            own.add(record.stp_id)

    terms = set(u.programs) | set(u.interests) | set(u.expertise)
    terms.add(u.college)

    results: list[tuple[Recommendation, date]] = []
    for item in state.items:
        if item.stp_id in own:
            continue
        if not params.include_past_items and item.start_date < today:
            continue

        if len(item.tags) == 0:
            content = 0.0
        else:
            matched = [tag for tag in item.tags if tag in terms]
            content = len(matched) / len(item.tags)

        sim_sum = 0.0
        liked_sum = 0.0
        supporters = []
        for neighbor_id, sim in ranked_neighbors:
            sim_sum += sim
            if item.stp_id in likes_of.get(neighbor_id, set()):
                liked_sum += sim
                supporters.append((neighbor_id, sim))
        collab = liked_sum / sim_sum if sim_sum > 0.0 else 0.0

        score = params.alpha * content + (1.0 - params.alpha) * collab
        if score == 0.0:
            continue
        results.append(
            (
                Recommendation(
                    stp_id=item.stp_id,
                    score=score,
                    content_component=content,
                    collab_component=collab,
                    matched_terms=tuple(sorted(tag for tag in item.tags if tag in terms)),
                    contributing_neighbors=tuple(supporters),
                ),
                item.start_date,
            )
        )

    results.sort(key=lambda entry: (-entry[0].score, entry[1], entry[0].stp_id))
    return [rec for rec, _ in results[: params.limit]]
