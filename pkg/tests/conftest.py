"""Shared fixtures: the published worked example (two CABEIHM profiles and
a three-item catalog) plus a seeded random-scenario generator used by the
equivalence and property suites."""

from __future__ import annotations

import random
from datetime import date, datetime, timedelta, timezone

import pytest

from stp_recommender.domain import (
    AttendanceRecord,
    LikeEvent,
    StpItem,
    make_faculty_profile,
)
from stp_recommender.persistence import StateSnapshot, sort_snapshot
from stp_recommender.recommender import RecommendParams
from stp_recommender.similarity import SimilarityParams

FIXED_TS = datetime(2026, 1, 1, 12, 0, 0, tzinfo=timezone.utc)
TODAY = date(2026, 1, 10)

_TOKEN_POOL = (
    "finance",
    "accounting",
    "taxation",
    "entrepreneurship",
    "business-management",
    "networking",
    "data-science",
    "pedagogy",
    "assessment",
    "research-methods",
    "bs-accountancy",
    "bs-hrm",
)
_COLLEGES = ("cabeihm", "cics", "cte")


def make_item(
    stp_id: str,
    title: str,
    tags: set[str],
    start: date,
    end: date | None = None,
    provider: str = "CHED",
) -> StpItem:
    return StpItem(
        stp_id=stp_id,
        title=title,
        provider=provider,
        start_date=start,
        end_date=end,
        url=None,
        description=None,
        tags=frozenset(tags),
        source="test",
        ingested_at=FIXED_TS,
    )


@pytest.fixture
def josh():
    return make_faculty_profile(
        "josh",
        "Josh Magtibay",
        "CABEIHM",
        ["BS-HRM", "BS-Accountancy"],
        ["Accounting", "Finance"],
        created_at=FIXED_TS,
    )


@pytest.fixture
def benjie():
    return make_faculty_profile(
        "benjie",
        "Benjie A Bautista",
        "CABEIHM",
        ["BS-Accountancy", "BS Business Administration"],
        ["Finance", "Entrepreneurship", "Business Management"],
        created_at=FIXED_TS,
    )


@pytest.fixture
def carla():
    return make_faculty_profile(
        "carla",
        "Carla Reyes",
        "CICS",
        ["BS-IT"],
        ["Networking", "Cybersecurity"],
        created_at=FIXED_TS,
    )


@pytest.fixture
def worked_catalog():
    return (
        make_item("f1", "Finance Forum", {"finance"}, date(2026, 2, 1)),
        make_item("t1", "Tax Update", {"accounting", "taxation"}, date(2026, 2, 2)),
        make_item("n1", "Network Security", {"networking"}, date(2026, 2, 3)),
    )


@pytest.fixture
def worked_state(josh, benjie, worked_catalog):
    return sort_snapshot(
        StateSnapshot(
            faculty=(josh, benjie),
            items=worked_catalog,
            likes=(LikeEvent("benjie", "f1", FIXED_TS),),
        )
    )


def random_scenario(seed: int, max_faculty: int = 5, max_items: int = 10):
    """A small random but fully valid state plus params and a pivot date.

    Mixes past and future items, untagged items, likes, and attendance so
    equivalence campaigns hit the edge cases, not just the happy path.
    """
    rng = random.Random(seed)
    n_faculty = rng.randint(1, max_faculty)
    n_items = rng.randint(1, max_items)

    faculty = tuple(
        make_faculty_profile(
            f"u{idx}",
            f"User {idx}",
            rng.choice(_COLLEGES),
            rng.sample(_TOKEN_POOL, rng.randint(0, 3)),
            rng.sample(_TOKEN_POOL, rng.randint(0, 4)),
            rng.sample(_TOKEN_POOL, rng.randint(0, 2)),
            created_at=FIXED_TS,
        )
        for idx in range(n_faculty)
    )

    items = tuple(
        make_item(
            f"s{idx:02d}",
            f"Program {idx}",
            set(rng.sample(_TOKEN_POOL, rng.randint(0, 3))),
            TODAY + timedelta(days=rng.randint(-30, 30)),
        )
        for idx in range(n_items)
    )

    likes = tuple(
        LikeEvent(profile.faculty_id, item.stp_id, FIXED_TS)
        for profile in faculty
        for item in items
        if rng.random() < 0.3
    )
    attendance = tuple(
        AttendanceRecord(
            profile.faculty_id, item.stp_id, TODAY - timedelta(days=rng.randint(0, 60))
        )
        for profile in faculty
        for item in items
        if rng.random() < 0.1
    )

    state = sort_snapshot(
        StateSnapshot(faculty=faculty, items=items, likes=likes, attendance=attendance)
    )
    params = RecommendParams(
        alpha=rng.choice([0.0, 0.25, 0.5, 0.75, 1.0]),
        limit=rng.randint(1, max_items + 2),
        include_past_items=rng.random() < 0.5,
        similarity=SimilarityParams(k_neighbors=rng.randint(1, 6)),
    )
    return state, params, TODAY
