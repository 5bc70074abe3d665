"""Profile similarity and nearest-neighbour selection."""

from __future__ import annotations

import random
from dataclasses import replace

import pytest
from hypothesis import given
from hypothesis import strategies as st

from stp_recommender.domain import ValidationError, make_faculty_profile
from stp_recommender.similarity import (
    SimilarityParams,
    nearest_neighbors,
    profile_similarity,
)

from .conftest import FIXED_TS, _COLLEGES, _TOKEN_POOL


def _profile(fid, college, programs=(), interests=(), expertise=()):
    return make_faculty_profile(
        fid, fid.title(), college, programs, interests, expertise, created_at=FIXED_TS
    )


profiles = st.builds(
    _profile,
    st.uuids().map(lambda u: f"u{u.hex[:8]}"),
    st.sampled_from(_COLLEGES),
    st.sets(st.sampled_from(_TOKEN_POOL), max_size=4),
    st.sets(st.sampled_from(_TOKEN_POOL), max_size=4),
    st.sets(st.sampled_from(_TOKEN_POOL), max_size=3),
)


def test_published_profile_pair_similarity(josh, benjie):
    # college equal, programs 1/3, interests 1/4, expertise excluded:
    # (0.25 * 1) + (0.375 / 3) + (0.375 / 4)
    assert profile_similarity(josh, benjie) == pytest.approx(0.46875, abs=1e-12)
    assert profile_similarity(benjie, josh) == pytest.approx(0.46875, abs=1e-12)


def test_identity_is_exactly_one(josh, benjie, carla):
    for profile in (josh, benjie, carla):
        assert profile_similarity(profile, profile) == 1.0


def test_disjoint_profiles_score_zero(josh, carla):
    assert profile_similarity(josh, carla) == 0.0


def test_component_empty_on_one_side_scores_zero():
    a = _profile("a", "cabeihm", interests=["finance"], expertise=["auditing"])
    b = _profile("b", "cabeihm", interests=["finance"])
    # college 1, programs excluded, interests 1, expertise 0 on one side:
    # weights renormalize to 0.2/0.3/0.2 over 0.7
    expected = (0.2 * 1 + 0.3 * 1 + 0.2 * 0) / 0.7
    assert profile_similarity(a, b) == pytest.approx(expected, abs=1e-12)


def test_all_set_components_empty_reduces_to_college():
    a = _profile("a", "cabeihm")
    b = _profile("b", "cabeihm")
    c = _profile("c", "cics")
    assert profile_similarity(a, b) == 1.0
    assert profile_similarity(a, c) == 0.0


@given(profiles, profiles)
def test_similarity_is_symmetric(a, b):
    assert profile_similarity(a, b) == profile_similarity(b, a)


@given(profiles, profiles)
def test_similarity_in_unit_interval(a, b):
    value = profile_similarity(a, b)
    assert 0.0 <= value <= 1.0


@given(profiles, profiles)
def test_adding_shared_interest_never_decreases(a, b):
    before = profile_similarity(a, b)
    token = "brand-new-shared-token"  # outside the sampled pool by construction
    a2 = replace(a, interests=a.interests | {token})
    b2 = replace(b, interests=b.interests | {token})
    assert profile_similarity(a2, b2) >= before


def test_custom_weights_change_the_blend(josh, benjie):
    params = SimilarityParams(
        weight_college=0.7,
        weight_programs=0.1,
        weight_interests=0.1,
        weight_expertise=0.1,
    )
    # college 1, programs 1/3, interests 1/4, expertise excluded -> /0.9
    expected = (0.7 + 0.1 / 3 + 0.1 / 4) / 0.9
    assert profile_similarity(josh, benjie, params) == pytest.approx(expected, abs=1e-12)


def test_params_validation():
    with pytest.raises(ValidationError):
        SimilarityParams(weight_college=-0.1, weight_programs=0.5, weight_interests=0.3, weight_expertise=0.3)
    with pytest.raises(ValidationError):
        SimilarityParams(weight_college=0.5, weight_programs=0.5, weight_interests=0.5, weight_expertise=0.5)
    with pytest.raises(ValidationError):
        SimilarityParams(k_neighbors=0)


def test_neighbors_worked_example(josh, benjie, carla):
    result = nearest_neighbors(josh, [benjie, carla])
    assert result == [("benjie", pytest.approx(0.46875, abs=1e-12))]


def test_neighbors_empty_population(josh):
    assert nearest_neighbors(josh, []) == []


def test_neighbors_excludes_self(josh, benjie):
    result = nearest_neighbors(josh, [josh, benjie])
    assert [fid for fid, _ in result] == ["benjie"]


def test_neighbors_tie_broken_by_id():
    target = _profile("target", "cabeihm", interests=["finance"])
    twin_b = _profile("bbb", "cabeihm", interests=["finance"])
    twin_a = _profile("aaa", "cabeihm", interests=["finance"])
    result = nearest_neighbors(target, [twin_b, twin_a])
    assert [fid for fid, _ in result] == ["aaa", "bbb"]


def test_neighbors_truncates_to_k():
    target = _profile("target", "cabeihm", interests=["finance"])
    population = [
        _profile(f"p{i}", "cabeihm", interests=["finance"]) for i in range(8)
    ]
    result = nearest_neighbors(target, population, SimilarityParams(k_neighbors=3))
    assert len(result) == 3


def test_neighbors_prefix_of_brute_force_sort():
    """Output must equal the first k of the full similarity-sorted population."""
    rng = random.Random(7)
    for trial in range(25):
        population = [
            _profile(
                f"p{i:02d}",
                rng.choice(_COLLEGES),
                rng.sample(_TOKEN_POOL, rng.randint(0, 3)),
                rng.sample(_TOKEN_POOL, rng.randint(0, 4)),
                rng.sample(_TOKEN_POOL, rng.randint(0, 2)),
            )
            for i in range(rng.randint(0, 20))
        ]
        target = _profile(
            "target",
            rng.choice(_COLLEGES),
            rng.sample(_TOKEN_POOL, 2),
            rng.sample(_TOKEN_POOL, 3),
        )
        k = rng.randint(1, 6)
        params = SimilarityParams(k_neighbors=k)

        full = sorted(
            (
                (p.faculty_id, profile_similarity(target, p, params))
                for p in population
                if profile_similarity(target, p, params) > 0
            ),
            key=lambda pair: (-pair[1], pair[0]),
        )
        assert nearest_neighbors(target, population, params) == full[:k]
