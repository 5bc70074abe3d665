"""Seminar and training program recommender for higher-education faculty.

Faculty maintain profiles (college, programs, interests, expertise); the
engine blends content-tag matching with k-nearest-neighbour collaborative
filtering over like events, administrators ingest catalog feeds, and
attendance rolls up into consolidated reports.
"""

from .domain import (
    AttendanceRecord,
    FacultyProfile,
    LikeEvent,
    Recommendation,
    StpItem,
    TokenError,
    ValidationError,
    make_faculty_profile,
    normalize_token,
    normalize_token_set,
)
from .persistence import Repository, StateSnapshot, load_state, save_state
from .recommender import RecommendParams, recommend
from .similarity import SimilarityParams, nearest_neighbors, profile_similarity

__version__ = "0.1.0"

__all__ = [
    "AttendanceRecord",
    "FacultyProfile",
    "LikeEvent",
    "Recommendation",
    "RecommendParams",
    "Repository",
    "SimilarityParams",
    "StateSnapshot",
    "StpItem",
    "TokenError",
    "ValidationError",
    "load_state",
    "make_faculty_profile",
    "nearest_neighbors",
    "normalize_token",
    "normalize_token_set",
    "profile_similarity",
    "recommend",
    "save_state",
]
