"""Service/CLI configuration: one JSON file plus flag overrides."""

from __future__ import annotations

import json
from dataclasses import dataclass, field
from pathlib import Path

from .domain import ValidationError
from .recommender import RecommendParams
from .similarity import SimilarityParams

_KNOWN_KEYS = {
    "port",
    "data_path",
    "vocab_path",
    "default_alpha",
    "default_k_neighbors",
    "default_limit",
    "similarity_weights",
}
_WEIGHT_KEYS = {"college", "programs", "interests", "expertise"}


@dataclass(frozen=True)
class AppConfig:
    port: int = 8000
    data_path: str = "stp-state.json"
    vocab_path: str | None = None
    default_alpha: float = 0.5
    default_k_neighbors: int = 5
    default_limit: int = 10
    similarity_weights: dict[str, float] = field(
        default_factory=lambda: {
            "college": 0.2,
            "programs": 0.3,
            "interests": 0.3,
            "expertise": 0.2,
        }
    )

    def similarity_params(self) -> SimilarityParams:
        return SimilarityParams(
            weight_college=self.similarity_weights["college"],
            weight_programs=self.similarity_weights["programs"],
            weight_interests=self.similarity_weights["interests"],
            weight_expertise=self.similarity_weights["expertise"],
            k_neighbors=self.default_k_neighbors,
        )

    def recommend_params(
        self,
        alpha: float | None = None,
        limit: int | None = None,
        include_past_items: bool = False,
    ) -> RecommendParams:
        return RecommendParams(
            alpha=self.default_alpha if alpha is None else alpha,
            limit=self.default_limit if limit is None else limit,
            include_past_items=include_past_items,
            similarity=self.similarity_params(),
        )


def load_config(path: str | Path) -> AppConfig:
    """Read a config file, rejecting unknown keys so typos surface early."""
    with open(path, "r", encoding="utf-8") as handle:
        try:
            raw = json.load(handle)
        except json.JSONDecodeError as exc:
            raise ValidationError(f"config file {path} is not valid JSON: {exc}") from exc
    if not isinstance(raw, dict):
        raise ValidationError(f"config file {path} must hold a JSON object")

    unknown = set(raw) - _KNOWN_KEYS
    if unknown:
        raise ValidationError(f"unknown config keys: {sorted(unknown)}")

    weights = dict(AppConfig().similarity_weights)
    if "similarity_weights" in raw:
        given = raw["similarity_weights"]
        if not isinstance(given, dict) or set(given) - _WEIGHT_KEYS:
            raise ValidationError(
                f"similarity_weights must map {sorted(_WEIGHT_KEYS)} to numbers"
            )
        weights.update(given)

    config = AppConfig(
        port=raw.get("port", AppConfig.port),
        data_path=raw.get("data_path", AppConfig.data_path),
        vocab_path=raw.get("vocab_path"),
        default_alpha=raw.get("default_alpha", AppConfig.default_alpha),
        default_k_neighbors=raw.get("default_k_neighbors", AppConfig.default_k_neighbors),
        default_limit=raw.get("default_limit", AppConfig.default_limit),
        similarity_weights=weights,
    )
    config.similarity_params()  # fail fast on invalid weights / k
    config.recommend_params()
    return config
