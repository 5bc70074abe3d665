"""Likert survey arithmetic: weighted means, composites, interpretation
bands, and competition ranking.

All rounding is half-up at two decimals and happens exactly once, at
output; intermediates stay exact (integer sums and Decimal division).
The band edges use half-open intervals so every mean in [1.00, 5.00]
lands in exactly one band.
"""

from __future__ import annotations

from dataclasses import dataclass
from decimal import ROUND_HALF_UP, Decimal
from typing import Iterable, Mapping, Sequence

from .domain import ValidationError

_CENT = Decimal("0.01")


def _round2(value: Decimal) -> float:
    return float(value.quantize(_CENT, rounding=ROUND_HALF_UP))


@dataclass(frozen=True)
class LikertResponseSet:
    """Responses to one survey item as a value -> count frequency map."""

    item_text: str
    counts: Mapping[int, int]

    def __post_init__(self) -> None:
        violations = []
        for value, count in self.counts.items():
            if value not in (1, 2, 3, 4, 5):
                violations.append(f"response value {value!r} outside 1..5")
            if not isinstance(count, int) or count < 0:
                violations.append(f"count for value {value!r} must be a non-negative integer")
        if not violations and self.total() < 1:
            violations.append("at least one response is required")
        if violations:
            raise ValidationError(violations)

    @classmethod
    def from_responses(cls, item_text: str, responses: Iterable[int]) -> "LikertResponseSet":
        counts: dict[int, int] = {}
        for value in responses:
            counts[value] = counts.get(value, 0) + 1
        return cls(item_text=item_text, counts=counts)

    def total(self) -> int:
        return sum(self.counts.values())


@dataclass(frozen=True)
class InterpretationScale:
    """Five (lower, upper, label) bands covering [1.00, 5.00]."""

    name: str
    bands: tuple[tuple[Decimal, Decimal, str], ...]

    def __post_init__(self) -> None:
        if len(self.bands) != 5:
            raise ValidationError("a scale needs exactly five bands")
        if self.bands[0][0] != Decimal("1.00") or self.bands[-1][1] != Decimal("5.00"):
            raise ValidationError("bands must cover [1.00, 5.00]")
        for (_, upper, _), (lower, _, _) in zip(self.bands, self.bands[1:]):
            if upper != lower:
                raise ValidationError("bands must tile without gap or overlap")


def _scale(name: str, labels: Sequence[str]) -> InterpretationScale:
    edges = [Decimal(e) for e in ("1.00", "1.81", "2.61", "3.41", "4.21", "5.00")]
    return InterpretationScale(
        name=name,
        bands=tuple(
            (edges[i], edges[i + 1], labels[i]) for i in range(5)
        ),
    )


ACCEPTANCE_SCALE = _scale(
    "acceptance",
    (
        "Not Acceptable",
        "Slightly Acceptable",
        "Acceptable",
        "Moderately Acceptable",
        "Highly Acceptable",
    ),
)

OCCURRENCE_SCALE = _scale(
    "occurrence",
    (
        "Never Encountered",
        "Rarely Encountered",
        "Sometimes Encountered",
        "Often Encountered",
        "Always Encountered",
    ),
)

SCALES = {scale.name: scale for scale in (ACCEPTANCE_SCALE, OCCURRENCE_SCALE)}


def weighted_mean(responses: LikertResponseSet) -> float:
    """Sum(value * count) / Sum(count), rounded half-up to 2 decimals."""
    total = responses.total()
    weighted = sum(value * count for value, count in responses.counts.items())
    return _round2(Decimal(weighted) / Decimal(total))


def composite_mean(component_means: Sequence[float]) -> float:
    """Unweighted mean of per-item means, rounded half-up to 2 decimals."""
    if not component_means:
        raise ValidationError("composite mean requires at least one component")
    total = sum(Decimal(str(m)) for m in component_means)
    return _round2(total / Decimal(len(component_means)))


def interpret(mean: float, scale: InterpretationScale) -> str:
    """Label for the band containing ``mean``; the top band is closed."""
    value = Decimal(str(mean))
    if value < Decimal("1.00") or value > Decimal("5.00"):
        raise ValidationError(f"mean {mean} outside [1.00, 5.00]")
    for lower, upper, label in scale.bands:
        if lower <= value < upper:
            return label
    return scale.bands[-1][2]  # value == 5.00


def rank_by_mean(items: Sequence[tuple[str, float]]) -> list[tuple[str, float, int]]:
    """Competition-rank items by mean, highest first.

    Ties share the smaller rank and the next rank is skipped; order within
    a tie follows input order. Returns (text, mean, rank) triples sorted
    for display.
    """
    if not items:
        raise ValidationError("ranking requires at least one item")
    ordered = sorted(
        range(len(items)), key=lambda i: (-items[i][1], i)
    )
    ranked: list[tuple[str, float, int]] = []
    rank = 0
    previous_mean: float | None = None
    for position, index in enumerate(ordered, start=1):
        text, mean = items[index]
        if mean != previous_mean:
            rank = position
            previous_mean = mean
        ranked.append((text, mean, rank))
    return ranked


@dataclass(frozen=True)
class SurveyRow:
    item_text: str
    mean: float
    interpretation: str
    rank: int


@dataclass(frozen=True)
class SurveyTable:
    rows: tuple[SurveyRow, ...]
    composite_mean: float
    composite_interpretation: str

    def to_dict(self) -> dict:
        return {
            "rows": [
                {
                    "item_text": row.item_text,
                    "mean": row.mean,
                    "interpretation": row.interpretation,
                    "rank": row.rank,
                }
                for row in self.rows
            ],
            "composite_mean": self.composite_mean,
            "composite_interpretation": self.composite_interpretation,
        }


def tabulate(
    response_sets: Sequence[LikertResponseSet],
    scale: InterpretationScale,
) -> SurveyTable:
    """Means, interpretations, ranks, and the composite for a whole survey,
    rows ordered by rank as the published tables print them."""
    means = [weighted_mean(r) for r in response_sets]
    ranked = rank_by_mean([(r.item_text, m) for r, m in zip(response_sets, means)])
    composite = composite_mean(means)
    return SurveyTable(
        rows=tuple(
            SurveyRow(text, mean, interpret(mean, scale), rank)
            for text, mean, rank in ranked
        ),
        composite_mean=composite,
        composite_interpretation=interpret(composite, scale),
    )
