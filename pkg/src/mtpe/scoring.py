"""Segment quality scoring from weighted error annotations.

Each annotation contributes a penalty weight looked up by severity and
category; a segment's penalty is aggregated over raters and mapped onto a
0-100 quality scale where 100 is error-free and 0 is a penalty of 25 or
worse (one non-translation, or five major errors).
"""
from __future__ import annotations

import json
import math
from dataclasses import dataclass
from pathlib import Path

from .corpus import AnnotationSource, ErrorAnnotation, Segment, Severity

# Penalty at or beyond which the normalized quality score bottoms out at 0.
FLOOR_PENALTY = 25.0

DEFAULT_WEIGHTS = {
    "major/non-translation": 25.0,
    "major": 5.0,
    "minor/fluency/punctuation": 0.1,
    "minor": 1.0,
    "neutral": 0.0,
}


@dataclass(frozen=True)
class QualityScore:
    """A segment's raw penalty and its normalized 0-100 quality score."""

    penalty: float
    normalized: float

    @property
    def rendered(self) -> int:
        """The integer form used in prompts (half rounds away from zero)."""
        return int(math.floor(self.normalized + 0.5))


class WeightTable:
    """Penalty weights keyed by ``severity[/category[/subcategory]]``.

    Lookup tries the most specific key first.  Critical severity falls back
    to the corresponding Major row unless the table defines its own critical
    rows or ``critical_as_major`` is disabled.
    """

    def __init__(self, weights: dict[str, float] | None = None, critical_as_major: bool = True):
        raw = DEFAULT_WEIGHTS if weights is None else weights
        self.weights = {key.strip().casefold(): float(value) for key, value in raw.items()}
        self.critical_as_major = critical_as_major

    def _lookup(self, severity_key: str, annotation: ErrorAnnotation) -> float | None:
        keys = [severity_key]
        if annotation.category is not None:
            major = annotation.category.major.casefold()
            keys.insert(0, f"{severity_key}/{major}")
            if annotation.category.sub:
                keys.insert(0, f"{severity_key}/{major}/{annotation.category.sub.casefold()}")
        for key in keys:
            if key in self.weights:
                return self.weights[key]
        return None

    def weight(self, annotation: ErrorAnnotation) -> float:
        """Penalty weight for one annotation.

        Raises:
            ValueError: no row covers the annotation's severity.
        """
        severity_key = annotation.severity.value.casefold()
        found = self._lookup(severity_key, annotation)
        if found is None and annotation.severity is Severity.CRITICAL and self.critical_as_major:
            found = self._lookup(Severity.MAJOR.value.casefold(), annotation)
        if found is None:
            raise ValueError(f"no weight for severity {annotation.severity.value!r}")
        return found


def load_weight_table(path: Path | str, critical_as_major: bool = True) -> WeightTable:
    """Load a weight override table from a JSON object file."""
    data = json.loads(Path(path).read_text(encoding="utf-8"))
    if not isinstance(data, dict):
        raise ValueError(f"{path}: weight table must be a JSON object")
    return WeightTable(data, critical_as_major=critical_as_major)


def segment_penalty(
    segment: Segment,
    table: WeightTable | None = None,
    rater_policy: str = "average",
    source: AnnotationSource | None = None,
) -> float:
    """Total penalty for a segment's annotations.

    ``average`` sums each rater's annotations separately and averages over
    raters (annotations without a rater count as one shared rater);
    ``keep_all`` sums everything.  ``source`` restricts which annotations
    are scored.

    Raises:
        ValueError: unknown ``rater_policy``.
    """
    if table is None:
        table = WeightTable()
    annotations = segment.errors
    if source is not None:
        annotations = segment.annotations_from(source)
    if not annotations:
        return 0.0
    if rater_policy == "keep_all":
        return sum(table.weight(a) for a in annotations)
    if rater_policy == "average":
        by_rater: dict[str, float] = {}
        for a in annotations:
            rater = a.rater or ""
            by_rater[rater] = by_rater.get(rater, 0.0) + table.weight(a)
        return sum(by_rater.values()) / len(by_rater)
    raise ValueError(f"unknown rater policy: {rater_policy!r}")


def normalize(penalty: float) -> float:
    """Map a raw penalty onto the 0-100 quality scale.

    Linear in the penalty: 0 maps to 100, ``FLOOR_PENALTY`` (25) and beyond
    map to 0, clamped at both ends.

    Raises:
        ValueError: negative penalty.
    """
    if penalty < 0:
        raise ValueError(f"penalty must be non-negative, got {penalty}")
    return max(0.0, min(100.0, 100.0 * (1.0 - penalty / FLOOR_PENALTY)))


def score_segment(
    segment: Segment,
    table: WeightTable | None = None,
    rater_policy: str = "average",
    source: AnnotationSource | None = None,
) -> QualityScore:
    """Penalty plus normalized quality score for one segment."""
    penalty = segment_penalty(segment, table=table, rater_policy=rater_policy, source=source)
    return QualityScore(penalty=penalty, normalized=normalize(penalty))
