"""Post-editing behavior analyses.

Three questions about a batch of edits:

* which annotated errors did the editor actually remove
  (``resolution_analysis``);
* how often do two annotation sources point at the same place
  (``agreement``);
* how much does the editor rewrite segments that had nothing wrong
  (``overedit_audit``).
"""
from __future__ import annotations

import random
from dataclasses import dataclass, field
from typing import Mapping, Sequence

from .corpus import AnnotationSource, Corpus, Severity, normalize_ws
from .metrics import bleu, ter, tokenize

AGREEMENT_RULES = ("exact", "jaccard")


@dataclass
class ResolutionReport:
    """Where annotated error spans ended up after editing.

    ``counts`` tallies spans still present in the edited output by their
    top-level category; ``no_match`` counts spans no longer found (the
    error text was rewritten).  Together they cover every non-Neutral
    annotation of the evaluated segments.
    """

    condition: str
    counts: dict[str, int] = field(default_factory=dict)
    no_match: int = 0
    segments: int = 0
    total: int = 0

    def to_dict(self) -> dict:
        return {
            "condition": self.condition,
            "segments": self.segments,
            "annotations": self.total,
            "still_present": dict(sorted(self.counts.items())),
            "no_match": self.no_match,
        }


def resolution_analysis(
    corpus: Corpus,
    edits: Mapping[str, str | None],
    condition: str = "postedit",
    source: AnnotationSource = AnnotationSource.MQM,
) -> ResolutionReport:
    """Check each annotated error span against the edited hypothesis.

    Matching is case-sensitive substring containment after whitespace
    normalization on both sides.  A span still present increments its
    category's count; a vanished span increments ``no_match``.  Unlocalized
    annotations (empty span) trivially count as present.  Segments without
    an edit (missing id or None value) are not evaluated.
    """
    report = ResolutionReport(condition=condition)
    for segment in corpus.segments:
        edited = edits.get(segment.id)
        if edited is None:
            continue
        annotations = [
            a
            for a in segment.annotations_from(source)
            if a.severity is not Severity.NEUTRAL
        ]
        if not annotations:
            continue
        report.segments += 1
        edited_norm = normalize_ws(edited)
        for annotation in annotations:
            report.total += 1
            if normalize_ws(annotation.span) in edited_norm:
                major = annotation.category.major if annotation.category else "Other"
                report.counts[major] = report.counts.get(major, 0) + 1
            else:
                report.no_match += 1
    return report


@dataclass
class AgreementReport:
    """How often two annotation sources flag overlapping spans."""

    source_a: str
    source_b: str
    rule: str
    threshold: float | None
    overlapping: int
    sample_size: int

    def to_dict(self) -> dict:
        out = {
            "source_a": self.source_a,
            "source_b": self.source_b,
            "rule": self.rule,
            "overlapping": self.overlapping,
            "sample_size": self.sample_size,
        }
        if self.threshold is not None:
            out["threshold"] = self.threshold
        return out


def _spans(segment, source: AnnotationSource) -> list[str]:
    return [
        normalize_ws(a.span)
        for a in segment.annotations_from(source)
        if a.severity is not Severity.NEUTRAL and a.span.strip()
    ]


def _spans_overlap(a: str, b: str, rule: str, threshold: float) -> bool:
    if rule == "exact":
        return a == b
    tokens_a = set(a.split())
    tokens_b = set(b.split())
    if not tokens_a or not tokens_b:
        return False
    union = tokens_a | tokens_b
    return len(tokens_a & tokens_b) / len(union) >= threshold


def agreement(
    corpus: Corpus,
    source_a: AnnotationSource,
    source_b: AnnotationSource,
    rule: str = "exact",
    threshold: float = 0.5,
    sample: int | None = None,
    seed: int = 0,
) -> AgreementReport:
    """Count segments where the two sources flag at least one common span.

    Only segments carrying non-Neutral spans from both sources qualify;
    ``sample`` draws a seeded random subset of them first.  ``exact``
    requires whitespace-normalized equality, ``jaccard`` a token Jaccard
    overlap of at least ``threshold``.

    Raises:
        ValueError: unknown rule, or a source with no annotations anywhere
            in the corpus.
    """
    if rule not in AGREEMENT_RULES:
        raise ValueError(f"rule must be one of {AGREEMENT_RULES}, got {rule!r}")
    for source in (source_a, source_b):
        if not any(seg.annotations_from(source) for seg in corpus.segments):
            raise ValueError(f"no annotations from source {source.value!r} in corpus")
    eligible = [
        seg
        for seg in corpus.segments
        if _spans(seg, source_a) and _spans(seg, source_b)
    ]
    if sample is not None and sample < len(eligible):
        eligible = random.Random(seed).sample(eligible, sample)
    overlapping = 0
    for segment in eligible:
        spans_a = _spans(segment, source_a)
        spans_b = _spans(segment, source_b)
        if any(
            _spans_overlap(a, b, rule, threshold)
            for a in spans_a
            for b in spans_b
        ):
            overlapping += 1
    return AgreementReport(
        source_a=source_a.value,
        source_b=source_b.value,
        rule=rule,
        threshold=threshold if rule == "jaccard" else None,
        overlapping=overlapping,
        sample_size=len(eligible),
    )


@dataclass
class OvereditReport:
    """Metric movement on segments that were annotated error-free."""

    segments: int
    bleu_before: float
    bleu_after: float
    ter_before: float
    ter_after: float

    @property
    def bleu_delta(self) -> float:
        return self.bleu_after - self.bleu_before

    @property
    def ter_delta(self) -> float:
        return self.ter_after - self.ter_before

    def to_dict(self, ndigits: int = 4) -> dict:
        return {
            "segments": self.segments,
            "bleu_before": round(self.bleu_before, ndigits),
            "bleu_after": round(self.bleu_after, ndigits),
            "bleu_delta": round(self.bleu_delta, ndigits),
            "ter_before": round(self.ter_before, ndigits),
            "ter_after": round(self.ter_after, ndigits),
            "ter_delta": round(self.ter_delta, ndigits),
        }


def overedit_audit(
    corpus: Corpus,
    edits: Mapping[str, str | None],
    lowercase: bool = False,
) -> OvereditReport:
    """Compare metrics before and after editing clean segments.

    The corpus must contain only error-free segments (filter with
    ``no_error`` first); a non-zero delta means the editor rewrote
    translations nobody flagged.

    Raises:
        ValueError: a segment with a non-Neutral annotation, or no usable
            (reference, edit) pairs.
    """
    flagged = [seg.id for seg in corpus.segments if seg.has_error]
    if flagged:
        raise ValueError(
            f"overedit_audit expects an error-free corpus; {len(flagged)} segment(s) "
            f"carry errors (first: {flagged[0]!r})"
        )
    before = []
    after = []
    for segment in corpus.segments:
        edited = edits.get(segment.id)
        if edited is None or segment.reference is None:
            continue
        ref_tokens = tokenize(segment.reference, lowercase=lowercase)
        before.append((tokenize(segment.hypothesis, lowercase=lowercase), ref_tokens))
        after.append((tokenize(edited, lowercase=lowercase), ref_tokens))
    if not before:
        raise ValueError("no segments with both a reference and an edit")
    return OvereditReport(
        segments=len(before),
        bleu_before=bleu(before),
        bleu_after=bleu(after),
        ter_before=ter(before),
        ter_after=ter(after),
    )
