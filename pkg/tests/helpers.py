"""Shared fixture builders for the test suite."""
from __future__ import annotations

from pathlib import Path

from mtpe.corpus import (
    AnnotationSource,
    Corpus,
    ErrorAnnotation,
    LangPair,
    Segment,
    Severity,
    parse_category,
)

EN_DE = LangPair.from_code("en-de")
ZH_EN = LangPair.from_code("zh-en")

MQM_HEADER = ["system", "doc", "doc_id", "seg_id", "rater", "source", "target", "category", "severity"]


def ann(
    span: str = "",
    severity: str = "Major",
    category: str | None = "Accuracy/Mistranslation",
    source: AnnotationSource = AnnotationSource.MQM,
    rater: str | None = None,
    start: int | None = None,
) -> ErrorAnnotation:
    return ErrorAnnotation(
        span=span,
        severity=Severity(severity),
        category=parse_category(category) if category else None,
        source=source,
        rater=rater,
        start=start,
    )


def seg(
    seg_id: str = "sysA:doc1:1",
    source: str = "A small example.",
    hypothesis: str = "Ein kleines Beispiel.",
    reference: str | None = "Ein kleines Beispiel.",
    errors: tuple[ErrorAnnotation, ...] = (),
    system: str = "sysA",
    doc: str = "doc1",
    number: str = "1",
) -> Segment:
    return Segment(
        id=seg_id,
        system=system,
        doc=doc,
        seg=number,
        source=source,
        hypothesis=hypothesis,
        reference=reference,
        errors=errors,
    )


def corpus_of(segments, lang: LangPair = EN_DE) -> Corpus:
    return Corpus(lang=lang, segments=tuple(segments), provenance={})


def write_mqm_tsv(path: Path, rows: list[dict]) -> Path:
    """Write an annotation TSV; each row dict overrides the column defaults."""
    defaults = {
        "system": "sysA",
        "doc": "doc1",
        "doc_id": "doc1",
        "seg_id": "1",
        "rater": "rater1",
        "source": "A small example.",
        "target": "Ein kleines Beispiel.",
        "category": "Accuracy/Mistranslation",
        "severity": "Major",
    }
    lines = ["\t".join(MQM_HEADER)]
    for row in rows:
        merged = {**defaults, **row}
        lines.append("\t".join(merged[name] for name in MQM_HEADER))
    path.write_text("\n".join(lines) + "\n", encoding="utf-8")
    return path


def synth_corpus(count: int, lang: LangPair = ZH_EN, with_errors: bool = True) -> Corpus:
    """A corpus of ``count`` unique annotated segments with references."""
    segments = []
    for i in range(count):
        errors = ()
        if with_errors and i % 3 != 2:  # leave every third segment clean
            errors = (
                ann(
                    span=f"token{i}",
                    severity="Major" if i % 2 == 0 else "Minor",
                    category="Accuracy/Mistranslation" if i % 2 == 0 else "Fluency/Grammar",
                    rater="rater1",
                ),
            )
        segments.append(
            seg(
                seg_id=f"sysA:doc{i // 50}:{i}",
                source=f"source sentence number {i}",
                hypothesis=f"hypothesis with token{i} inside",
                reference=f"reference sentence number {i}",
                errors=errors,
                doc=f"doc{i // 50}",
                number=str(i),
            )
        )
    return corpus_of(segments, lang=lang)
