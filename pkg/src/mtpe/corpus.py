"""Translation corpus model and annotation parsers.

The central object is a :class:`Corpus`: an ordered collection of
:class:`Segment` records for one language pair.  Each segment carries the
source sentence, a machine translation hypothesis, an optional reference,
and zero or more :class:`ErrorAnnotation` spans contributed by human MQM
raters or by automatic annotators.

Supported inputs:

* WMT-style MQM TSV files (``parse_mqm_tsv``).  Tab separated, one error
  annotation per row, header names including ``system``, ``rater``,
  ``source``, ``target``, ``category`` and ``severity``.  The error span is
  delimited inside the target column by ``<v>`` and ``</v>`` markers.
* Span annotations produced by automatic annotators
  (``parse_external_annotations``).  Newline-delimited JSON, one record per
  segment: ``{"id": ..., "spans": [{"text": ..., "type": ..., "severity": ...}]}``.
* DEMETR-style perturbation records (``parse_demetr``), JSON array or
  newline-delimited JSON.

Corpora serialize to JSON lines, one segment per line, and round-trip
losslessly (``corpus_to_jsonl`` / ``corpus_from_jsonl``).
"""
from __future__ import annotations

import csv
import json
from collections import Counter
from dataclasses import dataclass, field, replace
from enum import Enum
from pathlib import Path

from ._io import write_jsonl

SPAN_OPEN = "<v>"
SPAN_CLOSE = "</v>"

# English names for the language codes that occur in the supported corpora.
LANG_NAMES = {
    "cs": "Czech",
    "de": "German",
    "en": "English",
    "es": "Spanish",
    "fr": "French",
    "hi": "Hindi",
    "it": "Italian",
    "ja": "Japanese",
    "pl": "Polish",
    "ru": "Russian",
    "uk": "Ukrainian",
    "zh": "Chinese",
}

# Error taxonomy: top-level category -> allowed subcategories.
MQM_HIERARCHY: dict[str, tuple[str, ...]] = {
    "Accuracy": ("Addition", "Omission", "Mistranslation", "Untranslated text"),
    "Fluency": ("Character encoding", "Grammar", "Inconsistency", "Punctuation", "Register", "Spelling"),
    "Local convention": (
        "Address format",
        "Currency format",
        "Date format",
        "Name format",
        "Telephone format",
        "Time format",
    ),
    "Terminology": ("Inappropriate for context", "Inconsistent use"),
    "Style": ("Awkward",),
    "Source error": (),
    "Non-translation": (),
    "Other": (),
}

_MAJOR_BY_KEY = {name.casefold(): name for name in MQM_HIERARCHY}
# Spelling variants seen in the wild.
_MAJOR_BY_KEY["locale convention"] = "Local convention"
_MAJOR_BY_KEY["non translation"] = "Non-translation"
_MAJOR_BY_KEY["source language fragment"] = "Source error"

_SUB_BY_KEY = {
    (major, sub.casefold()): sub for major, subs in MQM_HIERARCHY.items() for sub in subs
}

_NO_ERROR_KEYS = {"no-error", "no error", "noerror"}


class Severity(Enum):
    """Severity level of an error annotation.

    ``NEUTRAL`` marks a segment the rater inspected and left clean; it never
    contributes penalty weight.
    """

    CRITICAL = "Critical"
    MAJOR = "Major"
    MINOR = "Minor"
    NEUTRAL = "Neutral"


_SEVERITY_BY_KEY = {s.value.casefold(): s for s in Severity}
_SEVERITY_BY_KEY.update({key: Severity.NEUTRAL for key in _NO_ERROR_KEYS})


def parse_severity(label: str) -> Severity:
    key = label.strip().casefold()
    if key not in _SEVERITY_BY_KEY:
        raise ValueError(f"unknown severity label: {label!r}")
    return _SEVERITY_BY_KEY[key]


class AnnotationSource(Enum):
    """Who produced an annotation."""

    MQM = "mqm"
    INSTRUCTSCORE = "instructscore"
    XCOMET = "xcomet"
    DEMETR = "demetr"


@dataclass(frozen=True)
class LangPair:
    """A translation direction with human-readable language names."""

    src: str
    tgt: str
    code: str

    @classmethod
    def from_code(cls, code: str) -> "LangPair":
        """Build a pair from a code like ``en-de`` (also accepts ``en_de``)."""
        norm = code.strip().replace("_", "-").lower()
        parts = norm.split("-")
        if len(parts) != 2 or not all(parts):
            raise ValueError(f"bad language pair code: {code!r}")
        names = []
        for part in parts:
            if part not in LANG_NAMES:
                raise ValueError(f"unknown language code {part!r} in pair {code!r}")
            names.append(LANG_NAMES[part])
        return cls(src=names[0], tgt=names[1], code=norm)


@dataclass(frozen=True)
class ErrorCategory:
    """An error type: canonical top-level category, optional subcategory.

    ``raw`` keeps the label exactly as it appeared in the input so files can
    round-trip byte for byte.
    """

    major: str
    sub: str | None = None
    raw: str = ""

    def __post_init__(self) -> None:
        if self.major not in MQM_HIERARCHY:
            raise ValueError(f"unknown error category: {self.major!r}")

    @property
    def in_hierarchy(self) -> bool:
        """Whether (major, sub) is a combination the taxonomy allows."""
        if self.sub is None:
            return True
        return (self.major, self.sub.casefold()) in _SUB_BY_KEY


def parse_category(raw: str) -> ErrorCategory | None:
    """Parse a category label like ``Accuracy/Mistranslation``.

    Returns None for no-error labels.  A bare label that is not a top-level
    category is looked up among the subcategories (``"mistranslation"``
    resolves to Accuracy/Mistranslation); anything still unknown maps to
    ``Other`` with the label kept as the subcategory, so non-MQM taxonomies
    (e.g. perturbation names) stay renderable.
    """
    label = raw.strip()
    if label.casefold() in _NO_ERROR_KEYS:
        return None
    major_raw, _, sub_raw = label.partition("/")
    major_key = major_raw.strip().rstrip("!").casefold()
    sub = sub_raw.strip() or None
    if major_key in _MAJOR_BY_KEY:
        major = _MAJOR_BY_KEY[major_key]
        if sub is not None:
            sub = _SUB_BY_KEY.get((major, sub.casefold()), sub)
        return ErrorCategory(major=major, sub=sub, raw=raw)
    if sub is None:
        for (major, sub_key), canonical in _SUB_BY_KEY.items():
            if sub_key == major_key:
                return ErrorCategory(major=major, sub=canonical, raw=raw)
    return ErrorCategory(major="Other", sub=label, raw=raw)


@dataclass(frozen=True)
class ErrorAnnotation:
    """One annotated error span on a segment.

    ``span`` is empty for Neutral (no-error) annotations and for errors the
    annotator did not localize (e.g. whole-segment non-translations).
    ``start`` is the character offset of the span in the hypothesis when it
    is known, to disambiguate repeated substrings.
    """

    span: str
    severity: Severity
    category: ErrorCategory | None = None
    source: AnnotationSource = AnnotationSource.MQM
    rater: str | None = None
    start: int | None = None


@dataclass
class Segment:
    """One source sentence with a hypothesis and its annotations."""

    id: str
    system: str
    doc: str
    seg: str
    source: str
    hypothesis: str
    reference: str | None = None
    errors: tuple[ErrorAnnotation, ...] = ()

    @property
    def has_error(self) -> bool:
        return any(e.severity is not Severity.NEUTRAL for e in self.errors)

    def annotations_from(self, source: AnnotationSource) -> tuple[ErrorAnnotation, ...]:
        return tuple(e for e in self.errors if e.source is source)


@dataclass
class Corpus:
    """An ordered, single-language-pair collection of segments."""

    lang: LangPair
    segments: tuple[Segment, ...]
    provenance: dict[str, str] = field(default_factory=dict)

    def __len__(self) -> int:
        return len(self.segments)

    def __iter__(self):
        return iter(self.segments)

    def by_id(self, segment_id: str) -> Segment:
        for seg in self.segments:
            if seg.id == segment_id:
                return seg
        raise KeyError(segment_id)


def normalize_ws(text: str) -> str:
    """Collapse whitespace runs and trim; used for substring matching."""
    return " ".join(text.split())


def _split_span_markers(target: str, line_no: int) -> tuple[str, str, int | None]:
    """Strip ``<v>``/``</v>`` from a target cell.

    Returns (hypothesis, span, start offset).  At most one marker pair is
    allowed per row; anything unbalanced is a parse error.
    """
    opens = target.count(SPAN_OPEN)
    closes = target.count(SPAN_CLOSE)
    if opens != closes or opens > 1:
        raise ValueError(f"line {line_no}: unbalanced span markers in target: {target!r}")
    if opens == 0:
        return target, "", None
    start = target.index(SPAN_OPEN)
    end = target.index(SPAN_CLOSE)
    if end < start:
        raise ValueError(f"line {line_no}: unbalanced span markers in target: {target!r}")
    span = target[start + len(SPAN_OPEN):end]
    hypothesis = target[:start] + span + target[end + len(SPAN_CLOSE):]
    return hypothesis, span, start


def parse_mqm_tsv(path: Path | str, lang: LangPair) -> Corpus:
    """Parse a WMT-style MQM annotation TSV into a corpus.

    Each row is one annotation; rows sharing (system, doc, seg) merge into a
    single segment holding all of its annotations, tagged by rater.  Rows
    labelled ``No-error`` become Neutral annotations with an empty span.

    Raises:
        ValueError: wrong column count, unbalanced span markers, or an
            unknown severity label, with the offending line number.
        FileNotFoundError: missing input file.
    """
    path = Path(path)
    with path.open(encoding="utf-8", newline="") as handle:
        reader = csv.reader(handle, delimiter="\t", quoting=csv.QUOTE_NONE)
        try:
            header = next(reader)
        except StopIteration:
            raise ValueError(f"{path}: empty file") from None
        col = {name.strip().casefold(): i for i, name in enumerate(header)}
        required = {"system", "rater", "source", "target", "category", "severity"}
        missing = required - col.keys()
        if missing:
            raise ValueError(f"{path}: missing column(s): {', '.join(sorted(missing))}")
        seg_col = col.get("seg_id", col.get("doc_id"))
        if seg_col is None:
            raise ValueError(f"{path}: missing column(s): seg_id")
        doc_col = col.get("doc")

        order: list[tuple[str, str, str]] = []
        rows: dict[tuple[str, str, str], list] = {}
        for line_no, row in enumerate(reader, start=2):
            if not row:
                continue
            if len(row) != len(header):
                raise ValueError(
                    f"line {line_no}: expected {len(header)} columns, got {len(row)}"
                )
            system = row[col["system"]]
            doc = row[doc_col] if doc_col is not None else ""
            seg = row[seg_col]
            key = (system, doc, seg)
            hypothesis, span, start = _split_span_markers(row[col["target"]], line_no)
            raw_category = row[col["category"]]
            raw_severity = row[col["severity"]]
            try:
                severity = parse_severity(raw_severity)
            except ValueError as exc:
                raise ValueError(f"line {line_no}: {exc}") from None
            category = parse_category(raw_category)
            if category is None:
                severity = Severity.NEUTRAL
                span, start = "", None
            annotation = ErrorAnnotation(
                span=span,
                severity=severity,
                category=category,
                source=AnnotationSource.MQM,
                rater=row[col["rater"]],
                start=start,
            )
            if key not in rows:
                order.append(key)
                rows[key] = [row[col["source"]], hypothesis, []]
            rows[key][2].append(annotation)

    segments = []
    for system, doc, seg in order:
        source, hypothesis, annotations = rows[(system, doc, seg)]
        segments.append(
            Segment(
                id=f"{system}:{doc}:{seg}",
                system=system,
                doc=doc,
                seg=seg,
                source=source,
                hypothesis=hypothesis,
                errors=tuple(annotations),
            )
        )
    ids = Counter(s.id for s in segments)
    dupes = [i for i, n in ids.items() if n > 1]
    if dupes:
        raise ValueError(f"{path}: duplicate segment id(s): {', '.join(sorted(dupes)[:3])}")
    return Corpus(
        lang=lang,
        segments=tuple(segments),
        provenance={"format": "mqm-tsv", "path": str(path)},
    )


def parse_external_annotations(
    corpus: Corpus, path: Path | str, source: AnnotationSource
) -> Corpus:
    """Attach automatically produced span annotations to an existing corpus.

    The file is newline-delimited JSON, one record per segment:
    ``{"id": ..., "spans": [{"text": ..., "type": ..., "severity": ...}]}``.
    Spans bind to their first occurrence in the hypothesis.  Records for the
    ``xcomet`` source must not carry a ``type`` field (that annotator only
    localizes and grades spans).

    Returns a new corpus; the original annotations are retained and the new
    ones carry the given source tag.

    Raises:
        ValueError: unknown segment id, a span that does not occur in the
            hypothesis, or a format violation for the named source.
    """
    path = Path(path)
    by_id = {seg.id: list(seg.errors) for seg in corpus.segments}
    with path.open(encoding="utf-8") as handle:
        for line_no, line in enumerate(handle, start=1):
            line = line.strip()
            if not line:
                continue
            try:
                record = json.loads(line)
            except json.JSONDecodeError as exc:
                raise ValueError(f"line {line_no}: bad JSON: {exc}") from None
            seg_id = record.get("id")
            if seg_id not in by_id:
                raise ValueError(f"line {line_no}: unknown segment id: {seg_id!r}")
            seg = corpus.by_id(seg_id)
            for span_rec in record.get("spans", []):
                if source is AnnotationSource.XCOMET and "type" in span_rec:
                    raise ValueError(
                        f"line {line_no}: xcomet spans carry no error type, got {span_rec['type']!r}"
                    )
                severity = parse_severity(span_rec.get("severity", ""))
                text = span_rec.get("text", "")
                start: int | None = None
                if severity is not Severity.NEUTRAL:
                    start = seg.hypothesis.find(text)
                    if start < 0:
                        start = None
                        if normalize_ws(text) not in normalize_ws(seg.hypothesis):
                            raise ValueError(
                                f"line {line_no}: span {text!r} not found in hypothesis of {seg_id!r}"
                            )
                category = None
                if "type" in span_rec:
                    category = parse_category(str(span_rec["type"]))
                by_id[seg_id].append(
                    ErrorAnnotation(
                        span=text,
                        severity=severity,
                        category=category,
                        source=source,
                        start=start,
                    )
                )
    segments = tuple(replace(seg, errors=tuple(by_id[seg.id])) for seg in corpus.segments)
    provenance = dict(corpus.provenance)
    provenance[f"annotations:{source.value}"] = str(path)
    return Corpus(lang=corpus.lang, segments=segments, provenance=provenance)


# Perturbation corpora for these directions serve as training pools for the
# reversed pair (the target-language side is what the trained editor sees).
TRAINING_POOL = {"de-en": "en-de", "ru-en": "en-ru"}

_DEMETR_ALIASES = {
    "id": ("id", "demetr_id"),
    "lang": ("lang", "lang_tag"),
    "source": ("source", "src", "src_sent"),
    "hypothesis": ("hypothesis", "hyp", "pert_sent", "mt_sent"),
    "reference": ("reference", "ref", "ref_sent"),
    "span": ("span",),
    "category": ("category", "perturbation"),
    "severity": ("severity",),
}


def _demetr_field(record: dict, name: str, default=None):
    for alias in _DEMETR_ALIASES[name]:
        if alias in record:
            return record[alias]
    return default


def parse_demetr(path: Path | str, pool: str | None = None) -> Corpus:
    """Parse DEMETR-style perturbation records into a training corpus.

    Accepts a JSON array or newline-delimited JSON.  Published field names
    (``demetr_id``, ``lang_tag``, ``src_sent``, ``pert_sent``, ``ref_sent``,
    ``perturbation``) are accepted alongside the plain ones (``id``, ``lang``,
    ``source``, ``hypothesis``, ``reference``, ``category``).  Severity
    ``base`` (the unperturbed output) maps to Neutral.

    Records keep their actual translation direction, but each direction is
    assigned to a training pool: de-en rows feed the en-de pool and ru-en
    rows the en-ru pool (see ``TRAINING_POOL``); other directions pool under
    their own code.  Pass ``pool`` to keep only one pool's records; otherwise
    the file must be single-pool.

    Raises:
        ValueError: missing fields, mixed pools without a ``pool`` filter, or
            an unknown severity.
    """
    path = Path(path)
    text = path.read_text(encoding="utf-8").strip()
    if not text:
        raise ValueError(f"{path}: empty file")
    if text.startswith("["):
        records = json.loads(text)
    else:
        records = [json.loads(line) for line in text.splitlines() if line.strip()]

    segments = []
    pools_seen: set[str] = set()
    lang: LangPair | None = None
    for idx, record in enumerate(records, start=1):
        code = str(_demetr_field(record, "lang", "")).replace("_", "-").lower()
        if not code:
            raise ValueError(f"record {idx}: missing lang")
        record_pool = TRAINING_POOL.get(code, code)
        if pool is not None and record_pool != pool:
            continue
        pools_seen.add(record_pool)
        if len(pools_seen) > 1:
            raise ValueError(
                f"{path}: multiple training pools in one file: {', '.join(sorted(pools_seen))}"
            )
        pair = LangPair.from_code(code)
        if lang is None:
            lang = pair
        source = _demetr_field(record, "source")
        hypothesis = _demetr_field(record, "hypothesis")
        if source is None or hypothesis is None:
            raise ValueError(f"record {idx}: missing source or hypothesis")
        raw_severity = str(_demetr_field(record, "severity", ""))
        if raw_severity.casefold() == "base":
            severity = Severity.NEUTRAL
        else:
            try:
                severity = parse_severity(raw_severity)
            except ValueError as exc:
                raise ValueError(f"record {idx}: {exc}") from None
        span = str(_demetr_field(record, "span", "") or "")
        category_raw = _demetr_field(record, "category")
        category = parse_category(str(category_raw)) if category_raw else None
        if severity is Severity.NEUTRAL:
            span = ""
        start = hypothesis.find(span) if span else None
        if start is not None and start < 0:
            raise ValueError(f"record {idx}: span {span!r} not found in hypothesis")
        rec_id = str(_demetr_field(record, "id", idx))
        segments.append(
            Segment(
                id=f"demetr:{code}:{rec_id}",
                system="demetr",
                doc=code,
                seg=rec_id,
                source=str(source),
                hypothesis=str(hypothesis),
                reference=_demetr_field(record, "reference"),
                errors=(
                    ErrorAnnotation(
                        span=span,
                        severity=severity,
                        category=category,
                        source=AnnotationSource.DEMETR,
                        start=start,
                    ),
                ),
            )
        )
    if lang is None:
        raise ValueError(f"{path}: no records matched pool {pool!r}")
    return Corpus(
        lang=lang,
        segments=tuple(segments),
        provenance={
            "format": "demetr",
            "path": str(path),
            "pool": pool or next(iter(pools_seen)),
        },
    )


def filter_segments(corpus: Corpus, predicate: str, value: str | None = None) -> Corpus:
    """Return a new corpus keeping only segments matching the predicate.

    Predicates: ``has_error`` (at least one non-Neutral annotation),
    ``no_error``, ``lang_pair`` (needs ``value``), ``system`` (needs ``value``).
    """
    if predicate == "has_error":
        kept = tuple(s for s in corpus.segments if s.has_error)
    elif predicate == "no_error":
        kept = tuple(s for s in corpus.segments if not s.has_error)
    elif predicate == "lang_pair":
        if value is None:
            raise ValueError("lang_pair filter needs a value")
        kept = corpus.segments if corpus.lang.code == value.replace("_", "-").lower() else ()
    elif predicate == "system":
        if value is None:
            raise ValueError("system filter needs a value")
        kept = tuple(s for s in corpus.segments if s.system == value)
    else:
        raise ValueError(f"unknown filter predicate: {predicate!r}")
    provenance = dict(corpus.provenance)
    provenance["filter"] = predicate if value is None else f"{predicate}={value}"
    return Corpus(lang=corpus.lang, segments=kept, provenance=provenance)


def first_rater(corpus: Corpus) -> Corpus:
    """Collapse multi-rater segments to each segment's first-seen rater."""
    segments = []
    for seg in corpus.segments:
        if not seg.errors:
            segments.append(seg)
            continue
        first = seg.errors[0].rater
        segments.append(replace(seg, errors=tuple(e for e in seg.errors if e.rater == first)))
    return Corpus(lang=corpus.lang, segments=tuple(segments), provenance=dict(corpus.provenance))


def dedup_against(corpus: Corpus, test: Corpus) -> tuple[Corpus, int]:
    """Drop segments whose source or hypothesis also appears in ``test``.

    Matching is exact string equality after trimming, source against test
    sources and hypothesis against test hypotheses.  References are not
    compared.  Returns the filtered corpus and the number of removed segments.
    """
    test_sources = {s.source.strip() for s in test.segments}
    test_hyps = {s.hypothesis.strip() for s in test.segments}
    kept = tuple(
        s
        for s in corpus.segments
        if s.source.strip() not in test_sources and s.hypothesis.strip() not in test_hyps
    )
    provenance = dict(corpus.provenance)
    removed = len(corpus.segments) - len(kept)
    provenance["dedup_removed"] = str(removed)
    return Corpus(lang=corpus.lang, segments=kept, provenance=provenance), removed


def corpus_stats(corpus: Corpus) -> dict:
    """Summary statistics for one corpus (JSON-serializable).

    Error counts cover non-Neutral annotations only; span length is measured
    in characters after whitespace normalization.
    """
    by_category: Counter[str] = Counter()
    by_severity: Counter[str] = Counter()
    span_lengths: list[int] = []
    error_count = 0
    no_error_segments = 0
    for seg in corpus.segments:
        if not seg.has_error:
            no_error_segments += 1
        for ann in seg.errors:
            if ann.severity is Severity.NEUTRAL:
                continue
            error_count += 1
            if ann.category is not None:
                by_category[ann.category.major] += 1
            by_severity[ann.severity.value] += 1
            if ann.span:
                span_lengths.append(len(normalize_ws(ann.span)))
    segments = len(corpus.segments)
    return {
        "lang": corpus.lang.code,
        "segments": segments,
        "no_error_segments": no_error_segments,
        "errors_by_category": dict(sorted(by_category.items())),
        "errors_by_severity": dict(sorted(by_severity.items())),
        "mean_span_chars": (sum(span_lengths) / len(span_lengths)) if span_lengths else 0.0,
        "mean_errors_per_segment": (error_count / segments) if segments else 0.0,
    }


def _segment_to_dict(seg: Segment, lang: LangPair) -> dict:
    return {
        "id": seg.id,
        "lang": lang.code,
        "system": seg.system,
        "doc": seg.doc,
        "seg": seg.seg,
        "source": seg.source,
        "hypothesis": seg.hypothesis,
        "reference": seg.reference,
        "errors": [
            {
                "span": e.span,
                "start": e.start,
                "category": e.category.raw if e.category is not None else None,
                "severity": e.severity.value,
                "source": e.source.value,
                "rater": e.rater,
            }
            for e in seg.errors
        ],
    }


def _segment_from_dict(record: dict) -> Segment:
    errors = []
    for e in record.get("errors", []):
        raw = e.get("category")
        errors.append(
            ErrorAnnotation(
                span=e["span"],
                severity=parse_severity(e["severity"]),
                category=parse_category(raw) if raw else None,
                source=AnnotationSource(e.get("source", "mqm")),
                rater=e.get("rater"),
                start=e.get("start"),
            )
        )
    return Segment(
        id=record["id"],
        system=record.get("system", ""),
        doc=record.get("doc", ""),
        seg=str(record.get("seg", "")),
        source=record["source"],
        hypothesis=record["hypothesis"],
        reference=record.get("reference"),
        errors=tuple(errors),
    )


def corpus_to_jsonl(corpus: Corpus, path: Path | str) -> None:
    """Serialize one segment per line (UTF-8, lossless round-trip)."""
    lines = [
        json.dumps(_segment_to_dict(seg, corpus.lang), ensure_ascii=False)
        for seg in corpus.segments
    ]
    write_jsonl(Path(path), lines)


def corpus_from_jsonl(path: Path | str) -> Corpus:
    """Load a corpus written by :func:`corpus_to_jsonl`.

    Raises:
        ValueError: empty file, or segments from more than one language pair.
    """
    path = Path(path)
    segments = []
    codes: set[str] = set()
    with path.open(encoding="utf-8") as handle:
        for line_no, line in enumerate(handle, start=1):
            line = line.strip()
            if not line:
                continue
            try:
                record = json.loads(line)
            except json.JSONDecodeError as exc:
                raise ValueError(f"line {line_no}: bad JSON: {exc}") from None
            codes.add(record["lang"])
            segments.append(_segment_from_dict(record))
    if not segments:
        raise ValueError(f"{path}: no segments")
    if len(codes) > 1:
        raise ValueError(f"{path}: mixed language pairs: {', '.join(sorted(codes))}")
    return Corpus(
        lang=LangPair.from_code(codes.pop()),
        segments=tuple(segments),
        provenance={"format": "jsonl", "path": str(path)},
    )
