"""Corpus model, annotation parsers, and JSONL round-trips."""
from __future__ import annotations

import json

import pytest

from helpers import EN_DE, ZH_EN, ann, corpus_of, seg, write_mqm_tsv
from mtpe.corpus import (
    AnnotationSource,
    ErrorCategory,
    LangPair,
    Severity,
    corpus_from_jsonl,
    corpus_stats,
    corpus_to_jsonl,
    dedup_against,
    filter_segments,
    first_rater,
    normalize_ws,
    parse_category,
    parse_demetr,
    parse_external_annotations,
    parse_mqm_tsv,
    parse_severity,
)


class TestLangPair:
    def test_from_code(self):
        pair = LangPair.from_code("en-de")
        assert pair.src == "English"
        assert pair.tgt == "German"
        assert pair.code == "en-de"

    def test_accepts_underscore_and_case(self):
        assert LangPair.from_code("ZH_EN") == ZH_EN

    def test_unknown_code(self):
        with pytest.raises(ValueError, match="unknown language code"):
            LangPair.from_code("en-xx")

    def test_malformed_code(self):
        with pytest.raises(ValueError, match="bad language pair"):
            LangPair.from_code("ende")


class TestSeverity:
    def test_labels(self):
        assert parse_severity("major") is Severity.MAJOR
        assert parse_severity(" Minor ") is Severity.MINOR
        assert parse_severity("critical") is Severity.CRITICAL
        assert parse_severity("no-error") is Severity.NEUTRAL

    def test_unknown(self):
        with pytest.raises(ValueError, match="unknown severity"):
            parse_severity("catastrophic")


class TestCategory:
    def test_full_path(self):
        cat = parse_category("Accuracy/Mistranslation")
        assert cat.major == "Accuracy"
        assert cat.sub == "Mistranslation"
        assert cat.raw == "Accuracy/Mistranslation"
        assert cat.in_hierarchy

    def test_bare_subcategory_resolves(self):
        cat = parse_category("mistranslation")
        assert (cat.major, cat.sub) == ("Accuracy", "Mistranslation")

    def test_no_error_is_none(self):
        assert parse_category("No-error") is None

    def test_unknown_label_maps_to_other(self):
        cat = parse_category("antonym replacement")
        assert cat.major == "Other"
        assert cat.sub == "antonym replacement"
        assert not cat.in_hierarchy

    def test_invalid_major_rejected(self):
        with pytest.raises(ValueError, match="unknown error category"):
            ErrorCategory(major="Madeup")


class TestParseMqmTsv(object):
    def test_groups_rows_into_segments(self, tmp_path):
        path = write_mqm_tsv(
            tmp_path / "anno.tsv",
            [
                {"target": "Ein <v>kleines</v> Beispiel.", "category": "Fluency/Grammar", "severity": "Minor"},
                {"target": "Ein kleines <v>Beispiel.</v>", "severity": "Major", "rater": "rater2"},
                {"seg_id": "2", "target": "Zweiter Satz.", "category": "No-error", "severity": "No-error"},
            ],
        )
        corpus = parse_mqm_tsv(path, EN_DE)
        assert len(corpus) == 2
        first = corpus.by_id("sysA:doc1:1")
        assert first.hypothesis == "Ein kleines Beispiel."
        assert [a.span for a in first.errors] == ["kleines", "Beispiel."]
        assert [a.start for a in first.errors] == [4, 12]
        assert first.errors[0].severity is Severity.MINOR
        assert first.errors[1].rater == "rater2"
        second = corpus.by_id("sysA:doc1:2")
        assert not second.has_error
        assert second.errors[0].severity is Severity.NEUTRAL
        assert second.errors[0].span == ""

    def test_unbalanced_markers(self, tmp_path):
        path = write_mqm_tsv(tmp_path / "anno.tsv", [{"target": "Ein <v>kleines Beispiel."}])
        with pytest.raises(ValueError, match="line 2: unbalanced span markers"):
            parse_mqm_tsv(path, EN_DE)

    def test_missing_column(self, tmp_path):
        path = tmp_path / "anno.tsv"
        path.write_text("system\trater\tsource\ttarget\tcategory\n", encoding="utf-8")
        with pytest.raises(ValueError, match="missing column"):
            parse_mqm_tsv(path, EN_DE)

    def test_bad_severity_reports_line(self, tmp_path):
        path = write_mqm_tsv(tmp_path / "anno.tsv", [{}, {"seg_id": "2", "severity": "huge"}])
        with pytest.raises(ValueError, match="line 3: unknown severity"):
            parse_mqm_tsv(path, EN_DE)

    def test_no_error_category_forces_neutral(self, tmp_path):
        # a row with a no-error category keeps no span even if severity says Major
        path = write_mqm_tsv(
            tmp_path / "anno.tsv",
            [{"target": "Ein <v>kleines</v> Beispiel.", "category": "No-error", "severity": "Major"}],
        )
        corpus = parse_mqm_tsv(path, EN_DE)
        annotation = corpus.segments[0].errors[0]
        assert annotation.severity is Severity.NEUTRAL
        assert annotation.span == ""

    def test_falls_back_to_doc_id_column(self, tmp_path):
        path = tmp_path / "anno.tsv"
        header = ["system", "doc", "doc_id", "rater", "source", "target", "category", "severity"]
        row = ["sysA", "doc1", "7", "r1", "src", "tgt", "Accuracy/Omission", "Major"]
        path.write_text("\t".join(header) + "\n" + "\t".join(row) + "\n", encoding="utf-8")
        corpus = parse_mqm_tsv(path, EN_DE)
        assert corpus.segments[0].id == "sysA:doc1:7"


class TestExternalAnnotations:
    def _base(self):
        return corpus_of([seg(hypothesis="Das ist ein  grober Fehler hier.")])

    def test_attach_spans(self, tmp_path):
        path = tmp_path / "spans.jsonl"
        record = {
            "id": "sysA:doc1:1",
            "spans": [{"text": "grober Fehler", "type": "mistranslation", "severity": "Major"}],
        }
        path.write_text(json.dumps(record) + "\n", encoding="utf-8")
        corpus = parse_external_annotations(self._base(), path, AnnotationSource.INSTRUCTSCORE)
        added = corpus.segments[0].annotations_from(AnnotationSource.INSTRUCTSCORE)
        assert len(added) == 1
        assert added[0].span == "grober Fehler"
        assert added[0].category.major == "Accuracy"
        assert added[0].start == corpus.segments[0].hypothesis.find("grober Fehler")
        # original annotations list is extended, not replaced
        assert corpus.provenance["annotations:instructscore"] == str(path)

    def test_xcomet_rejects_typed_spans(self, tmp_path):
        path = tmp_path / "spans.jsonl"
        record = {"id": "sysA:doc1:1", "spans": [{"text": "Fehler", "type": "x", "severity": "Major"}]}
        path.write_text(json.dumps(record) + "\n", encoding="utf-8")
        with pytest.raises(ValueError, match="xcomet spans carry no error type"):
            parse_external_annotations(self._base(), path, AnnotationSource.XCOMET)

    def test_xcomet_untyped_ok(self, tmp_path):
        path = tmp_path / "spans.jsonl"
        record = {"id": "sysA:doc1:1", "spans": [{"text": "Fehler", "severity": "Minor"}]}
        path.write_text(json.dumps(record) + "\n", encoding="utf-8")
        corpus = parse_external_annotations(self._base(), path, AnnotationSource.XCOMET)
        added = corpus.segments[0].annotations_from(AnnotationSource.XCOMET)
        assert added[0].category is None

    def test_unknown_id(self, tmp_path):
        path = tmp_path / "spans.jsonl"
        path.write_text(json.dumps({"id": "nope", "spans": []}) + "\n", encoding="utf-8")
        with pytest.raises(ValueError, match="unknown segment id"):
            parse_external_annotations(self._base(), path, AnnotationSource.XCOMET)

    def test_span_must_occur(self, tmp_path):
        path = tmp_path / "spans.jsonl"
        record = {"id": "sysA:doc1:1", "spans": [{"text": "nicht da", "severity": "Major"}]}
        path.write_text(json.dumps(record) + "\n", encoding="utf-8")
        with pytest.raises(ValueError, match="not found in hypothesis"):
            parse_external_annotations(self._base(), path, AnnotationSource.XCOMET)

    def test_whitespace_normalized_match_allowed(self, tmp_path):
        # hypothesis has a double space inside; annotator reports it collapsed
        path = tmp_path / "spans.jsonl"
        record = {"id": "sysA:doc1:1", "spans": [{"text": "ein grober", "severity": "Major"}]}
        path.write_text(json.dumps(record) + "\n", encoding="utf-8")
        corpus = parse_external_annotations(self._base(), path, AnnotationSource.XCOMET)
        added = corpus.segments[0].annotations_from(AnnotationSource.XCOMET)
        assert added[0].start is None  # no exact offset, but accepted


class TestParseDemetr:
    def _file(self, tmp_path, records, as_array=False):
        path = tmp_path / "pert.jsonl"
        if as_array:
            path.write_text(json.dumps(records), encoding="utf-8")
        else:
            path.write_text("\n".join(json.dumps(r) for r in records) + "\n", encoding="utf-8")
        return path

    def test_published_field_names(self, tmp_path):
        records = [
            {
                "demetr_id": "15",
                "lang_tag": "de-en",
                "src_sent": "Der Hund bellt.",
                "pert_sent": "The dog barks loud.",
                "ref_sent": "The dog barks.",
                "perturbation": "addition",
                "severity": "minor",
                "span": "loud",
            }
        ]
        corpus = parse_demetr(self._file(tmp_path, records))
        assert corpus.lang.code == "de-en"  # direction stays faithful
        assert corpus.provenance["pool"] == "en-de"  # but pools under the reverse
        segment = corpus.segments[0]
        assert segment.id == "demetr:de-en:15"
        assert segment.reference == "The dog barks."
        assert segment.errors[0].source is AnnotationSource.DEMETR
        assert segment.errors[0].category.sub == "Addition"

    def test_base_severity_is_neutral(self, tmp_path):
        records = [
            {"id": "1", "lang": "zh-en", "source": "s", "hypothesis": "h", "severity": "base"}
        ]
        corpus = parse_demetr(self._file(tmp_path, records, as_array=True))
        assert corpus.segments[0].errors[0].severity is Severity.NEUTRAL
        assert not corpus.segments[0].has_error

    def test_mixed_pools_rejected(self, tmp_path):
        records = [
            {"id": "1", "lang": "de-en", "source": "s", "hypothesis": "h", "severity": "base"},
            {"id": "2", "lang": "zh-en", "source": "s", "hypothesis": "h", "severity": "base"},
        ]
        with pytest.raises(ValueError, match="multiple training pools"):
            parse_demetr(self._file(tmp_path, records))

    def test_pool_filter_keeps_one(self, tmp_path):
        records = [
            {"id": "1", "lang": "de-en", "source": "s1", "hypothesis": "h1", "severity": "base"},
            {"id": "2", "lang": "zh-en", "source": "s2", "hypothesis": "h2", "severity": "base"},
        ]
        corpus = parse_demetr(self._file(tmp_path, records), pool="en-de")
        assert len(corpus) == 1
        assert corpus.segments[0].id == "demetr:de-en:1"

    def test_no_match_for_pool(self, tmp_path):
        records = [{"id": "1", "lang": "de-en", "source": "s", "hypothesis": "h", "severity": "base"}]
        with pytest.raises(ValueError, match="no records matched pool"):
            parse_demetr(self._file(tmp_path, records), pool="en-ru")

    def test_missing_fields(self, tmp_path):
        records = [{"id": "1", "lang": "de-en", "severity": "base"}]
        with pytest.raises(ValueError, match="record 1: missing source or hypothesis"):
            parse_demetr(self._file(tmp_path, records))


class TestCorpusOperations:
    def _mixed(self):
        return corpus_of(
            [
                seg(seg_id="a", errors=(ann(span="kleines", rater="r1"), ann(span="Beispiel", rater="r2"))),
                seg(seg_id="b", system="sysB", errors=()),
                seg(seg_id="c", errors=(ann(severity="Neutral", category=None),)),
            ]
        )

    def test_filter_has_error(self):
        assert [s.id for s in filter_segments(self._mixed(), "has_error")] == ["a"]

    def test_filter_no_error(self):
        assert [s.id for s in filter_segments(self._mixed(), "no_error")] == ["b", "c"]

    def test_filter_system(self):
        assert [s.id for s in filter_segments(self._mixed(), "system", "sysB")] == ["b"]

    def test_filter_lang_pair(self):
        assert len(filter_segments(self._mixed(), "lang_pair", "en-de")) == 3
        assert len(filter_segments(self._mixed(), "lang_pair", "en-ru")) == 0

    def test_filter_unknown(self):
        with pytest.raises(ValueError, match="unknown filter predicate"):
            filter_segments(self._mixed(), "shiny")

    def test_first_rater(self):
        collapsed = first_rater(self._mixed())
        assert [a.rater for a in collapsed.by_id("a").errors] == ["r1"]
        assert len(collapsed.by_id("c").errors) == 1

    def test_dedup_against(self):
        test = corpus_of([seg(seg_id="t", source="A small example.", hypothesis="other")])
        corpus = corpus_of(
            [
                seg(seg_id="x", source="A small example.", hypothesis="fresh"),
                seg(seg_id="y", source="fresh source", hypothesis="Ein kleines Beispiel."),
                seg(seg_id="z", source="untouched", hypothesis="unberührt"),
            ]
        )
        # x collides on source, y survives (its hypothesis only matches a test *hypothesis*
        # if one exists); here y's hypothesis matches no test hypothesis
        deduped, removed = dedup_against(corpus, test)
        assert removed == 1
        assert [s.id for s in deduped] == ["y", "z"]

    def test_dedup_matches_hypothesis_side(self):
        test = corpus_of([seg(seg_id="t", source="other", hypothesis="Ein kleines Beispiel.")])
        corpus = corpus_of([seg(seg_id="x", source="fresh", hypothesis="Ein kleines Beispiel. ")])
        deduped, removed = dedup_against(corpus, test)
        assert removed == 1  # trailing whitespace is trimmed before comparing
        assert len(deduped) == 0

    def test_stats(self):
        corpus = corpus_of(
            [
                seg(seg_id="a", errors=(ann(span="kleines  Beispiel", severity="Major"),)),
                seg(seg_id="b", errors=(ann(span="xy", severity="Minor", category="Fluency/Grammar"),)),
                seg(seg_id="c"),
            ]
        )
        stats = corpus_stats(corpus)
        assert stats["segments"] == 3
        assert stats["no_error_segments"] == 1
        assert stats["errors_by_severity"] == {"Major": 1, "Minor": 1}
        assert stats["errors_by_category"] == {"Accuracy": 1, "Fluency": 1}
        # "kleines Beispiel" after collapsing = 16 chars, "xy" = 2
        assert stats["mean_span_chars"] == pytest.approx(9.0)
        assert stats["mean_errors_per_segment"] == pytest.approx(2 / 3)


class TestJsonlRoundTrip:
    def test_lossless(self, tmp_path):
        corpus = corpus_of(
            [
                seg(
                    seg_id="a",
                    errors=(
                        ann(span="kleines", rater="r1", start=4),
                        ann(span="", severity="Neutral", category=None),
                        ann(span="Beispiel", source=AnnotationSource.XCOMET, category=None, start=12),
                    ),
                ),
                seg(seg_id="b", reference=None),
            ]
        )
        path = tmp_path / "corpus.jsonl"
        corpus_to_jsonl(corpus, path)
        loaded = corpus_from_jsonl(path)
        assert loaded.lang == corpus.lang
        assert loaded.segments == corpus.segments
        # a second serialization is byte-identical
        again = tmp_path / "again.jsonl"
        corpus_to_jsonl(loaded, again)
        assert again.read_bytes() == path.read_bytes()

    def test_mixed_language_rejected(self, tmp_path):
        path = tmp_path / "corpus.jsonl"
        rows = [
            {"id": "a", "lang": "en-de", "source": "s", "hypothesis": "h", "errors": []},
            {"id": "b", "lang": "en-ru", "source": "s", "hypothesis": "h", "errors": []},
        ]
        path.write_text("\n".join(json.dumps(r) for r in rows) + "\n", encoding="utf-8")
        with pytest.raises(ValueError, match="mixed language pairs"):
            corpus_from_jsonl(path)

    def test_empty_rejected(self, tmp_path):
        path = tmp_path / "corpus.jsonl"
        path.write_text("", encoding="utf-8")
        with pytest.raises(ValueError, match="no segments"):
            corpus_from_jsonl(path)


def test_normalize_ws():
    assert normalize_ws("  ein\t\tgrober\n Fehler ") == "ein grober Fehler"
