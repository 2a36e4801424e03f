"""Command-line interface.

One command per process, batch in, files out:

* ``parse``      annotation files -> corpus JSONL
* ``score``      corpus -> per-segment quality scores
* ``prompt``     corpus -> prompts.jsonl (dry run, never touches the network)
* ``postedit``   corpus -> records.jsonl via an OpenAI-compatible endpoint
* ``translate``  corpus -> records.jsonl, translating from scratch
* ``evaluate``   corpus + records -> report.json with significance tests
* ``analyze``    corpus + records -> error span resolution report
* ``agreement``  corpus -> annotation source agreement report
* ``dataset``    corpora -> instruction-tuning JSONL + training manifest
* ``mock-server``  run the deterministic mock endpoint in the foreground

Exit codes: 0 success, 1 finished with per-segment failures, 2 fatal
(bad configuration, unreadable input, or a non-retryable endpoint error).
Commands with an ``--out`` directory write ``config.json`` with their
resolved options; rerunning with the same inputs and seed reproduces every
artifact byte for byte.
"""
from __future__ import annotations

import argparse
import json
import shlex
import subprocess
import sys
from pathlib import Path

from . import analysis, datasetgen, gateway, metrics, mock_server, scoring
from ._io import atomic_write_text, write_jsonl
from .corpus import (
    AnnotationSource,
    Corpus,
    LangPair,
    Severity,
    corpus_from_jsonl,
    corpus_stats,
    corpus_to_jsonl,
    filter_segments,
    first_rater,
    parse_demetr,
    parse_external_annotations,
    parse_mqm_tsv,
)
from .feedback import ALL_COMPONENTS, FeedbackKind, FeedbackSpec

EXIT_OK = 0
EXIT_PARTIAL = 1
EXIT_FATAL = 2


def _fatal(message: str) -> int:
    print(f"error: {message}", file=sys.stderr)
    return EXIT_FATAL


def _write_config(out_dir: Path, command: str, options: dict) -> None:
    config = {"command": command, "options": {k: options[k] for k in sorted(options)}}
    atomic_write_text(out_dir / "config.json", json.dumps(config, indent=2, sort_keys=True) + "\n")


def _annotation_source(name: str) -> AnnotationSource:
    return AnnotationSource(name)


def _components(raw: str) -> frozenset[str]:
    parts = frozenset(p.strip() for p in raw.split(",") if p.strip())
    if not parts or not parts <= ALL_COMPONENTS:
        raise ValueError(f"components must come from {sorted(ALL_COMPONENTS)}, got {raw!r}")
    return parts


# ---------------------------------------------------------------- parse


def cmd_parse(args: argparse.Namespace) -> int:
    if bool(args.mqm) == bool(args.demetr):
        return _fatal("give exactly one of --mqm or --demetr")
    try:
        if args.mqm:
            if not args.lang:
                return _fatal("--mqm needs --lang")
            corpus = parse_mqm_tsv(args.mqm, LangPair.from_code(args.lang))
        else:
            corpus = parse_demetr(args.demetr, pool=args.pool)
        for spec in args.external or []:
            name, _, path = spec.partition(":")
            if not path:
                return _fatal(f"--external wants SOURCE:PATH, got {spec!r}")
            corpus = parse_external_annotations(corpus, path, _annotation_source(name))
        if args.first_rater:
            corpus = first_rater(corpus)
        for predicate in args.filter or []:
            name, _, value = predicate.partition("=")
            corpus = filter_segments(corpus, name, value or None)
        corpus_to_jsonl(corpus, args.out)
    except (ValueError, OSError) as exc:
        return _fatal(str(exc))
    if args.stats:
        print(json.dumps(corpus_stats(corpus), ensure_ascii=False, indent=2))
    print(f"wrote {len(corpus.segments)} segments to {args.out}", file=sys.stderr)
    return EXIT_OK


# ---------------------------------------------------------------- score


def cmd_score(args: argparse.Namespace) -> int:
    try:
        corpus = corpus_from_jsonl(args.corpus)
        table = scoring.load_weight_table(args.weights) if args.weights else scoring.WeightTable()
        source = _annotation_source(args.source) if args.source else None
        lines = ["id\tpenalty\tnormalized\trendered"]
        for segment in corpus.segments:
            quality = scoring.score_segment(
                segment, table=table, rater_policy=args.rater_policy, source=source
            )
            lines.append(
                f"{segment.id}\t{quality.penalty:.4f}\t{quality.normalized:.4f}\t{quality.rendered}"
            )
    except (ValueError, OSError, KeyError) as exc:
        return _fatal(str(exc))
    text = "\n".join(lines) + "\n"
    if args.out:
        atomic_write_text(Path(args.out), text)
    else:
        sys.stdout.write(text)
    return EXIT_OK


# ---------------------------------------------------------------- prompts


def _spec_builder(args, corpus: Corpus):
    """Per-segment FeedbackSpec factory from CLI options."""
    kind = FeedbackKind(args.feedback)
    components = _components(args.components)
    table = scoring.load_weight_table(args.weights) if args.weights else scoring.WeightTable()
    source = _annotation_source(args.source)

    def build(segment):
        if kind is FeedbackKind.GENERIC:
            return FeedbackSpec(kind=kind)
        if kind is FeedbackKind.SCORE:
            quality = scoring.score_segment(
                segment, table=table, rater_policy=args.rater_policy, source=source
            )
            return FeedbackSpec(kind=kind, score=quality.normalized)
        annotations = tuple(
            a
            for a in segment.annotations_from(source)
            if a.severity is not Severity.NEUTRAL
        )
        return FeedbackSpec(kind=kind, annotations=annotations, components=components)

    return kind, source, build


def _prompt_corpus(args, corpus: Corpus, kind: FeedbackKind, source: AnnotationSource) -> Corpus:
    """Fine-grained feedback only makes sense for segments with errors."""
    if kind is not FeedbackKind.FINE_GRAINED:
        return corpus
    kept = tuple(
        s
        for s in corpus.segments
        if any(a.severity is not Severity.NEUTRAL for a in s.annotations_from(source))
    )
    return Corpus(lang=corpus.lang, segments=kept, provenance=dict(corpus.provenance))


def _load_shot_pool(args, corpus: Corpus, build):
    if not args.shots:
        if args.k:
            raise ValueError("--k needs --shots POOL")
        return []
    pool_corpus = corpus_from_jsonl(args.shots)
    if pool_corpus.lang.code != corpus.lang.code:
        raise ValueError(
            f"shot pool pair {pool_corpus.lang.code} does not match corpus {corpus.lang.code}"
        )
    pool = []
    for segment in pool_corpus.segments:
        try:
            pool.append((segment, build(segment), None))
        except ValueError:
            continue  # pool segment unusable for this feedback kind (e.g. error-free)
    return pool


def _prompt_options(args, command: str) -> dict:
    options = {
        "corpus": str(args.corpus),
        "feedback": args.feedback,
        "components": args.components,
        "source": args.source,
        "rater_policy": args.rater_policy,
        "weights": str(args.weights) if args.weights else None,
        "k": args.k,
        "seed": args.seed,
        "shots": str(args.shots) if args.shots else None,
    }
    if command in ("postedit", "translate"):
        options.update(
            {
                "endpoint": args.endpoint,
                "model": args.model,
                "api_shape": args.api_shape,
                "temperature": args.temperature,
                "top_p": args.top_p,
                "max_tokens": args.max_tokens,
                "max_in_flight": args.max_in_flight,
                "max_retries": args.max_retries,
                "request_seed": args.request_seed,
            }
        )
    return options


def _prepare_prompt_run(args):
    corpus = corpus_from_jsonl(args.corpus)
    kind, source, build = _spec_builder(args, corpus)
    corpus = _prompt_corpus(args, corpus, kind, source)
    if not corpus.segments:
        raise ValueError("no segments left to prompt for")
    pool = _load_shot_pool(args, corpus, build)
    tasks = gateway.prepare_prompts(corpus, build, shot_pool=pool, k=args.k, seed=args.seed)
    return corpus, tasks


def _write_prompts(out_dir: Path, tasks) -> None:
    write_jsonl(
        out_dir / "prompts.jsonl",
        [
            json.dumps(
                {"id": t.segment_id, "feedback": t.feedback, "k": t.k, "prompt": t.prompt},
                ensure_ascii=False,
            )
            for t in tasks
        ],
    )


def cmd_prompt(args: argparse.Namespace) -> int:
    try:
        out_dir = Path(args.out)
        out_dir.mkdir(parents=True, exist_ok=True)
        corpus, tasks = _prepare_prompt_run(args)
    except (ValueError, OSError) as exc:
        return _fatal(str(exc))
    _write_config(out_dir, "prompt", _prompt_options(args, "prompt"))
    _write_prompts(out_dir, tasks)
    print(f"wrote {len(tasks)} prompts to {out_dir / 'prompts.jsonl'}", file=sys.stderr)
    return EXIT_OK


# ---------------------------------------------------------------- postedit / translate


def _generation_config(args) -> gateway.GenerationConfig:
    return gateway.GenerationConfig(
        endpoint=args.endpoint,
        model=args.model,
        api_shape=args.api_shape,
        temperature=args.temperature,
        top_p=args.top_p,
        max_tokens=args.max_tokens,
        timeout_s=args.timeout,
        max_retries=args.max_retries,
        retry_backoff_s=args.backoff,
        max_in_flight=args.max_in_flight,
        seed=args.request_seed,
        api_key=args.api_key,
    )


def _finish_batch(out_dir: Path, corpus: Corpus, tasks, records) -> int:
    _write_prompts(out_dir, tasks)
    write_jsonl(out_dir / "records.jsonl", gateway.records_to_jsonl(records))
    failed = sum(1 for r in records if r.failed)
    print(
        f"{len(records) - failed}/{len(records)} segments succeeded"
        + (f", {failed} failed" if failed else ""),
        file=sys.stderr,
    )
    return EXIT_PARTIAL if failed else EXIT_OK


def cmd_postedit(args: argparse.Namespace) -> int:
    try:
        out_dir = Path(args.out)
        out_dir.mkdir(parents=True, exist_ok=True)
        corpus, tasks = _prepare_prompt_run(args)
        cfg = _generation_config(args)
    except (ValueError, OSError) as exc:
        return _fatal(str(exc))
    _write_config(out_dir, "postedit", _prompt_options(args, "postedit"))
    try:
        records = gateway.run_tasks(tasks, cfg, corpus.lang)
    except gateway.GatewayError as exc:
        return _fatal(str(exc))
    return _finish_batch(out_dir, corpus, tasks, records)


def cmd_translate(args: argparse.Namespace) -> int:
    try:
        out_dir = Path(args.out)
        out_dir.mkdir(parents=True, exist_ok=True)
        corpus = corpus_from_jsonl(args.corpus)
        tasks = gateway.prepare_translate_prompts(corpus)
        cfg = _generation_config(args)
    except (ValueError, OSError) as exc:
        return _fatal(str(exc))
    options = {
        "corpus": str(args.corpus),
        "endpoint": args.endpoint,
        "model": args.model,
        "api_shape": args.api_shape,
        "temperature": args.temperature,
        "top_p": args.top_p,
        "max_tokens": args.max_tokens,
        "max_in_flight": args.max_in_flight,
        "max_retries": args.max_retries,
        "request_seed": args.request_seed,
    }
    _write_config(out_dir, "translate", options)
    try:
        records = gateway.run_tasks(tasks, cfg, corpus.lang)
    except gateway.GatewayError as exc:
        return _fatal(str(exc))
    return _finish_batch(out_dir, corpus, tasks, records)


# ---------------------------------------------------------------- evaluate


def _comet_scores(command: str, rows: list[dict], timeout_s: float) -> list[float] | None:
    """Stream segments through an external scorer; None on any failure."""
    payload = "".join(json.dumps(row, ensure_ascii=False) + "\n" for row in rows)
    try:
        proc = subprocess.run(
            shlex.split(command),
            input=payload,
            capture_output=True,
            text=True,
            timeout=timeout_s,
        )
    except (OSError, subprocess.TimeoutExpired) as exc:
        print(f"warning: scorer bridge unavailable ({exc}); skipping", file=sys.stderr)
        return None
    if proc.returncode != 0:
        print(
            f"warning: scorer bridge exited {proc.returncode}; skipping", file=sys.stderr
        )
        return None
    by_id: dict[str, float] = {}
    for line in proc.stdout.splitlines():
        line = line.strip()
        if not line:
            continue
        try:
            record = json.loads(line)
        except json.JSONDecodeError:
            continue
        if "comet" in record and "id" in record:
            by_id[str(record["id"])] = float(record["comet"])
    scores = []
    for row in rows:
        if row["id"] not in by_id:
            print(
                f"warning: scorer bridge returned no score for {row['id']!r}; skipping",
                file=sys.stderr,
            )
            return None
        scores.append(by_id[row["id"]])
    return scores


def cmd_evaluate(args: argparse.Namespace) -> int:
    try:
        out_dir = Path(args.out)
        out_dir.mkdir(parents=True, exist_ok=True)
        corpus = corpus_from_jsonl(args.corpus)
        records = gateway.records_from_jsonl(args.records)
    except (ValueError, OSError) as exc:
        return _fatal(str(exc))
    edits = {r.segment_id: r.hypothesis for r in records if not r.failed}
    ids, originals, edited, references = [], [], [], []
    for segment in corpus.segments:
        hyp = edits.get(segment.id)
        if hyp is None or segment.reference is None:
            continue
        ids.append(segment.id)
        originals.append(segment.hypothesis)
        edited.append(hyp)
        references.append(segment.reference)
    if not ids:
        return _fatal("no segments with both a reference and a successful edit")
    _write_config(
        out_dir,
        "evaluate",
        {
            "corpus": str(args.corpus),
            "records": str(args.records),
            "resamples": args.resamples,
            "seed": args.seed,
            "lowercase": args.lowercase,
            "comet_bridge": args.comet_bridge,
        },
    )
    report_before = metrics.evaluate_pairs(originals, references, lowercase=args.lowercase)
    report_after = metrics.evaluate_pairs(edited, references, lowercase=args.lowercase)
    significance = [
        metrics.paired_bootstrap(
            report_after.bleu_by_segment,
            report_before.bleu_by_segment,
            resamples=args.resamples,
            seed=args.seed,
            metric="bleu",
        ),
        metrics.paired_bootstrap(
            report_after.ter_by_segment,
            report_before.ter_by_segment,
            resamples=args.resamples,
            seed=args.seed,
            metric="ter",
        ),
    ]
    if args.comet_bridge:
        rows_before = [
            {"id": i, "source": corpus.by_id(i).source, "hypothesis": h, "reference": r}
            for i, h, r in zip(ids, originals, references)
        ]
        rows_after = [
            {"id": i, "source": corpus.by_id(i).source, "hypothesis": h, "reference": r}
            for i, h, r in zip(ids, edited, references)
        ]
        before_scores = _comet_scores(args.comet_bridge, rows_before, args.bridge_timeout)
        after_scores = (
            _comet_scores(args.comet_bridge, rows_after, args.bridge_timeout)
            if before_scores is not None
            else None
        )
        if before_scores is not None and after_scores is not None:
            report_before.comet = sum(before_scores) / len(before_scores)
            report_after.comet = sum(after_scores) / len(after_scores)
            significance.append(
                metrics.paired_bootstrap(
                    after_scores,
                    before_scores,
                    resamples=args.resamples,
                    seed=args.seed,
                    metric="comet",
                )
            )
    report = {
        "segments_evaluated": len(ids),
        "segments_skipped": len(corpus.segments) - len(ids),
        "original": report_before.to_dict(),
        "postedit": report_after.to_dict(),
        "delta": {
            "bleu": round(report_after.bleu - report_before.bleu, 4),
            "ter": round(report_after.ter - report_before.ter, 4),
        },
        "significance": [
            {
                "metric": s.metric,
                "delta": round(s.delta, 4),
                "p_value": round(s.p_value, 4),
                "resamples": s.resamples,
                "seed": s.seed,
            }
            for s in significance
        ],
    }
    atomic_write_text(out_dir / "report.json", json.dumps(report, indent=2) + "\n")
    segment_lines = ["id\tbleu_original\tbleu_postedit\tter_original\tter_postedit"]
    for i, seg_id in enumerate(ids):
        segment_lines.append(
            f"{seg_id}\t{report_before.bleu_by_segment[i]:.4f}\t{report_after.bleu_by_segment[i]:.4f}"
            f"\t{report_before.ter_by_segment[i]:.4f}\t{report_after.ter_by_segment[i]:.4f}"
        )
    atomic_write_text(out_dir / "segments.tsv", "\n".join(segment_lines) + "\n")
    print(json.dumps(report["delta"]), file=sys.stderr)
    return EXIT_OK


# ---------------------------------------------------------------- analyze / agreement


def cmd_analyze(args: argparse.Namespace) -> int:
    try:
        corpus = corpus_from_jsonl(args.corpus)
        records = gateway.records_from_jsonl(args.records)
        edits = {r.segment_id: r.hypothesis for r in records if not r.failed}
        source = _annotation_source(args.source)
        report = analysis.resolution_analysis(
            corpus, edits, condition=args.condition, source=source
        )
        out: dict = report.to_dict()
        if args.audit_overedit:
            clean = filter_segments(corpus, "no_error")
            out["overedit"] = analysis.overedit_audit(clean, edits).to_dict()
    except (ValueError, OSError) as exc:
        return _fatal(str(exc))
    text = json.dumps(out, ensure_ascii=False, indent=2) + "\n"
    if args.out:
        atomic_write_text(Path(args.out), text)
    else:
        sys.stdout.write(text)
    return EXIT_OK


def cmd_agreement(args: argparse.Namespace) -> int:
    try:
        corpus = corpus_from_jsonl(args.corpus)
        report = analysis.agreement(
            corpus,
            _annotation_source(args.source_a),
            _annotation_source(args.source_b),
            rule=args.rule,
            threshold=args.threshold,
            sample=args.sample,
            seed=args.seed,
        )
    except (ValueError, OSError) as exc:
        return _fatal(str(exc))
    text = json.dumps(report.to_dict(), indent=2) + "\n"
    if args.out:
        atomic_write_text(Path(args.out), text)
    else:
        sys.stdout.write(text)
    return EXIT_OK


# ---------------------------------------------------------------- dataset


def cmd_dataset(args: argparse.Namespace) -> int:
    try:
        out_dir = Path(args.out)
        out_dir.mkdir(parents=True, exist_ok=True)
        mqm_corpora = [corpus_from_jsonl(path) for path in args.mqm]
        demetr_corpora = [parse_demetr(path) for path in args.demetr or []]
        plan = datasetgen.SplitPlan(
            dev=args.dev, test=args.test, train=args.train, seed=args.seed
        )
        kind = FeedbackKind(args.feedback)
        demetr_by_pool: dict[str, Corpus] = {}
        for corpus in demetr_corpora:
            pool = corpus.provenance.get("pool", corpus.lang.code)
            if pool in demetr_by_pool:
                raise ValueError(f"two perturbation corpora for pool {pool!r}")
            demetr_by_pool[pool] = corpus
        datasets: dict[str, list[datasetgen.InstructExample]] = {}
        for corpus in mqm_corpora:
            pool = corpus.lang.code
            if pool in datasets:
                raise ValueError(f"two annotated corpora for pair {pool!r}")
            datasets[pool] = datasetgen.build_instruction_dataset(
                corpus,
                plan,
                feedback_kind=kind,
                demetr=demetr_by_pool.pop(pool, None),
            )
        if demetr_by_pool:
            stray = ", ".join(sorted(demetr_by_pool))
            raise ValueError(f"perturbation corpora without a matching --mqm pair: {stray}")
        _write_config(
            out_dir,
            "dataset",
            {
                "mqm": [str(p) for p in args.mqm],
                "demetr": [str(p) for p in args.demetr or []],
                "feedback": args.feedback,
                "dev": args.dev,
                "test": args.test,
                "train": args.train,
                "seed": args.seed,
                "regime": args.regime,
                "base_model": args.base_model,
            },
        )
        counts = {}
        if args.regime == "multilingual":
            merged = [e for pool in sorted(datasets) for e in datasets[pool]]
            datasetgen.export_jsonl(merged, out_dir / "dataset.jsonl")
            counts["dataset.jsonl"] = len(merged)
        else:
            for pool in sorted(datasets):
                name = f"dataset.{pool}.jsonl"
                datasetgen.export_jsonl(datasets[pool], out_dir / name)
                counts[name] = len(datasets[pool])
        datasetgen.export_training_manifest(args.regime, args.base_model, out_dir / "manifest.json")
    except (ValueError, OSError) as exc:
        return _fatal(str(exc))
    for name, count in counts.items():
        print(f"wrote {count} examples to {out_dir / name}", file=sys.stderr)
    return EXIT_OK


# ---------------------------------------------------------------- mock server


def cmd_mock_server(args: argparse.Namespace) -> int:
    try:
        responses = None
        if args.mode == "echo-reference":
            if not args.corpus:
                return _fatal("echo-reference mode needs --corpus")
            responses = mock_server.reference_map(corpus_from_jsonl(args.corpus))
        elif args.mode == "scripted":
            if not args.script:
                return _fatal("scripted mode needs --script")
            responses = json.loads(Path(args.script).read_text(encoding="utf-8"))
        server = mock_server.MockServer(
            mode=args.mode,
            responses=responses,
            fail_times=args.fail_times,
            require_auth=args.require_auth,
            host=args.host,
            port=args.port,
        )
    except (ValueError, OSError) as exc:
        return _fatal(str(exc))
    print(f"serving {args.mode} on {server.base_url}", file=sys.stderr)
    try:
        server.serve_forever()
    except KeyboardInterrupt:
        pass
    finally:
        server.server_close()
    return EXIT_OK


# ---------------------------------------------------------------- parser


def _add_prompt_flags(parser: argparse.ArgumentParser) -> None:
    parser.add_argument("--corpus", required=True, help="corpus JSONL")
    parser.add_argument(
        "--feedback",
        choices=[k.value for k in FeedbackKind],
        default="fine_grained",
        help="feedback granularity (fine_grained keeps only segments with errors)",
    )
    parser.add_argument(
        "--components",
        default="span,type,severity",
        help="comma list of error sentence parts to reveal",
    )
    parser.add_argument(
        "--source",
        choices=[s.value for s in AnnotationSource],
        default="mqm",
        help="annotation source for fine-grained feedback and score derivation",
    )
    parser.add_argument("--rater-policy", choices=["average", "keep_all"], default="average")
    parser.add_argument("--weights", help="weight table JSON overriding the defaults")
    parser.add_argument("--shots", help="corpus JSONL used as the few-shot pool")
    parser.add_argument("--k", type=int, default=0, help="exemplars per prompt")
    parser.add_argument("--seed", type=int, default=0, help="shot selection seed")
    parser.add_argument("--out", required=True, help="output directory")


def _add_endpoint_flags(parser: argparse.ArgumentParser) -> None:
    parser.add_argument("--endpoint", required=True, help="base URL, e.g. http://127.0.0.1:8089/v1")
    parser.add_argument("--model", required=True)
    parser.add_argument("--api-shape", choices=["chat", "completion"], default="chat")
    parser.add_argument("--temperature", type=float, default=0.0)
    parser.add_argument("--top-p", type=float, default=1.0, dest="top_p")
    parser.add_argument("--max-tokens", type=int, default=256)
    parser.add_argument("--timeout", type=float, default=30.0, help="per-request timeout (s)")
    parser.add_argument("--max-retries", type=int, default=3)
    parser.add_argument("--backoff", type=float, default=0.5, help="base retry backoff (s)")
    parser.add_argument("--max-in-flight", type=int, default=4)
    parser.add_argument("--request-seed", type=int, default=None, help="seed passed to the endpoint")
    parser.add_argument("--api-key", default=None, help="defaults to $OPENAI_API_KEY")


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="mtpe",
        description="Feedback-guided post-editing for machine translation output.",
    )
    sub = parser.add_subparsers(dest="command", required=True)

    p = sub.add_parser("parse", help="convert annotation files to corpus JSONL")
    p.add_argument("--mqm", help="MQM annotation TSV")
    p.add_argument("--lang", help="language pair code for --mqm, e.g. en-de")
    p.add_argument("--demetr", help="perturbation records (JSON or JSONL)")
    p.add_argument("--pool", help="training pool filter for --demetr, e.g. en-de")
    p.add_argument(
        "--external",
        action="append",
        metavar="SOURCE:PATH",
        help="attach span annotations (instructscore:spans.jsonl, xcomet:spans.jsonl)",
    )
    p.add_argument("--first-rater", action="store_true", help="keep only each segment's first rater")
    p.add_argument(
        "--filter",
        action="append",
        metavar="PREDICATE[=VALUE]",
        help="has_error, no_error, lang_pair=CODE, system=NAME",
    )
    p.add_argument("--stats", action="store_true", help="print corpus statistics JSON")
    p.add_argument("--out", required=True, help="corpus JSONL to write")
    p.set_defaults(func=cmd_parse)

    p = sub.add_parser("score", help="per-segment quality scores")
    p.add_argument("--corpus", required=True)
    p.add_argument("--weights", help="weight table JSON")
    p.add_argument("--rater-policy", choices=["average", "keep_all"], default="average")
    p.add_argument("--source", choices=[s.value for s in AnnotationSource], default=None)
    p.add_argument("--out", help="TSV path (stdout when omitted)")
    p.set_defaults(func=cmd_score)

    p = sub.add_parser("prompt", help="render prompts without calling any endpoint")
    _add_prompt_flags(p)
    p.set_defaults(func=cmd_prompt)

    p = sub.add_parser("postedit", help="post-edit a corpus through an endpoint")
    _add_prompt_flags(p)
    _add_endpoint_flags(p)
    p.set_defaults(func=cmd_postedit)

    p = sub.add_parser("translate", help="translate from scratch through an endpoint")
    p.add_argument("--corpus", required=True)
    p.add_argument("--out", required=True)
    _add_endpoint_flags(p)
    p.set_defaults(func=cmd_translate)

    p = sub.add_parser("evaluate", help="score edits against references")
    p.add_argument("--corpus", required=True)
    p.add_argument("--records", required=True, help="records.jsonl from postedit/translate")
    p.add_argument("--resamples", type=int, default=1000)
    p.add_argument("--seed", type=int, default=0)
    p.add_argument("--lowercase", action="store_true")
    p.add_argument(
        "--comet-bridge",
        default=None,
        help="external scorer command reading segment JSONL on stdin",
    )
    p.add_argument("--bridge-timeout", type=float, default=120.0)
    p.add_argument("--out", required=True)
    p.set_defaults(func=cmd_evaluate)

    p = sub.add_parser("analyze", help="which annotated errors survived editing")
    p.add_argument("--corpus", required=True)
    p.add_argument("--records", required=True)
    p.add_argument("--source", choices=[s.value for s in AnnotationSource], default="mqm")
    p.add_argument("--condition", default="postedit", help="label stored in the report")
    p.add_argument("--audit-overedit", action="store_true", help="also audit error-free segments")
    p.add_argument("--out", help="JSON path (stdout when omitted)")
    p.set_defaults(func=cmd_analyze)

    p = sub.add_parser("agreement", help="span agreement between two annotation sources")
    p.add_argument("--corpus", required=True)
    p.add_argument("--source-a", required=True, choices=[s.value for s in AnnotationSource])
    p.add_argument("--source-b", required=True, choices=[s.value for s in AnnotationSource])
    p.add_argument("--rule", choices=list(analysis.AGREEMENT_RULES), default="exact")
    p.add_argument("--threshold", type=float, default=0.5, help="token Jaccard threshold")
    p.add_argument("--sample", type=int, default=None, help="evaluate a seeded random subset")
    p.add_argument("--seed", type=int, default=0)
    p.add_argument("--out", help="JSON path (stdout when omitted)")
    p.set_defaults(func=cmd_agreement)

    p = sub.add_parser("dataset", help="build instruction-tuning data and manifest")
    p.add_argument("--mqm", action="append", required=True, help="annotated corpus JSONL (repeatable)")
    p.add_argument("--demetr", action="append", help="perturbation records file (repeatable)")
    p.add_argument("--feedback", choices=["fine_grained", "generic"], default="fine_grained")
    p.add_argument("--dev", type=int, default=200)
    p.add_argument("--test", type=int, default=1000)
    p.add_argument("--train", type=int, default=None, help="cap train size (default: all remaining)")
    p.add_argument("--seed", type=int, default=0)
    p.add_argument("--regime", choices=list(datasetgen.REGIMES), default="bilingual")
    p.add_argument("--base-model", default="editor-base")
    p.add_argument("--out", required=True)
    p.set_defaults(func=cmd_dataset)

    p = sub.add_parser("mock-server", help="run the deterministic mock endpoint")
    p.add_argument("--mode", choices=list(mock_server.MODES), default="identity")
    p.add_argument("--corpus", help="corpus JSONL for echo-reference mode")
    p.add_argument("--script", help="id -> text JSON map for scripted mode")
    p.add_argument("--host", default="127.0.0.1")
    p.add_argument("--port", type=int, default=8089)
    p.add_argument("--fail-times", type=int, default=0, help="500s per segment before success")
    p.add_argument("--require-auth", action="store_true")
    p.set_defaults(func=cmd_mock_server)

    return parser


def main(argv: list[str] | None = None) -> int:
    args = build_parser().parse_args(argv)
    return args.func(args)


if __name__ == "__main__":
    sys.exit(main())
