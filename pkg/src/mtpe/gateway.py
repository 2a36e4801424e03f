"""Batch client for OpenAI-compatible completion endpoints.

Prompts are built deterministically up front, then executed with a bounded
number of in-flight requests.  Transient failures (transport errors, 5xx,
429) are retried with exponential backoff; any other 4xx is treated as a
configuration problem and aborts the whole batch.  Results keep corpus
order regardless of completion order, and per-segment failures after
retries are recorded rather than raised so a batch can finish partially.
"""
from __future__ import annotations

import json
import os
import time
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass
from typing import Callable, Sequence

import requests

from .corpus import Corpus, LangPair, Segment
from .feedback import (
    FeedbackSpec,
    ShotEntry,
    build_postedit_prompt,
    build_translate_prompt,
)

API_KEY_ENV = "OPENAI_API_KEY"


class GatewayError(Exception):
    """Fatal gateway problem: bad config, auth failure, or any non-retryable 4xx."""


@dataclass
class GenerationConfig:
    """Connection and decoding settings for one batch run."""

    endpoint: str
    model: str
    api_shape: str = "chat"
    temperature: float = 0.0
    top_p: float = 1.0
    max_tokens: int = 256
    timeout_s: float = 30.0
    max_retries: int = 3
    retry_backoff_s: float = 0.5
    max_in_flight: int = 4
    seed: int | None = None
    api_key: str | None = None

    def __post_init__(self) -> None:
        if self.api_shape not in ("chat", "completion"):
            raise ValueError(f"api_shape must be 'chat' or 'completion', got {self.api_shape!r}")
        if self.max_in_flight < 1:
            raise ValueError("max_in_flight must be at least 1")
        if self.max_retries < 0:
            raise ValueError("max_retries must be non-negative")

    def resolved_api_key(self) -> str | None:
        return self.api_key or os.environ.get(API_KEY_ENV)


@dataclass
class PromptTask:
    """One prepared request: the segment and its rendered prompt."""

    segment_id: str
    feedback: str
    k: int
    prompt: str


@dataclass
class PostEditRecord:
    """Outcome of one segment's request.

    ``latency_ms`` is informational and intentionally left out of the
    serialized form so record files are byte-stable across reruns.
    """

    segment_id: str
    feedback: str
    k: int
    prompt: str
    raw_output: str | None
    hypothesis: str | None
    failed: bool
    error: str | None
    attempts: int
    latency_ms: float = 0.0

    def to_dict(self) -> dict:
        return {
            "segment_id": self.segment_id,
            "feedback": self.feedback,
            "k": self.k,
            "prompt": self.prompt,
            "raw_output": self.raw_output,
            "hypothesis": self.hypothesis,
            "failed": self.failed,
            "error": self.error,
            "attempts": self.attempts,
        }

    @classmethod
    def from_dict(cls, record: dict) -> "PostEditRecord":
        return cls(
            segment_id=record["segment_id"],
            feedback=record.get("feedback", ""),
            k=int(record.get("k", 0)),
            prompt=record.get("prompt", ""),
            raw_output=record.get("raw_output"),
            hypothesis=record.get("hypothesis"),
            failed=bool(record.get("failed", False)),
            error=record.get("error"),
            attempts=int(record.get("attempts", 0)),
        )


_QUOTE_PAIRS = [('"', '"'), ("``", "''"), ("`", "'"), ("'", "'"), ("“", "”"), ("‘", "’")]


def extract_hypothesis(raw: str, lang: LangPair) -> str | None:
    """Pull the edited translation out of a raw model response.

    Strips a leading ``Improved {TgtLang}:`` or ``{TgtLang}:`` cue, keeps
    lines up to the first blank line or a line starting with ``###``, joins
    them with single spaces, and trims whitespace plus one level of
    surrounding quote pairs.  Returns None when nothing usable remains.
    """
    text = raw.strip()
    for prefix in (f"Improved {lang.tgt}:", f"{lang.tgt}:"):
        if text.startswith(prefix):
            text = text[len(prefix):].lstrip()
            break
    kept: list[str] = []
    for line in text.splitlines():
        stripped = line.strip()
        if not stripped or stripped.startswith("###"):
            break
        kept.append(stripped)
    candidate = " ".join(kept).strip()
    for opener, closer in _QUOTE_PAIRS:
        if (
            len(candidate) > len(opener) + len(closer)
            and candidate.startswith(opener)
            and candidate.endswith(closer)
        ):
            candidate = candidate[len(opener):-len(closer)].strip()
            break
    return candidate or None


def _resolve_spec(
    spec_for: FeedbackSpec | dict | Callable[[Segment], FeedbackSpec],
    segment: Segment,
) -> FeedbackSpec:
    if isinstance(spec_for, FeedbackSpec):
        return spec_for
    if isinstance(spec_for, dict):
        return spec_for[segment.id]
    return spec_for(segment)


def prepare_prompts(
    corpus: Corpus,
    spec_for: FeedbackSpec | dict | Callable[[Segment], FeedbackSpec],
    shot_pool: Sequence[ShotEntry] = (),
    k: int = 0,
    seed: int = 0,
) -> list[PromptTask]:
    """Render the post-editing prompt for every segment, in corpus order."""
    tasks = []
    for segment in corpus.segments:
        spec = _resolve_spec(spec_for, segment)
        bundle = build_postedit_prompt(
            segment, spec, corpus.lang, shot_pool=shot_pool, k=k, seed=seed
        )
        tasks.append(
            PromptTask(
                segment_id=segment.id,
                feedback=spec.kind.value,
                k=k,
                prompt=bundle.text,
            )
        )
    return tasks


def prepare_translate_prompts(corpus: Corpus) -> list[PromptTask]:
    """Render the translate-from-scratch prompt for every segment."""
    return [
        PromptTask(
            segment_id=segment.id,
            feedback="translate",
            k=0,
            prompt=build_translate_prompt(segment, corpus.lang),
        )
        for segment in corpus.segments
    ]


def _request_once(task: PromptTask, cfg: GenerationConfig) -> str:
    base = cfg.endpoint.rstrip("/")
    if cfg.api_shape == "chat":
        url = f"{base}/chat/completions"
        payload: dict = {
            "model": cfg.model,
            "messages": [{"role": "user", "content": task.prompt}],
        }
    else:
        url = f"{base}/completions"
        payload = {"model": cfg.model, "prompt": task.prompt}
    payload.update(
        {
            "temperature": cfg.temperature,
            "top_p": cfg.top_p,
            "max_tokens": cfg.max_tokens,
            "user": task.segment_id,
        }
    )
    if cfg.seed is not None:
        payload["seed"] = cfg.seed
    headers = {}
    key = cfg.resolved_api_key()
    if key:
        headers["Authorization"] = f"Bearer {key}"
    response = requests.post(url, json=payload, headers=headers, timeout=cfg.timeout_s)
    if response.status_code >= 500 or response.status_code == 429:
        raise _Retryable(f"HTTP {response.status_code}: {response.text[:200]}")
    if response.status_code >= 400:
        raise GatewayError(
            f"HTTP {response.status_code} for segment {task.segment_id!r}: {response.text[:200]}"
        )
    try:
        body = response.json()
        choice = body["choices"][0]
        if cfg.api_shape == "chat":
            return choice["message"]["content"]
        return choice["text"]
    except (ValueError, KeyError, IndexError, TypeError) as exc:
        raise _Malformed(f"unexpected response shape: {exc}") from None


class _Retryable(Exception):
    pass


class _Malformed(Exception):
    pass


def _run_task(task: PromptTask, cfg: GenerationConfig, lang: LangPair) -> PostEditRecord:
    started = time.monotonic()
    attempts = 0
    error: str | None = None
    raw: str | None = None
    while attempts <= cfg.max_retries:
        attempts += 1
        try:
            raw = _request_once(task, cfg)
            error = None
            break
        except _Malformed as exc:
            error = str(exc)
            break
        except (_Retryable, requests.RequestException) as exc:
            error = str(exc)
            if attempts > cfg.max_retries:
                break
            time.sleep(cfg.retry_backoff_s * (2 ** (attempts - 1)))
    latency_ms = (time.monotonic() - started) * 1000.0
    if raw is None:
        return PostEditRecord(
            segment_id=task.segment_id,
            feedback=task.feedback,
            k=task.k,
            prompt=task.prompt,
            raw_output=None,
            hypothesis=None,
            failed=True,
            error=error or "request failed",
            attempts=attempts,
            latency_ms=latency_ms,
        )
    hypothesis = extract_hypothesis(raw, lang)
    failed = hypothesis is None
    return PostEditRecord(
        segment_id=task.segment_id,
        feedback=task.feedback,
        k=task.k,
        prompt=task.prompt,
        raw_output=raw,
        hypothesis=hypothesis,
        failed=failed,
        error="empty hypothesis after extraction" if failed else None,
        attempts=attempts,
        latency_ms=latency_ms,
    )


def run_tasks(tasks: Sequence[PromptTask], cfg: GenerationConfig, lang: LangPair) -> list[PostEditRecord]:
    """Execute prepared prompts, preserving input order in the results.

    Raises:
        GatewayError: a non-retryable 4xx response aborted the batch.
    """
    if not tasks:
        return []
    pool = ThreadPoolExecutor(max_workers=cfg.max_in_flight)
    try:
        futures = [pool.submit(_run_task, task, cfg, lang) for task in tasks]
        return [future.result() for future in futures]
    finally:
        pool.shutdown(wait=False, cancel_futures=True)


def postedit_batch(
    corpus: Corpus,
    spec_for: FeedbackSpec | dict | Callable[[Segment], FeedbackSpec],
    cfg: GenerationConfig,
    shot_pool: Sequence[ShotEntry] = (),
    k: int = 0,
    seed: int = 0,
) -> list[PostEditRecord]:
    """Post-edit every segment of a corpus through the configured endpoint."""
    tasks = prepare_prompts(corpus, spec_for, shot_pool=shot_pool, k=k, seed=seed)
    return run_tasks(tasks, cfg, corpus.lang)


def translate_batch(corpus: Corpus, cfg: GenerationConfig) -> list[PostEditRecord]:
    """Translate every segment from scratch through the configured endpoint."""
    tasks = prepare_translate_prompts(corpus)
    return run_tasks(tasks, cfg, corpus.lang)


def records_to_jsonl(records: Sequence[PostEditRecord]) -> list[str]:
    """Serialize records to JSON lines (stable field order, no timings)."""
    return [json.dumps(r.to_dict(), ensure_ascii=False) for r in records]


def records_from_jsonl(path) -> list[PostEditRecord]:
    """Load records written by :func:`records_to_jsonl`."""
    records = []
    with open(path, encoding="utf-8") as handle:
        for line in handle:
            line = line.strip()
            if line:
                records.append(PostEditRecord.from_dict(json.loads(line)))
    return records
