"""Instruction-tuning dataset construction for editor models.

Every segment becomes one training example whose instruction shows the
source, the hypothesis, and an Errors line, and whose completion is the
reference translation:

    ### English: {source}
    ### German: {hypothesis}
    ### Errors: {feedback}

    ### Improved German:

Fine-grained feedback renders one sentence per annotated error using the
full lowercased category label; error-free segments render ``None.``.
Generic feedback puts the literal improvement instruction on the Errors
line for every segment, so the skeleton stays fixed across both styles.

The annotated corpus is split train/dev/test with a seeded shuffle;
perturbation corpora join the training split.  Train and dev examples
sharing a source or hypothesis string with a test segment are dropped.
"""
from __future__ import annotations

import json
import random
from dataclasses import dataclass
from pathlib import Path

from ._io import atomic_write_text, write_jsonl
from .corpus import TRAINING_POOL, Corpus, LangPair, Segment, dedup_against
from .feedback import ALL_COMPONENTS, FeedbackKind, render_error_sentences

SPLITS = ("train", "dev", "test")
ORIGINS = ("mqm", "demetr")
REGIMES = ("bilingual", "multilingual")


@dataclass(frozen=True)
class SplitPlan:
    """Split sizes for the annotated corpus; ``train=None`` takes the rest."""

    dev: int = 200
    test: int = 1000
    train: int | None = None
    seed: int = 0

    def __post_init__(self) -> None:
        if self.dev < 0 or self.test < 0 or (self.train is not None and self.train < 0):
            raise ValueError("split sizes must be non-negative")


@dataclass(frozen=True)
class InstructExample:
    """One instruction-tuning pair plus its bookkeeping fields."""

    instruction: str
    completion: str
    lang: str
    split: str
    origin: str


def render_instruction(
    segment: Segment,
    lang: LangPair,
    feedback_kind: FeedbackKind = FeedbackKind.FINE_GRAINED,
    components: frozenset[str] = ALL_COMPONENTS,
) -> str:
    """The instruction text for one segment (everything before the answer)."""
    if feedback_kind is FeedbackKind.GENERIC:
        errors_text = (
            f"Improve the translation from {lang.src} to {lang.tgt} without any explanation."
        )
    elif feedback_kind is FeedbackKind.FINE_GRAINED:
        sentences = render_error_sentences(
            segment.errors, components=components, type_style="path"
        )
        errors_text = " ".join(sentences) if sentences else "None."
    else:
        raise ValueError(f"unsupported feedback kind for dataset: {feedback_kind.value}")
    return (
        f"### {lang.src}: {segment.source}\n"
        f"### {lang.tgt}: {segment.hypothesis}\n"
        f"### Errors: {errors_text}\n"
        "\n"
        f"### Improved {lang.tgt}:"
    )


def _examples(
    corpus: Corpus,
    segments: list[Segment],
    split: str,
    origin: str,
    feedback_kind: FeedbackKind,
    components: frozenset[str],
) -> list[InstructExample]:
    pool = TRAINING_POOL.get(corpus.lang.code, corpus.lang.code)
    examples = []
    for segment in segments:
        if segment.reference is None:
            raise ValueError(f"segment {segment.id!r} has no reference to train toward")
        examples.append(
            InstructExample(
                instruction=render_instruction(segment, corpus.lang, feedback_kind, components),
                completion=segment.reference,
                lang=pool,
                split=split,
                origin=origin,
            )
        )
    return examples


def build_instruction_dataset(
    mqm: Corpus,
    plan: SplitPlan,
    feedback_kind: FeedbackKind = FeedbackKind.FINE_GRAINED,
    demetr: Corpus | None = None,
    components: frozenset[str] = ALL_COMPONENTS,
) -> list[InstructExample]:
    """Build one language pair's instruction dataset.

    The annotated corpus is shuffled once with ``plan.seed``; the first
    ``plan.test`` segments form the test split, the next usable ``plan.dev``
    the dev split, the rest (capped at ``plan.train`` if set) the training
    split.  Dev and train are deduplicated against the test split by exact
    source-or-hypothesis match, as is the perturbation corpus, whose
    segments all join the training split.  Examples come back ordered
    train (annotated, then perturbation), dev, test.

    Raises:
        ValueError: plan counts exceed what the corpus (after dedup) can
            provide, or a segment lacks a reference.
    """
    if plan.test + plan.dev > len(mqm.segments):
        raise ValueError(
            f"plan needs {plan.test + plan.dev} segments for test+dev, corpus has {len(mqm.segments)}"
        )
    order = list(mqm.segments)
    random.Random(plan.seed).shuffle(order)
    test_segments = order[:plan.test]
    test_corpus = Corpus(lang=mqm.lang, segments=tuple(test_segments))
    rest_corpus = Corpus(lang=mqm.lang, segments=tuple(order[plan.test:]))
    clean_rest, _ = dedup_against(rest_corpus, test_corpus)
    usable = list(clean_rest.segments)
    if len(usable) < plan.dev:
        raise ValueError(
            f"plan needs {plan.dev} dev segments, only {len(usable)} remain after dedup"
        )
    dev_segments = usable[:plan.dev]
    train_segments = usable[plan.dev:]
    if plan.train is not None:
        if len(train_segments) < plan.train:
            raise ValueError(
                f"plan needs {plan.train} train segments, only {len(train_segments)} remain"
            )
        train_segments = train_segments[:plan.train]

    examples = _examples(mqm, train_segments, "train", "mqm", feedback_kind, components)
    if demetr is not None:
        clean_demetr, _ = dedup_against(demetr, test_corpus)
        examples.extend(
            _examples(demetr, list(clean_demetr.segments), "train", "demetr", feedback_kind, components)
        )
    examples.extend(_examples(mqm, dev_segments, "dev", "mqm", feedback_kind, components))
    examples.extend(_examples(mqm, test_segments, "test", "mqm", feedback_kind, components))
    return examples


def export_jsonl(examples: list[InstructExample], path: Path | str) -> None:
    """Write examples as JSON lines with a stable field order."""
    lines = [
        json.dumps(
            {
                "instruction": e.instruction,
                "output": e.completion,
                "lang": e.lang,
                "split": e.split,
                "origin": e.origin,
            },
            ensure_ascii=False,
        )
        for e in examples
    ]
    write_jsonl(Path(path), lines)


def load_jsonl(path: Path | str) -> list[InstructExample]:
    """Load examples written by :func:`export_jsonl`."""
    examples = []
    with open(path, encoding="utf-8") as handle:
        for line in handle:
            line = line.strip()
            if not line:
                continue
            record = json.loads(line)
            examples.append(
                InstructExample(
                    instruction=record["instruction"],
                    completion=record["output"],
                    lang=record["lang"],
                    split=record["split"],
                    origin=record["origin"],
                )
            )
    return examples


@dataclass(frozen=True)
class TrainingManifest:
    """Adapter fine-tuning settings consumed by the training harness."""

    base_model: str
    regime: str
    lora_rank: int = 16
    lora_alpha: int = 32
    lora_dropout: float = 0.05
    learning_rate: float = 2e-4
    batch_size: int = 2
    gradient_accumulation: int = 4
    warmup_steps: int = 20
    epochs: int = 5
    early_stop_patience: int = 16

    def __post_init__(self) -> None:
        if self.regime not in REGIMES:
            raise ValueError(f"regime must be one of {REGIMES}, got {self.regime!r}")

    def to_dict(self) -> dict:
        return {
            "base_model": self.base_model,
            "regime": self.regime,
            "lora_rank": self.lora_rank,
            "lora_alpha": self.lora_alpha,
            "lora_dropout": self.lora_dropout,
            "learning_rate": self.learning_rate,
            "batch_size": self.batch_size,
            "gradient_accumulation": self.gradient_accumulation,
            "warmup_steps": self.warmup_steps,
            "epochs": self.epochs,
            "early_stop_patience": self.early_stop_patience,
        }


def export_training_manifest(regime: str, base_model: str, path: Path | str) -> TrainingManifest:
    """Write the manifest JSON for one training regime and return it."""
    manifest = TrainingManifest(base_model=base_model, regime=regime)
    atomic_write_text(Path(path), json.dumps(manifest.to_dict(), indent=2) + "\n")
    return manifest
