"""Feedback rendering and prompt construction for post-editing.

Three feedback granularities steer the editor model:

* generic: ask for an improved translation, nothing else;
* score: the generic instruction plus the segment's 0-100 quality score;
* fine-grained: one numbered sentence per annotated error, each naming any
  of {span, type, severity} the caller chose to reveal.

Prompts follow a fixed layout, one part per line: instruction, error lines
(fine-grained only), ``{SrcLang}: {source}``, ``{TgtLang}: {hypothesis}``,
and the cue line ``Improved {TgtLang}:`` the model completes.  Few-shot
exemplars are whole prompt blocks whose cue line ends with the gold
translation; they precede the query, all parts joined by single newlines.
"""
from __future__ import annotations

import math
import random
from dataclasses import dataclass
from enum import Enum
from pathlib import Path
from typing import Sequence

from .corpus import ErrorAnnotation, LangPair, Segment, Severity

ALL_COMPONENTS = frozenset({"span", "type", "severity"})


class FeedbackKind(Enum):
    GENERIC = "generic"
    SCORE = "score"
    FINE_GRAINED = "fine_grained"


@dataclass(frozen=True)
class FeedbackSpec:
    """What feedback a prompt carries: the kind plus its payload.

    ``score`` is required for SCORE; ``annotations`` must hold at least one
    non-Neutral annotation for FINE_GRAINED; ``components`` masks which
    parts of each annotation the error sentences reveal.
    """

    kind: FeedbackKind
    score: float | None = None
    annotations: tuple[ErrorAnnotation, ...] = ()
    components: frozenset[str] = ALL_COMPONENTS

    def __post_init__(self) -> None:
        if not self.components or not self.components <= ALL_COMPONENTS:
            raise ValueError(
                f"components must be a non-empty subset of {sorted(ALL_COMPONENTS)}"
            )
        if self.kind is FeedbackKind.SCORE:
            if self.score is None or not 0 <= self.score <= 100:
                raise ValueError(f"score feedback needs a score in [0, 100], got {self.score}")
        if self.kind is FeedbackKind.FINE_GRAINED:
            if not any(a.severity is not Severity.NEUTRAL for a in self.annotations):
                raise ValueError("fine-grained feedback needs at least one non-Neutral annotation")


def rendered_score(value: float) -> int:
    """Integer score as shown in prompts; halves round away from zero."""
    return int(math.floor(value + 0.5))


def error_sentence(
    annotation: ErrorAnnotation,
    components: frozenset[str] = ALL_COMPONENTS,
    type_style: str = "sub",
) -> str:
    """One English sentence describing an annotated error.

    ``type_style`` selects the type word: ``sub`` uses the subcategory when
    present (falling back to the top-level category), ``path`` uses the full
    lowercased category label (``accuracy/mistranslation``).  Components
    missing from the mask, or absent from the annotation itself, drop out of
    the sentence; with nothing left the sentence is just "There is an error."
    """
    if type_style not in ("sub", "path"):
        raise ValueError(f"unknown type_style: {type_style!r}")
    words = []
    if "severity" in components and annotation.severity is not Severity.NEUTRAL:
        words.append(annotation.severity.value.lower())
    if "type" in components and annotation.category is not None:
        cat = annotation.category
        if type_style == "sub":
            words.append((cat.sub or cat.major).lower())
        else:
            path = cat.raw or (cat.major + (f"/{cat.sub}" if cat.sub else ""))
            words.append(path.lower())
    if words:
        sentence = f"There is a {' '.join(words)} error"
    else:
        sentence = "There is an error"
    if "span" in components and annotation.span:
        sentence += f" at ``{annotation.span}''"
    return sentence + "."


def render_error_sentences(
    annotations: Sequence[ErrorAnnotation],
    components: frozenset[str] = ALL_COMPONENTS,
    type_style: str = "sub",
) -> list[str]:
    """Error sentences for every non-Neutral annotation, in order."""
    return [
        error_sentence(a, components=components, type_style=type_style)
        for a in annotations
        if a.severity is not Severity.NEUTRAL
    ]


def render_feedback(spec: FeedbackSpec, lang: LangPair) -> tuple[str, list[str]]:
    """The instruction line and numbered error lines for a feedback spec."""
    generic = f"Improve the translation from {lang.src} to {lang.tgt} without any explanation."
    if spec.kind is FeedbackKind.GENERIC:
        return generic, []
    if spec.kind is FeedbackKind.SCORE:
        return (
            generic + f" This translation is scored {rendered_score(spec.score)} out of 100.",
            [],
        )
    instruction = (
        f"Improve the translation from {lang.src} to {lang.tgt} "
        "based on the identified errors without any explanation."
    )
    sentences = render_error_sentences(spec.annotations, components=spec.components)
    return instruction, [f"({i}) {s}" for i, s in enumerate(sentences, start=1)]


@dataclass(frozen=True)
class PromptBundle:
    """A prompt split into its template parts, rendered with ``text``."""

    instruction_line: str
    error_lines: tuple[str, ...]
    source_line: str
    hypothesis_line: str
    cue_line: str
    shots: tuple[str, ...] = ()
    rng_seed: int | None = None

    @property
    def text(self) -> str:
        parts = list(self.shots)
        parts.append(self.instruction_line)
        parts.extend(self.error_lines)
        parts.extend([self.source_line, self.hypothesis_line, self.cue_line])
        return "\n".join(parts)


ShotEntry = tuple  # (Segment, FeedbackSpec) or (Segment, FeedbackSpec, gold)


def _query_parts(segment: Segment, spec: FeedbackSpec, lang: LangPair) -> tuple[str, list[str], str, str, str]:
    instruction, error_lines = render_feedback(spec, lang)
    return (
        instruction,
        error_lines,
        f"{lang.src}: {segment.source}",
        f"{lang.tgt}: {segment.hypothesis}",
        f"Improved {lang.tgt}:",
    )


def _render_shot(entry: ShotEntry, lang: LangPair) -> str:
    if len(entry) == 2:
        shot_seg, shot_spec = entry
        gold = None
    else:
        shot_seg, shot_spec, gold = entry
    if gold is None:
        gold = shot_seg.reference
    if gold is None:
        raise ValueError(f"shot {shot_seg.id!r} has no gold translation")
    instruction, error_lines, source_line, hyp_line, cue = _query_parts(shot_seg, shot_spec, lang)
    return "\n".join([instruction, *error_lines, source_line, hyp_line, f"{cue} {gold}"])


def select_shots(pool_size: int, k: int, seed: int) -> list[int]:
    """Seeded uniform selection without replacement: shuffle, take first k."""
    indices = list(range(pool_size))
    random.Random(seed).shuffle(indices)
    return indices[:k]


def build_postedit_prompt(
    segment: Segment,
    spec: FeedbackSpec,
    lang: LangPair,
    shot_pool: Sequence[ShotEntry] = (),
    k: int = 0,
    seed: int = 0,
) -> PromptBundle:
    """Assemble the post-editing prompt for one segment.

    With ``k > 0``, ``k`` exemplars are drawn from ``shot_pool`` without
    replacement using ``seed``; the query segment is excluded from its own
    pool first.  Same inputs and seed always yield the same prompt.

    Raises:
        ValueError: ``k`` exceeds the usable pool size, or a selected shot
            has no gold translation.
    """
    instruction, error_lines, source_line, hyp_line, cue = _query_parts(segment, spec, lang)
    shots: tuple[str, ...] = ()
    rng_seed = None
    if k > 0:
        usable = [entry for entry in shot_pool if entry[0].id != segment.id]
        if k > len(usable):
            raise ValueError(f"requested k={k} exemplars but the pool holds {len(usable)}")
        chosen = select_shots(len(usable), k, seed)
        shots = tuple(_render_shot(usable[i], lang) for i in chosen)
        rng_seed = seed
    return PromptBundle(
        instruction_line=instruction,
        error_lines=tuple(error_lines),
        source_line=source_line,
        hypothesis_line=hyp_line,
        cue_line=cue,
        shots=shots,
        rng_seed=rng_seed,
    )


def build_translate_prompt(segment: Segment, lang: LangPair) -> str:
    """The translate-from-scratch baseline prompt for one segment."""
    return (
        f"Translate from {lang.src} to {lang.tgt} without any explanation.\n"
        f"{lang.src}: {segment.source}\n"
        f"{lang.tgt}:"
    )


TEMPLATE_PLACEHOLDERS = ("{SRC_LANG}", "{TGT_LANG}", "{SOURCE}", "{HYP}", "{ERRORS}", "{SCORE}")


def load_template(path: Path | str) -> str:
    """Read a plain-text prompt template with placeholder markers."""
    text = Path(path).read_text(encoding="utf-8")
    if not any(marker in text for marker in TEMPLATE_PLACEHOLDERS):
        raise ValueError(f"{path}: template contains none of {', '.join(TEMPLATE_PLACEHOLDERS)}")
    return text


def apply_template(
    template: str,
    segment: Segment,
    lang: LangPair,
    spec: FeedbackSpec,
) -> str:
    """Substitute placeholders in a custom prompt template.

    ``{ERRORS}`` expands to the numbered error lines joined by newlines
    (empty for non-fine-grained feedback); ``{SCORE}`` expands to the
    rendered integer score (empty when the spec has none).
    """
    _, error_lines = render_feedback(spec, lang) if spec.kind is FeedbackKind.FINE_GRAINED else ("", [])
    score_text = "" if spec.score is None else str(rendered_score(spec.score))
    out = template
    out = out.replace("{SRC_LANG}", lang.src)
    out = out.replace("{TGT_LANG}", lang.tgt)
    out = out.replace("{SOURCE}", segment.source)
    out = out.replace("{HYP}", segment.hypothesis)
    out = out.replace("{ERRORS}", "\n".join(error_lines))
    out = out.replace("{SCORE}", score_text)
    return out
