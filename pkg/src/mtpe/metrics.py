"""Self-contained evaluation metrics: BLEU, TER, paired bootstrap.

Everything here is deterministic and dependency-light so results are
reproducible without an external scorer:

* ``tokenize`` implements the mteval-13a rules (punctuation split off,
  digit-aware period/comma handling), case-sensitive by default;
* ``bleu`` is corpus-level BLEU-4 with exponential smoothing for zero
  n-gram matches, reported in [0, 1];
* ``ter`` counts word edits plus phrase shifts found by a greedy search,
  normalized by reference length;
* ``paired_bootstrap`` estimates the significance of a per-segment score
  delta by resampling segments with replacement.
"""
from __future__ import annotations

import math
import re
from collections import Counter
from dataclasses import dataclass, field
from typing import Sequence

import numpy as np

BLEU_ORDER = 4
MAX_SHIFT_LEN = 10

_13A_RULES = [
    (re.compile(r"([\{-\~\[-\` -\&\(-\+\:-\@\/])"), r" \1 "),
    (re.compile(r"([^0-9])([\.,])"), r"\1 \2 "),
    (re.compile(r"([\.,])([^0-9])"), r" \1 \2"),
    (re.compile(r"([0-9])(-)"), r"\1 \2 "),
]


def tokenize(text: str, lowercase: bool = False) -> list[str]:
    """Split a line into tokens with the mteval-13a rules.

    Periods and commas stay attached to digits (``3.5`` is one token),
    dashes split after digits, all other ASCII punctuation becomes its own
    token.  Case-sensitive unless ``lowercase`` is set.
    """
    norm = text.replace("<skipped>", "")
    norm = norm.replace("-\n", "").replace("\n", " ")
    norm = (
        norm.replace("&quot;", '"')
        .replace("&amp;", "&")
        .replace("&lt;", "<")
        .replace("&gt;", ">")
    )
    if lowercase:
        norm = norm.lower()
    norm = f" {norm} "
    for pattern, repl in _13A_RULES:
        norm = pattern.sub(repl, norm)
    return norm.split()


def _ngram_counts(tokens: Sequence[str], max_order: int) -> Counter:
    counts: Counter = Counter()
    for order in range(1, max_order + 1):
        for i in range(len(tokens) - order + 1):
            counts[tuple(tokens[i:i + order])] += 1
    return counts


def bleu(pairs: Sequence[tuple[Sequence[str], Sequence[str]]]) -> float:
    """Corpus-level BLEU-4 over (hypothesis tokens, reference tokens) pairs.

    Clipped n-gram counts are pooled over the corpus.  Orders with zero
    matches use exponential smoothing: a running factor s starts at 1 and
    doubles at each such order, the precision becoming 1/(s * total).  The
    brevity penalty is exp(1 - ref_len/sys_len) for short output, 1
    otherwise.  Returns a value in [0, 1].

    Raises:
        ValueError: empty corpus.
    """
    if not pairs:
        raise ValueError("bleu needs at least one segment pair")
    correct = [0] * BLEU_ORDER
    total = [0] * BLEU_ORDER
    sys_len = 0
    ref_len = 0
    for hyp, ref in pairs:
        sys_len += len(hyp)
        ref_len += len(ref)
        hyp_counts = _ngram_counts(hyp, BLEU_ORDER)
        ref_counts = _ngram_counts(ref, BLEU_ORDER)
        for ngram, count in hyp_counts.items():
            order = len(ngram)
            total[order - 1] += count
            correct[order - 1] += min(count, ref_counts.get(ngram, 0))
    if sys_len == 0:
        return 0.0
    precisions = [0.0] * BLEU_ORDER
    smooth = 1.0
    for n in range(BLEU_ORDER):
        if total[n] == 0:
            break
        if correct[n] == 0:
            smooth *= 2.0
            precisions[n] = 1.0 / (smooth * total[n])
        else:
            precisions[n] = correct[n] / total[n]
    log_sum = 0.0
    for p in precisions:
        if p <= 0.0:
            return 0.0
        log_sum += math.log(p)
    bp = 1.0 if sys_len >= ref_len else math.exp(1.0 - ref_len / sys_len)
    return bp * math.exp(log_sum / BLEU_ORDER)


def bleu_segments(pairs: Sequence[tuple[Sequence[str], Sequence[str]]]) -> list[float]:
    """Sentence-level BLEU (same smoothing) for each pair, for resampling."""
    return [bleu([pair]) for pair in pairs]


def edit_distance(a: Sequence[str], b: Sequence[str]) -> int:
    """Word-level Levenshtein distance with unit costs."""
    if a == b:
        return 0
    if not a:
        return len(b)
    if not b:
        return len(a)
    previous = list(range(len(b) + 1))
    for i, tok_a in enumerate(a, start=1):
        current = [i] + [0] * len(b)
        for j, tok_b in enumerate(b, start=1):
            cost = 0 if tok_a == tok_b else 1
            current[j] = min(
                previous[j] + 1,
                current[j - 1] + 1,
                previous[j - 1] + cost,
            )
        previous = current
    return previous[-1]


def _best_shift(current: list[str], ref: list[str], base: int):
    """The single phrase shift that most reduces edit distance, if any.

    A candidate phrase must occur verbatim in the reference and not already
    sit in a matching position.  Ties break on (new distance, distance
    moved, earliest start).  Returns (new_distance, shifted sequence) or
    None when no shift strictly improves the distance.
    """
    max_len = min(MAX_SHIFT_LEN, len(current))
    ref_positions: dict[tuple[str, ...], list[int]] = {}
    for length in range(1, min(max_len, len(ref)) + 1):
        for j in range(len(ref) - length + 1):
            ref_positions.setdefault(tuple(ref[j:j + length]), []).append(j)
    best_key = None
    best_seq = None
    for i in range(len(current)):
        for length in range(1, min(max_len, len(current) - i) + 1):
            phrase = tuple(current[i:i + length])
            positions = ref_positions.get(phrase)
            if not positions:
                continue
            if current[i:i + length] == ref[i:i + length]:
                continue
            removed = current[:i] + current[i + length:]
            for j in positions:
                insert_at = min(j, len(removed))
                candidate = removed[:insert_at] + list(phrase) + removed[insert_at:]
                if candidate == current:
                    continue
                distance = edit_distance(candidate, ref)
                if distance >= base:
                    continue
                key = (distance, abs(insert_at - i), i)
                if best_key is None or key < best_key:
                    best_key = key
                    best_seq = candidate
    if best_key is None:
        return None
    return best_key[0], best_seq


def ter_edits(hyp: Sequence[str], ref: Sequence[str]) -> int:
    """Edit count for one segment: greedy phrase shifts plus edit distance.

    Shifts are applied one at a time, each costing one edit, always taking
    the shift that most reduces the remaining word edit distance; the
    residual distance is then added.
    """
    current = list(hyp)
    ref = list(ref)
    distance = edit_distance(current, ref)
    shifts = 0
    while distance > 0:
        found = _best_shift(current, ref, distance)
        if found is None:
            break
        distance, current = found
        shifts += 1
    return shifts + distance


def ter(pairs: Sequence[tuple[Sequence[str], Sequence[str]]]) -> float:
    """Corpus TER: total edits over total reference words.

    An empty reference counts as one word so the ratio stays defined.

    Raises:
        ValueError: empty corpus.
    """
    if not pairs:
        raise ValueError("ter needs at least one segment pair")
    total_edits = 0
    total_ref = 0
    for hyp, ref in pairs:
        total_edits += ter_edits(hyp, ref)
        total_ref += max(len(ref), 1)
    return total_edits / total_ref


def ter_segments(pairs: Sequence[tuple[Sequence[str], Sequence[str]]]) -> list[float]:
    """Per-segment TER values, for resampling."""
    return [ter_edits(hyp, ref) / max(len(ref), 1) for hyp, ref in pairs]


@dataclass(frozen=True)
class SignificanceResult:
    """Outcome of a paired bootstrap comparison of two systems."""

    metric: str
    delta: float
    p_value: float
    resamples: int
    seed: int


def paired_bootstrap(
    scores_a: Sequence[float],
    scores_b: Sequence[float],
    resamples: int = 1000,
    seed: int = 0,
    metric: str = "score",
) -> SignificanceResult:
    """Paired bootstrap significance of mean(scores_a) - mean(scores_b).

    Segment indices are resampled with replacement; the p-value is twice
    the fraction of resamples whose delta does not keep the sign of the
    full-data delta, clamped to [0, 1].  A zero full-data delta yields
    p = 1.0 immediately.  Same seed, same result.

    Raises:
        ValueError: empty or unequal-length score lists, or resamples < 1.
    """
    if len(scores_a) != len(scores_b):
        raise ValueError(
            f"paired scores must align: {len(scores_a)} vs {len(scores_b)} segments"
        )
    if not scores_a:
        raise ValueError("paired_bootstrap needs at least one segment")
    if resamples < 1:
        raise ValueError("resamples must be positive")
    a = np.asarray(scores_a, dtype=float)
    b = np.asarray(scores_b, dtype=float)
    delta = float(a.mean() - b.mean())
    if delta == 0.0:
        return SignificanceResult(metric, delta, 1.0, resamples, seed)
    rng = np.random.default_rng(seed)
    n = len(a)
    full_sign = np.sign(delta)
    flips = 0
    chunk = max(1, min(resamples, 2_000_000 // max(n, 1)))
    done = 0
    while done < resamples:
        rows = min(chunk, resamples - done)
        idx = rng.integers(0, n, size=(rows, n))
        deltas = a[idx].mean(axis=1) - b[idx].mean(axis=1)
        flips += int(np.count_nonzero(np.sign(deltas) != full_sign))
        done += rows
    p_value = min(1.0, 2.0 * flips / resamples)
    return SignificanceResult(metric, delta, p_value, resamples, seed)


@dataclass
class MetricReport:
    """Corpus metric values plus the per-segment scores behind them."""

    bleu: float
    ter: float
    segments: int
    bleu_by_segment: list[float] = field(default_factory=list)
    ter_by_segment: list[float] = field(default_factory=list)
    comet: float | None = None
    tokenizer: str = "13a"
    lowercase: bool = False

    def to_dict(self, ndigits: int = 4) -> dict:
        out = {
            "bleu": round(self.bleu, ndigits),
            "ter": round(self.ter, ndigits),
            "segments": self.segments,
            "tokenizer": self.tokenizer,
            "lowercase": self.lowercase,
        }
        if self.comet is not None:
            out["comet"] = round(self.comet, ndigits)
        return out


def evaluate_pairs(
    hypotheses: Sequence[str],
    references: Sequence[str],
    lowercase: bool = False,
) -> MetricReport:
    """Tokenize and score aligned hypothesis/reference text lists."""
    if len(hypotheses) != len(references):
        raise ValueError(
            f"hypotheses and references must align: {len(hypotheses)} vs {len(references)}"
        )
    pairs = [
        (tokenize(hyp, lowercase=lowercase), tokenize(ref, lowercase=lowercase))
        for hyp, ref in zip(hypotheses, references)
    ]
    return MetricReport(
        bleu=bleu(pairs),
        ter=ter(pairs),
        segments=len(pairs),
        bleu_by_segment=bleu_segments(pairs),
        ter_by_segment=ter_segments(pairs),
        lowercase=lowercase,
    )
