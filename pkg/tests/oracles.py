"""Independent reference implementations used to cross-check the package.

Everything in here is written from the metric definitions directly, with
different data structures and control flow than the library code, so the
two sides can disagree when either has a bug.
"""
from __future__ import annotations

import math
import random

_SEP = "␟"  # symbol for unit separator, never appears in test tokens


def bleu_clipped(pairs) -> float:
    """Corpus BLEU-4 with clipped counts and exponential smoothing.

    Written against the definition: pooled modified n-gram precision per
    order, smoothing 1/(2^k * total) for the k-th zero-match order, brevity
    penalty exp(1 - r/c) when the output is shorter than the reference.
    """
    match = [0, 0, 0, 0]
    total = [0, 0, 0, 0]
    hyp_len = 0
    ref_len = 0
    for hyp, ref in pairs:
        hyp = list(hyp)
        ref = list(ref)
        hyp_len += len(hyp)
        ref_len += len(ref)
        for n in range(1, 5):
            hyp_grams: dict[str, int] = {}
            for i in range(len(hyp) - n + 1):
                key = _SEP.join(hyp[i:i + n])
                hyp_grams[key] = hyp_grams.get(key, 0) + 1
            ref_grams: dict[str, int] = {}
            for i in range(len(ref) - n + 1):
                key = _SEP.join(ref[i:i + n])
                ref_grams[key] = ref_grams.get(key, 0) + 1
            total[n - 1] += max(len(hyp) - n + 1, 0)
            for key, count in hyp_grams.items():
                match[n - 1] += min(count, ref_grams.get(key, 0))
    if hyp_len == 0:
        return 0.0
    smooth = 1.0
    log_sum = 0.0
    for n in range(4):
        if total[n] == 0:
            return 0.0
        if match[n] == 0:
            smooth *= 2.0
            precision = 1.0 / (smooth * total[n])
        else:
            precision = match[n] / total[n]
        log_sum += math.log(precision)
    brevity = 1.0 if hyp_len >= ref_len else math.exp(1.0 - ref_len / hyp_len)
    return brevity * math.exp(log_sum / 4.0)


def levenshtein(a, b) -> int:
    """Unit-cost edit distance, full matrix."""
    rows = len(a) + 1
    cols = len(b) + 1
    grid = [[0] * cols for _ in range(rows)]
    for i in range(rows):
        grid[i][0] = i
    for j in range(cols):
        grid[0][j] = j
    for i in range(1, rows):
        for j in range(1, cols):
            same = a[i - 1] == b[j - 1]
            grid[i][j] = min(
                grid[i - 1][j] + 1,
                grid[i][j - 1] + 1,
                grid[i - 1][j - 1] + (0 if same else 1),
            )
    return grid[-1][-1]


def ter_exhaustive(hyp, ref, max_phrase: int = 10) -> int:
    """Minimum edit count over ALL sequences of phrase shifts.

    A shift moves any contiguous phrase (up to ``max_phrase`` tokens) that
    occurs verbatim in the reference to any other position, at a cost of
    one edit; the remaining word edit distance is then added.  Uniform-cost
    search over reachable hypothesis states with lazy re-expansion, so the
    result is the true minimum for this move set.  Feasible only for short
    sequences.
    """
    ref = tuple(ref)
    start = tuple(hyp)
    ref_phrases = set()
    for n in range(1, min(max_phrase, len(ref)) + 1):
        for i in range(len(ref) - n + 1):
            ref_phrases.add(ref[i:i + n])
    dist_cache: dict[tuple, int] = {}

    def distance(state: tuple) -> int:
        if state not in dist_cache:
            dist_cache[state] = levenshtein(state, ref)
        return dist_cache[state]

    best = distance(start)
    cheapest = {start: 0}
    frontier = [(start, 0)]
    while frontier:
        state, shifts = frontier.pop()
        if shifts != cheapest.get(state):
            continue  # superseded by a cheaper path to the same state
        remaining = distance(state)
        if shifts + remaining < best:
            best = shifts + remaining
        if remaining == 0 or shifts + 1 >= best:
            continue
        size = len(state)
        for i in range(size):
            for length in range(1, min(max_phrase, size - i) + 1):
                phrase = state[i:i + length]
                if phrase not in ref_phrases:
                    continue
                removed = state[:i] + state[i + length:]
                for j in range(len(removed) + 1):
                    candidate = removed[:j] + phrase + removed[j:]
                    if candidate == state:
                        continue
                    cost = shifts + 1
                    known = cheapest.get(candidate)
                    if known is not None and known <= cost:
                        continue
                    cheapest[candidate] = cost
                    frontier.append((candidate, cost))
    return best


def bootstrap_p(scores_a, scores_b, resamples: int, seed: int) -> float:
    """Paired bootstrap p-value, plain Python resampling loop.

    Counts resamples whose delta loses the sign of the full-data delta
    (zero counts as lost) and doubles the fraction, clamped to 1.
    """
    n = len(scores_a)
    full = sum(scores_a) / n - sum(scores_b) / n
    if full == 0:
        return 1.0
    rng = random.Random(seed)
    lost = 0
    for _ in range(resamples):
        sum_a = 0.0
        sum_b = 0.0
        for _ in range(n):
            i = rng.randrange(n)
            sum_a += scores_a[i]
            sum_b += scores_b[i]
        delta = sum_a - sum_b
        if full > 0:
            lost += delta <= 0
        else:
            lost += delta >= 0
    return min(1.0, 2.0 * lost / resamples)


def rebuild_prompt(segment, spec, lang, shot_pool, k: int, seed: int) -> str:
    """Reassemble a few-shot prompt from the documented layout alone.

    Shots come from shuffling the pool indices with ``random.Random(seed)``
    (query segment removed first) and taking the first ``k``; each shot is a
    full block whose cue line carries the gold translation, all parts joined
    by single newlines.
    """
    def block(seg, seg_spec, gold):
        generic = f"Improve the translation from {lang.src} to {lang.tgt} without any explanation."
        lines = []
        kind = seg_spec.kind.value
        if kind == "generic":
            lines.append(generic)
        elif kind == "score":
            shown = int(math.floor(seg_spec.score + 0.5))
            lines.append(generic + f" This translation is scored {shown} out of 100.")
        else:
            lines.append(
                f"Improve the translation from {lang.src} to {lang.tgt} "
                "based on the identified errors without any explanation."
            )
            number = 0
            for ann in seg_spec.annotations:
                if ann.severity.value == "Neutral":
                    continue
                number += 1
                words = []
                if "severity" in seg_spec.components:
                    words.append(ann.severity.value.lower())
                if "type" in seg_spec.components and ann.category is not None:
                    words.append((ann.category.sub or ann.category.major).lower())
                sentence = f"There is a {' '.join(words)} error" if words else "There is an error"
                if "span" in seg_spec.components and ann.span:
                    sentence += f" at ``{ann.span}''"
                lines.append(f"({number}) {sentence}.")
        lines.append(f"{lang.src}: {seg.source}")
        lines.append(f"{lang.tgt}: {seg.hypothesis}")
        cue = f"Improved {lang.tgt}:"
        lines.append(f"{cue} {gold}" if gold is not None else cue)
        return "\n".join(lines)

    usable = [entry for entry in shot_pool if entry[0].id != segment.id]
    order = list(range(len(usable)))
    random.Random(seed).shuffle(order)
    parts = []
    for index in order[:k]:
        entry = usable[index]
        gold = entry[2] if len(entry) > 2 and entry[2] is not None else entry[0].reference
        parts.append(block(entry[0], entry[1], gold))
    parts.append(block(segment, spec, None))
    return "\n".join(parts)
