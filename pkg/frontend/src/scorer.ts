import { execFile } from "node:child_process";

export interface ScoreRequest {
  id: string;
  source: string;
  hypothesis: string;
  reference: string;
}

/** Scores one batch; must return exactly one score per request, in order. */
export type Scorer = (batch: ScoreRequest[]) => Promise<number[]>;

const MAX_ORDER = 4;

function charNgramCounts(text: string, n: number): Map<string, number> {
  const counts = new Map<string, number>();
  for (let i = 0; i + n <= text.length; i++) {
    const gram = text.slice(i, i + n);
    counts.set(gram, (counts.get(gram) ?? 0) + 1);
  }
  return counts;
}

function orderF(hypothesis: string, reference: string, n: number): number | null {
  const hypGrams = charNgramCounts(hypothesis, n);
  const refGrams = charNgramCounts(reference, n);
  let hypTotal = 0;
  for (const count of hypGrams.values()) hypTotal += count;
  let refTotal = 0;
  for (const count of refGrams.values()) refTotal += count;
  if (hypTotal === 0 && refTotal === 0) {
    return null; // both strings shorter than n, order carries no signal
  }
  if (hypTotal === 0 || refTotal === 0) {
    return 0;
  }
  let matched = 0;
  for (const [gram, count] of hypGrams) {
    matched += Math.min(count, refGrams.get(gram) ?? 0);
  }
  if (matched === 0) {
    return 0;
  }
  const precision = matched / hypTotal;
  const recall = matched / refTotal;
  return (2 * precision * recall) / (precision + recall);
}

/**
 * Reference-based stand-in used when no model runner is configured:
 * mean character n-gram F1 over orders 1..4.  Stays in [0, 1], equals 1
 * only on an exact match, and is deterministic, which is what the
 * pipeline tests need from a scorer.
 */
export function lexicalScore(hypothesis: string, reference: string): number {
  if (hypothesis === reference) {
    return 1;
  }
  const perOrder: number[] = [];
  for (let n = 1; n <= MAX_ORDER; n++) {
    const f = orderF(hypothesis, reference, n);
    if (f !== null) {
      perOrder.push(f);
    }
  }
  if (perOrder.length === 0) {
    return 0;
  }
  return perOrder.reduce((sum, f) => sum + f, 0) / perOrder.length;
}

/**
 * Delegate scoring to an external runner command (typically a wrapper
 * around a model checkpoint).  The runner reads request JSONL on stdin
 * and writes `{id, comet}` JSONL on stdout; ids pair responses back to
 * requests, so the runner may emit them in any order.
 */
export function externalScorer(command: string): Scorer {
  const [file, ...args] = command.trim().split(/\s+/);
  if (!file) {
    throw new Error("empty scorer command");
  }
  return (batch) =>
    new Promise((resolve, reject) => {
      const child = execFile(file, args, { maxBuffer: 64 * 1024 * 1024 }, (error, stdout) => {
        if (error) {
          reject(new Error(`scorer command failed: ${error.message}`));
          return;
        }
        const byId = new Map<string, number>();
        for (const line of stdout.split("\n")) {
          const trimmed = line.trim();
          if (!trimmed) {
            continue;
          }
          let record: unknown;
          try {
            record = JSON.parse(trimmed);
          } catch {
            continue;
          }
          if (
            typeof record === "object" &&
            record !== null &&
            typeof (record as { id?: unknown }).id === "string" &&
            typeof (record as { comet?: unknown }).comet === "number"
          ) {
            byId.set((record as { id: string }).id, (record as { comet: number }).comet);
          }
        }
        const scores: number[] = [];
        for (const request of batch) {
          const score = byId.get(request.id);
          if (score === undefined) {
            reject(new Error(`scorer command returned no score for ${JSON.stringify(request.id)}`));
            return;
          }
          scores.push(score);
        }
        resolve(scores);
      });
      child.stdin?.end(batch.map((request) => JSON.stringify(request)).join("\n") + "\n");
    });
}

/** COMET_MODEL names the runner command; without it the lexical stand-in scores. */
export function resolveScorer(env: NodeJS.ProcessEnv = process.env): Scorer {
  const command = env.COMET_MODEL;
  if (command && command.trim()) {
    return externalScorer(command);
  }
  return async (batch) => batch.map((request) => lexicalScore(request.hypothesis, request.reference));
}
