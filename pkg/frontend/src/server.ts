import { readLines, writeJsonLine } from "./io.js";
import type { Scorer, ScoreRequest } from "./scorer.js";

export interface ServeOptions {
  /** Requests scored per model call; responses still come out per line. */
  batchSize?: number;
}

type Pending =
  | { kind: "request"; request: ScoreRequest }
  | { kind: "bad"; id: string | null; message: string };

function stringField(record: Record<string, unknown>, name: string): string | null {
  const value = record[name];
  return typeof value === "string" ? value : null;
}

function parseLine(line: string): Pending {
  let value: unknown;
  try {
    value = JSON.parse(line);
  } catch {
    return { kind: "bad", id: null, message: "invalid JSON" };
  }
  if (typeof value !== "object" || value === null || Array.isArray(value)) {
    return { kind: "bad", id: null, message: "request must be a JSON object" };
  }
  const record = value as Record<string, unknown>;
  const id = stringField(record, "id");
  for (const name of ["id", "source", "hypothesis", "reference"]) {
    if (stringField(record, name) === null) {
      return { kind: "bad", id, message: `missing string field "${name}"` };
    }
  }
  return {
    kind: "request",
    request: {
      id: id as string,
      source: record.source as string,
      hypothesis: record.hypothesis as string,
      reference: record.reference as string,
    },
  };
}

function clamp01(score: number): number {
  if (Number.isNaN(score)) {
    return 0;
  }
  return Math.min(1, Math.max(0, score));
}

/**
 * Score requests from `input` line by line and answer on `output`.
 *
 * One response line per request line, in request order: `{id, comet}` on
 * success, `{id, error}` for lines that cannot be parsed or scored.
 * Scoring happens in batches of `batchSize`, but a bad line never stalls
 * or drops the lines around it.
 */
export async function serveScores(
  input: NodeJS.ReadableStream,
  output: NodeJS.WritableStream,
  scorer: Scorer,
  options: ServeOptions = {}
): Promise<void> {
  const batchSize = options.batchSize ?? 8;
  if (!Number.isInteger(batchSize) || batchSize < 1) {
    throw new Error(`batch size must be a positive integer, got ${batchSize}`);
  }

  let pending: Pending[] = [];
  let requestsPending = 0;

  const flush = async (): Promise<void> => {
    if (pending.length === 0) {
      return;
    }
    const batch = pending
      .filter((item): item is Extract<Pending, { kind: "request" }> => item.kind === "request")
      .map((item) => item.request);
    let scores: number[] | null = null;
    let failure = "";
    if (batch.length > 0) {
      try {
        scores = await scorer(batch);
        if (scores.length !== batch.length) {
          throw new Error(`scorer returned ${scores.length} scores for ${batch.length} requests`);
        }
      } catch (cause) {
        scores = null;
        failure = cause instanceof Error ? cause.message : String(cause);
      }
    }
    let cursor = 0;
    for (const item of pending) {
      if (item.kind === "bad") {
        await writeJsonLine(output, { id: item.id, error: item.message });
      } else if (scores !== null) {
        await writeJsonLine(output, { id: item.request.id, comet: clamp01(scores[cursor++]!) });
      } else {
        await writeJsonLine(output, { id: item.request.id, error: failure });
      }
    }
    pending = [];
    requestsPending = 0;
  };

  for await (const line of readLines(input)) {
    const item = parseLine(line);
    pending.push(item);
    if (item.kind === "request") {
      requestsPending += 1;
    }
    if (requestsPending >= batchSize) {
      await flush();
    }
  }
  await flush();
}
