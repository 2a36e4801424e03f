import { parseArgs } from "node:util";

import { resolveScorer } from "./scorer.js";
import { serveScores } from "./server.js";

const { values } = parseArgs({
  options: {
    "batch-size": { type: "string", default: "8" },
  },
});

const batchSize = Number(values["batch-size"]);
if (!Number.isInteger(batchSize) || batchSize < 1) {
  console.error(`error: --batch-size must be a positive integer, got ${values["batch-size"]}`);
  process.exit(2);
}

try {
  await serveScores(process.stdin, process.stdout, resolveScorer(), { batchSize });
} catch (cause) {
  console.error(`error: ${cause instanceof Error ? cause.message : String(cause)}`);
  process.exit(2);
}
