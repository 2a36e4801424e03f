import { once } from "node:events";
import readline from "node:readline";

/** Non-empty trimmed lines from a stream, CRLF tolerated. */
export async function* readLines(stream: NodeJS.ReadableStream): AsyncIterable<string> {
  const rl = readline.createInterface({
    input: stream,
    crlfDelay: Number.POSITIVE_INFINITY,
  });
  for await (const line of rl) {
    const trimmed = String(line).trim();
    if (!trimmed) {
      continue;
    }
    yield trimmed;
  }
}

/** Write one JSON value as a line, waiting out backpressure. */
export async function writeJsonLine(
  stream: NodeJS.WritableStream,
  payload: unknown
): Promise<void> {
  if (!stream.write(`${JSON.stringify(payload)}\n`)) {
    await once(stream, "drain");
  }
}
