#!/usr/bin/env node
/**
 * ntpe-load <file> --summary
 *
 * Prints a one-line JSON summary of an NTPE matrix file. Exit codes
 * follow the writer's convention: 0 ok, 1 unreadable file, 2 usage.
 */
import { KIND_ENCODING, NtpeError, load } from "./ntpe.js";

function usage(): number {
  console.error("usage: ntpe-load <file> --summary");
  return 2;
}

export function summarize(path: string): Record<string, unknown> {
  const m = load(path);
  let finiteMin = Infinity;
  let finiteMax = -Infinity;
  let unreachable = 0;
  for (const v of m.values) {
    if (m.kind === KIND_ENCODING && v === 0xffffffff) {
      unreachable++;
      continue;
    }
    if (v < finiteMin) finiteMin = v;
    if (v > finiteMax) finiteMax = v;
  }
  return {
    rows: m.rows,
    cols: m.cols,
    kind: m.kind === KIND_ENCODING ? "encoding" : "embedding",
    graph_hash: m.meta?.graph_hash ?? null,
    anchors: m.meta?.anchors ?? null,
    created: m.meta?.created ?? null,
    min: finiteMin === Infinity ? null : finiteMin,
    max: finiteMax === -Infinity ? null : finiteMax,
    unreachable_entries: unreachable,
  };
}

export function main(argv: string[]): number {
  const positional = argv.filter((a) => !a.startsWith("--"));
  const flags = argv.filter((a) => a.startsWith("--"));
  if (positional.length !== 1 || flags.some((f) => f !== "--summary")) {
    return usage();
  }
  try {
    console.log(JSON.stringify(summarize(positional[0])));
    return 0;
  } catch (err) {
    if (err instanceof NtpeError) {
      console.error(`error [${err.code}]: ${err.message}`);
    } else {
      console.error(`error: ${(err as Error).message}`);
    }
    return 1;
  }
}

if (import.meta.url === `file://${process.argv[1]}`) {
  process.exit(main(process.argv.slice(2)));
}
