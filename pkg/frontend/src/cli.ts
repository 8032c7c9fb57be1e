#!/usr/bin/env node
/** Command line wrapper: matrix JSON + id map in, one HTML file out. */

import { readFileSync, realpathSync, writeFileSync, mkdirSync } from "node:fs";
import { join } from "node:path";
import { parseArgs } from "node:util";
import { fileURLToPath } from "node:url";

import { buildGraphDocument } from "./builder.js";
import { renderPage } from "./render.js";
import { GRAPH_KINDS, GraphKind, SchemaError } from "./schema.js";

const USAGE = `usage: sociogit-viewer --matrix FILE --ids FILE --kind KIND [--min-weight X] [--out DIR]

  --matrix FILE   FileDependencyMatrix.json or CoordinationNeeds.json
  --ids FILE      the matching idToFile.json or idToUser.json
  --kind KIND     file-dependency | coordination-needs
  --min-weight X  drop edges below X (defaults: 1 / 0.1 by kind)
  --out DIR       output directory (default .), writes KIND.html
`;

function loadJson(path: string): unknown {
  let text: string;
  try {
    text = readFileSync(path, "utf8");
  } catch (err) {
    throw new Error(`cannot read ${path}: ${(err as Error).message}`);
  }
  try {
    return JSON.parse(text);
  } catch {
    throw new SchemaError(`${path} is not valid JSON`);
  }
}

export function main(argv: string[]): number {
  let parsed;
  try {
    parsed = parseArgs({
      args: argv,
      options: {
        matrix: { type: "string" },
        ids: { type: "string" },
        kind: { type: "string" },
        "min-weight": { type: "string" },
        out: { type: "string", default: "." },
        help: { type: "boolean" },
      },
    });
  } catch (err) {
    process.stderr.write(`error: ${(err as Error).message}\n${USAGE}`);
    return 2;
  }
  const opts = parsed.values;
  if (opts.help) {
    process.stdout.write(USAGE);
    return 0;
  }
  if (!opts.matrix || !opts.ids || !opts.kind) {
    process.stderr.write(`error: --matrix, --ids and --kind are required\n${USAGE}`);
    return 2;
  }
  if (!GRAPH_KINDS.includes(opts.kind as GraphKind)) {
    process.stderr.write(`error: unknown kind ${opts.kind}\n${USAGE}`);
    return 2;
  }
  let minWeight: number | undefined;
  if (opts["min-weight"] !== undefined) {
    minWeight = Number(opts["min-weight"]);
    if (!Number.isFinite(minWeight) || minWeight < 0) {
      process.stderr.write(`error: --min-weight must be a non-negative number\n`);
      return 2;
    }
  }

  try {
    const doc = buildGraphDocument(
      loadJson(opts.matrix),
      loadJson(opts.ids),
      opts.kind as GraphKind,
      minWeight,
    );
    const page = renderPage(doc);
    mkdirSync(opts.out, { recursive: true });
    const target = join(opts.out, `${doc.kind}.html`);
    writeFileSync(target, page);
    process.stdout.write(
      `wrote ${target} (${doc.nodes.length} nodes, ${doc.edges.length} edges)\n`,
    );
    return 0;
  } catch (err) {
    process.stderr.write(`error: ${(err as Error).message}\n`);
    return 1;
  }
}

function invokedDirectly(): boolean {
  if (!process.argv[1]) {
    return false;
  }
  try {
    return fileURLToPath(import.meta.url) === realpathSync(process.argv[1]);
  } catch {
    return false;
  }
}

if (invokedDirectly()) {
  process.exit(main(process.argv.slice(2)));
}
