#!/usr/bin/env node
/**
 * mzm-render: turn simulator CSV outputs into SVG figures.
 *
 *   mzm-render render --kind K --in FILE [FILE ...] --out PATH
 *                     [--logx] [--errorbars]
 *
 * Kinds: timeseries (series_<tag>.csv), sweep (summary.csv),
 * sweep_compare (summary.csv with >= 2 scenario labels).
 *
 * Inputs are opened read-only; nothing is written on error.
 * Exit codes: 0 success, 2 usage/schema/data error.
 */
import { readFileSync, writeFileSync } from "node:fs";
import { SchemaError, parseSeries, parseSummary } from "./csv.js";
import { renderSweep, renderTimeseries } from "./render.js";

export const KINDS = ["timeseries", "sweep", "sweep_compare"] as const;
export type Kind = (typeof KINDS)[number];

export interface RenderArgs {
  kind: Kind;
  inputs: string[];
  out: string;
  logx: boolean;
  errorbars: boolean;
}

export class UsageError extends Error {}

export function parseArgs(argv: string[]): RenderArgs {
  if (argv[0] !== "render") {
    throw new UsageError("expected subcommand 'render'");
  }
  const args: Partial<RenderArgs> = { inputs: [], logx: false, errorbars: false };
  let i = 1;
  while (i < argv.length) {
    const flag = argv[i];
    switch (flag) {
      case "--kind": {
        const kind = argv[++i];
        if (!KINDS.includes(kind as Kind)) {
          throw new UsageError(
            `--kind must be one of ${KINDS.join("|")}, got '${kind ?? ""}'`,
          );
        }
        args.kind = kind as Kind;
        break;
      }
      case "--in": {
        while (i + 1 < argv.length && !argv[i + 1].startsWith("--")) {
          args.inputs!.push(argv[++i]);
        }
        if (args.inputs!.length === 0) throw new UsageError("--in needs a file");
        break;
      }
      case "--out":
        args.out = argv[++i];
        break;
      case "--logx":
        args.logx = true;
        break;
      case "--errorbars":
        args.errorbars = true;
        break;
      default:
        throw new UsageError(`unknown argument '${flag}'`);
    }
    i += 1;
  }
  if (!args.kind) throw new UsageError("--kind is required");
  if (!args.inputs || args.inputs.length === 0) throw new UsageError("--in is required");
  if (!args.out) throw new UsageError("--out is required");
  return args as RenderArgs;
}

export function renderToString(args: RenderArgs): string {
  const texts = args.inputs.map((path) => readFileSync(path, "utf8"));
  if (args.kind === "timeseries") {
    if (texts.length !== 1) {
      throw new UsageError("timeseries takes exactly one series CSV");
    }
    return renderTimeseries(parseSeries(texts[0]));
  }
  const rows = texts.flatMap((text) => parseSummary(text));
  return renderSweep(
    rows,
    { logx: args.logx, errorbars: args.errorbars },
    args.kind === "sweep_compare",
  );
}

export function main(argv: string[]): number {
  try {
    const args = parseArgs(argv);
    const svg = renderToString(args);
    writeFileSync(args.out, svg, "utf8");
    console.log(args.out);
    return 0;
  } catch (err) {
    if (err instanceof SchemaError) {
      console.error(`schema error in column '${err.column}': ${err.message}`);
    } else if (err instanceof Error) {
      console.error(`error: ${err.message}`);
    } else {
      console.error(`error: ${String(err)}`);
    }
    return 2;
  }
}

// run only when invoked as a script, not when imported by tests
if (process.argv[1] && /cli\.[cm]?js$/.test(process.argv[1])) {
  process.exit(main(process.argv.slice(2)));
}
