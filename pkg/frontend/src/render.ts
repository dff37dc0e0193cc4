#!/usr/bin/env node
import * as fs from "fs";

import { SchemaError, groupSeries, parseSweepCsv } from "./csv";
import { renderFigure } from "./figure";

const USAGE = "usage: hiersense-plot render <sweep.csv> <out.svg>";

/**
 * CLI body. Returns the process exit code: 0 on success, 1 on a runtime or
 * schema failure (no output file is written in that case), 2 on bad usage.
 */
export function main(argv: string[]): number {
  const args = argv[0] === "render" ? argv.slice(1) : argv;
  if (args.length !== 2) {
    console.error(USAGE);
    return 2;
  }
  const [csvPath, outPath] = args;
  let text: string;
  try {
    text = fs.readFileSync(csvPath, "utf-8");
  } catch (error) {
    console.error(`error: cannot read ${csvPath}: ${(error as Error).message}`);
    return 1;
  }
  let svg: string;
  try {
    const rows = parseSweepCsv(text, (message) => console.warn(`warning: ${message}`));
    svg = renderFigure(groupSeries(rows));
  } catch (error) {
    if (error instanceof SchemaError) {
      console.error(`error: ${csvPath} violates the sweep CSV contract: ${error.message}`);
    } else {
      console.error(`error: ${(error as Error).message}`);
    }
    return 1;
  }
  try {
    fs.writeFileSync(outPath, svg, { encoding: "utf-8" });
  } catch (error) {
    console.error(`error: cannot write ${outPath}: ${(error as Error).message}`);
    return 1;
  }
  return 0;
}

if (require.main === module) {
  process.exit(main(process.argv.slice(2)));
}
