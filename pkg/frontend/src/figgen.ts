#!/usr/bin/env node
/** figgen: render a sweep CSV into a line-chart PNG.
 *
 *   figgen --csv results.csv --kind power --out figure.png
 *
 * Exit codes: 0 success, 1 input/schema error, 2 unexpected failure.
 */

import * as fs from "node:fs";
import yargs from "yargs";

import { buildFigure } from "./aggregate";
import { renderFigure } from "./chart";
import { FIGURE_KINDS, FigureKind, SchemaError } from "./schema";

export function run(argv: string[]): number {
  const args = yargs(argv)
    .option("csv", { type: "string", demandOption: true, describe: "input CSV path" })
    .option("kind", {
      choices: FIGURE_KINDS,
      demandOption: true,
      describe: "figure kind (matches the sweep kind)",
    })
    .option("out", { type: "string", demandOption: true, describe: "output PNG path" })
    .option("width", { type: "number", default: 960 })
    .option("height", { type: "number", default: 600 })
    .strict()
    .exitProcess(false)
    .fail((msg) => {
      throw new SchemaError(msg);
    })
    .parseSync();

  const data = buildFigure(args.csv, args.kind as FigureKind);
  const png = renderFigure(data, { width: args.width, height: args.height });
  fs.writeFileSync(args.out, png);
  const points = data.series.reduce((n, s) => n + s.points.length, 0);
  console.log(`wrote ${args.out}: ${data.series.length} series, ${points} points`);
  return 0;
}

export function main(argv: string[]): number {
  try {
    return run(argv);
  } catch (err) {
    if (err instanceof SchemaError || (err as NodeJS.ErrnoException)?.code === "ENOENT") {
      console.error(`error: ${(err as Error).message}`);
      return 1;
    }
    console.error(`runtime failure: ${(err as Error).message}`);
    return 2;
  }
}

if (require.main === module) {
  process.exit(main(process.argv.slice(2)));
}
