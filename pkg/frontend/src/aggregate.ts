/** CSV loading and group-mean aggregation for the figure kinds. */

import * as fs from "node:fs";
import Papa from "papaparse";

import {
  checkHeader,
  FigureKind,
  KIND_TO_SWEEP,
  PLANNING_HEADER,
  PlanningRow,
  RESULT_HEADER,
  ResultRow,
  SchemaError,
} from "./schema";

export interface Series {
  label: string;
  /** [x, mean y] pairs sorted by x */
  points: Array<[number, number]>;
  /** rows averaged per point (finite values only) */
  counts: number[];
}

export interface FigureData {
  series: Series[];
  xLabel: string;
  yLabel: string;
  /** total trials represented per (series, x) cell before dropping NaNs */
  trialAnnotation: string;
}

function parseCsv(path: string): { header: string[]; records: string[][] } {
  const text = fs.readFileSync(path, "utf-8");
  const parsed = Papa.parse<string[]>(text.trim(), { skipEmptyLines: true });
  if (parsed.errors.length > 0) {
    throw new SchemaError(`CSV parse error: ${parsed.errors[0].message}`);
  }
  const rows = parsed.data;
  if (rows.length === 0) {
    throw new SchemaError("empty CSV: no header row");
  }
  return { header: rows[0], records: rows.slice(1) };
}

function toResultRow(fields: string[]): ResultRow {
  return ResultRow.parse({
    sweep_kind: fields[0],
    sweep_value: Number(fields[1]),
    algorithm: fields[2],
    trial: Number(fields[3]),
    seed: Number(fields[4]),
    n_rf: Number(fields[5]),
    ee: Number(fields[6]),
    sum_se: Number(fields[7]),
    tx_power: Number(fields[8]),
    total_power: Number(fields[9]),
    feasible: fields[10] === "true",
    iterations: Number(fields[11]),
  });
}

function toPlanningRow(fields: string[]): PlanningRow {
  return PlanningRow.parse({
    n_tx: Number(fields[0]),
    k: Number(fields[1]),
    ee_upper: Number(fields[2]),
    k_opt_ueno: Number(fields[3]),
    n_tx_critical: Number(fields[4]),
    ee_variant: fields[5],
    p_bb_w: Number(fields[6]),
  });
}

export function loadResultRows(path: string, kind: FigureKind): ResultRow[] {
  const { header, records } = parseCsv(path);
  checkHeader(header, RESULT_HEADER);
  if (records.length === 0) {
    throw new SchemaError("no data rows");
  }
  const rows = records.map(toResultRow);
  const want = KIND_TO_SWEEP[kind as Exclude<FigureKind, "planning">];
  const bad = rows.find((r) => r.sweep_kind !== want);
  if (bad) {
    throw new SchemaError(
      `sweep_kind mismatch: figure kind '${kind}' plots '${want}' rows, found '${bad.sweep_kind}'`,
    );
  }
  return rows;
}

export function loadPlanningRows(path: string): PlanningRow[] {
  const { header, records } = parseCsv(path);
  checkHeader(header, PLANNING_HEADER);
  if (records.length === 0) {
    throw new SchemaError("no data rows");
  }
  return records.map(toPlanningRow);
}

/** Mean EE per (algorithm, sweep value); NaN rows (failed cells) are dropped. */
export function aggregateResults(rows: ResultRow[]): Series[] {
  const groups = new Map<string, Map<number, number[]>>();
  for (const r of rows) {
    if (!groups.has(r.algorithm)) groups.set(r.algorithm, new Map());
    const byX = groups.get(r.algorithm)!;
    if (!byX.has(r.sweep_value)) byX.set(r.sweep_value, []);
    if (Number.isFinite(r.ee)) byX.get(r.sweep_value)!.push(r.ee);
  }
  const labels = [...groups.keys()].sort();
  return labels.map((label) => {
    const byX = groups.get(label)!;
    const xs = [...byX.keys()].sort((a, b) => a - b);
    const points: Array<[number, number]> = [];
    const counts: number[] = [];
    for (const x of xs) {
      const vals = byX.get(x)!;
      const mean = vals.reduce((s, v) => s + v, 0) / vals.length;
      points.push([x, mean]);
      counts.push(vals.length);
    }
    return { label, points, counts };
  });
}

/** One series per antenna count: the closed-form EE bound over the UE count. */
export function aggregatePlanning(rows: PlanningRow[]): Series[] {
  const groups = new Map<number, Array<[number, number]>>();
  for (const r of rows) {
    if (!groups.has(r.n_tx)) groups.set(r.n_tx, []);
    groups.get(r.n_tx)!.push([r.k, r.ee_upper]);
  }
  return [...groups.keys()]
    .sort((a, b) => a - b)
    .map((nTx) => {
      const points = groups.get(nTx)!.sort((a, b) => a[0] - b[0]);
      return {
        label: `NTX=${nTx}`,
        points,
        counts: points.map(() => 1),
      };
    });
}

const X_LABELS: Record<FigureKind, string> = {
  power: "TRANSMIT POWER (W)",
  antennas: "TRANSMIT ANTENNAS",
  rf_chains: "RF CHAINS",
  ues: "ACTIVE UES",
  convergence: "ACTIVE UES",
  planning: "ACTIVE UES",
};

export function buildFigure(path: string, kind: FigureKind): FigureData {
  if (kind === "planning") {
    const series = aggregatePlanning(loadPlanningRows(path));
    return {
      series,
      xLabel: X_LABELS[kind],
      yLabel: "EE BOUND (BITS/S/HZ/W)",
      trialAnnotation: "CLOSED FORM",
    };
  }
  const rows = loadResultRows(path, kind);
  const series = aggregateResults(rows);
  const trials = Math.max(...series.flatMap((s) => s.counts), 0);
  return {
    series,
    xLabel: X_LABELS[kind],
    yLabel: "ENERGY EFFICIENCY (BITS/J)",
    trialAnnotation: `MEAN OF ${trials} TRIALS`,
  };
}
