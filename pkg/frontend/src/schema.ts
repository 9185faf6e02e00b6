/** CSV schemas of the sweep harness and what each figure kind expects. */

import { z } from "zod";

export const RESULT_HEADER = [
  "sweep_kind",
  "sweep_value",
  "algorithm",
  "trial",
  "seed",
  "n_rf",
  "ee",
  "sum_se",
  "tx_power",
  "total_power",
  "feasible",
  "iterations",
] as const;

export const PLANNING_HEADER = [
  "n_tx",
  "k",
  "ee_upper",
  "k_opt_ueno",
  "n_tx_critical",
  "ee_variant",
  "p_bb_w",
] as const;

export const FIGURE_KINDS = [
  "power",
  "antennas",
  "rf_chains",
  "ues",
  "convergence",
  "planning",
] as const;
export type FigureKind = (typeof FIGURE_KINDS)[number];

/** The sweep_kind value each figure kind plots. */
export const KIND_TO_SWEEP: Record<Exclude<FigureKind, "planning">, string> = {
  power: "power",
  antennas: "antennas",
  rf_chains: "rf_chains",
  ues: "ues",
  convergence: "mrfc_convergence",
};

const finite = z.number().or(z.nan());

export const ResultRow = z.object({
  sweep_kind: z.string(),
  sweep_value: z.number(),
  algorithm: z.string(),
  trial: z.number().int(),
  seed: z.number(),
  n_rf: z.number(),
  ee: finite,
  sum_se: finite,
  tx_power: finite,
  total_power: finite,
  feasible: z.boolean(),
  iterations: z.number(),
});
export type ResultRow = z.infer<typeof ResultRow>;

export const PlanningRow = z.object({
  n_tx: z.number().int(),
  k: z.number().int(),
  ee_upper: z.number(),
  k_opt_ueno: z.number().int(),
  n_tx_critical: z.number().int(),
  ee_variant: z.string(),
  p_bb_w: z.number(),
});
export type PlanningRow = z.infer<typeof PlanningRow>;

export class SchemaError extends Error {}

/** Compare a parsed header against the versioned one, naming the first
 * offending column. */
export function checkHeader(actual: string[], expected: readonly string[]): void {
  const n = Math.max(actual.length, expected.length);
  for (let i = 0; i < n; i++) {
    if (actual[i] !== expected[i]) {
      const offender = actual[i] ?? `missing column '${expected[i]}'`;
      throw new SchemaError(
        `CSV header mismatch at column ${i + 1}: expected '${expected[i] ?? "<none>"}', got '${offender}'`,
      );
    }
  }
}
