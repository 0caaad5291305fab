/**
 * CSV loading and schema validation for the simulator's output files.
 *
 * Two schemas exist:
 *  - summary.csv:       scenario,sweep_value,realization,final_f_target,
 *                       final_f_self,final_loss,gate_distance,leakage
 *  - series_<tag>.csv:  time,f_self,f_target,f_defect
 *
 * Any deviation is rejected with an error naming the offending column.
 */
import { csvParse } from "d3-dsv";

export const SUMMARY_COLUMNS = [
  "scenario",
  "sweep_value",
  "realization",
  "final_f_target",
  "final_f_self",
  "final_loss",
  "gate_distance",
  "leakage",
] as const;

export const SERIES_COLUMNS = ["time", "f_self", "f_target", "f_defect"] as const;

export class SchemaError extends Error {
  readonly column: string;

  constructor(column: string, message: string) {
    super(message);
    this.name = "SchemaError";
    this.column = column;
  }
}

export interface SummaryRow {
  scenario: string;
  /** null for non-sweep runs (empty field in the CSV) */
  sweep_value: number | null;
  realization: number;
  final_f_target: number;
  final_f_self: number;
  final_loss: number;
  gate_distance: number;
  leakage: number;
}

export interface SeriesRow {
  time: number;
  f_self: number;
  f_target: number;
  f_defect: number;
}

function checkColumns(found: readonly string[], expected: readonly string[]): void {
  for (const col of expected) {
    if (!found.includes(col)) {
      throw new SchemaError(col, `missing column '${col}' (header: ${found.join(",")})`);
    }
  }
  for (const col of found) {
    if (!expected.includes(col)) {
      throw new SchemaError(col, `unexpected column '${col}'`);
    }
  }
}

function toNumber(raw: string | undefined, column: string, row: number): number {
  const value = Number(raw);
  if (raw === undefined || raw.trim() === "" || !Number.isFinite(value)) {
    throw new SchemaError(
      column,
      `column '${column}', data row ${row}: expected a finite number, got '${raw ?? ""}'`,
    );
  }
  return value;
}

export function parseSummary(text: string): SummaryRow[] {
  const parsed = csvParse(text);
  checkColumns(parsed.columns, SUMMARY_COLUMNS);
  return parsed.map((rec, i) => ({
    scenario: rec.scenario ?? "",
    sweep_value:
      (rec.sweep_value ?? "").trim() === ""
        ? null
        : toNumber(rec.sweep_value, "sweep_value", i + 1),
    realization: toNumber(rec.realization, "realization", i + 1),
    final_f_target: toNumber(rec.final_f_target, "final_f_target", i + 1),
    final_f_self: toNumber(rec.final_f_self, "final_f_self", i + 1),
    final_loss: toNumber(rec.final_loss, "final_loss", i + 1),
    gate_distance: toNumber(rec.gate_distance, "gate_distance", i + 1),
    leakage: toNumber(rec.leakage, "leakage", i + 1),
  }));
}

export function parseSeries(text: string): SeriesRow[] {
  const parsed = csvParse(text);
  checkColumns(parsed.columns, SERIES_COLUMNS);
  return parsed.map((rec, i) => ({
    time: toNumber(rec.time, "time", i + 1),
    f_self: toNumber(rec.f_self, "f_self", i + 1),
    f_target: toNumber(rec.f_target, "f_target", i + 1),
    f_defect: toNumber(rec.f_defect, "f_defect", i + 1),
  }));
}
