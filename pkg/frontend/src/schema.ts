/**
 * Run-record CSV schema shared with the benchmark harness: the header must
 * carry exactly these columns in this order.
 */

export const CSV_COLUMNS = [
  "experiment_id",
  "run_id",
  "framework",
  "learner",
  "target",
  "noise_kind",
  "noise_level",
  "min_repeats",
  "max_repeats",
  "seed",
  "success",
  "symbols",
  "tests",
  "resets",
  "eq_symbols",
  "eq_fraction",
  "restarts",
  "conflicts",
  "distinct_hypotheses",
  "wall_clock_ms",
] as const;

export interface RunRecord {
  experiment_id: string;
  run_id: number;
  framework: string;
  learner: string;
  target: string;
  noise_kind: string;
  noise_level: number;
  min_repeats: number;
  max_repeats: number;
  seed: number;
  success: boolean;
  symbols: number;
  tests: number;
  resets: number;
  eq_symbols: number;
  eq_fraction: number;
  restarts: number;
  conflicts: number;
  distinct_hypotheses: number;
  wall_clock_ms: number;
}

export class SchemaError extends Error {}

const INT_COLUMNS = new Set([
  "run_id", "min_repeats", "max_repeats", "seed", "symbols", "tests",
  "resets", "eq_symbols", "restarts", "conflicts", "distinct_hypotheses",
]);
const FLOAT_COLUMNS = new Set(["noise_level", "eq_fraction", "wall_clock_ms"]);

export function validateHeader(header: string[]): void {
  for (let i = 0; i < Math.max(header.length, CSV_COLUMNS.length); i++) {
    const expected = CSV_COLUMNS[i];
    const got = header[i];
    if (expected === undefined) {
      throw new SchemaError(`unexpected extra column "${got}"`);
    }
    if (got === undefined) {
      throw new SchemaError(`missing column "${expected}"`);
    }
    if (got !== expected) {
      throw new SchemaError(`column ${i + 1} is "${got}", expected "${expected}"`);
    }
  }
}

export function parseRecord(fields: string[], line: number): RunRecord {
  if (fields.length !== CSV_COLUMNS.length) {
    throw new SchemaError(
      `row ${line}: ${fields.length} fields, expected ${CSV_COLUMNS.length}`,
    );
  }
  const record: Record<string, unknown> = {};
  CSV_COLUMNS.forEach((column, i) => {
    const raw = fields[i];
    if (column === "success") {
      if (raw !== "True" && raw !== "False") {
        throw new SchemaError(`row ${line}: bad boolean in column "success": "${raw}"`);
      }
      record[column] = raw === "True";
    } else if (INT_COLUMNS.has(column)) {
      const value = Number(raw);
      if (!Number.isInteger(value)) {
        throw new SchemaError(`row ${line}: bad integer in column "${column}": "${raw}"`);
      }
      record[column] = value;
    } else if (FLOAT_COLUMNS.has(column)) {
      const value = Number(raw);
      if (!Number.isFinite(value)) {
        throw new SchemaError(`row ${line}: bad number in column "${column}": "${raw}"`);
      }
      record[column] = value;
    } else {
      record[column] = raw;
    }
  });
  return record as unknown as RunRecord;
}
