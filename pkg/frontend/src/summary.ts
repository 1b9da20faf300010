/** Plain-text and CSV renderings of the aggregate summary table. */

import { GroupSummary } from "./aggregate.js";
import { toCsv } from "./csv.js";

export const SUMMARY_COLUMNS = [
  "framework",
  "noise_kind",
  "noise_level",
  "target",
  "runs",
  "successes",
  "success_rate",
  "mean_symbols_successful",
  "mean_eq_fraction",
  "best_learner",
  "best_min_repeats",
  "best_max_repeats",
] as const;

export function summaryRows(groups: GroupSummary[]): (string | number)[][] {
  return groups.map((g) => [
    g.framework,
    g.noise_kind,
    g.noise_level,
    g.target,
    g.runs,
    g.successes,
    g.successRate,
    g.meanSymbols === null ? "" : g.meanSymbols,
    g.meanEqFraction,
    g.best.learner,
    g.best.min_repeats,
    g.best.max_repeats,
  ]);
}

export function summaryCsv(groups: GroupSummary[]): string {
  return toCsv([[...SUMMARY_COLUMNS], ...summaryRows(groups)]);
}

export function summaryText(groups: GroupSummary[]): string {
  const header = [
    "framework", "noise", "level", "target", "runs", "rate",
    "mean-symbols", "eq-frac", "best-config",
  ];
  const rows = groups.map((g) => [
    g.framework,
    g.noise_kind,
    String(g.noise_level),
    g.target.split(/[\\/]/).pop() ?? g.target,
    String(g.runs),
    g.successRate.toFixed(3),
    g.meanSymbols === null ? "-" : g.meanSymbols.toFixed(1),
    g.meanEqFraction.toFixed(3),
    `${g.best.learner} (${g.best.min_repeats},${g.best.max_repeats})`,
  ]);
  const widths = header.map((h, i) =>
    Math.max(h.length, ...rows.map((r) => r[i].length)),
  );
  const fmt = (row: string[]) =>
    row.map((cell, i) => cell.padEnd(widths[i])).join("  ").trimEnd();
  return [fmt(header), fmt(widths.map((w) => "-".repeat(w))), ...rows.map(fmt)].join("\n") + "\n";
}
