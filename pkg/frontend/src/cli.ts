#!/usr/bin/env node
/**
 * caal-report <runs.csv...> --out <dir>
 *
 * Aggregates benchmark run records and writes summary.txt, summary.csv and
 * one success-rate + one symbol-count SVG chart per (noise kind, level).
 */

import { mkdirSync, writeFileSync } from "node:fs";
import { join } from "node:path";
import { aggregate } from "./aggregate.js";
import { buildCharts } from "./charts.js";
import { summaryCsv, summaryText } from "./summary.js";

export function runReport(csvPaths: string[], outDir: string): string[] {
  if (csvPaths.length === 0) {
    throw new Error("no input CSV files given");
  }
  const summary = aggregate(csvPaths);
  if (summary.groups.length === 0) {
    throw new Error("nothing to report: no run records");
  }
  const charts = buildCharts(summary.groups);
  mkdirSync(outDir, { recursive: true });
  const written: string[] = [];
  const emit = (name: string, content: string) => {
    writeFileSync(join(outDir, name), content, "utf8");
    written.push(name);
  };
  emit("summary.txt", summaryText(summary.groups));
  emit("summary.csv", summaryCsv(summary.groups));
  for (const chart of charts) {
    emit(chart.name, chart.svg);
  }
  return written;
}

function main(argv: string[]): number {
  const csvPaths: string[] = [];
  let outDir: string | null = null;
  for (let i = 0; i < argv.length; i++) {
    const arg = argv[i];
    if (arg === "--out") {
      outDir = argv[++i] ?? null;
    } else if (arg === "--help" || arg === "-h") {
      console.log("usage: caal-report <runs.csv...> --out <dir>");
      return 0;
    } else {
      csvPaths.push(arg);
    }
  }
  if (!outDir) {
    console.error("error: --out <dir> is required");
    return 2;
  }
  try {
    const written = runReport(csvPaths, outDir);
    console.log(`wrote ${written.length} files to ${outDir}`);
    return 0;
  } catch (err) {
    console.error(`error: ${err instanceof Error ? err.message : err}`);
    return 1;
  }
}

if (process.argv[1] && import.meta.url.endsWith(process.argv[1].split("/").pop()!)) {
  process.exit(main(process.argv.slice(2)));
}
