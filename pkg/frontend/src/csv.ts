import Papa from "papaparse";

/** Column contract of the simulator's sweep output. */
export const REQUIRED_COLUMNS = [
  "p_block",
  "scheme",
  "mean_reward",
  "stderr",
  "trials",
] as const;

export interface SweepRow {
  pBlock: number;
  scheme: string;
  meanReward: number;
  stderr: number;
  trials: number;
}

export interface Series {
  scheme: string;
  points: Array<{ x: number; y: number; halfWidth: number }>;
}

/** Raised when the CSV does not satisfy the documented schema. */
export class SchemaError extends Error {}

function parseNumber(raw: string | undefined, column: string, line: number): number {
  const value = Number(raw);
  if (raw === undefined || raw.trim() === "" || !Number.isFinite(value)) {
    throw new SchemaError(`line ${line}: column '${column}' is not a finite number (got '${raw}')`);
  }
  return value;
}

/**
 * Parse and validate the sweep CSV. Unknown extra columns are ignored with a
 * warning; a missing required column, a malformed value, or an empty data
 * section is a SchemaError.
 */
export function parseSweepCsv(
  text: string,
  warn: (message: string) => void = (m) => console.warn(m),
): SweepRow[] {
  const parsed = Papa.parse<Record<string, string>>(text.trim(), {
    header: true,
    skipEmptyLines: true,
  });
  if (parsed.errors.length > 0) {
    const first = parsed.errors[0];
    throw new SchemaError(`malformed CSV: ${first.message} (row ${first.row ?? "?"})`);
  }
  const fields = parsed.meta.fields ?? [];
  const missing = REQUIRED_COLUMNS.filter((c) => !fields.includes(c));
  if (missing.length > 0) {
    throw new SchemaError(
      `missing required column(s): ${missing.join(", ")}; expected header ` +
        `'${REQUIRED_COLUMNS.join(",")}'`,
    );
  }
  const extras = fields.filter((c) => !(REQUIRED_COLUMNS as readonly string[]).includes(c));
  if (extras.length > 0) {
    warn(`ignoring unknown column(s): ${extras.join(", ")}`);
  }
  if (parsed.data.length === 0) {
    throw new SchemaError("no data rows after the header");
  }
  return parsed.data.map((record, index) => {
    const line = index + 2; // header is line 1
    const pBlock = parseNumber(record.p_block, "p_block", line);
    if (pBlock < 0 || pBlock > 1) {
      throw new SchemaError(`line ${line}: p_block ${pBlock} outside [0, 1]`);
    }
    const scheme = (record.scheme ?? "").trim();
    if (scheme === "") {
      throw new SchemaError(`line ${line}: empty scheme name`);
    }
    const stderr = parseNumber(record.stderr, "stderr", line);
    if (stderr < 0) {
      throw new SchemaError(`line ${line}: negative stderr ${stderr}`);
    }
    const trials = parseNumber(record.trials, "trials", line);
    if (!Number.isInteger(trials) || trials < 1) {
      throw new SchemaError(`line ${line}: trials must be a positive integer (got '${record.trials}')`);
    }
    return {
      pBlock,
      scheme,
      meanReward: parseNumber(record.mean_reward, "mean_reward", line),
      stderr,
      trials,
    };
  });
}

/**
 * Group rows into one series per scheme (first-appearance order), each sorted
 * by blockage probability. Error-bar half-width is two standard errors.
 */
export function groupSeries(rows: SweepRow[]): Series[] {
  const order: string[] = [];
  const byScheme = new Map<string, Series>();
  for (const row of rows) {
    if (!byScheme.has(row.scheme)) {
      order.push(row.scheme);
      byScheme.set(row.scheme, { scheme: row.scheme, points: [] });
    }
    byScheme.get(row.scheme)!.points.push({
      x: row.pBlock,
      y: row.meanReward,
      halfWidth: 2 * row.stderr,
    });
  }
  for (const series of byScheme.values()) {
    series.points.sort((a, b) => a.x - b.x);
    for (let i = 1; i < series.points.length; i++) {
      if (series.points[i].x === series.points[i - 1].x) {
        throw new SchemaError(
          `scheme '${series.scheme}' has duplicate rows for p_block=${series.points[i].x}`,
        );
      }
    }
  }
  return order.map((scheme) => byScheme.get(scheme)!);
}
