/**
 * Artifact schemas and pure data transforms shared by the dashboard views.
 *
 * The dashboard consumes the JSON artifacts written by the `assetowner`
 * evaluation pipeline, either over its read-only HTTP endpoints or straight
 * from a bundle directory on disk. Every displayed number is either copied
 * from an artifact or counted over the filtered row subset here.
 */

export const FAMILIES: readonly string[] = [
  "adaboost",
  "logistic",
  "naive_bayes",
  "cart",
  "random_forest",
];

/** The seven features summarized by frequency tables in the EDA view. */
export const EDA_FEATURES: readonly string[] = [
  "class_name",
  "agent_installed",
  "location",
  "fqdn_top",
  "os_parent",
  "oui",
  "cidr8",
];

export const FEATURE_TITLES: Record<string, string> = {
  class_name: "Class Name",
  agent_installed: "Agent Installed",
  location: "Location",
  fqdn_top: "FQDN",
  os_parent: "OS Parent",
  oui: "OUI Vendor",
  cidr8: "CIDR/8",
};

export interface EdaSummary {
  schema_version: number;
  n_rows: number;
  owner_counts: Record<string, number>;
  feature_tables: Record<string, Record<string, number>>;
  cidr16_by_cidr8: Record<string, Record<string, number>>;
  os_by_os_parent: Record<string, Record<string, number>>;
}

/** Column-coded feature rows: `columns` pairs each column name with its
 * vocabulary, `codes` holds one vocabulary index per row and column. */
export interface FeatureRowsFile {
  schema_version: number;
  columns: [string, string[]][];
  codes: number[][];
  owners: string[];
  os: string[];
  vendor: string[];
}

export interface OwnersFile {
  schema_version: number;
  owners: string[];
}

export interface ConfusionCells {
  tp: number;
  fp: number;
  tn: number;
  fn: number;
}

export interface ErrorSummary {
  min: number;
  q1: number;
  median: number;
  q3: number;
  max: number;
}

export interface FamilyReport {
  aggregated_confusion: ConfusionCells;
  aggregated_metrics: Record<string, number | null>;
  error_summary: ErrorSummary;
  mean_importance: Record<string, number>;
  mean_metrics: Record<string, { mean: number | null; skipped: number }>;
  per_iteration: {
    iteration: number;
    chosen: unknown;
    confusion: ConfusionCells;
    error: number;
  }[];
}

export interface RunReport {
  schema_version: number;
  owner: string;
  families: string[];
  iterations: number;
  master_seed: number;
  n_rows: number;
  n_positive: number;
  config: unknown;
  per_family: Record<string, FamilyReport>;
}

/** Held-out predictions: `row_ids`/`row_codes`/`actual` index the rows that
 * ever appear in a validation or test part; each iteration lists the row
 * slots it scored and one 0/1 label vector per model family. */
export interface PredictionsFile {
  schema_version: number;
  owner: string;
  columns: [string, string[]][];
  row_ids: number[];
  row_codes: number[][];
  actual: number[];
  iterations: {
    iteration: number;
    rows: number[];
    labels: Record<string, number[]>;
  }[];
}

const UNSEEN_LABEL = "(unseen)";

function decodeCode(vocab: string[], code: number): string {
  return code >= 0 && code < vocab.length ? vocab[code] : UNSEEN_LABEL;
}

/** Decodes coded rows into plain string records, one per asset, including
 * the owner label (empty string when unlabeled) and the raw os/vendor
 * strings used by the grouped bubble charts. */
export function decodeRows(file: FeatureRowsFile): Record<string, string>[] {
  const rows: Record<string, string>[] = [];
  for (let i = 0; i < file.codes.length; i += 1) {
    const row: Record<string, string> = {};
    const codes = file.codes[i];
    for (let c = 0; c < file.columns.length; c += 1) {
      const [name, vocab] = file.columns[c];
      row[name] = decodeCode(vocab, codes[c]);
    }
    row.owner = file.owners[i];
    row.os = file.os[i];
    row.vendor = file.vendor[i];
    rows.push(row);
  }
  return rows;
}

export const LABEL_YES = "yes";
export const LABEL_NO = "no";

/** One prediction-table row: a scored asset in one MCCV iteration, with the
 * decoded feature values, the five per-model labels, and the actual label
 * all exposed as filterable string fields. */
export interface PredictionRow {
  iteration: number;
  rowId: number;
  fields: Record<string, string>;
}

export function predictionRows(file: PredictionsFile): PredictionRow[] {
  const families = Object.keys(file.iterations[0]?.labels ?? {});
  const base: Record<string, string>[] = file.row_codes.map((codes) => {
    const fields: Record<string, string> = {};
    for (let c = 0; c < file.columns.length; c += 1) {
      const [name, vocab] = file.columns[c];
      fields[name] = decodeCode(vocab, codes[c]);
    }
    return fields;
  });
  const out: PredictionRow[] = [];
  for (const iteration of file.iterations) {
    for (let slot = 0; slot < iteration.rows.length; slot += 1) {
      const idx = iteration.rows[slot];
      const fields: Record<string, string> = { ...base[idx] };
      for (const family of families) {
        fields[family] = iteration.labels[family][slot] ? LABEL_YES : LABEL_NO;
      }
      fields.actual = file.actual[idx] ? LABEL_YES : LABEL_NO;
      out.push({ iteration: iteration.iteration, rowId: file.row_ids[idx], fields });
    }
  }
  return out;
}

export function isCorrect(row: PredictionRow, family: string): boolean {
  return row.fields[family] === row.fields.actual;
}

/** Applies the model and correctness selectors to prediction rows. With the
 * model selector on "all", "correct" keeps rows every family got right and
 * "incorrect" keeps rows at least one family got wrong. */
export function filterPredictionRows(
  rows: readonly PredictionRow[],
  families: readonly string[],
  model: string,
  correctness: string,
): PredictionRow[] {
  if (correctness !== "correct" && correctness !== "incorrect") {
    return [...rows];
  }
  const judged = model === "all" ? families : [model];
  return rows.filter((row) => {
    const allCorrect = judged.every((family) => isCorrect(row, family));
    return correctness === "correct" ? allCorrect : !allCorrect;
  });
}

/** Counts rows by the value of one field. */
export function countBy(
  rows: readonly Record<string, string>[],
  field: string,
): Record<string, number> {
  const counts: Record<string, number> = {};
  for (const row of rows) {
    const key = row[field] ?? "(missing)";
    counts[key] = (counts[key] ?? 0) + 1;
  }
  return counts;
}

/** Counts rows by member field within group field, mirroring the nested
 * tables in the EDA summary artifact. */
export function nestedCounts(
  rows: readonly Record<string, string>[],
  groupField: string,
  memberField: string,
): Record<string, Record<string, number>> {
  const out: Record<string, Record<string, number>> = {};
  for (const row of rows) {
    const group = row[groupField] ?? "(missing)";
    const member = row[memberField] ?? "(missing)";
    const table = (out[group] ??= {});
    table[member] = (table[member] ?? 0) + 1;
  }
  return out;
}

/** Serializes a JSON value with sorted object keys and no whitespace, the
 * same canonical form the artifact writer uses, so equal tables produce
 * byte-identical text. */
export function sortedJson(value: unknown): string {
  if (value === null || typeof value !== "object") {
    return JSON.stringify(value);
  }
  if (Array.isArray(value)) {
    return "[" + value.map(sortedJson).join(",") + "]";
  }
  const obj = value as Record<string, unknown>;
  const parts = Object.keys(obj)
    .sort()
    .map((key) => JSON.stringify(key) + ":" + sortedJson(obj[key]));
  return "{" + parts.join(",") + "}";
}

/** Recomputes the metric set from confusion cells; undefined ratios (zero
 * denominators) come back as null. */
export function metricsFromConfusion(
  cells: ConfusionCells,
): Record<string, number | null> {
  const { tp, fp, tn, fn } = cells;
  const n = tp + fp + tn + fn;
  const ratio = (num: number, den: number): number | null =>
    den > 0 ? num / den : null;
  const precision = ratio(tp, tp + fp);
  const sensitivity = ratio(tp, tp + fn);
  let f1: number | null = null;
  if (precision !== null && sensitivity !== null && precision + sensitivity > 0) {
    f1 = (2 * precision * sensitivity) / (precision + sensitivity);
  }
  return {
    accuracy: ratio(tp + tn, n),
    error_rate: ratio(fp + fn, n),
    precision,
    sensitivity,
    specificity: ratio(tn, tn + fp),
    f1,
  };
}

/** Percent-encodes an owner name the way the artifact writer does when it
 * builds report/prediction file names (every byte outside the unreserved
 * set is escaped). */
export function ownerSlug(owner: string): string {
  return encodeURIComponent(owner).replace(
    /[!'()*]/g,
    (c) => "%" + c.charCodeAt(0).toString(16).toUpperCase(),
  );
}
