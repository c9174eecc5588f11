/**
 * Pure HTML/SVG renderers for the dashboard views.
 *
 * Every function here maps plain data to a markup string and touches no
 * global state, so the views can be verified against the artifacts without
 * a browser. Interactive elements carry data-field/data-value attributes;
 * the application layer turns clicks on them into filter predicates.
 */

import type { ConfusionCells, ErrorSummary, PredictionRow, RunReport } from "./data.js";
import { EDA_FEATURES, metricsFromConfusion } from "./data.js";

export function escapeHtml(text: string): string {
  return text
    .replace(/&/g, "&amp;")
    .replace(/</g, "&lt;")
    .replace(/>/g, "&gt;")
    .replace(/"/g, "&quot;");
}

/** Deterministic color per category value so the same value is painted the
 * same way in every chart and table. */
export function colorFor(key: string): string {
  let hash = 5381;
  for (let i = 0; i < key.length; i += 1) {
    hash = ((hash * 33) ^ key.charCodeAt(i)) >>> 0;
  }
  const hue = hash % 360;
  const light = 38 + (Math.floor(hash / 360) % 3) * 7;
  return `hsl(${hue}, 62%, ${light}%)`;
}

export function renderEmptyState(message: string): string {
  return `<div class="empty-state">${escapeHtml(message)}</div>`;
}

export interface BubbleEntry {
  key: string;
  value: number;
  /** Display label; defaults to key. */
  label?: string;
  /** Grouping value; grouped charts color and sort by it. */
  group?: string;
}

export interface BubbleOptions {
  title: string;
  /** Field a click on a bubble should filter on. */
  filterField?: string;
  /** Whether the filter value comes from the entry key or its group. */
  filterBy?: "key" | "group";
  width?: number;
}

interface PlacedBubble extends BubbleEntry {
  x: number;
  y: number;
  r: number;
}

const BUBBLE_R_MIN = 6;
const BUBBLE_R_MAX = 44;
const BUBBLE_GAP = 8;
const BUBBLE_PAD = 10;

/** Lays bubbles out on left-to-right shelves, radius proportional to the
 * square root of the value, grouped entries kept adjacent. */
export function layoutBubbles(
  entries: readonly BubbleEntry[],
  width: number,
): { placed: PlacedBubble[]; height: number } {
  const sorted = [...entries].sort((a, b) => {
    const ga = a.group ?? "";
    const gb = b.group ?? "";
    if (ga !== gb) {
      return ga < gb ? -1 : 1;
    }
    if (a.value !== b.value) {
      return b.value - a.value;
    }
    return a.key < b.key ? -1 : 1;
  });
  const maxValue = Math.max(1, ...sorted.map((e) => e.value));
  const radius = (value: number): number =>
    BUBBLE_R_MIN + (BUBBLE_R_MAX - BUBBLE_R_MIN) * Math.sqrt(value / maxValue);

  const placed: PlacedBubble[] = [];
  let shelf: { entry: BubbleEntry; r: number }[] = [];
  let shelfTop = BUBBLE_PAD;

  const flush = (): void => {
    if (shelf.length === 0) {
      return;
    }
    const maxR = Math.max(...shelf.map((s) => s.r));
    let x = BUBBLE_PAD;
    for (const item of shelf) {
      placed.push({
        ...item.entry,
        x: x + item.r,
        y: shelfTop + maxR,
        r: item.r,
      });
      x += 2 * item.r + BUBBLE_GAP;
    }
    shelfTop += 2 * maxR + BUBBLE_GAP;
    shelf = [];
  };

  let cursor = BUBBLE_PAD;
  for (const entry of sorted) {
    const r = radius(entry.value);
    if (shelf.length > 0 && cursor + 2 * r > width - BUBBLE_PAD) {
      flush();
      cursor = BUBBLE_PAD;
    }
    shelf.push({ entry, r });
    cursor += 2 * r + BUBBLE_GAP;
  }
  flush();
  return { placed, height: shelfTop - BUBBLE_GAP + BUBBLE_PAD };
}

function bubbleLabel(bubble: PlacedBubble): string {
  const label = bubble.label ?? bubble.key;
  if (bubble.r < 16) {
    return "";
  }
  const maxChars = Math.max(2, Math.floor(bubble.r / 3.6));
  const shown =
    label.length > maxChars ? label.slice(0, maxChars - 1) + "…" : label;
  let text =
    `<text x="${bubble.x.toFixed(1)}" y="${bubble.y.toFixed(1)}" ` +
    `class="bubble-label">${escapeHtml(shown)}</text>`;
  if (bubble.r >= 24) {
    text +=
      `<text x="${bubble.x.toFixed(1)}" y="${(bubble.y + 13).toFixed(1)}" ` +
      `class="bubble-count">${bubble.value}</text>`;
  }
  return text;
}

/** Renders a bubble chart as a figure with an inline SVG and, for grouped
 * entries, a color legend. Empty input renders an empty-state panel. */
export function renderBubbleChart(
  entries: readonly BubbleEntry[],
  opts: BubbleOptions,
): string {
  const width = opts.width ?? 720;
  const title = `<figcaption>${escapeHtml(opts.title)}</figcaption>`;
  if (entries.length === 0) {
    return (
      `<figure class="bubble-chart">${title}` +
      renderEmptyState("no rows match the current filter") +
      "</figure>"
    );
  }
  const { placed, height } = layoutBubbles(entries, width);
  const circles = placed
    .map((bubble) => {
      const colorKey = bubble.group ?? bubble.key;
      const filterValue =
        opts.filterBy === "group" ? bubble.group ?? "" : bubble.key;
      const click =
        opts.filterField === undefined
          ? ""
          : ` data-field="${escapeHtml(opts.filterField)}"` +
            ` data-value="${escapeHtml(filterValue)}"`;
      const hover = `${bubble.label ?? bubble.key}: ${bubble.value}`;
      return (
        `<circle cx="${bubble.x.toFixed(1)}" cy="${bubble.y.toFixed(1)}" ` +
        `r="${bubble.r.toFixed(1)}" fill="${colorFor(colorKey)}" ` +
        `class="bubble${click === "" ? "" : " clickable"}"${click}>` +
        `<title>${escapeHtml(hover)}</title></circle>` +
        bubbleLabel(bubble)
      );
    })
    .join("");
  const svg =
    `<svg viewBox="0 0 ${width} ${Math.ceil(height)}" ` +
    `role="img" aria-label="${escapeHtml(opts.title)}">${circles}</svg>`;

  const groups = [...new Set(placed.map((b) => b.group).filter((g) => g !== undefined))];
  let legend = "";
  if (groups.length > 0) {
    legend =
      '<div class="legend">' +
      groups
        .map(
          (group) =>
            `<span class="legend-item"><span class="chip" ` +
            `style="background:${colorFor(group as string)}"></span>` +
            `${escapeHtml(group as string)}</span>`,
        )
        .join("") +
      "</div>";
  }
  return `<figure class="bubble-chart">${title}${svg}${legend}</figure>`;
}

/** Renders one colored frequency table, rows ordered by count descending
 * then value ascending, with a share column and a total footer. */
export function renderFrequencyTable(
  field: string,
  title: string,
  counts: Record<string, number>,
): string {
  const keys = Object.keys(counts).sort((a, b) => {
    if (counts[a] !== counts[b]) {
      return counts[b] - counts[a];
    }
    return a < b ? -1 : 1;
  });
  const total = keys.reduce((sum, key) => sum + counts[key], 0);
  if (keys.length === 0) {
    return (
      `<div class="freq-table" data-feature="${escapeHtml(field)}">` +
      `<h3>${escapeHtml(title)}</h3>` +
      renderEmptyState("no rows match the current filter") +
      "</div>"
    );
  }
  const rows = keys
    .map((key) => {
      const share = ((100 * counts[key]) / total).toFixed(1);
      return (
        `<tr class="freq-row clickable" data-field="${escapeHtml(field)}" ` +
        `data-value="${escapeHtml(key)}">` +
        `<td><span class="chip" style="background:${colorFor(key)}"></span>` +
        `${escapeHtml(key)}</td>` +
        `<td class="num">${counts[key]}</td>` +
        `<td class="num">${share}%</td></tr>`
      );
    })
    .join("");
  return (
    `<div class="freq-table" data-feature="${escapeHtml(field)}">` +
    `<h3>${escapeHtml(title)}</h3>` +
    `<table><thead><tr><th>value</th><th class="num">count</th>` +
    `<th class="num">share</th></tr></thead>` +
    `<tbody>${rows}</tbody>` +
    `<tfoot><tr><td>total</td><td class="num">${total}</td><td></td></tr></tfoot>` +
    `</table></div>`
  );
}

/** Renders the seven EDA frequency tables in their standard order. */
export function renderFrequencyTables(
  tables: Record<string, Record<string, number>>,
  titles: Record<string, string>,
): string {
  return EDA_FEATURES.map((field) =>
    renderFrequencyTable(field, titles[field] ?? field, tables[field] ?? {}),
  ).join("");
}

/** Renders a 2x2 confusion matrix. Each cell carries data-cell/data-value
 * attributes holding the raw artifact integers. */
export function renderConfusionMatrix(
  family: string,
  cells: ConfusionCells,
): string {
  const cell = (name: keyof ConfusionCells): string =>
    `<td class="cm-cell cm-${name}" data-cell="${name}" ` +
    `data-value="${cells[name]}">${cells[name]}</td>`;
  return (
    `<table class="confusion" data-family="${escapeHtml(family)}">` +
    `<caption>${escapeHtml(family)}</caption>` +
    `<thead><tr><th></th><th>predicted yes</th><th>predicted no</th></tr></thead>` +
    `<tbody>` +
    `<tr><th>actual yes</th>${cell("tp")}${cell("fn")}</tr>` +
    `<tr><th>actual no</th>${cell("fp")}${cell("tn")}</tr>` +
    `</tbody></table>`
  );
}

const METRIC_ORDER: readonly string[] = [
  "accuracy",
  "error_rate",
  "precision",
  "sensitivity",
  "specificity",
  "f1",
];

/** Renders the metric set recomputed from the displayed confusion cells.
 * data-value holds the full-precision recomputed number and data-artifact
 * the value stored in the report, so fidelity is checkable from markup. */
export function renderMetricsTable(
  family: string,
  cells: ConfusionCells,
  artifact: Record<string, number | null>,
): string {
  const computed = metricsFromConfusion(cells);
  const rows = METRIC_ORDER.map((metric) => {
    const value = computed[metric];
    const stored = artifact[metric];
    const shown = value === null ? "n/a" : value.toPrecision(6);
    return (
      `<tr><td>${escapeHtml(metric)}</td>` +
      `<td class="num" data-metric="${metric}" ` +
      `data-value="${value === null ? "" : String(value)}" ` +
      `data-artifact="${stored === null || stored === undefined ? "" : String(stored)}">` +
      `${shown}</td></tr>`
    );
  }).join("");
  return (
    `<table class="metrics" data-family="${escapeHtml(family)}">` +
    `<thead><tr><th>metric</th><th class="num">value</th></tr></thead>` +
    `<tbody>${rows}</tbody></table>`
  );
}

/** Renders confusion matrices with their metric tables for the selected
 * model, or for every family when the selector is on "all". */
export function renderConfusionPanel(report: RunReport, model: string): string {
  const families = model === "all" ? report.families : [model];
  return families
    .map((family) => {
      const fam = report.per_family[family];
      if (fam === undefined) {
        return renderEmptyState(`no results for model "${family}"`);
      }
      return (
        `<div class="family-block">` +
        renderConfusionMatrix(family, fam.aggregated_confusion) +
        renderMetricsTable(family, fam.aggregated_confusion, fam.aggregated_metrics) +
        `</div>`
      );
    })
    .join("");
}

/** Renders the accuracy barchart across model families. Each bar's
 * data-value is the artifact's aggregated accuracy, unmodified. */
export function renderAccuracyBarchart(
  entries: readonly { family: string; accuracy: number | null }[],
): string {
  if (entries.length === 0) {
    return renderEmptyState("no model results to chart");
  }
  const rowH = 34;
  const labelW = 120;
  const valueW = 80;
  const width = 640;
  const barMax = width - labelW - valueW - 20;
  const height = entries.length * rowH + 10;
  const bars = entries
    .map((entry, i) => {
      const y = 5 + i * rowH;
      const value = entry.accuracy;
      const barLen = value === null ? 0 : Math.max(1, value * barMax);
      const shown = value === null ? "n/a" : String(value);
      return (
        `<text x="${labelW - 8}" y="${y + 21}" class="bar-label">` +
        `${escapeHtml(entry.family)}</text>` +
        `<rect x="${labelW}" y="${y + 6}" width="${barLen.toFixed(1)}" ` +
        `height="${rowH - 14}" class="bar" fill="${colorFor(entry.family)}" ` +
        `data-family="${escapeHtml(entry.family)}" ` +
        `data-value="${value === null ? "" : String(value)}"></rect>` +
        `<text x="${labelW + barLen + 6}" y="${y + 21}" class="bar-value">` +
        `${shown}</text>`
      );
    })
    .join("");
  return (
    `<svg viewBox="0 0 ${width} ${height}" role="img" ` +
    `aria-label="accuracy by model">${bars}</svg>`
  );
}

/** Renders the per-family test-error distribution summary, the five-number
 * view over the per-iteration errors. */
export function renderErrorSummaryTable(
  rows: readonly { family: string; summary: ErrorSummary }[],
): string {
  if (rows.length === 0) {
    return renderEmptyState("no model results to summarize");
  }
  const body = rows
    .map(
      ({ family, summary }) =>
        `<tr><td>${escapeHtml(family)}</td>` +
        `<td class="num">${summary.min}</td>` +
        `<td class="num">${summary.q1}</td>` +
        `<td class="num">${summary.median}</td>` +
        `<td class="num">${summary.q3}</td>` +
        `<td class="num">${summary.max}</td></tr>`,
    )
    .join("");
  return (
    `<table class="error-summary">` +
    `<thead><tr><th>model</th><th class="num">min</th><th class="num">q1</th>` +
    `<th class="num">median</th><th class="num">q3</th><th class="num">max</th>` +
    `</tr></thead><tbody>${body}</tbody></table>`
  );
}

const PREDICTION_ROW_LIMIT = 400;

/** Renders the prediction table: one row per scored asset per iteration,
 * with feature values, the shown model labels, and the actual label.
 * Incorrect predictions are marked with the "miss" class. */
export function renderPredictionTable(
  rows: readonly PredictionRow[],
  families: readonly string[],
  model: string,
  limit: number = PREDICTION_ROW_LIMIT,
): string {
  if (rows.length === 0) {
    return renderEmptyState("no predictions match the current filters");
  }
  const shownFamilies = model === "all" ? families : [model];
  const header =
    "<tr><th>iter</th><th>row</th>" +
    EDA_FEATURES.map((f) => `<th>${escapeHtml(f)}</th>`).join("") +
    shownFamilies.map((f) => `<th>${escapeHtml(f)}</th>`).join("") +
    "<th>actual</th></tr>";
  const shown = rows.slice(0, limit);
  const body = shown
    .map((row) => {
      const features = EDA_FEATURES.map(
        (f) => `<td>${escapeHtml(row.fields[f] ?? "")}</td>`,
      ).join("");
      const labels = shownFamilies
        .map((family) => {
          const hit = row.fields[family] === row.fields.actual;
          return (
            `<td class="${hit ? "hit" : "miss"}">` +
            `${escapeHtml(row.fields[family] ?? "")}</td>`
          );
        })
        .join("");
      return (
        `<tr><td class="num">${row.iteration}</td>` +
        `<td class="num">${row.rowId}</td>` +
        features +
        labels +
        `<td>${escapeHtml(row.fields.actual ?? "")}</td></tr>`
      );
    })
    .join("");
  const note =
    rows.length > shown.length
      ? `<p class="table-note">showing first ${shown.length} of ${rows.length} rows</p>`
      : `<p class="table-note">${rows.length} rows</p>`;
  return (
    `<div class="prediction-table">` +
    `<table><thead>${header}</thead><tbody>${body}</tbody></table>${note}</div>`
  );
}
