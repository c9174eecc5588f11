/**
 * Browser wiring: loads artifacts, keeps the view state in the URL, and
 * re-renders the EDA and model views through the pure render functions.
 *
 * Artifacts are fetched from the read-only API when the bundle server is
 * running, falling back to plain artifact files next to the page so a
 * bundle directory can be browsed from any static file server.
 */

import {
  applyFilter,
  FilterError,
  parseFilter,
  renderFilter,
  type FilterExpr,
} from "./filter.js";
import {
  countBy,
  decodeRows,
  FAMILIES,
  FEATURE_TITLES,
  filterPredictionRows,
  nestedCounts,
  ownerSlug,
  predictionRows,
  type EdaSummary,
  type FeatureRowsFile,
  type OwnersFile,
  type PredictionRow,
  type PredictionsFile,
  type RunReport,
} from "./data.js";
import {
  renderAccuracyBarchart,
  renderBubbleChart,
  renderConfusionPanel,
  renderEmptyState,
  renderErrorSummaryTable,
  renderFrequencyTables,
  renderPredictionTable,
  type BubbleEntry,
} from "./render.js";
import { queryToState, stateToQuery, type ViewState } from "./state.js";

interface Artifacts {
  eda: EdaSummary | null;
  owners: string[];
  rows: Record<string, string>[] | null;
  reports: Map<string, RunReport | null>;
  predictions: Map<string, PredictionRow[] | null>;
  families: Map<string, string[]>;
}

const artifacts: Artifacts = {
  eda: null,
  owners: [],
  rows: null,
  reports: new Map(),
  predictions: new Map(),
  families: new Map(),
};

let state: ViewState = {
  filter: "",
  owner: "",
  model: "all",
  correctness: "all",
};

function el<T extends HTMLElement>(id: string): T {
  const node = document.getElementById(id);
  if (node === null) {
    throw new Error(`missing element #${id}`);
  }
  return node as T;
}

async function fetchJson<T>(paths: string[]): Promise<T | null> {
  for (const path of paths) {
    try {
      const response = await fetch(path);
      if (response.ok) {
        return (await response.json()) as T;
      }
    } catch {
      // fall through to the next candidate path
    }
  }
  return null;
}

function syncUrl(): void {
  const query = stateToQuery(state);
  try {
    history.replaceState(null, "", query === "" ? location.pathname : "?" + query);
  } catch {
    // history API unavailable (for example file:// in some browsers)
  }
}

/** Parses the current filter text; on error shows the message and returns
 * undefined so the caller leaves the charts untouched. */
function currentFilter(): FilterExpr | null | undefined {
  const errorBox = el<HTMLElement>("filter-error");
  if (state.filter.trim() === "") {
    errorBox.textContent = "";
    return null;
  }
  try {
    const expr = parseFilter(state.filter);
    errorBox.textContent = "";
    return expr;
  } catch (err) {
    if (err instanceof FilterError) {
      errorBox.textContent = err.message;
      return undefined;
    }
    throw err;
  }
}

function renderEda(expr: FilterExpr | null): void {
  const view = el<HTMLElement>("eda-view");
  const errorBox = el<HTMLElement>("eda-error");
  if (artifacts.rows === null) {
    errorBox.textContent = "";
    el<HTMLElement>("row-count").textContent = "";
    const message = "feature rows artifact is missing; run the evaluate command first";
    el<HTMLElement>("owner-bubbles").innerHTML = renderEmptyState(message);
    el<HTMLElement>("cidr-bubbles").innerHTML = "";
    el<HTMLElement>("os-bubbles").innerHTML = "";
    el<HTMLElement>("freq-tables").innerHTML = "";
    view.classList.add("degraded");
    return;
  }
  view.classList.remove("degraded");

  let rows = artifacts.rows;
  if (expr !== null) {
    try {
      rows = applyFilter(expr, rows);
    } catch (err) {
      if (err instanceof FilterError) {
        errorBox.textContent = `inventory view: ${err.message}`;
        return;
      }
      throw err;
    }
  }
  errorBox.textContent = "";
  el<HTMLElement>("row-count").textContent =
    `${rows.length} of ${artifacts.rows.length} rows`;

  const ownerEntries: BubbleEntry[] = Object.entries(countBy(rows, "owner")).map(
    ([key, value]) => ({
      key,
      value,
      label: key === "" ? "(unlabeled)" : key,
    }),
  );
  el<HTMLElement>("owner-bubbles").innerHTML = renderBubbleChart(ownerEntries, {
    title: "assets by owner",
    filterField: "owner",
    filterBy: "key",
  });

  const cidrEntries: BubbleEntry[] = [];
  const byCidr8 = nestedCounts(rows, "cidr8", "cidr16");
  for (const [group, members] of Object.entries(byCidr8)) {
    for (const [key, value] of Object.entries(members)) {
      cidrEntries.push({ key, value, group });
    }
  }
  el<HTMLElement>("cidr-bubbles").innerHTML = renderBubbleChart(cidrEntries, {
    title: "assets by CIDR/16, grouped by CIDR/8",
    filterField: "cidr8",
    filterBy: "group",
  });

  const osEntries: BubbleEntry[] = [];
  const byParent = nestedCounts(rows, "os_parent", "os");
  for (const [group, members] of Object.entries(byParent)) {
    for (const [key, value] of Object.entries(members)) {
      osEntries.push({ key, value, group });
    }
  }
  el<HTMLElement>("os-bubbles").innerHTML = renderBubbleChart(osEntries, {
    title: "assets by operating system, grouped by OS parent",
    filterField: "os_parent",
    filterBy: "group",
  });

  const tables: Record<string, Record<string, number>> = {};
  for (const field of Object.keys(FEATURE_TITLES)) {
    tables[field] = countBy(rows, field);
  }
  el<HTMLElement>("freq-tables").innerHTML = renderFrequencyTables(
    tables,
    FEATURE_TITLES,
  );
}

async function loadOwnerArtifacts(owner: string): Promise<void> {
  if (!artifacts.reports.has(owner)) {
    const slug = ownerSlug(owner);
    const report = await fetchJson<RunReport>([
      `/api/report/${slug}`,
      `report_${slug}.json`,
    ]);
    artifacts.reports.set(owner, report);
    artifacts.families.set(owner, report?.families ?? [...FAMILIES]);
    const predictions = await fetchJson<PredictionsFile>([
      `/api/predictions/${slug}`,
      `predictions_${slug}.json`,
    ]);
    artifacts.predictions.set(
      owner,
      predictions === null ? null : predictionRows(predictions),
    );
  }
}

function renderModel(expr: FilterExpr | null): void {
  const errorBox = el<HTMLElement>("model-error");
  errorBox.textContent = "";
  const confusion = el<HTMLElement>("confusion-panel");
  const chart = el<HTMLElement>("accuracy-chart");
  const summary = el<HTMLElement>("error-summary");
  const table = el<HTMLElement>("prediction-table");

  if (state.owner === "") {
    const message = "owners artifact is missing; no model results to show";
    confusion.innerHTML = renderEmptyState(message);
    chart.innerHTML = "";
    summary.innerHTML = "";
    table.innerHTML = "";
    return;
  }

  const report = artifacts.reports.get(state.owner) ?? null;
  if (report === null) {
    const message = `report artifact for "${state.owner}" is missing`;
    confusion.innerHTML = renderEmptyState(message);
    chart.innerHTML = "";
    summary.innerHTML = "";
  } else {
    confusion.innerHTML = renderConfusionPanel(report, state.model);
    chart.innerHTML = renderAccuracyBarchart(
      report.families.map((family) => ({
        family,
        accuracy: report.per_family[family]?.aggregated_metrics.accuracy ?? null,
      })),
    );
    summary.innerHTML = renderErrorSummaryTable(
      report.families.map((family) => ({
        family,
        summary: report.per_family[family].error_summary,
      })),
    );
  }

  const rows = artifacts.predictions.get(state.owner) ?? null;
  if (rows === null) {
    table.innerHTML = renderEmptyState(
      `predictions artifact for "${state.owner}" is missing`,
    );
    return;
  }
  const families = artifacts.families.get(state.owner) ?? [...FAMILIES];
  let filtered: PredictionRow[] = [...rows];
  if (expr !== null) {
    try {
      filtered = rows.filter((row) => {
        return applyFilter(expr, [row.fields]).length === 1;
      });
    } catch (err) {
      if (err instanceof FilterError) {
        errorBox.textContent = `model view: ${err.message}`;
        return;
      }
      throw err;
    }
  }
  filtered = filterPredictionRows(filtered, families, state.model, state.correctness);
  table.innerHTML = renderPredictionTable(filtered, families, state.model);
}

function renderAll(): void {
  const expr = currentFilter();
  if (expr === undefined) {
    return;
  }
  renderEda(expr);
  renderModel(expr);
}

function setFilter(text: string): void {
  state.filter = text;
  el<HTMLInputElement>("filter-input").value = text;
  syncUrl();
  renderAll();
}

/** Click-to-filter: AND the clicked predicate onto the current filter (or
 * replace it when the current text does not parse). */
function addPredicate(field: string, value: string): void {
  const pred: FilterExpr = { kind: "eq", field, value };
  let next: FilterExpr = pred;
  if (state.filter.trim() !== "") {
    try {
      next = { kind: "and", left: parseFilter(state.filter), right: pred };
    } catch {
      next = pred;
    }
  }
  setFilter(renderFilter(next));
}

function selectTab(tab: "eda" | "model"): void {
  el<HTMLElement>("eda-view").hidden = tab !== "eda";
  el<HTMLElement>("model-view").hidden = tab !== "model";
  el<HTMLButtonElement>("tab-eda").classList.toggle("active", tab === "eda");
  el<HTMLButtonElement>("tab-model").classList.toggle("active", tab === "model");
}

async function selectOwner(owner: string): Promise<void> {
  state.owner = owner;
  syncUrl();
  await loadOwnerArtifacts(owner);
  renderAll();
}

async function init(): Promise<void> {
  state = queryToState(location.search);

  artifacts.eda = await fetchJson<EdaSummary>(["/api/eda", "eda_summary.json"]);
  const ownersFile = await fetchJson<OwnersFile>(["/api/owners", "owners.json"]);
  artifacts.owners = ownersFile?.owners ?? [];
  const rowsFile = await fetchJson<FeatureRowsFile>([
    "/api/rows",
    "feature_rows.json",
  ]);
  artifacts.rows = rowsFile === null ? null : decodeRows(rowsFile);

  if (artifacts.owners.length > 0 && !artifacts.owners.includes(state.owner)) {
    state.owner = artifacts.owners[0];
  }
  if (artifacts.owners.length === 0) {
    state.owner = "";
  }

  const ownerSelect = el<HTMLSelectElement>("owner-select");
  ownerSelect.innerHTML = artifacts.owners
    .map(
      (owner) =>
        `<option value="${owner.replace(/"/g, "&quot;")}">${owner}</option>`,
    )
    .join("");
  ownerSelect.value = state.owner;

  const modelSelect = el<HTMLSelectElement>("model-select");
  modelSelect.innerHTML =
    '<option value="all">all models</option>' +
    FAMILIES.map((f) => `<option value="${f}">${f}</option>`).join("");
  modelSelect.value = state.model;

  const correctnessSelect = el<HTMLSelectElement>("correctness-select");
  correctnessSelect.value = state.correctness;

  el<HTMLInputElement>("filter-input").value = state.filter;

  el<HTMLButtonElement>("filter-apply").addEventListener("click", () => {
    setFilter(el<HTMLInputElement>("filter-input").value);
  });
  el<HTMLInputElement>("filter-input").addEventListener("keydown", (event) => {
    if (event.key === "Enter") {
      setFilter(el<HTMLInputElement>("filter-input").value);
    }
  });
  el<HTMLButtonElement>("filter-clear").addEventListener("click", () => {
    setFilter("");
  });

  ownerSelect.addEventListener("change", () => {
    void selectOwner(ownerSelect.value);
  });
  modelSelect.addEventListener("change", () => {
    state.model = modelSelect.value;
    syncUrl();
    renderAll();
  });
  correctnessSelect.addEventListener("change", () => {
    const value = correctnessSelect.value;
    state.correctness =
      value === "correct" || value === "incorrect" ? value : "all";
    syncUrl();
    renderAll();
  });

  el<HTMLButtonElement>("tab-eda").addEventListener("click", () => selectTab("eda"));
  el<HTMLButtonElement>("tab-model").addEventListener("click", () =>
    selectTab("model"),
  );

  document.body.addEventListener("click", (event) => {
    const target = (event.target as Element | null)?.closest("[data-field]");
    if (target instanceof Element) {
      const field = target.getAttribute("data-field");
      const value = target.getAttribute("data-value");
      if (field !== null && value !== null) {
        addPredicate(field, value);
      }
    }
  });

  selectTab("eda");
  if (state.owner !== "") {
    await loadOwnerArtifacts(state.owner);
  }
  syncUrl();
  renderAll();
}

void init();
