/**
 * Browser wiring: loads artifacts, keeps the view state in the URL, and
 * re-renders the EDA and model views through the pure render functions.
 *
 * Artifacts are fetched from the read-only API when the bundle server is
 * running, falling back to plain artifact files next to the page so a
 * bundle directory can be browsed from any static file server.
 */
import { applyFilter, FilterError, parseFilter, renderFilter, } from "./filter.js";
import { countBy, decodeRows, FAMILIES, FEATURE_TITLES, filterPredictionRows, nestedCounts, ownerSlug, predictionRows, } from "./data.js";
import { renderAccuracyBarchart, renderBubbleChart, renderConfusionPanel, renderEmptyState, renderErrorSummaryTable, renderFrequencyTables, renderPredictionTable, } from "./render.js";
import { queryToState, stateToQuery } from "./state.js";
const artifacts = {
    eda: null,
    owners: [],
    rows: null,
    reports: new Map(),
    predictions: new Map(),
    families: new Map(),
};
let state = {
    filter: "",
    owner: "",
    model: "all",
    correctness: "all",
};
function el(id) {
    const node = document.getElementById(id);
    if (node === null) {
        throw new Error(`missing element #${id}`);
    }
    return node;
}
async function fetchJson(paths) {
    for (const path of paths) {
        try {
            const response = await fetch(path);
            if (response.ok) {
                return (await response.json());
            }
        }
        catch {
            // fall through to the next candidate path
        }
    }
    return null;
}
function syncUrl() {
    const query = stateToQuery(state);
    try {
        history.replaceState(null, "", query === "" ? location.pathname : "?" + query);
    }
    catch {
        // history API unavailable (for example file:// in some browsers)
    }
}
/** Parses the current filter text; on error shows the message and returns
 * undefined so the caller leaves the charts untouched. */
function currentFilter() {
    const errorBox = el("filter-error");
    if (state.filter.trim() === "") {
        errorBox.textContent = "";
        return null;
    }
    try {
        const expr = parseFilter(state.filter);
        errorBox.textContent = "";
        return expr;
    }
    catch (err) {
        if (err instanceof FilterError) {
            errorBox.textContent = err.message;
            return undefined;
        }
        throw err;
    }
}
function renderEda(expr) {
    const view = el("eda-view");
    const errorBox = el("eda-error");
    if (artifacts.rows === null) {
        errorBox.textContent = "";
        el("row-count").textContent = "";
        const message = "feature rows artifact is missing; run the evaluate command first";
        el("owner-bubbles").innerHTML = renderEmptyState(message);
        el("cidr-bubbles").innerHTML = "";
        el("os-bubbles").innerHTML = "";
        el("freq-tables").innerHTML = "";
        view.classList.add("degraded");
        return;
    }
    view.classList.remove("degraded");
    let rows = artifacts.rows;
    if (expr !== null) {
        try {
            rows = applyFilter(expr, rows);
        }
        catch (err) {
            if (err instanceof FilterError) {
                errorBox.textContent = `inventory view: ${err.message}`;
                return;
            }
            throw err;
        }
    }
    errorBox.textContent = "";
    el("row-count").textContent =
        `${rows.length} of ${artifacts.rows.length} rows`;
    const ownerEntries = Object.entries(countBy(rows, "owner")).map(([key, value]) => ({
        key,
        value,
        label: key === "" ? "(unlabeled)" : key,
    }));
    el("owner-bubbles").innerHTML = renderBubbleChart(ownerEntries, {
        title: "assets by owner",
        filterField: "owner",
        filterBy: "key",
    });
    const cidrEntries = [];
    const byCidr8 = nestedCounts(rows, "cidr8", "cidr16");
    for (const [group, members] of Object.entries(byCidr8)) {
        for (const [key, value] of Object.entries(members)) {
            cidrEntries.push({ key, value, group });
        }
    }
    el("cidr-bubbles").innerHTML = renderBubbleChart(cidrEntries, {
        title: "assets by CIDR/16, grouped by CIDR/8",
        filterField: "cidr8",
        filterBy: "group",
    });
    const osEntries = [];
    const byParent = nestedCounts(rows, "os_parent", "os");
    for (const [group, members] of Object.entries(byParent)) {
        for (const [key, value] of Object.entries(members)) {
            osEntries.push({ key, value, group });
        }
    }
    el("os-bubbles").innerHTML = renderBubbleChart(osEntries, {
        title: "assets by operating system, grouped by OS parent",
        filterField: "os_parent",
        filterBy: "group",
    });
    const tables = {};
    for (const field of Object.keys(FEATURE_TITLES)) {
        tables[field] = countBy(rows, field);
    }
    el("freq-tables").innerHTML = renderFrequencyTables(tables, FEATURE_TITLES);
}
async function loadOwnerArtifacts(owner) {
    if (!artifacts.reports.has(owner)) {
        const slug = ownerSlug(owner);
        const report = await fetchJson([
            `/api/report/${slug}`,
            `report_${slug}.json`,
        ]);
        artifacts.reports.set(owner, report);
        artifacts.families.set(owner, report?.families ?? [...FAMILIES]);
        const predictions = await fetchJson([
            `/api/predictions/${slug}`,
            `predictions_${slug}.json`,
        ]);
        artifacts.predictions.set(owner, predictions === null ? null : predictionRows(predictions));
    }
}
function renderModel(expr) {
    const errorBox = el("model-error");
    errorBox.textContent = "";
    const confusion = el("confusion-panel");
    const chart = el("accuracy-chart");
    const summary = el("error-summary");
    const table = el("prediction-table");
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
    }
    else {
        confusion.innerHTML = renderConfusionPanel(report, state.model);
        chart.innerHTML = renderAccuracyBarchart(report.families.map((family) => ({
            family,
            accuracy: report.per_family[family]?.aggregated_metrics.accuracy ?? null,
        })));
        summary.innerHTML = renderErrorSummaryTable(report.families.map((family) => ({
            family,
            summary: report.per_family[family].error_summary,
        })));
    }
    const rows = artifacts.predictions.get(state.owner) ?? null;
    if (rows === null) {
        table.innerHTML = renderEmptyState(`predictions artifact for "${state.owner}" is missing`);
        return;
    }
    const families = artifacts.families.get(state.owner) ?? [...FAMILIES];
    let filtered = [...rows];
    if (expr !== null) {
        try {
            filtered = rows.filter((row) => {
                return applyFilter(expr, [row.fields]).length === 1;
            });
        }
        catch (err) {
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
function renderAll() {
    const expr = currentFilter();
    if (expr === undefined) {
        return;
    }
    renderEda(expr);
    renderModel(expr);
}
function setFilter(text) {
    state.filter = text;
    el("filter-input").value = text;
    syncUrl();
    renderAll();
}
/** Click-to-filter: AND the clicked predicate onto the current filter (or
 * replace it when the current text does not parse). */
function addPredicate(field, value) {
    const pred = { kind: "eq", field, value };
    let next = pred;
    if (state.filter.trim() !== "") {
        try {
            next = { kind: "and", left: parseFilter(state.filter), right: pred };
        }
        catch {
            next = pred;
        }
    }
    setFilter(renderFilter(next));
}
function selectTab(tab) {
    el("eda-view").hidden = tab !== "eda";
    el("model-view").hidden = tab !== "model";
    el("tab-eda").classList.toggle("active", tab === "eda");
    el("tab-model").classList.toggle("active", tab === "model");
}
async function selectOwner(owner) {
    state.owner = owner;
    syncUrl();
    await loadOwnerArtifacts(owner);
    renderAll();
}
async function init() {
    state = queryToState(location.search);
    artifacts.eda = await fetchJson(["/api/eda", "eda_summary.json"]);
    const ownersFile = await fetchJson(["/api/owners", "owners.json"]);
    artifacts.owners = ownersFile?.owners ?? [];
    const rowsFile = await fetchJson([
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
    const ownerSelect = el("owner-select");
    ownerSelect.innerHTML = artifacts.owners
        .map((owner) => `<option value="${owner.replace(/"/g, "&quot;")}">${owner}</option>`)
        .join("");
    ownerSelect.value = state.owner;
    const modelSelect = el("model-select");
    modelSelect.innerHTML =
        '<option value="all">all models</option>' +
            FAMILIES.map((f) => `<option value="${f}">${f}</option>`).join("");
    modelSelect.value = state.model;
    const correctnessSelect = el("correctness-select");
    correctnessSelect.value = state.correctness;
    el("filter-input").value = state.filter;
    el("filter-apply").addEventListener("click", () => {
        setFilter(el("filter-input").value);
    });
    el("filter-input").addEventListener("keydown", (event) => {
        if (event.key === "Enter") {
            setFilter(el("filter-input").value);
        }
    });
    el("filter-clear").addEventListener("click", () => {
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
    el("tab-eda").addEventListener("click", () => selectTab("eda"));
    el("tab-model").addEventListener("click", () => selectTab("model"));
    document.body.addEventListener("click", (event) => {
        const target = event.target?.closest("[data-field]");
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
