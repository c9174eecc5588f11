import test from "node:test";
import assert from "node:assert/strict";
import { EDA_FEATURES, FEATURE_TITLES } from "../src/data.js";
import { layoutBubbles, renderAccuracyBarchart, renderBubbleChart, renderConfusionMatrix, renderEmptyState, renderErrorSummaryTable, renderFrequencyTable, renderFrequencyTables, renderMetricsTable, renderPredictionTable, } from "../src/render.js";
test("frequency table orders rows by count then value", () => {
    const html = renderFrequencyTable("location", "Location", { B: 5, A: 5, C: 9 });
    const order = [...html.matchAll(/data-value="([^"]*)"/g)].map((m) => m[1]);
    assert.deepStrictEqual(order, ["C", "A", "B"]);
    assert.match(html, /<td>total<\/td><td class="num">19<\/td>/);
    assert.match(html, /data-field="location"/);
    assert.match(html, /47\.4%/);
});
test("empty frequency table renders an empty state", () => {
    const html = renderFrequencyTable("location", "Location", {});
    assert.match(html, /empty-state/);
    assert.match(html, /no rows match/);
});
test("frequency tables render all seven features in order", () => {
    const tables = {};
    for (const field of EDA_FEATURES) {
        tables[field] = { x: 1 };
    }
    const html = renderFrequencyTables(tables, FEATURE_TITLES);
    const features = [...html.matchAll(/data-feature="([^"]*)"/g)].map((m) => m[1]);
    assert.deepStrictEqual(features, [...EDA_FEATURES]);
});
test("bubble layout scales radius with the square root of the value", () => {
    const { placed } = layoutBubbles([
        { key: "big", value: 100 },
        { key: "small", value: 1 },
    ], 720);
    const byKey = new Map(placed.map((b) => [b.key, b]));
    const big = byKey.get("big");
    const small = byKey.get("small");
    assert.ok(big !== undefined && small !== undefined);
    assert.ok(big.r > small.r, "larger value gets the larger radius");
});
test("bubbles stay inside the chart bounds", () => {
    const entries = [];
    for (let i = 0; i < 40; i += 1) {
        entries.push({ key: `k${i}`, value: 1 + ((i * 7) % 90) });
    }
    const width = 720;
    const { placed, height } = layoutBubbles(entries, width);
    assert.equal(placed.length, entries.length);
    for (const bubble of placed) {
        assert.ok(bubble.x - bubble.r >= 0, `${bubble.key} left edge`);
        assert.ok(bubble.x + bubble.r <= width, `${bubble.key} right edge`);
        assert.ok(bubble.y - bubble.r >= 0, `${bubble.key} top edge`);
        assert.ok(bubble.y + bubble.r <= height, `${bubble.key} bottom edge`);
    }
});
test("bubble chart emits one circle per entry with click attributes", () => {
    const html = renderBubbleChart([
        { key: "team-a", value: 10 },
        { key: "team-b", value: 4 },
        { key: "", value: 2, label: "(unlabeled)" },
    ], { title: "assets by owner", filterField: "owner", filterBy: "key" });
    assert.equal([...html.matchAll(/<circle /g)].length, 3);
    assert.match(html, /data-field="owner" data-value="team-a"/);
    assert.match(html, /data-value=""/);
    assert.match(html, /<title>\(unlabeled\): 2<\/title>/);
});
test("grouped bubble chart colors by group and emits a legend", () => {
    const html = renderBubbleChart([
        { key: "10.10.0.0/16", value: 9, group: "10.0.0.0/8" },
        { key: "10.20.0.0/16", value: 5, group: "10.0.0.0/8" },
        { key: "172.16.0.0/16", value: 7, group: "172.16.0.0/12" },
    ], { title: "cidr16 by cidr8", filterField: "cidr8", filterBy: "group" });
    const fills = [...html.matchAll(/fill="([^"]*)"/g)].map((m) => m[1]);
    assert.equal(fills.length, 3);
    assert.equal(fills[0], fills[1], "same group shares a color");
    assert.notEqual(fills[0], fills[2], "different groups differ");
    const clicks = [...html.matchAll(/data-value="([^"]*)"/g)].map((m) => m[1]);
    assert.deepStrictEqual([...new Set(clicks)].sort(), ["10.0.0.0/8", "172.16.0.0/12"], "clicks filter on the group value");
    assert.match(html, /class="legend"/);
    assert.match(html, /10\.0\.0\.0\/8/);
});
test("empty bubble chart renders an empty state", () => {
    const html = renderBubbleChart([], { title: "assets by owner" });
    assert.match(html, /empty-state/);
    assert.match(html, /no rows match/);
});
test("confusion matrix exposes the four cells", () => {
    const html = renderConfusionMatrix("adaboost", { tp: 80, fp: 6, tn: 204, fn: 5 });
    assert.match(html, /data-family="adaboost"/);
    assert.match(html, /data-cell="tp" data-value="80"/);
    assert.match(html, /data-cell="fn" data-value="5"/);
    assert.match(html, /data-cell="fp" data-value="6"/);
    assert.match(html, /data-cell="tn" data-value="204"/);
});
test("metrics table recomputes from cells and echoes artifact values", () => {
    const cells = { tp: 80, fp: 6, tn: 204, fn: 5 };
    const html = renderMetricsTable("adaboost", cells, {
        accuracy: 0.962712,
        error_rate: 0.0372881,
        precision: 0.930233,
        sensitivity: 0.941176,
        specificity: 0.971429,
        f1: 0.935673,
    });
    const accuracy = (80 + 204) / (80 + 6 + 204 + 5);
    assert.match(html, new RegExp(`data-metric="accuracy" data-value="${accuracy}" data-artifact="0.962712"`));
    assert.match(html, /0\.962712/);
});
test("metrics with zero denominators display n\\/a", () => {
    const html = renderMetricsTable("cart", { tp: 0, fp: 0, tn: 4, fn: 0 }, { accuracy: 1.0, error_rate: 0.0, precision: null, sensitivity: null, specificity: 1.0, f1: null });
    assert.match(html, /data-metric="precision" data-value="" data-artifact=""/);
    assert.match(html, /n\/a/);
    assert.match(html, /data-metric="accuracy" data-value="1"/);
});
test("accuracy barchart carries exact artifact values", () => {
    const html = renderAccuracyBarchart([
        { family: "adaboost", accuracy: 0.962712 },
        { family: "logistic", accuracy: null },
    ]);
    assert.match(html, /data-family="adaboost" data-value="0.962712"/);
    assert.match(html, /data-family="logistic" data-value=""/);
    assert.match(html, /n\/a/);
});
test("error summary table renders the five-number summary", () => {
    const html = renderErrorSummaryTable([
        {
            family: "adaboost",
            summary: { min: 0.0169492, q1: 0.0338983, median: 0.0338983, q3: 0.0508475, max: 0.0508475 },
        },
    ]);
    assert.match(html, /adaboost/);
    assert.match(html, /0\.0169492/);
    assert.match(html, /0\.0508475/);
});
function sampleRow(iteration, labels, actual) {
    const fields = {
        class_name: "Server",
        agent_installed: "yes",
        location: "AMER",
        fqdn_top: "corp",
        os_parent: "linux",
        oui: "Cisco",
        cidr8: "10.0.0.0/8",
        ...labels,
        actual,
    };
    return { iteration, rowId: iteration * 10, fields };
}
const FIVE = ["adaboost", "logistic", "naive_bayes", "cart", "random_forest"];
test("prediction table shows all family columns for model all", () => {
    const rows = [
        sampleRow(0, { adaboost: "yes", logistic: "no", naive_bayes: "yes", cart: "yes", random_forest: "yes" }, "yes"),
    ];
    const html = renderPredictionTable(rows, FIVE, "all");
    for (const family of FIVE) {
        assert.match(html, new RegExp(`<th>${family}</th>`));
    }
    assert.match(html, /class="miss"/);
    assert.match(html, /class="hit"/);
    assert.match(html, /1 rows/);
});
test("prediction table narrows to the selected model", () => {
    const rows = [
        sampleRow(0, { adaboost: "yes", logistic: "no", naive_bayes: "yes", cart: "no", random_forest: "yes" }, "yes"),
    ];
    const html = renderPredictionTable(rows, FIVE, "cart");
    assert.match(html, /<th>cart<\/th>/);
    assert.doesNotMatch(html, /<th>adaboost<\/th>/);
    assert.match(html, /class="miss"/);
});
test("prediction table truncates with a note", () => {
    const rows = [0, 1, 2].map((i) => sampleRow(i, { adaboost: "no", logistic: "no", naive_bayes: "no", cart: "no", random_forest: "no" }, "no"));
    const html = renderPredictionTable(rows, FIVE, "all", 2);
    assert.match(html, /showing first 2 of 3 rows/);
});
test("empty prediction table renders an empty state", () => {
    const html = renderPredictionTable([], FIVE, "all");
    assert.match(html, /empty-state/);
});
test("empty state escapes markup in messages", () => {
    const html = renderEmptyState('<script>alert("x")</script>');
    assert.doesNotMatch(html, /<script>/);
    assert.match(html, /&lt;script&gt;/);
});
