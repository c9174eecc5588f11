/**
 * Artifact schemas and pure data transforms shared by the dashboard views.
 *
 * The dashboard consumes the JSON artifacts written by the `assetowner`
 * evaluation pipeline, either over its read-only HTTP endpoints or straight
 * from a bundle directory on disk. Every displayed number is either copied
 * from an artifact or counted over the filtered row subset here.
 */
export const FAMILIES = [
    "adaboost",
    "logistic",
    "naive_bayes",
    "cart",
    "random_forest",
];
/** The seven features summarized by frequency tables in the EDA view. */
export const EDA_FEATURES = [
    "class_name",
    "agent_installed",
    "location",
    "fqdn_top",
    "os_parent",
    "oui",
    "cidr8",
];
export const FEATURE_TITLES = {
    class_name: "Class Name",
    agent_installed: "Agent Installed",
    location: "Location",
    fqdn_top: "FQDN",
    os_parent: "OS Parent",
    oui: "OUI Vendor",
    cidr8: "CIDR/8",
};
const UNSEEN_LABEL = "(unseen)";
function decodeCode(vocab, code) {
    return code >= 0 && code < vocab.length ? vocab[code] : UNSEEN_LABEL;
}
/** Decodes coded rows into plain string records, one per asset, including
 * the owner label (empty string when unlabeled) and the raw os/vendor
 * strings used by the grouped bubble charts. */
export function decodeRows(file) {
    const rows = [];
    for (let i = 0; i < file.codes.length; i += 1) {
        const row = {};
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
export function predictionRows(file) {
    const families = Object.keys(file.iterations[0]?.labels ?? {});
    const base = file.row_codes.map((codes) => {
        const fields = {};
        for (let c = 0; c < file.columns.length; c += 1) {
            const [name, vocab] = file.columns[c];
            fields[name] = decodeCode(vocab, codes[c]);
        }
        return fields;
    });
    const out = [];
    for (const iteration of file.iterations) {
        for (let slot = 0; slot < iteration.rows.length; slot += 1) {
            const idx = iteration.rows[slot];
            const fields = { ...base[idx] };
            for (const family of families) {
                fields[family] = iteration.labels[family][slot] ? LABEL_YES : LABEL_NO;
            }
            fields.actual = file.actual[idx] ? LABEL_YES : LABEL_NO;
            out.push({ iteration: iteration.iteration, rowId: file.row_ids[idx], fields });
        }
    }
    return out;
}
export function isCorrect(row, family) {
    return row.fields[family] === row.fields.actual;
}
/** Applies the model and correctness selectors to prediction rows. With the
 * model selector on "all", "correct" keeps rows every family got right and
 * "incorrect" keeps rows at least one family got wrong. */
export function filterPredictionRows(rows, families, model, correctness) {
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
export function countBy(rows, field) {
    const counts = {};
    for (const row of rows) {
        const key = row[field] ?? "(missing)";
        counts[key] = (counts[key] ?? 0) + 1;
    }
    return counts;
}
/** Counts rows by member field within group field, mirroring the nested
 * tables in the EDA summary artifact. */
export function nestedCounts(rows, groupField, memberField) {
    const out = {};
    for (const row of rows) {
        const group = row[groupField] ?? "(missing)";
        const member = row[memberField] ?? "(missing)";
        const table = (out[group] ?? (out[group] = {}));
        table[member] = (table[member] ?? 0) + 1;
    }
    return out;
}
/** Serializes a JSON value with sorted object keys and no whitespace, the
 * same canonical form the artifact writer uses, so equal tables produce
 * byte-identical text. */
export function sortedJson(value) {
    if (value === null || typeof value !== "object") {
        return JSON.stringify(value);
    }
    if (Array.isArray(value)) {
        return "[" + value.map(sortedJson).join(",") + "]";
    }
    const obj = value;
    const parts = Object.keys(obj)
        .sort()
        .map((key) => JSON.stringify(key) + ":" + sortedJson(obj[key]));
    return "{" + parts.join(",") + "}";
}
/** Recomputes the metric set from confusion cells; undefined ratios (zero
 * denominators) come back as null. */
export function metricsFromConfusion(cells) {
    const { tp, fp, tn, fn } = cells;
    const n = tp + fp + tn + fn;
    const ratio = (num, den) => den > 0 ? num / den : null;
    const precision = ratio(tp, tp + fp);
    const sensitivity = ratio(tp, tp + fn);
    let f1 = null;
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
export function ownerSlug(owner) {
    return encodeURIComponent(owner).replace(/[!'()*]/g, (c) => "%" + c.charCodeAt(0).toString(16).toUpperCase());
}
